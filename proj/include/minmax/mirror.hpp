#pragma once

// Equality-constrained mirror-flow geometry: oblique projector, effective
// vector field and Jacobian at stationary points, the Householder
// complement basis, and the structure matrices governing particle-method
// rates (weight-only M_MP and the weight-plus-position M_gamma).

#include <memory>
#include <vector>

#include "minmax/errors.hpp"
#include "minmax/game.hpp"
#include "minmax/perturbation.hpp"
#include "minmax/spectral.hpp"

namespace minmax {

// Mirror geometry with a diagonal link Hessian. Entropic coordinates carry
// Phi_ii = 1/z_i (simplex); the rest are Euclidean with a fixed weight
// (position coordinates of conic particle flows use weight a_I / gamma,
// which depends on z, hence the functional form).
struct LinkGeometry {
  std::function<Vector(const Vector&)> phi_diag;  // diagonal of Phi_z
  std::vector<bool> entropic;                     // which coords are simplex-like
  Matrix A_c;  // constraint rows, A_c z = b
  Vector b;

  Vector phi_at(const Vector& z) const {
    for (size_t i = 0; i < entropic.size(); ++i)
      if (entropic[i] && z(static_cast<int>(i)) < 1e-12)
        throw DomainBoundary("link geometry: coordinate at simplex boundary");
    return phi_diag(z);
  }
};

inline LinkGeometry euclidean_link(int dim) {
  LinkGeometry link;
  link.phi_diag = [dim](const Vector&) { return Vector::Ones(dim).eval(); };
  link.entropic.assign(dim, false);
  link.A_c = Matrix::Zero(0, dim);
  link.b = Vector::Zero(0);
  return link;
}

// Entropy link for a weight-only particle game: z = (a, b) on the product of
// two simplices.
inline LinkGeometry entropy_simplex_link(int N, int M) {
  const int d = N + M;
  LinkGeometry link;
  link.phi_diag = [](const Vector& z) { return z.cwiseInverse().eval(); };
  link.entropic.assign(d, true);
  link.A_c = Matrix::Zero(2, d);
  link.A_c.row(0).head(N).setOnes();
  link.A_c.row(1).tail(M).setOnes();
  link.b = Vector::Ones(2);
  return link;
}

// Conic-particle link for a lifted game z = (a, x, b, y): entropy on the
// weights, metric (a_I / gamma) resp. (b_J / gamma) on the positions.
inline LinkGeometry conic_particle_link(int N, int M, double gamma) {
  const int d = 2 * N + 2 * M;
  LinkGeometry link;
  link.phi_diag = [N, M, gamma, d](const Vector& z) {
    Vector phi(d);
    phi.head(N) = z.head(N).cwiseInverse();
    phi.segment(N, N) = z.head(N) / gamma;
    phi.segment(2 * N, M) = z.segment(2 * N, M).cwiseInverse();
    phi.tail(M) = z.segment(2 * N, M) / gamma;
    return phi;
  };
  link.entropic.assign(d, false);
  for (int i = 0; i < N; ++i) link.entropic[i] = true;
  for (int j = 0; j < M; ++j) link.entropic[2 * N + j] = true;
  link.A_c = Matrix::Zero(2, d);
  link.A_c.row(0).head(N).setOnes();
  link.A_c.row(1).segment(2 * N, M).setOnes();
  link.b = Vector::Ones(2);
  return link;
}

// Oblique projector P_z = I - A_c^T [A_c Phi^{-1} A_c^T]^{-1} A_c Phi^{-1}.
inline Matrix projector(const Vector& phi_diag, const Matrix& A_c) {
  const int d = static_cast<int>(phi_diag.size());
  if (A_c.rows() == 0) return Matrix::Identity(d, d);
  if (A_c.cols() != d) throw DimensionMismatch("projector: constraint width mismatch");
  Matrix phi_inv = phi_diag.cwiseInverse().asDiagonal();
  Matrix G = A_c * phi_inv * A_c.transpose();
  Eigen::FullPivLU<Matrix> lu(G);
  if (!lu.isInvertible())
    throw RankDeficientConstraints("projector: A_c Phi^{-1} A_c^T is singular");
  return Matrix::Identity(d, d) - A_c.transpose() * lu.inverse() * A_c * phi_inv;
}

// Effective mirror-flow field Phi^{-1} P_z g(z); the flow is dz/dt = -g_eff.
inline Vector g_eff(const GameModel& game, const LinkGeometry& link, const Vector& z) {
  Vector phi = link.phi_at(z);
  Matrix Pz = projector(phi, link.A_c);
  Vector g = gradient_field(game, z);
  return phi.cwiseInverse().asDiagonal() * (Pz * g);
}

struct EffectiveJacobian {
  Matrix M_eff;    // Phi^{-1} P M P^T
  Matrix tM;       // Phi^{-1/2} P M P^T Phi^{-1/2}
  Matrix R;        // Phi^{-1/2} P Phi^{1/2}, an orthogonal projection
  Matrix reduced;  // M_eff restricted to Ker A_c (orthonormal basis)
  Matrix kernel_basis;  // columns spanning Ker A_c
};

// Linearization of the mirror flow at a stationary point. Caller guarantees
// stationarity; here only the algebra is done.
inline EffectiveJacobian effective_jacobian(const Matrix& M, const Vector& phi_diag,
                                            const Matrix& A_c) {
  const int d = static_cast<int>(M.rows());
  if (phi_diag.size() != d) throw DimensionMismatch("effective_jacobian: Phi size");
  Matrix Pz = projector(phi_diag, A_c);
  Matrix phi_inv = phi_diag.cwiseInverse().asDiagonal();
  Vector phi_sqrt = phi_diag.cwiseSqrt();
  Matrix phi_mh = phi_sqrt.cwiseInverse().asDiagonal();  // Phi^{-1/2}
  EffectiveJacobian out;
  out.M_eff = phi_inv * Pz * M * Pz.transpose();
  out.tM = phi_mh * Pz * M * Pz.transpose() * phi_mh;
  out.R = phi_mh * Pz * Matrix(phi_sqrt.asDiagonal());
  if (A_c.rows() == 0) {
    out.kernel_basis = Matrix::Identity(d, d);
    out.reduced = out.M_eff;
    return out;
  }
  // Orthonormal basis of Ker A_c; M_eff maps into Ker A_c, so this basis
  // carries the whole nonzero spectrum.
  Eigen::FullPivLU<Matrix> lu(A_c);
  Matrix K = lu.kernel();
  Eigen::HouseholderQR<Matrix> qr(K);
  Matrix Qfull = qr.householderQ();
  out.kernel_basis = Qfull.leftCols(K.cols());
  out.reduced = out.kernel_basis.transpose() * out.M_eff * out.kernel_basis;
  return out;
}

// (N-1) x N matrix with orthonormal rows spanning the complement of sqrt_a,
// built from the Householder reflection mapping e_1 to sqrt_a. Fixes the
// sign convention of all reduced matrices.
inline Matrix orthonormal_complement(const Vector& sqrt_a) {
  const int N = static_cast<int>(sqrt_a.size());
  if (std::abs(sqrt_a.norm() - 1.0) > 1e-12)
    throw DimensionMismatch("orthonormal_complement: input must be unit norm");
  Vector v = sqrt_a;
  v(0) -= 1.0;
  Matrix H = Matrix::Identity(N, N);
  double vn2 = v.squaredNorm();
  if (vn2 > 1e-28) H -= (2.0 / vn2) * v * v.transpose();
  // Columns 2..N of H are orthonormal and orthogonal to H e_1 = sqrt_a.
  return H.rightCols(N - 1).transpose();
}

namespace detail {

inline void require_interior_weights(const Vector& w, const char* who) {
  if (std::abs(w.sum() - 1.0) > 1e-8 || w.minCoeff() < 1e-12)
    throw BoundaryWeights(std::string(who) + ": weights must be interior simplex points");
}

}  // namespace detail

// Weight-only structure matrix [[0, B], [-B^T, 0]] with
// B = Pi_a D_a P D_b Pi_b^T; antisymmetric, so its spectral abscissa is 0
// for every payoff matrix.
inline Matrix m_mp(const Matrix& P, const Vector& a_star, const Vector& b_star) {
  const int N = static_cast<int>(a_star.size()), M = static_cast<int>(b_star.size());
  if (P.rows() != N || P.cols() != M) throw DimensionMismatch("m_mp: shape mismatch");
  detail::require_interior_weights(a_star, "m_mp");
  detail::require_interior_weights(b_star, "m_mp");
  Matrix Pia = orthonormal_complement(a_star.cwiseSqrt());
  Matrix Pib = orthonormal_complement(b_star.cwiseSqrt());
  Matrix B = Pia * a_star.cwiseSqrt().asDiagonal() * P *
             b_star.cwiseSqrt().asDiagonal() * Pib.transpose();
  Matrix out = Matrix::Zero(N + M - 2, N + M - 2);
  out.topRightCorner(N - 1, M - 1) = B;
  out.bottomLeftCorner(M - 1, N - 1) = -B.transpose();
  return out;
}

// Weight-and-position structure matrix for a lifted particle game at an
// interior MNE, in coordinates (a-bar, x, b-bar, y), as the curve
// M_gamma = gamma S2 + A0 + sqrt(gamma) A1 + gamma A2. Stationarity of z* is
// checked through the conic flow field.
inline StructuredCurve m_gamma_blocks(const TrigPayoff& payoff, const Vector& a_star,
                                      const Vector& x_star, const Vector& b_star,
                                      const Vector& y_star) {
  const int N = static_cast<int>(a_star.size()), M = static_cast<int>(b_star.size());
  if (x_star.size() != N || y_star.size() != M)
    throw DimensionMismatch("m_gamma_blocks: particle count mismatch");
  detail::require_interior_weights(a_star, "m_gamma_blocks");
  detail::require_interior_weights(b_star, "m_gamma_blocks");

  // Payoff tables over particle pairs.
  Matrix F(N, M), Fx(N, M), Fy(N, M), Fxx(N, M), Fxy(N, M), Fyy(N, M);
  for (int I = 0; I < N; ++I)
    for (int J = 0; J < M; ++J) {
      auto d = payoff.derivs(x_star(I), y_star(J));
      F(I, J) = d.f;
      Fx(I, J) = d.fx;
      Fy(I, J) = d.fy;
      Fxx(I, J) = d.fxx;
      Fxy(I, J) = d.fxy;
      Fyy(I, J) = d.fyy;
    }

  // Stationarity: replicator field on the weights, mean gradient on each
  // position.
  Vector pb = F * b_star;
  Vector pa = F.transpose() * a_star;
  double res = (a_star.asDiagonal() * (pb - Vector::Constant(N, a_star.dot(pb)))).norm() +
               (b_star.asDiagonal() * (pa - Vector::Constant(M, b_star.dot(pa)))).norm() +
               (Fx * b_star).norm() + (Fy.transpose() * a_star).norm();
  if (res > 1e-8)
    throw NotStationary("m_gamma_blocks: point is not a stationary particle configuration");

  Matrix Pia = orthonormal_complement(a_star.cwiseSqrt());
  Matrix Pib = orthonormal_complement(b_star.cwiseSqrt());
  Matrix Da = a_star.cwiseSqrt().asDiagonal();
  Matrix Db = b_star.cwiseSqrt().asDiagonal();

  StructuredCurve curve;
  curve.sizes = {N - 1, N, M - 1, M};
  const int d = 2 * N + 2 * M - 2;
  curve.S2 = Matrix::Zero(d, d);
  curve.A0 = Matrix::Zero(d, d);
  curve.A1 = Matrix::Zero(d, d);
  curve.A2 = Matrix::Zero(d, d);
  const int oa = 0, ox = N - 1, ob = 2 * N - 1, oy = 2 * N + M - 2;

  auto put_antisym = [&](Matrix& dest, int r, int c, const Matrix& block) {
    dest.block(r, c, block.rows(), block.cols()) = block;
    dest.block(c, r, block.cols(), block.rows()) = -block.transpose();
  };

  put_antisym(curve.A0, oa, ob, Matrix(Pia * Da * F * Db * Pib.transpose()));
  put_antisym(curve.A1, oa, oy, Matrix(Pia * Da * Fy * Db));
  put_antisym(curve.A1, ox, ob, Matrix(Da * Fx * Db * Pib.transpose()));
  put_antisym(curve.A2, ox, oy, Matrix(Da * Fxy * Db));
  curve.S2.block(ox, ox, N, N) = Matrix((Fxx * b_star).asDiagonal());
  curve.S2.block(oy, oy, M, M) = Matrix((-(Fyy.transpose() * a_star)).asDiagonal());
  return curve;
}

inline Matrix m_gamma(const TrigPayoff& payoff, const Vector& a_star,
                      const Vector& x_star, const Vector& b_star,
                      const Vector& y_star, double gamma) {
  StructuredCurve c = m_gamma_blocks(payoff, a_star, x_star, b_star, y_star);
  return gamma * c.S2 + c.A0 + std::sqrt(gamma) * c.A1 + gamma * c.A2;
}

}  // namespace minmax
