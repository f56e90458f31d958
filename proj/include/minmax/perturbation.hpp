#pragma once

// Eigenvalue perturbation machinery: first/second/third derivatives of
// eigenvalues along matrix curves, eigengap and conditioning control under
// perturbation, the second-order expansion around a normal matrix with a
// certified remainder, and the first-order expansion of the spectral
// abscissa of M = A + alpha S.

#include <array>
#include <cmath>
#include <vector>

#include "minmax/errors.hpp"
#include "minmax/game.hpp"
#include "minmax/rng.hpp"
#include "minmax/spectral.hpp"

namespace minmax {

struct EigenDerivatives {
  CVector lambda_dot;
  CVector lambda_ddot;
  CMatrix v_dot;  // column k = derivative of v_k (normalization scalar c_k = 0)
  CMatrix w_dot;  // column k = derivative of w_k
};

namespace detail {

// inner(j, k) = conj(w_j)^T X v_k for all pairs.
inline CMatrix dual_inner(const EigenSystem& sys, const CMatrix& X) {
  return sys.dual().adjoint() * X * sys.right_vectors;
}

inline void require_gap(const EigenSystem& sys, double min_gap = 1e-10) {
  if (min_eigengap(sys.values) <= min_gap)
    throw EigengapTooSmall("eigenvalue derivatives need distinct eigenvalues");
}

}  // namespace detail

inline EigenDerivatives eigenvalue_derivatives(const EigenSystem& sys,
                                               const CMatrix& Mdot,
                                               const CMatrix& Mddot) {
  detail::require_gap(sys);
  const int d = sys.size();
  CMatrix a = detail::dual_inner(sys, Mdot);   // a(j,k) = w_j^* Mdot v_k
  CMatrix b = detail::dual_inner(sys, Mddot);
  EigenDerivatives out;
  out.lambda_dot.resize(d);
  out.lambda_ddot.resize(d);
  out.v_dot = CMatrix::Zero(d, d);
  out.w_dot = CMatrix::Zero(d, d);
  for (int k = 0; k < d; ++k) {
    out.lambda_dot(k) = a(k, k);
    Complex cross = 0.0;
    for (int j = 0; j < d; ++j) {
      if (j == k) continue;
      const Complex dkj = sys.values(k) - sys.values(j);
      cross += a(k, j) * a(j, k) / dkj;
      out.v_dot.col(k) += (a(j, k) / dkj) * sys.right_vectors.col(j);
      // w_k^* derivative has coefficient a(k, j)/dkj on w_j^*; stored as a
      // vector so that conj(w_dot_k)^T reproduces the row formula.
      out.w_dot.col(k) += std::conj(a(k, j) / dkj) * sys.dual().col(j);
    }
    out.lambda_ddot(k) = b(k, k) + 2.0 * cross;
  }
  return out;
}

struct ThirdDerivative {
  CVector lambda_dddot;
  double bound = 0.0;  // uniform bound on |lambda_dddot_k|
};

inline ThirdDerivative third_derivative(const EigenSystem& sys, const CMatrix& Mdot,
                                        const CMatrix& Mddot, const CMatrix& Mdddot) {
  detail::require_gap(sys);
  const int d = sys.size();
  CMatrix a = detail::dual_inner(sys, Mdot);
  CMatrix b = detail::dual_inner(sys, Mddot);
  CMatrix c = detail::dual_inner(sys, Mdddot);
  ThirdDerivative out;
  out.lambda_dddot.resize(d);
  for (int k = 0; k < d; ++k) {
    Complex acc = c(k, k);
    for (int j = 0; j < d; ++j) {
      if (j == k) continue;
      const Complex dkj = sys.values(k) - sys.values(j);
      acc += 3.0 * (a(k, j) * b(j, k) + b(k, j) * a(j, k)) / dkj;
      acc -= 6.0 * (a(k, j) * a(j, k) / (dkj * dkj)) * a(k, k);
      for (int l = 0; l < d; ++l) {
        if (l == k) continue;
        const Complex dkl = sys.values(k) - sys.values(l);
        acc += 6.0 * a(k, j) * a(j, l) * a(l, k) / (dkj * dkl);
      }
    }
    out.lambda_dddot(k) = acc;
  }
  const double gamma = min_eigengap(sys.values);
  double chi = 0.0;
  for (int k = 0; k < d; ++k)
    chi = std::max(chi, sys.right_vectors.col(k).norm() * sys.dual().col(k).norm());
  const double nd = operator_norm(Mdot), ndd = operator_norm(Mddot),
               nddd = operator_norm(Mdddot);
  out.bound = chi * nddd + 6.0 * d / gamma * chi * chi * nd * ndd +
              6.0 * d * d / (gamma * gamma) * chi * chi * chi * nd * nd * nd;
  return out;
}

struct GammaChiControl {
  double gamma_lower = 0.0;
  double chi_upper = 0.0;
  bool valid = false;  // false when ||Delta|| >= gamma(0) / (2 sqrt(2d))
};

inline GammaChiControl gamma_chi_control(const CMatrix& M0, const CMatrix& Delta) {
  require_square(M0, "gamma_chi_control");
  const int d = static_cast<int>(M0.rows());
  const double gamma0 = min_eigengap(eigenvalues_of(M0));
  const double nd = operator_norm(Delta);
  GammaChiControl out;
  out.gamma_lower = gamma0 - 2.0 * nd;
  out.valid = nd < gamma0 / (2.0 * std::sqrt(2.0 * d));
  out.chi_upper = out.valid
                      ? gamma0 / (gamma0 - 2.0 * std::sqrt(2.0 * d) * nd)
                      : std::numeric_limits<double>::infinity();
  return out;
}

struct MatrixCurve {
  CMatrix M0, M1, M2;  // M_alpha = M0 + alpha M1 + (alpha^2 / 2) M2

  CMatrix at(double alpha) const {
    return M0 + alpha * M1 + 0.5 * alpha * alpha * M2;
  }
};

struct ExpansionResult {
  CVector lambda0;        // eigenvalues of M0
  CVector first_order;    // coefficient of alpha
  CVector second_order;   // coefficient of alpha^2 (M2 diagonal + cross terms)
  double remainder_bound = 0.0;  // uniform over j at the queried alpha
  double validity_radius = 0.0;  // max alpha the certificate covers
  double alpha = 0.0;

  CVector approx() const {
    return lambda0 + alpha * first_order + alpha * alpha * second_order;
  }
};

// Second-order spectrum expansion around a normal M0 with distinct
// eigenvalues. Valid while ||alpha M1 + (alpha^2/2) M2|| <= gamma0/(4 sqrt(2d)).
inline ExpansionResult expand_normal(const MatrixCurve& curve, double alpha) {
  require_square(curve.M0, "expand_normal");
  const int d = static_cast<int>(curve.M0.rows());
  const double scale = std::max(1.0, frobenius_norm(curve.M0));
  if (operator_norm(CMatrix(curve.M0 * curve.M0.adjoint() -
                            curve.M0.adjoint() * curve.M0)) >
      1e-10 * scale * scale)
    throw NotNormal("expand_normal: M0 is not normal");

  EigenSystem sys = eigendecompose(curve.M0);
  const double gamma0 = min_eigengap(sys.values);
  if (gamma0 <= 1e-10) throw EigengapTooSmall("expand_normal: repeated eigenvalues");

  // For a normal matrix the computed eigenvectors are orthonormal; use them
  // as the unitary frame w_j.
  const CMatrix& W = sys.right_vectors;
  const double cap = gamma0 / (4.0 * std::sqrt(2.0 * d));
  const double n1 = operator_norm(curve.M1), n2 = operator_norm(curve.M2);

  if (operator_norm(CMatrix(alpha * curve.M1 + 0.5 * alpha * alpha * curve.M2)) >
      cap * (1.0 + 1e-12))
    throw AlphaOutOfRange("expand_normal: alpha outside certified radius");

  ExpansionResult out;
  out.alpha = alpha;
  out.lambda0 = sys.values;
  out.first_order.resize(d);
  out.second_order.resize(d);
  CMatrix A1 = W.adjoint() * curve.M1 * W;
  CMatrix A2 = W.adjoint() * curve.M2 * W;
  for (int j = 0; j < d; ++j) {
    out.first_order(j) = A1(j, j);
    Complex cross = 0.0;
    for (int k = 0; k < d; ++k) {
      if (k == j) continue;
      cross += A1(j, k) * A1(k, j) / (sys.values(j) - sys.values(k));
    }
    out.second_order(j) = 0.5 * A2(j, j) + cross;
  }
  out.remainder_bound = std::pow(std::abs(alpha), 3) * 8.0 * d / gamma0 * n1 *
                        (n2 + 4.0 * d / gamma0 * n1 * n1);
  // Conservative radius from the triangle inequality
  // alpha ||M1|| + (alpha^2/2) ||M2|| <= cap.
  if (n1 == 0.0 && n2 == 0.0)
    out.validity_radius = std::numeric_limits<double>::infinity();
  else if (n2 == 0.0)
    out.validity_radius = cap / n1;
  else
    out.validity_radius = (std::sqrt(n1 * n1 + 2.0 * n2 * cap) - n1) / n2;
  return out;
}

// Max |exact - approx| after greedy nearest-value matching of the exact
// spectrum of M_alpha against the expansion. The certificate keeps perturbed
// eigenvalues in disjoint disks, so nearest matching is unambiguous inside
// the validity radius.
inline double expansion_error(const ExpansionResult& exp, const MatrixCurve& curve) {
  CVector exact = eigenvalues_of(curve.at(exp.alpha));
  CVector approx = exp.approx();
  const int d = static_cast<int>(exact.size());
  std::vector<bool> used(d, false);
  double worst = 0.0;
  for (int j = 0; j < d; ++j) {
    int best = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (int k = 0; k < d; ++k) {
      if (used[k]) continue;
      double dist = std::abs(exact(k) - approx(j));
      if (dist < best_dist) {
        best_dist = dist;
        best = k;
      }
    }
    used[best] = true;
    worst = std::max(worst, best_dist);
  }
  return worst;
}

struct TmuFirstOrder {
  double estimate = 0.0;  // (alpha/2) min_j (u_j^T Q u_j + v_j^T R v_j)
  int argmin = -1;
};

// First-order expansion of the spectral abscissa of M = A + alpha S in terms
// of the singular vectors of P; error is O(alpha^3).
inline TmuFirstOrder tmu_first_order(const Matrix& Q, const Matrix& R,
                                     const Matrix& P, double alpha) {
  const int n = static_cast<int>(Q.rows());
  if (R.rows() != n || P.rows() != n || P.cols() != n)
    throw DimensionMismatch("tmu_first_order: requires n = m");
  SvdSystem sv = svd(P);
  for (int j = 0; j + 1 < n; ++j)
    if (sv.singular_values(j) - sv.singular_values(j + 1) <= 1e-10)
      throw DegenerateSingularValues("tmu_first_order: singular value gap too small");
  if (n > 0 && sv.singular_values(n - 1) <= 1e-10)
    throw DegenerateSingularValues("tmu_first_order: P is rank deficient");
  TmuFirstOrder out;
  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j < n; ++j) {
    Vector u = sv.left_vectors.col(j), v = sv.right_vectors.col(j);
    double q = u.dot(Q * u) + v.dot(R * v);
    if (q < best) {
      best = q;
      out.argmin = j;
    }
  }
  out.estimate = 0.5 * alpha * best;
  return out;
}

// Structured curve M_gamma = gamma S2 + A0 + sqrt(gamma) A1 + gamma A2 on a
// 4-block partition (sizes n1..n4). Sparsity: S2 lives on diagonal blocks 2
// and 4; A0 couples blocks (1,3); A1 couples (1,4) and (2,3); A2 couples
// (2,4). The spectral abscissa of such curves is O(gamma^2).
struct StructuredCurve {
  Matrix S2, A0, A1, A2;
  std::array<int, 4> sizes;
};

struct StructuredTmuResult {
  std::vector<double> mu;     // one per input gamma
  bool perturbed = false;     // A0 block was degenerate and noise was added
};

namespace detail {

inline void check_pattern(const Matrix& X, const std::array<int, 4>& sz,
                          const std::vector<std::pair<int, int>>& allowed,
                          bool symmetric, const char* name) {
  const int d = sz[0] + sz[1] + sz[2] + sz[3];
  if (X.rows() != d || X.cols() != d)
    throw DimensionMismatch(std::string("structured_tmu_curve: bad size for ") + name);
  double asym = symmetric ? operator_norm(Matrix(X - X.transpose()))
                          : operator_norm(Matrix(X + X.transpose()));
  if (asym > 1e-10 * std::max(1.0, operator_norm(X)))
    throw PatternViolation(std::string(name) + ": wrong symmetry type");
  std::array<int, 4> off{0, sz[0], sz[0] + sz[1], sz[0] + sz[1] + sz[2]};
  for (int bi = 0; bi < 4; ++bi)
    for (int bj = bi; bj < 4; ++bj) {
      bool ok = false;
      for (auto& p : allowed)
        if ((p.first == bi && p.second == bj) || (p.first == bj && p.second == bi))
          ok = true;
      if (ok || sz[bi] == 0 || sz[bj] == 0) continue;
      if (X.block(off[bi], off[bj], sz[bi], sz[bj]).cwiseAbs().maxCoeff() > 1e-10)
        throw PatternViolation(std::string(name) + ": nonzero outside allowed blocks");
    }
}

}  // namespace detail

inline StructuredTmuResult structured_tmu_curve(const StructuredCurve& curve,
                                                const std::vector<double>& gammas,
                                                std::uint64_t noise_seed = 0) {
  detail::check_pattern(curve.S2, curve.sizes, {{1, 1}, {3, 3}}, true, "S2");
  detail::check_pattern(curve.A0, curve.sizes, {{0, 2}}, false, "A0");
  detail::check_pattern(curve.A1, curve.sizes, {{0, 3}, {1, 2}}, false, "A1");
  detail::check_pattern(curve.A2, curve.sizes, {{1, 3}}, false, "A2");

  StructuredTmuResult out;
  Matrix A0 = curve.A0;
  // Degenerate coupling block: singular values of the (1,3) block must be
  // distinct for the gamma^2 scaling argument. Break ties with tiny
  // antisymmetric noise and report that we did.
  const auto& sz = curve.sizes;
  if (sz[0] > 0 && sz[2] > 0) {
    Matrix B = A0.block(0, sz[0] + sz[1], sz[0], sz[2]);
    Vector s = svd(B).singular_values;
    bool degenerate = false;
    for (int j = 0; j + 1 < s.size(); ++j)
      if (s(j) - s(j + 1) < 1e-9) degenerate = true;
    if (degenerate) {
      auto rng = make_rng(noise_seed == 0 ? 0x5eedULL : noise_seed);
      Matrix G = gaussian_matrix(static_cast<int>(A0.rows()),
                                 static_cast<int>(A0.cols()), rng);
      A0 += 1e-9 * 0.5 * (G - G.transpose());
      out.perturbed = true;
    }
  }

  for (double g : gammas) {
    if (g < 0) throw ConfigError("structured_tmu_curve: gamma must be >= 0");
    Matrix Mg = g * curve.S2 + A0 + std::sqrt(g) * curve.A1 + g * curve.A2;
    out.mu.push_back(spectral_abscissa_min(Mg));
  }
  return out;
}

// Least-squares slope of log(y) against log(x); used for order checks.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw DimensionMismatch("loglog_slope: need >= 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int used = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0) || !(y[i] > 0)) continue;
    double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++used;
  }
  if (used < 2) throw InsufficientDecay("loglog_slope: fewer than 2 positive points");
  return (used * sxy - sx * sy) / (used * sxx - sx * sx);
}

}  // namespace minmax
