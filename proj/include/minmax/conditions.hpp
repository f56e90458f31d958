#pragma once

// Local convergence conditions. Four equivalent characterizations of
// mu_tilde(M) > 0 for M = [[Q, P], [-P^T, R]] with Q, R PSD:
//   (i)   min real part of spectrum(M) is positive,
//   (ii)  no eigenvector of the antisymmetric part lies in Ker S,
//   (iii) every left singular vector x of P escapes Ker Q or P^T x escapes Ker R,
//   (iv)  same with the roles of the two sides swapped.

#include <vector>

#include "minmax/game.hpp"
#include "minmax/rng.hpp"
#include "minmax/spectral.hpp"

namespace minmax {

struct ConditionReport {
  double mu_tilde = 0.0;
  double tol = 0.0;  // the absolute tolerance actually used
  bool cond_i = false, cond_ii = false, cond_iii = false, cond_iv = false;
  bool degenerate = false;  // repeated eigenvalues of A within tol
  // Violating vectors, empty when the condition holds. For (ii) complex
  // eigenvectors of A; for (iii)/(iv) real singular vectors.
  std::vector<CVector> witnesses_ii;
  std::vector<Vector> witnesses_iii;
  std::vector<Vector> witnesses_iv;

  bool all_agree() const {
    return cond_i == cond_ii && cond_ii == cond_iii && cond_iii == cond_iv;
  }
};

// tol <= 0 requests the default 1e-8 * ||M||_op.
inline ConditionReport check_conditions(const Matrix& Q, const Matrix& R,
                                        const Matrix& P, double tol = 0.0) {
  const int n = static_cast<int>(Q.rows()), m = static_cast<int>(R.rows());
  Matrix M = assemble(Q, R, P);
  Matrix S = Matrix::Zero(n + m, n + m);
  S.topLeftCorner(n, n) = Q;
  S.bottomRightCorner(m, m) = R;

  ConditionReport rep;
  if (tol <= 0.0) tol = 1e-8 * operator_norm(M);
  rep.tol = tol;
  rep.mu_tilde = spectral_abscissa_min(M);
  rep.cond_i = rep.mu_tilde > tol;

  SvdSystem sv = svd(P);
  const int r = static_cast<int>(sv.singular_values.size());  // min(n, m)

  // Degeneracy of A's spectrum {+-i sigma_j} + zeros: repeated positive
  // singular values, or a zero eigenvalue of multiplicity >= 2.
  int zero_count = (n - r) + (m - r);  // structural kernel when n != m
  for (int j = 0; j < r; ++j)
    if (sv.singular_values(j) <= tol) zero_count += 2;
  for (int j = 0; j + 1 < r; ++j)
    if (sv.singular_values(j) > tol && sv.singular_values(j + 1) > tol &&
        sv.singular_values(j) - sv.singular_values(j + 1) < tol)
      rep.degenerate = true;
  if (zero_count >= 2) rep.degenerate = true;

  // (ii): eigenvectors of A. For sigma_j > 0 they are
  // z = (-i s u_j, v_j)/sqrt(2), s = +-1, eigenvalue i s sigma_j; the kernel
  // contributes (x, 0) with P^T x = 0 and (0, y) with P y = 0.
  rep.cond_ii = true;
  auto test_ii = [&](const CVector& z) {
    double sz = (S.cast<Complex>() * z).norm();
    if (sz <= tol * z.norm()) {
      rep.cond_ii = false;
      rep.witnesses_ii.push_back(z);
    }
  };
  const Complex img(0.0, 1.0);
  for (int j = 0; j < r; ++j) {
    Vector u = sv.left_vectors.col(j);
    Vector v = sv.right_vectors.col(j);
    if (sv.singular_values(j) > tol) {
      for (double s : {1.0, -1.0}) {
        CVector z(n + m);
        z.head(n) = (-img * s) * u.cast<Complex>();
        z.tail(m) = v.cast<Complex>();
        z /= std::sqrt(2.0);
        test_ii(z);
      }
    } else {
      CVector zx = CVector::Zero(n + m);
      zx.head(n) = u.cast<Complex>();
      test_ii(zx);
      CVector zy = CVector::Zero(n + m);
      zy.tail(m) = v.cast<Complex>();
      test_ii(zy);
    }
  }
  for (int j = r; j < n; ++j) {  // extra left null directions (n > m)
    CVector z = CVector::Zero(n + m);
    z.head(n) = sv.left_vectors.col(j).cast<Complex>();
    test_ii(z);
  }
  for (int j = r; j < m; ++j) {  // extra right null directions (m > n)
    CVector z = CVector::Zero(n + m);
    z.tail(m) = sv.right_vectors.col(j).cast<Complex>();
    test_ii(z);
  }

  // (iii): left singular vectors.
  rep.cond_iii = true;
  for (int j = 0; j < n; ++j) {
    Vector u = sv.left_vectors.col(j);
    Vector Ptu = P.transpose() * u;
    bool pass = ((Q * u).norm() > tol) || ((R * Ptu).norm() > tol * Ptu.norm());
    if (!pass) {
      rep.cond_iii = false;
      rep.witnesses_iii.push_back(u);
    }
  }

  // (iv): right singular vectors.
  rep.cond_iv = true;
  for (int j = 0; j < m; ++j) {
    Vector v = sv.right_vectors.col(j);
    Vector Pv = P * v;
    bool pass = ((R * v).norm() > tol) || ((Q * Pv).norm() > tol * Pv.norm());
    if (!pass) {
      rep.cond_iv = false;
      rep.witnesses_iv.push_back(v);
    }
  }

  return rep;
}

// Fraction of Gaussian interaction matrices P for which mu_tilde(M) > 0 with
// the given fixed symmetric part. Expected 1.0 whenever S != 0.
inline double genericity_probe(const Matrix& Q, const Matrix& R, int trials,
                               std::uint64_t seed) {
  if (trials < 1) throw ConfigError("genericity_probe: trials >= 1 required");
  const int n = static_cast<int>(Q.rows()), m = static_cast<int>(R.rows());
  int hits = 0;
  for (int t = 0; t < trials; ++t) {
    auto rng = make_rng(seed, static_cast<std::uint64_t>(t));
    Matrix P = gaussian_matrix(n, m, rng);
    Matrix M = assemble(Q, R, P);
    double tol = 1e-10 * std::max(1.0, operator_norm(M));
    if (spectral_abscissa_min(M) > tol) ++hits;
  }
  return static_cast<double>(hits) / trials;
}

}  // namespace minmax
