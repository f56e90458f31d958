#pragma once

// Update-operator Jacobians at the optimum for the discrete algorithms,
// alternating-GDA half-step operators with their certified composite error,
// exact eigenvalue moduli (Sim-GDA, PP), and the small-alpha / small-eta
// expansions of the squared spectral radius with explicit error budgets.

#include <string>
#include <vector>

#include "minmax/errors.hpp"
#include "minmax/game.hpp"
#include "minmax/spectral.hpp"

namespace minmax {

enum class DtAlgo { sim_gda, pp, alt_gda, eg };

inline std::string to_string(DtAlgo a) {
  switch (a) {
    case DtAlgo::sim_gda: return "sim_gda";
    case DtAlgo::pp: return "pp";
    case DtAlgo::alt_gda: return "alt_gda";
    case DtAlgo::eg: return "eg";
  }
  return "?";
}

// One-step Jacobian at a fixed point for the explicit/implicit updates.
// alt_gda is handled separately (alt_gda_halfstep_jacobians) because its
// Jacobian is built from half-step operators.
inline Matrix jac(DtAlgo algo, const Matrix& M, double eta) {
  const int d = static_cast<int>(M.rows());
  Matrix I = Matrix::Identity(d, d);
  switch (algo) {
    case DtAlgo::sim_gda:
      return I - eta * M;
    case DtAlgo::eg:
      return I - eta * M * (I - eta * M);
    case DtAlgo::pp: {
      Matrix B = I + eta * M;
      Eigen::FullPivLU<Matrix> lu(B);
      if (!lu.isInvertible())
        throw SingularResolvent("jac(pp): I + eta M is singular");
      return lu.inverse();
    }
    case DtAlgo::alt_gda:
      throw ConfigError("jac: use alt_gda_halfstep_jacobians for alt_gda");
  }
  throw ConfigError("jac: unknown algorithm");
}

struct HalfStepJacobians {
  Matrix Txy;                // x first within the half step
  Matrix Tyx;                // y first
  Matrix composite_xy_yx;    // Txy * Tyx
  Matrix composite_yx_xy;    // Tyx * Txy
  Matrix model;              // I - eta M + (eta^2/2) A M
  Matrix E;                  // composite_xy_yx - model
  double e_bound = 0.0;      // 2 eta^3 ||P|| (||P|| v ||Q|| v ||R||)^2
};

inline HalfStepJacobians alt_gda_halfstep_jacobians(const Matrix& Q, const Matrix& R,
                                                    const Matrix& P, double eta) {
  const int n = static_cast<int>(Q.rows()), m = static_cast<int>(R.rows());
  const double nq = operator_norm(Q), nr = operator_norm(R), np = operator_norm(P);
  if ((nq > 0 && eta > 1.0 / nq) || (nr > 0 && eta > 1.0 / nr))
    throw StepTooLarge("alt_gda_halfstep_jacobians: need eta <= min(1/||Q||, 1/||R||)");

  Matrix In = Matrix::Identity(n, n), Im = Matrix::Identity(m, m);
  Matrix Rinv = (Im - 0.5 * eta * R).inverse();
  Matrix Qinv = (In - 0.5 * eta * Q).inverse();

  HalfStepJacobians out;
  out.Txy.resize(n + m, n + m);
  out.Txy.topLeftCorner(n, n) = In - 0.5 * eta * Q - 0.25 * eta * eta * P * Rinv * P.transpose();
  out.Txy.topRightCorner(n, m) = -0.5 * eta * P * Rinv * (Im - eta * R);
  out.Txy.bottomLeftCorner(m, n) = Rinv * (0.5 * eta) * P.transpose();
  out.Txy.bottomRightCorner(m, m) = Rinv * (Im - eta * R);

  out.Tyx.resize(n + m, n + m);
  out.Tyx.topLeftCorner(n, n) = Qinv * (In - eta * Q);
  out.Tyx.topRightCorner(n, m) = -Qinv * (0.5 * eta) * P;
  out.Tyx.bottomLeftCorner(m, n) = 0.5 * eta * P.transpose() * Qinv * (In - eta * Q);
  out.Tyx.bottomRightCorner(m, m) = Im - 0.5 * eta * R - 0.25 * eta * eta * P.transpose() * Qinv * P;

  out.composite_xy_yx = out.Txy * out.Tyx;
  out.composite_yx_xy = out.Tyx * out.Txy;
  Matrix M = assemble(Q, R, P);
  Matrix A = assemble(Matrix::Zero(n, n), Matrix::Zero(m, m), P);
  Matrix I = Matrix::Identity(n + m, n + m);
  out.model = I - eta * M + 0.5 * eta * eta * A * M;
  out.E = out.composite_xy_yx - out.model;
  double lmax = std::max({np, nq, nr});
  out.e_bound = 2.0 * eta * eta * eta * np * lmax * lmax;
  return out;
}

// Exact squared moduli of the eigenvalues of the update Jacobian from the
// spectrum of M: Sim-GDA |1 - eta lam|^2 and PP |1 + eta lam|^{-2}.
inline std::vector<double> exact_moduli(DtAlgo algo, const CVector& spectrum, double eta) {
  std::vector<double> out;
  out.reserve(spectrum.size());
  for (int k = 0; k < spectrum.size(); ++k) {
    const double re = spectrum(k).real(), a2 = std::norm(spectrum(k));
    if (algo == DtAlgo::sim_gda) {
      out.push_back(1.0 - 2.0 * eta * re + eta * eta * a2);
    } else if (algo == DtAlgo::pp) {
      double den = 1.0 + 2.0 * eta * re + eta * eta * a2;
      if (den <= 0) throw SingularResolvent("exact_moduli(pp): singular resolvent");
      out.push_back(1.0 / den);
    } else {
      throw ConfigError("exact_moduli: only sim_gda and pp have closed forms");
    }
  }
  return out;
}

struct RhoExpansion {
  DtAlgo algo;
  double eta = 0.0, alpha = 0.0;
  // Spectral data of A = [[0, P], [-P^T, 0]]: signed frequencies sigma_j and
  // the diagonal values s_j = conj(w_j)^T S w_j, j over all d = n + m modes.
  std::vector<double> sigma;
  std::vector<double> s_diag;
  std::vector<double> leading;   // per-mode leading expression of rho^2
  double leading_extreme = 0.0;  // max_j (min_j inner expression for pp)
  double budget_a3 = 0.0;        // alpha^3 eta term
  double budget_a2 = 0.0;        // alpha^2 eta^2 term
  double uncertified_eta3 = 0.0; // alt_gda only: allowance for rho(T) vs rho(T-bar)
  double validity_alpha = 0.0;   // max alpha the certificate covers

  double budget() const { return budget_a3 + budget_a2; }
};

// Expansion of rho(grad T)^2 for M = alpha S + A. For pp the certified
// statement is about the inner expression 1 + 2 alpha eta s_j + eta^2
// sigma_j^2 whose min is the reciprocal of rho^2; `leading` stores the inner
// values and `leading_extreme` their min. For alt_gda the certificate covers
// the symmetrized model I - eta M + (eta^2/2) A M; the eta^3 gap to the true
// composite is reported in uncertified_eta3, not asserted.
inline RhoExpansion rho_expansion(DtAlgo algo, const Matrix& Q, const Matrix& R,
                                  const Matrix& P, double eta, double alpha) {
  const int n = static_cast<int>(Q.rows()), m = static_cast<int>(R.rows());
  const int d = n + m;
  Matrix S = Matrix::Zero(d, d);
  S.topLeftCorner(n, n) = Q;
  S.bottomRightCorner(m, m) = R;
  Matrix A = assemble(Matrix::Zero(n, n), Matrix::Zero(m, m), P);

  // Eigenmodes of A: frequencies sigma_j (imaginary parts) and unitary w_j.
  EigenSystem asys = eigendecompose(A);
  std::vector<double> sigma(d), sdiag(d);
  for (int j = 0; j < d; ++j) {
    sigma[j] = asys.values(j).imag();
    CVector wj = asys.right_vectors.col(j);
    sdiag[j] = (wj.adjoint() * S.cast<Complex>() * wj)(0, 0).real();
  }
  double gamma_a = std::numeric_limits<double>::infinity();
  for (int j = 0; j < d; ++j)
    for (int k = j + 1; k < d; ++k)
      gamma_a = std::min(gamma_a, std::abs(sigma[j] - sigma[k]));
  if (!(gamma_a > 1e-12))
    throw DegenerateSpectrum("rho_expansion: A has repeated eigenvalues");
  const double ls = operator_norm(S), la = operator_norm(A);
  const double root = 4.0 * std::sqrt(2.0 * d);

  RhoExpansion out;
  out.algo = algo;
  out.eta = eta;
  out.alpha = alpha;
  out.sigma = sigma;
  out.s_diag = sdiag;
  out.leading.resize(d);

  switch (algo) {
    case DtAlgo::sim_gda:
    case DtAlgo::pp: {
      out.validity_alpha = (ls > 0) ? gamma_a / (root * ls)
                                    : std::numeric_limits<double>::infinity();
      const double sgn = (algo == DtAlgo::sim_gda) ? -1.0 : 1.0;
      for (int j = 0; j < d; ++j)
        out.leading[j] = 1.0 + sgn * 2.0 * alpha * eta * sdiag[j] +
                         eta * eta * sigma[j] * sigma[j];
      out.budget_a3 = std::pow(alpha, 3) * eta * 128.0 * d * d / (gamma_a * gamma_a) *
                      ls * ls * ls * (1.0 + 5.0 * eta * la);
      out.budget_a2 = alpha * alpha * eta * eta * 2.0 / gamma_a * ls * ls * la;
      break;
    }
    case DtAlgo::alt_gda: {
      out.validity_alpha =
          (ls > 0) ? gamma_a / (root * ls * (1.0 + 0.5 * eta * la))
                   : std::numeric_limits<double>::infinity();
      for (int j = 0; j < d; ++j)
        out.leading[j] = 1.0 - 2.0 * alpha * eta * sdiag[j] +
                         0.25 * std::pow(eta * sigma[j], 4);
      const double grow = 1.0 + eta * la;
      out.budget_a3 = std::pow(alpha, 3) * eta * 512.0 * d * d /
                      (gamma_a * gamma_a) * ls * ls * ls * std::pow(grow, 6);
      out.budget_a2 = alpha * alpha * eta * eta * 4.0 * d / gamma_a * ls * ls *
                      la * std::pow(grow, 4);
      // ||E|| between the true composite and the symmetrized model.
      double lmax = std::max(la, alpha * ls);
      out.uncertified_eta3 = 2.0 * std::pow(eta, 3) * la * lmax * lmax;
      break;
    }
    case DtAlgo::eg: {
      out.validity_alpha = std::min(
          1.0, (ls > 0) ? gamma_a / (root * ls * (1.0 + eta * ls * (1.0 + 2.0 * la)))
                        : std::numeric_limits<double>::infinity());
      for (int j = 0; j < d; ++j) {
        const double s2 = sigma[j] * sigma[j];
        out.leading[j] = 1.0 - 2.0 * alpha * eta * sdiag[j] - eta * eta * s2 -
                         2.0 * alpha * std::pow(eta, 3) * s2 * sdiag[j] +
                         std::pow(eta, 4) * s2 * s2;
      }
      const double grow = 1.0 + eta * la;
      out.budget_a3 = std::pow(alpha, 3) * eta * 4096.0 * d * d /
                      (gamma_a * gamma_a) * ls * ls * ls * std::pow(grow, 7);
      out.budget_a2 = alpha * alpha * eta * eta * 15.0 * d / gamma_a * ls * ls *
                      la * grow * grow;
      break;
    }
  }
  if (alpha > out.validity_alpha * (1.0 + 1e-12))
    throw AlphaOutOfRange("rho_expansion: alpha exceeds the certified radius");
  if (algo == DtAlgo::pp) {
    double mn = std::numeric_limits<double>::infinity();
    for (double v : out.leading) mn = std::min(mn, v);
    out.leading_extreme = mn;
  } else {
    double mx = -std::numeric_limits<double>::infinity();
    for (double v : out.leading) mx = std::max(mx, v);
    out.leading_extreme = mx;
  }
  return out;
}

// Exact rho(grad T)^2 for the expansion's M = alpha S + A, via the
// eigensolver. For alt_gda this is the symmetrized model's value (certified
// object) unless use_composite is set.
inline double rho_sq_exact(DtAlgo algo, const Matrix& Q, const Matrix& R,
                           const Matrix& P, double eta, double alpha,
                           bool use_composite = false) {
  Matrix M = assemble(Matrix(alpha * Q), Matrix(alpha * R), P);
  if (algo == DtAlgo::alt_gda) {
    auto hs = alt_gda_halfstep_jacobians(Matrix(alpha * Q), Matrix(alpha * R), P, eta);
    double r = spectral_radius(use_composite ? hs.composite_xy_yx : hs.model);
    return r * r;
  }
  double r = spectral_radius(jac(algo, M, eta));
  return r * r;
}

}  // namespace minmax
