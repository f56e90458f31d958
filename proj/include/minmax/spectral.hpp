#pragma once

// Dense spectral primitives: eigendecomposition with a dual (left) basis,
// SVD, norms, spectral radius and the minimum-real-part abscissa.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

#include "minmax/errors.hpp"

namespace minmax {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

inline void require_square(const CMatrix& M, const char* who) {
  if (M.rows() != M.cols())
    throw DimensionMismatch(std::string(who) + ": matrix must be square");
  if (!M.allFinite())
    throw DimensionMismatch(std::string(who) + ": non-finite entries");
}

// Eigenvalues sorted by (Re, Im, original index); the permutation applies to
// columns of V as well, so derived quantities are deterministic.
struct EigenSystem {
  CVector values;
  CMatrix right_vectors;       // unit columns v_k
  mutable CMatrix dual_vectors;  // columns w_k with conj(w_j)^T v_k = delta_jk
  mutable bool dual_ready = false;
  mutable double vector_condition = 0.0;

  int size() const { return static_cast<int>(values.size()); }

  // The dual basis is the inverse transpose of the eigenvector matrix. It is
  // only needed by perturbation formulas, so it is built on first use.
  const CMatrix& dual() const {
    if (!dual_ready) {
      Eigen::JacobiSVD<CMatrix> svd(right_vectors);
      double smin = svd.singularValues()(svd.singularValues().size() - 1);
      double smax = svd.singularValues()(0);
      vector_condition = (smin > 0) ? smax / smin : std::numeric_limits<double>::infinity();
      if (!(smin > 0) || vector_condition > 1e12)
        throw DefectiveMatrix("eigenvector matrix numerically singular (cond > 1e12)");
      dual_vectors = right_vectors.inverse().adjoint();
      dual_ready = true;
    }
    return dual_vectors;
  }
};

namespace detail {

inline std::vector<int> sort_order(const CVector& vals) {
  std::vector<int> idx(vals.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (vals(a).real() != vals(b).real()) return vals(a).real() < vals(b).real();
    return vals(a).imag() < vals(b).imag();
  });
  return idx;
}

}  // namespace detail

inline EigenSystem eigendecompose(const CMatrix& M) {
  require_square(M, "eigendecompose");
  Eigen::ComplexEigenSolver<CMatrix> es(M, /*computeEigenvectors=*/true);
  if (es.info() != Eigen::Success)
    throw DefectiveMatrix("eigensolver failed to converge");
  CVector vals = es.eigenvalues();
  CMatrix vecs = es.eigenvectors();
  auto idx = detail::sort_order(vals);
  EigenSystem sys;
  sys.values.resize(vals.size());
  sys.right_vectors.resize(vecs.rows(), vecs.cols());
  for (int k = 0; k < static_cast<int>(idx.size()); ++k) {
    sys.values(k) = vals(idx[k]);
    sys.right_vectors.col(k) = vecs.col(idx[k]).normalized();
  }
  return sys;
}

inline EigenSystem eigendecompose(const Matrix& M) {
  return eigendecompose(CMatrix(M.cast<Complex>()));
}

// Eigenvalues only, sorted; never touches the dual basis.
inline CVector eigenvalues_of(const CMatrix& M) {
  require_square(M, "eigenvalues_of");
  Eigen::ComplexEigenSolver<CMatrix> es(M, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw DefectiveMatrix("eigensolver failed to converge");
  CVector vals = es.eigenvalues();
  auto idx = detail::sort_order(vals);
  CVector out(vals.size());
  for (int k = 0; k < static_cast<int>(idx.size()); ++k) out(k) = vals(idx[k]);
  return out;
}

inline CVector eigenvalues_of(const Matrix& M) {
  return eigenvalues_of(CMatrix(M.cast<Complex>()));
}

struct SvdSystem {
  Matrix left_vectors;    // columns u_j
  Vector singular_values; // descending
  Matrix right_vectors;   // columns v_j
};

inline SvdSystem svd(const Matrix& P) {
  if (!P.allFinite()) throw DimensionMismatch("svd: non-finite entries");
  Eigen::JacobiSVD<Matrix> s(P, Eigen::ComputeFullU | Eigen::ComputeFullV);
  SvdSystem out;
  out.left_vectors = s.matrixU();
  out.singular_values = s.singularValues();
  out.right_vectors = s.matrixV();
  return out;
}

inline double operator_norm(const CMatrix& M) {
  if (M.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> s(M);
  return s.singularValues()(0);
}

inline double operator_norm(const Matrix& M) {
  if (M.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> s(M);
  return s.singularValues()(0);
}

inline double frobenius_norm(const CMatrix& M) { return M.norm(); }
inline double frobenius_norm(const Matrix& M) { return M.norm(); }

inline double spectral_radius(const CMatrix& M) {
  CVector vals = eigenvalues_of(M);
  double r = 0.0;
  for (int k = 0; k < vals.size(); ++k) r = std::max(r, std::abs(vals(k)));
  return r;
}

inline double spectral_radius(const Matrix& M) {
  return spectral_radius(CMatrix(M.cast<Complex>()));
}

struct Norms {
  double operator_norm;
  double frobenius_norm;
  double spectral_radius;
};

inline Norms norms(const CMatrix& M) {
  require_square(M, "norms");
  return {operator_norm(M), frobenius_norm(M), spectral_radius(M)};
}

inline Norms norms(const Matrix& M) { return norms(CMatrix(M.cast<Complex>())); }

// Minimum real part over the spectrum. Defined for any square matrix; does
// not require a dual basis.
inline double spectral_abscissa_min(const CMatrix& M) {
  CVector vals = eigenvalues_of(M);
  double mu = std::numeric_limits<double>::infinity();
  for (int k = 0; k < vals.size(); ++k) mu = std::min(mu, vals(k).real());
  return mu;
}

inline double spectral_abscissa_min(const Matrix& M) {
  return spectral_abscissa_min(CMatrix(M.cast<Complex>()));
}

// Minimum pairwise eigenvalue distance.
inline double min_eigengap(const CVector& values) {
  double g = std::numeric_limits<double>::infinity();
  for (int j = 0; j < values.size(); ++j)
    for (int k = j + 1; k < values.size(); ++k)
      g = std::min(g, std::abs(values(j) - values(k)));
  return g;
}

}  // namespace minmax
