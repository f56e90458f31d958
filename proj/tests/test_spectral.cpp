#include <catch2/catch_amalgamated.hpp>

#include "minmax/rng.hpp"
#include "minmax/spectral.hpp"

using namespace minmax;

TEST_CASE("eigendecompose sorts and matches a hand-computed 2x2") {
  Matrix M(2, 2);
  M << 1, 1, -1, 0;
  // Characteristic polynomial t^2 - t + 1, roots (1 +- i sqrt 3) / 2.
  EigenSystem sys = eigendecompose(M);
  const double s3 = std::sqrt(3.0) / 2.0;
  CHECK(std::abs(sys.values(0) - Complex(0.5, -s3)) < 1e-12);
  CHECK(std::abs(sys.values(1) - Complex(0.5, s3)) < 1e-12);
}

TEST_CASE("dual basis reconstructs the matrix") {
  auto rng = make_rng(11);
  Matrix A = gaussian_matrix(5, 5, rng);
  EigenSystem sys = eigendecompose(A);
  CMatrix rec = sys.right_vectors * sys.values.asDiagonal() * sys.dual().adjoint();
  CHECK((rec - A.cast<Complex>()).norm() < 1e-8 * A.norm());
  // Biorthogonality: conj(w_j)^T v_k = delta_jk.
  CMatrix G = sys.dual().adjoint() * sys.right_vectors;
  CHECK((G - CMatrix::Identity(5, 5)).norm() < 1e-8);
}

TEST_CASE("operator norm of a Jordan-like block") {
  Matrix M(2, 2);
  M << 1, 1, 0, 1;
  // Largest singular value of [[1,1],[0,1]] is sqrt((3 + sqrt 5) / 2).
  CHECK(operator_norm(M) == Catch::Approx(std::sqrt((3.0 + std::sqrt(5.0)) / 2.0)).epsilon(1e-12));
  CHECK(spectral_radius(M) == Catch::Approx(1.0).margin(1e-10));
}

TEST_CASE("antisymmetric matrices have purely imaginary spectra") {
  auto rng = make_rng(12);
  Matrix G = gaussian_matrix(6, 6, rng);
  Matrix A = G - G.transpose();
  CVector vals = eigenvalues_of(A);
  for (int k = 0; k < vals.size(); ++k)
    CHECK(std::abs(vals(k).real()) < 1e-10 * operator_norm(A));
  CHECK(std::abs(spectral_abscissa_min(A)) < 1e-10 * operator_norm(A));
}

TEST_CASE("spectral quantities are orthogonally invariant") {
  auto rng = make_rng(13);
  Matrix A = gaussian_matrix(5, 5, rng);
  Matrix G = gaussian_matrix(5, 5, rng);
  Eigen::HouseholderQR<Matrix> qr(G);
  Matrix U = qr.householderQ();
  Matrix B = U * A * U.transpose();
  CHECK(operator_norm(B) == Catch::Approx(operator_norm(A)).epsilon(1e-9));
  CHECK(spectral_radius(B) == Catch::Approx(spectral_radius(A)).epsilon(1e-9));
  CHECK(spectral_abscissa_min(B) ==
        Catch::Approx(spectral_abscissa_min(A)).margin(1e-9));
}

TEST_CASE("svd returns descending singular values and a valid factorization") {
  Matrix P(2, 3);
  P << 1, 0, 2, 0, -1, 1;
  SvdSystem s = svd(P);
  REQUIRE(s.singular_values.size() == 2);
  CHECK(s.singular_values(0) >= s.singular_values(1));
  Matrix Sigma = Matrix::Zero(2, 3);
  Sigma(0, 0) = s.singular_values(0);
  Sigma(1, 1) = s.singular_values(1);
  CHECK((s.left_vectors * Sigma * s.right_vectors.transpose() - P).norm() < 1e-12);
}

TEST_CASE("min_eigengap on a fixed spectrum") {
  CVector vals(3);
  vals << Complex(0, 0), Complex(0, 1), Complex(0, 2.5);
  CHECK(min_eigengap(vals) == Catch::Approx(1.0).epsilon(1e-15));
}
