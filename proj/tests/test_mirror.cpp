#include <catch2/catch_amalgamated.hpp>

#include "minmax/mirror.hpp"
#include "minmax/rng.hpp"

using namespace minmax;

namespace {

CMatrix stiff_coeffs() {
  // f(x, y) = sin(4 pi x) + sin(4 pi y) + 2 cos(2 pi (x + y)).
  CMatrix c = CMatrix::Zero(5, 5);
  c(4, 2) = Complex(0, -1);
  c(2, 4) = Complex(0, -1);
  c(3, 3) = 2.0;
  return c;
}

}  // namespace

TEST_CASE("oblique projector identities") {
  LinkGeometry link = entropy_simplex_link(3, 2);
  Vector z(5);
  z << 0.2, 0.5, 0.3, 0.6, 0.4;
  Vector phi = link.phi_at(z);
  Matrix Pz = projector(phi, link.A_c);
  CHECK((Pz * Pz - Pz).norm() < 1e-10);
  // The flow -Phi^{-1} P_z g never leaves the constraint set.
  CHECK((link.A_c * phi.cwiseInverse().asDiagonal() * Pz).norm() < 1e-10);
  // At uniform weights the projector is the centering map on each block.
  Vector u(5);
  u << 1.0 / 3, 1.0 / 3, 1.0 / 3, 0.5, 0.5;
  Matrix Pu = projector(link.phi_at(u), link.A_c);
  Matrix expect = Matrix::Identity(5, 5);
  expect.topLeftCorner(3, 3) -= Matrix::Constant(3, 3, 1.0 / 3);
  expect.bottomRightCorner(2, 2) -= Matrix::Constant(2, 2, 0.5);
  CHECK((Pu - expect).norm() < 1e-10);
}

TEST_CASE("entropy link produces the replicator field") {
  auto rng = make_rng(71);
  Matrix P = gaussian_matrix(3, 2, rng);
  GameModel game = make_simplex_bilinear(P);
  LinkGeometry link = entropy_simplex_link(3, 2);
  Vector z(5);
  z << 0.2, 0.5, 0.3, 0.6, 0.4;
  Vector g = g_eff(game, link, z);
  Vector a = z.head(3), b = z.tail(2);
  Vector pa = P * b, pb = P.transpose() * a;
  // Flow dz/dt = -g_eff: weights a follow a_i ((P b)_i - a^T P b) and b the
  // mirrored sign.
  for (int i = 0; i < 3; ++i)
    CHECK(-g(i) == Catch::Approx(-a(i) * (pa(i) - a.dot(pa))).margin(1e-12));
  for (int j = 0; j < 2; ++j)
    CHECK(-g(3 + j) == Catch::Approx(b(j) * (pb(j) - b.dot(pb))).margin(1e-12));
}

TEST_CASE("boundary points are refused by the link geometry") {
  LinkGeometry link = entropy_simplex_link(2, 2);
  Vector z(4);
  z << 1.0, 0.0, 0.5, 0.5;
  CHECK_THROWS_AS(link.phi_at(z), DomainBoundary);
}

TEST_CASE("effective Jacobian matches finite differences of the flow field") {
  // Symmetric 2x2 matrix game with interior equilibrium a = b = (1/2, 1/2).
  Matrix P(2, 2);
  P << 1, -1, -1, 1;
  GameModel game = make_simplex_bilinear(P);
  LinkGeometry link = entropy_simplex_link(2, 2);
  Vector z(4);
  z << 0.5, 0.5, 0.5, 0.5;
  REQUIRE(g_eff(game, link, z).norm() < 1e-12);  // stationary
  Matrix M = jacobian(game, z);
  EffectiveJacobian ej = effective_jacobian(M, link.phi_at(z), link.A_c);
  const double h = 1e-6;
  Matrix J(4, 4);
  for (int i = 0; i < 4; ++i) {
    Vector zp = z, zm = z;
    zp(i) += h;
    zm(i) -= h;
    J.col(i) = (g_eff(game, link, zp) - g_eff(game, link, zm)) / (2 * h);
  }
  // On the tangent space of the constraint set the linearization of g_eff is
  // M_eff; compare after projecting both onto Ker A_c.
  Matrix B = ej.kernel_basis;
  CHECK((B.transpose() * (J - ej.M_eff) * B).norm() < 1e-5);
  // Similarity: tM and the reduced block carry the same nonzero spectrum.
  CVector s1 = eigenvalues_of(ej.tM);
  CVector s2 = eigenvalues_of(Matrix(B.transpose() * ej.M_eff * B));
  std::vector<double> im1, im2;
  for (int k = 0; k < s1.size(); ++k)
    if (std::abs(s1(k)) > 1e-10) im1.push_back(s1(k).imag());
  for (int k = 0; k < s2.size(); ++k)
    if (std::abs(s2(k)) > 1e-10) im2.push_back(s2(k).imag());
  std::sort(im1.begin(), im1.end());
  std::sort(im2.begin(), im2.end());
  REQUIRE(im1.size() == im2.size());
  for (size_t k = 0; k < im1.size(); ++k)
    CHECK(im1[k] == Catch::Approx(im2[k]).margin(1e-9));
}

TEST_CASE("orthonormal complement is orthonormal and orthogonal to the input") {
  Vector sa(3);
  sa << std::sqrt(0.2), std::sqrt(0.5), std::sqrt(0.3);
  Matrix Pi = orthonormal_complement(sa);
  REQUIRE(Pi.rows() == 2);
  REQUIRE(Pi.cols() == 3);
  CHECK((Pi * Pi.transpose() - Matrix::Identity(2, 2)).norm() < 1e-12);
  CHECK((Pi * sa).norm() < 1e-12);
}

TEST_CASE("weight-only structure matrix is antisymmetric with zero abscissa") {
  auto rng = make_rng(72);
  Matrix P = gaussian_matrix(3, 3, rng);
  Vector a(3), b(3);
  a << 0.2, 0.5, 0.3;
  b << 0.4, 0.4, 0.2;
  Matrix W = m_mp(P, a, b);
  CHECK((W + W.transpose()).norm() < 1e-12);
  CHECK(std::abs(spectral_abscissa_min(W)) < 1e-10);
}

TEST_CASE("stiff-payoff equilibrium reproduces the printed rate matrices") {
  TrigPayoff payoff(stiff_coeffs(), 2, 2);
  Vector a(2), b(2), x(2), y(2);
  a << 0.5, 0.5;
  b << 0.5, 0.5;
  x << 3.0 / 8.0, 7.0 / 8.0;
  y << 1.0 / 8.0, 5.0 / 8.0;

  // Weight-only block: +-2 up to the sign convention of the complement.
  Matrix F(2, 2);
  for (int I = 0; I < 2; ++I)
    for (int J = 0; J < 2; ++J) F(I, J) = payoff.value(x(I), y(J));
  Matrix W = m_mp(F, a, b);
  CHECK(std::abs(W(0, 1)) == Catch::Approx(2.0).margin(1e-10));

  StructuredCurve c = m_gamma_blocks(payoff, a, x, b, y);
  const double w2 = 16 * M_PI * M_PI;  // (4 pi)^2
  Vector s2_expect(6);
  s2_expect << 0, w2, w2, 0, w2, w2;
  CHECK((c.S2.diagonal() - s2_expect).norm() < 1e-8);
  CHECK((c.S2 - Matrix(c.S2.diagonal().asDiagonal())).norm() < 1e-8);
  // Single weight-weight coupling of magnitude 2.
  CHECK(std::abs(c.A0(0, 3)) == Catch::Approx(2.0).margin(1e-10));
  CHECK((c.A1).norm() < 1e-10);
  // Position-position coupling entries +-(2 pi)^2.
  const double p2 = 4 * M_PI * M_PI;
  for (int i = 1; i <= 2; ++i)
    for (int j = 4; j <= 5; ++j)
      CHECK(std::abs(c.A2(i, j)) == Catch::Approx(p2).margin(1e-8));

  // Fully antisymmetric correction blocks and zero minimum abscissa at every
  // timescale ratio.
  for (double g : {1e-2, 1.0, 10.0}) {
    Matrix Mg = m_gamma(payoff, a, x, b, y, g);
    CHECK(std::abs(spectral_abscissa_min(Mg)) < 1e-10);
  }
}

TEST_CASE("structure matrices require interior weights and stationarity") {
  TrigPayoff payoff(stiff_coeffs(), 2, 2);
  Vector a(2), b(2), x(2), y(2);
  a << 1.0, 0.0;
  b << 0.5, 0.5;
  x << 3.0 / 8.0, 7.0 / 8.0;
  y << 1.0 / 8.0, 5.0 / 8.0;
  CHECK_THROWS_AS(m_gamma_blocks(payoff, a, x, b, y), BoundaryWeights);
  a << 0.5, 0.5;
  x << 0.1, 0.9;  // not stationary
  CHECK_THROWS_AS(m_gamma_blocks(payoff, a, x, b, y), NotStationary);
}
