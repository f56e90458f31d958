#include <catch2/catch_amalgamated.hpp>

#include "minmax/solve.hpp"

using namespace minmax;

namespace {

CMatrix stiff_coeffs() {
  CMatrix c = CMatrix::Zero(5, 5);
  c(4, 2) = Complex(0, -1);
  c(2, 4) = Complex(0, -1);
  c(3, 3) = 2.0;
  return c;
}

}  // namespace

TEST_CASE("the residual vanishes at a known equilibrium") {
  auto payoff = std::make_shared<TrigPayoff>(stiff_coeffs(), 2, 2);
  GameModel game = lift_particle_game(payoff, 2, 2);
  Vector z(8);
  z << 0.5, 0.5, 3.0 / 8.0, 7.0 / 8.0, 0.5, 0.5, 1.0 / 8.0, 5.0 / 8.0;
  CHECK(mne_residual(game, z) < 1e-12);
  // Boundary weights report an infinite residual instead of throwing.
  Vector zb = z;
  zb(0) = 1.0;
  zb(1) = 0.0;
  CHECK(std::isinf(mne_residual(game, zb)));
}

TEST_CASE("the stiff payoff is solved to high accuracy") {
  auto payoff = std::make_shared<TrigPayoff>(stiff_coeffs(), 2, 2);
  MneResult res = solve_mne(payoff, 2, 2, /*seed=*/7);
  CHECK(res.residual < 1e-9);
  // Weights are uniform and the atoms sit on the known saddle configuration.
  Vector a = res.z.head(2), b = res.z.segment(4, 2);
  CHECK((a - Vector::Constant(2, 0.5)).norm() < 1e-6);
  CHECK((b - Vector::Constant(2, 0.5)).norm() < 1e-6);
  auto matches = [](double v, std::initializer_list<double> targets) {
    for (double t : targets) {
      double d = std::abs(v - t);
      if (std::min(d, 1.0 - d) < 1e-6) return true;
    }
    return false;
  };
  for (int i = 2; i < 4; ++i) CHECK(matches(res.z(i), {3.0 / 8.0, 7.0 / 8.0}));
  for (int i = 6; i < 8; ++i) CHECK(matches(res.z(i), {1.0 / 8.0, 5.0 / 8.0}));
}

TEST_CASE("lattice initialization is feasible and spread out") {
  auto rng = make_rng(101);
  Vector z = random_particle_init(3, 4, rng);
  CHECK(std::abs(z.head(3).sum() - 1.0) < 1e-14);
  CHECK(std::abs(z.segment(6, 4).sum() - 1.0) < 1e-14);
  for (int i = 3; i < 6; ++i) {
    CHECK(z(i) >= 0.0);
    CHECK(z(i) < 1.0);
  }
  CHECK(detail::min_atom_separation(z, 3, 4) > 0.05);
}
