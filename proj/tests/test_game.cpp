#include <catch2/catch_amalgamated.hpp>

#include "minmax/game.hpp"
#include "minmax/rng.hpp"

using namespace minmax;

namespace {

// Central-difference gradient of game.value; h chosen for ~1e-10 accuracy on
// O(1) payoffs.
Vector fd_grad(const GameModel& game, const Vector& z, double h = 1e-5) {
  Vector g(z.size());
  for (int i = 0; i < z.size(); ++i) {
    Vector zp = z, zm = z;
    zp(i) += h;
    zm(i) -= h;
    g(i) = (game.value(zp) - game.value(zm)) / (2 * h);
  }
  return g;
}

Matrix fd_hessian(const GameModel& game, const Vector& z, double h = 1e-4) {
  Matrix H(z.size(), z.size());
  for (int i = 0; i < z.size(); ++i) {
    Vector zp = z, zm = z;
    zp(i) += h;
    zm(i) -= h;
    H.col(i) = (game.grad(zp) - game.grad(zm)) / (2 * h);
  }
  return H;
}

CMatrix stiff_coeffs() {
  // f(x, y) = sin(4 pi x) + sin(4 pi y) + 2 cos(2 pi (x + y)).
  CMatrix c = CMatrix::Zero(5, 5);
  c(4, 2) = Complex(0, -1);
  c(2, 4) = Complex(0, -1);
  c(3, 3) = 2.0;
  return c;
}

}  // namespace

TEST_CASE("quadratic game derivatives are consistent") {
  auto rng = make_rng(21);
  Matrix Q = gaussian_matrix(2, 2, rng);
  Q = Matrix(0.5 * (Q + Q.transpose()));
  Matrix R = gaussian_matrix(3, 3, rng);
  R = Matrix(0.5 * (R + R.transpose()));
  Matrix P = gaussian_matrix(2, 3, rng);
  GameModel game = make_quadratic(Q, R, P);
  Vector z = gaussian_vector(5, rng);
  CHECK((game.grad(z) - fd_grad(game, z)).norm() < 1e-8);
  CHECK((game.hessian(z) - fd_hessian(game, z)).norm() < 1e-8);
  // gradient_field flips the sign of the y block.
  Vector g = gradient_field(game, z);
  Vector df = game.grad(z);
  CHECK((g.head(2) - df.head(2)).norm() == 0.0);
  CHECK((g.tail(3) + df.tail(3)).norm() == 0.0);
  // jacobian(game, z) = [[Q, P], [-P^T, R]].
  Matrix M = jacobian(game, z);
  CHECK((M - assemble(Q, R, P)).norm() < 1e-12);
}

TEST_CASE("split and assemble round-trip") {
  auto rng = make_rng(22);
  Matrix Q = gaussian_matrix(2, 2, rng);
  Q = Matrix(0.5 * (Q + Q.transpose()));
  Matrix R = gaussian_matrix(2, 2, rng);
  R = Matrix(0.5 * (R + R.transpose()));
  Matrix P = gaussian_matrix(2, 2, rng);
  JacobianSplit js = split(assemble(Q, R, P), 2, 2);
  CHECK((js.Q - Q).norm() < 1e-14);
  CHECK((js.R - R).norm() < 1e-14);
  CHECK((js.P - P).norm() < 1e-14);
}

TEST_CASE("trig payoff evaluates a closed form and its derivatives") {
  TrigPayoff payoff(stiff_coeffs(), 2, 2);
  CHECK(payoff.value(3.0 / 8.0, 1.0 / 8.0) == Catch::Approx(-2.0).margin(1e-12));
  auto closed = [](double x, double y) {
    return std::sin(4 * M_PI * x) + std::sin(4 * M_PI * y) +
           2 * std::cos(2 * M_PI * (x + y));
  };
  auto rng = make_rng(23);
  std::uniform_real_distribution<double> unif(0, 1);
  for (int t = 0; t < 20; ++t) {
    double x = unif(rng), y = unif(rng);
    auto d = payoff.derivs(x, y);
    CHECK(d.f == Catch::Approx(closed(x, y)).margin(1e-12));
    const double h = 1e-6;
    CHECK(d.fx == Catch::Approx((closed(x + h, y) - closed(x - h, y)) / (2 * h)).margin(1e-4));
    CHECK(d.fy == Catch::Approx((closed(x, y + h) - closed(x, y - h)) / (2 * h)).margin(1e-4));
    CHECK(d.fxy == Catch::Approx((closed(x + h, y + h) - closed(x + h, y - h) -
                                  closed(x - h, y + h) + closed(x - h, y - h)) /
                                 (4 * h * h))
                       .margin(1e-2));
  }
  // Periodicity.
  CHECK(payoff.value(0.3 + 1.0, 0.7) == Catch::Approx(payoff.value(0.3, 0.7)).margin(1e-12));
  // Sup-norm derivative bounds for this payoff: L2 = 40 pi^2.
  CHECK(payoff.l2_bound() == Catch::Approx(40 * M_PI * M_PI).epsilon(1e-12));
  CHECK(payoff.lxy_bound() == Catch::Approx(8 * M_PI * M_PI).epsilon(1e-12));
}

TEST_CASE("lifted particle game matches finite differences") {
  auto payoff = std::make_shared<TrigPayoff>(stiff_coeffs(), 2, 2);
  GameModel game = lift_particle_game(payoff, 2, 2);
  Vector z(8);
  z << 0.3, 0.7, 0.15, 0.62, 0.55, 0.45, 0.81, 0.09;  // (a, x, b, y)
  CHECK((game.grad(z) - fd_grad(game, z)).norm() < 1e-7);
  CHECK((game.hessian(z) - fd_hessian(game, z)).norm() < 1e-4);
  // Torus flags mark exactly the position coordinates.
  for (int i = 0; i < 8; ++i) {
    bool expect = (i >= 2 && i < 4) || i >= 6;
    CHECK(game.torus[static_cast<size_t>(i)] == expect);
  }
}

TEST_CASE("simplex bilinear game matches finite differences") {
  auto rng = make_rng(24);
  Matrix P = gaussian_matrix(3, 2, rng);
  GameModel game = make_simplex_bilinear(P);
  Vector z(5);
  z << 0.2, 0.5, 0.3, 0.6, 0.4;
  CHECK(game.value(z) == Catch::Approx(z.head(3).dot(P * z.tail(2))).margin(1e-14));
  CHECK((game.grad(z) - fd_grad(game, z)).norm() < 1e-8);
}

TEST_CASE("regularized bilinear game places alpha on the first x coordinate") {
  Matrix P(2, 2);
  P << 0, 1, -1, 0;
  GameModel game = make_reg_bilinear(P, 0.25);
  Matrix M = jacobian(game, Vector::Zero(4));
  Matrix Q = M.topLeftCorner(2, 2);
  CHECK(Q(0, 0) == Catch::Approx(0.25));
  CHECK(std::abs(Q(0, 1)) + std::abs(Q(1, 0)) + std::abs(Q(1, 1)) == 0.0);
  CHECK((M.bottomRightCorner(2, 2)).norm() == 0.0);
}
