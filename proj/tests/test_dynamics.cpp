#include <catch2/catch_amalgamated.hpp>

#include "minmax/dynamics.hpp"
#include "minmax/rng.hpp"

using namespace minmax;

namespace {

GameModel pure_rotation() {
  Matrix P(1, 1);
  P << 1;
  return make_quadratic(Matrix::Zero(1, 1), Matrix::Zero(1, 1), P);  // f = x y
}

CMatrix stiff_coeffs() {
  CMatrix c = CMatrix::Zero(5, 5);
  c(4, 2) = Complex(0, -1);
  c(2, 4) = Complex(0, -1);
  c(3, 3) = 2.0;
  return c;
}

}  // namespace

TEST_CASE("proximal point contracts f = xy with the closed-form iterates") {
  GameModel game = pure_rotation();
  AlgoConfig cfg;
  cfg.algo = Algo::pp;
  cfg.eta = 1.0;
  cfg.steps = 20;
  Vector z0(2);
  z0 << 1, 0;
  Vector z_star = Vector::Zero(2);
  Trajectory traj = run(game, cfg, z0, z_star);
  REQUIRE_FALSE(traj.diverged);
  // (I + eta M)^{-1} with M = [[0,1],[-1,0]] contracts norms by sqrt(2) per
  // step at eta = 1.
  for (size_t i = 0; i < traj.ks.size(); ++i) {
    double expect = std::pow(2.0, -0.5 * static_cast<double>(traj.ks[i]));
    CHECK(traj.distances[i] == Catch::Approx(expect).margin(1e-10));
  }
  Matrix M(2, 2);
  M << 0, 1, -1, 0;
  Matrix T = (Matrix::Identity(2, 2) + M).inverse();
  Vector expect_z = z0;
  for (int k = 0; k < 20; ++k) expect_z = T * expect_z;
  CHECK((traj.final_z - expect_z).norm() < 1e-10);
}

TEST_CASE("simultaneous descent expands f = xy") {
  GameModel game = pure_rotation();
  AlgoConfig cfg;
  cfg.algo = Algo::sim_gda;
  cfg.eta = 0.1;
  cfg.steps = 10000;
  Vector z0(2);
  z0 << 1, 0;
  Trajectory traj = run(game, cfg, z0, Vector::Zero(2));
  CHECK(traj.diverged);
}

TEST_CASE("extragradient and symmetrized alternation contract a damped game") {
  Matrix Q = 0.1 * Matrix::Identity(1, 1);
  Matrix P(1, 1);
  P << 1;
  GameModel game = make_quadratic(Q, Q, P);
  Vector z0(2);
  z0 << 1e-3, 0;
  for (Algo a : {Algo::eg, Algo::alt_gda_std, Algo::alt_gda_sym}) {
    AlgoConfig cfg;
    cfg.algo = a;
    cfg.eta = 0.05;
    cfg.steps = 4000;
    cfg.record_stride = 10;
    Trajectory traj = run(game, cfg, z0, Vector::Zero(2));
    REQUIRE_FALSE(traj.diverged);
    CHECK(traj.distances.back() < 0.5 * traj.distances.front());
  }
}

TEST_CASE("entropic updates preserve the simplex over long runs") {
  auto rng = make_rng(81);
  Matrix P = gaussian_matrix(3, 3, rng);
  GameModel game = make_simplex_bilinear(P);
  Vector z(6);
  z << 0.2, 0.5, 0.3, 0.4, 0.4, 0.2;
  for (Algo a : {Algo::mda, Algo::mp, Algo::bregman_pp}) {
    AlgoConfig cfg;
    cfg.algo = a;
    cfg.eta = 0.05;
    Vector w = z;
    for (int k = 0; k < 10000; ++k) w = step(game, cfg, w);
    CHECK(std::abs(w.head(3).sum() - 1.0) < 1e-12);
    CHECK(std::abs(w.tail(3).sum() - 1.0) < 1e-12);
    CHECK(w.minCoeff() > 0.0);
  }
}

TEST_CASE("conic mirror-prox preserves feasibility of lifted games") {
  auto payoff = std::make_shared<TrigPayoff>(stiff_coeffs(), 2, 2);
  GameModel game = lift_particle_game(payoff, 2, 2);
  Vector z(8);
  z << 0.4, 0.6, 0.3, 0.8, 0.5, 0.5, 0.1, 0.6;
  AlgoConfig cfg;
  cfg.algo = Algo::cpmp;
  cfg.eta = 2e-3;
  cfg.gamma = 1.0;
  for (int k = 0; k < 10000; ++k) z = step(game, cfg, z);
  CHECK(std::abs(z.head(2).sum() - 1.0) < 1e-12);
  CHECK(std::abs(z.segment(4, 2).sum() - 1.0) < 1e-12);
  CHECK(z.head(2).minCoeff() > 0.0);
  for (int i : {2, 3, 6, 7}) {
    CHECK(z(i) >= 0.0);
    CHECK(z(i) < 1.0);
  }
}

TEST_CASE("the flow integrator conserves norm on a pure rotation") {
  GameModel game = pure_rotation();
  AlgoConfig cfg;
  cfg.algo = Algo::gf;
  cfg.eta = 0.01;  // integration step
  cfg.steps = 10000;  // t = 100
  cfg.record_stride = 10000;
  Vector z0(2);
  z0 << 1, 0;
  Trajectory traj = run(game, cfg, z0, Vector::Zero(2));
  REQUIRE_FALSE(traj.diverged);
  CHECK(std::abs(traj.final_z.norm() - 1.0) < 1e-9);
}

TEST_CASE("rate fitting recovers exact and noisy exponential decays") {
  Trajectory traj;
  for (long k = 0; k <= 200; ++k) {
    traj.ks.push_back(k);
    traj.distances.push_back(std::pow(0.9, static_cast<double>(k)));
  }
  RateFit fit = fit_rate(traj);
  CHECK(fit.r == Catch::Approx(0.1).epsilon(1e-10));
  CHECK(fit.r_squared > 0.999999);

  Trajectory noisy;
  for (long k = 0; k <= 2000; ++k) {
    noisy.ks.push_back(k);
    noisy.distances.push_back(std::pow(0.99, static_cast<double>(k)) *
                              (2.0 + std::sin(static_cast<double>(k))));
  }
  RateFit nf = fit_rate(noisy);
  CHECK(nf.r == Catch::Approx(0.01).margin(2e-3));

  Trajectory flat;
  for (long k = 0; k <= 10; ++k) {
    flat.ks.push_back(k);
    flat.distances.push_back(1.0);
  }
  CHECK_THROWS_AS(fit_rate(flat), InsufficientDecay);
}

TEST_CASE("symmetrized alternating step stays close to its second-order model") {
  // One step from a generic point: z+ = z - eta g + (eta^2/2) A g + O(eta^3 |g|).
  auto rng = make_rng(82);
  CMatrix c = CMatrix::Zero(5, 5);
  auto rnd = [&rng]() {
    std::normal_distribution<double> g(0.0, 1.0);
    return g(rng);
  };
  for (int k = -2; k <= 2; ++k)
    for (int l = -2; l <= 2; ++l)
      c(k + 2, l + 2) = Complex(rnd(), rnd()) / (1.0 + k * k + l * l);
  c(2, 2) = 0.0;
  GameModel game = make_trig_payoff(c, 2, 2);
  Vector z0(2);
  z0 << 0.31, 0.77;
  for (double eta : {1e-2, 1e-3}) {
    AlgoConfig cfg;
    cfg.algo = Algo::alt_gda_std;
    cfg.eta = eta;
    // Symmetrized iterates w^k = (x^k, (y^{k-1} + y^k) / 2) built from the
    // raw alternating sequence.
    std::vector<Vector> zs{z0};
    for (int k = 0; k < 3; ++k) zs.push_back(step(game, cfg, zs.back()));
    auto sym = [&](int k) {
      Vector w = zs[static_cast<size_t>(k)];
      w(1) = 0.5 * (zs[static_cast<size_t>(k - 1)](1) + w(1));
      return w;
    };
    Vector w1 = sym(1), w2 = sym(2);
    Vector g = gradient_field(game, w1);
    Matrix M = jacobian(game, w1);
    Matrix A = 0.5 * (M - M.transpose());
    double lhs = (w2 - w1 + eta * g - 0.5 * eta * eta * (A * g)).norm();
    const double l2 = game.l2_bound, l3 = game.l3_bound, lxy = game.lxy_bound;
    double rhs = 10 * eta * eta * eta * g.norm() *
                 (l3 * (1 + lxy * lxy * eta * eta) + l2 * g.norm());
    CHECK(lhs <= rhs);
  }
}
