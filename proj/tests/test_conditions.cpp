#include <catch2/catch_amalgamated.hpp>

#include "minmax/conditions.hpp"
#include "minmax/rng.hpp"

using namespace minmax;

TEST_CASE("definite damping makes all four conditions hold") {
  Matrix Q = Matrix::Identity(2, 2), R = Matrix::Identity(2, 2);
  Matrix P(2, 2);
  P << 1, 0.3, -0.2, 0.8;
  ConditionReport rep = check_conditions(Q, R, P);
  CHECK(rep.cond_i);
  CHECK(rep.cond_ii);
  CHECK(rep.cond_iii);
  CHECK(rep.cond_iv);
  CHECK(rep.all_agree());
  CHECK(rep.mu_tilde > 0);
  CHECK(rep.witnesses_ii.empty());
  CHECK(rep.witnesses_iii.empty());
  CHECK(rep.witnesses_iv.empty());
}

TEST_CASE("zero damping fails all four conditions with witnesses") {
  Matrix Q = Matrix::Zero(2, 2), R = Matrix::Zero(2, 2);
  Matrix P(2, 2);
  P << 1, 0.3, -0.2, 0.8;
  ConditionReport rep = check_conditions(Q, R, P);
  CHECK_FALSE(rep.cond_i);
  CHECK_FALSE(rep.cond_ii);
  CHECK_FALSE(rep.cond_iii);
  CHECK_FALSE(rep.cond_iv);
  CHECK(rep.all_agree());
  CHECK(std::abs(rep.mu_tilde) <= rep.tol);
  // Each witness actually violates the inequality it certifies.
  REQUIRE_FALSE(rep.witnesses_ii.empty());
  Matrix S = Matrix::Zero(4, 4);
  for (const auto& z : rep.witnesses_ii)
    CHECK((S.cast<Complex>() * z).norm() <= rep.tol * z.norm());
  REQUIRE_FALSE(rep.witnesses_iii.empty());
  for (const auto& u : rep.witnesses_iii) CHECK((Q * u).norm() <= rep.tol);
  REQUIRE_FALSE(rep.witnesses_iv.empty());
  for (const auto& v : rep.witnesses_iv) CHECK((R * v).norm() <= rep.tol);
}

TEST_CASE("one-sided damping is enough when P couples every mode") {
  // Q = I, R = 0: every left singular vector sees Q, every right singular
  // vector sees Q through P, so (iii) and (iv) still hold.
  Matrix Q = Matrix::Identity(2, 2), R = Matrix::Zero(2, 2);
  Matrix P(2, 2);
  P << 1, 0.3, -0.2, 0.8;
  ConditionReport rep = check_conditions(Q, R, P);
  CHECK(rep.all_agree());
  CHECK(rep.cond_i);
}

TEST_CASE("conditions agree on random draws") {
  for (int t = 0; t < 50; ++t) {
    auto rng = make_rng(31, static_cast<std::uint64_t>(t));
    int n = 2 + static_cast<int>(t % 3);
    Matrix G = gaussian_matrix(n, n, rng);
    Matrix Q = G * G.transpose() * (t % 2 ? 1.0 : 0.0);
    Matrix H = gaussian_matrix(n, n, rng);
    Matrix R = H * H.transpose() * (t % 2 ? 1.0 : 0.0);
    Matrix P = gaussian_matrix(n, n, rng);
    ConditionReport rep = check_conditions(Q, R, P);
    if (!rep.degenerate) CHECK(rep.all_agree());
  }
}

TEST_CASE("genericity probe is one with damping and zero without") {
  Matrix Q = Matrix::Identity(2, 2);
  CHECK(genericity_probe(Q, Q, 50, 41) == 1.0);
  Matrix Z = Matrix::Zero(2, 2);
  CHECK(genericity_probe(Z, Z, 50, 42) == 0.0);
}
