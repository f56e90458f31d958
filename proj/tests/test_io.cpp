#include <catch2/catch_amalgamated.hpp>

#include "minmax/io.hpp"

using namespace minmax;

TEST_CASE("matrix and vector JSON round-trips") {
  Matrix M(2, 3);
  M << 1, 2.5, -3, 0, 1e-17, 7;
  io::json j = io::matrix_to_json(M);
  CHECK((io::matrix_from_json(j) - M).norm() == 0.0);

  CMatrix C(2, 2);
  C << Complex(1, 2), Complex(0, -1), 3.0, Complex(-0.5, 0.25);
  CHECK((io::cmatrix_from_json(io::cmatrix_to_json(C)) - C).norm() == 0.0);

  Vector v(3);
  v << -1, 0.125, 9;
  CHECK((io::vector_from_json(io::vector_to_json(v)) - v).norm() == 0.0);
}

TEST_CASE("complex entries accept scalars and pairs") {
  CHECK(io::complex_from_json(io::json(2.0)) == Complex(2, 0));
  CHECK(io::complex_from_json(io::json::array({1.0, -3.0})) == Complex(1, -3));
  CHECK_THROWS_AS(io::complex_from_json(io::json::array({1.0, 2.0, 3.0})), ConfigError);
}

TEST_CASE("game parsing covers every kind") {
  io::json quad = {{"kind", "quadratic"},
                   {"Q", {{1.0, 0.0}, {0.0, 1.0}}},
                   {"R", {{1.0, 0.0}, {0.0, 1.0}}},
                   {"P", {{0.0, 1.0}, {-1.0, 0.0}}}};
  io::ParsedGame pg = io::game_from_json(quad);
  CHECK(pg.game.n == 2);
  CHECK(pg.game.m == 2);
  CHECK_FALSE(pg.payoff);

  io::json reg = {{"kind", "reg_bilinear"}, {"P", {{0.0, 1.0}, {-1.0, 0.0}}}, {"alpha", 0.1}};
  pg = io::game_from_json(reg);
  CHECK(jacobian(pg.game, Vector::Zero(4))(0, 0) == Catch::Approx(0.1));

  io::json trig = {{"kind", "trig"},
                   {"K", 1},
                   {"L", 1},
                   {"coeffs", {{0.0, 0.0, 0.0}, {0.0, 0.0, 1.0}, {0.0, 0.0, 0.0}}}};
  pg = io::game_from_json(trig);
  REQUIRE(pg.payoff);
  // f = Re e^{2 pi i y} = cos(2 pi y).
  CHECK(pg.game.value(Vector::Zero(2)) == Catch::Approx(1.0).margin(1e-14));

  io::json part = {{"kind", "particle"},
                   {"payoff", trig},
                   {"N", 2},
                   {"M", 3}};
  part["payoff"].erase("kind");
  pg = io::game_from_json(part);
  CHECK(pg.game.dim() == 10);
  CHECK(pg.N == 2);
  CHECK(pg.M == 3);

  io::json sb = {{"kind", "simplex_bilinear"}, {"P", {{0.0, 1.0}, {-1.0, 0.0}}}};
  pg = io::game_from_json(sb);
  REQUIRE(pg.game.particles);
  CHECK_FALSE(pg.game.particles->has_positions);

  io::json unk = {{"kind", "mystery"}};
  CHECK_THROWS_AS(io::game_from_json(unk), ConfigError);
}

TEST_CASE("grid specs expand log and linear ranges") {
  io::json arr = io::json::array({1.0, 2.0, 3.0});
  CHECK(io::grid_from_json(arr) == std::vector<double>{1.0, 2.0, 3.0});

  io::json logspec = {{"min", 1e-3}, {"max", 1e-1}, {"points", 3}};
  auto g = io::grid_from_json(logspec);
  REQUIRE(g.size() == 3);
  CHECK(g[1] == Catch::Approx(1e-2).epsilon(1e-12));

  io::json linspec = {{"min", 0.0}, {"max", 1.0}, {"points", 5}, {"log", false}};
  auto lin = io::grid_from_json(linspec);
  CHECK(lin[2] == Catch::Approx(0.5));

  io::json bad = {{"min", 0.0}, {"max", 1.0}, {"points", 3}};  // log with min 0
  CHECK_THROWS_AS(io::grid_from_json(bad), ConfigError);
}

TEST_CASE("csv floats round-trip through fmt") {
  for (double v : {1.0, -2.5e-17, 3.0 / 7.0, 1e300}) {
    CHECK(std::stod(io::fmt(v)) == v);
  }
}
