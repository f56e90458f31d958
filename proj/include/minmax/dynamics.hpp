#pragma once

// Iteration of the discrete algorithms and integration of the continuous
// flows, with distance tracking and exponential rate fitting.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "minmax/errors.hpp"
#include "minmax/game.hpp"
#include "minmax/spectral.hpp"

namespace minmax {

enum class Algo {
  sim_gda,
  alt_gda_std,
  alt_gda_sym,
  eg,
  pp,
  mda,
  mp,
  bregman_pp,
  cpmp,
  gf,
  cp_mf
};

inline std::string to_string(Algo a) {
  switch (a) {
    case Algo::sim_gda: return "sim_gda";
    case Algo::alt_gda_std: return "alt_gda_std";
    case Algo::alt_gda_sym: return "alt_gda_sym";
    case Algo::eg: return "eg";
    case Algo::pp: return "pp";
    case Algo::mda: return "mda";
    case Algo::mp: return "mp";
    case Algo::bregman_pp: return "bregman_pp";
    case Algo::cpmp: return "cpmp";
    case Algo::gf: return "gf";
    case Algo::cp_mf: return "cp_mf";
  }
  return "?";
}

inline Algo parse_algo(const std::string& s) {
  for (Algo a : {Algo::sim_gda, Algo::alt_gda_std, Algo::alt_gda_sym, Algo::eg,
                 Algo::pp, Algo::mda, Algo::mp, Algo::bregman_pp, Algo::cpmp,
                 Algo::gf, Algo::cp_mf})
    if (to_string(a) == s) return a;
  throw ConfigError("unknown algorithm id: " + s);
}

inline bool is_flow(Algo a) { return a == Algo::gf || a == Algo::cp_mf; }

struct AlgoConfig {
  Algo algo = Algo::sim_gda;
  double eta = 1e-2;
  double gamma = 1.0;  // position/weight timescale ratio (cpmp, cp_mf)
  long steps = 1000;
  long record_stride = 1;
  double implicit_tol = 1e-12;
  int implicit_max_iters = 100;
  std::uint64_t seed = 0;
};

struct Trajectory {
  std::vector<long> ks;
  std::vector<double> distances;
  bool diverged = false;
  Vector final_z;
};

struct RateFit {
  double r = 0.0;        // per-step rate, d_k = Theta((1 - r)^k)
  double slope = 0.0;    // LSQ slope of log d_k
  double r_squared = 0.0;
  long k0 = 0, k1 = 0;   // fit window in step units
};

namespace detail {

inline double wrap01(double x) {
  double w = x - std::floor(x);
  return (w >= 1.0) ? 0.0 : w;
}

inline void wrap_torus(const GameModel& game, Vector& z) {
  for (int i = 0; i < z.size(); ++i)
    if (game.torus[static_cast<size_t>(i)]) z(i) = wrap01(z(i));
}

inline void check_finite(const Vector& z) {
  if (!z.allFinite() || z.norm() > 1e12)
    throw NumericalBlowup("iterate norm exceeded 1e12");
}

// Entropic update a <- normalize(a * exp(step)) computed stably.
inline Vector simplex_exp_step(const Vector& a, const Vector& step) {
  Vector logits = a.array().log() + step.array();
  double mx = logits.maxCoeff();
  Vector out = (logits.array() - mx).exp();
  return out / out.sum();
}

struct ParticleViews {
  int N, M;
  bool pos;
  // index helpers into z = (a, x, b, y) or (a, b)
  int a0 = 0, x0, b0, y0;
};

inline ParticleViews views(const GameModel& game) {
  const auto& p = *game.particles;
  ParticleViews v;
  v.N = p.N;
  v.M = p.M;
  v.pos = p.has_positions;
  v.x0 = p.N;
  v.b0 = p.has_positions ? 2 * p.N : p.N;
  v.y0 = v.b0 + p.M;
  return v;
}

// One entropic (+ conic position) extrapolation stage: gradient evaluated at
// z_eval, applied to base point z.
inline Vector mirror_stage(const GameModel& game, const AlgoConfig& cfg,
                           const Vector& z, const Vector& z_eval) {
  auto v = views(game);
  Vector df = game.grad(z_eval);
  Vector out = z;
  out.segment(v.a0, v.N) =
      simplex_exp_step(z.segment(v.a0, v.N), -cfg.eta * df.segment(v.a0, v.N));
  out.segment(v.b0, v.M) =
      simplex_exp_step(z.segment(v.b0, v.M), cfg.eta * df.segment(v.b0, v.M));
  if (v.pos) {
    // Conic preconditioner 1/a_I with the weights of the evaluation point.
    out.segment(v.x0, v.N) =
        z.segment(v.x0, v.N) - cfg.gamma * cfg.eta *
                                   df.segment(v.x0, v.N).cwiseQuotient(
                                       z_eval.segment(v.a0, v.N));
    out.segment(v.y0, v.M) =
        z.segment(v.y0, v.M) + cfg.gamma * cfg.eta *
                                   df.segment(v.y0, v.M).cwiseQuotient(
                                       z_eval.segment(v.b0, v.M));
  }
  wrap_torus(game, out);
  return out;
}

inline void require_simplex_game(const GameModel& game, const char* who) {
  if (!game.particles)
    throw ConfigError(std::string(who) + ": algorithm needs a simplex-structured game");
}

}  // namespace detail

// Newton solve of w + eta g(w) = z with damped fixed-point fallback.
inline Vector pp_step(const GameModel& game, const AlgoConfig& cfg, const Vector& z) {
  Vector w = z;
  const double tol = cfg.implicit_tol * (1.0 + z.norm());
  bool ok = false;
  for (int it = 0; it < cfg.implicit_max_iters; ++it) {
    Vector F = w + cfg.eta * gradient_field(game, w) - z;
    if (F.norm() <= tol) {
      ok = true;
      break;
    }
    Matrix J = Matrix::Identity(z.size(), z.size()) + cfg.eta * jacobian(game, w);
    Eigen::FullPivLU<Matrix> lu(J);
    if (!lu.isInvertible()) break;
    w -= lu.solve(F);
    if (!w.allFinite()) break;
  }
  if (!ok) {
    w = z;
    for (int it = 0; it < cfg.implicit_max_iters; ++it) {
      Vector target = z - cfg.eta * gradient_field(game, w);
      if ((target - w).norm() <= tol) {
        ok = true;
        break;
      }
      w = 0.5 * w + 0.5 * target;
      if (!w.allFinite())
        throw ImplicitSolveFailed("pp_step: iterates not finite");
    }
  }
  if (!ok) throw ImplicitSolveFailed("pp_step: tolerance not reached");
  return w;
}

// Single update of each discrete algorithm. alt_gda_sym is handled at the
// trajectory level in run() (it needs the half-step history); step() treats
// it as alt_gda_std.
inline Vector step(const GameModel& game, const AlgoConfig& cfg, const Vector& z) {
  detail::check_finite(z);
  switch (cfg.algo) {
    case Algo::sim_gda: {
      Vector out = z - cfg.eta * gradient_field(game, z);
      detail::wrap_torus(game, out);
      return out;
    }
    case Algo::eg: {
      Vector half = z - cfg.eta * gradient_field(game, z);
      Vector out = z - cfg.eta * gradient_field(game, half);
      detail::wrap_torus(game, out);
      return out;
    }
    case Algo::pp: {
      Vector out = pp_step(game, cfg, z);
      detail::wrap_torus(game, out);
      return out;
    }
    case Algo::alt_gda_std:
    case Algo::alt_gda_sym: {
      const int n = game.n, m = game.m;
      Vector out = z;
      Vector df = game.grad(z);
      out.head(n) = z.head(n) - cfg.eta * df.head(n);
      Vector df2 = game.grad(out);
      out.tail(m) = z.tail(m) + cfg.eta * df2.tail(m);
      detail::wrap_torus(game, out);
      return out;
    }
    case Algo::mda: {
      detail::require_simplex_game(game, "mda");
      return detail::mirror_stage(game, cfg, z, z);
    }
    case Algo::mp:
    case Algo::cpmp: {
      detail::require_simplex_game(game, "mp/cpmp");
      Vector half = detail::mirror_stage(game, cfg, z, z);
      return detail::mirror_stage(game, cfg, z, half);
    }
    case Algo::bregman_pp: {
      detail::require_simplex_game(game, "bregman_pp");
      // Fixed point of w = mirror_stage(z; grad at w), damped in log space.
      Vector w = detail::mirror_stage(game, cfg, z, z);
      for (int it = 0; it < cfg.implicit_max_iters; ++it) {
        Vector t = detail::mirror_stage(game, cfg, z, w);
        auto v = detail::views(game);
        Vector next = w;
        next.segment(v.a0, v.N) = detail::simplex_exp_step(
            w.segment(v.a0, v.N),
            Vector(0.5 * (t.segment(v.a0, v.N).array().log() -
                          w.segment(v.a0, v.N).array().log())));
        next.segment(v.b0, v.M) = detail::simplex_exp_step(
            w.segment(v.b0, v.M),
            Vector(0.5 * (t.segment(v.b0, v.M).array().log() -
                          w.segment(v.b0, v.M).array().log())));
        if (v.pos) {
          next.segment(v.x0, v.N) =
              0.5 * (w.segment(v.x0, v.N) + t.segment(v.x0, v.N));
          next.segment(v.y0, v.M) =
              0.5 * (w.segment(v.y0, v.M) + t.segment(v.y0, v.M));
        }
        double delta = (next - w).norm();
        w = next;
        if (delta <= cfg.implicit_tol) return w;
      }
      throw ImplicitSolveFailed("bregman_pp: fixed point did not converge");
    }
    case Algo::gf:
    case Algo::cp_mf:
      throw ConfigError("step: flows are integrated, use integrate_flow/run");
  }
  throw ConfigError("step: unknown algorithm");
}

// Continuous-time vector field dz/dt for the flows.
inline Vector flow_field(const GameModel& game, const AlgoConfig& cfg, const Vector& z) {
  if (cfg.algo == Algo::gf) return (-gradient_field(game, z)).eval();
  // cp_mf: replicator on weights, conic gradient on positions.
  detail::require_simplex_game(game, "cp_mf");
  auto v = detail::views(game);
  for (int i = 0; i < v.N; ++i)
    if (z(v.a0 + i) < 1e-12) throw DomainBoundary("cp_mf: weight at simplex boundary");
  for (int j = 0; j < v.M; ++j)
    if (z(v.b0 + j) < 1e-12) throw DomainBoundary("cp_mf: weight at simplex boundary");
  Vector df = game.grad(z);
  Vector dz = Vector::Zero(z.size());
  Vector ga = df.segment(v.a0, v.N);
  Vector gb = df.segment(v.b0, v.M);
  Vector a = z.segment(v.a0, v.N), b = z.segment(v.b0, v.M);
  dz.segment(v.a0, v.N) = -a.cwiseProduct(ga - Vector::Constant(v.N, a.dot(ga)));
  dz.segment(v.b0, v.M) = b.cwiseProduct(gb - Vector::Constant(v.M, b.dot(gb)));
  if (v.pos) {
    dz.segment(v.x0, v.N) = -cfg.gamma * df.segment(v.x0, v.N).cwiseQuotient(a);
    dz.segment(v.y0, v.M) = cfg.gamma * df.segment(v.y0, v.M).cwiseQuotient(b);
  }
  return dz;
}

// One RK4 step of size cfg.eta on the flow field.
inline Vector flow_step(const GameModel& game, const AlgoConfig& cfg, const Vector& z) {
  detail::check_finite(z);
  const double h = cfg.eta;
  Vector k1 = flow_field(game, cfg, z);
  Vector k2 = flow_field(game, cfg, Vector(z + 0.5 * h * k1));
  Vector k3 = flow_field(game, cfg, Vector(z + 0.5 * h * k2));
  Vector k4 = flow_field(game, cfg, Vector(z + h * k3));
  Vector out = z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  detail::wrap_torus(game, out);
  return out;
}

// Squared torus-aware distance between raw coordinate vectors.
inline double coord_distance_sq(const GameModel& game, const Vector& z, const Vector& z_star) {
  double acc = 0.0;
  for (int i = 0; i < z.size(); ++i) {
    double d = z(i) - z_star(i);
    if (game.torus[static_cast<size_t>(i)]) {
      d = std::abs(d) - std::floor(std::abs(d));
      d = std::min(d, 1.0 - d);
    }
    acc += d * d;
  }
  return acc;
}

namespace detail {

inline double matched_side_distance_sq(const Vector& w, const Vector& x, const Vector& w_ref,
                                       const Vector& x_ref, bool torus) {
  const int N = static_cast<int>(w.size());
  auto pair_cost = [&](int i, int j) {
    double dw = w(i) - w_ref(j);
    double dx = x(i) - x_ref(j);
    if (torus) {
      dx = std::abs(dx) - std::floor(std::abs(dx));
      dx = std::min(dx, 1.0 - dx);
    }
    return dw * dw + dx * dx;
  };
  if (N <= 6) {
    std::vector<int> perm(N);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
      double c = 0.0;
      for (int i = 0; i < N; ++i) c += pair_cost(i, perm[i]);
      best = std::min(best, c);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
  }
  // Greedy assignment for large particle counts.
  std::vector<bool> used(N, false);
  double acc = 0.0;
  for (int i = 0; i < N; ++i) {
    int bj = -1;
    double bc = std::numeric_limits<double>::infinity();
    for (int j = 0; j < N; ++j) {
      if (used[j]) continue;
      double c = pair_cost(i, j);
      if (c < bc) {
        bc = c;
        bj = j;
      }
    }
    used[bj] = true;
    acc += bc;
  }
  return acc;
}

}  // namespace detail

// Distance to a reference configuration, minimized over particle
// permutations (weights travel with their positions). Exact for up to 6
// particles per side, greedy beyond.
inline double match_particles(const GameModel& game, const Vector& z, const Vector& z_star) {
  if (z.size() != z_star.size()) throw CountMismatch("match_particles: size mismatch");
  if (!game.particles || !game.particles->has_positions)
    return std::sqrt(coord_distance_sq(game, z, z_star));
  auto v = detail::views(game);
  double d2 =
      detail::matched_side_distance_sq(z.segment(v.a0, v.N), z.segment(v.x0, v.N),
                                       z_star.segment(v.a0, v.N),
                                       z_star.segment(v.x0, v.N), true) +
      detail::matched_side_distance_sq(z.segment(v.b0, v.M), z.segment(v.y0, v.M),
                                       z_star.segment(v.b0, v.M),
                                       z_star.segment(v.y0, v.M), true);
  return std::sqrt(d2);
}

inline Trajectory run(const GameModel& game, const AlgoConfig& cfg, const Vector& z0,
                      const Vector& z_star) {
  if (z0.size() != game.dim() || z_star.size() != game.dim())
    throw DimensionMismatch("run: point dimension mismatch");
  Trajectory traj;
  Vector z = z0;
  // Symmetrized Alt-GDA carries the previous half-step y to emit averages.
  Vector y_half_prev;
  const bool sym = (cfg.algo == Algo::alt_gda_sym);
  if (sym) y_half_prev = z0.tail(game.m);

  auto emit = [&](long k, const Vector& zc) {
    Vector view = zc;
    if (sym) {
      view.tail(game.m) = 0.5 * (y_half_prev + zc.tail(game.m));
    }
    traj.ks.push_back(k);
    traj.distances.push_back(match_particles(game, view, z_star));
  };

  emit(0, z);
  for (long k = 0; k < cfg.steps; ++k) {
    Vector y_before = sym ? Vector(z.tail(game.m)) : Vector();
    try {
      z = is_flow(cfg.algo) ? flow_step(game, cfg, z) : step(game, cfg, z);
    } catch (const NumericalBlowup&) {
      traj.diverged = true;
      break;
    }
    if (sym) y_half_prev = y_before;
    if ((k + 1) % cfg.record_stride == 0 || k + 1 == cfg.steps) emit(k + 1, z);
    if (!traj.distances.empty() && traj.distances.back() < 1e-13) break;
    if (!traj.distances.empty() && traj.distances.back() > 1e8) {
      traj.diverged = true;
      break;
    }
  }
  traj.final_z = z;
  return traj;
}

inline Trajectory integrate_flow(const GameModel& game, const AlgoConfig& cfg,
                                 const Vector& z0, const Vector& z_star) {
  AlgoConfig c = cfg;
  if (!is_flow(c.algo)) throw ConfigError("integrate_flow: not a flow algorithm");
  return run(game, c, z0, z_star);
}

// Exponential fit over the last half of the usable samples (those above the
// 1e-13 noise floor). The slope is per step-index unit.
inline RateFit fit_rate(const Trajectory& traj, long min_samples = 50) {
  std::vector<long> ks;
  std::vector<double> ds;
  for (size_t i = 0; i < traj.distances.size(); ++i) {
    if (traj.distances[i] > 1e-13) {
      ks.push_back(traj.ks[i]);
      ds.push_back(traj.distances[i]);
    }
  }
  if (static_cast<long>(ks.size()) < min_samples)
    throw InsufficientDecay("fit_rate: too few usable samples");
  size_t start = ks.size() / 2;
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  const double n = static_cast<double>(ks.size() - start);
  for (size_t i = start; i < ks.size(); ++i) {
    double x = static_cast<double>(ks[i]), y = std::log(ds[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  double denom = n * sxx - sx * sx;
  if (denom <= 0) throw InsufficientDecay("fit_rate: degenerate fit window");
  RateFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.r = 1.0 - std::exp(fit.slope);
  fit.k0 = ks[start];
  fit.k1 = ks.back();
  double ss_tot = syy - sy * sy / n;
  double intercept = (sy - fit.slope * sx) / n;
  double ss_res = 0.0;
  for (size_t i = start; i < ks.size(); ++i) {
    double y = std::log(ds[i]);
    double e = y - (intercept + fit.slope * static_cast<double>(ks[i]));
    ss_res += e * e;
  }
  fit.r_squared = (ss_tot > 0) ? 1.0 - ss_res / ss_tot : 1.0;
  if (fit.r_squared < 0.9)
    throw InsufficientDecay("fit_rate: R^2 below 0.9, decay not exponential");
  return fit;
}

}  // namespace minmax
