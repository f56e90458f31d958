// Batch front-end over the minmax headers: condition reports, spectrum
// expansions, rate-expansion tables, trajectory simulation, equilibrium
// solving, random-matrix sweeps, and the figure recipes.
//
// Exit codes: 0 success, 2 when individual grid points failed (recorded in
// the output), 1 on fatal errors.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "minmax/conditions.hpp"
#include "minmax/dynamics.hpp"
#include "minmax/io.hpp"
#include "minmax/mirror.hpp"
#include "minmax/recipes.hpp"
#include "minmax/solve.hpp"
#include "minmax/update_jacobians.hpp"

namespace {

using minmax::io::json;

struct Common {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  int threads = 1;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config_path, "JSON config file")->required();
  sub->add_option("--out", c.out_dir, "output directory");
  sub->add_option("--seed", c.seed, "master seed (overrides config)");
  sub->add_option("--threads", c.threads, "worker threads for grid sweeps");
}

std::uint64_t pick_seed(const Common& c, const json& cfg) {
  if (c.seed) return *c.seed;
  return cfg.value("seed", std::uint64_t{1});
}

// (Q, R, P) either given directly or taken from the game's Jacobian at a
// point (default the origin / the given "point").
minmax::JacobianSplit blocks_from_config(const json& cfg) {
  using namespace minmax;
  if (cfg.contains("Q")) {
    Matrix Q = io::matrix_from_json(cfg.at("Q"));
    Matrix R = io::matrix_from_json(cfg.at("R"));
    Matrix P = io::matrix_from_json(cfg.at("P"));
    return split(assemble(Q, R, P), static_cast<int>(Q.rows()), static_cast<int>(R.rows()));
  }
  io::ParsedGame pg = io::game_from_json(cfg.at("game"));
  Vector z = cfg.contains("point") ? io::vector_from_json(cfg.at("point"))
                                   : Vector(Vector::Zero(pg.game.dim()));
  return split(jacobian(pg.game, z), pg.game.n, pg.game.m);
}

int cmd_analyze(const Common& c) {
  using namespace minmax;
  json cfg = io::load_json_file(c.config_path);
  JacobianSplit js = blocks_from_config(cfg);
  ConditionReport rep = check_conditions(js.Q, js.R, js.P, cfg.value("tol", 0.0));
  json out = io::condition_report_to_json(rep);
  std::cout << out.dump(2) << std::endl;
  std::filesystem::create_directories(c.out_dir);
  io::write_text_file(c.out_dir + "/analyze.json", out.dump(2) + "\n");
  return 0;
}

int cmd_expand(const Common& c) {
  using namespace minmax;
  json cfg = io::load_json_file(c.config_path);
  MatrixCurve curve = io::curve_from_json(cfg.at("curve"));
  std::vector<double> alphas = io::grid_from_json(cfg.at("alpha_grid"));
  std::string csv = "alpha,j,re_exact,im_exact,re_approx,im_approx,abs_error,remainder_bound,status\n";
  bool failures = false;
  for (double alpha : alphas) {
    try {
      ExpansionResult exp = expand_normal(curve, alpha);
      CVector approx = exp.approx();
      CVector exact = eigenvalues_of(curve.at(alpha));
      std::vector<bool> used(static_cast<size_t>(exact.size()), false);
      for (int k = 0; k < approx.size(); ++k) {
        int best = -1;
        double bd = std::numeric_limits<double>::infinity();
        for (int l = 0; l < exact.size(); ++l) {
          if (used[static_cast<size_t>(l)]) continue;
          double dist = std::abs(exact(l) - approx(k));
          if (dist < bd) {
            bd = dist;
            best = l;
          }
        }
        used[static_cast<size_t>(best)] = true;
        csv += io::fmt(alpha) + "," + std::to_string(k) + "," +
               io::fmt(exact(best).real()) + "," + io::fmt(exact(best).imag()) + "," +
               io::fmt(approx(k).real()) + "," + io::fmt(approx(k).imag()) + "," +
               io::fmt(bd) + "," + io::fmt(exp.remainder_bound) + ",ok\n";
      }
    } catch (const Error& e) {
      failures = true;
      csv += io::fmt(alpha) + ",-1,,,,,,," + std::string(e.what()) + "\n";
    }
  }
  std::filesystem::create_directories(c.out_dir);
  io::write_text_file(c.out_dir + "/expand.csv", csv);
  std::cout << c.out_dir << "/expand.csv" << std::endl;
  return failures ? 2 : 0;
}

int cmd_rates(const Common& c) {
  using namespace minmax;
  json cfg = io::load_json_file(c.config_path);
  JacobianSplit js = blocks_from_config(cfg);
  std::vector<std::string> algos =
      cfg.contains("algos") ? cfg.at("algos").get<std::vector<std::string>>()
                            : std::vector<std::string>{"sim_gda", "pp", "alt_gda", "eg"};
  std::vector<double> etas = cfg.contains("eta_grid")
                                 ? io::grid_from_json(cfg.at("eta_grid"))
                                 : std::vector<double>{1e-2};
  std::vector<double> alphas =
      cfg.contains("alpha_grid") ? io::grid_from_json(cfg.at("alpha_grid"))
      : cfg.contains("alpha")    ? std::vector<double>{cfg.at("alpha").get<double>()}
                                 : std::vector<double>{1e-2};
  std::string csv = "algo,eta,alpha,rho_sq_exact,rho_sq_leading,error,budget,status\n";
  bool failures = false;
  for (const auto& name : algos) {
    DtAlgo algo;
    if (name == "sim_gda") algo = DtAlgo::sim_gda;
    else if (name == "pp") algo = DtAlgo::pp;
    else if (name == "alt_gda") algo = DtAlgo::alt_gda;
    else if (name == "eg") algo = DtAlgo::eg;
    else throw ConfigError("rates: unknown algo " + name);
    for (double eta : etas) {
      for (double alpha : alphas) {
        try {
          RhoExpansion exp = rho_expansion(algo, js.Q, js.R, js.P, eta, alpha);
          double exact = rho_sq_exact(algo, js.Q, js.R, js.P, eta, alpha);
          double leading = (algo == DtAlgo::pp) ? 1.0 / exp.leading_extreme
                                                : exp.leading_extreme;
          csv += name + "," + io::fmt(eta) + "," + io::fmt(alpha) + "," +
                 io::fmt(exact) + "," + io::fmt(leading) + "," +
                 io::fmt(std::abs(exact - leading)) + "," + io::fmt(exp.budget()) +
                 ",ok\n";
        } catch (const Error& e) {
          failures = true;
          csv += name + "," + io::fmt(eta) + "," + io::fmt(alpha) + ",,,,," +
                 std::string(e.what()) + "\n";
        }
      }
    }
  }
  std::filesystem::create_directories(c.out_dir);
  io::write_text_file(c.out_dir + "/rates.csv", csv);
  std::cout << c.out_dir << "/rates.csv" << std::endl;
  return failures ? 2 : 0;
}

int cmd_simulate(const Common& c) {
  using namespace minmax;
  json cfg = io::load_json_file(c.config_path);
  io::ParsedGame pg = io::game_from_json(cfg.at("game"));
  AlgoConfig rc;
  rc.algo = parse_algo(cfg.at("algo").get<std::string>());
  rc.eta = cfg.value("eta", 1e-2);
  rc.gamma = cfg.value("gamma", 1.0);
  rc.steps = cfg.value("steps", 100000L);
  rc.record_stride = cfg.value("record_stride", std::max<long>(1, rc.steps / 600));
  std::uint64_t seed = pick_seed(c, cfg);
  Vector z_star = cfg.contains("z_star") ? io::vector_from_json(cfg.at("z_star"))
                                         : Vector(Vector::Zero(pg.game.dim()));
  Vector z0;
  if (cfg.contains("z0")) {
    z0 = io::vector_from_json(cfg.at("z0"));
  } else {
    auto rng = make_rng(seed);
    z0 = perturbed_start(pg.game, z_star, cfg.value("perturb", 1e-3), rng);
  }
  Trajectory traj = run(pg.game, rc, z0, z_star);
  std::string csv = "k,d_k\n";
  for (size_t i = 0; i < traj.ks.size(); ++i)
    csv += std::to_string(traj.ks[i]) + "," + io::fmt(traj.distances[i]) + "\n";
  std::filesystem::create_directories(c.out_dir);
  io::write_text_file(c.out_dir + "/trajectory.csv", csv);
  json summary;
  summary["algo"] = to_string(rc.algo);
  summary["eta"] = rc.eta;
  summary["gamma"] = rc.gamma;
  summary["seed"] = seed;
  summary["diverged"] = traj.diverged;
  try {
    RateFit fit = fit_rate(traj);
    summary["rate"] = fit.r;
    summary["r_squared"] = fit.r_squared;
  } catch (const Error& e) {
    summary["rate"] = nullptr;
    summary["rate_error"] = e.what();
  }
  io::write_text_file(c.out_dir + "/summary.json", summary.dump(2) + "\n");
  std::cout << summary.dump(2) << std::endl;
  return 0;
}

int cmd_mne(const Common& c) {
  using namespace minmax;
  json cfg = io::load_json_file(c.config_path);
  std::shared_ptr<const TrigPayoff> payoff;
  int N = cfg.value("N", 2), M = cfg.value("M", 2);
  if (cfg.contains("payoff")) {
    payoff = io::payoff_from_json(cfg.at("payoff"));
  } else {
    io::ParsedGame pg = io::game_from_json(cfg.at("game"));
    if (!pg.payoff) throw ConfigError("mne: config needs a trig payoff");
    payoff = pg.payoff;
    if (pg.N > 0) N = pg.N;
    if (pg.M > 0) M = pg.M;
  }
  std::uint64_t seed = pick_seed(c, cfg);
  MneResult mne = solve_mne(payoff, N, M, seed);
  Vector a = mne.z.head(N), x = mne.z.segment(N, N);
  Vector b = mne.z.segment(2 * N, M), y = mne.z.tail(M);
  json out;
  out["residual"] = mne.residual;
  out["steps_used"] = mne.steps_used;
  out["restarts_used"] = mne.restarts_used;
  out["seed"] = seed;
  out["a"] = io::vector_to_json(a);
  out["x"] = io::vector_to_json(x);
  out["b"] = io::vector_to_json(b);
  out["y"] = io::vector_to_json(y);
  std::filesystem::create_directories(c.out_dir);
  bool failures = false;
  if (cfg.contains("gamma_grid")) {
    std::vector<double> gammas = io::grid_from_json(cfg.at("gamma_grid"));
    Matrix F(N, M);
    for (int I = 0; I < N; ++I)
      for (int J = 0; J < M; ++J) F(I, J) = payoff->value(x(I), y(J));
    double mu_mp = spectral_abscissa_min(m_mp(F, a, b));
    out["mu_weight_only"] = mu_mp;
    std::string csv = "gamma,mu_tilde,status\n";
    for (double g : gammas) {
      try {
        double mu = spectral_abscissa_min(m_gamma(*payoff, a, x, b, y, g));
        csv += io::fmt(g) + "," + io::fmt(mu) + ",ok\n";
      } catch (const Error& e) {
        failures = true;
        csv += io::fmt(g) + ",," + std::string(e.what()) + "\n";
      }
    }
    io::write_text_file(c.out_dir + "/mne_spectrum.csv", csv);
  }
  io::write_text_file(c.out_dir + "/mne.json", out.dump(2) + "\n");
  std::cout << out.dump(2) << std::endl;
  return failures ? 2 : 0;
}

int cmd_rmt(const Common& c) {
  using namespace minmax;
  json cfg = io::load_json_file(c.config_path);
  ExperimentConfig ec;
  ec.recipe = "rmt_sweep";
  ec.raw = cfg;
  ec.seed = pick_seed(c, cfg);
  ec.threads = c.threads;
  ec.out_dir = c.out_dir;
  RecipeOutcome out = run_recipe(ec);
  std::cout << c.out_dir << "/rmt_sweep.csv" << std::endl;
  return out.had_failures ? 2 : 0;
}

int cmd_recipe(const Common& c) {
  using namespace minmax;
  json cfg = io::load_json_file(c.config_path);
  ExperimentConfig ec = experiment_config_from_json(cfg);
  if (c.seed) ec.seed = *c.seed;
  ec.threads = c.threads;
  ec.out_dir = c.out_dir;
  RecipeOutcome out = run_recipe(ec);
  for (const auto& f : out.files) std::cout << c.out_dir << "/" << f << std::endl;
  return out.had_failures ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral analysis and simulation of gradient methods on min-max games"};
  app.require_subcommand(1);
  Common common;
  struct Sub {
    const char* name;
    const char* desc;
    int (*fn)(const Common&);
  };
  const Sub subs[] = {
      {"analyze", "condition report for a game or (Q, R, P) triple", cmd_analyze},
      {"expand", "second-order spectrum expansion along a matrix curve", cmd_expand},
      {"rates", "update-operator rate expansions with error budgets", cmd_rates},
      {"simulate", "run one algorithm and fit its convergence rate", cmd_simulate},
      {"mne", "solve a mixed equilibrium and report its rate matrices", cmd_mne},
      {"rmt", "Monte-Carlo min-quadratic-form sweep with bounds", cmd_rmt},
      {"recipe", "run a figure-reproduction recipe", cmd_recipe},
  };
  int (*selected)(const Common&) = nullptr;
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.desc);
    add_common(sub, common);
    sub->callback([&selected, fn = s.fn]() { selected = fn; });
  }
  CLI11_PARSE(app, argc, argv);
  try {
    return selected(common);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
}
