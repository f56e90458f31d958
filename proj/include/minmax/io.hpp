#pragma once

// JSON ingestion and serialization: matrices as nested arrays (row-major),
// complex entries as [re, im] pairs, game documents keyed by "kind", and
// report emission for the CLI.

#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include <json.hpp>

#include "minmax/conditions.hpp"
#include "minmax/ensembles.hpp"
#include "minmax/errors.hpp"
#include "minmax/game.hpp"
#include "minmax/perturbation.hpp"
#include "minmax/spectral.hpp"

namespace minmax {
namespace io {

using json = nlohmann::json;

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("invalid JSON in " + path + ": " + e.what());
  }
  return j;
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write file: " + path);
  out << content;
}

inline Complex complex_from_json(const json& j) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2)
    return Complex(j[0].get<double>(), j[1].get<double>());
  throw ConfigError("complex entry must be a number or [re, im]");
}

inline json complex_to_json(const Complex& c) {
  if (c.imag() == 0.0) return json(c.real());
  return json::array({c.real(), c.imag()});
}

inline Matrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw ConfigError("matrix must be a nonempty nested array");
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j[0].size());
  Matrix M(rows, cols);
  for (int r = 0; r < rows; ++r) {
    if (static_cast<int>(j[r].size()) != cols)
      throw ConfigError("matrix rows have inconsistent lengths");
    for (int c = 0; c < cols; ++c) M(r, c) = j[r][c].get<double>();
  }
  return M;
}

inline CMatrix cmatrix_from_json(const json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw ConfigError("matrix must be a nonempty nested array");
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j[0].size());
  CMatrix M(rows, cols);
  for (int r = 0; r < rows; ++r) {
    if (static_cast<int>(j[r].size()) != cols)
      throw ConfigError("matrix rows have inconsistent lengths");
    for (int c = 0; c < cols; ++c) M(r, c) = complex_from_json(j[r][c]);
  }
  return M;
}

inline json matrix_to_json(const Matrix& M) {
  json rows = json::array();
  for (int r = 0; r < M.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    rows.push_back(row);
  }
  return rows;
}

inline json cmatrix_to_json(const CMatrix& M) {
  json rows = json::array();
  for (int r = 0; r < M.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < M.cols(); ++c) row.push_back(complex_to_json(M(r, c)));
    rows.push_back(row);
  }
  return rows;
}

inline Vector vector_from_json(const json& j) {
  if (!j.is_array()) throw ConfigError("vector must be an array");
  Vector v(static_cast<int>(j.size()));
  for (int i = 0; i < v.size(); ++i) v(i) = j[i].get<double>();
  return v;
}

inline json vector_to_json(const Vector& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

inline json cvector_to_json(const CVector& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
  return out;
}

// A parsed game keeps the trig payoff around when one exists, since the
// mirror-geometry entry points need it separately from the GameModel.
struct ParsedGame {
  GameModel game;
  std::shared_ptr<const TrigPayoff> payoff;  // null for quadratic kinds
  int N = 0, M = 0;                          // particle counts when lifted
  std::string kind;
};

inline std::shared_ptr<const TrigPayoff> payoff_from_json(const json& j) {
  const int K = j.at("K").get<int>();
  const int L = j.at("L").get<int>();
  CMatrix coeffs = cmatrix_from_json(j.at("coeffs"));
  return std::make_shared<TrigPayoff>(coeffs, K, L);
}

inline ParsedGame game_from_json(const json& j) {
  ParsedGame out;
  out.kind = j.at("kind").get<std::string>();
  if (out.kind == "quadratic") {
    out.game = make_quadratic(matrix_from_json(j.at("Q")), matrix_from_json(j.at("R")),
                              matrix_from_json(j.at("P")));
  } else if (out.kind == "reg_bilinear") {
    out.game = make_reg_bilinear(matrix_from_json(j.at("P")), j.at("alpha").get<double>());
  } else if (out.kind == "trig") {
    out.payoff = payoff_from_json(j);
    out.game = make_trig_payoff(out.payoff->coeffs(), out.payoff->K(), out.payoff->L());
  } else if (out.kind == "particle") {
    out.payoff = payoff_from_json(j.at("payoff"));
    out.N = j.at("N").get<int>();
    out.M = j.at("M").get<int>();
    out.game = lift_particle_game(out.payoff, out.N, out.M);
  } else if (out.kind == "simplex_bilinear") {
    out.game = make_simplex_bilinear(matrix_from_json(j.at("P")));
  } else {
    throw ConfigError("unknown game kind: " + out.kind);
  }
  return out;
}

inline json condition_report_to_json(const ConditionReport& rep) {
  json j;
  j["mu_tilde"] = rep.mu_tilde;
  j["tol"] = rep.tol;
  j["cond_i"] = rep.cond_i;
  j["cond_ii"] = rep.cond_ii;
  j["cond_iii"] = rep.cond_iii;
  j["cond_iv"] = rep.cond_iv;
  j["degenerate"] = rep.degenerate;
  j["all_agree"] = rep.all_agree();
  json wii = json::array();
  for (const auto& w : rep.witnesses_ii) wii.push_back(cvector_to_json(w));
  j["witnesses_ii"] = wii;
  json wiii = json::array();
  for (const auto& w : rep.witnesses_iii) wiii.push_back(vector_to_json(w));
  j["witnesses_iii"] = wiii;
  json wiv = json::array();
  for (const auto& w : rep.witnesses_iv) wiv.push_back(vector_to_json(w));
  j["witnesses_iv"] = wiv;
  return j;
}

inline MatrixCurve curve_from_json(const json& j) {
  MatrixCurve curve;
  curve.M0 = cmatrix_from_json(j.at("M0"));
  curve.M1 = j.contains("M1") ? cmatrix_from_json(j.at("M1"))
                              : CMatrix(CMatrix::Zero(curve.M0.rows(), curve.M0.cols()));
  curve.M2 = j.contains("M2") ? cmatrix_from_json(j.at("M2"))
                              : CMatrix(CMatrix::Zero(curve.M0.rows(), curve.M0.cols()));
  return curve;
}

inline SpectrumSpec spectrum_spec_from_json(const json& j) {
  SpectrumSpec spec;
  spec.s = j.at("s").get<std::vector<double>>();
  spec.q_count = j.at("q_count").get<int>();
  spec.validate();
  return spec;
}

// Grid helper: either an explicit array of values or
// {"min": a, "max": b, "points": k, "log": bool (default true)}.
inline std::vector<double> grid_from_json(const json& j) {
  std::vector<double> out;
  if (j.is_array()) {
    out = j.get<std::vector<double>>();
  } else {
    const double lo = j.at("min").get<double>();
    const double hi = j.at("max").get<double>();
    const int k = j.at("points").get<int>();
    const bool logscale = j.value("log", true);
    if (k < 1 || lo > hi || (logscale && lo <= 0))
      throw ConfigError("bad grid spec");
    for (int i = 0; i < k; ++i) {
      double t = (k == 1) ? 0.0 : static_cast<double>(i) / (k - 1);
      out.push_back(logscale ? lo * std::pow(hi / lo, t) : lo + t * (hi - lo));
    }
  }
  if (out.empty()) throw ConfigError("empty grid");
  return out;
}

// Fixed-format floating point for CSV cells: round-trippable, locale-free.
inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace io
}  // namespace minmax
