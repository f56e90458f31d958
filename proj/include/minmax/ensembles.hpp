#pragma once

// Haar-orthogonal sampling and Monte-Carlo estimation of the
// min-quadratic-form statistic min_j (u_j^T Q u_j + v_j^T R v_j), with the
// deterministic expectation bounds and high-probability tail certificates
// for spread-out and sparse spectra.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "minmax/errors.hpp"
#include "minmax/rng.hpp"
#include "minmax/spectral.hpp"

namespace minmax {

// QR of an iid Gaussian matrix with the R-diagonal sign correction; the
// result is Haar distributed on the orthogonal group.
inline Matrix sample_haar_orthogonal(int n, std::mt19937_64& rng) {
  if (n < 1) throw ConfigError("sample_haar_orthogonal: n >= 1 required");
  Matrix G = gaussian_matrix(n, n, rng);
  Eigen::HouseholderQR<Matrix> qr(G);
  Matrix Q = qr.householderQ();
  Matrix R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j)
    if (R(j, j) < 0) Q.col(j) *= -1.0;
  return Q;
}

inline double min_quadform(const Matrix& Q, const Matrix& R, const Matrix& U,
                           const Matrix& V) {
  const int n = static_cast<int>(U.cols());
  if (V.cols() != n || Q.rows() != U.rows() || R.rows() != V.rows())
    throw DimensionMismatch("min_quadform: inconsistent shapes");
  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j < n; ++j) {
    Vector u = U.col(j), v = V.col(j);
    best = std::min(best, u.dot(Q * u) + v.dot(R * v));
  }
  return best;
}

// Eigenvalues of S = Diag(Q, R) described by the positive part
// s_1 >= ... >= s_r > 0 and the split telling how many of the 2n slots
// belong to the Q side. Values are placed on the diagonal in order: first
// q_count entries on Q, the rest on R.
struct SpectrumSpec {
  std::vector<double> s;  // positive eigenvalues, nonincreasing
  int q_count = 0;        // how many of them live in the Q block

  void validate() const {
    double prev = std::numeric_limits<double>::infinity();
    for (double v : s) {
      if (!(v > 0)) throw ConfigError("SpectrumSpec: eigenvalues must be positive");
      if (v > prev + 1e-15) throw ConfigError("SpectrumSpec: eigenvalues must be nonincreasing");
      prev = v;
    }
    if (q_count < 0 || q_count > static_cast<int>(s.size()))
      throw ConfigError("SpectrumSpec: bad q_count");
  }

  double trace() const {
    double t = 0;
    for (double v : s) t += v;
    return t;
  }
  double frob_sq() const {
    double t = 0;
    for (double v : s) t += v * v;
    return t;
  }
  Matrix q_block(int n) const {
    Matrix Q = Matrix::Zero(n, n);
    for (int i = 0; i < q_count && i < n; ++i) Q(i, i) = s[static_cast<size_t>(i)];
    return Q;
  }
  Matrix r_block(int n) const {
    Matrix R = Matrix::Zero(n, n);
    int k = 0;
    for (int i = q_count; i < static_cast<int>(s.size()) && k < n; ++i, ++k)
      R(k, k) = s[static_cast<size_t>(i)];
    return R;
  }
};

struct McEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  double q05 = 0.0, q95 = 0.0;
  int trials = 0;
  std::uint64_t seed = 0;
  std::vector<double> samples;  // kept for exceedance tests
};

inline McEstimate mc_min_quadform(const SpectrumSpec& spec, int n, int trials,
                                  std::uint64_t seed) {
  spec.validate();
  if (trials < 1) throw ConfigError("mc_min_quadform: trials >= 1");
  Matrix Q = spec.q_block(n), R = spec.r_block(n);
  McEstimate est;
  est.trials = trials;
  est.seed = seed;
  est.samples.resize(static_cast<size_t>(trials));
  for (int t = 0; t < trials; ++t) {
    auto rng = make_rng(seed, static_cast<std::uint64_t>(t));
    Matrix U = sample_haar_orthogonal(n, rng);
    Matrix V = sample_haar_orthogonal(n, rng);
    est.samples[static_cast<size_t>(t)] = min_quadform(Q, R, U, V);
  }
  double sum = 0, sum2 = 0;
  for (double v : est.samples) {
    sum += v;
    sum2 += v * v;
  }
  est.mean = sum / trials;
  double var = (trials > 1) ? (sum2 - sum * sum / trials) / (trials - 1) : 0.0;
  est.stderr_ = std::sqrt(std::max(0.0, var) / trials);
  std::vector<double> sorted = est.samples;
  std::sort(sorted.begin(), sorted.end());
  auto quantile = [&](double q) {
    double pos = q * (trials - 1);
    size_t lo = static_cast<size_t>(pos);
    size_t hi = std::min(lo + 1, sorted.size() - 1);
    double w = pos - static_cast<double>(lo);
    return (1 - w) * sorted[lo] + w * sorted[hi];
  };
  est.q05 = quantile(0.05);
  est.q95 = quantile(0.95);
  return est;
}

struct TailCertificate {
  double threshold = 0.0;   // the bound on the statistic
  double probability = 0.0; // certified lower bound on P(event), clamped to [0, 1]
};

struct SpreadoutBounds {
  double lower = 0.0;  // expectation lower bound
  double upper = 0.0;  // expectation upper bound trace(S)/n
  std::function<TailCertificate(double)> highprob_lower;  // P(stat >= thr)
  std::function<TailCertificate(double)> highprob_upper;  // P(stat <= thr)
};

inline SpreadoutBounds bound_spreadout(const SpectrumSpec& spec, int n) {
  spec.validate();
  if (n < 2) throw ConfigError("bound_spreadout: n >= 2 required");
  const double tr = spec.trace();
  const double fr = std::sqrt(spec.frob_sq());
  const double op = spec.s.empty() ? 0.0 : spec.s.front();
  SpreadoutBounds out;
  out.upper = tr / n;
  out.lower = tr / n * (1.0 - 2.0 * fr / tr * std::sqrt(std::log(static_cast<double>(n))));
  out.highprob_lower = [tr, fr, n](double gamma) {
    TailCertificate cert;
    cert.threshold = tr / (2.0 * n) * (1.0 - gamma);
    double p = 1.0 - n * std::exp(-(tr * tr / (4.0 * fr * fr)) * gamma * gamma) -
               2.0 * std::exp(-n / 8.0);
    cert.probability = std::clamp(p, 0.0, 1.0);
    return cert;
  };
  out.highprob_upper = [tr, fr, op, n](double gamma) {
    TailCertificate cert;
    cert.threshold = 4.0 * tr / n * (1.0 + gamma);
    double p;
    if (gamma <= fr * fr / (tr * op)) {
      p = 1.0 - std::exp(-(tr * tr / (8.0 * fr * fr)) * gamma * gamma) -
          2.0 * std::exp(-n / 8.0);
    } else {
      p = 1.0 - std::exp(-(tr * gamma) / (8.0 * op)) - 2.0 * std::exp(-n / 8.0);
    }
    cert.probability = std::clamp(p, 0.0, 1.0);
    return cert;
  };
  return out;
}

struct SparseBound {
  double best_value = 0.0;
  std::vector<int> best_subset;  // indices into spec.s (0-based)
  // Tail certificate for the best subset: P(stat >= (1/2e)(k/n) n^{-2/k} G (1-gamma)).
  std::function<TailCertificate(double)> highprob_lower;
};

// Lower bound (1/e)(|S|/n) n^{-2/|S|} geomean(s_l, l in S), maximized over
// subsets. Prefix subsets of the sorted spectrum suffice for the maximum in
// the regimes of interest; the exhaustive search over all 2^r subsets is
// available for r <= 12.
inline SparseBound bound_sparse(const SpectrumSpec& spec, int n, bool exhaustive = false) {
  spec.validate();
  const int r = static_cast<int>(spec.s.size());
  if (r < 1) throw ConfigError("bound_sparse: need at least one positive eigenvalue");
  auto value_of = [&](const std::vector<int>& subset) {
    const double k = static_cast<double>(subset.size());
    double logg = 0.0;
    for (int idx : subset) logg += std::log(spec.s[static_cast<size_t>(idx)]);
    return (1.0 / std::exp(1.0)) * (k / n) *
           std::pow(static_cast<double>(n), -2.0 / k) * std::exp(logg / k);
  };
  SparseBound out;
  out.best_value = -std::numeric_limits<double>::infinity();
  if (exhaustive) {
    if (r > 12) throw ConfigError("bound_sparse: exhaustive search limited to r <= 12");
    for (unsigned mask = 1; mask < (1u << r); ++mask) {
      std::vector<int> subset;
      for (int i = 0; i < r; ++i)
        if (mask & (1u << i)) subset.push_back(i);
      double v = value_of(subset);
      if (v > out.best_value) {
        out.best_value = v;
        out.best_subset = subset;
      }
    }
  } else {
    std::vector<int> prefix;
    for (int k = 0; k < r; ++k) {
      prefix.push_back(k);
      double v = value_of(prefix);
      if (v > out.best_value) {
        out.best_value = v;
        out.best_subset = prefix;
      }
    }
  }
  const double card = static_cast<double>(out.best_subset.size());
  const double best = out.best_value;
  out.highprob_lower = [card, best, n](double gamma) {
    TailCertificate cert;
    cert.threshold = 0.5 * best * (1.0 - gamma);
    double p = 1.0 - std::exp(-0.5 * card * gamma) - 2.0 * std::exp(-n / 8.0);
    cert.probability = std::clamp(p, 0.0, 1.0);
    return cert;
  };
  return out;
}

}  // namespace minmax
