#pragma once

// Smooth two-player zero-sum games: payoff evaluators, the skewed gradient
// field g(z) = (grad_x f, -grad_y f), its Jacobian, the symmetric /
// antisymmetric split, and the built-in game families (quadratic,
// regularized bilinear, trigonometric on the torus, lifted particle games,
// bilinear games on product simplices).

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <vector>

#include "minmax/errors.hpp"
#include "minmax/spectral.hpp"

namespace minmax {

// Particle games store z = (a, x, b, y): weights then positions on each side.
// Weight-only games (bilinear on simplices) have has_positions = false.
struct ParticleStructure {
  int N = 0;
  int M = 0;
  bool has_positions = false;
};

struct GameModel {
  int n = 0;  // minimizing variables
  int m = 0;  // maximizing variables
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> grad;     // gradient of f
  std::function<Matrix(const Vector&)> hessian;  // Hessian of f
  std::vector<bool> torus;                       // per-coordinate wraparound, size n+m
  // Optional sup-norm derivative bounds, used only in error-constant reports.
  double l2_bound = std::numeric_limits<double>::quiet_NaN();
  double l3_bound = std::numeric_limits<double>::quiet_NaN();
  double lxy_bound = std::numeric_limits<double>::quiet_NaN();
  std::optional<ParticleStructure> particles;

  int dim() const { return n + m; }
};

inline Vector gradient_field(const GameModel& game, const Vector& z) {
  if (z.size() != game.dim())
    throw DimensionMismatch("gradient_field: point has wrong dimension");
  Vector df = game.grad(z);
  if (df.size() != game.dim())
    throw DimensionMismatch("gradient_field: gradient evaluator returned wrong size");
  Vector g(df.size());
  g.head(game.n) = df.head(game.n);
  g.tail(game.m) = -df.tail(game.m);
  return g;
}

inline Matrix jacobian(const GameModel& game, const Vector& z) {
  if (z.size() != game.dim())
    throw DimensionMismatch("jacobian: point has wrong dimension");
  Matrix H = game.hessian(z);
  if (H.rows() != game.dim() || H.cols() != game.dim())
    throw DimensionMismatch("jacobian: hessian evaluator returned wrong size");
  Matrix M = H;
  M.bottomRows(game.m) *= -1.0;
  return M;
}

struct JacobianSplit {
  Matrix M, S, A, Q, R, P;
};

// Splits M into S = (M + M^T)/2 and A = (M - M^T)/2 and extracts the blocks
// Q, R (diagonal of S) and P (top-right of A). For a min-max Jacobian the
// symmetric part is block diagonal; a large off-diagonal block means the
// input was not of that form.
inline JacobianSplit split(const Matrix& M, int n, int m) {
  if (M.rows() != n + m || M.cols() != n + m)
    throw DimensionMismatch("split: matrix size does not match (n, m)");
  JacobianSplit out;
  out.M = M;
  out.S = 0.5 * (M + M.transpose());
  out.A = 0.5 * (M - M.transpose());
  double off = (n > 0 && m > 0) ? out.S.topRightCorner(n, m).cwiseAbs().maxCoeff() : 0.0;
  if (off > 1e-10)
    throw BlockStructureViolation("split: symmetric part has off-diagonal blocks");
  out.Q = out.S.topLeftCorner(n, n);
  out.R = out.S.bottomRightCorner(m, m);
  out.P = out.A.topRightCorner(n, m);
  return out;
}

// Reassembles M = [[Q, P], [-P^T, R]].
inline Matrix assemble(const Matrix& Q, const Matrix& R, const Matrix& P) {
  const int n = static_cast<int>(Q.rows()), m = static_cast<int>(R.rows());
  if (Q.cols() != n || R.cols() != m || P.rows() != n || P.cols() != m)
    throw DimensionMismatch("assemble: inconsistent block shapes");
  Matrix M(n + m, n + m);
  M.topLeftCorner(n, n) = Q;
  M.topRightCorner(n, m) = P;
  M.bottomLeftCorner(m, n) = -P.transpose();
  M.bottomRightCorner(m, m) = R;
  return M;
}

// f(x, y) = x^T Q x / 2 + x^T P y - y^T R y / 2, so the skewed Jacobian is
// the constant [[Q, P], [-P^T, R]].
inline GameModel make_quadratic(const Matrix& Q, const Matrix& R, const Matrix& P) {
  const int n = static_cast<int>(Q.rows()), m = static_cast<int>(R.rows());
  if (Q.cols() != n || R.cols() != m || P.rows() != n || P.cols() != m)
    throw DimensionMismatch("make_quadratic: inconsistent block shapes");
  GameModel game;
  game.n = n;
  game.m = m;
  game.torus.assign(n + m, false);
  auto Qc = std::make_shared<Matrix>(Q);
  auto Rc = std::make_shared<Matrix>(R);
  auto Pc = std::make_shared<Matrix>(P);
  game.value = [=](const Vector& z) {
    Vector x = z.head(n), y = z.tail(m);
    return 0.5 * x.dot(*Qc * x) + x.dot(*Pc * y) - 0.5 * y.dot(*Rc * y);
  };
  game.grad = [=](const Vector& z) {
    Vector x = z.head(n), y = z.tail(m);
    Vector df(n + m);
    df.head(n) = *Qc * x + *Pc * y;
    df.tail(m) = Pc->transpose() * x - *Rc * y;
    return df;
  };
  game.hessian = [=](const Vector&) {
    Matrix H(n + m, n + m);
    H.topLeftCorner(n, n) = *Qc;
    H.topRightCorner(n, m) = *Pc;
    H.bottomLeftCorner(m, n) = Pc->transpose();
    H.bottomRightCorner(m, m) = -*Rc;
    return H;
  };
  game.l2_bound = operator_norm(assemble(Q, R, P));
  game.l3_bound = 0.0;
  game.lxy_bound = operator_norm(P);
  return game;
}

// Bilinear game x^T P y regularized by (alpha/2) x_1^2.
inline GameModel make_reg_bilinear(const Matrix& P, double alpha) {
  if (alpha < 0) throw ConfigError("make_reg_bilinear: alpha must be >= 0");
  const int n = static_cast<int>(P.rows()), m = static_cast<int>(P.cols());
  Matrix Q = Matrix::Zero(n, n);
  Q(0, 0) = alpha;
  return make_quadratic(Q, Matrix::Zero(m, m), P);
}

// Real trigonometric polynomial on the torus:
//   f(x, y) = Re sum_{k=-K..K, l=-L..L} c_{kl} e^{2 pi i (k x + l y)}.
// Derivatives are term-wise; evaluation builds the complex exponential
// powers from a single sincos per argument so lifted particle games stay
// cheap inside long simulations.
class TrigPayoff {
 public:
  TrigPayoff(CMatrix coeffs, int K, int L) : c_(std::move(coeffs)), K_(K), L_(L) {
    if (c_.rows() != 2 * K + 1 || c_.cols() != 2 * L + 1)
      throw DimensionMismatch("TrigPayoff: coeffs must be (2K+1) x (2L+1)");
    l2_ = l3_ = lxy_ = linf_ = 0.0;
    for (int k = -K_; k <= K_; ++k)
      for (int l = -L_; l <= L_; ++l) {
        double a = std::abs(c_(k + K_, l + L_));
        double w = 2.0 * M_PI * std::max(std::abs(k), std::abs(l));
        linf_ += a;
        l2_ += a * w * w;
        l3_ += a * w * w * w;
        lxy_ += a * (2.0 * M_PI * std::abs(k)) * (2.0 * M_PI * std::abs(l));
      }
  }

  struct Derivs {
    double f, fx, fy, fxx, fxy, fyy;
  };

  Derivs derivs(double x, double y) const {
    // e_k[k] = e^{2 pi i k x}, k = -K..K (index shifted by K); same for y.
    const Complex ex = std::polar(1.0, 2.0 * M_PI * x);
    const Complex ey = std::polar(1.0, 2.0 * M_PI * y);
    thread_local std::vector<Complex> px, py;
    fill_powers(px, ex, K_);
    fill_powers(py, ey, L_);
    Complex s{}, sx{}, sy{}, sxx{}, sxy{}, syy{};
    for (int k = -K_; k <= K_; ++k) {
      const Complex ck_row = Complex(0.0, 2.0 * M_PI * k);  // d/dx factor
      for (int l = -L_; l <= L_; ++l) {
        const Complex c = c_(k + K_, l + L_);
        if (c == Complex(0.0, 0.0)) continue;
        const Complex term = c * px[k + K_] * py[l + L_];
        const Complex dl = Complex(0.0, 2.0 * M_PI * l);
        s += term;
        sx += ck_row * term;
        sy += dl * term;
        sxx += ck_row * ck_row * term;
        sxy += ck_row * dl * term;
        syy += dl * dl * term;
      }
    }
    return {s.real(), sx.real(), sy.real(), sxx.real(), sxy.real(), syy.real()};
  }

  double value(double x, double y) const { return derivs(x, y).f; }

  int K() const { return K_; }
  int L() const { return L_; }
  const CMatrix& coeffs() const { return c_; }
  double sup_bound() const { return linf_; }
  double l2_bound() const { return l2_; }
  double l3_bound() const { return l3_; }
  double lxy_bound() const { return lxy_; }

 private:
  static void fill_powers(std::vector<Complex>& p, Complex e, int K) {
    p.assign(2 * K + 1, Complex(1.0, 0.0));
    for (int k = 1; k <= K; ++k) {
      p[K + k] = p[K + k - 1] * e;
      p[K - k] = std::conj(p[K + k]);
    }
  }

  CMatrix c_;
  int K_, L_;
  double l2_, l3_, lxy_, linf_;
};

inline GameModel make_trig_payoff(const CMatrix& coeffs, int K, int L) {
  auto payoff = std::make_shared<TrigPayoff>(coeffs, K, L);
  GameModel game;
  game.n = 1;
  game.m = 1;
  game.torus.assign(2, true);
  game.value = [payoff](const Vector& z) { return payoff->value(z(0), z(1)); };
  game.grad = [payoff](const Vector& z) {
    auto d = payoff->derivs(z(0), z(1));
    Vector df(2);
    df << d.fx, d.fy;
    return df;
  };
  game.hessian = [payoff](const Vector& z) {
    auto d = payoff->derivs(z(0), z(1));
    Matrix H(2, 2);
    H << d.fxx, d.fxy, d.fxy, d.fyy;
    return H;
  };
  game.l2_bound = payoff->l2_bound();
  game.l3_bound = payoff->l3_bound();
  game.lxy_bound = payoff->lxy_bound();
  return game;
}

// Lifted particle game over (a, x, b, y) in simplex x torus^N x simplex x
// torus^M with objective F(a, x, b, y) = sum_{I,J} a_I b_J f(x_I, y_J).
// Simplex feasibility of a, b is not enforced here; dynamics and mirror
// geometry own that.
inline GameModel lift_particle_game(std::shared_ptr<const TrigPayoff> payoff, int N, int M) {
  if (N < 1 || M < 1) throw ConfigError("lift_particle_game: need N, M >= 1");
  GameModel game;
  game.n = 2 * N;
  game.m = 2 * M;
  game.torus.assign(2 * N + 2 * M, false);
  for (int i = 0; i < N; ++i) game.torus[N + i] = true;
  for (int j = 0; j < M; ++j) game.torus[2 * N + M + j] = true;
  game.particles = ParticleStructure{N, M, true};

  // z layout: a (N), x (N), b (M), y (M).
  game.value = [payoff, N, M](const Vector& z) {
    double F = 0.0;
    for (int I = 0; I < N; ++I)
      for (int J = 0; J < M; ++J)
        F += z(I) * z(2 * N + J) * payoff->value(z(N + I), z(2 * N + M + J));
    return F;
  };
  game.grad = [payoff, N, M](const Vector& z) {
    Vector df = Vector::Zero(2 * N + 2 * M);
    for (int I = 0; I < N; ++I) {
      const double aI = z(I), xI = z(N + I);
      for (int J = 0; J < M; ++J) {
        const double bJ = z(2 * N + J), yJ = z(2 * N + M + J);
        auto d = payoff->derivs(xI, yJ);
        df(I) += bJ * d.f;
        df(N + I) += aI * bJ * d.fx;
        df(2 * N + J) += aI * d.f;
        df(2 * N + M + J) += aI * bJ * d.fy;
      }
    }
    return df;
  };
  game.hessian = [payoff, N, M](const Vector& z) {
    const int d = 2 * N + 2 * M;
    Matrix H = Matrix::Zero(d, d);
    const int ox = N, ob = 2 * N, oy = 2 * N + M;
    for (int I = 0; I < N; ++I) {
      const double aI = z(I), xI = z(ox + I);
      for (int J = 0; J < M; ++J) {
        const double bJ = z(ob + J), yJ = z(oy + J);
        auto dv = payoff->derivs(xI, yJ);
        H(I, ob + J) += dv.f;
        H(I, ox + I) += bJ * dv.fx;
        H(I, oy + J) += bJ * dv.fy;
        H(ox + I, ox + I) += aI * bJ * dv.fxx;
        H(ox + I, ob + J) += aI * dv.fx;
        H(ox + I, oy + J) += aI * bJ * dv.fxy;
        H(ob + J, oy + J) += aI * dv.fy;
        H(oy + J, oy + J) += aI * bJ * dv.fyy;
      }
    }
    // Fill the lower triangle from the strictly upper entries set above.
    for (int r = 0; r < d; ++r)
      for (int cidx = r + 1; cidx < d; ++cidx) H(cidx, r) = H(r, cidx);
    return H;
  };
  game.l2_bound = payoff->l2_bound();
  game.l3_bound = payoff->l3_bound();
  game.lxy_bound = payoff->lxy_bound();
  return game;
}

// Bilinear game a^T P b over product simplices (weights only).
inline GameModel make_simplex_bilinear(const Matrix& P) {
  const int N = static_cast<int>(P.rows()), M = static_cast<int>(P.cols());
  GameModel game;
  game.n = N;
  game.m = M;
  game.torus.assign(N + M, false);
  game.particles = ParticleStructure{N, M, false};
  auto Pc = std::make_shared<Matrix>(P);
  game.value = [Pc, N, M](const Vector& z) {
    return z.head(N).dot(*Pc * z.tail(M));
  };
  game.grad = [Pc, N, M](const Vector& z) {
    Vector df(N + M);
    df.head(N) = *Pc * z.tail(M);
    df.tail(M) = Pc->transpose() * z.head(N);
    return df;
  };
  game.hessian = [Pc, N, M](const Vector&) {
    Matrix H = Matrix::Zero(N + M, N + M);
    H.topRightCorner(N, M) = *Pc;
    H.bottomLeftCorner(M, N) = Pc->transpose();
    return H;
  };
  game.l2_bound = operator_norm(P);
  game.l3_bound = 0.0;
  game.lxy_bound = operator_norm(P);
  return game;
}

}  // namespace minmax
