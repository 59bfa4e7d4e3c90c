#include "zetasum/sturm.hpp"

#include <algorithm>
#include <array>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "zetasum/errors.hpp"
#include "zetasum/numerics.hpp"

namespace zetasum {

namespace odeint = boost::numeric::odeint;
using State = std::vector<double>;

BoundaryCondition BoundaryCondition::neumann() { return {std::numbers::pi / 2}; }

BoundaryCondition BoundaryCondition::robin(double theta) {
  if (!(theta >= 0.0 && theta < std::numbers::pi))
    throw DomainError("boundary angle must lie in [0, pi)");
  return {theta};
}

void SLOperator::validate() const {
  if (!V || !W) throw DomainError("operator needs both V and W");
  if (!(bc0.theta >= 0.0 && bc0.theta < std::numbers::pi) ||
      !(bc1.theta >= 0.0 && bc1.theta < std::numbers::pi))
    throw DomainError("boundary angle must lie in [0, pi)");
  for (int i = 0; i < 1000; ++i) {
    const double x = i / 999.0;
    const double v = V(x);
    if (!(v > 0.0)) throw DomainError("V must be positive on [0,1], V(" + std::to_string(x) +
                                      ") = " + std::to_string(v));
    if (!std::isfinite(W(x))) throw DomainError("W is not finite on [0,1]");
  }
}

double SLOperator::scale() const {
  double m = 1.0;
  for (int i = 0; i <= 32; ++i) m = std::max(m, std::abs(potential(i / 32.0)));
  return std::sqrt(m);
}

SLOperator SLOperator::reflected() const {
  SLOperator r;
  const RealFunction v = V, w = W;
  r.V = RealFunction([v](double x) { return v(1.0 - x); });
  r.W = RealFunction([w](double x) { return w(1.0 - x); });
  r.lambda = lambda;
  // d/dt = -d/dx flips the sign of the derivative term
  auto flip = [](BoundaryCondition b) {
    return b.theta == 0.0 ? b : BoundaryCondition{std::numbers::pi - b.theta};
  };
  r.bc0 = flip(bc1);
  r.bc1 = flip(bc0);
  return r;
}

namespace {

struct RiccatiBlowup {};

// Above this the explicit integrator spends most steps on stability.
constexpr double kStiffMu = 24.0;

double cot(double t) { return std::cos(t) / std::sin(t); }

// Jet arithmetic over the shifted, scaled parameters
// w = w0 + sw*u, lambda = lambda0 + sl*v.
struct JetSpace {
  const SLOperator* op;
  double w0;
  int nw, nl, n;
  double sw, sl, mu;

  int idx(int i, int j) const { return i * (nl + 1) + j; }

  void q(double x, double* Q) const {
    std::fill(Q, Q + n, 0.0);
    const double V = op->V(x), W = op->W(x), l = op->lambda;
    Q[0] = l * l * V + W + w0;
    if (nw >= 1) Q[idx(1, 0)] = sw;
    if (nl >= 1) Q[idx(0, 1)] = 2.0 * l * sl * V;
    if (nl >= 2) Q[idx(0, 2)] = sl * sl * V;
  }
};

JetSpace make_space(const SLOperator& op, double w0, int nw, int nl) {
  JetSpace s{&op, w0, nw, nl, (nw + 1) * (nl + 1), 1.0, 1.0, 1.0};
  double m = 1.0, vmax = 0.0;
  for (int i = 0; i <= 32; ++i) {
    const double x = i / 32.0;
    m = std::max(m, std::abs(op.potential(x) + w0));
    vmax = std::max(vmax, op.V(x));
  }
  s.sw = m;
  s.mu = std::sqrt(m);
  s.sl = vmax > 0.0 ? std::sqrt(m / vmax) : 1.0;
  return s;
}

template <class System, class Observer>
void run_ode(System sys, State& y, double x0, double x1, double atol, double rtol, Observer obs) {
  auto stepper = odeint::make_controlled(atol, rtol, odeint::runge_kutta_fehlberg78<State>());
  odeint::integrate_adaptive(stepper, sys, y, x0, x1, (x1 - x0) / 16.0, obs);
}

// Three-stage Radau IIA (order 5, L-stable) for the jet Riccati system
// p' = Q - p*p, I' = p. The forward Riccati flow contracts at rate 2 sqrt(Q),
// which makes explicit schemes cost O(mu) steps. The stage equations are
// triangular in the jet index: a 3x3 Newton solve for the constant term,
// then one linear 3x3 solve per higher coefficient.
class RadauRiccati {
 public:
  explicit RadauRiccati(const JetSpace& sp) : sp_(sp), n_(sp.n) {
    const double r6 = std::sqrt(6.0);
    c_ = {(4.0 - r6) / 10.0, (4.0 + r6) / 10.0, 1.0};
    a_ = {{{(88.0 - 7.0 * r6) / 360.0, (296.0 - 169.0 * r6) / 1800.0, (-2.0 + 3.0 * r6) / 225.0},
           {(296.0 + 169.0 * r6) / 1800.0, (88.0 + 7.0 * r6) / 360.0, (-2.0 - 3.0 * r6) / 225.0},
           {(16.0 - r6) / 36.0, (16.0 + r6) / 36.0, 1.0 / 9.0}}};
    for (auto& P : stage_) P.resize(n_);
    for (auto& Q : q_) Q.resize(n_);
  }

  // Advances y = (p, I) from x0 to x1; throws RiccatiBlowup when |p| explodes.
  void run(State& y, double x0, double x1, double rtol, double limit) {
    const double atol = rtol * sp_.mu;
    double x = x0, h = std::min(x1 - x0, 0.5 / sp_.mu);
    State y1(2 * n_), ymid(2 * n_), y2(2 * n_);
    int steps = 0;
    while (x < x1) {
      if (++steps > 200000) throw NumericalError("Radau integration exceeded step budget");
      h = std::min(h, x1 - x);
      const bool ok = step(y, x, h, y1) && step(y, x, h / 2, ymid) && step(ymid, x + h / 2, h / 2, y2);
      double err = std::numeric_limits<double>::infinity();
      if (ok) {
        err = 0.0;
        for (int k = 0; k < 2 * n_; ++k)
          err = std::max(err, std::abs(y2[k] - y1[k]) / 31.0 / (atol + rtol * std::abs(y2[k])));
      }
      if (err <= 1.0) {
        x += h;
        y = y2;
        if (!(std::abs(y[0]) < limit)) throw RiccatiBlowup{};
        h *= std::min(4.0, 0.9 * std::pow(std::max(err, 1e-12), -1.0 / 6.0));
      } else {
        h *= ok ? std::max(0.2, 0.9 * std::pow(err, -1.0 / 6.0)) : 0.25;
        if (h < 1e-14 * (1.0 + std::abs(x))) throw RiccatiBlowup{};
      }
    }
  }

 private:
  using Mat = std::array<std::array<double, 3>, 3>;

  static bool solve3(Mat m, std::array<double, 3>& b) {
    for (int c = 0; c < 3; ++c) {
      int piv = c;
      for (int r = c + 1; r < 3; ++r)
        if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
      if (m[piv][c] == 0.0) return false;
      std::swap(m[c], m[piv]);
      std::swap(b[c], b[piv]);
      for (int r = c + 1; r < 3; ++r) {
        const double f = m[r][c] / m[c][c];
        for (int k = c; k < 3; ++k) m[r][k] -= f * m[c][k];
        b[r] -= f * b[c];
      }
    }
    for (int c = 2; c >= 0; --c) {
      for (int k = c + 1; k < 3; ++k) b[c] -= m[c][k] * b[k];
      b[c] /= m[c][c];
    }
    return true;
  }

  bool step(const State& y, double x, double h, State& out) {
    for (int i = 0; i < 3; ++i) sp_.q(x + c_[i] * h, q_[i].data());
    // constant term by Newton
    std::array<double, 3> P{y[0], y[0], y[0]};
    bool conv = false;
    for (int it = 0; it < 30 && !conv; ++it) {
      Mat J{};
      std::array<double, 3> F{};
      for (int i = 0; i < 3; ++i) {
        F[i] = P[i] - y[0];
        for (int j = 0; j < 3; ++j) {
          F[i] -= h * a_[i][j] * (q_[j][0] - P[j] * P[j]);
          J[i][j] = (i == j ? 1.0 : 0.0) + 2.0 * h * a_[i][j] * P[j];
        }
      }
      if (!solve3(J, F)) return false;
      double d = 0.0;
      for (int i = 0; i < 3; ++i) {
        P[i] -= F[i];
        d = std::max(d, std::abs(F[i]) / (sp_.mu + std::abs(P[i])));
      }
      if (!std::isfinite(d)) return false;
      conv = d < 1e-15;
    }
    if (!conv) return false;
    Mat J{};
    for (int i = 0; i < 3; ++i) {
      stage_[i][0] = P[i];
      for (int j = 0; j < 3; ++j) J[i][j] = (i == j ? 1.0 : 0.0) + 2.0 * h * a_[i][j] * P[j];
    }
    const int w = sp_.nl + 1;
    for (int k = 1; k < n_; ++k) {
      const int ki = k / w, kj = k % w;
      std::array<double, 3> g{};
      for (int s = 0; s < 3; ++s) {
        double r = 0.0;
        for (int p = 0; p <= ki; ++p)
          for (int q = 0; q <= kj; ++q) {
            const int a = p * w + q, b = (ki - p) * w + (kj - q);
            if (a != 0 && b != 0) r += stage_[s][a] * stage_[s][b];
          }
        g[s] = q_[s][k] - r;
      }
      std::array<double, 3> rhs{};
      for (int i = 0; i < 3; ++i) {
        rhs[i] = y[k];
        for (int j = 0; j < 3; ++j) rhs[i] += h * a_[i][j] * g[j];
      }
      if (!solve3(J, rhs)) return false;
      for (int i = 0; i < 3; ++i) stage_[i][k] = rhs[i];
    }
    for (int k = 0; k < n_; ++k) {
      out[k] = stage_[2][k];
      double inc = 0.0;
      for (int j = 0; j < 3; ++j) inc += a_[2][j] * stage_[j][k];
      out[n_ + k] = y[n_ + k] + h * inc;
    }
    return true;
  }

  const JetSpace& sp_;
  int n_;
  std::array<double, 3> c_;
  Mat a_;
  std::array<std::vector<double>, 3> stage_, q_;
};

struct Propagated {
  BiJet logy;  // log|y(x_end)|
  BiJet p;     // y'/y at x_end
  bool riccati = true;
};

// Solves y'' = (q + w) y from the boundary condition at 0 up to x_end with
// y(0) = 0, y'(0) = 1 (Dirichlet) or y(0) = 1, y'(0) = -cot(theta0). A short
// linear start is followed by the Riccati form p = y'/y; if p blows up
// (y has a zero) the linear form with renormalization takes over.
Propagated propagate(const JetSpace& sp, double x_end, double rtol) {
  const int n = sp.n, nw = sp.nw, nl = sp.nl;
  const double atol = rtol * sp.mu;
  const SLOperator& op = *sp.op;

  auto linear = [&](State& s, double xa, double xb, double& lognorm) {
    std::vector<double> Q(n);
    auto sys = [&](const State& y, State& dy, double x) {
      sp.q(x, Q.data());
      std::copy(y.begin() + n, y.end(), dy.begin());
      jet_mul({Q.data(), static_cast<std::size_t>(n)}, {y.data(), static_cast<std::size_t>(n)},
              {dy.data() + n, static_cast<std::size_t>(n)}, nw, nl);
    };
    const double chunk = 8.0 / sp.mu;
    double x = xa;
    while (x < xb) {
      const double xn = std::min(xb, x + chunk);
      run_ode(sys, s, x, xn, atol, rtol, [](const State&, double) {});
      double nrm = std::max(std::abs(s[0]), std::abs(s[n]) / sp.mu);
      if (!(nrm > 0.0) || !std::isfinite(nrm)) throw NumericalError("linear propagation failed");
      for (auto& v : s) v /= nrm;
      lognorm += std::log(nrm);
      x = xn;
    }
  };

  State s(2 * n, 0.0);
  if (op.bc0.is_dirichlet()) {
    s[n] = 1.0;
  } else {
    s[0] = 1.0;
    s[n] = -cot(op.bc0.theta);
  }
  double lognorm = 0.0;
  const double xs = std::min({x_end, 0.25, 0.5 / sp.mu});
  linear(s, 0.0, xs, lognorm);

  auto to_output = [&](const State& st, double lnorm) {
    BiJet y(nw, nl), yp(nw, nl);
    std::copy(st.begin(), st.begin() + n, y.data().begin());
    std::copy(st.begin() + n, st.end(), yp.data().begin());
    Propagated out;
    out.logy = y.log_abs();
    out.logy(0, 0) += lnorm;
    out.p = yp * y.reciprocal();
    return out;
  };
  if (xs >= x_end) {
    auto out = to_output(s, lognorm);
    out.riccati = false;
    return out;
  }

  Propagated start = to_output(s, lognorm);
  State r(2 * n, 0.0);
  std::copy(start.p.data().begin(), start.p.data().end(), r.begin());
  std::vector<double> Q(n), pp(n);
  auto ric = [&](const State& y, State& dy, double x) {
    sp.q(x, Q.data());
    jet_mul({y.data(), static_cast<std::size_t>(n)}, {y.data(), static_cast<std::size_t>(n)}, pp,
            nw, nl);
    for (int k = 0; k < n; ++k) {
      dy[k] = Q[k] - pp[k];
      dy[n + k] = y[k];
    }
  };
  const double limit = 1e7 * sp.mu;
  try {
    if (sp.mu > kStiffMu) {
      RadauRiccati(sp).run(r, xs, x_end, rtol, limit);
    } else {
      run_ode(ric, r, xs, x_end, atol, rtol, [&](const State& y, double) {
        if (!(std::abs(y[0]) < limit)) throw RiccatiBlowup{};
      });
    }
    Propagated out;
    out.p = BiJet(nw, nl);
    std::copy(r.begin(), r.begin() + n, out.p.data().begin());
    out.logy = start.logy;
    for (int k = 0; k < n; ++k) out.logy.data()[k] += r[n + k];
    return out;
  } catch (const RiccatiBlowup&) {
    linear(s, xs, x_end, lognorm);
    auto out = to_output(s, lognorm);
    out.riccati = false;
    return out;
  }
}

BiJet unscale(BiJet j, const JetSpace& sp) {
  for (int i = 0; i <= sp.nw; ++i)
    for (int k = 0; k <= sp.nl; ++k) j(i, k) /= std::pow(sp.sw, i) * std::pow(sp.sl, k);
  return j;
}

// Coefficients t_i of Tr(op + w0 + dw)^-power in powers of dw, at lambda order j.
std::vector<double> trace_series(const BiJet& L, int power, int order, int j) {
  std::vector<double> t(order + 1);
  for (int i = 0; i <= order; ++i) {
    if (power == 1)
      t[i] = (i + 1) * L(i + 1, j);
    else
      t[i] = -(i + 1.0) * (i + 2.0) * L(i + 2, j);
  }
  return t;
}

// Substitutes dw = 2 z d + d^2 and returns the coefficient of d^m.
double compose_z(const std::vector<double>& t, double z, int m) {
  std::vector<double> pw(m + 1, 0.0);
  pw[0] = 1.0;
  double out = t[0] * (m == 0 ? 1.0 : 0.0);
  for (std::size_t i = 1; i < t.size(); ++i) {
    std::vector<double> nx(m + 1, 0.0);
    for (int a = 0; a <= m; ++a) {
      if (a + 1 <= m) nx[a + 1] += 2.0 * z * pw[a];
      if (a + 2 <= m) nx[a + 2] += pw[a];
    }
    pw = nx;
    out += t[i] * pw[m];
  }
  return out;
}

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

}  // namespace

BiJet characteristic_jet(const SLOperator& op, double w0, int nw, int nl, const OdeOptions& opt) {
  JetSpace sp = make_space(op, w0, nw, nl);
  Propagated pr = propagate(sp, 1.0, opt.rtol);
  BiJet L = pr.logy;
  if (!op.bc1.is_dirichlet()) {
    BiJet end = pr.p;
    end(0, 0) += cot(op.bc1.theta);
    L += end.log_abs();
  }
  if (!std::isfinite(L(0, 0))) throw NumericalError("characteristic function is singular");
  return unscale(L, sp);
}

double resolvent_trace(const SLOperator& op, double z, int power, int d_lambda, int d_z,
                       const OdeOptions& opt) {
  if (power != 1 && power != 2) throw DomainError("resolvent power must be 1 or 2");
  if (d_lambda < 0 || d_z < 0) throw DomainError("derivative orders must be nonnegative");
  if (!(z >= 0.0)) throw DomainError("resolvent_trace needs z >= 0");
  BiJet L = characteristic_jet(op, z * z, power + d_z, d_lambda, opt);
  auto t = trace_series(L, power, d_z, d_lambda);
  const double c = compose_z(t, z, d_z);
  const double v = c * factorial(d_z) * factorial(d_lambda);
  if (!std::isfinite(v)) throw NumericalError("resolvent trace is not finite");
  return v;
}

std::vector<double> resolvent_trace_lambda_derivs(const SLOperator& op, double z, int power,
                                                  int count, const OdeOptions& opt) {
  if (power != 1 && power != 2) throw DomainError("resolvent power must be 1 or 2");
  BiJet L = characteristic_jet(op, z * z, power, count - 1, opt);
  std::vector<double> out(count);
  for (int j = 0; j < count; ++j) out[j] = trace_series(L, power, 0, j)[0] * factorial(j);
  return out;
}

double green_diagonal(const SLOperator& op, double z, double x, const OdeOptions& opt) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("green_diagonal needs x in [0,1]");
  if ((x == 0.0 && op.bc0.is_dirichlet()) || (x == 1.0 && op.bc1.is_dirichlet())) return 0.0;
  auto p_at = [&](const SLOperator& o, double t) {
    if (t == 0.0) return -cot(o.bc0.theta);
    JetSpace sp = make_space(o, z * z, 0, 0);
    return propagate(sp, t, opt.rtol).p(0, 0);
  };
  const double pu = p_at(op, x);
  const double pv = -p_at(op.reflected(), 1.0 - x);
  return 1.0 / (pu - pv);
}

namespace {

// Scaled Pruefer phase at x = 1 for eigenvalue parameter E.
double pruefer_phase(const SLOperator& op, double E, double S, double rtol) {
  State th(1, std::atan2(-S * std::sin(op.bc0.theta), std::cos(op.bc0.theta)));
  if (th[0] < 0.0) th[0] += std::numbers::pi;
  auto sys = [&](const State& y, State& dy, double x) {
    const double c = std::cos(y[0]), s = std::sin(y[0]);
    dy[0] = S * c * c + (E - op.potential(x)) / S * s * s;
  };
  auto stepper = odeint::make_controlled(rtol, rtol, odeint::runge_kutta_dopri5<State>());
  odeint::integrate_adaptive(stepper, sys, th, 0.0, 1.0, 1e-3);
  return th[0];
}

double end_phase(const SLOperator& op, double S) {
  double b = std::atan2(-S * std::sin(op.bc1.theta), std::cos(op.bc1.theta));
  while (b <= 0.0) b += std::numbers::pi;
  while (b > std::numbers::pi) b -= std::numbers::pi;
  return b;
}

}  // namespace

Spectrum eigenvalues(const SLOperator& op, int count, const OdeOptions& opt) {
  if (count < 1) throw DomainError("eigenvalue count must be >= 1");
  op.validate();
  double qmin = std::numeric_limits<double>::infinity(), qmax = -qmin;
  for (int i = 0; i <= 64; ++i) {
    const double q = op.potential(i / 64.0);
    qmin = std::min(qmin, q);
    qmax = std::max(qmax, q);
  }
  Spectrum out;
  const double rtol = std::min(opt.rtol, 1e-11);
  for (int k = 0; k < count; ++k) {
    const double est = qmin + std::numbers::pi * std::numbers::pi * (k + 1.0) * (k + 1.0);
    const double S = std::sqrt(std::max(1.0, std::abs(est)));
    const double target = end_phase(op, S) + k * std::numbers::pi;
    auto g = [&](double E) { return pruefer_phase(op, E, S, rtol) - target; };
    double lo = out.eigenvalues.empty() ? qmin - 1.0 : out.eigenvalues.back();
    double step = 1.0 + std::abs(lo);
    while (g(lo) >= 0.0) {
      lo -= step;
      step *= 2.0;
    }
    double hi = std::max(lo, qmax) + std::numbers::pi * std::numbers::pi * (k + 1.0) * (k + 1.0) + 1.0;
    step = 1.0 + std::abs(hi);
    while (g(hi) <= 0.0) {
      hi += step;
      step *= 2.0;
    }
    std::uintmax_t iters = 200;
    auto tol = [&](double a, double b) { return std::abs(b - a) <= 4e-15 * std::max(1.0, std::abs(a)); };
    auto [a, b] = boost::math::tools::toms748_solve(g, lo, hi, tol, iters);
    if (iters >= 200) throw NumericalError("eigenvalue root finder did not converge");
    const double E = 0.5 * (a + b);
    // the integrated phase is only good to about rtol times its size
    if (std::abs(g(E)) > 1e-8 + 1e3 * rtol * std::abs(target))
      throw NumericalError("Pruefer phase residual too large");
    out.eigenvalues.push_back(E);
    out.error_bounds.push_back(std::abs(b - a) + 1e3 * rtol * std::max(1.0, std::abs(E)));
  }
  for (std::size_t i = 1; i < out.eigenvalues.size(); ++i)
    if (!(out.eigenvalues[i] > out.eigenvalues[i - 1]))
      throw NumericalError("computed eigenvalues are not strictly increasing");
  return out;
}

int zero_mode_count(const SLOperator& op) {
  // the trace at w=0 exceeds 1/|mu_min|; only look closer when it is large
  try {
    BiJet L = characteristic_jet(op, 0.0, 1, 0);
    if (std::abs(L(1, 0)) < 1e6) return 0;
  } catch (const NumericalError&) {
  }
  auto sp = eigenvalues(op, 2);
  int n = 0;
  for (double e : sp.eigenvalues)
    if (std::abs(e) < 1e-8) ++n;
  return n;
}

double tail_start(const SLOperator& op) { return 8.0 * (1.0 + op.scale()); }

namespace {

struct PfIntegral {
  RegValue value;
  AsymptoticExpansion tail;
  int zero_modes = 0;
};

// partie finie of z^{3-2s} Tr(op+z^2)^-2 over (0, inf), with the fitted tail
PfIntegral pf_resolvent_integral(const SLOperator& op, double s, const ResolventOptions& opt) {
  PfIntegral out;
  out.zero_modes = zero_mode_count(op);
  RealFunction f([&](double z) {
    return std::pow(z, 3.0 - 2.0 * s) * resolvent_trace(op, z, 2, 0, 0, opt.ode);
  });
  RegIntOptions ro;
  ro.rel_tol = opt.rel_tol;
  ro.abs_tol = 1e-13;
  ro.at_infinity.model = AsymptoticModel::powers(-2.0 * s, opt.tail_terms);
  ro.at_infinity.split = tail_start(op);
  ro.at_infinity.octaves = 10;
  ro.at_infinity.points_per_octave = 5;
  if (out.zero_modes > 0) {
    std::vector<ExpansionTerm> t{{-1.0 - 2.0 * s, 0}};
    for (int k = 0; k < 8; ++k) t.push_back({3.0 - 2.0 * s + 2.0 * k, 0});
    ro.at_zero.model = AsymptoticModel(t, Direction::to_zero);
    ro.at_zero.split = 0.25 / op.scale();
  }
  out.value = reg_int(f, 0.0, std::numeric_limits<double>::infinity(), ro);
  // separate fit of the tail coefficients for bookkeeping
  const double X = out.value.diagnostics.split > 0.0 ? out.value.diagnostics.split : tail_start(op);
  out.tail = fit_expansion(f, AsymptoticModel::powers(-2.0 * s, std::min(opt.tail_terms, 10)),
                           GeometricGrid::span(X, X * 1024.0, 51));
  return out;
}

}  // namespace

LogDetResult logdet(const SLOperator& op, LogDetMethod method, const ResolventOptions& opt) {
  op.validate();
  LogDetResult r;
  if (method == LogDetMethod::gelfand_yaglom) {
    r.zero_modes = zero_mode_count(op);
    if (r.zero_modes > 0) throw NumericalError("zero mode detected, Gelfand-Yaglom undefined");
    BiJet L = characteristic_jet(op, 0.0, 0, 0, opt.ode);
    r.value = std::log(2.0) + L(0, 0);
    r.error_estimate = 1e3 * opt.ode.rtol * (1.0 + std::abs(r.value));
    return r;
  }
  PfIntegral pf = pf_resolvent_integral(op, 0.0, opt);
  r.zero_modes = pf.zero_modes;
  r.value = -2.0 * pf.value.value;
  r.error_estimate = 2.0 * pf.value.error_estimate;
  r.zeta0 = pf.tail.coefficient(-1.0) - r.zero_modes;
  r.has_zeta0 = true;
  if (method == LogDetMethod::resolvent_zeta) {
    r.value -= r.zeta0;
    r.error_estimate += pf.tail.constant_error;
    r.modified = r.zero_modes > 0;
  }
  return r;
}

double zeta_value(const SLOperator& op, double s, const ResolventOptions& opt) {
  op.validate();
  if (s >= 1.0) {
    const int K = 200;
    auto sp = eigenvalues(op, K);
    CompensatedSum acc;
    for (double e : sp.eigenvalues)
      if (std::abs(e) >= 1e-8) acc.add(std::pow(e, -s));
    // mu_k ~ pi^2 (k + c)^2 + B fitted to the last two eigenvalues
    const double pi2 = std::numbers::pi * std::numbers::pi;
    const double m1 = sp.eigenvalues[K - 1], m2 = sp.eigenvalues[K - 2];
    const double c = ((m1 - m2) / pi2 + 1.0) / 2.0 - (K - 1);
    const double B = m1 - pi2 * (K - 1 + c) * (K - 1 + c);
    auto g = [&](double u) { return std::pow(pi2 * (u + c) * (u + c) + B, -s); };
    acc.add(integrate(g, K - 0.5, std::numeric_limits<double>::infinity()).value);
    return acc.value();
  }
  // poles of the continuation: -2s-k = -1 for a tail term k
  const double k_pole = 1.0 - 2.0 * s;
  const bool at_pole = std::abs(k_pole - std::round(k_pole)) < 1e-12;
  if (at_pole) {
    const int k = static_cast<int>(std::lround(k_pole));
    PfIntegral pf = pf_resolvent_integral(op, s, opt);
    const double ck = pf.tail.coefficient(-1.0);
    if (k % 2 == 0) {
      if (std::abs(ck) > 1e-8) throw DomainError("zeta is evaluated at a pole");
      return 2.0 * std::sin(std::numbers::pi * s) / (std::numbers::pi * (1.0 - s)) *
             pf.value.value;
    }
    double res = ck;
    if (std::abs(s) < 1e-12) res -= pf.zero_modes;
    return std::cos(std::numbers::pi * s) * res / (1.0 - s);
  }
  PfIntegral pf = pf_resolvent_integral(op, s, opt);
  return 2.0 * std::sin(std::numbers::pi * s) / (std::numbers::pi * (1.0 - s)) * pf.value.value;
}

TraceExpansion trace_expansion(const SLOperator& op, int K, const ResolventOptions& opt) {
  const double X = tail_start(op);
  auto grid = GeometricGrid::span(X, X * 32.0, std::max(51, 4 * (K + 5) + 2));
  // extra powers absorb the truncation remainder; only 0..K are reported
  auto model = AsymptoticModel::powers(0.0, K + 5);
  auto zs = grid.nodes();
  std::vector<double> y1(zs.size()), y2(zs.size());
  auto vals = parallel_map_vec(zs.size(), [&](std::size_t i) {
    BiJet L = characteristic_jet(op, zs[i] * zs[i], 2, 0, opt.ode);
    const double t1 = L(1, 0), t2 = -2.0 * L(2, 0);
    return std::vector<double>{zs[i] * t1, zs[i] * zs[i] * zs[i] * t2};
  });
  for (std::size_t i = 0; i < zs.size(); ++i) {
    y1[i] = vals[i][0];
    y2[i] = vals[i][1];
  }
  auto e1 = fit_expansion(zs, y1, model);
  auto e2 = fit_expansion(zs, y2, model);
  TraceExpansion out;
  for (int k = 0; k <= K; ++k) {
    out.b.push_back(e1.coefficient(-k));
    out.c.push_back(e2.coefficient(-k));
  }
  out.residual_b = e1.fit_residual;
  out.residual_c = e2.fit_residual;
  return out;
}

}  // namespace zetasum
