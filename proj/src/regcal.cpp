#include "zetasum/regcal.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/special_functions/factorials.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "zetasum/errors.hpp"
#include "zetasum/numerics.hpp"

namespace zetasum {

namespace {

constexpr double kExpTol = 1e-12;

bool same_exponent(double a, double b) { return std::abs(a - b) < kExpTol; }

double basis(double x, double alpha, int k) {
  double v = std::pow(x, alpha);
  if (k > 0) v *= std::pow(std::log(x), k);
  return v;
}

struct CoreFit {
  std::vector<Coefficient> coeffs;
  double residual = 0.0;
  double condition = 0.0;
};

CoreFit fit_core(std::span<const double> x, std::span<const double> y,
                 const AsymptoticModel& model) {
  const int n = static_cast<int>(model.basis_size());
  const int rows = static_cast<int>(x.size());
  // normalize by the grid end nearest the asymptotic regime's onset, so every
  // basis function is bounded by its value there
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  const double xm = model.direction == Direction::to_infinity ? *lo : *hi;
  const double L = std::log(xm);

  Eigen::MatrixXd A(rows, n);
  Eigen::VectorXd rhs(rows);
  for (int i = 0; i < rows; ++i) {
    const double s = x[i] / xm;
    const double ls = std::log(s);
    int col = 0;
    double wmax = 0.0;
    for (const auto& t : model.terms) {
      const double p = std::pow(s, t.exponent);
      double lk = 1.0;
      for (int k = 0; k <= t.max_log; ++k) {
        A(i, col) = p * lk;
        wmax = std::max(wmax, std::abs(A(i, col)));
        lk *= ls;
        ++col;
      }
    }
    const double w = wmax > 0.0 ? 1.0 / wmax : 1.0;
    A.row(i) *= w;
    rhs(i) = y[i] * w;
  }
  Eigen::VectorXd cscale(n);
  for (int j = 0; j < n; ++j) {
    double nrm = A.col(j).norm();
    cscale(j) = nrm > 0.0 ? nrm : 1.0;
    A.col(j) /= cscale(j);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  CoreFit out;
  out.condition = sv(n - 1) > 0.0 ? sv(0) / sv(n - 1) : std::numeric_limits<double>::infinity();
  Eigen::VectorXd b = svd.solve(rhs);
  const double rn = rhs.norm();
  const double res = (A * b - rhs).norm();
  out.residual = rn > 0.0 ? res / rn : res;
  for (int j = 0; j < n; ++j) b(j) /= cscale(j);

  // back from powers of s = x/xm to powers of x
  int col = 0;
  for (const auto& t : model.terms) {
    const double pa = std::pow(xm, -t.exponent);
    for (int m = 0; m <= t.max_log; ++m) {
      double a = 0.0;
      for (int k = m; k <= t.max_log; ++k) {
        a += b(col + k) * boost::math::binomial_coefficient<double>(k, m) * std::pow(-L, k - m);
      }
      out.coeffs.push_back({t.exponent, m, a * pa});
    }
    col += t.max_log + 1;
  }
  return out;
}

double eval_coeffs(const std::vector<Coefficient>& c, double x) {
  double s = 0.0;
  for (const auto& t : c) s += t.value * basis(x, t.exponent, t.log_power);
  return s;
}

double constant_of(const std::vector<Coefficient>& c) {
  for (const auto& t : c)
    if (same_exponent(t.exponent, 0.0) && t.log_power == 0) return t.value;
  return 0.0;
}

}  // namespace

RealFunction::RealFunction(Eval f, Derivs d) : f_(std::move(f)), d_(std::move(d)) {}

void RealFunction::derivatives(double x, std::span<double> out) const {
  if (d_) {
    d_(x, out);
    return;
  }
  const int count = static_cast<int>(out.size());
  if (count == 0) return;
  out[0] = f_(x);
  if (count == 1) return;
  const double h = x > 0.0 ? 0.5 * x : 0.5;
  auto cheb = Chebyshev::interpolate(f_, x - h, x + h, 40);
  auto tay = cheb.taylor(x, count);
  double fact = 1.0;
  for (int k = 1; k < count; ++k) {
    fact *= k;
    out[k] = tay[k] * fact;
  }
}

AsymptoticModel::AsymptoticModel(std::vector<ExpansionTerm> t, Direction d, double decay)
    : terms(std::move(t)), direction(d), remainder_decay(decay) {
  validate();
}

AsymptoticModel AsymptoticModel::powers(double leading, int count, double step, Direction d) {
  std::vector<ExpansionTerm> t;
  const double sgn = d == Direction::to_infinity ? -1.0 : 1.0;
  for (int i = 0; i < count; ++i) t.push_back({leading + sgn * step * i, 0});
  return AsymptoticModel(std::move(t), d);
}

std::size_t AsymptoticModel::basis_size() const {
  std::size_t n = 0;
  for (const auto& t : terms) n += static_cast<std::size_t>(t.max_log + 1);
  return n;
}

void AsymptoticModel::validate() const {
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (!std::isfinite(terms[i].exponent) || terms[i].max_log < 0)
      throw DomainError("asymptotic model term is malformed");
    if (i > 0) {
      const double d = terms[i].exponent - terms[i - 1].exponent;
      const bool ok = direction == Direction::to_infinity ? d < -kExpTol : d > kExpTol;
      if (!ok) throw DomainError("asymptotic model exponents are not strictly ordered");
    }
  }
  if (!(remainder_decay > 0.0)) throw DomainError("remainder decay must be positive");
}

AsymptoticModel AsymptoticModel::normalized(std::vector<ExpansionTerm> t, Direction d) {
  std::sort(t.begin(), t.end(), [d](const ExpansionTerm& a, const ExpansionTerm& b) {
    return d == Direction::to_infinity ? a.exponent > b.exponent : a.exponent < b.exponent;
  });
  std::vector<ExpansionTerm> merged;
  for (const auto& e : t) {
    if (!merged.empty() && same_exponent(merged.back().exponent, e.exponent)) {
      merged.back().max_log = std::max(merged.back().max_log, e.max_log);
    } else {
      merged.push_back(e);
    }
  }
  return AsymptoticModel(std::move(merged), d);
}

double AsymptoticExpansion::coefficient(double exponent, int log_power) const {
  for (const auto& c : coefficients)
    if (same_exponent(c.exponent, exponent) && c.log_power == log_power) return c.value;
  return 0.0;
}

double AsymptoticExpansion::evaluate(double x) const { return eval_coeffs(coefficients, x); }

GeometricGrid GeometricGrid::span(double from, double to, int points) {
  if (points < 2 || !(from > 0.0) || !(to > 0.0)) throw DomainError("bad geometric grid");
  return {from, std::pow(to / from, 1.0 / (points - 1)), points};
}

std::vector<double> GeometricGrid::nodes() const {
  std::vector<double> x(points);
  for (int k = 0; k < points; ++k) x[k] = start * std::pow(ratio, k);
  return x;
}

GeometricGrid default_grid(Direction d) {
  if (d == Direction::to_infinity) return GeometricGrid::span(16.0, 1048576.0, 49);
  return GeometricGrid::span(std::ldexp(1.0, -20), 1.0 / 16.0, 49);
}

AsymptoticExpansion fit_expansion(std::span<const double> x, std::span<const double> y,
                                  const AsymptoticModel& model, const FitOptions& opt) {
  model.validate();
  if (x.size() != y.size()) throw DomainError("sample abscissae and values differ in length");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0)) throw DomainError("fit abscissae must be positive");
    if (!std::isfinite(y[i])) throw NumericalError("non-finite sample value in fit");
  }
  AsymptoticExpansion out;
  out.direction = model.direction;
  const std::size_t n = model.basis_size();
  if (n == 0) {
    double m = 0.0;
    for (double v : y) m = std::max(m, std::abs(v));
    out.remainder_estimate = m;
    return out;
  }
  if (x.size() < 2 * n) throw DomainError("fit grid needs at least twice as many points as terms");

  CoreFit full = fit_core(x, y, model);
  out.coefficients = full.coeffs;
  out.fit_residual = full.residual;
  out.condition_number = full.condition;
  if (opt.reject && !(full.condition <= opt.max_condition)) {
    throw FitError("ill-conditioned expansion basis (condition " + std::to_string(full.condition) +
                       ") for model " + to_string(model),
                   full.residual, full.condition);
  }
  if (opt.reject && !(full.residual <= opt.max_residual)) {
    throw FitError("fit residual " + std::to_string(full.residual) +
                       " above tolerance, model likely misses a term: " + to_string(model),
                   full.residual, full.condition);
  }

  // held-out check: refit on even points, test on odd ones
  std::vector<double> xe, ye;
  for (std::size_t i = 0; i < x.size(); i += 2) {
    xe.push_back(x[i]);
    ye.push_back(y[i]);
  }
  if (xe.size() > n) {
    CoreFit alt = fit_core(xe, ye, model);
    double dev = 0.0;
    for (std::size_t i = 1; i < x.size(); i += 2)
      dev = std::max(dev, std::abs(y[i] - eval_coeffs(alt.coeffs, x[i])));
    out.remainder_estimate = dev;
    out.constant_error = std::abs(constant_of(alt.coeffs) - constant_of(full.coeffs));
  }
  return out;
}

AsymptoticExpansion fit_expansion(const RealFunction& f, const AsymptoticModel& model,
                                  const GeometricGrid& grid, const FitOptions& opt) {
  auto x = grid.nodes();
  auto y = parallel_map(x.size(), [&](std::size_t i) { return f(x[i]); });
  return fit_expansion(x, y, model, opt);
}

RegValue reg_limit(const RealFunction& f, const AsymptoticModel& model, const GeometricGrid& grid,
                   const FitOptions& opt) {
  auto e = fit_expansion(f, model, grid, opt);
  RegValue r;
  r.value = e.regularized_limit();
  r.error_estimate = e.constant_error + 1e-15 * std::abs(r.value);
  r.diagnostics.order = static_cast<int>(model.basis_size());
  r.diagnostics.fit_residual = e.fit_residual;
  return r;
}

RegValue reg_limit(const RealFunction& f, const AsymptoticModel& model) {
  return reg_limit(f, model, default_grid(model.direction));
}

double pf_power_tail(double beta, int k, double z) {
  if (z == 0.0) return 0.0;
  if (!(z > 0.0)) throw DomainError("partie finie tail needs z >= 0");
  return -pf_power_head(beta, k, z);
}

double pf_power_head(double beta, int k, double z) {
  if (z == 0.0) return 0.0;
  if (!(z > 0.0)) throw DomainError("partie finie head needs z >= 0");
  const double lz = std::log(z);
  if (same_exponent(beta, -1.0)) return std::pow(lz, k + 1) / (k + 1);
  // antiderivative x^{b+1} sum_m (-1)^m k!/(k-m)! log^{k-m} x / (b+1)^{m+1}
  const double b1 = beta + 1.0;
  double s = 0.0, fall = 1.0;
  for (int m = 0; m <= k; ++m) {
    if (m > 0) fall *= (k - m + 1);
    s += ((m % 2) ? -1.0 : 1.0) * fall * std::pow(lz, k - m) / std::pow(b1, m + 1);
  }
  return std::pow(z, b1) * s;
}

namespace {

struct TailResult {
  double value = 0.0;
  double error = 0.0;
  double split = 0.0;
  double residual = 0.0;
  int order = 0;
};

double tail_sum(const std::vector<Coefficient>& c, double X, bool infinity) {
  double s = 0.0;
  for (const auto& t : c)
    s += t.value * (infinity ? pf_power_tail(t.exponent, t.log_power, X)
                             : pf_power_head(t.exponent, t.log_power, X));
  return s;
}

AsymptoticModel resolvable(const AsymptoticModel& model, double X) {
  if (model.terms.empty()) return model;
  AsymptoticModel m = model;
  const double a0 = model.terms.front().exponent;
  m.terms.clear();
  for (const auto& t : model.terms) {
    // relative size of the term at the split for unit coefficients
    const double rel = std::pow(X, t.exponent - a0);
    if (m.terms.empty() || rel >= 1e-15) m.terms.push_back(t);
  }
  return m;
}

// Fits the expansion on a grid beyond the split and integrates it term by term.
// The split is pushed outward until a refit on half the points agrees.
TailResult fitted_tail(const RealFunction& f, double X0, const TailOptions& to,
                       const RegIntOptions& opt, bool infinity) {
  const AsymptoticModel& model = *to.model;
  const int pts = std::max(static_cast<int>(to.octaves * to.points_per_octave) + 1,
                           static_cast<int>(4 * model.basis_size() + 2));
  double X = X0;
  TailResult best;
  double best_err = std::numeric_limits<double>::infinity();
  std::string last_error;
  for (int attempt = 0; attempt <= to.max_retries; ++attempt) {
    const double span = std::ldexp(1.0, static_cast<int>(to.octaves));
    GeometricGrid grid = infinity ? GeometricGrid::span(X, X * span, pts)
                                  : GeometricGrid::span(X / span, X, pts);
    try {
      auto xs = grid.nodes();
      auto ys = parallel_map(xs.size(), [&](std::size_t i) { return f(xs[i]); });
      // Terms far below roundoff at the split cannot be resolved; drop them,
      // and keep dropping from the end while the basis stays ill-conditioned.
      AsymptoticModel m = resolvable(model, X);
      AsymptoticExpansion full;
      for (;;) {
        try {
          full = fit_expansion(xs, ys, m, opt.fit);
          break;
        } catch (const FitError& e) {
          if (!(e.condition() > opt.fit.max_condition) || m.terms.size() <= 1) throw;
          m.terms.pop_back();
        }
      }
      std::vector<double> xe, ye;
      for (std::size_t i = 0; i < xs.size(); i += 2) {
        xe.push_back(xs[i]);
        ye.push_back(ys[i]);
      }
      FitOptions lax = opt.fit;
      lax.reject = false;
      auto alt = fit_expansion(xe, ye, m, lax);
      const double v = tail_sum(full.coefficients, X, infinity);
      const double va = tail_sum(alt.coefficients, X, infinity);
      const double err = std::abs(v - va);
      if (err < best_err) {
        best_err = err;
        best = {v, err, X, full.fit_residual, static_cast<int>(m.basis_size())};
      }
      const double target = std::max(opt.abs_tol, opt.rel_tol * std::abs(v)) * 10.0;
      if (err <= target) return best;
    } catch (const FitError& e) {
      last_error = e.what();
    }
    X = infinity ? X * 4.0 : X / 4.0;
  }
  if (!std::isfinite(best_err)) throw NumericalError("tail fit failed: " + last_error);
  return best;
}

}  // namespace

RegValue reg_int(const RealFunction& f, double a, double b, const RegIntOptions& opt) {
  if (!(a >= 0.0)) throw DomainError("reg_int needs a >= 0");
  if (a == b) return {};
  if (!(b > a)) throw DomainError("reg_int needs b > a");
  const bool inf = std::isinf(b);
  RegValue r;
  double lower = a;
  double head = 0.0, head_err = 0.0, tail_err = 0.0;
  QuadOptions q{opt.abs_tol, opt.rel_tol, 18};

  if (a == 0.0 && opt.at_zero.model && !opt.at_zero.model->empty()) {
    if (opt.at_zero.model->direction != Direction::to_zero)
      throw DomainError("model at zero must have direction to_zero");
    double X0 = opt.at_zero.split > 0.0 ? opt.at_zero.split : (inf ? 1.0 : std::min(1.0, 0.5 * b));
    auto t = fitted_tail(f, X0, opt.at_zero, opt, false);
    head = t.value;
    head_err = t.error;
    lower = t.split;
    r.diagnostics.order = t.order;
    r.diagnostics.fit_residual = t.residual;
  }

  double tail = 0.0;
  double upper = b;
  if (inf) {
    if (opt.at_infinity.model && !opt.at_infinity.model->empty()) {
      if (opt.at_infinity.model->direction != Direction::to_infinity)
        throw DomainError("model at infinity must have direction to_infinity");
      double X0 = opt.at_infinity.split > 0.0 ? std::max(opt.at_infinity.split, lower)
                                              : std::max(2.0 * lower, 1.0);
      auto t = fitted_tail(f, X0, opt.at_infinity, opt, true);
      tail = t.value;
      tail_err = t.error;
      upper = t.split;
      r.diagnostics.order = std::max(r.diagnostics.order, t.order);
      r.diagnostics.fit_residual = std::max(r.diagnostics.fit_residual, t.residual);
      r.diagnostics.split = upper;
    }
  }
  QuadResult core = integrate(f, lower, upper, q);
  r.value = head + core.value + tail;
  r.error_estimate = core.error + head_err + tail_err;
  r.diagnostics.quadrature_error = core.error;
  r.diagnostics.tail_error = head_err + tail_err;
  if (!std::isfinite(r.value)) throw NumericalError("regularized integral is not finite");
  // pieces may cancel, so measure the tolerance against their sizes
  const double size = std::abs(head) + std::abs(core.value) + std::abs(tail);
  const double target = std::max(opt.abs_tol, opt.rel_tol * size);
  if (core.error > 1e3 * target) throw NumericalError("quadrature did not converge on [" + std::to_string(lower) + ", " +
                         std::to_string(upper) + "], error " + std::to_string(core.error));
  return r;
}

RegValue reg_int(const RealFunction& f, double a, double b,
                 std::optional<AsymptoticModel> at_infinity,
                 std::optional<AsymptoticModel> at_zero) {
  RegIntOptions opt;
  opt.at_infinity.model = std::move(at_infinity);
  opt.at_zero.model = std::move(at_zero);
  return reg_int(f, a, b, opt);
}

ChangeOfVariables change_of_variables(const RealFunction& f, double scale,
                                      const AsymptoticModel& at_infinity,
                                      std::optional<AsymptoticModel> at_zero) {
  if (!(scale > 0.0)) throw DomainError("scale must be positive");
  auto check = [](const AsymptoticModel& m) {
    for (const auto& t : m.terms)
      if (same_exponent(t.exponent, -1.0) && t.max_log >= 1)
        throw DomainError("change of variables hypothesis violated: log*x^-1 term in model");
  };
  check(at_infinity);
  if (at_zero) check(*at_zero);

  ChangeOfVariables out;
  out.lhs = reg_int(f, 0.0, std::numeric_limits<double>::infinity(), at_infinity, at_zero);
  auto e_inf = fit_expansion(f, at_infinity, default_grid(Direction::to_infinity));
  out.a_inf = e_inf.a_inf();
  if (at_zero && !at_zero->empty()) {
    auto e0 = fit_expansion(f, *at_zero, default_grid(Direction::to_zero));
    out.a_zero = e0.a_zero();
  }
  RealFunction g([&f, scale](double x) { return f(scale * x); });
  auto inner = reg_int(g, 0.0, std::numeric_limits<double>::infinity(), at_infinity, at_zero);
  out.rhs.value = scale * inner.value - out.a_inf * std::log(scale) + out.a_zero * std::log(scale);
  out.rhs.error_estimate = scale * inner.error_estimate;
  out.rhs.diagnostics = inner.diagnostics;
  return out;
}

AsymptoticModel partial_sum_model(const AsymptoticModel& model, int depth) {
  std::vector<ExpansionTerm> t;
  t.push_back({0.0, 0});
  for (const auto& e : model.terms) {
    if (same_exponent(e.exponent, -1.0))
      t.push_back({0.0, e.max_log + 1});
    else
      t.push_back({e.exponent + 1.0, e.max_log});
    t.push_back({e.exponent, e.max_log});
    for (int m = 0; m < depth; ++m) t.push_back({e.exponent - 1.0 - 2.0 * m, e.max_log});
  }
  return AsymptoticModel::normalized(std::move(t), Direction::to_infinity);
}

AsymptoticModel derivative_model(const AsymptoticModel& model, int j) {
  std::vector<ExpansionTerm> t;
  for (const auto& e : model.terms) {
    // x^a with integer 0 <= a < j and no logs differentiates to zero
    const bool poly = e.max_log == 0 && e.exponent >= -kExpTol &&
                      same_exponent(e.exponent, std::round(e.exponent)) &&
                      std::round(e.exponent) < j;
    if (poly) continue;
    t.push_back({e.exponent - j, e.max_log});
  }
  return AsymptoticModel::normalized(std::move(t), Direction::to_infinity);
}

namespace {

RegValue reg_sum_direct(const RealFunction& f, int lambda0, const AsymptoticModel& model,
                        const RegSumOptions& opt) {
  auto pmodel = partial_sum_model(model, opt.model_depth);
  const int nmin = std::max(opt.n_min, lambda0);
  const int nmax = std::max(opt.n_max, 4 * nmin);
  std::vector<int> ns;
  const double ratio = std::pow(double(nmax) / nmin, 1.0 / (opt.n_points - 1));
  for (int k = 0; k < opt.n_points; ++k) {
    int n = static_cast<int>(std::lround(nmin * std::pow(ratio, k)));
    if (ns.empty() || n > ns.back()) ns.push_back(n);
  }
  auto vals = parallel_map(static_cast<std::size_t>(ns.back() - lambda0 + 1),
                           [&](std::size_t i) { return f(double(lambda0 + int(i))); });
  std::vector<double> xs, ys;
  CompensatedSum acc;
  std::size_t next = 0;
  for (int n = lambda0; n <= ns.back(); ++n) {
    acc.add(vals[static_cast<std::size_t>(n - lambda0)]);
    if (next < ns.size() && n == ns[next]) {
      xs.push_back(n);
      ys.push_back(acc.value());
      ++next;
    }
  }
  auto e = fit_expansion(xs, ys, pmodel, opt.fit);
  RegValue r;
  r.value = e.regularized_limit();
  r.error_estimate = e.constant_error + 1e-14 * (1.0 + std::abs(r.value));
  r.diagnostics.order = static_cast<int>(pmodel.basis_size());
  r.diagnostics.fit_residual = e.fit_residual;
  return r;
}

RegValue reg_sum_em(const RealFunction& f, int lambda0, const AsymptoticModel& model,
                    const RegSumOptions& opt) {
  const int L = std::max(lambda0, opt.em_start);
  CompensatedSum explicit_part;
  for (int l = lambda0; l < L; ++l) explicit_part.add(f(double(l)));

  double lead = model.terms.empty() ? -2.0 : model.terms.front().exponent;
  int M = opt.M;
  while (2.0 * M <= lead) ++M;
  if (M > opt.max_M) throw NumericalError("Euler-Maclaurin remainder diverges: M too small");

  // raise M until the remainder bound is small
  std::vector<double> d;
  double bound = 0.0;
  for (;; ++M) {
    d.assign(static_cast<std::size_t>(2 * M + 2), 0.0);
    f.derivatives(L, d);
    bound = bernoulli_sup(2 * M + 1) / boost::math::factorial<double>(2 * M + 1) *
            std::abs(d[2 * M]);
    if (bound <= opt.tol || M >= opt.max_M) break;
  }

  RegValue r;
  RegIntOptions ro;
  ro.at_infinity.model = model;
  ro.at_infinity.split = L;
  auto integral = reg_int(f, L, std::numeric_limits<double>::infinity(), ro);

  CompensatedSum s;
  s.add(explicit_part.value());
  s.add(integral.value);
  s.add(0.5 * d[0]);
  double err = integral.error_estimate + bound;

  auto lim_of = [&](int j) -> double {
    auto dm = derivative_model(model, j);
    if (dm.empty()) return 0.0;
    // LIM of f^(j) is the x^0 coefficient of its expansion
    bool has_const = false;
    for (const auto& t : dm.terms)
      if (same_exponent(t.exponent, 0.0)) has_const = true;
    if (!has_const) return 0.0;
    RealFunction dj([&f, j](double x) {
      std::vector<double> v(static_cast<std::size_t>(j + 1));
      f.derivatives(x, v);
      return v[static_cast<std::size_t>(j)];
    });
    auto lv = reg_limit(dj, dm, GeometricGrid::span(std::max(16.0, 2.0 * L), 1048576.0, 49),
                        opt.fit);
    err += lv.error_estimate;
    return lv.value;
  };
  s.add(0.5 * lim_of(0));
  for (int k = 1; k <= M; ++k) {
    const double c = bernoulli(2 * k) / boost::math::factorial<double>(2 * k);
    s.add(c * (lim_of(2 * k - 1) - d[static_cast<std::size_t>(2 * k - 1)]));
  }

  // remainder integral over [L, L+J] by Gauss-Legendre per unit cell, bound beyond
  if (f.has_derivatives()) {
    const int J = 32;
    const int p = 2 * M + 1;
    const double pref = 1.0 / boost::math::factorial<double>(p);
    CompensatedSum rem;
    std::vector<double> v(static_cast<std::size_t>(p + 1));
    for (int j = 0; j < J; ++j) {
      auto g = [&](double x) {
        f.derivatives(x, v);
        return bernoulli(p, x) * v[static_cast<std::size_t>(p)];
      };
      rem.add(pref * gauss_legendre(g, L + j, L + j + 1, 20));
    }
    s.add(rem.value());
    std::vector<double> w(static_cast<std::size_t>(2 * M + 1));
    f.derivatives(L + J, w);
    err = err - bound + bernoulli_sup(p) * pref * std::abs(w[static_cast<std::size_t>(2 * M)]);
  }
  r.value = s.value();
  r.error_estimate = err + 1e-13 * (1.0 + std::abs(r.value));
  r.diagnostics.order = M;
  r.diagnostics.fit_residual = integral.diagnostics.fit_residual;
  return r;
}

}  // namespace

RegValue reg_sum(const RealFunction& f, int lambda0, const AsymptoticModel& model,
                 const RegSumOptions& opt) {
  if (lambda0 < 1) throw DomainError("regularized sum starts at lambda0 >= 1");
  model.validate();
  if (model.direction != Direction::to_infinity)
    throw DomainError("regularized sum needs a model at infinity");
  RegValue r = opt.method == SumMethod::direct ? reg_sum_direct(f, lambda0, model, opt)
                                                : reg_sum_em(f, lambda0, model, opt);
  if (!std::isfinite(r.value)) throw NumericalError("regularized sum is not finite");
  return r;
}

RegValue reg_sum_bilateral(const RealFunction& f, const AsymptoticModel& model_pos,
                           const AsymptoticModel& model_neg, const RegSumOptions& opt) {
  RealFunction neg = f.has_derivatives()
                         ? RealFunction([&f](double x) { return f(-x); },
                                        [&f](double x, std::span<double> out) {
                                          f.derivatives(-x, out);
                                          for (std::size_t k = 1; k < out.size(); k += 2)
                                            out[k] = -out[k];
                                        })
                         : RealFunction([&f](double x) { return f(-x); });
  auto p = reg_sum(f, 1, model_pos, opt);
  auto n = reg_sum(neg, 1, model_neg, opt);
  RegValue r;
  r.value = f(0.0) + p.value + n.value;
  r.error_estimate = p.error_estimate + n.error_estimate;
  r.diagnostics = p.diagnostics;
  return r;
}

RegValue reg_sum_bilateral(const RealFunction& f, const AsymptoticModel& model,
                           const RegSumOptions& opt) {
  return reg_sum_bilateral(f, model, model, opt);
}

std::string to_string(const AsymptoticModel& m) {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < m.terms.size(); ++i) {
    if (i) os << ", ";
    os << m.terms[i].exponent;
    if (m.terms[i].max_log) os << " log^" << m.terms[i].max_log;
  }
  os << (m.direction == Direction::to_infinity ? "} at infinity" : "} at zero");
  return os.str();
}

}  // namespace zetasum
