#include "zetasum/homog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "zetasum/errors.hpp"

namespace zetasum {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2;
constexpr int kEdgeCount = 12;
constexpr int kTailTerms = 10;

bool is_nonneg_int(double v) { return v > -0.5 && std::abs(v - std::round(v)) < 1e-12; }

AsymptoticModel with_constant(std::vector<ExpansionTerm> t, Direction d) {
  bool has0 = false;
  for (const auto& e : t) has0 = has0 || std::abs(e.exponent) < 1e-12;
  if (!has0) t.push_back({0.0, 0});
  return AsymptoticModel::normalized(std::move(t), d);
}

std::vector<double> slice_taylor(const std::function<double(double)>& s, int count) {
  auto ch = Chebyshev::interpolate(s, 0.0, 0.5, 41);
  double scale = 0.0;
  for (double c : ch.coeffs()) scale = std::max(scale, std::abs(c));
  if (!(ch.tail_magnitude() <= 1e-10 * std::max(scale, 1e-300)))
    throw NumericalError("edge slice is not resolved by its interpolant");
  return ch.taylor(0.0, count);
}

// pf-int_{from}^inf of a slice whose expansion at infinity is x^alpha, x^{alpha-1}, ...
RegValue slice_integral(const std::function<double(double)>& g, double from, double alpha,
                        double split = 0.0) {
  RegIntOptions o;
  o.at_infinity.model = AsymptoticModel::powers(alpha, kTailTerms);
  o.at_infinity.split = split > 0.0 ? split : 8.0 * std::max(from, 1.0);
  o.rel_tol = 1e-12;
  o.abs_tol = 1e-14;
  return reg_int(g, from, std::numeric_limits<double>::infinity(), o);
}

}  // namespace

HomogeneousFunction::HomogeneousFunction(double degree, Eval2 f, int profile_nodes)
    : degree_(degree), f_(std::move(f)) {
  if (!f_) throw DomainError("homogeneous function needs an evaluator");
  g_ = Chebyshev::interpolate([this](double phi) { return f_(std::cos(phi), std::sin(phi)); }, 0.0,
                              kHalfPi, profile_nodes);
  init_edges();
}

HomogeneousFunction HomogeneousFunction::from_profile(double degree, Chebyshev g) {
  HomogeneousFunction h;
  h.degree_ = degree;
  h.g_ = std::move(g);
  const Chebyshev prof = h.g_;
  h.f_ = [degree, prof](double x, double y) {
    return std::pow(std::hypot(x, y), degree) * prof(std::atan2(y, x));
  };
  h.init_edges();
  return h;
}

void HomogeneousFunction::init_edges() {
  c_ = slice_taylor([this](double x) { return f_(x, 1.0); }, kEdgeCount);
  d_ = slice_taylor([this](double y) { return f_(1.0, y); }, kEdgeCount);
}

double HomogeneousFunction::c_at(double j) const {
  if (!is_nonneg_int(j)) return 0.0;
  const auto k = static_cast<std::size_t>(std::lround(j));
  return k < c_.size() ? c_[k] : 0.0;
}

double HomogeneousFunction::d_at(double j) const {
  if (!is_nonneg_int(j)) return 0.0;
  const auto k = static_cast<std::size_t>(std::lround(j));
  return k < d_.size() ? d_[k] : 0.0;
}

HomogeneousFunction HomogeneousFunction::d2(int k) const {
  if (k < 0) throw DomainError("derivative order must be nonnegative");
  // d/dy [r^b h(phi)] = r^{b-1} (b sin(phi) h + cos(phi) h')
  Chebyshev h = g_;
  const int n = static_cast<int>(g_.coeffs().size());
  for (int j = 0; j < k; ++j) {
    const Chebyshev dh = h.derivative();
    const double b = degree_ - j;
    h = Chebyshev::interpolate(
        [&](double phi) { return b * std::sin(phi) * h(phi) + std::cos(phi) * dh(phi); }, 0.0,
        kHalfPi, n);
  }
  return from_profile(degree_ - k, h);
}

double HomogeneousFunction::homogeneity_error() const {
  const double pts[][2] = {{1.0, 0.5}, {0.3, 1.0}, {1.0, 1.0}, {2.0, 0.7}, {1.0, 0.0}, {0.0, 1.0}};
  double worst = 0.0;
  for (const auto& p : pts) {
    const double base = f_(p[0], p[1]);
    for (double t : {0.5, 2.0, 10.0}) {
      const double v = f_(t * p[0], t * p[1]);
      const double ref = std::pow(t, degree_) * base;
      worst = std::max(worst, std::abs(v - ref) / std::max(std::abs(ref), 1e-300));
    }
  }
  return worst;
}

std::vector<double> edge_coeffs(const HomogeneousFunction& f, Edge edge, int count) {
  if (count < 1) throw DomainError("edge coefficient count must be >= 1");
  if (edge == Edge::c) return slice_taylor([&](double x) { return f(x, 1.0); }, count);
  return slice_taylor([&](double y) { return f(1.0, y); }, count);
}

double QuarterPlaneFunction::operator()(double x, double y) const {
  double s = remainder ? remainder(x, y) : 0.0;
  for (const auto& c : components) s += c(x, y);
  return s;
}

const HomogeneousFunction* QuarterPlaneFunction::component(double degree) const {
  for (const auto& c : components)
    if (std::abs(c.degree() - degree) < 1e-12) return &c;
  return nullptr;
}

void QuarterPlaneFunction::validate() const {
  for (std::size_t i = 1; i < components.size(); ++i)
    if (!(components[i].degree() < components[i - 1].degree()))
      throw DomainError("components must have strictly decreasing degrees");
  if (!(decay > 0.0)) throw DomainError("remainder decay must be positive");
}

namespace {

RegValue closed_double_integral(const HomogeneousFunction& f, double a, double b) {
  const double al = f.degree();
  RegValue r;
  auto add = [&](double v, double e) {
    r.value += v;
    r.error_estimate += e;
  };
  // P1 = pf-int_{b/a}^inf f(1,y) dy, P2 = pf-int_{a/b}^inf f(x,1) dx
  auto P1 = [&] { return slice_integral([&](double y) { return f(1.0, y); }, b / a, al); };
  auto P2 = [&] { return slice_integral([&](double x) { return f(x, 1.0); }, a / b, al); };
  if (std::abs(al + 2.0) > 1e-12) {
    if (a > 0.0) {
      auto p = P1();
      const double k = -std::pow(a, al + 2.0) / (al + 2.0);
      add(k * p.value, std::abs(k) * p.error_estimate);
    }
    if (b > 0.0) {
      auto p = P2();
      const double k = -std::pow(b, al + 2.0) / (al + 2.0);
      add(k * p.value, std::abs(k) * p.error_estimate);
    }
    add(-f.c_at(al + 1.0) * pf_power_tail(al + 1.0, 1, a), 0.0);
    add(-f.d_at(al + 1.0) * pf_power_tail(al + 1.0, 1, b), 0.0);
  } else {
    if (a > 0.0) {
      auto p = P1();
      add(-std::log(a) * p.value, std::abs(std::log(a)) * p.error_estimate);
    }
    if (b > 0.0) {
      auto p = P2();
      add(-std::log(b) * p.value, std::abs(std::log(b)) * p.error_estimate);
      auto q = reg_int([&](double x) { return f(x, 1.0) * std::log(x); }, a / b,
                       std::numeric_limits<double>::infinity(), [&] {
                         RegIntOptions o;
                         std::vector<ExpansionTerm> t;
                         for (int j = 0; j < kTailTerms; ++j) t.push_back({al - j, 1});
                         o.at_infinity.model = AsymptoticModel(t);
                         o.at_infinity.split = 8.0 * std::max(a / b, 1.0);
                         return o;
                       }());
      add(-q.value, q.error_estimate);
    }
  }
  return r;
}

// pf-int_a^inf pf-int_b^inf F(x,y) dy dx for a homogeneous F of degree al.
RegValue nested_double_integral(const std::function<double(double, double)>& F, double al,
                                double a, double b) {
  auto inner = [&](double x) {
    RegIntOptions o;
    o.at_infinity.model = AsymptoticModel::powers(al, kTailTerms);
    o.at_infinity.split = 32.0 * std::max({x, b, 1.0});
    // the outer tail fit amplifies noise in these values
    o.rel_tol = 1e-12;
    o.abs_tol = 1e-15;
    return reg_int([&](double y) { return F(x, y); }, b, std::numeric_limits<double>::infinity(), o)
        .value;
  };
  std::vector<ExpansionTerm> t{{al + 1.0, is_nonneg_int(al + 1.0) ? 1 : 0}};
  if (b > 0.0)
    for (int j = 0; j < kTailTerms; ++j) t.push_back({al - j, 0});
  RegIntOptions o;
  o.at_infinity.model = AsymptoticModel::normalized(t, Direction::to_infinity);
  o.at_infinity.split = 16.0 * std::max({a, b, 1.0});
  o.rel_tol = 1e-9;
  return reg_int(inner, a, std::numeric_limits<double>::infinity(), o);
}

}  // namespace

RegValue hom_double_integral(const HomogeneousFunction& f, double a, double b,
                             DoubleIntMethod method, IntegrationOrder order) {
  if (!(a >= 0.0 && b >= 0.0)) throw DomainError("double integral needs a, b >= 0");
  if (a == 0.0 && b == 0.0) return {};
  if (order == IntegrationOrder::dx_dy) {
    if (method == DoubleIntMethod::nested)
      return nested_double_integral([&](double y, double x) { return f(x, y); }, f.degree(), b, a);
    HomogeneousFunction swapped(f.degree(), [&f](double x, double y) { return f(y, x); });
    return closed_double_integral(swapped, b, a);
  }
  if (method == DoubleIntMethod::nested)
    return nested_double_integral([&](double x, double y) { return f(x, y); }, f.degree(), a, b);
  return closed_double_integral(f, a, b);
}

RegValue fubini_int_correction(const HomogeneousFunction* f) {
  if (!f) return {};
  return fubini_int_correction(*f);
}

RegValue fubini_int_correction(const HomogeneousFunction& f) {
  if (std::abs(f.degree() + 2.0) > 1e-12) throw DomainError("log correction needs degree -2");
  RegIntOptions o;
  std::vector<ExpansionTerm> t;
  for (int j = 0; j < kTailTerms; ++j) t.push_back({-2.0 - j, 1});
  o.at_infinity.model = AsymptoticModel(t);
  o.at_infinity.split = 8.0;
  // the log singularity at 0 is integrable; split it off for the quadrature
  auto g = [&](double x) { return f(x, 1.0) * std::log(x); };
  auto head = integrate(g, 0.0, 1.0);
  auto tail = reg_int(g, 1.0, std::numeric_limits<double>::infinity(), o);
  RegValue r;
  r.value = head.value + tail.value;
  r.error_estimate = head.error + tail.error_estimate;
  return r;
}

int fubini_log_sign() {
  static const int sign = [] {
    HomogeneousFunction probe(-2.0, [](double x, double y) {
      return x * std::pow(x * x + y * y, -1.5);
    });
    const double d = hom_double_integral(probe, 1.0, 1.0, DoubleIntMethod::nested,
                                         IntegrationOrder::dy_dx)
                         .value -
                     hom_double_integral(probe, 1.0, 1.0, DoubleIntMethod::nested,
                                         IntegrationOrder::dx_dy)
                         .value;
    const double c = fubini_int_correction(probe).value;
    const double s = d / c;
    if (!(std::abs(std::abs(s) - 1.0) < 1e-4))
      throw NumericalError("probe correction ratio " + std::to_string(s) + " is not +-1");
    return s > 0.0 ? 1 : -1;
  }();
  return sign;
}

FubiniCorrections fubini_sum_corrections(const QuarterPlaneFunction& f, int M, int log_sign) {
  f.validate();
  if (M < 1) throw DomainError("Euler-Maclaurin order must be >= 1");
  const int s = log_sign != 0 ? (log_sign > 0 ? 1 : -1) : fubini_log_sign();
  FubiniCorrections out;
  if (const auto* f2 = f.component(-2.0)) {
    auto v = fubini_int_correction(*f2);
    out.log_term = s * v.value;
    out.error_estimate += v.error_estimate;
  }
  if (const auto* f1 = f.component(-1.0)) {
    auto v = slice_integral([&](double x) { return (*f1)(x, 1.0); }, 0.0, -1.0);
    out.half_term = -0.5 * v.value;
    out.error_estimate += 0.5 * v.error_estimate;
  }
  double fact = 1.0;
  for (int k = 1; k <= M; ++k) {
    fact *= (2.0 * k - 1.0) * (2.0 * k);
    double term = 0.0;
    if (const auto* fk = f.component(2.0 * k - 2.0)) {
      const int j = 2 * k - 1;
      const HomogeneousFunction dj = fk->d2(j);
      const HomogeneousFunction dlow = fk->d2(j - 1);
      for (double x : {0.5, 1.0, 2.0}) {
        const double h = 1e-4;
        const double fd = (dlow(x, 1.0 + h) - dlow(x, 1.0 - h)) / (2.0 * h);
        const double an = dj(x, 1.0);
        out.derivative_check =
            std::max(out.derivative_check, std::abs(fd - an) / std::max(1.0, std::abs(an)));
      }
      auto v = slice_integral([&](double x) { return dj(x, 1.0); }, 0.0, -1.0);
      const double w = bernoulli(2 * k) / fact;
      term = -w * v.value;
      out.error_estimate += std::abs(w) * v.error_estimate;
    }
    out.bernoulli_terms.push_back(term);
  }
  out.total = out.log_term + out.half_term;
  for (double t : out.bernoulli_terms) out.total += t;
  return out;
}

LimitExchange limit_exchange(const HomogeneousFunction& f, double a) {
  if (!(a >= 0.0)) throw DomainError("limit_exchange needs a >= 0");
  const double al = f.degree();
  LimitExchange out;
  auto g = [&](double y) {
    return slice_integral([&](double x) { return f(x, y); }, a, al, 32.0 * std::max({a, y, 1.0}))
        .value;
  };
  std::vector<ExpansionTerm> t{{al + 1.0, is_nonneg_int(al + 1.0) ? 1 : 0}};
  for (int j = 0; j < kTailTerms; ++j) t.push_back({al - j, 0});
  auto model = with_constant(t, Direction::to_infinity);
  const double y0 = 8.0 * std::max(a, 1.0);
  out.lhs = reg_limit(g, model, GeometricGrid::span(y0, y0 * 1024.0, 41)).value;
  out.corr = std::abs(al + 1.0) < 1e-12
                 ? slice_integral([&](double x) { return f(x, 1.0); }, 0.0, al).value
                 : 0.0;
  // LIM_y f(x,y) = c_al x^al, nonzero only for integer al >= 0
  out.rhs = f.c_at(al) * pf_power_tail(al, 0, a) + out.corr;

  const double y = 1.5, h = 1e-2;
  out.deriv_lhs = (-g(y + 2 * h) + 8 * g(y + h) - 8 * g(y - h) + g(y - 2 * h)) / (12 * h);
  const HomogeneousFunction df = f.d2(1);
  out.deriv_rhs = slice_integral([&](double x) { return df(x, y); }, a, al - 1.0,
                                 8.0 * std::max({a, y, 1.0}))
                      .value;
  return out;
}

RegValue scaled_tail_limit(const HomogeneousFunction& f, double b, Direction d) {
  if (!(b > 0.0)) throw DomainError("scaled_tail_limit needs b > 0");
  const double al = f.degree();
  const bool critical = std::abs(al + 2.0) < 1e-12;
  auto G = [&](double z) {
    const double pre = critical ? std::log(z) : std::pow(z, al + 2.0);
    return pre * slice_integral([&](double y) { return f(1.0, y); }, b / z, al).value;
  };
  std::vector<ExpansionTerm> t;
  GeometricGrid grid;
  if (d == Direction::to_infinity) {
    for (int m = 0; m < kTailTerms; ++m)
      t.push_back({(critical ? 0.0 : al + 2.0) - m, critical ? 1 : 0});
    grid = GeometricGrid::span(8.0 * b, 8.0 * b * 1024.0, 41);
  } else {
    for (int m = 1; m <= kTailTerms; ++m) t.push_back({static_cast<double>(m), critical ? 1 : 0});
    if (!critical) t.push_back({al + 2.0, 1});
    grid = GeometricGrid::span(b / 8.0 / 1024.0, b / 8.0, 41);
  }
  return reg_limit(G, with_constant(t, d), grid);
}

}  // namespace zetasum
