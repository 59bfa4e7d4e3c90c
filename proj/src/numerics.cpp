#include "zetasum/numerics.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/bernoulli.hpp>
#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/special_functions/factorials.hpp>
#include <boost/math/special_functions/zeta.hpp>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <string>
#include <thread>

#include "zetasum/errors.hpp"

namespace zetasum {

Chebyshev::Chebyshev(std::vector<double> coeffs, double a, double b)
    : c_(std::move(coeffs)), a_(a), b_(b) {}

std::vector<double> Chebyshev::lobatto_nodes(double a, double b, int n) {
  if (n < 2) throw DomainError("Chebyshev interpolation needs at least two nodes");
  std::vector<double> x(n);
  for (int k = 0; k < n; ++k) {
    double t = std::cos(std::numbers::pi * k / (n - 1));
    x[k] = 0.5 * (a + b) + 0.5 * (b - a) * t;
  }
  return x;
}

Chebyshev Chebyshev::from_values(std::span<const double> f, double a, double b) {
  const int n = static_cast<int>(f.size());
  if (n < 2) throw DomainError("Chebyshev interpolation needs at least two nodes");
  const int m = n - 1;
  std::vector<double> c(n, 0.0);
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int k = 0; k < n; ++k) {
      double w = (k == 0 || k == m) ? 0.5 : 1.0;
      s += w * f[k] * std::cos(std::numbers::pi * double(j) * k / m);
    }
    c[j] = 2.0 * s / m;
  }
  c[0] *= 0.5;
  c[m] *= 0.5;
  return Chebyshev(std::move(c), a, b);
}

Chebyshev Chebyshev::interpolate(const std::function<double(double)>& f, double a, double b,
                                 int n) {
  auto x = lobatto_nodes(a, b, n);
  std::vector<double> v(n);
  for (int k = 0; k < n; ++k) v[k] = f(x[k]);
  return from_values(v, a, b);
}

double Chebyshev::operator()(double x) const {
  const double t = (2.0 * x - a_ - b_) / (b_ - a_);
  double b1 = 0.0, b2 = 0.0;
  for (int j = static_cast<int>(c_.size()) - 1; j >= 1; --j) {
    double tmp = 2.0 * t * b1 - b2 + c_[j];
    b2 = b1;
    b1 = tmp;
  }
  return t * b1 - b2 + (c_.empty() ? 0.0 : c_[0]);
}

Chebyshev Chebyshev::derivative() const {
  const int n = static_cast<int>(c_.size());
  if (n <= 1) return Chebyshev(std::vector<double>{0.0}, a_, b_);
  std::vector<double> d(n, 0.0);
  // d_{j-1} = d_{j+1} + 2 j c_j
  for (int j = n - 1; j >= 1; --j) {
    double next = (j + 1 < n) ? d[j + 1] : 0.0;
    d[j - 1] = next + 2.0 * j * c_[j];
  }
  d[0] *= 0.5;
  d.pop_back();
  const double scale = 2.0 / (b_ - a_);
  for (auto& v : d) v *= scale;
  return Chebyshev(std::move(d), a_, b_);
}

std::vector<double> Chebyshev::taylor(double x0, int count) const {
  std::vector<double> out(count);
  Chebyshev cur = *this;
  double fact = 1.0;
  for (int k = 0; k < count; ++k) {
    if (k > 0) fact *= k;
    out[k] = cur(x0) / fact;
    cur = cur.derivative();
  }
  return out;
}

double Chebyshev::tail_magnitude() const {
  const int n = static_cast<int>(c_.size());
  double m = 0.0;
  for (int j = std::max(0, n - 3); j < n; ++j) m = std::max(m, std::abs(c_[j]));
  return m;
}

QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     const QuadOptions& opt) {
  if (a == b) return {};
  double err = 0.0, l1 = 0.0;
  double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, a, b, static_cast<unsigned>(opt.max_depth), opt.rel_tol, &err, &l1);
  const double target = std::max(opt.abs_tol, opt.rel_tol * l1);
  if (std::isfinite(b) && !(err <= target)) {
    // endpoint singularities (log, x^-1/2) defeat bisection; tanh-sinh copes
    boost::math::quadrature::tanh_sinh<double> ts;
    double e2 = 0.0, l2 = 0.0;
    const double v2 = ts.integrate(f, a, b, opt.rel_tol, &e2, &l2);
    if (std::isfinite(v2) && e2 < err) {
      v = v2;
      err = e2;
    }
  }
  if (!std::isfinite(v) || !std::isfinite(err))
    throw NumericalError("quadrature produced a non-finite value");
  return {v, err};
}

double gauss_legendre(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = 0.5 * (b - a), c = 0.5 * (a + b);
  auto g = [&](double t) { return f(c + h * t); };
  switch (n) {
    case 10: return h * boost::math::quadrature::gauss<double, 10>::integrate(g, -1.0, 1.0);
    case 20: return h * boost::math::quadrature::gauss<double, 20>::integrate(g, -1.0, 1.0);
    case 30: return h * boost::math::quadrature::gauss<double, 30>::integrate(g, -1.0, 1.0);
    default: throw DomainError("unsupported Gauss-Legendre order " + std::to_string(n));
  }
}

double bernoulli(int n) {
  if (n < 0 || n > 64) throw DomainError("Bernoulli index out of range: " + std::to_string(n));
  if (n == 0) return 1.0;
  if (n == 1) return -0.5;
  if (n % 2 == 1) return 0.0;
  return boost::math::bernoulli_b2n<double>(n / 2);
}

double bernoulli(int n, double x) {
  if (n < 0 || n > 64) throw DomainError("Bernoulli index out of range: " + std::to_string(n));
  const double t = x - std::floor(x);
  if (n <= 16) {
    // Horner on sum_k C(n,k) B_k t^{n-k}
    double s = 0.0;
    for (int k = 0; k <= n; ++k) {
      s = s * t + boost::math::binomial_coefficient<double>(n, k) * bernoulli(k);
    }
    return s;
  }
  // Fourier series, converges like k^-n.
  const double pref = -2.0 * boost::math::factorial<double>(n) /
                      std::pow(2.0 * std::numbers::pi, n);
  double s = 0.0;
  for (int k = 1; k <= 60; ++k) {
    s += std::cos(2.0 * std::numbers::pi * k * t - n * std::numbers::pi / 2) / std::pow(k, n);
  }
  return pref * s;
}

double bernoulli_sup(int n) {
  if (n == 0) return 1.0;
  if (n == 1) return 0.5;
  return 2.0 * boost::math::factorial<double>(n) * boost::math::zeta<double>(n) /
         std::pow(2.0 * std::numbers::pi, n);
}

void CompensatedSum::add(double v) {
  double t = sum_ + v;
  if (std::abs(sum_) >= std::abs(v))
    comp_ += (sum_ - t) + v;
  else
    comp_ += (v - t) + sum_;
  sum_ = t;
}

int thread_count() {
  if (const char* env = std::getenv("ZETASUM_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace {

// nested parallel maps run serially inside a worker
thread_local bool in_worker = false;

template <class T>
std::vector<T> run_parallel(std::size_t n, const std::function<T(std::size_t)>& fn) {
  std::vector<T> out(n);
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(thread_count()), n);
  if (workers <= 1 || in_worker) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      in_worker = true;
      // static interleaved assignment keeps the schedule independent of timing
      for (std::size_t i = w; i < n; i += workers) {
        try {
          out[i] = fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace

std::vector<double> parallel_map(std::size_t n, const std::function<double(std::size_t)>& fn) {
  return run_parallel<double>(n, fn);
}

std::vector<std::vector<double>> parallel_map_vec(
    std::size_t n, const std::function<std::vector<double>(std::size_t)>& fn) {
  return run_parallel<std::vector<double>>(n, fn);
}

}  // namespace zetasum
