#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace zetasum {

// Chebyshev series on [a, b] built from values at the Chebyshev-Lobatto points.
class Chebyshev {
 public:
  Chebyshev() = default;
  Chebyshev(std::vector<double> coeffs, double a, double b);

  // Lobatto points cos(pi k/(n-1)) mapped to [a, b], listed from b down to a.
  static std::vector<double> lobatto_nodes(double a, double b, int n);
  static Chebyshev from_values(std::span<const double> values, double a, double b);
  static Chebyshev interpolate(const std::function<double(double)>& f, double a, double b, int n);

  double operator()(double x) const;
  Chebyshev derivative() const;
  // Taylor coefficients f^(k)(x0)/k!, k = 0..count-1.
  std::vector<double> taylor(double x0, int count) const;
  // Magnitude of the last few coefficients, a cheap interpolation error proxy.
  double tail_magnitude() const;

  const std::vector<double>& coeffs() const { return c_; }
  double lower() const { return a_; }
  double upper() const { return b_; }

 private:
  std::vector<double> c_;
  double a_ = -1.0;
  double b_ = 1.0;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
};

struct QuadOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_depth = 18;
};

// Adaptive Gauss-Kronrod on [a, b]; b may be +infinity.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     const QuadOptions& opt = {});

// Fixed Gauss-Legendre rule on [a, b].
double gauss_legendre(const std::function<double(double)>& f, double a, double b, int n);

// Bernoulli number B_n (B_1 = -1/2), n <= 64.
double bernoulli(int n);
// Periodic Bernoulli function B_n(x - floor x).
double bernoulli(int n, double x);
// sup over [0,1] of |B_n(x)|, the constant used in remainder bounds.
double bernoulli_sup(int n);

// Neumaier summation in the given order.
class CompensatedSum {
 public:
  void add(double v);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Worker count from ZETASUM_THREADS, defaulting to hardware concurrency.
int thread_count();

// Evaluates fn(i) for i in [0, n) and returns the results in index order.
std::vector<double> parallel_map(std::size_t n, const std::function<double(std::size_t)>& fn);

// Same, for callables that fill a vector per index.
std::vector<std::vector<double>> parallel_map_vec(
    std::size_t n, const std::function<std::vector<double>(std::size_t)>& fn);

}  // namespace zetasum
