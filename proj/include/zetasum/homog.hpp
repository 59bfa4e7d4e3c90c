#pragma once

#include <functional>
#include <vector>

#include "zetasum/numerics.hpp"
#include "zetasum/regcal.hpp"

namespace zetasum {

// f(tx, ty) = t^degree f(x, y) on the closed quarter plane minus the origin.
// Internally f = r^degree g(phi) with (x, y) = r (cos phi, sin phi); the
// angular profile g is a Chebyshev interpolant on [0, pi/2].
class HomogeneousFunction {
 public:
  using Eval2 = std::function<double(double, double)>;

  HomogeneousFunction() = default;
  HomogeneousFunction(double degree, Eval2 f, int profile_nodes = 65);
  static HomogeneousFunction from_profile(double degree, Chebyshev g);

  double degree() const { return degree_; }
  double operator()(double x, double y) const { return f_(x, y); }
  double profile(double phi) const { return g_(phi); }
  const Chebyshev& profile_interpolant() const { return g_; }

  // d^k/dy^k f as a homogeneous function of degree - k, from the profile.
  HomogeneousFunction d2(int k) const;

  // Taylor coefficients of x -> f(x,1) and y -> f(1,y) at 0.
  const std::vector<double>& c() const { return c_; }
  const std::vector<double>& d() const { return d_; }
  // c_j, d_j at a real index; 0 unless the index is an available nonnegative integer.
  double c_at(double j) const;
  double d_at(double j) const;

  // max relative |f(tx,ty) - t^a f(x,y)| over t in {0.5, 2, 10} on a small grid.
  double homogeneity_error() const;

 private:
  double degree_ = 0.0;
  Eval2 f_;
  Chebyshev g_;
  std::vector<double> c_, d_;
  void init_edges();
};

enum class Edge { c, d };

// First `count` Taylor coefficients at the edge, throws NumericalError if the
// slice is not resolved by the interpolant.
std::vector<double> edge_coeffs(const HomogeneousFunction& f, Edge edge, int count);

struct QuarterPlaneFunction {
  std::vector<HomogeneousFunction> components;  // strictly decreasing degrees
  std::function<double(double, double)> remainder;
  double decay = 1.0;

  double operator()(double x, double y) const;
  // Component of the given degree or nullptr.
  const HomogeneousFunction* component(double degree) const;
  void validate() const;
};

enum class DoubleIntMethod { closed, nested };
// dy_dx: inner integral over y in [b, inf), outer over x in [a, inf).
enum class IntegrationOrder { dy_dx, dx_dy };

RegValue hom_double_integral(const HomogeneousFunction& f, double a, double b,
                             DoubleIntMethod method,
                             IntegrationOrder order = IntegrationOrder::dy_dx);

// int_0^inf f(x,1) log x dx for a degree -2 function (ordinary integral).
RegValue fubini_int_correction(const HomogeneousFunction& f);
RegValue fubini_int_correction(const HomogeneousFunction* f);

// Sign s in  iint dy dx = iint dx dy + s * int_0^inf f_{-2}(x,1) log x dx,
// measured once on the probe x (x^2+y^2)^{-3/2}.
int fubini_log_sign();

struct FubiniCorrections {
  double log_term = 0.0;
  double half_term = 0.0;
  std::vector<double> bernoulli_terms;  // k = 1..M
  double total = 0.0;
  double error_estimate = 0.0;
  // max |analytic - central difference| over the d/dy derivatives used
  double derivative_check = 0.0;
};

// Correction terms of the regularized sum/integral exchange in the summed
// variable y. log_sign defaults to fubini_log_sign().
FubiniCorrections fubini_sum_corrections(const QuarterPlaneFunction& f, int M, int log_sign = 0);

struct LimitExchange {
  double lhs = 0.0;
  double rhs = 0.0;
  double corr = 0.0;
  // d/dy of the x integral vs the x integral of df/dy at y = 1.5
  double deriv_lhs = 0.0;
  double deriv_rhs = 0.0;
};

LimitExchange limit_exchange(const HomogeneousFunction& f, double a);

// LIM z^{a+2} pf-int_{b/z}^inf f(1,y) dy as z -> inf or z -> 0 (a = degree).
RegValue scaled_tail_limit(const HomogeneousFunction& f, double b, Direction d);

}  // namespace zetasum
