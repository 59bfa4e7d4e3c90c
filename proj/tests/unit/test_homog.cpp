#include <doctest.h>

#include <cmath>
#include <numbers>

#include "zetasum/errors.hpp"
#include "zetasum/homog.hpp"

using namespace zetasum;
using doctest::Approx;

namespace {
const double pi = std::numbers::pi;
const double catalan = 0.915965594177219015;

HomogeneousFunction inv_r2() {
  return HomogeneousFunction(-2.0, [](double x, double y) { return 1.0 / (x * x + y * y); });
}
}  // namespace

TEST_SUITE("homog") {
  TEST_CASE("degree tag and homogeneity") {
    HomogeneousFunction f(-1.5, [](double x, double y) {
      return std::pow(x * x + x * y + 2 * y * y, -0.75);
    });
    CHECK(f.degree() == -1.5);
    CHECK(f.homogeneity_error() < 1e-9);
    // the profile reproduces the function
    const double r = std::hypot(0.3, 0.7), phi = std::atan2(0.7, 0.3);
    CHECK(std::pow(r, -1.5) * f.profile(phi) == Approx(f(0.3, 0.7)).epsilon(1e-10));
    // a wrong tag is detected
    HomogeneousFunction g(-1.0, [](double x, double y) { return 1.0 / (x * x + y * y); });
    CHECK(g.homogeneity_error() > 0.1);
  }

  TEST_CASE("edge Taylor coefficients") {
    const auto c = edge_coeffs(inv_r2(), Edge::c, 3);
    CHECK(c[0] == Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(c[1]) < 1e-9);
    CHECK(c[2] == Approx(-1.0).epsilon(1e-8));
    // x (x^2+y^2)^-3/2: f(x,1) = x - 3/2 x^3 + ..., f(1,y) = 1 - 3/2 y^2
    HomogeneousFunction h(-2.0, [](double x, double y) { return x * std::pow(x * x + y * y, -1.5); });
    const auto hc = edge_coeffs(h, Edge::c, 4);
    CHECK(std::abs(hc[0]) < 1e-10);
    CHECK(hc[1] == Approx(1.0).epsilon(1e-9));
    CHECK(hc[3] == Approx(-1.5).epsilon(1e-5));
    const auto hd = edge_coeffs(h, Edge::d, 3);
    CHECK(hd[0] == Approx(1.0).epsilon(1e-10));
    CHECK(hd[2] == Approx(-1.5).epsilon(1e-7));
  }

  TEST_CASE("d/dy derivatives from the profile") {
    HomogeneousFunction f(-1.0, [](double x, double y) { return 1.0 / std::hypot(x, y); });
    const auto d1 = f.d2(1);
    CHECK(d1.degree() == -2.0);
    // d/dy (x^2+y^2)^-1/2 = -y (x^2+y^2)^-3/2
    CHECK(d1(0.7, 1.3) == Approx(-1.3 * std::pow(0.49 + 1.69, -1.5)).epsilon(1e-8));
    const auto d3 = f.d2(3);
    // third derivative at (1, 0): d^3/dy^3 (1+y^2)^-1/2 at y = 0 vanishes by parity
    CHECK(std::abs(d3(1.0, 0.0)) < 1e-4);
  }

  TEST_CASE("double integrals, closed form and nested") {
    CHECK(hom_double_integral(inv_r2(), 1.0, 1.0, DoubleIntMethod::closed).value ==
          Approx(-catalan).epsilon(1e-8));
    HomogeneousFunction f3(-3.0, [](double x, double y) { return std::pow(x * x + y * y, -1.5); });
    CHECK(hom_double_integral(f3, 1.0, 0.0, DoubleIntMethod::closed).value ==
          Approx(1.0).epsilon(1e-8));
    CHECK(hom_double_integral(f3, 0.0, 0.0, DoubleIntMethod::closed).value == 0.0);
    CHECK(hom_double_integral(f3, 0.0, 0.0, DoubleIntMethod::nested).value == 0.0);
    CHECK(hom_double_integral(f3, 1.0, 0.0, DoubleIntMethod::nested).value ==
          Approx(1.0).epsilon(1e-6));
  }

  TEST_CASE("symmetric functions integrate order-independently") {
    const auto f = inv_r2();
    const double a = hom_double_integral(f, 1.0, 1.0, DoubleIntMethod::nested,
                                         IntegrationOrder::dy_dx)
                         .value;
    const double b = hom_double_integral(f, 1.0, 1.0, DoubleIntMethod::nested,
                                         IntegrationOrder::dx_dy)
                         .value;
    CHECK(std::abs(a - b) < 1e-8);
  }

  TEST_CASE("log correction of the Fubini exchange") {
    CHECK(std::abs(fubini_int_correction(inv_r2()).value) < 1e-9);
    HomogeneousFunction h(-2.0, [](double x, double y) { return x * std::pow(x * x + y * y, -1.5); });
    CHECK(fubini_int_correction(h).value == Approx(std::log(2.0)).epsilon(1e-8));
    CHECK(fubini_int_correction(nullptr).value == 0.0);
    CHECK_THROWS_AS(fubini_int_correction(HomogeneousFunction(
                        -1.0, [](double x, double y) { return 1.0 / std::hypot(x, y); })),
                    DomainError);
    const int s = fubini_log_sign();
    CHECK((s == 1 || s == -1));
  }

  TEST_CASE("sum corrections on cylinder data") {
    // z^3 Tr(-d^2 + lambda^2 + z^2)^-2 = z^3/4 r^-3 - z^3/2 r^-4 + O(e^-r), (x, y) = (z, lambda)
    QuarterPlaneFunction f;
    f.components.emplace_back(0.0, [](double x, double y) {
      return 0.25 * x * x * x * std::pow(x * x + y * y, -1.5);
    });
    f.components.emplace_back(-1.0, [](double x, double y) {
      return -0.5 * x * x * x / ((x * x + y * y) * (x * x + y * y));
    });
    auto c = fubini_sum_corrections(f, 3);
    CHECK(c.log_term == 0.0);
    CHECK(c.half_term == Approx(-0.125).epsilon(1e-8));
    CHECK(c.bernoulli_terms[0] == Approx(1.0 / 24.0).epsilon(1e-7));
    CHECK(c.bernoulli_terms[1] == 0.0);
    CHECK(c.total == Approx(-1.0 / 12.0).epsilon(1e-7));
    CHECK(c.derivative_check < 1e-5);
  }

  TEST_CASE("pure degree -1 probe gives only the half term") {
    QuarterPlaneFunction f;
    f.components.emplace_back(-1.0, [](double x, double y) {
      return -0.5 * x * x * x / ((x * x + y * y) * (x * x + y * y));
    });
    auto c = fubini_sum_corrections(f, 2);
    CHECK(c.total == Approx(-0.125).epsilon(1e-8));
  }

  TEST_CASE("degree 0 component contributes only the B2 term") {
    QuarterPlaneFunction f;
    f.components.emplace_back(0.0, [](double x, double y) { return x / std::hypot(x, y); });
    auto c = fubini_sum_corrections(f, 3);
    CHECK(c.log_term == 0.0);
    CHECK(c.half_term == 0.0);
    CHECK(c.bernoulli_terms[0] != 0.0);
    // d/dy x/r at y = 1 is -x/r^3, pf-int over x is -1; times -B2/2
    CHECK(c.bernoulli_terms[0] == Approx(1.0 / 12.0).epsilon(1e-7));
  }

  TEST_CASE("limit exchange") {
    HomogeneousFunction f1(-1.0, [](double x, double y) { return 1.0 / std::hypot(x, y); });
    auto e1 = limit_exchange(f1, 1.0);
    CHECK(e1.corr == Approx(std::log(2.0)).epsilon(1e-8));
    CHECK(e1.lhs == Approx(e1.rhs).epsilon(1e-6));
    CHECK(e1.deriv_lhs == Approx(e1.deriv_rhs).epsilon(1e-5));

    auto e2 = limit_exchange(inv_r2(), 1.0);
    CHECK(e2.corr == 0.0);
    CHECK(std::abs(e2.lhs - e2.rhs) < 1e-6);

    HomogeneousFunction f3(-1.0, [](double x, double y) { return y / (x * x + y * y); });
    auto e3 = limit_exchange(f3, 1.0);
    CHECK(e3.corr == Approx(pi / 2).epsilon(1e-8));
    CHECK(e3.lhs == Approx(e3.rhs).epsilon(1e-6));
  }

  TEST_CASE("scaled tail limits") {
    // degree -3: LIM z^{-1} pf-int_{b/z} f(1,y) dy = -d_{-2} b^{-1}/(-1) = 0
    HomogeneousFunction f(-3.0, [](double x, double y) { return std::pow(x * x + y * y, -1.5); });
    CHECK(std::abs(scaled_tail_limit(f, 1.0, Direction::to_infinity).value) < 1e-6);
    HomogeneousFunction g(0.0, [](double x, double y) { return (x + 2 * y) / (x + y); });
    // f(1,y) = 1 + y - y^2 + ..., d_1 = 1: limit -d_1 b^2/2
    CHECK(scaled_tail_limit(g, 2.0, Direction::to_infinity).value ==
          Approx(-2.0).epsilon(1e-6));
  }
}
