#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "zetasum/errors.hpp"
#include "zetasum/numerics.hpp"
#include "zetasum/regcal.hpp"

using namespace zetasum;
using doctest::Approx;

namespace {
constexpr double inf = std::numeric_limits<double>::infinity();
const double pi = std::numbers::pi;

RegSumOptions em() {
  RegSumOptions o;
  o.method = SumMethod::euler_maclaurin;
  return o;
}
}  // namespace

TEST_SUITE("regcal") {
  TEST_CASE("bernoulli numbers and periodic polynomials") {
    CHECK(bernoulli(0) == Approx(1.0));
    CHECK(bernoulli(1) == Approx(-0.5));
    CHECK(bernoulli(2) == Approx(1.0 / 6.0).epsilon(1e-14));
    CHECK(bernoulli(4) == Approx(-1.0 / 30.0).epsilon(1e-14));
    CHECK(bernoulli(12) == Approx(-691.0 / 2730.0).epsilon(1e-13));
    CHECK(bernoulli(5) == 0.0);
    CHECK(std::abs(bernoulli(3, 0.5)) < 1e-15);
    // periodicity
    CHECK(bernoulli(2, 2.25) == Approx(bernoulli(2, 0.25)).epsilon(1e-14));
    CHECK(bernoulli(2, 0.25) == Approx(0.0625 - 0.25 + 1.0 / 6.0).epsilon(1e-14));
    CHECK_THROWS_AS(bernoulli(65), DomainError);
  }

  TEST_CASE("fit_expansion recovers coefficients in the span") {
    auto e = fit_expansion([](double x) { return 2 * x + 3 + 5 / x; },
                           AsymptoticModel::powers(1.0, 3), default_grid(Direction::to_infinity));
    CHECK(e.coefficient(1.0) == Approx(2.0).epsilon(1e-10));
    CHECK(e.coefficient(0.0) == Approx(3.0).epsilon(1e-10));
    CHECK(e.coefficient(-1.0) == Approx(5.0).epsilon(1e-10));
    CHECK(e.a_inf() == Approx(5.0).epsilon(1e-10));

    auto l = fit_expansion([](double x) { return std::log(x); }, AsymptoticModel({{0.0, 1}}),
                           default_grid(Direction::to_infinity));
    CHECK(l.coefficient(0.0, 1) == Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(l.coefficient(0.0, 0)) < 1e-9);

    auto h = fit_expansion([](double x) { return std::sqrt(x) + std::pow(x, -1.5); },
                           AsymptoticModel({{0.5, 0}, {-1.5, 0}}),
                           default_grid(Direction::to_infinity));
    CHECK(h.coefficient(0.5) == Approx(1.0).epsilon(1e-10));
    CHECK(h.coefficient(-1.5) == Approx(1.0).epsilon(1e-10));
  }

  TEST_CASE("fit_expansion rejects a model with a missing term") {
    CHECK_THROWS_AS(fit_expansion([](double x) { return x + std::log(x); },
                                  AsymptoticModel::powers(1.0, 2),
                                  default_grid(Direction::to_infinity)),
                    FitError);
  }

  TEST_CASE("reg_limit") {
    CHECK(reg_limit([](double x) { return 3 + 5 / x + 2 * std::log(x); },
                    AsymptoticModel({{0.0, 1}, {-1.0, 0}}))
              .value == Approx(3.0).epsilon(1e-10));
    CHECK(std::abs(reg_limit([](double x) { return x - std::log(x); },
                             AsymptoticModel({{1.0, 0}, {0.0, 1}}))
                       .value) < 1e-8);
    // partial sums of 1/n^2, evaluated as an exact sum at integer N
    auto partial = [](double N) {
      CompensatedSum s;
      const long n = std::lround(N);
      for (long k = n; k >= 1; --k) s.add(1.0 / (double(k) * k));
      return s.value();
    };
    const std::vector<double> xs{64, 128, 256, 512, 1024, 2048, 4096, 8192, 16384, 32768};
    std::vector<double> ys;
    for (double x : xs) ys.push_back(partial(x));
    auto e = fit_expansion(xs, ys, AsymptoticModel::powers(0.0, 4));
    CHECK(e.regularized_limit() == Approx(pi * pi / 6).epsilon(1e-10));
  }

  TEST_CASE("reg_int examples") {
    CHECK(reg_int([](double x) { return x; }, 1.0, inf, AsymptoticModel::powers(1.0, 1)).value ==
          Approx(-0.5).epsilon(1e-10));
    CHECK(reg_int([](double x) { return x * std::log(x); }, 1.0, inf,
                  AsymptoticModel({{1.0, 1}}))
              .value == Approx(0.25).epsilon(1e-10));
    CHECK(reg_int([](double x) { return 1 / x; }, 2.0, inf, AsymptoticModel::powers(-1.0, 1))
              .value == Approx(-std::log(2.0)).epsilon(1e-10));
    CHECK(reg_int([](double z) { return z * z * z / ((1 + z * z) * (1 + z * z)); }, 0.0, inf,
                  AsymptoticModel::powers(-1.0, 10, 2.0))
              .value == Approx(-0.5).epsilon(1e-9));
    CHECK(reg_int([](double z) { return 1 / std::tanh(z); }, 0.0, inf,
                  AsymptoticModel::powers(0.0, 1),
                  AsymptoticModel::powers(-1.0, 6, 2.0, Direction::to_zero))
              .value == Approx(-std::log(2.0)).epsilon(1e-9));
    CHECK(reg_int([](double x) { return std::exp(-x); }, 0.0, inf).value ==
          Approx(1.0).epsilon(1e-10));
    CHECK(reg_int([](double x) { return x; }, 1.0, 1.0).value == 0.0);
  }

  TEST_CASE("closed-form power tails") {
    for (double beta : {-3.0, -0.5, 0.0, 2.0})
      for (double z : {0.5, 1.0, 2.0}) {
        const double p = beta + 1.0;
        CHECK(pf_power_tail(beta, 0, z) == Approx(-std::pow(z, p) / p).epsilon(1e-13));
        CHECK(pf_power_tail(beta, 1, z) ==
              Approx(-std::pow(z, p) * std::log(z) / p + std::pow(z, p) / (p * p)).epsilon(1e-13));
      }
    CHECK(pf_power_tail(-1.0, 0, 3.0) == Approx(-std::log(3.0)).epsilon(1e-14));
    CHECK(pf_power_tail(-1.0, 1, 3.0) ==
          Approx(-0.5 * std::log(3.0) * std::log(3.0)).epsilon(1e-14));
    // head + tail is the partie finie over (0, inf), which vanishes for a pure power
    CHECK(std::abs(pf_power_head(0.5, 1, 2.0) + pf_power_tail(0.5, 1, 2.0)) < 1e-13);
  }

  TEST_CASE("change of variables") {
    auto c1 = change_of_variables([](double x) { return 1 / (1 + x * x); }, 5.0,
                                  AsymptoticModel::powers(-2.0, 8, 2.0));
    CHECK(c1.lhs.value == Approx(pi / 2).epsilon(1e-9));
    CHECK(c1.rhs.value == Approx(pi / 2).epsilon(1e-9));

    auto c2 = change_of_variables([](double x) { return 1 / x; }, 3.0,
                                  AsymptoticModel::powers(-1.0, 1),
                                  AsymptoticModel::powers(-1.0, 1, 1.0, Direction::to_zero));
    CHECK(std::abs(c2.lhs.value) < 1e-9);
    CHECK(std::abs(c2.rhs.value) < 1e-9);
    CHECK(c2.a_inf == Approx(1.0));
    CHECK(c2.a_zero == Approx(1.0));

    auto c3 = change_of_variables([](double x) { return 1 / (1 + x); }, 2.0,
                                  AsymptoticModel::powers(-1.0, 12));
    CHECK(std::abs(c3.lhs.value) < 1e-9);
    CHECK(std::abs(c3.rhs.value) < 1e-9);

    CHECK_THROWS_AS(change_of_variables([](double x) { return std::log(x) / x; }, 2.0,
                                        AsymptoticModel({{-1.0, 1}})),
                    DomainError);
  }

  TEST_CASE("reg_sum examples, both methods") {
    for (const auto& opt : {RegSumOptions{}, em()}) {
      CHECK(std::abs(reg_sum([](double) { return 1.0; }, 1, AsymptoticModel::powers(0.0, 1), opt)
                         .value) < 1e-10);
      CHECK(std::abs(reg_sum([](double l) { return l; }, 1, AsymptoticModel::powers(1.0, 1), opt)
                         .value) < 1e-9);
      CHECK(reg_sum([](double l) { return 1 / (l * l); }, 1, AsymptoticModel::powers(-2.0, 1), opt)
                .value == Approx(pi * pi / 6).epsilon(1e-10));
      CHECK(reg_sum([](double l) { return std::log(l); }, 1, AsymptoticModel({{0.0, 1}}), opt)
                .value == Approx(0.5 * std::log(2 * pi)).epsilon(1e-9));
      CHECK(reg_sum([](double l) { return 0.5 * std::log(l) + 0.25; }, 1,
                    AsymptoticModel({{0.0, 1}}), opt)
                .value == Approx(0.25 * std::log(2 * pi)).epsilon(1e-9));
    }
  }

  TEST_CASE("reg_sum with a later start") {
    // regsum_{n>=3} n = regsum_{n>=1} n - 1 - 2
    CHECK(reg_sum([](double l) { return l; }, 3, AsymptoticModel::powers(1.0, 1)).value ==
          Approx(-3.0).epsilon(1e-10));
  }

  TEST_CASE("bilateral regularized sums") {
    CHECK(reg_sum_bilateral([](double) { return 2.5; }, AsymptoticModel::powers(0.0, 1)).value ==
          Approx(2.5).epsilon(1e-10));
    CHECK(std::abs(reg_sum_bilateral([](double l) { return std::abs(l); },
                                     AsymptoticModel::powers(1.0, 1))
                       .value) < 1e-9);
    auto f = [](double l) {
      const double a = std::abs(l);
      return a == 0.0 ? std::log(2.0) : a + std::log1p(-std::exp(-2 * a)) - std::log(a);
    };
    double q = 0.0;
    for (int l = 1; l < 40; ++l) q += std::log1p(-std::exp(-2.0 * l));
    const double expect = -std::log(2 * pi) + 2 * q + std::log(2.0);
    CHECK(std::abs(expect + 1.4782669) < 1e-6);
    CHECK(reg_sum_bilateral(f, AsymptoticModel({{1.0, 0}, {0.0, 1}}), em()).value ==
          Approx(expect).epsilon(1e-9));
  }

  TEST_CASE("linearity") {
    auto f = [](double x) { return x * std::log(x); };
    auto g = [](double x) { return 1 / (1 + x * x); };
    const AsymptoticModel mf({{1.0, 1}}), mg = AsymptoticModel::powers(-2.0, 8, 2.0);
    const AsymptoticModel mfg({{1.0, 1}, {-2.0, 0}, {-4.0, 0}, {-6.0, 0}, {-8.0, 0}, {-10.0, 0},
                               {-12.0, 0}, {-14.0, 0}, {-16.0, 0}});
    const double a = 2.0, b = -3.0;
    const double lhs =
        reg_int([&](double x) { return a * f(x) + b * g(x); }, 1.0, inf, mfg).value;
    const double rhs = a * reg_int(f, 1.0, inf, mf).value + b * reg_int(g, 1.0, inf, mg).value;
    CHECK(lhs == Approx(rhs).epsilon(1e-10));

    const AsymptoticModel ml({{1.0, 0}, {0.0, 1}});
    const double s = reg_sum([](double l) { return 3 * std::log(l) - 2 * l; }, 1, ml, em()).value;
    const double s1 = reg_sum([](double l) { return std::log(l); }, 1, ml, em()).value;
    const double s2 = reg_sum([](double l) { return l; }, 1, ml, em()).value;
    CHECK(s == Approx(3 * s1 - 2 * s2).epsilon(1e-10));
    CHECK(s == Approx(1.5 * std::log(2 * pi)).epsilon(1e-9));
  }

  TEST_CASE("model validation") {
    CHECK_THROWS_AS(AsymptoticModel({{0.0, 0}, {1.0, 0}}).validate(), DomainError);
    CHECK(partial_sum_model(AsymptoticModel::powers(-2.0, 1), 2).basis_size() >= 2);
    CHECK(derivative_model(AsymptoticModel({{0.0, 1}}), 1).terms.front().exponent ==
          Approx(-1.0));
  }
}
