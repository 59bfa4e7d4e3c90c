#include <doctest.h>

#include <cmath>
#include <numbers>

#include "zetasum/expr.hpp"

using namespace zetasum;
using doctest::Approx;

namespace {
double eval(const char* s, double x) { return parse_expression(s)(x); }

std::size_t error_offset(const char* s) {
  try {
    parse_expression(s);
  } catch (const ParseError& e) {
    return e.offset();
  }
  return std::string::npos;
}
}  // namespace

TEST_SUITE("expr") {
  TEST_CASE("prefix form") {
    CHECK(parse_expression("exp(-2*x)").to_string() == "exp(mul(-2, x))");
    CHECK(parse_expression("x+1").to_string() == "add(x, 1)");
    CHECK(parse_expression("-x^2").to_string() == "neg(pow(x, 2))");
  }

  TEST_CASE("precedence and associativity") {
    CHECK(eval("2+3*x^2", 2) == 14);
    CHECK(eval("2^3^2", 0) == 512);
    CHECK(eval("-x^2", 3) == -9);
    CHECK(eval("2^-1", 0) == 0.5);
    CHECK(eval("--x", 4) == 4);
    CHECK(eval("8/4/2", 0) == 1);
    CHECK(eval("1-2-3", 0) == -4);
    CHECK(eval("(1+x)*(1-x)", 3) == -8);
    CHECK(eval("1.5e2 + .5", 0) == 150.5);
  }

  TEST_CASE("functions and constants") {
    CHECK(eval("exp(0)", 0) == 1);
    CHECK(eval("sinh(1)", 0) == Approx(1.1752012).epsilon(1e-7));
    CHECK(eval("cosh(x)^2 - sinh(x)^2", 1.3) == Approx(1.0).epsilon(1e-14));
    CHECK(eval("tanh(x)", 0.4) == Approx(std::tanh(0.4)));
    CHECK(eval("sqrt(x)", 2) == Approx(std::sqrt(2.0)));
    CHECK(eval("log(e)", 0) == Approx(1.0));
    CHECK(eval("sin(pi/2) + cos(pi)", 0) == Approx(0.0));
    CHECK(parse_expression("2*pi").is_constant());
    CHECK_FALSE(parse_expression("2*x").is_constant());
  }

  TEST_CASE("symbolic derivatives") {
    CHECK(parse_expression("x^2").derivative()(3) == Approx(6.0));
    const double x = 0.7;
    struct Case {
      const char* f;
      double d;
    };
    for (auto [f, d] : {Case{"sin(x)", std::cos(x)}, Case{"cos(x)", -std::sin(x)},
                        Case{"exp(2*x)", 2 * std::exp(2 * x)}, Case{"log(x)", 1 / x},
                        Case{"sinh(x)", std::cosh(x)}, Case{"cosh(x)", std::sinh(x)},
                        Case{"tanh(x)", 1 - std::tanh(x) * std::tanh(x)},
                        Case{"sqrt(x)", 0.5 / std::sqrt(x)}, Case{"1/x", -1 / (x * x)},
                        Case{"x^x", std::pow(x, x) * (std::log(x) + 1)},
                        Case{"2^x", std::log(2.0) * std::pow(2.0, x)}, Case{"-x", -1.0}})
      CHECK(parse_expression(f).derivative()(x) == Approx(d).epsilon(1e-13));
    // second derivative of r = exp(x)
    CHECK(parse_expression("exp(x)").derivative().derivative()(1) == Approx(std::exp(1.0)));
  }

  TEST_CASE("syntax errors carry the offset") {
    CHECK(error_offset("sin(x") == 5);
    CHECK(error_offset("2+*x") == 2);
    CHECK(error_offset("foo(x)") == 0);
    CHECK(error_offset("x y") == 2);
    CHECK(error_offset("") == 0);
    CHECK(error_offset("(1+x))") == 5);
    try {
      parse_expression("sin(x");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("offset 5") != std::string::npos);
    }
  }

  TEST_CASE("domain errors") {
    CHECK_THROWS_AS(eval("log(x)", -1), DomainError);
    CHECK_THROWS_AS(eval("log(x)", 0), DomainError);
    CHECK_THROWS_AS(eval("sqrt(x)", -1), DomainError);
    CHECK_THROWS_AS(eval("1/x", 0), DomainError);
    CHECK_THROWS_AS(eval("x^0.5", -2), DomainError);
    CHECK(eval("x^2", -2) == 4);
  }
}
