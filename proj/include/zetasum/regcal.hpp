#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

namespace zetasum {

// Smooth real function of one positive variable. Derivatives are optional;
// without them they are estimated from a local Chebyshev interpolant.
class RealFunction {
 public:
  using Eval = std::function<double(double)>;
  // Fills out[k] = f^(k)(x) for k = 0..out.size()-1.
  using Derivs = std::function<void(double, std::span<double>)>;

  RealFunction() = default;
  template <class F>
    requires std::is_invocable_r_v<double, F, double> &&
             (!std::is_same_v<std::remove_cvref_t<F>, RealFunction>)
  RealFunction(F f) : f_(std::move(f)) {}  // NOLINT: implicit on purpose
  RealFunction(Eval f, Derivs d);

  double operator()(double x) const { return f_(x); }
  bool has_derivatives() const { return static_cast<bool>(d_); }
  // Derivatives 0..out.size()-1 at x. The fallback interpolates on
  // [x - h, x + h] with h = min(x/2, 1), so it needs f smooth there.
  void derivatives(double x, std::span<double> out) const;
  explicit operator bool() const { return static_cast<bool>(f_); }

 private:
  Eval f_;
  Derivs d_;
};

enum class Direction { to_infinity, to_zero };

struct ExpansionTerm {
  double exponent = 0.0;
  int max_log = 0;
};

// Exponents alpha_j with log powers 0..M_j, ordered by dominance.
struct AsymptoticModel {
  std::vector<ExpansionTerm> terms;
  Direction direction = Direction::to_infinity;
  double remainder_decay = 1.0;

  AsymptoticModel() = default;
  AsymptoticModel(std::vector<ExpansionTerm> t, Direction d = Direction::to_infinity,
                  double decay = 1.0);

  // Pure powers {e_0, e_0 - step, ...} (to infinity) or increasing (to zero).
  static AsymptoticModel powers(double leading, int count, double step = 1.0,
                                Direction d = Direction::to_infinity);

  std::size_t basis_size() const;
  bool empty() const { return terms.empty(); }
  void validate() const;
  // Same exponents, terms sorted and merged, as needed after algebra on models.
  static AsymptoticModel normalized(std::vector<ExpansionTerm> t, Direction d);
};

struct Coefficient {
  double exponent = 0.0;
  int log_power = 0;
  double value = 0.0;
};

struct AsymptoticExpansion {
  std::vector<Coefficient> coefficients;
  Direction direction = Direction::to_infinity;
  double remainder_estimate = 0.0;
  double fit_residual = 0.0;
  double condition_number = 0.0;
  // Spread of the constant term between the full fit and a sub-grid refit.
  double constant_error = 0.0;

  double coefficient(double exponent, int log_power = 0) const;
  double regularized_limit() const { return coefficient(0.0, 0); }
  double a_inf() const { return direction == Direction::to_infinity ? coefficient(-1.0) : 0.0; }
  double a_zero() const { return direction == Direction::to_zero ? coefficient(-1.0) : 0.0; }
  double evaluate(double x) const;
};

struct RegDiagnostics {
  int order = 0;
  double fit_residual = 0.0;
  double split = 0.0;
  double quadrature_error = 0.0;
  double tail_error = 0.0;
};

struct RegValue {
  double value = 0.0;
  double error_estimate = 0.0;
  RegDiagnostics diagnostics;
};

// Geometric sample grid start * ratio^k, k = 0..points-1.
struct GeometricGrid {
  double start = 16.0;
  double ratio = 2.0;
  int points = 17;

  static GeometricGrid span(double from, double to, int points);
  std::vector<double> nodes() const;
};

struct FitOptions {
  double max_condition = 1e10;
  double max_residual = 1e-6;
  bool reject = true;
};

AsymptoticExpansion fit_expansion(std::span<const double> x, std::span<const double> y,
                                  const AsymptoticModel& model, const FitOptions& opt = {});
AsymptoticExpansion fit_expansion(const RealFunction& f, const AsymptoticModel& model,
                                  const GeometricGrid& grid, const FitOptions& opt = {});

// Default grids: 2^4..2^20 to infinity, 2^-20..2^-4 to zero.
GeometricGrid default_grid(Direction d);

RegValue reg_limit(const RealFunction& f, const AsymptoticModel& model);
RegValue reg_limit(const RealFunction& f, const AsymptoticModel& model, const GeometricGrid& grid,
                   const FitOptions& opt = {});

// Closed-form partie finie of x^beta log^k x over [z, inf) and (0, z].
double pf_power_tail(double beta, int k, double z);
double pf_power_head(double beta, int k, double z);

struct TailOptions {
  std::optional<AsymptoticModel> model;
  // Where the quadrature core hands over to the fitted expansion; 0 = automatic.
  double split = 0.0;
  // Fit grid extends split * 2^{+-octaves}.
  double octaves = 12.0;
  int points_per_octave = 3;
  int max_retries = 6;
};

struct RegIntOptions {
  TailOptions at_infinity;
  TailOptions at_zero;
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  FitOptions fit;
};

// Partie finie integral of f over (a, b), b may be +infinity.
RegValue reg_int(const RealFunction& f, double a, double b, const RegIntOptions& opt);
RegValue reg_int(const RealFunction& f, double a, double b,
                 std::optional<AsymptoticModel> at_infinity = std::nullopt,
                 std::optional<AsymptoticModel> at_zero = std::nullopt);

struct ChangeOfVariables {
  RegValue lhs;
  RegValue rhs;
  double a_inf = 0.0;
  double a_zero = 0.0;
};

ChangeOfVariables change_of_variables(const RealFunction& f, double scale,
                                      const AsymptoticModel& at_infinity,
                                      std::optional<AsymptoticModel> at_zero = std::nullopt);

enum class SumMethod { direct, euler_maclaurin };

struct RegSumOptions {
  SumMethod method = SumMethod::direct;
  // Euler-Maclaurin order; raised until the remainder bound meets tol.
  int M = 3;
  int max_M = 12;
  double tol = 1e-10;
  // Explicit terms before the Euler-Maclaurin tail starts.
  int em_start = 8;
  // Direct method: partial sums at geometric N between these.
  int n_min = 16;
  int n_max = 1 << 16;
  int n_points = 40;
  // Extra odd-derivative orders kept in the partial sum model.
  int model_depth = 4;
  FitOptions fit;
};

// Partie finie of sum_{lambda >= lambda0} f(lambda); model is f's expansion at infinity.
RegValue reg_sum(const RealFunction& f, int lambda0, const AsymptoticModel& model,
                 const RegSumOptions& opt = {});
// Partial sum model induced by the model of the summand.
AsymptoticModel partial_sum_model(const AsymptoticModel& model, int depth);
// Model of f^(j) from the model of f.
AsymptoticModel derivative_model(const AsymptoticModel& model, int j);

// f(0) + regsum f(lambda) + regsum f(-lambda).
RegValue reg_sum_bilateral(const RealFunction& f, const AsymptoticModel& model_pos,
                           const AsymptoticModel& model_neg, const RegSumOptions& opt = {});
RegValue reg_sum_bilateral(const RealFunction& f, const AsymptoticModel& model,
                           const RegSumOptions& opt = {});

std::string to_string(const AsymptoticModel& m);

}  // namespace zetasum
