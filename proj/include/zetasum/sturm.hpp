#pragma once

#include <vector>

#include "zetasum/jet.hpp"
#include "zetasum/regcal.hpp"

namespace zetasum {

// cos(theta) f + sin(theta) f' = 0 at an endpoint, f' = d/dx, theta in [0, pi).
struct BoundaryCondition {
  double theta = 0.0;

  static BoundaryCondition dirichlet() { return {0.0}; }
  static BoundaryCondition neumann();
  static BoundaryCondition robin(double theta);
  bool is_dirichlet() const { return theta == 0.0; }
};

// -d^2/dx^2 + lambda^2 V + W on [0, 1].
struct SLOperator {
  RealFunction V;
  RealFunction W;
  double lambda = 0.0;
  BoundaryCondition bc0;
  BoundaryCondition bc1;

  double potential(double x) const { return lambda * lambda * V(x) + W(x); }
  // Throws DomainError if V is not positive on a 1000-point grid.
  void validate() const;
  // sqrt of the largest |potential| on a coarse grid, at least 1.
  double scale() const;
  // Mirror image x -> 1 - x with the boundary conditions swapped.
  SLOperator reflected() const;
};

struct OdeOptions {
  double rtol = 1e-12;
};

struct Spectrum {
  std::vector<double> eigenvalues;
  std::vector<double> error_bounds;
};

Spectrum eigenvalues(const SLOperator& op, int count, const OdeOptions& opt = {});
// Number of eigenvalues with |mu| < 1e-8 (0 or 1 in one dimension).
int zero_mode_count(const SLOperator& op);

// Taylor jet of log|F| in (w - w0, lambda - lambda0), where F(w) is the
// normalized characteristic function of op + w. Then
// Tr (op + w)^-1 = d/dw log F and log det_zeta(op) = log 2 + log|F(0)|.
BiJet characteristic_jet(const SLOperator& op, double w0, int nw, int nl,
                         const OdeOptions& opt = {});

// d_lambda^a d_z^b Tr (op + z^2)^-power.
double resolvent_trace(const SLOperator& op, double z, int power, int d_lambda = 0, int d_z = 0,
                       const OdeOptions& opt = {});
// d_lambda^j Tr (op + z^2)^-power, j = 0..count-1, from one jet solve.
std::vector<double> resolvent_trace_lambda_derivs(const SLOperator& op, double z, int power,
                                                  int count, const OdeOptions& opt = {});

// Diagonal of the resolvent kernel (op + z^2)^-1 at x.
double green_diagonal(const SLOperator& op, double z, double x, const OdeOptions& opt = {});

enum class LogDetMethod { gelfand_yaglom, resolvent_pf, resolvent_zeta };

struct LogDetResult {
  double value = 0.0;
  double error_estimate = 0.0;
  // zeta(0, op) over nonzero eigenvalues, when the method computed it.
  double zeta0 = 0.0;
  bool has_zeta0 = false;
  int zero_modes = 0;
  // Zero modes were dropped, i.e. this is the modified determinant.
  bool modified = false;
};

struct ResolventOptions {
  OdeOptions ode;
  // Number of powers z^0, z^-1, ... in the tail model of z^3 Tr^-2.
  int tail_terms = 12;
  double rel_tol = 1e-10;
};

LogDetResult logdet(const SLOperator& op, LogDetMethod method, const ResolventOptions& opt = {});

// zeta(s, op) over the nonzero spectrum; s >= 1 by eigenvalue sums, s < 1 by
// the partie finie resolvent representation.
double zeta_value(const SLOperator& op, double s, const ResolventOptions& opt = {});

struct TraceExpansion {
  std::vector<double> b;  // Tr^-1 ~ sum b_k z^{-k-1}
  std::vector<double> c;  // Tr^-2 ~ sum c_k z^{-k-3}
  double residual_b = 0.0;
  double residual_c = 0.0;
};

TraceExpansion trace_expansion(const SLOperator& op, int K, const ResolventOptions& opt = {});

// Where the large-z expansion of the traces is reliable for this operator.
double tail_start(const SLOperator& op);

}  // namespace zetasum
