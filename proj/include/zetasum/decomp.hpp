#pragma once

#include <string>
#include <vector>

#include "zetasum/phg.hpp"
#include "zetasum/sturm.hpp"

namespace zetasum {

// Delta = direct sum over lambda in Z of -d^2/dx^2 + lambda^2 V + W,
// Delta_lambda = Delta_{-lambda}.
struct OperatorFamily {
  RealFunction V;
  RealFunction W;
  BoundaryCondition bc0;
  BoundaryCondition bc1;
  // multiplicities of lambda = 0 and of each |lambda| >= 1
  int m0 = 1;
  int m = 2;

  SLOperator op(double lambda) const;
  // Smallest N >= 0 such that Delta_lambda is positive for all |lambda| >= N.
  int threshold() const;
  // Throws DomainError unless every mode is nonnegative (zero modes allowed at lambda = 0).
  void validate() const;
};

struct SumTrace {
  double value = 0.0;
  double error_estimate = 0.0;
  int cutoff = 0;  // explicit modes |lambda| < cutoff
};

// Explicit cutoff: smallest L with L/z >= 4 and L >= N + 8.
int explicit_cutoff(const OperatorFamily& f, double z, int N);

// sum over lambda in Z of m(lambda) Tr(Delta_lambda + z^2)^-2.
SumTrace sum_trace2(const OperatorFamily& f, double z, int em_order = 3);

struct SumExpansion {
  std::vector<double> a;  // a[k] multiplies z^-k; a[0], a[1] unused
  double z_start = 0.0;
  double fit_residual = 0.0;
  double constant_error = 0.0;
  double coefficient(int k) const { return k < static_cast<int>(a.size()) ? a[k] : 0.0; }
};

SumExpansion fit_sum_expansion(const OperatorFamily& f, int K = 12);

struct CorrectionBundle {
  int sigma = 1;
  double log_term = 0.0;  // sigma 4 int z^3 h_2(1,z) log z dz
  double h1_term = 0.0;   // 2 pf-int z^3 h_1(1,z) dz
  double b2_term = 0.0;   // 2 B_2 pf-int z^3 d_lambda h_0(1,z) dz
  double total = 0.0;
  double error_estimate = 0.0;
  // int z^3 h_2(1,z) log z dz without sign or factor
  double log_integral = 0.0;
};

// Convention for the sign of the h_2 log term, resolved on the r = e^x family.
constexpr int kDefaultSigma = 1;

CorrectionBundle corrections(const PhgExpansion& phg, int sigma = kDefaultSigma);

// Tr(Delta_lambda + z^2)^-2 of the family, extracted jointly in (lambda, z).
PhgExpansion family_phg(const OperatorFamily& f, int K = 2);

enum class Convention { pf, zeta };
std::string to_string(Convention c);

struct DirectLogDet {
  double pf = 0.0;
  double zeta = 0.0;
  double a4 = 0.0;  // zeta(0, Delta)
  double error_estimate = 0.0;
  int zero_modes = 0;
  SumExpansion expansion;
};

DirectLogDet logdet_direct(const OperatorFamily& f);

struct ModeLogDet {
  int lambda = 0;
  double pf = 0.0;
  double zeta = 0.0;
};

struct DetReport {
  Convention convention = Convention::pf;
  int sigma = kDefaultSigma;
  // explicitly evaluated modes, for inspection
  std::vector<ModeLogDet> mode_logdets;
  RegValue regsum;
  CorrectionBundle corrections;
  double zeta0_mode0 = 0.0;  // zeta(0, Delta_0)
  double zeta0_mode = 0.0;   // zeta(0, Delta_lambda), lambda != 0
  double zeta0_sum = 0.0;    // zeta(0, Delta) = a_4
  double assembled = 0.0;
  double direct = 0.0;
  double discrepancy = 0.0;
  double error_estimate = 0.0;
  std::vector<std::string> flags;
};

struct DecompOptions {
  int phg_order = 2;
  int sum_terms = 12;
  // number of modes listed in the report
  int listed_modes = 8;
};

// Both conventions in one pass: the expensive stages are shared.
struct DecompResult {
  DetReport pf;
  DetReport zeta;
  PhgExpansion phg;
  DirectLogDet direct;
};

DecompResult logdet_decomposed_all(const OperatorFamily& f, int sigma = kDefaultSigma,
                                   const DecompOptions& opt = {});
DetReport logdet_decomposed(const OperatorFamily& f, Convention c, int sigma = kDefaultSigma,
                            const DecompOptions& opt = {});

struct SigmaResolution {
  double discrepancy_plus = 0.0;
  double discrepancy_minus = 0.0;
  // +1 or -1 when exactly one sign meets the tolerance, else 0
  int sigma = 0;
  double tolerance = 1e-3;
};

// Reuses one decomposition: the two signs differ only in the log term.
SigmaResolution resolve_sigma(const DecompResult& r, double tol = 1e-3);

}  // namespace zetasum
