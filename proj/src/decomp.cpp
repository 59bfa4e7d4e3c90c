#include "zetasum/decomp.hpp"

#include <boost/math/special_functions/factorials.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "zetasum/errors.hpp"

namespace zetasum {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kMaxThreshold = 4096;

double factorial(int n) { return boost::math::factorial<double>(static_cast<unsigned>(n)); }

double lowest_eigenvalue(const SLOperator& op) { return eigenvalues(op, 1).eigenvalues.front(); }

// log det_zeta(Delta_lambda) and its lambda-derivatives from one jet solve.
RealFunction gy_logdet(const OperatorFamily& f, double shift) {
  return RealFunction(
      [&f, shift](double lam) {
        return std::log(2.0) + characteristic_jet(f.op(lam), 0.0, 0, 0)(0, 0) + shift;
      },
      [&f, shift](double lam, std::span<double> out) {
        const int n = static_cast<int>(out.size());
        BiJet L = characteristic_jet(f.op(lam), 0.0, 0, n - 1);
        for (int k = 0; k < n; ++k) out[k] = L(0, k) * factorial(k);
        out[0] += std::log(2.0) + shift;
      });
}

// lambda, log lambda, 1, lambda^-1, ...: the shape of a mode log-determinant
AsymptoticModel mode_logdet_model(int inverse_powers) {
  std::vector<ExpansionTerm> t{{1.0, 0}, {0.0, 1}};
  for (int k = 1; k <= inverse_powers; ++k) t.push_back({-double(k), 0});
  return AsymptoticModel(t, Direction::to_infinity);
}

}  // namespace

SLOperator OperatorFamily::op(double lambda) const {
  SLOperator o;
  o.V = V;
  o.W = W;
  o.lambda = lambda;
  o.bc0 = bc0;
  o.bc1 = bc1;
  return o;
}

int OperatorFamily::threshold() const {
  // the lowest eigenvalue increases with |lambda| since V > 0
  for (int n = 0; n <= kMaxThreshold; ++n)
    if (lowest_eigenvalue(op(n)) > 1e-8) return n;
  throw DomainError("family is not invertible for |lambda| <= " + std::to_string(kMaxThreshold));
}

void OperatorFamily::validate() const {
  if (m0 < 0 || m < 0) throw DomainError("multiplicities must be nonnegative");
  op(0.0).validate();
  if (lowest_eigenvalue(op(0)) < -1e-8) {
    throw DomainError("Delta_0 has a negative eigenvalue, the resolvent integrals do not exist");
  }
  if (threshold() > 1) {
    throw DomainError("modes with |lambda| >= 1 must be invertible");
  }
}

int explicit_cutoff(const OperatorFamily&, double z, int N) {
  return std::max(static_cast<int>(std::ceil(4.0 * z)), N + 8);
}

namespace {

SumTrace sum_trace2_impl(const OperatorFamily& f, double z, int M, int N) {
  if (!(z >= 0.0)) throw DomainError("sum_trace2 needs z >= 0");
  if (N > 0 && !(z > 0.0)) throw DomainError("sum_trace2 at z = 0 with a zero mode");
  const int L = explicit_cutoff(f, z, N);
  SumTrace out;
  out.cutoff = L;
  auto vals = parallel_map(static_cast<std::size_t>(L), [&](std::size_t i) {
    const double w = i == 0 ? f.m0 : f.m;
    return w * resolvent_trace(f.op(double(i)), z, 2);
  });
  CompensatedSum s;
  for (double v : vals) s.add(v);

  // Euler-Maclaurin from L on: int + f/2 - sum B_2k/(2k)! f^(2k-1) + R
  auto d = resolvent_trace_lambda_derivs(f.op(L), z, 2, 2 * M + 1);
  auto g = [&](double u) {
    const double lam = L / u;
    return resolvent_trace(f.op(lam), z, 2) * L / (u * u);
  };
  auto I = integrate(g, 0.0, 1.0, {1e-18, 1e-12});
  CompensatedSum t;
  t.add(I.value);
  t.add(0.5 * d[0]);
  for (int k = 1; k <= M; ++k) t.add(-bernoulli(2 * k) / factorial(2 * k) * d[2 * k - 1]);
  s.add(f.m * t.value());
  const double rem = bernoulli_sup(2 * M + 1) / factorial(2 * M + 1) * std::abs(d[2 * M]);
  out.value = s.value();
  out.error_estimate = f.m * (rem + I.error) + 1e-13 * std::abs(out.value);
  return out;
}

}  // namespace

SumTrace sum_trace2(const OperatorFamily& f, double z, int em_order) {
  if (em_order < 1) throw DomainError("Euler-Maclaurin order must be >= 1");
  return sum_trace2_impl(f, z, em_order, f.threshold());
}

SumExpansion fit_sum_expansion(const OperatorFamily& f, int K) {
  if (K < 4) throw DomainError("sum expansion needs K >= 4 to expose a_4");
  const int N = f.threshold();
  SumExpansion out;
  out.z_start = std::max(16.0, 2.0 * N);
  auto grid = GeometricGrid::span(out.z_start, 32.0 * out.z_start, std::max(25, 2 * K + 1));
  auto zs = grid.nodes();
  std::vector<double> ys(zs.size());
  for (std::size_t i = 0; i < zs.size(); ++i) ys[i] = sum_trace2_impl(f, zs[i], 3, N).value;
  auto e = fit_expansion(zs, ys, AsymptoticModel::powers(-2.0, K - 1));
  out.a.assign(static_cast<std::size_t>(K + 1), 0.0);
  for (int k = 2; k <= K; ++k) out.a[k] = e.coefficient(-double(k));
  out.fit_residual = e.fit_residual;
  out.constant_error = e.remainder_estimate;
  return out;
}

CorrectionBundle corrections(const PhgExpansion& phg, int sigma) {
  if (sigma != 1 && sigma != -1) throw DomainError("sigma must be +1 or -1");
  if (phg.coefficients.size() < 3) throw DomainError("corrections need h_0, h_1, h_2");
  // z^3 h_i(lambda, z) in (x, y) = (z, lambda) has degree -i
  QuarterPlaneFunction q;
  for (int i = 0; i < 3; ++i) q.components.push_back(slice_function(phg, i, 3));
  // the regularized mode sum carries -2 (pf) times 2 (lambda and -lambda)
  auto fc = fubini_sum_corrections(q, 1, -sigma);
  CorrectionBundle b;
  b.sigma = sigma;
  b.log_term = -4.0 * fc.log_term;
  b.log_integral = sigma * b.log_term / 4.0;
  b.h1_term = -4.0 * fc.half_term;
  b.b2_term = -4.0 * fc.bernoulli_terms.at(0);
  b.total = b.log_term + b.h1_term + b.b2_term;
  b.error_estimate = 4.0 * fc.error_estimate;
  return b;
}

PhgExpansion family_phg(const OperatorFamily& f, int K) {
  PhgOptions o;
  o.K = K;
  o.r0 = std::max(phg_start_radius(f.V), 2.0 * f.threshold());
  auto trace = [&f](double lambda, double z) { return resolvent_trace(f.op(lambda), z, 2); };
  return extract_phg(trace, 3.0, o, "Tr(Delta_lambda + z^2)^-2");
}

std::string to_string(Convention c) { return c == Convention::pf ? "pf" : "zeta"; }

DirectLogDet logdet_direct(const OperatorFamily& f) {
  const int N = f.threshold();
  DirectLogDet out;
  out.zero_modes = N > 0 ? f.m0 * zero_mode_count(f.op(0)) : 0;
  out.expansion = fit_sum_expansion(f);
  const double X = out.expansion.z_start;
  const double n0 = out.zero_modes;
  auto head = integrate(
      [&](double z) {
        const double s = sum_trace2_impl(f, z, 3, N).value;
        return z * z * z * s - n0 / z;
      },
      0.0, X, {1e-14, 1e-11});
  CompensatedSum pf;
  pf.add(head.value);
  for (int k = 2; k < static_cast<int>(out.expansion.a.size()); ++k)
    pf.add(out.expansion.a[k] * pf_power_tail(3.0 - k, 0, X));
  // the zero-mode term z^-1 has vanishing partie finie over (0, inf)
  out.pf = -2.0 * pf.value();
  out.a4 = out.expansion.coefficient(4);
  out.zeta = out.pf - (out.a4 - n0);
  out.error_estimate = 2.0 * head.error + 2.0 * out.expansion.constant_error;
  return out;
}

DecompResult logdet_decomposed_all(const OperatorFamily& f, int sigma, const DecompOptions& opt) {
  f.validate();
  DecompResult res;
  DetReport rep;
  rep.sigma = sigma;
  auto fail = [&](const std::string& stage, const std::exception& e) {
    rep.flags.push_back(stage + ": " + e.what());
  };

  rep.corrections.total = kNaN;
  try {
    res.phg = family_phg(f, std::max(2, opt.phg_order));
    rep.corrections = corrections(res.phg, sigma);
  } catch (const Error& e) {
    fail("corrections", e);
  }

  res.direct.pf = res.direct.zeta = kNaN;
  try {
    res.direct = logdet_direct(f);
  } catch (const Error& e) {
    fail("direct", e);
  }

  // lambda = 0 may carry a zero mode; lambda != 0 modes share zeta(0)
  double pf0 = kNaN, zeta0 = kNaN;
  rep.zeta0_mode0 = rep.zeta0_mode = kNaN;
  try {
    auto r0 = logdet(f.op(0), LogDetMethod::resolvent_zeta);
    zeta0 = r0.value;
    rep.zeta0_mode0 = r0.zeta0;
    pf0 = zeta0 + r0.zeta0;
    rep.zeta0_mode = logdet(f.op(1), LogDetMethod::resolvent_zeta).zeta0;
  } catch (const Error& e) {
    fail("mode zeta(0)", e);
  }

  RegSumOptions so;
  so.method = SumMethod::euler_maclaurin;
  so.em_start = 8;
  RegValue rs_zeta, rs_pf;
  rs_zeta.value = rs_pf.value = kNaN;
  try {
    const auto model = mode_logdet_model(8);
    auto gz = gy_logdet(f, 0.0);
    auto gp = gy_logdet(f, rep.zeta0_mode);
    rs_zeta = reg_sum(gz, 1, model, so);
    rs_pf = reg_sum(gp, 1, model, so);
    for (int l = 0; l < opt.listed_modes; ++l) {
      ModeLogDet m{l, l == 0 ? pf0 : gp(l), l == 0 ? zeta0 : gz(l)};
      rep.mode_logdets.push_back(m);
    }
  } catch (const Error& e) {
    fail("regsum", e);
  }

  DetReport z = rep;
  rep.convention = Convention::pf;
  rep.regsum.value = f.m0 * pf0 + f.m * rs_pf.value;
  rep.regsum.error_estimate = f.m * rs_pf.error_estimate;
  rep.zeta0_sum = res.direct.a4 - res.direct.zero_modes;
  rep.assembled = rep.regsum.value + rep.corrections.total;
  rep.direct = res.direct.pf;

  z.convention = Convention::zeta;
  z.regsum.value = f.m0 * zeta0 + f.m * rs_zeta.value;
  z.regsum.error_estimate = f.m * rs_zeta.error_estimate;
  z.zeta0_sum = rep.zeta0_sum;
  z.assembled = z.regsum.value + z.corrections.total + f.m0 * z.zeta0_mode0 - z.zeta0_sum;
  z.direct = res.direct.zeta;

  for (DetReport* r : {&rep, &z}) {
    r->discrepancy = std::abs(r->assembled - r->direct);
    r->error_estimate =
        r->regsum.error_estimate + r->corrections.error_estimate + res.direct.error_estimate;
  }
  res.pf = std::move(rep);
  res.zeta = std::move(z);
  return res;
}

DetReport logdet_decomposed(const OperatorFamily& f, Convention c, int sigma,
                            const DecompOptions& opt) {
  auto r = logdet_decomposed_all(f, sigma, opt);
  return c == Convention::pf ? r.pf : r.zeta;
}

SigmaResolution resolve_sigma(const DecompResult& r, double tol) {
  SigmaResolution s;
  s.tolerance = tol;
  const auto& p = r.pf;
  const double base = p.assembled - p.corrections.log_term;
  const double I = p.corrections.log_integral;
  s.discrepancy_plus = std::abs(base + 4.0 * I - p.direct);
  s.discrepancy_minus = std::abs(base - 4.0 * I - p.direct);
  const bool plus = s.discrepancy_plus <= tol, minus = s.discrepancy_minus <= tol;
  s.sigma = plus == minus ? 0 : (plus ? 1 : -1);
  return s;
}

}  // namespace zetasum
