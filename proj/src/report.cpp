#include "zetasum/report.hpp"

#include <cmath>

namespace zetasum {

namespace {

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

Json to_json(const RegValue& v) {
  Json j;
  j["value"] = number(v.value);
  j["error_estimate"] = number(v.error_estimate);
  j["order"] = v.diagnostics.order;
  j["fit_residual"] = number(v.diagnostics.fit_residual);
  return j;
}

Json to_json(const LogDetResult& r) {
  Json j;
  j["logdet"] = number(r.value);
  j["error_estimate"] = number(r.error_estimate);
  j["zeta0"] = r.has_zeta0 ? number(r.zeta0) : Json(nullptr);
  j["zero_modes"] = r.zero_modes;
  j["modified"] = r.modified;
  return j;
}

Json to_json(const Spectrum& s) {
  Json j;
  j["eigenvalues"] = s.eigenvalues;
  j["error_bounds"] = s.error_bounds;
  return j;
}

Json to_json(const PhgExpansion& e) {
  Json arr = Json::array();
  for (const auto& c : e.coefficients) {
    Json j;
    j["i"] = c.index;
    j["gamma"] = c.gamma;
    j["phi"] = c.phi;
    j["g"] = c.g;
    j["residual"] = number(e.fit_residual);
    j["interp_error"] = number(c.interp_error);
    arr.push_back(std::move(j));
  }
  return arr;
}

Json to_json(const CorrectionBundle& b) {
  Json j;
  j["sigma"] = b.sigma;
  j["log_term"] = number(b.log_term);
  j["h1_term"] = number(b.h1_term);
  j["b2_term"] = number(b.b2_term);
  j["total"] = number(b.total);
  j["error_estimate"] = number(b.error_estimate);
  return j;
}

Json to_json(const SigmaResolution& s) {
  Json j;
  j["sigma"] = s.sigma;
  j["discrepancy_plus"] = number(s.discrepancy_plus);
  j["discrepancy_minus"] = number(s.discrepancy_minus);
  j["tolerance"] = s.tolerance;
  return j;
}

Json to_json(const DetReport& r) {
  Json j;
  Json modes = Json::array();
  for (const auto& m : r.mode_logdets) {
    Json e;
    e["lambda"] = m.lambda;
    e["pf"] = number(m.pf);
    e["zeta"] = number(m.zeta);
    modes.push_back(std::move(e));
  }
  j["mode_logdets"] = std::move(modes);
  j["regsum"] = to_json(r.regsum);
  j["corrections"] = to_json(r.corrections);
  Json z;
  z["lambda_0"] = number(r.zeta0_mode0);
  z["lambda_nonzero"] = number(r.zeta0_mode);
  j["zeta0_modes"] = std::move(z);
  j["zeta0_sum"] = number(r.zeta0_sum);
  j["assembled"] = number(r.assembled);
  j["direct"] = number(r.direct);
  j["discrepancy"] = number(r.discrepancy);
  j["convention"] = to_string(r.convention);
  j["sigma"] = r.sigma;
  j["error_estimate"] = number(r.error_estimate);
  j["flags"] = r.flags;
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace zetasum
