#pragma once

#include <nlohmann/json.hpp>

#include "zetasum/decomp.hpp"
#include "zetasum/phg.hpp"
#include "zetasum/regcal.hpp"
#include "zetasum/sturm.hpp"

namespace zetasum {

using Json = nlohmann::ordered_json;

Json to_json(const RegValue& v);
Json to_json(const LogDetResult& r);
Json to_json(const Spectrum& s);
// Profile export: [{i, gamma, phi[], g[], residual}, ...]
Json to_json(const PhgExpansion& e);
Json to_json(const CorrectionBundle& b);
Json to_json(const SigmaResolution& s);
// Fixed field names: mode_logdets, regsum, corrections, zeta0_modes, zeta0_sum,
// assembled, direct, discrepancy, convention, sigma.
Json to_json(const DetReport& r);

// Two-space indented dump with a trailing newline; NaN becomes null.
std::string dump(const Json& j);

}  // namespace zetasum
