#pragma once

#include <nlohmann/json.hpp>
#include <optional>
#include <string>

#include "zetasum/sturm.hpp"

namespace zetasum {

// "dirichlet", "neumann" or "robin:<theta>".
BoundaryCondition parse_boundary(const std::string& text);
std::string to_string(const BoundaryCondition& bc);

// Everything a subcommand needs. Field names double as the JSON config keys.
struct RunConfig {
  std::string command;     // regint, regsum, sl, phg, zetasum
  std::string subcommand;  // sl: det|trace|eig, phg: extract, zetasum: assemble

  // regint / regsum
  std::string expr;
  double from = 1.0;
  std::optional<double> to;  // regint upper limit, infinity when absent
  std::string model;         // "a:k,a:k,..." exponents with log powers; empty = automatic
  std::string method;        // regsum: direct|em; sl det: gy|pf|zeta

  // family: either a profile r or V and W
  std::string r;
  std::string V;
  std::string W;
  std::string bc0 = "dirichlet";
  std::string bc1 = "dirichlet";

  // sl
  double lambda = 0.0;
  double z = 1.0;
  int power = 1;
  int d_lambda = 0;
  int d_z = 0;
  int count = 5;

  // phg / zetasum
  int K = 2;
  double gamma0 = 3.0;
  std::string convention = "zeta";  // pf|zeta|both
  std::string sigma = "default";    // default|+1|-1|resolve
  double tol = 1e-3;

  // outputs, not part of the cache key
  std::string out;
  std::string csv;
  std::string cache_dir;
  bool no_cache = false;

  // Throws DomainError on inconsistent or out-of-range settings.
  void validate() const;
  // Canonical JSON of the fields that determine the result.
  nlohmann::ordered_json key() const;
};

nlohmann::ordered_json to_json(const RunConfig& c);
RunConfig config_from_json(const nlohmann::json& j);

}  // namespace zetasum
