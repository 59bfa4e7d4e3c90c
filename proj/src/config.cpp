#include "zetasum/config.hpp"

#include <cmath>
#include <numbers>

#include "zetasum/errors.hpp"

namespace zetasum {

BoundaryCondition parse_boundary(const std::string& text) {
  if (text == "dirichlet" || text == "D") return BoundaryCondition::dirichlet();
  if (text == "neumann" || text == "N") return BoundaryCondition::neumann();
  if (text.rfind("robin:", 0) == 0) {
    std::size_t used = 0;
    double theta = 0.0;
    try {
      theta = std::stod(text.substr(6), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != text.size() - 6)
      throw DomainError("bad Robin angle in '" + text + "'");
    return BoundaryCondition::robin(theta);
  }
  throw DomainError("unknown boundary condition '" + text +
                    "' (expected dirichlet, neumann or robin:<theta>)");
}

std::string to_string(const BoundaryCondition& bc) {
  if (bc.is_dirichlet()) return "dirichlet";
  if (bc.theta == std::numbers::pi / 2) return "neumann";
  nlohmann::json j = bc.theta;
  return "robin:" + j.dump();
}

void RunConfig::validate() const {
  auto need = [](bool ok, const std::string& what) {
    if (!ok) throw DomainError(what);
  };
  if (command == "regint" || command == "regsum") {
    need(!expr.empty(), command + " needs --expr");
    if (command == "regint" && to) need(*to > from, "regint needs to > from");
    if (command == "regsum") {
      need(from >= 1.0 && from == std::floor(from), "regsum needs an integer --from >= 1");
      need(method.empty() || method == "direct" || method == "em",
           "regsum method must be direct or em");
    }
  } else if (command == "sl") {
    need(subcommand == "det" || subcommand == "trace" || subcommand == "eig",
         "sl needs det, trace or eig");
    need(!V.empty(), "sl needs --V");
    need(method.empty() || method == "gy" || method == "pf" || method == "zeta",
         "sl det method must be gy, pf or zeta");
    need(power == 1 || power == 2, "power must be 1 or 2");
    need(d_lambda >= 0 && d_z >= 0, "derivative orders must be nonnegative");
    need(z >= 0.0, "z must be nonnegative");
    need(count >= 1, "count must be positive");
  } else if (command == "phg") {
    need(subcommand == "extract", "phg needs extract");
    need(!V.empty() || !r.empty(), "phg needs --V or --r");
    need(K >= 0 && K <= 6, "K must be in 0..6");
  } else if (command == "zetasum") {
    need(subcommand == "assemble", "zetasum needs assemble");
    need(!V.empty() || !r.empty(), "zetasum needs --r or --V");
    need(r.empty() || (V.empty() && W.empty()), "give either --r or --V/--W, not both");
    need(convention == "pf" || convention == "zeta" || convention == "both",
         "convention must be pf, zeta or both");
    need(sigma == "default" || sigma == "+1" || sigma == "1" || sigma == "-1" ||
             sigma == "resolve",
         "sigma must be default, +1, -1 or resolve");
  } else {
    throw DomainError("unknown command '" + command + "'");
  }
  need(tol > 0.0, "tolerances must be positive");
  parse_boundary(bc0);
  parse_boundary(bc1);
}

nlohmann::ordered_json RunConfig::key() const {
  auto j = to_json(*this);
  j.erase("out");
  j.erase("csv");
  j.erase("cache_dir");
  j.erase("no_cache");
  return j;
}

nlohmann::ordered_json to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["command"] = c.command;
  j["subcommand"] = c.subcommand;
  j["expr"] = c.expr;
  j["from"] = c.from;
  j["to"] = c.to ? nlohmann::ordered_json(*c.to) : nlohmann::ordered_json(nullptr);
  j["model"] = c.model;
  j["method"] = c.method;
  j["r"] = c.r;
  j["V"] = c.V;
  j["W"] = c.W;
  j["bc0"] = c.bc0;
  j["bc1"] = c.bc1;
  j["lambda"] = c.lambda;
  j["z"] = c.z;
  j["power"] = c.power;
  j["d_lambda"] = c.d_lambda;
  j["d_z"] = c.d_z;
  j["count"] = c.count;
  j["K"] = c.K;
  j["gamma0"] = c.gamma0;
  j["convention"] = c.convention;
  j["sigma"] = c.sigma;
  j["tol"] = c.tol;
  j["out"] = c.out;
  j["csv"] = c.csv;
  j["cache_dir"] = c.cache_dir;
  j["no_cache"] = c.no_cache;
  return j;
}

RunConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw DomainError("config must be a JSON object");
  RunConfig c;
  const auto known = to_json(c);
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.contains(it.key())) throw DomainError("unknown config key '" + it.key() + "'");
  try {
    auto get = [&](const char* k, auto& v) {
      if (j.contains(k)) j.at(k).get_to(v);
    };
    get("command", c.command);
    get("subcommand", c.subcommand);
    get("expr", c.expr);
    get("from", c.from);
    if (j.contains("to") && !j.at("to").is_null()) c.to = j.at("to").get<double>();
    get("model", c.model);
    get("method", c.method);
    get("r", c.r);
    get("V", c.V);
    get("W", c.W);
    get("bc0", c.bc0);
    get("bc1", c.bc1);
    get("lambda", c.lambda);
    get("z", c.z);
    get("power", c.power);
    get("d_lambda", c.d_lambda);
    get("d_z", c.d_z);
    get("count", c.count);
    get("K", c.K);
    get("gamma0", c.gamma0);
    get("convention", c.convention);
    get("sigma", c.sigma);
    get("tol", c.tol);
    get("out", c.out);
    get("csv", c.csv);
    get("cache_dir", c.cache_dir);
    get("no_cache", c.no_cache);
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("config type error: ") + e.what());
  }
  return c;
}

}  // namespace zetasum
