#include "zetasum/run.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <sstream>
#include <tuple>
#include <unistd.h>

#include "zetasum/decomp.hpp"
#include "zetasum/errors.hpp"
#include "zetasum/expr.hpp"
#include "zetasum/phg.hpp"
#include "zetasum/report.hpp"
#include "zetasum/sturm.hpp"
#include "zetasum/surfrev.hpp"

namespace fs = std::filesystem;

namespace zetasum {

AsymptoticModel parse_model(const std::string& text, Direction d) {
  std::vector<ExpansionTerm> terms;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
    if (item.empty()) continue;
    ExpansionTerm t;
    const auto colon = item.find(':');
    try {
      std::size_t used = 0;
      const std::string e = item.substr(0, colon);
      t.exponent = std::stod(e, &used);
      if (used != e.size()) throw std::invalid_argument(e);
      if (colon != std::string::npos) {
        const std::string k = item.substr(colon + 1);
        t.max_log = std::stoi(k, &used);
        if (used != k.size()) throw std::invalid_argument(k);
      }
    } catch (const std::exception&) {
      throw DomainError("bad model term '" + item + "'");
    }
    terms.push_back(t);
  }
  if (terms.empty()) throw DomainError("empty model");
  AsymptoticModel m = AsymptoticModel::normalized(terms, d);
  m.validate();
  return m;
}

AsymptoticModel guess_model(const RealFunction& f, Direction d) {
  const bool inf = d == Direction::to_infinity;
  const double x1 = inf ? 1024.0 : 1.0 / 1024.0, x2 = inf ? 1048576.0 : 1.0 / 1048576.0;
  const double f1 = std::abs(f(x1)), f2 = std::abs(f(x2));
  if (!(f1 > 1e-300) || !(f2 > 1e-300)) return AsymptoticModel({}, d);
  const double p = std::log2(f2 / f1) / std::log2(x2 / x1);
  const int lead = inf ? static_cast<int>(std::ceil(p - 0.25))
                       : static_cast<int>(std::floor(p + 0.25));
  const auto grid = inf ? GeometricGrid::span(16.0, 1048576.0, 49)
                        : GeometricGrid::span(1.0 / 1048576.0, 1.0 / 16.0, 49);
  const auto xs = grid.nodes();
  std::vector<double> ys(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) ys[i] = f(xs[i]);
  // smallest model of consecutive integer exponents with log powers <= L that fits
  FitOptions fo;
  fo.reject = false;
  for (int size = 1; size <= 21; ++size) {
    for (int L = 0; L <= 2; ++L) {
      if (size % (L + 1)) continue;
      std::vector<ExpansionTerm> t;
      for (int k = 0; k < size / (L + 1); ++k)
        t.push_back({double(inf ? lead - k : lead + k), L});
      AsymptoticModel m(t, d);
      auto e = fit_expansion(xs, ys, m, fo);
      if (e.fit_residual <= 1e-11 && e.condition_number <= 1e10) return m;
    }
  }
  throw NumericalError("no integer-power model fits the samples, pass --model");
}

std::string cache_key(const RunConfig& c) {
  const std::string text = c.key().dump() + "|" + ZETASUM_VERSION;
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 digest failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i)
    os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

std::string cache_directory(const RunConfig& c) {
  if (!c.cache_dir.empty()) return c.cache_dir;
  if (const char* e = std::getenv("ZETASUM_CACHE_DIR"); e && *e) return e;
  if (const char* e = std::getenv("XDG_CACHE_HOME"); e && *e) return std::string(e) + "/zetasum";
  if (const char* e = std::getenv("HOME"); e && *e) return std::string(e) + "/.cache/zetasum";
  return "";
}

namespace {

struct Outcome {
  int code = kExitOk;
  std::string json;
  std::string csv;
};

RealFunction expression_function(const std::string& text) {
  const Expression e = parse_expression(text);
  return RealFunction([e](double x) { return e(x); });
}

OperatorFamily family_of(const RunConfig& c) {
  const auto bc0 = parse_boundary(c.bc0), bc1 = parse_boundary(c.bc1);
  if (!c.r.empty()) return decompose(SurfaceProfile::parse(c.r), bc0, bc1);
  OperatorFamily f;
  f.V = expression_function(c.V);
  f.W = expression_function(c.W.empty() ? "0" : c.W);
  f.bc0 = bc0;
  f.bc1 = bc1;
  return f;
}

Outcome run_regint(const RunConfig& c) {
  RealFunction f = expression_function(c.expr);
  const double b = c.to ? *c.to : std::numeric_limits<double>::infinity();
  std::optional<AsymptoticModel> at_inf, at_zero;
  if (!c.to) at_inf = c.model.empty() ? guess_model(f, Direction::to_infinity)
                                      : parse_model(c.model, Direction::to_infinity);
  if (c.from == 0.0) at_zero = guess_model(f, Direction::to_zero);
  RegValue v = reg_int(f, c.from, b, at_inf, at_zero);
  Json j;
  j["command"] = "regint";
  j["expr"] = c.expr;
  j["from"] = c.from;
  j["to"] = c.to ? Json(*c.to) : Json("inf");
  if (at_inf) j["model"] = to_string(*at_inf);
  j["result"] = to_json(v);
  return {kExitOk, dump(j), ""};
}

Outcome run_regsum(const RunConfig& c) {
  RealFunction f = expression_function(c.expr);
  const auto model = c.model.empty() ? guess_model(f, Direction::to_infinity)
                                     : parse_model(c.model, Direction::to_infinity);
  RegSumOptions o;
  o.method = c.method == "em" ? SumMethod::euler_maclaurin : SumMethod::direct;
  RegValue v = reg_sum(f, static_cast<int>(c.from), model, o);
  Json j;
  j["command"] = "regsum";
  j["expr"] = c.expr;
  j["from"] = static_cast<int>(c.from);
  j["method"] = o.method == SumMethod::direct ? "direct" : "em";
  j["model"] = to_string(model);
  j["result"] = to_json(v);
  return {kExitOk, dump(j), ""};
}

Outcome run_sl(const RunConfig& c) {
  const OperatorFamily f = family_of(c);
  const SLOperator op = f.op(c.lambda);
  op.validate();
  Json j;
  j["command"] = "sl " + c.subcommand;
  j["V"] = c.V;
  j["W"] = c.W.empty() ? "0" : c.W;
  j["bc0"] = to_string(op.bc0);
  j["bc1"] = to_string(op.bc1);
  j["lambda"] = c.lambda;
  if (c.subcommand == "eig") {
    j["result"] = to_json(eigenvalues(op, c.count));
  } else if (c.subcommand == "trace") {
    j["z"] = c.z;
    j["power"] = c.power;
    j["d_lambda"] = c.d_lambda;
    j["d_z"] = c.d_z;
    j["result"] = resolvent_trace(op, c.z, c.power, c.d_lambda, c.d_z);
  } else {
    const std::string m = c.method.empty() ? "gy" : c.method;
    const LogDetMethod lm = m == "gy"   ? LogDetMethod::gelfand_yaglom
                            : m == "pf" ? LogDetMethod::resolvent_pf
                                        : LogDetMethod::resolvent_zeta;
    j["method"] = m;
    j["result"] = to_json(logdet(op, lm));
  }
  return {kExitOk, dump(j), ""};
}

Outcome run_phg(const RunConfig& c) {
  const OperatorFamily f = family_of(c);
  f.op(0).validate();
  std::mutex mu;
  std::vector<std::tuple<double, double, double>> samples;
  const int power = c.gamma0 == 3.0 ? 2 : 1;
  auto trace = [&](double lambda, double z) {
    const double v = resolvent_trace(f.op(lambda), z, power);
    std::lock_guard<std::mutex> lock(mu);
    samples.emplace_back(lambda, z, v);
    return v;
  };
  if (c.gamma0 != 3.0 && c.gamma0 != 1.0)
    throw DomainError("phg extract supports gamma0 = 1 (Tr^-1) or 3 (Tr^-2)");
  PhgOptions o;
  o.K = c.K;
  o.r0 = std::max(phg_start_radius(f.V), 2.0 * f.threshold());
  auto e = extract_phg(trace, c.gamma0, o,
                       power == 2 ? "Tr(Delta_lambda + z^2)^-2" : "Tr(Delta_lambda + z^2)^-1");
  Json j;
  j["command"] = "phg extract";
  j["provenance"] = e.provenance;
  j["gamma0"] = e.gamma0;
  j["remainder_order"] = e.remainder_order;
  j["fit_residual"] = e.fit_residual;
  j["held_out_radius"] = e.held_out_radius;
  j["held_out_error"] = e.held_out_error;
  j["profiles"] = to_json(e);
  std::sort(samples.begin(), samples.end());
  std::ostringstream csv;
  csv << "lambda,z,trace\n" << std::setprecision(17);
  for (const auto& [l, z, v] : samples) csv << l << ',' << z << ',' << v << '\n';
  return {kExitOk, dump(j), csv.str()};
}

Outcome run_assemble(const RunConfig& c) {
  const OperatorFamily f = family_of(c);
  int sigma = kDefaultSigma;
  if (c.sigma == "+1" || c.sigma == "1") sigma = 1;
  if (c.sigma == "-1") sigma = -1;
  auto res = logdet_decomposed_all(f, sigma);
  Json j;
  j["command"] = "zetasum assemble";
  j["family"] = c.r.empty() ? Json{{"V", c.V}, {"W", c.W.empty() ? "0" : c.W}} : Json{{"r", c.r}};
  j["bc0"] = c.bc0;
  j["bc1"] = c.bc1;
  int code = kExitOk;
  if (c.sigma == "resolve") {
    auto s = resolve_sigma(res, c.tol);
    j["sigma_resolution"] = to_json(s);
    if (s.sigma == 0) {
      code = kExitNumerical;
    } else if (s.sigma != sigma) {
      res = logdet_decomposed_all(f, s.sigma);
    }
  }
  std::vector<const DetReport*> reps;
  if (c.convention != "zeta") reps.push_back(&res.pf);
  if (c.convention != "pf") reps.push_back(&res.zeta);
  for (const DetReport* r : reps)
    if (!r->flags.empty() || !(r->discrepancy <= c.tol)) code = kExitNumerical;
  if (reps.size() == 1) {
    j["report"] = to_json(*reps.front());
  } else {
    j["reports"] = Json::array({to_json(res.pf), to_json(res.zeta)});
  }
  j["tolerance"] = c.tol;
  return {code, dump(j), ""};
}

Outcome execute(const RunConfig& c) {
  if (c.command == "regint") return run_regint(c);
  if (c.command == "regsum") return run_regsum(c);
  if (c.command == "sl") return run_sl(c);
  if (c.command == "phg") return run_phg(c);
  return run_assemble(c);
}

bool load_cache(const fs::path& file, Outcome& o) {
  std::ifstream in(file);
  if (!in) return false;
  try {
    auto j = nlohmann::json::parse(in);
    o.code = j.at("exit").get<int>();
    o.json = j.at("stdout").get<std::string>();
    o.csv = j.at("csv").get<std::string>();
    return true;
  } catch (const nlohmann::json::exception&) {
    return false;
  }
}

// single writer: temp file then rename, so readers never see partial entries
void store_cache(const fs::path& dir, const fs::path& file, const Outcome& o) {
  fs::create_directories(dir);
  nlohmann::ordered_json j;
  j["exit"] = o.code;
  j["stdout"] = o.json;
  j["csv"] = o.csv;
  fs::path tmp = file;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary);
    out << j.dump();
    if (!out) throw Error("cannot write cache entry " + tmp.string());
  }
  fs::rename(tmp, file);
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw DomainError("cannot write " + path);
}

}  // namespace

int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  try {
    c.validate();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  Outcome o;
  bool cached = false;
  fs::path dir, file;
  if (!c.no_cache) {
    const std::string d = cache_directory(c);
    if (!d.empty()) {
      dir = d;
      file = dir / (cache_key(c) + ".json");
      cached = load_cache(file, o);
    }
  }
  if (!cached) {
    try {
      o = execute(c);
    } catch (const NumericalError& e) {
      err << "numerical failure: " << e.what() << '\n';
      return kExitNumerical;
    } catch (const Error& e) {
      err << "error: " << e.what() << '\n';
      return kExitUsage;
    }
    if (!file.empty()) {
      try {
        store_cache(dir, file, o);
      } catch (const std::exception& e) {
        err << "warning: cache not written: " << e.what() << '\n';
      }
    }
  }
  try {
    if (c.out.empty())
      out << o.json;
    else
      write_file(c.out, o.json);
    if (!c.csv.empty()) {
      if (o.csv.empty()) err << "warning: this command produces no CSV table\n";
      else write_file(c.csv, o.csv);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  if (o.code == kExitNumerical) err << "numerical tolerance not met, see the report flags\n";
  return o.code;
}

namespace {

void add_outputs(CLI::App* a, RunConfig& c) {
  a->add_option("--out", c.out, "write the JSON result here instead of stdout");
  a->add_option("--cache-dir", c.cache_dir, "result cache directory");
  a->add_flag("--no-cache", c.no_cache, "neither read nor write the cache");
}

void add_family(CLI::App* a, RunConfig& c, bool with_r) {
  if (with_r) a->add_option("--r", c.r, "profile r(x) of the surface of revolution");
  a->add_option("--V", c.V, "V(x) > 0");
  a->add_option("--W", c.W, "W(x), default 0");
  a->add_option("--bc0", c.bc0, "dirichlet | neumann | robin:<theta>");
  a->add_option("--bc1", c.bc1, "dirichlet | neumann | robin:<theta>");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  // a config file provides defaults that explicit flags override
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") {
      try {
        std::ifstream in(argv[i + 1]);
        if (!in) throw DomainError(std::string("cannot read config ") + argv[i + 1]);
        c = config_from_json(nlohmann::json::parse(in));
      } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
      }
    }
  }
  std::string config_path;

  CLI::App app{"zeta-regularized determinants of Sturm-Liouville direct sums"};
  app.set_version_flag("--version", ZETASUM_VERSION);
  app.add_option("--config", config_path, "JSON config file (see README)");
  // the command may come from the config file alone
  app.require_subcommand(0, 1);

  auto* regint = app.add_subcommand("regint", "partie finie integral of an expression");
  regint->add_option("--expr", c.expr, "integrand in x");
  regint->add_option("--from", c.from, "lower limit");
  auto* to = regint->add_option("--to", "upper limit, default infinity");
  regint->add_option("--model", c.model, "expansion at infinity, e.g. \"1:1,0,-1\"");
  add_outputs(regint, c);

  auto* regsum = app.add_subcommand("regsum", "regularized sum over integers from --from");
  regsum->add_option("--expr", c.expr, "summand in x");
  regsum->add_option("--from", c.from, "first index");
  regsum->add_option("--method", c.method, "direct | em");
  regsum->add_option("--model", c.model, "expansion at infinity");
  add_outputs(regsum, c);

  auto* sl = app.add_subcommand("sl", "single Sturm-Liouville operator");
  sl->require_subcommand(1);
  auto* det = sl->add_subcommand("det", "log determinant");
  auto* trace = sl->add_subcommand("trace", "resolvent trace");
  auto* eig = sl->add_subcommand("eig", "lowest eigenvalues");
  for (auto* s : {det, trace, eig}) {
    add_family(s, c, false);
    s->add_option("--lambda", c.lambda, "family parameter");
    add_outputs(s, c);
  }
  det->add_option("--method", c.method, "gy | pf | zeta");
  trace->add_option("--z", c.z, "resolvent parameter");
  trace->add_option("--power", c.power, "1 or 2");
  trace->add_option("--d-lambda", c.d_lambda, "lambda derivative order");
  trace->add_option("--d-z", c.d_z, "z derivative order");
  eig->add_option("--count", c.count, "number of eigenvalues");

  auto* phg = app.add_subcommand("phg", "joint expansion of resolvent traces");
  phg->require_subcommand(1);
  auto* extract = phg->add_subcommand("extract", "extract h_0..h_K");
  add_family(extract, c, true);
  extract->add_option("--K", c.K, "highest order");
  extract->add_option("--gamma0", c.gamma0, "3 for Tr^-2, 1 for Tr^-1");
  extract->add_option("--csv", c.csv, "write the sampled traces here");
  add_outputs(extract, c);

  auto* zs = app.add_subcommand("zetasum", "determinant of the direct sum");
  zs->require_subcommand(1);
  auto* assemble = zs->add_subcommand("assemble", "decomposed and direct log det");
  add_family(assemble, c, true);
  assemble->add_option("--convention", c.convention, "pf | zeta | both");
  assemble->add_option("--sigma", c.sigma, "default | +1 | -1 | resolve");
  assemble->add_option("--tol", c.tol, "discrepancy tolerance");
  add_outputs(assemble, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    const int rc = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return rc == 0 ? kExitOk : kExitUsage;
  }
  if (to->count()) c.to = to->as<double>();

  if (regint->parsed()) c.command = "regint";
  if (regsum->parsed()) c.command = "regsum";
  if (sl->parsed()) {
    c.command = "sl";
    c.subcommand = det->parsed() ? "det" : trace->parsed() ? "trace" : "eig";
  }
  if (phg->parsed()) c.command = "phg", c.subcommand = "extract";
  if (zs->parsed()) c.command = "zetasum", c.subcommand = "assemble";
  if (c.command.empty()) {
    err << "error: a subcommand is required\n" << app.help();
    return kExitUsage;
  }
  return run(c, out, err);
}

}  // namespace zetasum
