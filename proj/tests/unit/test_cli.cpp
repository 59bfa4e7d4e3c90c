#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <numbers>
#include <sstream>
#include <unistd.h>

#include "zetasum/config.hpp"
#include "zetasum/errors.hpp"
#include "zetasum/run.hpp"

using namespace zetasum;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {
struct Out {
  int code;
  std::string out, err;
  nlohmann::json json() const { return nlohmann::json::parse(out); }
};

Out cli(std::vector<std::string> args) {
  args.insert(args.begin(), "zetasum");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream o, e;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), o, e);
  return {code, o.str(), e.str()};
}

fs::path scratch_dir(const std::string& name) {
  auto p = fs::temp_directory_path() / ("zetasum_test_" + name + "_" + std::to_string(getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}
}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("boundary condition strings") {
    CHECK(parse_boundary("dirichlet").is_dirichlet());
    CHECK(parse_boundary("D").is_dirichlet());
    CHECK(parse_boundary("neumann").theta == Approx(std::numbers::pi / 2));
    CHECK(parse_boundary("robin:0.25").theta == 0.25);
    CHECK_THROWS_AS(parse_boundary("robin:"), DomainError);
    CHECK_THROWS_AS(parse_boundary("robin:1x"), DomainError);
    CHECK_THROWS_AS(parse_boundary("periodic"), DomainError);
    CHECK(to_string(parse_boundary("neumann")) == "neumann");
    CHECK(to_string(parse_boundary("robin:0.25")) == "robin:0.25");
  }

  TEST_CASE("model strings") {
    auto m = parse_model("1:1, 0, -1", Direction::to_infinity);
    REQUIRE(m.terms.size() == 3);
    CHECK(m.terms[0].exponent == 1.0);
    CHECK(m.terms[0].max_log == 1);
    CHECK(m.terms[2].exponent == -1.0);
    CHECK_THROWS_AS(parse_model("a:1", Direction::to_infinity), DomainError);
    CHECK_THROWS_AS(parse_model(" , ", Direction::to_infinity), DomainError);
    // terms are sorted by dominance
    auto u = parse_model("0, 1", Direction::to_infinity);
    CHECK(u.terms[0].exponent == 1.0);
  }

  TEST_CASE("guessed models") {
    auto m = guess_model([](double x) { return x * std::log(x); }, Direction::to_infinity);
    CHECK(m.terms.front().exponent == 1.0);
    CHECK(m.terms.front().max_log >= 1);
    auto l = guess_model([](double x) { return std::log(x); }, Direction::to_infinity);
    CHECK(l.terms.front().exponent == 0.0);
    auto p = guess_model([](double x) { return 1 / (x * x); }, Direction::to_infinity);
    CHECK(p.terms.front().exponent == -2.0);
  }

  TEST_CASE("config JSON round trip and validation") {
    RunConfig c;
    c.command = "sl";
    c.subcommand = "det";
    c.V = "exp(-2*x)";
    c.W = "0.25";
    c.lambda = 2;
    const auto j = to_json(c);
    const auto back = config_from_json(nlohmann::json::parse(j.dump()));
    CHECK(to_json(back) == j);
    CHECK_NOTHROW(back.validate());
    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"comand": "sl"})")), DomainError);
    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"lambda": "two"})")), DomainError);
    RunConfig bad = c;
    bad.tol = 0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = c;
    bad.bc0 = "sideways";
    CHECK_THROWS_AS(bad.validate(), DomainError);
  }

  TEST_CASE("cache keys") {
    RunConfig a;
    a.command = "regint";
    a.expr = "x";
    RunConfig b = a;
    b.out = "somewhere.json";
    b.no_cache = true;
    CHECK(cache_key(a) == cache_key(b));
    CHECK(cache_key(a).size() == 64);
    b.expr = "x+0";
    CHECK(cache_key(a) != cache_key(b));
    b = a;
    b.tol = 2e-3;
    CHECK(cache_key(a) != cache_key(b));
    a.cache_dir = "/tmp/elsewhere";
    CHECK(cache_directory(a) == "/tmp/elsewhere");
  }

  TEST_CASE("regint and regsum commands") {
    auto r = cli({"regint", "--expr", "x*log(x)", "--from", "1", "--no-cache"});
    CHECK(r.code == 0);
    CHECK(r.json()["result"]["value"].get<double>() == Approx(0.25).epsilon(1e-10));
    auto s = cli({"regsum", "--expr", "log(x)", "--no-cache"});
    CHECK(s.code == 0);
    CHECK(s.json()["result"]["value"].get<double>() ==
          Approx(0.5 * std::log(2 * std::numbers::pi)).epsilon(1e-8));
    auto f = cli({"regint", "--expr", "exp(-x)", "--from", "0", "--to", "3", "--no-cache"});
    CHECK(f.json()["result"]["value"].get<double>() == Approx(1 - std::exp(-3.0)).epsilon(1e-10));
  }

  TEST_CASE("sl commands") {
    auto e = cli({"sl", "eig", "--V", "1", "--W", "0", "--lambda", "0", "--count", "3", "--no-cache"});
    REQUIRE(e.code == 0);
    const auto ev = e.json()["result"]["eigenvalues"];
    CHECK(ev[0].get<double>() == Approx(9.8696044).epsilon(1e-8));
    CHECK(ev[1].get<double>() == Approx(39.4784176).epsilon(1e-8));
    CHECK(ev[2].get<double>() == Approx(88.8264396).epsilon(1e-8));
    auto d = cli({"sl", "det", "--V", "1", "--lambda", "1", "--no-cache"});
    CHECK(d.json()["result"]["logdet"].get<double>() ==
          Approx(std::log(2 * std::sinh(1.0))).epsilon(1e-10));
    auto t = cli({"sl", "trace", "--V", "1", "--lambda", "3", "--z", "4", "--no-cache"});
    CHECK(t.json()["result"].get<double>() ==
          Approx(1 / (10 * std::tanh(5.0)) - 0.02).epsilon(1e-10));
  }

  TEST_CASE("usage errors exit with 1") {
    auto p = cli({"regint", "--expr", "sin(x", "--no-cache"});
    CHECK(p.code == 1);
    CHECK(p.err.find("offset 5") != std::string::npos);
    CHECK(cli({"sl", "eig", "--V", "x-1", "--no-cache"}).code == 1);
    CHECK(cli({"sl", "eig", "--V", "1", "--bc0", "sideways", "--no-cache"}).code == 1);
    CHECK(cli({"frobnicate"}).code == 1);
    CHECK(cli({"zetasum", "assemble", "--r", "1", "--V", "1", "--no-cache"}).code == 1);
  }

  TEST_CASE("numerical failures exit with 2") {
    // a model that misses the log term cannot fit
    auto r = cli({"regint", "--expr", "x*log(x)", "--from", "1", "--model", "1,0", "--no-cache"});
    CHECK(r.code == 2);
  }

  TEST_CASE("config files and flag overrides") {
    const auto dir = scratch_dir("config");
    const auto cfg = dir / "run.json";
    std::ofstream(cfg) << R"({"command": "regint", "expr": "x", "from": 2, "no_cache": true})";
    auto r = cli({"--config", cfg.string()});
    REQUIRE(r.code == 0);
    CHECK(r.json()["result"]["value"].get<double>() == Approx(-2.0).epsilon(1e-10));
    auto o = cli({"--config", cfg.string(), "regint", "--from", "1"});
    REQUIRE(o.code == 0);
    CHECK(o.json()["result"]["value"].get<double>() == Approx(-0.5).epsilon(1e-10));
    std::ofstream(cfg) << R"({"command": "regint", "bogus": 1})";
    CHECK(cli({"--config", cfg.string()}).code == 1);
    fs::remove_all(dir);
  }

  TEST_CASE("results are deterministic and the cache returns them unchanged") {
    const auto dir = scratch_dir("cache");
    const std::vector<std::string> args{"phg",  "extract", "--V",  "1", "--K",
                                        "1",    "--cache-dir", dir.string()};
    auto csv_args = args;
    csv_args.insert(csv_args.end(), {"--csv", (dir / "a.csv").string()});
    auto first = cli(csv_args);
    REQUIRE(first.code == 0);
    CHECK(!fs::is_empty(dir));
    csv_args.back() = (dir / "b.csv").string();
    auto second = cli(csv_args);
    CHECK(second.code == 0);
    CHECK(second.out == first.out);
    std::ifstream a(dir / "a.csv"), b(dir / "b.csv");
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    CHECK(sa.str() == sb.str());
    CHECK(sa.str().rfind("lambda,z,trace", 0) == 0);
    // fresh computation agrees byte for byte with the cached one
    auto fresh = args;
    fresh.push_back("--no-cache");
    CHECK(cli(fresh).out == first.out);
    fs::remove_all(dir);
  }
}
