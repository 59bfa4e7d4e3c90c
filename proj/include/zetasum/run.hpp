#pragma once

#include <ostream>
#include <string>

#include "zetasum/config.hpp"
#include "zetasum/regcal.hpp"

namespace zetasum {

enum ExitCode { kExitOk = 0, kExitUsage = 1, kExitNumerical = 2 };

// "a:k, b, ..." : exponent a with log powers 0..k (k defaults to 0).
AsymptoticModel parse_model(const std::string& text, Direction d);
// Integer-spaced model guessed from the growth of f between two far samples.
AsymptoticModel guess_model(const RealFunction& f, Direction d);

// Hex SHA-256 of the canonical config key and the code version.
std::string cache_key(const RunConfig& c);
// Cache directory from the config, ZETASUM_CACHE_DIR, XDG_CACHE_HOME or HOME.
std::string cache_directory(const RunConfig& c);

// Executes one command; the JSON result goes to out (or c.out), diagnostics to err.
int run(const RunConfig& c, std::ostream& out, std::ostream& err);

// Parses argv with the flags documented in the README and runs.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace zetasum
