#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "covpath/generator.hpp"

namespace covpath::cli {

enum ExitCode : int {
    kSuccess = 0,
    kInputFailure = 2,
    kNumericalFailure = 3,
    kPartialPath = 4,
};

// Runs one subcommand (solve, online, bench, verify). args excludes the
// program name. Diagnostics go to out, structured errors to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// "n=30,density=0.1,seed=1"; density and seed are optional.
// Throws InputError.
GeneratorSpec parse_gen_spec(const std::string& text, std::uint64_t default_seed);

struct VerifyReport {
    int points = 0;
    int failures = 0;
    std::vector<std::string> messages;
    bool ok() const { return failures == 0 && points > 0; }
};

// Re-validates a solve output directory written with matrices: residual,
// feasibility, weak duality, gap bound, cardinality and, for n <= 30, the
// distance to a Newton solve.
VerifyReport verify_directory(const std::filesystem::path& dir);

}  // namespace covpath::cli
