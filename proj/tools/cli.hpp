#pragma once

#include "gpid/canonical.hpp"
#include "gpid/model.hpp"
#include "gpid/solver.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace gpid::cli {

enum class Subcommand { Compute, Estimate, Bootstrap, Example, Sweep, Sample };
enum class OutputFormat { Json, Csv };

struct RunConfig {
    Subcommand subcommand = Subcommand::Compute;
    std::optional<std::string> input_path;
    std::optional<std::string> name;
    Dims dims;
    bool dims_given = false;
    SolverConfig solver;
    bool bias_correct = false;
    std::optional<int> pca_k;
    std::optional<int> bootstrap_b;
    std::optional<std::uint64_t> seed;
    canonical::SpecParams params;
    std::optional<std::string> grid;
    std::optional<long long> n;
    OutputFormat output_format = OutputFormat::Json;
    std::optional<std::string> output_path;
    std::optional<std::string> save_cov_path;
    unsigned threads = 0;
    bool trace = false;
};

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Parses START:STEP:END into the grid START, START + STEP, ... <= END.
/// An empty string or START > END yields an empty grid.
[[nodiscard]] std::vector<double> parse_grid(const std::string& text);

/// Full front end: parses argv (argv[0] is the program name), runs the
/// subcommand and writes results to `out` (or --out) and diagnostics to `err`.
[[nodiscard]] int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace gpid::cli
