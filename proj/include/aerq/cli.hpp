#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "aerq/core.hpp"
#include "aerq/generator.hpp"

namespace aerq::cli {

enum ExitCode : int {
    kSuccess = 0,
    kVerificationFailure = 1,
    kInputFailure = 2,
    kNumericalFailure = 3,
};

enum class Command { Fit, RankScores, Aerq, Verify, Simulate };
enum class Format { Json, Csv };

struct RunConfig {
    Command command = Command::Aerq;
    std::optional<std::filesystem::path> input;
    std::optional<std::filesystem::path> output;
    double alpha = 1.0;
    Tolerances tol;
    SizeMode size_mode = SizeMode::Strict;
    std::optional<std::uint64_t> seed;
    Format format = Format::Json;

    /// verify: number of generated instances (0 with --input).
    std::size_t generate = 0;
    CorpusSpec corpus;
    /// 0 selects the hardware concurrency.
    unsigned threads = 1;

    /// simulate
    GeneratorSpec simulate;
};

/// Parses "A" or "A:B" into an inclusive range.
std::pair<Index, Index> parse_range(const std::string& text);
/// Comma-separated doubles.
Vector parse_vector(const std::string& text);

/// Verification corpus (generated or a single file). Reports go to `out` in
/// instance order whatever the thread count; the JSON summary record comes
/// last (to `err` for CSV output). Returns kSuccess iff no instance failed.
int run_verify(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Writes the generated CSV to config.output ("-" for `out`).
int run_simulate(const RunConfig& config, std::ostream& out);

int run_fit(const RunConfig& config, std::ostream& out);
int run_rank_scores(const RunConfig& config, std::ostream& out);
int run_aerq(const RunConfig& config, std::ostream& out);

/// Full command line: parse, dispatch and map errors to exit codes.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace aerq::cli
