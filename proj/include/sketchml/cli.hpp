#pragma once

#include <optional>
#include <string>

#include "sketchml/crossval.hpp"
#include "sketchml/engine.hpp"
#include "sketchml/ingest.hpp"

namespace sketchml {

// Stable exit codes: 0 success, 1 usage error, 2 input error, 3 search error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitSearch = 3;

struct RunConfig {
    std::string source;
    std::optional<std::string> test_source;
    DataFormat format = DataFormat::csv;
    std::optional<bool> has_header;
    ColumnSelector label_column;
    std::size_t k = 5;
    std::uint64_t seed = kDefaultSeed;
    Budget budget;
    FeatureSelectMode feature_select = FeatureSelectMode::all;
    std::optional<std::string> out_path;     // predictions CSV
    std::optional<std::string> trace_path;   // JSON-lines search trace
    std::optional<std::string> report_path;  // human-readable summary
    bool verbose = false;
};

// Throws Error("cli", ...) on invalid flag combinations; CLI11 parse errors
// surface as CLI::ParseError inside. The SKETCHML_SEED env var seeds runs that
// give no --seed flag.
RunConfig parse_args(int argc, const char* const* argv);

int run(const RunConfig& config);

// parse + run + error reporting to stderr, returning the exit code.
int cli_main(int argc, const char* const* argv);

}  // namespace sketchml
