#pragma once

#include <iosfwd>
#include <string>

#include "sketchml/engine.hpp"
#include "sketchml/inspect.hpp"

namespace sketchml {

// One JSON object per line, eval and skip entries interleaved by seq:
//   {"seq", "kind": "eval"|"skip", "classifier", "assignment",
//    "mean_acc", "std", "per_fold", "rule", "wall_ms"}
// wall_ms is written as 0 so identical runs produce identical bytes; real
// timings live in the report.
void write_trace(std::ostream& out, const ResultsLedger& ledger);
void write_trace_file(const std::string& path, const ResultsLedger& ledger);

nlohmann::json trace_line_for(const EvalRecord& record);
nlohmann::json trace_line_for(const SkipEntry& skip);

struct ReportInputs {
    DatasetProfile profile;
    std::size_t initial_space_size = 0;      // before static rules
    std::size_t post_static_size = 0;        // what the engine enumerated
    const ResultsLedger* ledger = nullptr;
    double total_wall_seconds = 0.0;
};

// Human-readable run summary; every figure here is recomputable from the
// trace plus the pre-search space sizes.
std::string render_report(const ReportInputs& in);

}  // namespace sketchml
