#include "sketchml/trace.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace sketchml {

namespace {

nlohmann::json assignment_json(const Assignment& a) {
    nlohmann::json obj = nlohmann::json::object();
    for (const auto& [name, value] : a.values) obj[name] = value;
    return obj;
}

std::string fmt_pct(std::size_t from, std::size_t to) {
    if (from == 0) return "n/a";
    const double pct = 100.0 * (1.0 - static_cast<double>(to) / static_cast<double>(from));
    std::ostringstream out;
    out.precision(1);
    out << std::fixed << pct << "%";
    return out.str();
}

std::string fmt_acc(double v) {
    std::ostringstream out;
    out.precision(4);
    out << std::fixed << v;
    return out.str();
}

}  // namespace

nlohmann::json trace_line_for(const EvalRecord& record) {
    return {{"seq", record.seq},
            {"kind", "eval"},
            {"classifier", to_string(record.classifier_id)},
            {"assignment", assignment_json(record.assignment)},
            {"mean_acc", record.failed ? nlohmann::json() : nlohmann::json(record.mean_accuracy)},
            {"std", record.failed ? nlohmann::json() : nlohmann::json(record.std_accuracy)},
            {"per_fold", record.per_fold_accuracy},
            {"rule", record.failed ? "failed:" + record.error : ""},
            {"wall_ms", 0}};
}

nlohmann::json trace_line_for(const SkipEntry& skip) {
    return {{"seq", skip.seq},
            {"kind", "skip"},
            {"classifier", to_string(skip.assignment.sketch_id)},
            {"assignment", assignment_json(skip.assignment)},
            {"mean_acc", nullptr},
            {"std", nullptr},
            {"per_fold", nlohmann::json::array()},
            {"rule", skip.rule},
            {"wall_ms", 0}};
}

void write_trace(std::ostream& out, const ResultsLedger& ledger) {
    std::vector<nlohmann::json> lines;
    lines.reserve(ledger.visited());
    for (const auto& r : ledger.records) lines.push_back(trace_line_for(r));
    for (const auto& s : ledger.skips) lines.push_back(trace_line_for(s));
    std::sort(lines.begin(), lines.end(), [](const nlohmann::json& a, const nlohmann::json& b) {
        return a.at("seq").get<std::size_t>() < b.at("seq").get<std::size_t>();
    });
    for (const auto& line : lines) out << line.dump() << "\n";
}

void write_trace_file(const std::string& path, const ResultsLedger& ledger) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("trace", "cannot open trace file for writing: " + path);
    write_trace(out, ledger);
}

std::string render_report(const ReportInputs& in) {
    if (!in.ledger) throw Error("trace", "report needs a results ledger");
    const ResultsLedger& ledger = *in.ledger;
    std::ostringstream out;

    out << "=== dataset profile ===\n"
        << "instances: " << in.profile.n_instances << "\n"
        << "features:  " << in.profile.n_features << "\n"
        << "classes:   " << in.profile.n_classes << (in.profile.is_binary ? " (binary)" : "")
        << "\n";
    switch (in.profile.separability) {
        case Separability::separable:
            out << "separability probe: separable (accuracy "
                << fmt_acc(in.profile.probe_accuracy) << ")\n";
            break;
        case Separability::not_separable:
            out << "separability probe: not separable (accuracy "
                << fmt_acc(in.profile.probe_accuracy) << ")\n";
            break;
        case Separability::unknown:
            out << "separability probe: not run\n";
            break;
    }

    const std::size_t evaluated = ledger.records.size();
    out << "\n=== candidate space ===\n"
        << "initial:           " << in.initial_space_size << "\n"
        << "after static rules: " << in.post_static_size << " (reduced "
        << fmt_pct(in.initial_space_size, in.post_static_size) << ")\n"
        << "evaluated:         " << evaluated << " (reduced "
        << fmt_pct(in.post_static_size, evaluated) << " by dynamic rules/budget, "
        << ledger.skips.size() << " rule-justified skips)\n";
    for (const auto& event : ledger.events) out << "event: " << event << "\n";

    std::vector<const EvalRecord*> ranked;
    for (const auto& r : ledger.records)
        if (!r.failed) ranked.push_back(&r);
    std::sort(ranked.begin(), ranked.end(), [](const EvalRecord* a, const EvalRecord* b) {
        if (a->mean_accuracy != b->mean_accuracy) return a->mean_accuracy > b->mean_accuracy;
        if (a->std_accuracy != b->std_accuracy) return a->std_accuracy < b->std_accuracy;
        return a->seq < b->seq;
    });

    out << "\n=== top records ===\n";
    const std::size_t top = std::min<std::size_t>(5, ranked.size());
    for (std::size_t i = 0; i < top; ++i) {
        const EvalRecord& r = *ranked[i];
        out << (i + 1) << ". " << to_string(r.classifier_id) << " "
            << assignment_json(r.assignment).dump() << " mean=" << fmt_acc(r.mean_accuracy)
            << " std=" << fmt_acc(r.std_accuracy) << "\n";
    }
    if (ranked.empty()) {
        out << "(no successful evaluation)\n";
    } else {
        const EvalRecord& best = *ranked.front();
        out << "\n=== winner ===\n"
            << to_string(best.classifier_id) << " " << assignment_json(best.assignment).dump()
            << "\ncv accuracy: " << fmt_acc(best.mean_accuracy) << " +/- "
            << fmt_acc(best.std_accuracy) << "\n";
    }

    out << "\ntotal wall time: " << fmt_acc(in.total_wall_seconds) << " s\n";
    return out.str();
}

}  // namespace sketchml
