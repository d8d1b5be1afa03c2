#pragma once

#include <deque>
#include <functional>
#include <optional>

#include "sketchml/crossval.hpp"
#include "sketchml/sketchspace.hpp"

namespace sketchml {

struct SkipEntry {
    Assignment assignment;
    std::string rule;
    std::size_t seq = 0;
};

// Append-only record of every evaluation and every rule-justified skip; the
// single source of truth for winner selection and the trace file.
struct ResultsLedger {
    std::vector<EvalRecord> records;
    std::vector<SkipEntry> skips;
    std::vector<std::string> events;  // demotions, budget trips, fail-opens
    std::size_t initial_size = 0;

    std::size_t visited() const { return records.size() + skips.size(); }
};

struct Budget {
    std::optional<double> wall_clock_seconds = 600.0;
    std::optional<std::size_t> max_evaluations;  // unset = unlimited
};

struct SearchOptions {
    bool dynamic_pruning = true;
    bool reprioritization = true;
    bool warm_start = true;
    FeatureSelectMode feature_select = FeatureSelectMode::all;
    std::uint64_t seed = kDefaultSeed;
    double monotone_epsilon = 0.005;   // accuracy slack for the monotone rule
    double demotion_margin = 0.15;     // linear-family demotion threshold
    std::function<void(const EvalRecord&)> on_evaluation;  // progress hook
};

// Default: the all-features mask. Variance-threshold mode drops features whose
// post-scaling variance is below 1e-8; an empty result falls back to all.
std::pair<Dataset, FeatureMask> select_features(const Sketch& sketch, const Dataset& train,
                                                FeatureSelectMode mode);

// Algorithm outer loop: sketches in space order, assignments in enumeration
// order, monotone-numeric pruning after each evaluation, cross-model
// reprioritization after each sketch, stop on exhaustion or budget.
ResultsLedger run_search(const SearchSpace& space, const Dataset& train, const FoldPlan& plan,
                         const Budget& budget, const SearchOptions& options = {});

// mean_accuracy descending, then std ascending, then earliest seq.
const EvalRecord& select_best(const ResultsLedger& ledger);

// Refit the winning spec on all labeled data (winning mask applied, global
// train-fitted preprocessing) and predict decoded class names for test.
std::vector<std::string> final_predict(const EvalRecord& best, const Dataset& train,
                                       const Dataset& test, std::uint64_t seed = kDefaultSeed);

// --- rule internals, exposed for the rule-mechanics tests ------------------

// Fires when the ledger holds a sibling pair with consecutive candidates of an
// ordered_numeric hole and no accuracy gain; removes every remaining matching
// assignment with a strictly higher value. Returns the skipped assignments.
std::vector<SkipEntry> apply_monotone_rule(const Sketch& sketch, const EvalRecord& latest,
                                           const std::vector<EvalRecord>& records,
                                           std::deque<Assignment>& remaining, double epsilon);

bool is_linear_family_record(const EvalRecord& record);
bool is_nonlinear_record(const EvalRecord& record);

// True when the best linear-family record trails the best non-linear record by
// more than the margin (both present).
bool should_demote_linear(const std::vector<EvalRecord>& records, double margin);

}  // namespace sketchml
