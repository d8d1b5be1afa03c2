#include "sketchml/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "sketchml/dataset_ops.hpp"
#include "sketchml/prep.hpp"

namespace sketchml {

namespace {

double as_double(const nlohmann::json& v) { return v.get<double>(); }

bool warm_compatible(const Assignment& prev, const Assignment& next) {
    if (prev.sketch_id != next.sketch_id) return false;
    auto pit = prev.values.find("max_iter");
    auto nit = next.values.find("max_iter");
    if (pit == prev.values.end() || nit == next.values.end()) return false;
    if (!(as_double(nit->second) > as_double(pit->second))) return false;
    for (const auto& [name, value] : next.values) {
        if (name == "max_iter") continue;
        auto it = prev.values.find(name);
        if (it == prev.values.end() || it->second != value) return false;
    }
    return prev.values.size() == next.values.size();
}

bool same_except(const std::map<std::string, nlohmann::json>& a,
                 const std::map<std::string, nlohmann::json>& b, const std::string& hole) {
    if (a.size() != b.size()) return false;
    for (const auto& [name, value] : a) {
        if (name == hole) continue;
        auto it = b.find(name);
        if (it == b.end() || it->second != value) return false;
    }
    return b.count(hole) == a.count(hole);
}

}  // namespace

std::pair<Dataset, FeatureMask> select_features(const Sketch&, const Dataset& train,
                                                FeatureSelectMode mode) {
    FeatureMask mask;
    mask.method = mode;
    mask.mask.assign(train.n_features(), true);
    if (mode == FeatureSelectMode::variance_threshold) {
        Dataset prepped = apply_imputer(train, fit_imputer(train));
        prepped = apply_scaler(prepped, fit_scaler(prepped));
        const ScalerParams post = fit_scaler(prepped);
        for (std::size_t j = 0; j < train.n_features(); ++j) {
            const double var = post.stddev[j] * post.stddev[j];
            if (var < 1e-8) mask.mask[j] = false;
        }
        if (mask.selected() == 0) mask.mask.assign(train.n_features(), true);
    }
    return {select_columns(train, mask.mask), mask};
}

std::vector<SkipEntry> apply_monotone_rule(const Sketch& sketch, const EvalRecord& latest,
                                           const std::vector<EvalRecord>& records,
                                           std::deque<Assignment>& remaining, double epsilon) {
    std::vector<SkipEntry> skipped;
    if (latest.failed) return skipped;
    for (const auto& hole : sketch.holes) {
        if (hole.kind != HoleKind::ordered_numeric) continue;
        auto vit = latest.assignment.values.find(hole.name);
        if (vit == latest.assignment.values.end()) continue;
        const auto pos = std::find(hole.candidates.begin(), hole.candidates.end(), vit->second);
        if (pos == hole.candidates.end() || pos == hole.candidates.begin()) continue;
        const nlohmann::json prev_value = *(pos - 1);

        const EvalRecord* sibling = nullptr;
        for (const auto& r : records) {
            if (r.failed || r.classifier_id != latest.classifier_id) continue;
            auto it = r.assignment.values.find(hole.name);
            if (it == r.assignment.values.end() || it->second != prev_value) continue;
            if (same_except(r.assignment.values, latest.assignment.values, hole.name))
                sibling = &r;
        }
        if (!sibling) continue;
        if (latest.mean_accuracy > sibling->mean_accuracy + epsilon) continue;

        const double threshold = as_double(vit->second);
        for (auto it = remaining.begin(); it != remaining.end();) {
            auto hit = it->values.find(hole.name);
            const bool prune = hit != it->values.end() && as_double(hit->second) > threshold &&
                               same_except(it->values, latest.assignment.values, hole.name);
            if (prune) {
                skipped.push_back({*it, "monotone:" + hole.name, 0});
                it = remaining.erase(it);
            } else {
                ++it;
            }
        }
    }
    return skipped;
}

bool is_linear_family_record(const EvalRecord& record) {
    if (record.classifier_id == ClassifierId::perceptron ||
        record.classifier_id == ClassifierId::linear_svm)
        return true;
    if (record.classifier_id == ClassifierId::kernel_svm) {
        auto it = record.assignment.values.find("kernel");
        return it != record.assignment.values.end() && it->second == "linear";
    }
    return false;
}

bool is_nonlinear_record(const EvalRecord& record) {
    if (record.classifier_id != ClassifierId::kernel_svm) return false;
    auto it = record.assignment.values.find("kernel");
    return it != record.assignment.values.end() && it->second != "linear";
}

bool should_demote_linear(const std::vector<EvalRecord>& records, double margin) {
    double best_linear = -1.0, best_nonlinear = -1.0;
    for (const auto& r : records) {
        if (r.failed) continue;
        if (is_linear_family_record(r)) best_linear = std::max(best_linear, r.mean_accuracy);
        if (is_nonlinear_record(r)) best_nonlinear = std::max(best_nonlinear, r.mean_accuracy);
    }
    return best_linear >= 0.0 && best_nonlinear >= 0.0 &&
           best_nonlinear - best_linear > margin;
}

ResultsLedger run_search(const SearchSpace& space, const Dataset& train, const FoldPlan& plan,
                         const Budget& budget, const SearchOptions& options) {
    struct SketchState {
        Sketch sketch;
        std::deque<Assignment> remaining;
    };
    std::deque<SketchState> pending;
    ResultsLedger ledger;
    for (const auto& sketch : space.sketches) {
        SketchState state{sketch, {}};
        for (auto& a : enumerate(sketch)) state.remaining.push_back(std::move(a));
        ledger.initial_size += state.remaining.size();
        pending.push_back(std::move(state));
    }

    const auto t_start = std::chrono::steady_clock::now();
    std::size_t seq = 0;
    bool interrupted = false;
    auto budget_tripped = [&] {
        if (budget.max_evaluations && ledger.records.size() >= *budget.max_evaluations)
            return true;
        if (budget.wall_clock_seconds) {
            const double elapsed =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
                    .count();
            if (elapsed > *budget.wall_clock_seconds) return true;
        }
        return false;
    };

    while (!pending.empty() && !interrupted) {
        SketchState state = std::move(pending.front());
        pending.pop_front();

        auto [view, mask] = select_features(state.sketch, train, options.feature_select);
        (void)view;  // evaluate_model applies the mask itself

        std::optional<Assignment> prev_assignment;
        std::vector<TrainedModel> prev_models;
        while (!state.remaining.empty()) {
            if (budget_tripped()) {
                ledger.events.push_back("budget exhausted after " +
                                        std::to_string(ledger.records.size()) +
                                        " evaluations");
                interrupted = true;
                break;
            }
            Assignment a = std::move(state.remaining.front());
            state.remaining.pop_front();

            ModelSpec spec;
            spec.id = a.sketch_id;
            spec.seed = options.seed;
            for (const auto& [name, value] : a.values) spec.params[name] = value;

            const std::vector<TrainedModel>* warm = nullptr;
            ModelSpec effective = spec;
            if (options.warm_start && prev_assignment && !prev_models.empty() &&
                warm_compatible(*prev_assignment, a)) {
                // resume from the previous fold models; max_iter becomes the
                // additional epoch budget on top of what they already ran
                const double prev_iters = as_double(prev_assignment->values.at("max_iter"));
                const double next_iters = as_double(a.values.at("max_iter"));
                effective.params["max_iter"] =
                    static_cast<long>(next_iters) - static_cast<long>(prev_iters);
                warm = &prev_models;
            }

            std::vector<TrainedModel> fold_models;
            EvalRecord record =
                evaluate_model(effective, train, plan, mask, warm, &fold_models);
            record.assignment = a;
            record.seq = seq++;
            if (options.on_evaluation) options.on_evaluation(record);
            ledger.records.push_back(record);
            prev_assignment = std::move(a);
            prev_models = std::move(fold_models);

            if (options.dynamic_pruning) {
                auto skipped = apply_monotone_rule(state.sketch, ledger.records.back(),
                                                   ledger.records, state.remaining,
                                                   options.monotone_epsilon);
                for (auto& skip : skipped) {
                    skip.seq = seq++;
                    ledger.skips.push_back(std::move(skip));
                }
            }
        }

        if (!interrupted && options.reprioritization && !pending.empty() &&
            should_demote_linear(ledger.records, options.demotion_margin)) {
            // stable: demoted sketches keep their relative order at the tail
            std::deque<SketchState> front, back;
            for (auto& s : pending) {
                const bool linear = s.sketch.id == ClassifierId::perceptron ||
                                    s.sketch.id == ClassifierId::linear_svm;
                (linear ? back : front).push_back(std::move(s));
            }
            if (!back.empty()) {
                ledger.events.push_back("linear-family sketches demoted to tail");
                pending = std::move(front);
                for (auto& s : back) pending.push_back(std::move(s));
            }
        }
    }
    return ledger;
}

const EvalRecord& select_best(const ResultsLedger& ledger) {
    const EvalRecord* best = nullptr;
    for (const auto& r : ledger.records) {
        if (r.failed) continue;
        if (!best || r.mean_accuracy > best->mean_accuracy ||
            (r.mean_accuracy == best->mean_accuracy &&
             (r.std_accuracy < best->std_accuracy ||
              (r.std_accuracy == best->std_accuracy && r.seq < best->seq))))
            best = &r;
    }
    if (!best) throw Error("engine", "no successful evaluation in the ledger");
    return *best;
}

std::vector<std::string> final_predict(const EvalRecord& best, const Dataset& train,
                                       const Dataset& test, std::uint64_t seed) {
    if (test.n_features() != train.n_features())
        throw Error("engine", "train/test feature count mismatch");
    if (test.n_rows() == 0) return {};

    const ImputeParams imp = fit_imputer(train);
    Dataset fit_train = apply_imputer(train, imp);
    Dataset fit_test = apply_imputer(test, imp);
    const ScalerParams sc = fit_scaler(fit_train);
    fit_train = apply_scaler(fit_train, sc);
    fit_test = apply_scaler(fit_test, sc);
    fit_train = select_columns(fit_train, best.features.mask);
    fit_test = select_columns(fit_test, best.features.mask);

    ModelSpec spec;
    spec.id = best.assignment.sketch_id;
    spec.seed = seed;
    for (const auto& [name, value] : best.assignment.values) spec.params[name] = value;

    const TrainedModel model = sketchml::train(spec, fit_train.features, *fit_train.labels,
                                               train.class_names.size());
    const auto predicted = predict(model, fit_test.features);
    std::vector<std::string> labels;
    labels.reserve(predicted.size());
    for (int p : predicted) labels.push_back(train.class_names[static_cast<std::size_t>(p)]);
    return labels;
}

}  // namespace sketchml
