#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sketchml/ingest.hpp"
#include "sketchml/learners.hpp"
#include "sketchml/prep.hpp"
#include "sketchml/sketchspace.hpp"

namespace sketchml {

struct FoldPlan {
    std::size_t k = 5;
    std::vector<int> fold_assignment;  // per-instance fold index in [0, k)
    std::uint64_t seed = kDefaultSeed;
    std::vector<std::string> warnings;  // e.g. classes with fewer than 2 members
};

enum class FeatureSelectMode { all, variance_threshold };

struct FeatureMask {
    std::vector<bool> mask;  // at least one bit set
    FeatureSelectMode method = FeatureSelectMode::all;

    std::size_t selected() const {
        std::size_t n = 0;
        for (bool b : mask) n += b ? 1 : 0;
        return n;
    }
    bool operator==(const FeatureMask&) const = default;
};

struct EvalRecord {
    ClassifierId classifier_id = ClassifierId::perceptron;
    Assignment assignment;
    FeatureMask features;
    double mean_accuracy = 0.0;
    double std_accuracy = 0.0;  // population std over folds
    std::vector<double> per_fold_accuracy;
    double wall_ms = 0.0;
    bool failed = false;
    std::string error;
    std::size_t seq = 0;  // evaluation index, assigned by the engine
};

// Captured per-fold preprocessing parameters, for the leakage checks.
struct EvalInstrumentation {
    std::vector<ImputeParams> fold_imputers;
    std::vector<ScalerParams> fold_scalers;
};

// Within each class, instances are shuffled by seed and dealt round-robin to
// folds; the dealing position carries across classes so folds stay balanced.
FoldPlan stratified_folds(const std::vector<int>& y, std::size_t k, std::uint64_t seed);

// For each fold i: fit imputer+scaler on the training portion, train, score
// accuracy on the held-out fold. Folds may run in parallel; the record is a
// deterministic reduction independent of completion order.
//
// warm_fold_models, when given, supplies one model per fold to resume from
// (spec.max_iter then counts additional epochs); out_fold_models receives the
// fitted per-fold models for later reuse.
EvalRecord evaluate_model(const ModelSpec& spec, const Dataset& data, const FoldPlan& plan,
                          const FeatureMask& mask,
                          const std::vector<TrainedModel>* warm_fold_models = nullptr,
                          std::vector<TrainedModel>* out_fold_models = nullptr,
                          EvalInstrumentation* instrumentation = nullptr);

}  // namespace sketchml
