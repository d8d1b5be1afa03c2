#pragma once

#include <cstdint>

#include "sketchml/common.hpp"
#include "sketchml/ingest.hpp"

namespace sketchml {

struct FoldPlan;  // crossval.hpp

enum class Separability { unknown, separable, not_separable };

struct DatasetProfile {
    std::size_t n_instances = 0;
    std::size_t n_features = 0;
    std::size_t n_classes = 0;
    bool is_binary = false;
    Separability separability = Separability::unknown;
    double probe_accuracy = 0.0;
};

// Counts only; separability stays unset until separability_test runs.
DatasetProfile profile(const Dataset& train);

// Linear-separability probe: stratified-CV accuracy of the perceptron sketch
// at its default hole values. Accuracy >= 0.5 reads as separable; a separable
// perceptron verdict is confirmed with the linear-SVM sketch at defaults and
// both probes must agree. probe_accuracy is the accuracy of the probe that
// decided the verdict, so the >= 0.5 correspondence always holds.
void separability_test(DatasetProfile& prof, const Dataset& train, const FoldPlan& plan,
                       std::uint64_t seed = kDefaultSeed);

}  // namespace sketchml
