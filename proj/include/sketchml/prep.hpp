#pragma once

#include <vector>

#include "sketchml/ingest.hpp"

namespace sketchml {

struct ImputeParams {
    std::vector<double> fill;  // per-feature mean over non-missing entries
};

struct ScalerParams {
    std::vector<double> mean;
    std::vector<double> stddev;  // floored at kStdFloor, always > 0
    std::size_t fitted_on = 0;
};

inline constexpr double kStdFloor = 1e-12;

ImputeParams fit_imputer(const Dataset& train);
Dataset apply_imputer(const Dataset& data, const ImputeParams& params);

// Z-score standardization. fit_scaler expects imputation to have been applied
// (no missing cells); constant columns scale to all zeros via the std floor.
ScalerParams fit_scaler(const Dataset& train);
Dataset apply_scaler(const Dataset& data, const ScalerParams& params);

}  // namespace sketchml
