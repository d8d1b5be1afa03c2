#include "sketchml/prep.hpp"

#include <cmath>

#include "sketchml/common.hpp"

namespace sketchml {

ImputeParams fit_imputer(const Dataset& train) {
    const std::size_t n = train.n_rows(), d = train.n_features();
    ImputeParams params;
    params.fill.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (train.is_missing(i, j)) continue;
            sum += train.features(i, j);
            ++count;
        }
        if (count == 0)
            throw Error("prep", "feature column " + std::to_string(j) +
                                    " ('" + train.feature_names[j] + "') is fully missing");
        params.fill[j] = sum / static_cast<double>(count);
    }
    return params;
}

Dataset apply_imputer(const Dataset& data, const ImputeParams& params) {
    if (params.fill.size() != data.n_features())
        throw Error("prep", "imputer dimension mismatch");
    Dataset out = data;
    for (std::size_t i = 0; i < out.n_rows(); ++i)
        for (std::size_t j = 0; j < out.n_features(); ++j)
            if (out.is_missing(i, j)) out.features(i, j) = params.fill[j];
    out.missing_mask.assign(out.missing_mask.size(), 0);
    return out;
}

ScalerParams fit_scaler(const Dataset& train) {
    const std::size_t n = train.n_rows(), d = train.n_features();
    ScalerParams params;
    params.mean.resize(d);
    params.stddev.resize(d);
    params.fitted_on = n;
    for (std::size_t j = 0; j < d; ++j) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += train.features(i, j);
        const double mean = sum / static_cast<double>(n);
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double dlt = train.features(i, j) - mean;
            var += dlt * dlt;
        }
        var /= static_cast<double>(n);
        params.mean[j] = mean;
        params.stddev[j] = std::max(std::sqrt(var), kStdFloor);
    }
    return params;
}

Dataset apply_scaler(const Dataset& data, const ScalerParams& params) {
    if (params.mean.size() != data.n_features())
        throw Error("prep", "scaler dimension mismatch");
    Dataset out = data;
    for (std::size_t i = 0; i < out.n_rows(); ++i)
        for (std::size_t j = 0; j < out.n_features(); ++j)
            out.features(i, j) = (out.features(i, j) - params.mean[j]) / params.stddev[j];
    return out;
}

}  // namespace sketchml
