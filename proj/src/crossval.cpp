#include "sketchml/crossval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "sketchml/dataset_ops.hpp"

namespace sketchml {

FoldPlan stratified_folds(const std::vector<int>& y, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw Error("crossval", "k must be at least 2");
    if (k > y.size())
        throw Error("crossval", "k (" + std::to_string(k) + ") exceeds instance count (" +
                                    std::to_string(y.size()) + ")");
    int n_classes = 0;
    for (int label : y) n_classes = std::max(n_classes, label + 1);

    FoldPlan plan;
    plan.k = k;
    plan.seed = seed;
    plan.fold_assignment.assign(y.size(), 0);
    std::size_t next_fold = 0;
    for (int cls = 0; cls < n_classes; ++cls) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < y.size(); ++i)
            if (y[i] == cls) members.push_back(i);
        if (members.size() < 2)
            plan.warnings.push_back("class " + std::to_string(cls) + " has " +
                                    std::to_string(members.size()) +
                                    " member(s); distributed round-robin");
        auto rng = make_rng(seed, static_cast<std::uint64_t>(cls));
        std::shuffle(members.begin(), members.end(), rng);
        for (std::size_t idx : members) {
            plan.fold_assignment[idx] = static_cast<int>(next_fold);
            next_fold = (next_fold + 1) % k;
        }
    }
    return plan;
}

EvalRecord evaluate_model(const ModelSpec& spec, const Dataset& data, const FoldPlan& plan,
                          const FeatureMask& mask,
                          const std::vector<TrainedModel>* warm_fold_models,
                          std::vector<TrainedModel>* out_fold_models,
                          EvalInstrumentation* instrumentation) {
    if (!data.labels) throw Error("crossval", "evaluate_model requires labels");
    if (plan.fold_assignment.size() != data.n_rows())
        throw Error("crossval", "fold plan does not match dataset size");

    const auto t0 = std::chrono::steady_clock::now();
    const Dataset masked = select_columns(data, mask.mask);
    const std::size_t n_classes = masked.class_names.size();
    const std::size_t k = plan.k;

    EvalRecord record;
    record.classifier_id = spec.id;
    record.features = mask;
    record.per_fold_accuracy.assign(k, 0.0);
    std::vector<std::string> fold_errors(k);
    std::vector<TrainedModel> fold_models(k);
    if (instrumentation) {
        instrumentation->fold_imputers.resize(k);
        instrumentation->fold_scalers.resize(k);
    }

#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t fi = 0; fi < static_cast<std::ptrdiff_t>(k); ++fi) {
        try {
            std::vector<std::size_t> train_rows, test_rows;
            for (std::size_t i = 0; i < masked.n_rows(); ++i) {
                if (plan.fold_assignment[i] == static_cast<int>(fi))
                    test_rows.push_back(i);
                else
                    train_rows.push_back(i);
            }
            Dataset train = select_rows(masked, train_rows);
            Dataset test = select_rows(masked, test_rows);

            // preprocessing statistics come from this fold's training rows only
            const ImputeParams imp = fit_imputer(train);
            train = apply_imputer(train, imp);
            test = apply_imputer(test, imp);
            const ScalerParams sc = fit_scaler(train);
            train = apply_scaler(train, sc);
            test = apply_scaler(test, sc);
            if (instrumentation) {
                instrumentation->fold_imputers[fi] = imp;
                instrumentation->fold_scalers[fi] = sc;
            }

            const TrainedModel* warm =
                warm_fold_models ? &(*warm_fold_models)[fi] : nullptr;
            TrainedModel model =
                sketchml::train(spec, train.features, *train.labels, n_classes, warm);
            const auto predicted = predict(model, test.features);
            record.per_fold_accuracy[fi] = accuracy(predicted, *test.labels);
            fold_models[fi] = std::move(model);
        } catch (const std::exception& e) {
            fold_errors[fi] = e.what();
        }
    }

    for (const auto& err : fold_errors) {
        if (!err.empty()) {
            record.failed = true;
            record.error = err;
        }
    }
    if (record.failed) {
        record.mean_accuracy = 0.0;
        record.std_accuracy = 0.0;
    } else {
        double mean = 0.0;
        for (double a : record.per_fold_accuracy) mean += a;
        mean /= static_cast<double>(k);
        double var = 0.0;
        for (double a : record.per_fold_accuracy) var += (a - mean) * (a - mean);
        var /= static_cast<double>(k);
        record.mean_accuracy = mean;
        record.std_accuracy = std::sqrt(var);
        if (out_fold_models) *out_fold_models = std::move(fold_models);
    }
    record.wall_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
    return record;
}

}  // namespace sketchml
