#include "sketchml/inspect.hpp"

#include "sketchml/crossval.hpp"

namespace sketchml {

DatasetProfile profile(const Dataset& train) {
    if (!train.labels) throw Error("inspect", "profiling requires labels");
    DatasetProfile prof;
    prof.n_instances = train.n_rows();
    prof.n_features = train.n_features();
    prof.n_classes = train.class_names.size();
    prof.is_binary = prof.n_classes == 2;
    if (prof.n_classes < 2) throw Error("inspect", "need at least 2 classes");
    return prof;
}

namespace {

double probe_accuracy_for(const ModelSpec& spec, const Dataset& train, const FoldPlan& plan) {
    FeatureMask all;
    all.mask.assign(train.n_features(), true);
    const EvalRecord record = evaluate_model(spec, train, plan, all);
    if (record.failed) throw Error("inspect", "separability probe failed: " + record.error);
    return record.mean_accuracy;
}

}  // namespace

void separability_test(DatasetProfile& prof, const Dataset& train, const FoldPlan& plan,
                       std::uint64_t seed) {
    // perceptron sketch at default hole values
    ModelSpec perceptron;
    perceptron.id = ClassifierId::perceptron;
    perceptron.params = {{"penalty", "none"}, {"alpha", 1e-4}, {"max_iter", 10},
                         {"eta0", 1.0},      {"shuffle", true}};
    perceptron.seed = seed;
    const double perceptron_acc = probe_accuracy_for(perceptron, train, plan);
    prof.probe_accuracy = perceptron_acc;
    if (perceptron_acc < 0.5) {
        prof.separability = Separability::not_separable;
        return;
    }

    // confirming probe: linear-SVM sketch at defaults; both must agree
    ModelSpec linear_svm;
    linear_svm.id = ClassifierId::linear_svm;
    linear_svm.params = {{"C", 1.0}, {"loss", "hinge"}, {"max_iter", 1000}, {"tol", 1e-3}};
    linear_svm.seed = seed;
    const double svm_acc = probe_accuracy_for(linear_svm, train, plan);
    if (svm_acc >= 0.5) {
        prof.separability = Separability::separable;
    } else {
        prof.separability = Separability::not_separable;
        prof.probe_accuracy = svm_acc;  // the accuracy that decided the verdict
    }
}

}  // namespace sketchml
