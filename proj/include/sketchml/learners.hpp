#pragma once

#include <cstdint>
#include <vector>

#include "sketchml/kernels.hpp"
#include "sketchml/matrix.hpp"
#include "sketchml/model_spec.hpp"

namespace sketchml {

// One binary SVM produced by SMO: the rows of support_vectors correspond to
// dual_coef entries (alpha_i * y_i, bounded by C in magnitude).
struct BinaryKernelMachine {
    Matrix support_vectors;
    std::vector<double> dual_coef;
    double intercept = 0.0;
    double kkt_violation = 0.0;
};

struct TrainedModel {
    ClassifierId id = ClassifierId::perceptron;
    std::size_t n_classes = 0;
    std::size_t n_features = 0;

    // Linear families: one row per machine (1 for binary, n_classes otherwise).
    Matrix weights;
    std::vector<double> intercepts;
    bool multinomial = false;  // logistic regression softmax head

    // kernel_svm
    KernelParams kparams;
    std::vector<BinaryKernelMachine> machines;

    std::vector<long> iterations_run;  // absolute epoch count per machine
    std::vector<std::uint8_t> converged;
    bool cap_hit = false;
    double final_objective = 0.0;

    // the ModelSpec hyperparameters, kept for warm-start compatibility checks
    nlohmann::json hyperparams = nlohmann::json::object();

    std::size_t n_machines() const { return n_classes == 2 ? 1 : n_classes; }
};

// Deterministic training. When warm is given it must match the ModelSpec in
// classifier and every hyperparameter except the iteration budget, and
// training resumes from its coefficients: max_iter then counts additional
// epochs on top of warm->iterations_run, replaying the exact update sequence
// a cold run would apply at that point.
TrainedModel train(const ModelSpec& spec, const Matrix& x, const std::vector<int>& y,
                   std::size_t n_classes, const TrainedModel* warm = nullptr);

// Per-class score matrix (n_rows x n_classes). Binary models score class 1
// with +f and class 0 with -f; multinomial logistic regression reports logits.
Matrix decision_values(const TrainedModel& model, const Matrix& x);

// Argmax over class scores with deterministic tie-break to the lowest index.
std::vector<int> predict(const TrainedModel& model, const Matrix& x);

double accuracy(const std::vector<int>& predicted, const std::vector<int>& actual);

// Versioned JSON snapshot of a trained model for the report. Not a
// stability-guaranteed format.
nlohmann::json model_to_json(const TrainedModel& model);

// --- exposed internals for oracle-backed tests -----------------------------

// Binary logistic loss pieces on +/-1 targets; objective convention is
// (1/C) * regularizer + mean data loss throughout.
double logreg_binary_objective(const Matrix& x, const std::vector<double>& ypm,
                               const std::vector<double>& w, double b, double c_value,
                               bool l1);
void logreg_binary_gradient(const Matrix& x, const std::vector<double>& ypm,
                            const std::vector<double>& w, double b, double c_value, bool l1,
                            std::vector<double>& gw, double& gb);

double squared_hinge_objective(const Matrix& x, const std::vector<double>& ypm,
                               const std::vector<double>& w, double b, double c_value);
void squared_hinge_gradient(const Matrix& x, const std::vector<double>& ypm,
                            const std::vector<double>& w, double b, double c_value,
                            std::vector<double>& gw, double& gb);

struct SmoResult {
    std::vector<double> alpha;  // box-constrained dual variables, 0 <= a_i <= C
    double intercept = 0.0;
    double dual_objective = 0.0;  // sum(alpha) - 0.5 * a^T Q a (maximization form)
    double kkt_violation = 0.0;
    long iterations = 0;
    bool cap_hit = false;
};

// Maximal-violating-pair SMO over a precomputed kernel matrix.
SmoResult smo_solve(const Matrix& kernel, const std::vector<double>& ypm, double c_value,
                    double tol, long max_iter);

}  // namespace sketchml
