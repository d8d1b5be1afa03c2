#include "sketchml/kernels.hpp"

#include <atomic>
#include <cmath>

#include "sketchml/common.hpp"

namespace sketchml {

namespace {
std::atomic<bool> g_parallel{true};
}

void set_parallel_enabled(bool enabled) { g_parallel.store(enabled); }
bool parallel_enabled() { return g_parallel.load(); }

KernelKind kernel_kind_from_string(const std::string& name) {
    if (name == "linear") return KernelKind::linear;
    if (name == "rbf") return KernelKind::rbf;
    if (name == "poly") return KernelKind::poly;
    if (name == "sigmoid") return KernelKind::sigmoid;
    throw Error("kernels", "unknown kernel '" + name + "'");
}

std::string to_string(KernelKind k) {
    switch (k) {
        case KernelKind::linear: return "linear";
        case KernelKind::rbf: return "rbf";
        case KernelKind::poly: return "poly";
        case KernelKind::sigmoid: return "sigmoid";
    }
    return "?";
}

double kernel_value(const KernelParams& p, const double* x, const double* y, std::size_t n) {
    switch (p.kind) {
        case KernelKind::linear:
            return dot(x, y, n);
        case KernelKind::rbf:
            return std::exp(-p.gamma * squared_distance(x, y, n));
        case KernelKind::poly:
            return std::pow(p.gamma * dot(x, y, n) + p.coef0, p.degree);
        case KernelKind::sigmoid:
            return std::tanh(p.gamma * dot(x, y, n) + p.coef0);
    }
    return 0.0;
}

namespace {

void gram_rows(const Matrix& a, const Matrix& b, const KernelParams& p, Matrix& out,
               std::ptrdiff_t i) {
    const std::size_t n = a.cols();
    for (std::size_t j = 0; j < b.rows(); ++j)
        out(static_cast<std::size_t>(i), j) =
            kernel_value(p, a.row(static_cast<std::size_t>(i)), b.row(j), n);
}

void score_row(const Matrix& x, const Matrix& w, const std::vector<double>& b, Matrix& out,
               std::ptrdiff_t i) {
    const std::size_t n = x.cols();
    for (std::size_t c = 0; c < w.rows(); ++c)
        out(static_cast<std::size_t>(i), c) =
            dot(x.row(static_cast<std::size_t>(i)), w.row(c), n) + b[c];
}

}  // namespace

Matrix gram_matrix_serial(const Matrix& a, const Matrix& b, const KernelParams& p) {
    Matrix out(a.rows(), b.rows());
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(a.rows()); ++i)
        gram_rows(a, b, p, out, i);
    return out;
}

Matrix gram_matrix_parallel(const Matrix& a, const Matrix& b, const KernelParams& p) {
    Matrix out(a.rows(), b.rows());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(a.rows()); ++i)
        gram_rows(a, b, p, out, i);
    return out;
}

Matrix gram_matrix(const Matrix& a, const Matrix& b, const KernelParams& p) {
    return parallel_enabled() ? gram_matrix_parallel(a, b, p) : gram_matrix_serial(a, b, p);
}

Matrix linear_scores_serial(const Matrix& x, const Matrix& weights,
                            const std::vector<double>& intercepts) {
    Matrix out(x.rows(), weights.rows());
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(x.rows()); ++i)
        score_row(x, weights, intercepts, out, i);
    return out;
}

Matrix linear_scores_parallel(const Matrix& x, const Matrix& weights,
                              const std::vector<double>& intercepts) {
    Matrix out(x.rows(), weights.rows());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(x.rows()); ++i)
        score_row(x, weights, intercepts, out, i);
    return out;
}

Matrix linear_scores(const Matrix& x, const Matrix& weights,
                     const std::vector<double>& intercepts) {
    return parallel_enabled() ? linear_scores_parallel(x, weights, intercepts)
                              : linear_scores_serial(x, weights, intercepts);
}

}  // namespace sketchml
