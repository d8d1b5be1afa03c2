#pragma once

#include <cstddef>
#include <string>

#include "sketchml/matrix.hpp"

namespace sketchml {

enum class KernelKind { linear, rbf, poly, sigmoid };

KernelKind kernel_kind_from_string(const std::string& name);
std::string to_string(KernelKind k);

struct KernelParams {
    KernelKind kind = KernelKind::linear;
    double gamma = 1.0;   // 1/n_features unless overridden
    double coef0 = 0.0;
    int degree = 3;       // poly only
};

double kernel_value(const KernelParams& p, const double* x, const double* y, std::size_t n);

// Gram matrix between the rows of A and the rows of B (result is A.rows x B.rows).
// The serial variant is the reference implementation; the parallel variant
// distributes rows over OpenMP threads and must produce bitwise-equal output.
Matrix gram_matrix_serial(const Matrix& a, const Matrix& b, const KernelParams& p);
Matrix gram_matrix_parallel(const Matrix& a, const Matrix& b, const KernelParams& p);
Matrix gram_matrix(const Matrix& a, const Matrix& b, const KernelParams& p);

// Row-parallel X * W^T + intercept broadcast, used by every linear learner's
// decision function. Same serial/parallel contract as gram_matrix.
Matrix linear_scores_serial(const Matrix& x, const Matrix& weights,
                            const std::vector<double>& intercepts);
Matrix linear_scores_parallel(const Matrix& x, const Matrix& weights,
                              const std::vector<double>& intercepts);
Matrix linear_scores(const Matrix& x, const Matrix& weights,
                     const std::vector<double>& intercepts);

// Process-wide switch; parallel kernels fall back to serial when disabled or
// when OpenMP is not compiled in.
void set_parallel_enabled(bool enabled);
bool parallel_enabled();

}  // namespace sketchml
