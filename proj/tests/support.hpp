#pragma once

#include <cstdio>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "sketchml/ingest.hpp"
#include "sketchml/learners.hpp"

namespace testsupport {

inline std::string data_path(const std::string& name) {
    return std::string(SKETCHML_DATA_DIR) + "/" + name;
}

inline sketchml::Dataset load(const std::string& name) {
    const auto table = sketchml::acquire(data_path(name), sketchml::DataFormat::csv, true);
    return sketchml::split_label(table, sketchml::ColumnSelector{});
}

// Writes content to a unique temp file; the file lives until process exit.
inline std::string temp_csv(const std::string& content) {
    static int counter = 0;
    const std::string path =
        "/tmp/sketchml_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) +
        ".csv";
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path;
}

// The four XOR corners, labels a/b; not linearly separable.
inline sketchml::Dataset xor_dataset() {
    sketchml::Dataset d;
    d.features = sketchml::Matrix(4, 2);
    const double pts[4][2] = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
    for (int i = 0; i < 4; ++i) {
        d.features(i, 0) = pts[i][0];
        d.features(i, 1) = pts[i][1];
    }
    d.labels = std::vector<int>{0, 1, 1, 0};
    d.feature_names = {"x0", "x1"};
    d.class_names = {"a", "b"};
    d.missing_mask.assign(8, 0);
    return d;
}

// Two unit-variance Gaussian blobs whose centers sit `margin` sigmas apart.
inline sketchml::Dataset blobs_dataset(std::size_t per_class = 40, double margin = 6.0,
                                       unsigned seed = 7) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise;
    sketchml::Dataset d;
    d.features = sketchml::Matrix(2 * per_class, 2);
    d.labels = std::vector<int>(2 * per_class);
    for (std::size_t i = 0; i < 2 * per_class; ++i) {
        const int cls = i < per_class ? 0 : 1;
        const double cx = cls == 0 ? 0.0 : margin;
        d.features(i, 0) = cx + noise(rng);
        d.features(i, 1) = noise(rng);
        (*d.labels)[i] = cls;
    }
    d.feature_names = {"x0", "x1"};
    d.class_names = {"neg", "pos"};
    d.missing_mask.assign(4 * per_class, 0);
    return d;
}

// Projected-gradient reference solver for the SVM dual:
//   max sum(a) - 0.5 a^T Q a   s.t. 0 <= a_i <= C, sum(a_i y_i) = 0
// with Q_ij = y_i y_j K_ij. Projection onto the box intersected with the
// hyperplane is computed by bisection on the dual multiplier.
struct QpOracle {
    std::vector<double> alpha;
    double objective = 0.0;
};

inline std::vector<double> project_box_hyperplane(std::vector<double> v,
                                                  const std::vector<double>& y, double c) {
    auto clip = [&](double lambda) {
        std::vector<double> a(v.size());
        double s = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            double ai = v[i] - lambda * y[i];
            ai = std::min(c, std::max(0.0, ai));
            a[i] = ai;
            s += ai * y[i];
        }
        return std::pair(a, s);
    };
    double lo = -1e6, hi = 1e6;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (clip(mid).second > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return clip(0.5 * (lo + hi)).first;
}

inline QpOracle qp_reference(const sketchml::Matrix& kernel, const std::vector<double>& y,
                             double c, long iters = 200000) {
    const std::size_t n = y.size();
    std::vector<double> a(n, 0.0);
    // Lipschitz bound for the gradient: row-sum norm of Q
    double lip = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) row += std::abs(kernel(i, j));
        lip = std::max(lip, row);
    }
    const double step = 1.0 / std::max(lip, 1e-12);
    for (long it = 0; it < iters; ++it) {
        std::vector<double> grad(n);
        for (std::size_t i = 0; i < n; ++i) {
            double qa = 0.0;
            for (std::size_t j = 0; j < n; ++j) qa += y[i] * y[j] * kernel(i, j) * a[j];
            grad[i] = 1.0 - qa;
        }
        std::vector<double> next(n);
        for (std::size_t i = 0; i < n; ++i) next[i] = a[i] + step * grad[i];
        next = project_box_hyperplane(std::move(next), y, c);
        double delta = 0.0;
        for (std::size_t i = 0; i < n; ++i) delta = std::max(delta, std::abs(next[i] - a[i]));
        a = std::move(next);
        if (delta < 1e-14) break;
    }
    QpOracle out;
    out.alpha = a;
    double obj = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        obj += a[i];
        for (std::size_t j = 0; j < n; ++j)
            obj -= 0.5 * a[i] * a[j] * y[i] * y[j] * kernel(i, j);
    }
    out.objective = obj;
    return out;
}

}  // namespace testsupport
