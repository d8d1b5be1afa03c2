#include "sketchml/dataset_ops.hpp"

#include "sketchml/common.hpp"

namespace sketchml {

Matrix select_rows(const Matrix& m, const std::vector<std::size_t>& rows) {
    Matrix out(rows.size(), m.cols());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(rows[i], j);
    return out;
}

Dataset select_rows(const Dataset& ds, const std::vector<std::size_t>& rows) {
    Dataset out;
    out.features = select_rows(ds.features, rows);
    out.feature_names = ds.feature_names;
    out.class_names = ds.class_names;
    if (ds.labels) {
        std::vector<int> lab(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) lab[i] = (*ds.labels)[rows[i]];
        out.labels = std::move(lab);
    }
    if (!ds.missing_mask.empty()) {
        out.missing_mask.resize(rows.size() * ds.n_features());
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t j = 0; j < ds.n_features(); ++j)
                out.missing_mask[i * ds.n_features() + j] =
                    ds.missing_mask[rows[i] * ds.n_features() + j];
    }
    return out;
}

Matrix select_columns(const Matrix& m, const std::vector<bool>& keep) {
    if (keep.size() != m.cols()) throw Error("dataset", "column mask size mismatch");
    std::size_t kept = 0;
    for (bool b : keep) kept += b ? 1 : 0;
    Matrix out(m.rows(), kept);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        std::size_t oj = 0;
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (keep[j]) out(i, oj++) = m(i, j);
    }
    return out;
}

Dataset select_columns(const Dataset& ds, const std::vector<bool>& keep) {
    Dataset out;
    out.features = select_columns(ds.features, keep);
    out.labels = ds.labels;
    out.class_names = ds.class_names;
    for (std::size_t j = 0; j < keep.size() && j < ds.feature_names.size(); ++j)
        if (keep[j]) out.feature_names.push_back(ds.feature_names[j]);
    if (!ds.missing_mask.empty()) {
        out.missing_mask.reserve(ds.n_rows() * out.n_features());
        for (std::size_t i = 0; i < ds.n_rows(); ++i)
            for (std::size_t j = 0; j < keep.size(); ++j)
                if (keep[j]) out.missing_mask.push_back(ds.missing_mask[i * keep.size() + j]);
    }
    return out;
}

}  // namespace sketchml
