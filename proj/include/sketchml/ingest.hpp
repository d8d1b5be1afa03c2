#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sketchml/matrix.hpp"

namespace sketchml {

enum class DataFormat { csv };

struct RawTable {
    std::vector<std::string> column_names;
    std::vector<std::vector<std::string>> cells;  // row-major, rectangular
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
};

struct Dataset {
    Matrix features;
    std::optional<std::vector<int>> labels;   // indices into class_names
    std::vector<std::string> feature_names;
    std::vector<std::string> class_names;     // first-appearance order
    std::vector<std::uint8_t> missing_mask;   // rows*cols, 1 = cell was missing

    std::size_t n_rows() const { return features.rows(); }
    std::size_t n_features() const { return features.cols(); }
    bool is_missing(std::size_t i, std::size_t j) const {
        return !missing_mask.empty() && missing_mask[i * features.cols() + j] != 0;
    }
    bool has_missing() const {
        for (auto m : missing_mask)
            if (m) return true;
        return false;
    }
};

// Label column selector: an explicit zero-based index, or "last".
struct ColumnSelector {
    bool last = true;
    std::size_t index = 0;
};

// Parse a CSV file into a rectangular table. When has_header is unset, a
// header is assumed iff the first row has a token that fails numeric parsing
// while the second row is fully numeric; otherwise synthetic names col0.. are
// assigned. Missing markers ("" and "?") parse as numeric for the purposes of
// inference.
RawTable acquire(const std::string& source, DataFormat format,
                 std::optional<bool> has_header);

// Split the label column off a table: labels are encoded against class_names
// in first-appearance order, feature cells are parsed to doubles, and missing
// markers are recorded in the mask with a placeholder value of 0.
Dataset split_label(const RawTable& table, const ColumnSelector& label_column);

// Test hooks used by the round-trip properties.
bool is_missing_marker(const std::string& token);
std::optional<double> parse_numeric(const std::string& token);

}  // namespace sketchml
