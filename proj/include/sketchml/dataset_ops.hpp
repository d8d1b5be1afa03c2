#pragma once

#include <vector>

#include "sketchml/ingest.hpp"

namespace sketchml {

Matrix select_rows(const Matrix& m, const std::vector<std::size_t>& rows);
Dataset select_rows(const Dataset& ds, const std::vector<std::size_t>& rows);

// Keep the columns whose mask bit is set.
Matrix select_columns(const Matrix& m, const std::vector<bool>& keep);
Dataset select_columns(const Dataset& ds, const std::vector<bool>& keep);

}  // namespace sketchml
