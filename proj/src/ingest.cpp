#include "sketchml/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "sketchml/common.hpp"

namespace sketchml {

bool is_missing_marker(const std::string& token) {
    return token.empty() || token == "?";
}

std::optional<double> parse_numeric(const std::string& token) {
    if (token.empty()) return std::nullopt;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    // skip surrounding spaces, common in hand-edited CSVs
    while (first < last && std::isspace(static_cast<unsigned char>(*first))) ++first;
    while (last > first && std::isspace(static_cast<unsigned char>(*(last - 1)))) --last;
    if (first == last) return std::nullopt;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) return std::nullopt;
    return value;
}

namespace {

// RFC 4180 essentials: comma delimiter, optional double-quote quoting with
// "" escapes, \n or \r\n line endings.
std::vector<std::vector<std::string>> parse_csv(std::istream& in) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool in_quotes = false;
    bool row_has_content = false;
    char c;
    auto end_field = [&] {
        row.push_back(field);
        field.clear();
    };
    auto end_row = [&] {
        end_field();
        rows.push_back(std::move(row));
        row.clear();
        row_has_content = false;
    };
    while (in.get(c)) {
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    field.push_back('"');
                    in.get();
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"':
                in_quotes = true;
                row_has_content = true;
                break;
            case ',':
                end_field();
                row_has_content = true;
                break;
            case '\r':
                break;
            case '\n':
                end_row();
                break;
            default:
                field.push_back(c);
                row_has_content = true;
        }
    }
    if (in_quotes) throw Error("ingest", "unterminated quoted field at end of file");
    if (row_has_content || !field.empty() || !row.empty()) end_row();
    return rows;
}

bool row_fully_numeric(const std::vector<std::string>& row) {
    return std::all_of(row.begin(), row.end(), [](const std::string& t) {
        return is_missing_marker(t) || parse_numeric(t).has_value();
    });
}

}  // namespace

RawTable acquire(const std::string& source, DataFormat format,
                 std::optional<bool> has_header) {
    if (format != DataFormat::csv)
        throw Error("ingest", "only CSV sources are supported");
    std::ifstream in(source, std::ios::binary);
    if (!in) throw Error("ingest", "cannot read source '" + source + "'");

    auto rows = parse_csv(in);
    if (rows.empty()) throw Error("ingest", "empty file '" + source + "'");

    const std::size_t n_cols = rows.front().size();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != n_cols)
            throw Error("ingest", "ragged row " + std::to_string(i) + ": expected " +
                                      std::to_string(n_cols) + " cells, got " +
                                      std::to_string(rows[i].size()));
    }

    bool header;
    if (has_header.has_value()) {
        header = *has_header;
    } else {
        header = !row_fully_numeric(rows.front()) && rows.size() > 1 &&
                 row_fully_numeric(rows[1]);
    }

    RawTable table;
    table.n_cols = n_cols;
    if (header) {
        table.column_names = rows.front();
        table.cells.assign(rows.begin() + 1, rows.end());
    } else {
        for (std::size_t j = 0; j < n_cols; ++j)
            table.column_names.push_back("col" + std::to_string(j));
        table.cells = std::move(rows);
    }
    table.n_rows = table.cells.size();
    if (table.n_rows == 0) throw Error("ingest", "no data rows in '" + source + "'");
    return table;
}

Dataset split_label(const RawTable& table, const ColumnSelector& label_column) {
    const std::size_t label_idx = label_column.last ? table.n_cols - 1 : label_column.index;
    if (label_idx >= table.n_cols)
        throw Error("ingest", "label column index " + std::to_string(label_idx) +
                                  " out of range (table has " + std::to_string(table.n_cols) +
                                  " columns)");

    Dataset ds;
    const std::size_t n_feat = table.n_cols - 1;
    ds.features = Matrix(table.n_rows, n_feat);
    ds.missing_mask.assign(table.n_rows * n_feat, 0);
    for (std::size_t j = 0; j < table.n_cols; ++j)
        if (j != label_idx) ds.feature_names.push_back(table.column_names[j]);

    std::vector<int> labels(table.n_rows);
    std::unordered_map<std::string, int> class_index;
    for (std::size_t i = 0; i < table.n_rows; ++i) {
        std::size_t out_j = 0;
        for (std::size_t j = 0; j < table.n_cols; ++j) {
            const std::string& cell = table.cells[i][j];
            if (j == label_idx) {
                auto [it, inserted] =
                    class_index.try_emplace(cell, static_cast<int>(ds.class_names.size()));
                if (inserted) ds.class_names.push_back(cell);
                labels[i] = it->second;
                continue;
            }
            if (is_missing_marker(cell)) {
                ds.missing_mask[i * n_feat + out_j] = 1;
                ds.features(i, out_j) = 0.0;
            } else if (auto v = parse_numeric(cell)) {
                ds.features(i, out_j) = *v;
            } else {
                throw Error("ingest", "non-numeric token '" + cell + "' in feature column '" +
                                          table.column_names[j] + "' (row " + std::to_string(i) +
                                          "); categorical features are not supported");
            }
            ++out_j;
        }
    }
    if (ds.class_names.size() < 2)
        throw Error("ingest", "label column has a single distinct value");
    ds.labels = std::move(labels);
    return ds;
}

}  // namespace sketchml
