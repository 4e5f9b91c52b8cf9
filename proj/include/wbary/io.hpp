#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "wbary/measures.hpp"

namespace wbary {

/// Rows of numeric scores, optionally labeled by a leading "group" column.
struct Table {
    std::vector<std::string> columns; // value column names
    bool has_group = false;
    std::vector<std::string> group; // one label per row when has_group
    Eigen::MatrixXd values;         // rows x columns
};

/// Comma-separated values with a header row; ParseError carries source:line.
Table parse_csv(const std::string& text, const std::string& source);
Table read_table(const std::string& path);

std::string format_table(const Table& table);

std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);

/// 17 significant digits, enough for a lossless double round trip.
std::string format_double(double v);
/// format_double for finite values, null otherwise (JSON has no infinities).
std::string json_number(double v);
std::string json_array(const std::vector<double>& xs);
std::string json_array(const Eigen::VectorXd& xs);
std::string json_rows(const Eigen::MatrixXd& m);

/// Measure file payload, schema 1: a quantile grid or a weighted point set.
struct MeasureFile {
    std::optional<QuantileGrid> grid;
    std::optional<DiscreteMeasure> discrete;
};

MeasureFile parse_measure_json(const std::string& text, const std::string& source);
std::string quantile_grid_json(const QuantileGrid& grid);
std::string discrete_json(const DiscreteMeasure& mu);

} // namespace wbary
