#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "lvkit/common.hpp"

namespace lvkit::cli {

using nlohmann::json;

/// Headerless comma-separated decimal floats, one sample per row.
Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path);

/// Two-column edge list (from,to); an optional first line "from,to" is skipped.
std::vector<std::pair<std::string, std::string>> read_edges_csv(const std::filesystem::path& path);

json read_json(const std::filesystem::path& path);

/// 17 significant digits.
std::string format_double(double v);

/// Comma-separated doubles such as "0.3,0.7".
std::vector<double> parse_list(const std::string& text);

json to_json(const Eigen::MatrixXd& m);
json to_json(const Eigen::VectorXd& v);

std::string to_csv(const Trace& trace);

void write_text(const std::filesystem::path& path, const std::string& content);

}  // namespace lvkit::cli
