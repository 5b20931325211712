#pragma once

#include <filesystem>
#include <map>
#include <string>

#include <Eigen/Dense>

namespace xvh::detail {

// Headerless comma-separated decimal matrix. An empty file is a 0 x `cols`
// matrix, where `cols` is supplied by the caller (-1: unknown, zero columns).
Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path, Eigen::Index cols_if_empty = 0);
void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m);

// Shortest round-trip decimal form.
std::string format_double(double v);
double parse_double(std::string_view text, const std::string& context);
long long parse_integer(std::string_view text, const std::string& context);

// UTF-8 `key=value` lines; blank lines and lines starting with '#' ignored.
std::map<std::string, std::string> read_key_values(const std::filesystem::path& path);

std::string trim(std::string_view s);

}  // namespace xvh::detail
