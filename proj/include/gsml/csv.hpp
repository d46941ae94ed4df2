#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gsml::csv {

/// A parsed CSV document. Lines starting with '#' are collected as comments;
/// blank lines are skipped.
struct Table {
  std::vector<std::string> comments;
  std::vector<std::vector<std::string>> rows;
  std::vector<int> line_numbers;  // 1-based source line of each row
};

Table read(std::istream& in);
Table read_file(const std::filesystem::path& path);

std::vector<std::string> split_line(const std::string& line);

double to_double(const std::string& field, int line);
long long to_integer(const std::string& field, int line);

/// Shortest decimal form that reads back to the same double.
std::string format(double value);

Eigen::MatrixXd read_matrix(const std::filesystem::path& path);
void write_matrix(std::ostream& out, const Eigen::MatrixXd& m);

}  // namespace gsml::csv
