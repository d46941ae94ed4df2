#include "gsml/csv.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "gsml/errors.hpp"

namespace gsml::csv {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        current += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        current += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(trim(current));
      current.clear();
    } else {
      current += c;
    }
  }
  fields.push_back(trim(current));
  return fields;
}

Table read(std::istream& in) {
  Table table;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      table.comments.push_back(t);
      continue;
    }
    table.rows.push_back(split_line(t));
    table.line_numbers.push_back(number);
  }
  return table;
}

Table read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file: " + path.string());
  return read(in);
}

double to_double(const std::string& field, int line) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw InputError("line " + std::to_string(line) + ": expected a number, got '" + field + "'");
  }
  return value;
}

long long to_integer(const std::string& field, int line) {
  long long value = 0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw InputError("line " + std::to_string(line) + ": expected an integer, got '" + field + "'");
  }
  return value;
}

std::string format(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

Eigen::MatrixXd read_matrix(const std::filesystem::path& path) {
  const Table table = read_file(path);
  if (table.rows.empty()) throw InputError(path.string() + ": empty matrix file");
  const std::size_t cols = table.rows.front().size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row.size() != cols) {
      throw InputError(path.string() + ": line " + std::to_string(table.line_numbers[r]) +
                       ": expected " + std::to_string(cols) + " columns");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          to_double(row[c], table.line_numbers[r]);
    }
  }
  return m;
}

void write_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      out << format(m(r, c));
    }
    out << '\n';
  }
}

}  // namespace gsml::csv
