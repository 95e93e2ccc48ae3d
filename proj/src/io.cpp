#include "lgreg/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lgreg {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

bool parse_real(std::string_view field, double& out) {
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, out);
  return ec == std::errc() && ptr == end && !field.empty();
}

bool parse_index(std::string_view field, Index& out) {
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, out);
  return ec == std::errc() && ptr == end && !field.empty();
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path);
  return is;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  return os;
}

}  // namespace

DataSetd read_points_csv(std::istream& is, const std::string& source) {
  std::vector<double> values;
  Index cols = -1, rows = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split(line);
    if (cols < 0) cols = static_cast<Index>(fields.size());
    if (static_cast<Index>(fields.size()) != cols) {
      throw ParseError(source, lineno, "ragged row: expected " + std::to_string(cols) + " fields, got " +
                                           std::to_string(fields.size()));
    }
    for (const auto f : fields) {
      double v;
      if (!parse_real(f, v)) throw ParseError(source, lineno, "non-numeric field '" + std::string(f) + "'");
      if (!std::isfinite(v)) throw ParseError(source, lineno, "non-finite coordinate");
      values.push_back(v);
    }
    ++rows;
  }
  if (rows == 0) throw ParseError(source, lineno, "no points");
  RowMatrix<double> pts = Eigen::Map<RowMatrix<double>>(values.data(), rows, cols);
  return DataSetd(std::move(pts));
}

DataSetd load_points_csv(const std::string& path) {
  auto is = open_in(path);
  return read_points_csv(is, path);
}

LabelSetd read_labels_csv(std::istream& is, Index u, const std::string& source) {
  LabelSetd labels;
  std::string line;
  std::size_t lineno = 0;
  std::unordered_map<Index, std::size_t> first_line;
  while (std::getline(is, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split(line);
    if (fields.size() != 2) throw ParseError(source, lineno, "expected 'index,value'");
    Index idx;
    double v;
    if (!parse_index(fields[0], idx)) throw ParseError(source, lineno, "invalid index '" + std::string(fields[0]) + "'");
    if (!parse_real(fields[1], v)) throw ParseError(source, lineno, "non-numeric value '" + std::string(fields[1]) + "'");
    if (!std::isfinite(v)) throw ParseError(source, lineno, "non-finite value");
    if (idx < 0 || (u >= 0 && idx >= u)) {
      throw ParseError(source, lineno, "index " + std::to_string(idx) + " out of range");
    }
    if (const auto [it, fresh] = first_line.emplace(idx, lineno); !fresh) {
      throw ParseError(source, lineno, "duplicate index " + std::to_string(idx) + " (first on line " +
                                           std::to_string(it->second) + ")");
    }
    labels.push_back(idx, v);
  }
  if (labels.empty()) throw ParseError(source, lineno, "no labels");
  return labels;
}

LabelSetd load_labels_csv(const std::string& path, Index u) {
  auto is = open_in(path);
  return read_labels_csv(is, u, path);
}

void write_points_csv(std::ostream& os, const DataSetd& data) {
  os << std::setprecision(17);
  const auto& x = data.points();
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index d = 0; d < x.cols(); ++d) os << (d ? "," : "") << x(i, d);
    os << '\n';
  }
}

void write_labels_csv(std::ostream& os, const LabelSetd& labels) {
  os << std::setprecision(17);
  for (std::size_t t = 0; t < labels.size(); ++t) os << labels.indices[t] << ',' << labels.values[t] << '\n';
}

void write_predictions_csv(std::ostream& os, const Vector<double>& f) {
  os << std::setprecision(17);
  for (Index i = 0; i < f.size(); ++i) os << i << ',' << f[i] << '\n';
}

void save_points_csv(const std::string& path, const DataSetd& data) {
  auto os = open_out(path);
  write_points_csv(os, data);
}

void save_labels_csv(const std::string& path, const LabelSetd& labels) {
  auto os = open_out(path);
  write_labels_csv(os, labels);
}

void save_predictions_csv(const std::string& path, const Vector<double>& f) {
  auto os = open_out(path);
  write_predictions_csv(os, f);
}

}  // namespace lgreg
