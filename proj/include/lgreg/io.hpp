#pragma once

// CSV formats. Points: one row per point, comma-separated reals, no header.
// Labels and predictions: rows of "index,value". Output uses 17 significant digits.

#include "lgreg/core.hpp"

#include <istream>
#include <ostream>
#include <string>

namespace lgreg {

class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

DataSetd read_points_csv(std::istream& is, const std::string& source = "<points>");
DataSetd load_points_csv(const std::string& path);

/// `u` < 0 skips the range check.
LabelSetd read_labels_csv(std::istream& is, Index u = -1, const std::string& source = "<labels>");
LabelSetd load_labels_csv(const std::string& path, Index u = -1);

void write_points_csv(std::ostream& os, const DataSetd& data);
void write_labels_csv(std::ostream& os, const LabelSetd& labels);
void write_predictions_csv(std::ostream& os, const Vector<double>& f);

void save_points_csv(const std::string& path, const DataSetd& data);
void save_labels_csv(const std::string& path, const LabelSetd& labels);
void save_predictions_csv(const std::string& path, const Vector<double>& f);

}  // namespace lgreg
