#pragma once

#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "demacc/landcover.hpp"
#include "demacc/sample.hpp"

namespace demacc {

/// Comma-separated table with a header row. Blank lines and lines starting
/// with '#' are skipped; cells are whitespace-trimmed.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  ///< source line of each row

  /// Column index by case-insensitive name; throws ParseError if absent.
  std::size_t column(const std::string& name) const;
  bool has_column(const std::string& name) const;
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

/// Parses a decimal number; ParseError names line and column on failure.
double parse_csv_number(const std::string& cell, std::size_t line, std::size_t column);

/// GCP table with header `id,x,y,h`. Ids must be unique.
std::vector<ControlPoint> read_control_points(std::istream& in);
std::vector<ControlPoint> read_control_points_file(const std::string& path);
void write_control_points(std::ostream& out, std::span<const ControlPoint> points);

/// Training table with header `x,y,class_code`.
std::vector<TrainingPoint> read_training_points_file(const std::string& path);
/// Legend table with header `class_code,label`.
std::map<int, std::string> read_legend_file(const std::string& path);

/// Joined records; missing values are empty cells.
void write_samples(std::ostream& out, std::span<const SampleRecord> records);
std::vector<SampleRecord> read_samples(std::istream& in);
std::vector<SampleRecord> read_samples_file(const std::string& path);

}  // namespace demacc
