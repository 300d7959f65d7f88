#include "demacc/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "demacc/error.hpp"

namespace demacc {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(std::string_view(line).substr(start, comma == std::string::npos ? comma : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

template <class F>
auto with_file(const std::string& path, F&& reader) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  try {
    return reader(in);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::optional<double> optional_number(const CsvTable& t, std::size_t row, std::size_t col) {
  const std::string& cell = t.rows[row][col];
  if (cell.empty()) return std::nullopt;
  return parse_csv_number(cell, t.line_numbers[row], col + 1);
}

void write_optional(std::ostream& out, const std::optional<double>& v) {
  if (v) out << format_double(*v);
}

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
  const std::string key = lower(name);
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (lower(header[i]) == key) return i;
  }
  throw ParseError("missing CSV column '" + name + "'", 1);
}

bool CsvTable::has_column(const std::string& name) const {
  const std::string key = lower(name);
  return std::any_of(header.begin(), header.end(), [&](const std::string& h) { return lower(h) == key; });
}

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    auto cells = split(line);
    if (!have_header) {
      t.header = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != t.header.size()) {
      throw ParseError("expected " + std::to_string(t.header.size()) + " fields, found " +
                           std::to_string(cells.size()),
                       lineno);
    }
    t.rows.push_back(std::move(cells));
    t.line_numbers.push_back(lineno);
  }
  if (!have_header) throw ParseError("CSV input has no header row");
  return t;
}

CsvTable read_csv_file(const std::string& path) {
  return with_file(path, [](std::istream& in) { return read_csv(in); });
}

double parse_csv_number(const std::string& cell, std::size_t line, std::size_t column) {
  std::string_view s = cell;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ParseError("non-numeric value '" + cell + "'", line, column);
  }
  return v;
}

std::vector<ControlPoint> read_control_points(std::istream& in) {
  const CsvTable t = read_csv(in);
  const std::size_t ci = t.column("id"), cx = t.column("x"), cy = t.column("y"), ch = t.column("h");
  std::vector<ControlPoint> pts;
  std::set<std::string> seen;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const std::size_t ln = t.line_numbers[r];
    ControlPoint p{row[ci], parse_csv_number(row[cx], ln, cx + 1), parse_csv_number(row[cy], ln, cy + 1),
                   parse_csv_number(row[ch], ln, ch + 1)};
    if (!seen.insert(p.id).second) throw ParseError("duplicate control point id '" + p.id + "'", ln);
    pts.push_back(std::move(p));
  }
  return pts;
}

std::vector<ControlPoint> read_control_points_file(const std::string& path) {
  return with_file(path, [](std::istream& in) { return read_control_points(in); });
}

void write_control_points(std::ostream& out, std::span<const ControlPoint> points) {
  out << "id,x,y,h\n";
  for (const auto& p : points) {
    out << p.id << ',' << format_double(p.x) << ',' << format_double(p.y) << ',' << format_double(p.h_ref) << '\n';
  }
}

std::vector<TrainingPoint> read_training_points_file(const std::string& path) {
  return with_file(path, [](std::istream& in) {
    const CsvTable t = read_csv(in);
    const std::size_t cx = t.column("x"), cy = t.column("y"), cc = t.column("class_code");
    std::vector<TrainingPoint> pts;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      const std::size_t ln = t.line_numbers[r];
      const double code = parse_csv_number(t.rows[r][cc], ln, cc + 1);
      if (code != std::floor(code)) throw ParseError("class_code must be an integer", ln, cc + 1);
      pts.push_back({parse_csv_number(t.rows[r][cx], ln, cx + 1), parse_csv_number(t.rows[r][cy], ln, cy + 1),
                     static_cast<int>(code)});
    }
    return pts;
  });
}

std::map<int, std::string> read_legend_file(const std::string& path) {
  return with_file(path, [](std::istream& in) {
    const CsvTable t = read_csv(in);
    const std::size_t cc = t.column("class_code"), cl = t.column("label");
    std::map<int, std::string> legend;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      const std::size_t ln = t.line_numbers[r];
      const double code = parse_csv_number(t.rows[r][cc], ln, cc + 1);
      if (code != std::floor(code)) throw ParseError("class_code must be an integer", ln, cc + 1);
      legend[static_cast<int>(code)] = t.rows[r][cl];
    }
    return legend;
  });
}

void write_samples(std::ostream& out, std::span<const SampleRecord> records) {
  out << "id,x,y,h_ref,h_dem,delta_h,class_code,slope_deg,aspect_deg\n";
  for (const auto& r : records) {
    out << r.id << ',' << format_double(r.x) << ',' << format_double(r.y) << ',' << format_double(r.h_ref) << ',';
    write_optional(out, r.h_dem);
    out << ',';
    write_optional(out, r.delta_h);
    out << ',';
    if (r.class_code) out << *r.class_code;
    out << ',';
    write_optional(out, r.slope_deg);
    out << ',';
    write_optional(out, r.aspect_deg);
    out << '\n';
  }
}

std::vector<SampleRecord> read_samples(std::istream& in) {
  const CsvTable t = read_csv(in);
  const std::size_t ci = t.column("id"), cx = t.column("x"), cy = t.column("y");
  std::vector<SampleRecord> out;
  auto col = [&](const char* name) -> std::optional<std::size_t> {
    if (t.has_column(name)) return t.column(name);
    return std::nullopt;
  };
  const auto c_href = col("h_ref"), c_hdem = col("h_dem"), c_dh = col("delta_h"), c_class = col("class_code"),
             c_slope = col("slope_deg"), c_aspect = col("aspect_deg");
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const std::size_t ln = t.line_numbers[r];
    SampleRecord rec;
    rec.id = t.rows[r][ci];
    rec.x = parse_csv_number(t.rows[r][cx], ln, cx + 1);
    rec.y = parse_csv_number(t.rows[r][cy], ln, cy + 1);
    if (c_href) rec.h_ref = optional_number(t, r, *c_href).value_or(0.0);
    if (c_hdem) rec.h_dem = optional_number(t, r, *c_hdem);
    if (c_dh) rec.delta_h = optional_number(t, r, *c_dh);
    if (c_class) {
      if (const auto v = optional_number(t, r, *c_class)) rec.class_code = static_cast<int>(std::lround(*v));
    }
    if (c_slope) rec.slope_deg = optional_number(t, r, *c_slope);
    if (c_aspect) rec.aspect_deg = optional_number(t, r, *c_aspect);
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<SampleRecord> read_samples_file(const std::string& path) {
  return with_file(path, [](std::istream& in) { return read_samples(in); });
}

}  // namespace demacc
