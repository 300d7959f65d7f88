#include "demacc/raster.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "demacc/error.hpp"

namespace demacc {

namespace {

void validate(const Georef& geo) {
  if (geo.ncols < 1 || geo.nrows < 1) throw ConfigError("grid must have at least one row and one column");
  if (!(geo.cellsize > 0.0) || !std::isfinite(geo.cellsize)) throw ConfigError("grid cellsize must be positive");
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

struct Token {
  std::string_view text;
  std::size_t line;
  std::size_t column;
};

// Splits a buffer into whitespace-separated tokens, remembering 1-based
// line/column positions for error messages.
class Tokenizer {
 public:
  explicit Tokenizer(std::string_view buf) : buf_(buf) {}

  std::optional<Token> next() {
    skip_space();
    if (pos_ >= buf_.size()) return std::nullopt;
    const std::size_t start = pos_;
    const std::size_t col = pos_ - line_start_ + 1;
    while (pos_ < buf_.size() && !is_space(buf_[pos_])) ++pos_;
    return Token{buf_.substr(start, pos_ - start), line_, col};
  }

  /// Rest of the current line, starting at the next token.
  std::optional<Token> next_on_line() {
    while (pos_ < buf_.size() && (buf_[pos_] == ' ' || buf_[pos_] == '\t' || buf_[pos_] == '\r')) ++pos_;
    if (pos_ >= buf_.size() || buf_[pos_] == '\n') return std::nullopt;
    return next();
  }

  /// True if the next non-blank line begins with '#'; consumes it if so.
  bool skip_comment_line() {
    skip_space();
    if (pos_ < buf_.size() && buf_[pos_] == '#') {
      while (pos_ < buf_.size() && buf_[pos_] != '\n') ++pos_;
      return true;
    }
    return false;
  }

  /// Peeks whether the next token starts with a letter (a header keyword).
  bool next_is_keyword() {
    skip_space();
    return pos_ < buf_.size() && std::isalpha(static_cast<unsigned char>(buf_[pos_]));
  }

  std::size_t line() const { return line_; }

 private:
  static bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v'; }

  void skip_space() {
    while (pos_ < buf_.size() && is_space(buf_[pos_])) {
      if (buf_[pos_] == '\n') {
        ++line_;
        line_start_ = pos_ + 1;
      }
      ++pos_;
    }
  }

  std::string_view buf_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t line_start_ = 0;
};

double parse_number(const Token& tok) {
  std::string_view s = tok.text;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ParseError("non-numeric token '" + std::string(tok.text) + "'", tok.line, tok.column);
  }
  return v;
}

std::size_t parse_count(const Token& tok) {
  const double v = parse_number(tok);
  if (v < 1.0 || v != std::floor(v) || v > 1e9) {
    throw ParseError("expected a positive integer, got '" + std::string(tok.text) + "'", tok.line, tok.column);
  }
  return static_cast<std::size_t>(v);
}

}  // namespace

std::optional<CellIndex> cell_of(const Georef& geo, double x, double y) {
  const double fx = std::floor((x - geo.xll) / geo.cellsize);
  const double fy = std::floor((y - geo.yll) / geo.cellsize);
  if (!(fx >= 0.0) || !(fy >= 0.0)) return std::nullopt;  // also rejects NaN
  if (fx >= static_cast<double>(geo.ncols) || fy >= static_cast<double>(geo.nrows)) return std::nullopt;
  const auto col = static_cast<std::size_t>(fx);
  const auto row_from_south = static_cast<std::size_t>(fy);
  return CellIndex{geo.nrows - 1 - row_from_south, col};
}

Grid::Grid(Georef geo, std::vector<double> values, double nodata)
    : geo_(geo), values_(std::move(values)), nodata_(nodata) {
  validate(geo_);
  if (values_.size() != geo_.size()) {
    throw ConfigError("grid value count " + std::to_string(values_.size()) + " does not match " +
                      std::to_string(geo_.nrows) + "x" + std::to_string(geo_.ncols));
  }
}

Grid::Grid(Georef geo, double fill, double nodata) : geo_(geo), nodata_(nodata) {
  validate(geo_);
  values_.assign(geo_.size(), fill);
}

std::optional<double> Grid::sample_nearest(double x, double y) const {
  const auto cell = cell_of(geo_, x, y);
  if (!cell || is_nodata(cell->row, cell->col)) return std::nullopt;
  return at(cell->row, cell->col);
}

MultibandGrid::MultibandGrid(std::vector<Grid> bands) : bands_(std::move(bands)) {
  if (bands_.empty()) throw ConfigError("multiband grid needs at least one band");
  for (const auto& b : bands_) {
    if (!(b.georef() == bands_.front().georef())) throw ConfigError("bands differ in georeferencing");
  }
}

Grid read_ascii_grid(std::istream& in) {
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string buf = ss.str();
  Tokenizer tk(buf);

  while (tk.skip_comment_line()) {
  }

  std::optional<std::size_t> ncols, nrows;
  std::optional<double> xll, yll, cellsize;
  bool x_center = false, y_center = false;
  double nodata = kDefaultNodata;

  while (tk.next_is_keyword()) {
    const Token key = *tk.next();
    const auto value = tk.next_on_line();
    if (!value) throw ParseError("header keyword '" + std::string(key.text) + "' has no value", key.line, key.column);
    const std::string k = lower(key.text);
    if (k == "ncols") {
      ncols = parse_count(*value);
    } else if (k == "nrows") {
      nrows = parse_count(*value);
    } else if (k == "xllcorner" || k == "xllcenter") {
      xll = parse_number(*value);
      x_center = k == "xllcenter";
    } else if (k == "yllcorner" || k == "yllcenter") {
      yll = parse_number(*value);
      y_center = k == "yllcenter";
    } else if (k == "cellsize") {
      cellsize = parse_number(*value);
      if (!(*cellsize > 0.0)) throw ParseError("cellsize must be positive", value->line, value->column);
    } else if (k == "nodata_value") {
      nodata = parse_number(*value);
    } else {
      throw ParseError("unknown header keyword '" + std::string(key.text) + "'", key.line, key.column);
    }
  }
  const std::array<std::pair<bool, const char*>, 5> required{{{ncols.has_value(), "ncols"},
                                                             {nrows.has_value(), "nrows"},
                                                             {xll.has_value(), "xllcorner"},
                                                             {yll.has_value(), "yllcorner"},
                                                             {cellsize.has_value(), "cellsize"}}};
  for (const auto& [present, name] : required) {
    if (!present) throw ParseError(std::string("missing header keyword '") + name + "'", tk.line());
  }

  Georef geo{*ncols, *nrows, *xll, *yll, *cellsize};
  if (x_center) geo.xll -= geo.cellsize / 2.0;
  if (y_center) geo.yll -= geo.cellsize / 2.0;

  const std::size_t expected = geo.size();
  std::vector<double> values;
  values.reserve(expected);
  while (auto tok = tk.next()) {
    if (values.size() == expected) {
      throw ParseError("expected " + std::to_string(expected) + " values, found more", tok->line, tok->column);
    }
    values.push_back(parse_number(*tok));
  }
  if (values.size() != expected) {
    throw ParseError("expected " + std::to_string(expected) + " values, found " + std::to_string(values.size()),
                     tk.line());
  }
  return Grid(geo, std::move(values), nodata);
}

Grid read_ascii_grid_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open grid file '" + path + "'");
  try {
    return read_ascii_grid(in);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  (void)ec;
  return std::string(buf.data(), ptr);
}

void write_ascii_grid(std::ostream& out, const Grid& grid, std::span<const std::string> comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
  const Georef& g = grid.georef();
  out << "ncols " << g.ncols << '\n'
      << "nrows " << g.nrows << '\n'
      << "xllcorner " << format_double(g.xll) << '\n'
      << "yllcorner " << format_double(g.yll) << '\n'
      << "cellsize " << format_double(g.cellsize) << '\n'
      << "NODATA_value " << format_double(grid.nodata()) << '\n';
  for (std::size_t r = 0; r < g.nrows; ++r) {
    for (std::size_t c = 0; c < g.ncols; ++c) {
      if (c) out << ' ';
      out << format_double(grid.at(r, c));
    }
    out << '\n';
  }
}

void write_ascii_grid_file(const std::string& path, const Grid& grid, std::span<const std::string> comments) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write grid file '" + path + "'");
  write_ascii_grid(out, grid, comments);
}

}  // namespace demacc
