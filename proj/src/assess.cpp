#include "demacc/assess.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "demacc/csv.hpp"
#include "demacc/error.hpp"
#include "demacc/raster.hpp"
#include "demacc/terrain.hpp"

namespace demacc {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Configuration

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "input.dem",         "input.gcps",         "input.classmap",      "input.legend",
      "input.slope",       "input.aspect",       "extract.method",      "screen.exclude_classes",
      "screen.min_height", "screen.tukey",       "screen.tukey_field",  "classes.remap",
      "terrain.z_factor",  "moran.scheme",       "moran.threshold",     "moran.row_standardize",
      "moran.assumption",  "moran.permutations", "moran.seed",          "histogram.width",
      "histogram.origin",  "output.dir"};
  return keys;
}

bool is_path_key(const std::string& key) { return key.starts_with("input.") || key == "output.dir"; }

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double to_number(const std::string& key, const std::string& value) {
  std::string_view s = value;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ConfigError(key + ": expected a number, got '" + value + "'");
  }
  return v;
}

long long to_integer(const std::string& key, const std::string& value) {
  const double v = to_number(key, value);
  if (v != std::floor(v)) throw ConfigError(key + ": expected an integer, got '" + value + "'");
  return static_cast<long long>(v);
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "yes" || value == "1" || value == "on") return true;
  if (value == "false" || value == "no" || value == "0" || value == "off") return false;
  throw ConfigError(key + ": expected true|false, got '" + value + "'");
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

}  // namespace

void ConfigBuilder::load_file(const std::string& path) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("config " + path + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  base_dir_ = fs::path(path).parent_path().string();
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("config " + path + ": key '" + section + "' outside of a section");
    for (const auto& [key, node] : body) {
      std::string value = trim(node.get_value<std::string>());
      const std::string full = section + "." + key;
      if (is_path_key(full) && !value.empty() && fs::path(value).is_relative() && !base_dir_.empty()) {
        value = (fs::path(base_dir_) / value).lexically_normal().string();
      }
      set(full, value);
    }
  }
}

void ConfigBuilder::set(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' is not of the form section.key=value");
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void ConfigBuilder::set(const std::string& key, const std::string& value) {
  if (!known_keys().contains(key)) throw ConfigError("unknown config key '" + key + "'");
  settings_[key] = value;
}

AssessConfig ConfigBuilder::build() const {
  AssessConfig c;
  auto get = [&](const std::string& key) -> std::optional<std::string> {
    const auto it = settings_.find(key);
    if (it == settings_.end() || it->second.empty()) return std::nullopt;
    return it->second;
  };

  const auto dem = get("input.dem");
  const auto gcps = get("input.gcps");
  if (!dem) throw ConfigError("input.dem is required");
  if (!gcps) throw ConfigError("input.gcps is required");
  c.dem = *dem;
  c.gcps = *gcps;
  c.classmap = get("input.classmap");
  c.legend = get("input.legend");
  c.slope = get("input.slope");
  c.aspect = get("input.aspect");
  if (c.slope.has_value() != c.aspect.has_value()) {
    throw ConfigError("input.slope and input.aspect must be given together");
  }

  if (const auto v = get("extract.method")) c.method = parse_extract_method(*v);
  if (const auto v = get("screen.exclude_classes")) {
    for (const auto& item : split_list(*v)) {
      c.exclude_classes.insert(static_cast<int>(to_integer("screen.exclude_classes", item)));
    }
  }
  if (const auto v = get("screen.min_height")) {
    if (*v != "none") c.min_height = to_number("screen.min_height", *v);
  }
  if (const auto v = get("screen.tukey")) c.tukey = to_bool("screen.tukey", *v);
  if (const auto v = get("screen.tukey_field")) c.tukey_field = parse_screen_field(*v);
  if (const auto v = get("classes.remap")) {
    for (const auto& item : split_list(*v)) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) throw ConfigError("classes.remap: expected from:to pairs, got '" + item + "'");
      const auto from = static_cast<int>(to_integer("classes.remap", trim(item.substr(0, colon))));
      const auto to = static_cast<int>(to_integer("classes.remap", trim(item.substr(colon + 1))));
      c.class_remap[from] = to;
    }
  }
  if (const auto v = get("terrain.z_factor")) {
    c.z_factor = to_number("terrain.z_factor", *v);
    if (!(c.z_factor > 0.0)) throw ConfigError("terrain.z_factor must be positive");
  }

  if (const auto v = get("moran.scheme")) c.weights.scheme = parse_weight_scheme(*v);
  if (const auto v = get("moran.threshold")) {
    if (*v != "auto") {
      c.weights.threshold = to_number("moran.threshold", *v);
      if (!(*c.weights.threshold > 0.0)) throw ConfigError("moran.threshold must be positive or 'auto'");
    }
  }
  if (const auto v = get("moran.row_standardize")) c.weights.row_standardize = to_bool("moran.row_standardize", *v);
  if (const auto v = get("moran.assumption")) c.assumption = parse_moran_assumption(*v);
  if (const auto v = get("moran.permutations")) {
    const long long n = to_integer("moran.permutations", *v);
    if (n != 0 && n < 99) throw ConfigError("moran.permutations must be 0 or at least 99");
    c.permutations = static_cast<std::size_t>(n);
  }
  if (const auto v = get("moran.seed")) {
    const long long s = to_integer("moran.seed", *v);
    if (s < 0) throw ConfigError("moran.seed must be non-negative");
    c.seed = static_cast<std::uint64_t>(s);
  }

  if (const auto v = get("histogram.width")) {
    c.histogram_width = to_number("histogram.width", *v);
    if (!(c.histogram_width > 0.0)) throw ConfigError("histogram.width must be positive");
  }
  if (const auto v = get("histogram.origin")) c.histogram_origin = to_number("histogram.origin", *v);
  if (const auto v = get("output.dir")) c.output_dir = *v;
  return c;
}

// ---------------------------------------------------------------------------
// Pipeline

namespace {

// Re-throws library errors with the stage name prefixed, keeping their type.
template <class F>
auto stage(const char* name, F&& body) {
  const std::string prefix = std::string(name) + ": ";
  try {
    return body();
  } catch (const ConfigError& e) {
    throw ConfigError(prefix + e.what());
  } catch (const ParseError& e) {
    throw ParseError(prefix + e.what());
  } catch (const DegenerateError& e) {
    throw DegenerateError(prefix + e.what());
  }
}

constexpr int kUnstratifiedCode = 1;

std::string label_for(int code, const std::map<int, std::string>& legend) {
  const auto it = legend.find(code);
  return it != legend.end() ? it->second : "class_" + std::to_string(code);
}

ClassSummary summarize_group(std::optional<int> code, std::string label, const std::vector<double>& deltas) {
  ClassSummary s;
  s.class_code = code;
  s.label = std::move(label);
  s.n = deltas.size();
  try {
    s.stats = summarize(deltas);
  } catch (const DegenerateError& e) {
    s.reason = e.what();
  }
  return s;
}

NamedCorrelation correlate(std::string name, std::string x_name, std::string y_name, const std::vector<double>& x,
                           const std::vector<double>& y) {
  NamedCorrelation c{std::move(name), std::move(x_name), std::move(y_name), std::nullopt, {}};
  try {
    c.result = pearson_r(x, y);
  } catch (const DegenerateError& e) {
    c.reason = e.what();
  }
  return c;
}

}  // namespace

AssessmentReport run_assessment(const AssessConfig& cfg, const std::map<std::string, std::string>& settings) {
  AssessmentReport rep;
  rep.histogram_width = cfg.histogram_width;

  const Grid dem = stage("read dem", [&] { return read_ascii_grid_file(cfg.dem); });
  const auto points = stage("read gcps", [&] { return read_control_points_file(cfg.gcps); });
  const std::map<int, std::string> legend =
      cfg.legend ? stage("read legend", [&] { return read_legend_file(*cfg.legend); }) : std::map<int, std::string>{};

  auto records = stage("extract", [&] { return extract_coincident(dem, points, cfg.method); });

  stage("attach class", [&] {
    if (cfg.classmap) {
      const Grid classmap = read_ascii_grid_file(*cfg.classmap);
      attach_class(classmap, records);
      for (auto& r : records) {
        if (!r.class_code) continue;
        const auto it = cfg.class_remap.find(*r.class_code);
        if (it != cfg.class_remap.end()) r.class_code = it->second;
      }
    } else {
      for (auto& r : records) r.class_code = kUnstratifiedCode;
    }
  });

  stage("terrain", [&] {
    if (cfg.slope) {
      const Grid slope = read_ascii_grid_file(*cfg.slope);
      const Grid aspect = read_ascii_grid_file(*cfg.aspect);
      attach_derivatives(slope, aspect, records, &dem.georef());
    } else {
      const DerivativePair d = slope_aspect(dem, cfg.z_factor);
      attach_derivatives(d.slope, d.aspect, records, &dem.georef());
    }
  });

  // Screening ledger.
  std::map<std::string, std::string> status;
  for (const auto& r : records) status[r.id] = "kept";

  const FilterResult valid =
      stage("validity filter", [&] { return validity_filter(records, cfg.exclude_classes, cfg.min_height); });
  rep.screening.push_back({"validity", records.size(), valid.kept.size(), valid.removed.size()});
  for (const auto& r : valid.removed) status[r.id] = "validity";

  std::vector<SampleRecord> kept = valid.kept;
  if (cfg.tukey) {
    const TukeyResult tk = stage("tukey filter", [&] { return tukey_filter(kept, cfg.tukey_field); });
    rep.screening.push_back({"tukey", kept.size(), tk.kept.size(), tk.removed.size()});
    rep.fences = tk.fences;
    for (const auto& r : tk.removed) status[r.id] = "tukey";
    kept = tk.kept;
  }

  // Per-class summaries, ordered by class code.
  std::map<int, std::vector<double>> by_class;
  std::vector<double> all;
  for (const auto& r : kept) {
    by_class[*r.class_code].push_back(*r.delta_h);
    all.push_back(*r.delta_h);
  }
  rep.total = stage("summarize", [&] {
    if (all.size() < 2) {
      throw DegenerateError(std::to_string(all.size()) + " samples survived screening; at least 2 are required");
    }
    return summarize_group(std::nullopt, "total", all);
  });
  for (const auto& [code, deltas] : by_class) {
    const std::string label = cfg.classmap ? label_for(code, legend) : "unstratified";
    rep.by_class.push_back(summarize_group(code, label, deltas));
  }

  // ANOVA across strata.
  if (by_class.size() < 2) {
    rep.anova_reason = "fewer than 2 land-cover groups";
  } else {
    std::vector<std::vector<double>> groups;
    for (const auto& [code, deltas] : by_class) groups.push_back(deltas);
    try {
      rep.anova = f_test(anova_decompose(groups));
    } catch (const DegenerateError& e) {
      rep.anova_reason = e.what();
    }
  }

  // Correlations with terrain derivatives; flat cells are excluded from the
  // aspect pairs.
  {
    std::vector<double> s_slope, s_dh, s_hdem, s_href;
    std::vector<double> a_aspect, a_dh, a_hdem, a_href;
    for (const auto& r : kept) {
      if (r.slope_deg) {
        s_slope.push_back(*r.slope_deg);
        s_dh.push_back(*r.delta_h);
        s_hdem.push_back(*r.h_dem);
        s_href.push_back(r.h_ref);
      }
      if (r.aspect_deg && *r.aspect_deg != kFlatAspect) {
        a_aspect.push_back(*r.aspect_deg);
        a_dh.push_back(*r.delta_h);
        a_hdem.push_back(*r.h_dem);
        a_href.push_back(r.h_ref);
      }
    }
    rep.correlations.push_back(correlate("delta_h_vs_slope", "slope_deg", "delta_h", s_slope, s_dh));
    rep.correlations.push_back(correlate("delta_h_vs_aspect", "aspect_deg", "delta_h", a_aspect, a_dh));
    rep.correlations.push_back(correlate("h_dem_vs_slope", "slope_deg", "h_dem", s_slope, s_hdem));
    rep.correlations.push_back(correlate("h_ref_vs_slope", "slope_deg", "h_ref", s_slope, s_href));
    rep.correlations.push_back(correlate("h_dem_vs_aspect", "aspect_deg", "h_dem", a_aspect, a_hdem));
    rep.correlations.push_back(correlate("h_ref_vs_aspect", "aspect_deg", "h_ref", a_aspect, a_href));
  }

  // Global Moran's I of the height differences.
  {
    std::vector<Point2> pts;
    for (const auto& r : kept) pts.push_back({r.x, r.y});
    try {
      const BuiltWeights bw = build_weights(pts, cfg.weights);
      rep.weights_threshold = bw.threshold;
      rep.weights_nonzero = bw.weights.nonzero_count();
      rep.moran = morans_significance(all, bw.weights, cfg.assumption);
      if (cfg.permutations > 0) rep.permutation = permutation_test(all, bw.weights, cfg.permutations, cfg.seed);
    } catch (const DegenerateError& e) {
      rep.moran_reason = e.what();
    }
  }

  rep.histograms.emplace_back("total", histogram(all, cfg.histogram_width, cfg.histogram_origin));
  for (std::size_t i = 0; i < rep.by_class.size(); ++i) {
    const auto& cs = rep.by_class[i];
    rep.histograms.emplace_back(cs.label, histogram(by_class[*cs.class_code], cfg.histogram_width,
                                                    cfg.histogram_origin));
  }

  rep.samples = records;
  for (const auto& r : records) rep.sample_status.push_back(status[r.id]);

  // Provenance: every effective setting plus the derived choices.
  rep.provenance.emplace_back("tool", std::string("demacc ") + kVersion);
  for (const auto& [k, v] : settings) rep.provenance.emplace_back("config." + k, v);
  rep.provenance.emplace_back("extraction_method", to_string(cfg.method));
  rep.provenance.emplace_back("tukey_field", cfg.tukey ? to_string(cfg.tukey_field) : "disabled");
  rep.provenance.emplace_back("quantile_convention", "linear interpolation at position (n-1)p");
  rep.provenance.emplace_back("terrain_source", cfg.slope ? "provided" : "horn_3x3");
  rep.provenance.emplace_back("weights_scheme", to_string(cfg.weights.scheme));
  rep.provenance.emplace_back("weights_threshold", cfg.weights.threshold ? format_double(*cfg.weights.threshold)
                                                                         : std::string("auto"));
  rep.provenance.emplace_back("weights_row_standardize", cfg.weights.row_standardize ? "true" : "false");
  rep.provenance.emplace_back("moran_assumption", to_string(cfg.assumption));
  rep.provenance.emplace_back("seed", std::to_string(cfg.seed));
  return rep;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

Json summary_json(const ClassSummary& s) {
  Json j;
  j["class_code"] = s.class_code ? Json(*s.class_code) : Json(nullptr);
  j["label"] = s.label;
  j["n"] = s.n;
  if (s.stats) {
    j["mean"] = s.stats->mean;
    j["sd"] = s.stats->sd;
    j["rmse"] = s.stats->rmse;
    j["min"] = s.stats->min;
    j["max"] = s.stats->max;
    j["range"] = s.stats->range;
  } else {
    j["status"] = "undefined";
    j["reason"] = s.reason;
  }
  return j;
}

Json undefined(const std::string& reason) { return Json{{"status", "undefined"}, {"reason", reason}}; }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw ConfigError("write failed for '" + path.string() + "'");
}

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

}  // namespace

std::string AssessmentReport::to_json() const {
  Json j;
  Json prov = Json::object();
  for (const auto& [k, v] : provenance) prov[k] = v;
  j["provenance"] = prov;

  Json scr;
  scr["stages"] = Json::array();
  for (const auto& s : screening) {
    scr["stages"].push_back({{"stage", s.stage}, {"before", s.before}, {"kept", s.kept}, {"removed", s.removed}});
  }
  if (fences) {
    scr["tukey_fences"] = {{"q1", fences->q1},
                           {"q3", fences->q3},
                           {"iqr", fences->iqr},
                           {"lower", fences->lower},
                           {"upper", fences->upper}};
  }
  j["screening"] = scr;

  Json st = Json::object();
  for (const auto& cs : by_class) st[cs.label] = summary_json(cs);
  st["total"] = summary_json(total);
  j["stats"] = st;

  if (anova) {
    j["anova"] = {{"ss_between", anova->ss_between}, {"df_between", anova->df_between},
                  {"ms_between", anova->ms_between}, {"ss_within", anova->ss_within},
                  {"df_within", anova->df_within},   {"ms_within", anova->ms_within},
                  {"ss_total", anova->ss_between + anova->ss_within},
                  {"df_total", anova->df_between + anova->df_within},
                  {"f", anova->f_infinite ? Json(nullptr) : Json(anova->f)},
                  {"f_infinite", anova->f_infinite},
                  {"p", anova->p}};
  } else {
    j["anova"] = undefined(anova_reason);
  }

  if (moran) {
    Json m{{"i", moran->i},         {"e_i", moran->e_i}, {"v_i", moran->v_i},
           {"z", moran->z},         {"p", moran->p},     {"b2", moran->b2},
           {"assumption", to_string(moran->assumption)}};
    m["weights"] = {{"threshold_used", weights_threshold ? Json(*weights_threshold) : Json(nullptr)},
                    {"nonzero", weights_nonzero}};
    if (permutation) {
      m["permutation"] = {{"n_perm", permutation->n_perm},   {"pseudo_p", permutation->pseudo_p},
                          {"extreme", permutation->extreme_count}, {"mean_i", permutation->mean_i},
                          {"sd_i", permutation->sd_i},       {"min_i", permutation->min_i},
                          {"max_i", permutation->max_i}};
    }
    j["moran"] = m;
  } else {
    j["moran"] = undefined(moran_reason);
  }

  Json cor = Json::object();
  for (const auto& c : correlations) {
    if (c.result) {
      cor[c.name] = {{"x", c.x}, {"y", c.y}, {"r", c.result->r}, {"n", c.result->n}};
    } else {
      Json u = undefined(c.reason);
      u["x"] = c.x;
      u["y"] = c.y;
      cor[c.name] = u;
    }
  }
  j["correlations"] = cor;

  Json hist = Json::object();
  for (const auto& [name, bins] : histograms) {
    Json arr = Json::array();
    for (const auto& b : bins) arr.push_back({{"lower", b.lower}, {"upper", b.lower + histogram_width}, {"count", b.count}});
    hist[name] = arr;
  }
  j["histograms"] = hist;
  return j.dump(2) + "\n";
}

void write_assessment(const AssessmentReport& rep, const std::string& dir) {
  const fs::path out(dir);
  const fs::path staging = out.string() + ".partial";
  std::error_code ec;
  fs::remove_all(staging, ec);
  fs::create_directories(staging);

  struct Cleanup {
    fs::path path;
    bool armed = true;
    ~Cleanup() {
      if (armed) {
        std::error_code ignored;
        fs::remove_all(path, ignored);
      }
    }
  } cleanup{staging};

  write_text(staging / "report.json", rep.to_json());

  {
    std::ostringstream s;
    s << "id,x,y,h_ref,h_dem,delta_h,class_code,slope_deg,aspect_deg,status\n";
    for (std::size_t i = 0; i < rep.samples.size(); ++i) {
      const auto& r = rep.samples[i];
      s << r.id << ',' << format_double(r.x) << ',' << format_double(r.y) << ',' << format_double(r.h_ref) << ','
        << opt(r.h_dem) << ',' << opt(r.delta_h) << ',' << (r.class_code ? std::to_string(*r.class_code) : "")
        << ',' << opt(r.slope_deg) << ',' << opt(r.aspect_deg) << ',' << rep.sample_status[i] << '\n';
    }
    write_text(staging / "samples.csv", s.str());
  }
  {
    std::ostringstream s;
    s << "class_code,label,n,mean,sd,rmse,min,max,range\n";
    auto row = [&](const ClassSummary& c) {
      s << (c.class_code ? std::to_string(*c.class_code) : "") << ',' << c.label << ',' << c.n;
      if (c.stats) {
        for (double v : {c.stats->mean, c.stats->sd, c.stats->rmse, c.stats->min, c.stats->max, c.stats->range}) {
          s << ',' << format_double(v);
        }
      } else {
        s << ",,,,,,";
      }
      s << '\n';
    };
    for (const auto& c : rep.by_class) row(c);
    row(rep.total);
    write_text(staging / "stats_by_class.csv", s.str());
  }
  {
    std::ostringstream s;
    s << "group,bin_lower,bin_upper,count\n";
    for (const auto& [name, bins] : rep.histograms) {
      for (const auto& b : bins) {
        s << name << ',' << format_double(b.lower) << ',' << format_double(b.lower + rep.histogram_width) << ','
          << b.count << '\n';
      }
    }
    write_text(staging / "histogram.csv", s.str());
  }
  {
    std::ostringstream h, sl, as;
    h << "id,class_code,h_dem,delta_h\n";
    sl << "id,class_code,slope_deg,delta_h\n";
    as << "id,class_code,aspect_deg,delta_h\n";
    for (std::size_t i = 0; i < rep.samples.size(); ++i) {
      if (rep.sample_status[i] != "kept") continue;
      const auto& r = rep.samples[i];
      const std::string prefix = r.id + ',' + std::to_string(*r.class_code) + ',';
      h << prefix << format_double(*r.h_dem) << ',' << format_double(*r.delta_h) << '\n';
      if (r.slope_deg) sl << prefix << format_double(*r.slope_deg) << ',' << format_double(*r.delta_h) << '\n';
      if (r.aspect_deg && *r.aspect_deg != kFlatAspect) {
        as << prefix << format_double(*r.aspect_deg) << ',' << format_double(*r.delta_h) << '\n';
      }
    }
    write_text(staging / "scatter_dh_vs_h.csv", h.str());
    write_text(staging / "scatter_dh_vs_slope.csv", sl.str());
    write_text(staging / "scatter_dh_vs_aspect.csv", as.str());
  }

  fs::create_directories(out);
  for (const auto& entry : fs::directory_iterator(staging)) {
    fs::rename(entry.path(), out / entry.path().filename());
  }
}

}  // namespace demacc
