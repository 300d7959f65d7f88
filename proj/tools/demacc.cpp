// demacc: vertical accuracy assessment of a DEM against ground control points.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "demacc/assess.hpp"
#include "demacc/csv.hpp"
#include "demacc/error.hpp"
#include "demacc/landcover.hpp"
#include "demacc/raster.hpp"
#include "demacc/spatial.hpp"
#include "demacc/synth.hpp"
#include "demacc/terrain.hpp"

namespace {

using namespace demacc;
using Json = nlohmann::ordered_json;

enum ExitCode { kOk = 0, kFailure = 1, kConfig = 2, kParse = 3, kDegenerate = 4 };

std::string provenance_line(int argc, char** argv) {
  std::ostringstream s;
  s << "generated by demacc " << kVersion << ":";
  for (int i = 1; i < argc; ++i) s << ' ' << argv[i];
  return s.str();
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  return out;
}

// ---------------------------------------------------------------------------

struct AssessArgs {
  std::string config;
  std::vector<std::string> overrides;
  std::string dem, gcps, classmap, legend, method, out, scheme, threshold;
  std::optional<long long> seed, permutations;
};

int run_assess(const AssessArgs& a) {
  ConfigBuilder builder;
  if (!a.config.empty()) builder.load_file(a.config);
  for (const auto& kv : a.overrides) builder.set(kv);
  auto flag = [&](const std::string& key, const std::string& v) {
    if (!v.empty()) builder.set(key, v);
  };
  flag("input.dem", a.dem);
  flag("input.gcps", a.gcps);
  flag("input.classmap", a.classmap);
  flag("input.legend", a.legend);
  flag("extract.method", a.method);
  flag("output.dir", a.out);
  flag("moran.scheme", a.scheme);
  flag("moran.threshold", a.threshold);
  if (a.seed) builder.set("moran.seed", std::to_string(*a.seed));
  if (a.permutations) builder.set("moran.permutations", std::to_string(*a.permutations));

  const AssessConfig cfg = builder.build();
  const AssessmentReport rep = run_assessment(cfg, builder.settings());
  write_assessment(rep, cfg.output_dir);

  std::cout << "samples kept: " << rep.total.n << '\n';
  for (const auto& cs : rep.by_class) {
    std::cout << "  " << cs.label << ": n=" << cs.n;
    if (cs.stats) std::cout << " mean=" << cs.stats->mean << " sd=" << cs.stats->sd << " rmse=" << cs.stats->rmse;
    std::cout << '\n';
  }
  std::cout << "total rmse: " << rep.total.stats->rmse << '\n';
  std::cout << "report: " << (std::filesystem::path(cfg.output_dir) / "report.json").string() << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------

int run_terrain(const std::string& dem_path, const std::string& prefix, double z_factor, const std::string& prov) {
  const Grid dem = read_ascii_grid_file(dem_path);
  const DerivativePair d = slope_aspect(dem, z_factor);
  const std::vector<std::string> slope_comments{prov, "slope in degrees (Horn 3x3), z_factor " + format_double(z_factor)};
  const std::vector<std::string> aspect_comments{prov, "aspect in degrees clockwise from north, -1 = flat"};
  write_ascii_grid_file(prefix + "_slope.asc", d.slope, slope_comments);
  write_ascii_grid_file(prefix + "_aspect.asc", d.aspect, aspect_comments);
  std::cout << prefix << "_slope.asc\n" << prefix << "_aspect.asc\n";
  return kOk;
}

// ---------------------------------------------------------------------------

struct ClassifyArgs {
  std::vector<std::string> images;
  std::string training, legend, out, check;
  double k = 2.0;
};

int run_classify(const ClassifyArgs& a, const std::string& prov) {
  std::vector<Grid> bands;
  for (const auto& p : a.images) bands.push_back(read_ascii_grid_file(p));
  const MultibandGrid image(std::move(bands));
  const auto training = read_training_points_file(a.training);
  const auto legend = a.legend.empty() ? std::map<int, std::string>{} : read_legend_file(a.legend);
  const auto boxes = train_parallelepiped(image, training, a.k, legend);
  const Grid classes = classify(image, boxes);

  const std::vector<std::string> comments{prov, "parallelepiped classification, k " + format_double(a.k) +
                                                    ", unclassified = " + std::to_string(kUnclassified)};
  write_ascii_grid_file(a.out, classes, comments);

  // Class areas, in squared map units.
  std::map<int, std::size_t> counts;
  for (double v : classes.values()) {
    if (v != classes.nodata()) ++counts[static_cast<int>(v)];
  }
  const double cell_area = classes.cellsize() * classes.cellsize();
  std::cout << "class_code,label,cells,area\n";
  for (const auto& [code, n] : counts) {
    std::string label = code == kUnclassified ? "unclassified" : "class_" + std::to_string(code);
    if (const auto it = legend.find(code); it != legend.end()) label = it->second;
    std::cout << code << ',' << label << ',' << n << ',' << format_double(static_cast<double>(n) * cell_area) << '\n';
  }

  if (!a.check.empty()) {
    const auto check = read_training_points_file(a.check);
    std::size_t hit = 0, total = 0;
    for (const auto& p : check) {
      const auto v = classes.sample_nearest(p.x, p.y);
      if (!v) continue;
      ++total;
      if (static_cast<int>(*v) == p.class_code) ++hit;
    }
    std::cout << "accuracy," << hit << ',' << total << ','
              << format_double(total ? static_cast<double>(hit) / static_cast<double>(total) : 0.0) << '\n';
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct MoranArgs {
  std::string samples, field = "delta_h", scheme = "inverse_distance", threshold = "auto",
                       assumption = "randomization", out;
  bool row_standardize = false;
  std::size_t permutations = 0;
  std::uint64_t seed = 0;
};

int run_moran(const MoranArgs& a, const std::string& prov) {
  WeightsOptions opt;
  opt.scheme = parse_weight_scheme(a.scheme);
  if (a.threshold != "auto") {
    try {
      opt.threshold = std::stod(a.threshold);
    } catch (const std::exception&) {
      throw ConfigError("threshold must be a number or 'auto'");
    }
  }
  opt.row_standardize = a.row_standardize;
  const MoranAssumption assumption = parse_moran_assumption(a.assumption);
  if (a.field != "delta_h" && a.field != "h_dem" && a.field != "h_ref") {
    throw ConfigError("field must be delta_h, h_dem or h_ref");
  }
  if (a.permutations != 0 && a.permutations < 99) throw ConfigError("permutations must be 0 or at least 99");

  // Rows flagged by the assessment screening are dropped.
  const CsvTable table = read_csv_file(a.samples);
  std::vector<SampleRecord> records = read_samples_file(a.samples);
  if (table.has_column("status")) {
    const std::size_t cs = table.column("status");
    std::vector<SampleRecord> kept;
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (table.rows[i][cs] == "kept") kept.push_back(records[i]);
    }
    records = std::move(kept);
  }

  std::vector<Point2> pts;
  std::vector<double> values;
  for (const auto& r : records) {
    std::optional<double> v = a.field == "delta_h" ? r.delta_h : a.field == "h_dem" ? r.h_dem : std::optional(r.h_ref);
    if (!v) continue;
    pts.push_back({r.x, r.y});
    values.push_back(*v);
  }

  const BuiltWeights bw = build_weights(pts, opt);
  const MoranResult m = morans_significance(values, bw.weights, assumption);
  Json j;
  j["provenance"] = {{"command", prov},
                     {"samples", a.samples},
                     {"field", a.field},
                     {"weights_scheme", a.scheme},
                     {"weights_threshold", a.threshold},
                     {"weights_row_standardize", a.row_standardize},
                     {"moran_assumption", a.assumption},
                     {"seed", a.seed}};
  j["n"] = values.size();
  j["moran"] = {{"i", m.i}, {"e_i", m.e_i}, {"v_i", m.v_i}, {"z", m.z}, {"p", m.p}, {"b2", m.b2},
                {"assumption", to_string(m.assumption)}};
  j["moran"]["weights"] = {{"threshold_used", bw.threshold}, {"nonzero", bw.weights.nonzero_count()}};
  if (a.permutations > 0) {
    const PermutationResult p = permutation_test(values, bw.weights, a.permutations, a.seed);
    j["moran"]["permutation"] = {{"n_perm", p.n_perm}, {"pseudo_p", p.pseudo_p}, {"extreme", p.extreme_count},
                                 {"mean_i", p.mean_i}, {"sd_i", p.sd_i},         {"min_i", p.min_i},
                                 {"max_i", p.max_i}};
  }
  const std::string text = j.dump(2) + "\n";
  if (a.out.empty()) {
    std::cout << text;
  } else {
    open_output(a.out) << text;
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  SceneSpec scene;
  std::string kind = "plane", out, gcp_out;
  std::size_t gcps = 0;
  double min_separation = 0.0, error_sd = 0.0;
  bool snap = false;
  std::string error_field;
};

int run_synth(SynthArgs a, const std::string& prov) {
  a.scene.kind = parse_scene_kind(a.kind);
  const Grid grid = make_scene(a.scene);
  const std::vector<std::string> comments{prov, "scene " + to_string(a.scene.kind) + ", seed " +
                                                    std::to_string(a.scene.seed)};
  write_ascii_grid_file(a.out, grid, comments);
  std::cout << a.out << '\n';

  if (a.gcps > 0) {
    if (a.gcp_out.empty()) throw ConfigError("--gcp-out is required with --gcps");
    std::optional<Grid> field;
    if (!a.error_field.empty()) field = read_ascii_grid_file(a.error_field);
    ScatterOptions so;
    so.n = a.gcps;
    so.seed = a.scene.seed + 1;
    so.min_separation = a.min_separation;
    so.snap_to_centres = a.snap;
    so.error_sd = a.error_sd;
    so.error_field = field ? &*field : nullptr;
    const auto pts = scatter_points(grid, so);
    auto out = open_output(a.gcp_out);
    out << "# " << prov << '\n';
    write_control_points(out, pts);
    std::cout << a.gcp_out << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DEM vertical accuracy assessment against ground control points"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));
  const std::string prov = provenance_line(argc, argv);

  AssessArgs assess;
  auto* cmd_assess = app.add_subcommand("assess", "run the full assessment pipeline");
  cmd_assess->add_option("-c,--config", assess.config, "INI configuration file")->check(CLI::ExistingFile);
  cmd_assess->add_option("-s,--set", assess.overrides, "override a setting: section.key=value");
  cmd_assess->add_option("--dem", assess.dem, "DEM grid (overrides input.dem)");
  cmd_assess->add_option("--gcps", assess.gcps, "control point CSV (overrides input.gcps)");
  cmd_assess->add_option("--classmap", assess.classmap, "land-cover class grid");
  cmd_assess->add_option("--legend", assess.legend, "class legend CSV");
  cmd_assess->add_option("--method", assess.method, "extraction method: nearest|bilinear");
  cmd_assess->add_option("-o,--out", assess.out, "output directory");
  cmd_assess->add_option("--scheme", assess.scheme, "weights: inverse_distance|fixed_band");
  cmd_assess->add_option("--threshold", assess.threshold, "weights distance band or 'auto'");
  cmd_assess->add_option("--seed", assess.seed, "permutation seed");
  cmd_assess->add_option("--permutations", assess.permutations, "Moran permutations (0 = analytic only)");

  std::string terrain_dem, terrain_prefix;
  double z_factor = 1.0;
  auto* cmd_terrain = app.add_subcommand("terrain", "slope and aspect grids from a DEM");
  cmd_terrain->add_option("--dem", terrain_dem, "DEM grid")->required();
  cmd_terrain->add_option("-o,--out", terrain_prefix, "output prefix")->required();
  cmd_terrain->add_option("-z,--z-factor", z_factor, "vertical to horizontal unit factor");

  ClassifyArgs cls;
  auto* cmd_classify = app.add_subcommand("classify", "parallelepiped land-cover classification");
  cmd_classify->add_option("--image", cls.images, "band grid, repeat per band")->required();
  cmd_classify->add_option("--training", cls.training, "training CSV x,y,class_code")->required();
  cmd_classify->add_option("--legend", cls.legend, "legend CSV class_code,label");
  cmd_classify->add_option("-k", cls.k, "box half-width in standard deviations");
  cmd_classify->add_option("-o,--out", cls.out, "output class grid")->required();
  cmd_classify->add_option("--check", cls.check, "held-out labelled points for an accuracy line");

  MoranArgs moran;
  auto* cmd_moran = app.add_subcommand("moran", "global Moran's I of a samples table");
  cmd_moran->add_option("--samples", moran.samples, "samples CSV")->required();
  cmd_moran->add_option("--field", moran.field, "delta_h|h_dem|h_ref");
  cmd_moran->add_option("--scheme", moran.scheme, "inverse_distance|fixed_band");
  cmd_moran->add_option("--threshold", moran.threshold, "distance band or 'auto'");
  cmd_moran->add_flag("--row-standardize", moran.row_standardize);
  cmd_moran->add_option("--assumption", moran.assumption, "randomization|normality");
  cmd_moran->add_option("--permutations", moran.permutations, "0 = analytic only");
  cmd_moran->add_option("--seed", moran.seed);
  cmd_moran->add_option("-o,--out", moran.out, "output JSON (default stdout)");

  SynthArgs synth;
  auto* cmd_synth = app.add_subcommand("synth", "synthetic scenes and control points");
  cmd_synth->add_option("--kind", synth.kind, "plane|checkerboard|smoothed_noise");
  cmd_synth->add_option("--ncols", synth.scene.shape.ncols);
  cmd_synth->add_option("--nrows", synth.scene.shape.nrows);
  cmd_synth->add_option("--xll", synth.scene.shape.xll);
  cmd_synth->add_option("--yll", synth.scene.shape.yll);
  cmd_synth->add_option("--cellsize", synth.scene.shape.cellsize);
  cmd_synth->add_option("--a", synth.scene.a, "plane x coefficient");
  cmd_synth->add_option("--b", synth.scene.b, "plane y coefficient");
  cmd_synth->add_option("--c", synth.scene.c, "plane offset");
  cmd_synth->add_option("--amplitude", synth.scene.amplitude);
  cmd_synth->add_option("--sd", synth.scene.sd);
  cmd_synth->add_option("--radius", synth.scene.radius);
  cmd_synth->add_option("--seed", synth.scene.seed);
  cmd_synth->add_option("-o,--out", synth.out, "output grid")->required();
  cmd_synth->add_option("--gcps", synth.gcps, "number of control points to scatter");
  cmd_synth->add_option("--gcp-out", synth.gcp_out, "control point CSV");
  cmd_synth->add_option("--min-separation", synth.min_separation);
  cmd_synth->add_option("--error-sd", synth.error_sd, "iid planted error sd");
  cmd_synth->add_option("--error-field", synth.error_field, "grid of planted errors");
  cmd_synth->add_flag("--snap", synth.snap, "place points at cell centres");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (cmd_assess->parsed()) return run_assess(assess);
    if (cmd_terrain->parsed()) return run_terrain(terrain_dem, terrain_prefix, z_factor, prov);
    if (cmd_classify->parsed()) return run_classify(cls, prov);
    if (cmd_moran->parsed()) return run_moran(moran, prov);
    if (cmd_synth->parsed()) return run_synth(synth, prov);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kParse;
  } catch (const DegenerateError& e) {
    std::cerr << "degenerate statistics: " << e.what() << '\n';
    return kDegenerate;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}
