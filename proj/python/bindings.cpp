// Python bindings for the demacc core.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "demacc/assess.hpp"
#include "demacc/error.hpp"
#include "demacc/raster.hpp"
#include "demacc/screen.hpp"
#include "demacc/spatial.hpp"
#include "demacc/stats.hpp"
#include "demacc/synth.hpp"
#include "demacc/terrain.hpp"

namespace py = pybind11;
using namespace demacc;

namespace {

py::array_t<double> grid_array(const Grid& g) {
  py::array_t<double> a({g.nrows(), g.ncols()});
  auto m = a.mutable_unchecked<2>();
  for (std::size_t r = 0; r < g.nrows(); ++r) {
    for (std::size_t c = 0; c < g.ncols(); ++c) m(r, c) = g.at(r, c);
  }
  return a;
}

Grid grid_from_array(py::array_t<double, py::array::c_style | py::array::forcecast> values, double xll, double yll,
                     double cellsize, double nodata) {
  if (values.ndim() != 2) throw ConfigError("grid values must be a 2-D array");
  const Georef geo{static_cast<std::size_t>(values.shape(1)), static_cast<std::size_t>(values.shape(0)), xll, yll,
                   cellsize};
  return Grid(geo, std::vector<double>(values.data(), values.data() + values.size()), nodata);
}

py::dict moran_dict(const MoranResult& r) {
  py::dict d;
  d["i"] = r.i;
  d["expected"] = r.e_i;
  d["variance"] = r.v_i;
  d["z"] = r.z;
  d["p"] = r.p;
  d["assumption"] = to_string(r.assumption);
  return d;
}

}  // namespace

PYBIND11_MODULE(_demacc, m) {
  m.doc() = "DEM vertical accuracy assessment";
  m.attr("__version__") = kVersion;

  static py::exception<Error> base(m, "Error");
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<DegenerateError>(m, "DegenerateError", base.ptr());

  py::class_<Grid>(m, "Grid")
      .def(py::init(&grid_from_array), py::arg("values"), py::arg("xll") = 0.0, py::arg("yll") = 0.0,
           py::arg("cellsize") = 1.0, py::arg("nodata") = kDefaultNodata)
      .def_property_readonly("ncols", &Grid::ncols)
      .def_property_readonly("nrows", &Grid::nrows)
      .def_property_readonly("xll", [](const Grid& g) { return g.georef().xll; })
      .def_property_readonly("yll", [](const Grid& g) { return g.georef().yll; })
      .def_property_readonly("cellsize", &Grid::cellsize)
      .def_property_readonly("nodata", &Grid::nodata)
      .def("to_numpy", &grid_array)
      .def("sample", &Grid::sample_nearest, py::arg("x"), py::arg("y"))
      .def("write", [](const Grid& g, const std::string& path) { write_ascii_grid_file(path, g); })
      .def("__eq__", [](const Grid& a, const Grid& b) { return a == b; });

  m.def("read_grid", &read_ascii_grid_file, py::arg("path"));

  m.def(
      "slope_aspect",
      [](const Grid& dem, double z) {
        auto d = slope_aspect(dem, z);
        return py::make_tuple(std::move(d.slope), std::move(d.aspect));
      },
      py::arg("dem"), py::arg("z_factor") = 1.0);

  m.def(
      "summarize",
      [](const std::vector<double>& v) {
        const auto s = summarize(v);
        py::dict d;
        d["n"] = s.n;
        d["mean"] = s.mean;
        d["sd"] = s.sd;
        d["rmse"] = s.rmse;
        d["min"] = s.min;
        d["max"] = s.max;
        d["range"] = s.range;
        return d;
      },
      py::arg("deltas"));
  m.def("rmse_from_moments", &rmse_from_moments, py::arg("mean"), py::arg("sd"), py::arg("n"));

  m.def(
      "f_test",
      [](double ssb, std::size_t dfb, double ssw, std::size_t dfw) {
        const auto t = f_test(ssb, dfb, ssw, dfw);
        py::dict d;
        d["f"] = t.f;
        d["p"] = t.p;
        d["ms_between"] = t.ms_between;
        d["ms_within"] = t.ms_within;
        return d;
      },
      py::arg("ss_between"), py::arg("df_between"), py::arg("ss_within"), py::arg("df_within"));
  m.def("f_cdf", &f_cdf, py::arg("x"), py::arg("d1"), py::arg("d2"));
  m.def("two_tailed_p", &two_tailed_p, py::arg("z"));
  m.def(
      "pearson_r", [](const std::vector<double>& x, const std::vector<double>& y) { return pearson_r(x, y).r; },
      py::arg("x"), py::arg("y"));

  m.def(
      "tukey_fences",
      [](const std::vector<double>& v, double k) {
        const auto f = tukey_fences(v, k);
        py::dict d;
        d["q1"] = f.q1;
        d["q3"] = f.q3;
        d["iqr"] = f.iqr;
        d["lower"] = f.lower;
        d["upper"] = f.upper;
        return d;
      },
      py::arg("values"), py::arg("k") = 1.5);

  m.def(
      "moran",
      [](const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& values,
         const std::string& scheme, std::optional<double> threshold, bool row_standardize,
         const std::string& assumption, std::size_t permutations, std::uint64_t seed) {
        if (x.size() != y.size()) throw ConfigError("x and y differ in length");
        std::vector<Point2> pts;
        for (std::size_t i = 0; i < x.size(); ++i) pts.push_back({x[i], y[i]});
        WeightsOptions opt{parse_weight_scheme(scheme), threshold, row_standardize};
        const MoranAssumption a = parse_moran_assumption(assumption);
        std::optional<BuiltWeights> bw;
        MoranResult r;
        std::optional<PermutationResult> perm;
        {
          py::gil_scoped_release release;
          bw = build_weights(pts, opt);
          r = morans_significance(values, bw->weights, a);
          if (permutations > 0) perm = permutation_test(values, bw->weights, permutations, seed);
        }
        py::dict d = moran_dict(r);
        d["threshold"] = bw->threshold;
        if (perm) d["pseudo_p"] = perm->pseudo_p;
        return d;
      },
      py::arg("x"), py::arg("y"), py::arg("values"), py::arg("scheme") = "inverse_distance",
      py::arg("threshold") = py::none(), py::arg("row_standardize") = false,
      py::arg("assumption") = "randomization", py::arg("permutations") = 0, py::arg("seed") = 0);

  m.def(
      "make_plane",
      [](double a, double b, double c, std::size_t ncols, std::size_t nrows, double xll, double yll, double cs) {
        return make_plane(a, b, c, Georef{ncols, nrows, xll, yll, cs});
      },
      py::arg("a"), py::arg("b"), py::arg("c"), py::arg("ncols"), py::arg("nrows"), py::arg("xll") = 0.0,
      py::arg("yll") = 0.0, py::arg("cellsize") = 1.0);
  m.def(
      "make_smoothed_noise",
      [](double sd, unsigned radius, std::size_t ncols, std::size_t nrows, std::uint64_t seed, double cs) {
        return make_smoothed_noise(sd, radius, Georef{ncols, nrows, 0.0, 0.0, cs}, seed);
      },
      py::arg("sd"), py::arg("radius"), py::arg("ncols"), py::arg("nrows"), py::arg("seed") = 0,
      py::arg("cellsize") = 1.0);

  m.def(
      "assess",
      [](const std::map<std::string, std::string>& settings, std::optional<std::string> config,
         std::optional<std::string> out_dir) {
        ConfigBuilder b;
        if (config) b.load_file(*config);
        for (const auto& [k, v] : settings) b.set(k, v);
        const auto cfg = b.build();
        const auto rep = run_assessment(cfg, b.settings());
        if (out_dir) write_assessment(rep, *out_dir);
        return rep.to_json();
      },
      py::arg("settings") = std::map<std::string, std::string>{}, py::arg("config") = py::none(),
      py::arg("out_dir") = py::none(),
      "Run the assessment pipeline; returns report.json text.");
}
