#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "demacc/sample.hpp"
#include "demacc/screen.hpp"
#include "demacc/spatial.hpp"
#include "demacc/stats.hpp"

namespace demacc {

inline constexpr const char* kVersion = "0.1.0";

/// Every knob of the assessment pipeline. Paths are stored as given after
/// resolution against the config file's directory.
struct AssessConfig {
  std::string dem;
  std::string gcps;
  std::optional<std::string> classmap;
  std::optional<std::string> legend;
  std::optional<std::string> slope;
  std::optional<std::string> aspect;

  ExtractMethod method = ExtractMethod::Nearest;
  std::set<int> exclude_classes;
  std::optional<double> min_height;
  bool tukey = true;
  ScreenField tukey_field = ScreenField::DeltaH;
  std::map<int, int> class_remap;
  double z_factor = 1.0;

  WeightsOptions weights;
  MoranAssumption assumption = MoranAssumption::Randomization;
  std::size_t permutations = 0;
  std::uint64_t seed = 0;

  double histogram_width = 1.0;
  double histogram_origin = 0.0;

  std::string output_dir = "out";
};

/// Parses INI-style `section.key = value` settings. Unknown keys and
/// invalid values raise ConfigError.
class ConfigBuilder {
 public:
  /// Loads an INI file; relative paths resolve against its directory.
  void load_file(const std::string& path);
  /// Applies one `section.key=value` override.
  void set(const std::string& assignment);
  void set(const std::string& key, const std::string& value);

  AssessConfig build() const;
  /// Effective settings in key order, for echoing into reports.
  const std::map<std::string, std::string>& settings() const noexcept { return settings_; }

 private:
  std::map<std::string, std::string> settings_;
  std::string base_dir_;
};

struct ScreeningStage {
  std::string stage;
  std::size_t before = 0;
  std::size_t kept = 0;
  std::size_t removed = 0;
};

struct ClassSummary {
  std::optional<int> class_code;  ///< empty for the total row
  std::string label;
  std::size_t n = 0;
  std::optional<SummaryStats> stats;
  std::string reason;  ///< why stats are missing
};

struct NamedCorrelation {
  std::string name;
  std::string x;
  std::string y;
  std::optional<CorrelationResult> result;
  std::string reason;
};

struct AssessmentReport {
  std::vector<std::pair<std::string, std::string>> provenance;
  std::vector<ScreeningStage> screening;
  std::optional<TukeyFences> fences;
  std::vector<ClassSummary> by_class;
  ClassSummary total;

  std::optional<AnovaTable> anova;
  std::string anova_reason;

  std::optional<MoranResult> moran;
  std::optional<PermutationResult> permutation;
  std::optional<double> weights_threshold;
  std::size_t weights_nonzero = 0;
  std::string moran_reason;

  std::vector<NamedCorrelation> correlations;
  std::vector<std::pair<std::string, std::vector<HistogramBin>>> histograms;
  double histogram_width = 1.0;

  /// Every input record with the stage that removed it ("kept" otherwise).
  std::vector<SampleRecord> samples;
  std::vector<std::string> sample_status;

  std::string to_json() const;
};

/// Runs extraction, screening, summaries, ANOVA, correlations and Moran's I.
/// Errors carry the failing stage name. Inferential statistics that are
/// undefined for the data are recorded with a reason instead of failing.
AssessmentReport run_assessment(const AssessConfig& config,
                                const std::map<std::string, std::string>& settings = {});

/// Writes report.json and the CSV tables into `dir` via a staging directory
/// renamed into place, so a failure leaves no partial output.
void write_assessment(const AssessmentReport& report, const std::string& dir);

}  // namespace demacc
