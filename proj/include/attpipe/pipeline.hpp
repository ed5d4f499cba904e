#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "attpipe/events.hpp"
#include "attpipe/fusion.hpp"
#include "attpipe/logit.hpp"
#include "attpipe/puretypes.hpp"
#include "attpipe/synth.hpp"

namespace attpipe {

class MissingInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptySampleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PipelineConfig {
  // inputs / outputs
  std::filesystem::path events_path;
  std::filesystem::path profiles_path;
  std::filesystem::path bias_table_path;
  std::filesystem::path out_dir;

  // lexicon selection; files override the built-in stem lists
  std::optional<std::filesystem::path> post_lexicon_file;
  std::optional<std::filesystem::path> comment_lexicon_file;

  // pure-types estimation
  double delta = 1e-5;
  int grid_resolution = 101;
  double grid_exponent = 1.0 / 256.0;

  // sample filters
  int min_subscriptions = 10;
  std::optional<int> max_age = 90;
  bool apply_age_to_puretypes = false;
  int min_support = 1;  // sources with known bias needed to trust x

  // group cutoffs and histogram bins
  double cutoff_low = 0.33;
  double cutoff_high = 0.66;
  double age_bin_width = 5.0;
  double x_bin_width = 0.05;

  // simulate subcommand
  std::uint64_t seed = 42;
  long sim_n = 582;
  double sim_p = 0.95;
  double sim_q = 0.45;
  std::string sim_x_dist = "default";
  long sim_logit_n = 0;
  std::array<double, 5> sim_logit_coefs{0.309, -0.022, -0.751, 0.011, 3.431};

  void validate() const;
};

/// "default" | "uniform" | "beta:a,b" | "threepoint:a0,a1,a2,w0,w1,w2"
XDistribution parse_x_distribution(const std::string& text);

struct StageCount {
  std::string name;
  long count = 0;
};

struct ReportBundle {
  CohortTable table;
  FitResult puretypes;
  LogitFit logit;
  std::vector<StageCount> stages;
  long undefined_overall = 0;
  long anomalous_age_count = 0;
  long regression_dropped_missing = 0;
  std::vector<std::filesystem::path> written;
};

/// Full pipeline: ingest -> fuse -> ideology -> filters -> both fits ->
/// artifact files under config.out_dir. Deterministic: identical inputs and
/// config produce byte-identical artifacts.
ReportBundle run_report(const PipelineConfig& config);

/// Writes synthetic observation / regression-row CSVs and a truth manifest
/// under config.out_dir.
std::vector<std::filesystem::path> run_simulate(const PipelineConfig& config);

// Pieces reused by the CLI subcommands.
std::vector<InteractionEvent> load_events(const std::filesystem::path& path,
                                          LineLogSummary& summary);
std::vector<UserProfile> load_profiles(const std::filesystem::path& path,
                                       LineLogSummary& summary);
SourceBiasTable load_bias_table(const std::filesystem::path& path);
TopicLexicon load_lexicon(const std::optional<std::filesystem::path>& file,
                          const TopicLexicon& fallback);

std::string signals_csv(std::span<const UserSignals> signals);
std::vector<UserSignals> read_signals_csv(std::istream& in);

struct Histogram {
  double origin = 0.0;
  double bin_width = 1.0;
  std::vector<long> counts;
};

Histogram make_histogram(std::span<const double> values, double bin_width,
                         double origin = 0.0);
std::string histogram_csv(const Histogram& hist);

}  // namespace attpipe
