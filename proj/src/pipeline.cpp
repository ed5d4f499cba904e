#include "attpipe/pipeline.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "attpipe/csv.hpp"
#include "attpipe/ideology.hpp"

namespace attpipe {

using ordered_json = nlohmann::ordered_json;

void PipelineConfig::validate() const {
  if (!(delta > 0.0 && delta < 0.5))
    throw std::invalid_argument("delta must lie in (0, 0.5)");
  if (grid_resolution < 2) throw std::invalid_argument("grid resolution must be >= 2");
  if (!(grid_exponent > 0.0))
    throw std::invalid_argument("grid exponent must be positive");
  if (min_subscriptions < 0)
    throw std::invalid_argument("min_subscriptions must be nonnegative");
  if (min_support < 1) throw std::invalid_argument("min_support must be >= 1");
  if (!(cutoff_low > 0.0 && cutoff_low < cutoff_high && cutoff_high < 1.0))
    throw std::invalid_argument("group cutoffs must satisfy 0 < low < high < 1");
  if (!(age_bin_width > 0.0) || !(x_bin_width > 0.0))
    throw std::invalid_argument("histogram bin widths must be positive");
  if (max_age && *max_age < 0) throw std::invalid_argument("max_age must be nonnegative");
}

XDistribution parse_x_distribution(const std::string& text) {
  if (text == "default") return XDistribution::default_mixture();
  if (text == "uniform") return XDistribution::uniform();
  auto split_args = [](std::string_view args) {
    std::vector<double> values;
    std::size_t start = 0;
    while (start <= args.size()) {
      const std::size_t comma = args.find(',', start);
      const std::string_view piece =
          args.substr(start, comma == std::string_view::npos ? comma : comma - start);
      values.push_back(parse_double_field(piece, "x distribution"));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    return values;
  };
  if (text.rfind("beta:", 0) == 0) {
    const auto args = split_args(std::string_view(text).substr(5));
    if (args.size() != 2)
      throw std::invalid_argument("beta distribution needs two parameters: beta:a,b");
    return XDistribution::beta_only(args[0], args[1]);
  }
  if (text.rfind("threepoint:", 0) == 0) {
    const auto args = split_args(std::string_view(text).substr(11));
    if (args.size() != 6)
      throw std::invalid_argument(
          "three-point distribution needs threepoint:a0,a1,a2,w0,w1,w2");
    return XDistribution::three_point({args[0], args[1], args[2]},
                                      {args[3], args[4], args[5]});
  }
  throw std::invalid_argument("unknown x distribution '" + text + "'");
}

namespace {

void require_file(const std::filesystem::path& path, std::string_view what) {
  if (path.empty())
    throw MissingInputError(std::string(what) + " path not configured");
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec))
    throw MissingInputError(std::string(what) + " not found: " + path.string());
}

}  // namespace

std::vector<InteractionEvent> load_events(const std::filesystem::path& path,
                                          LineLogSummary& summary) {
  require_file(path, "event log");
  std::ifstream in(path);
  if (!in) throw MissingInputError("cannot open event log: " + path.string());
  return read_event_log(in, summary);
}

std::vector<UserProfile> load_profiles(const std::filesystem::path& path,
                                       LineLogSummary& summary) {
  require_file(path, "profiles file");
  std::ifstream in(path);
  if (!in) throw MissingInputError("cannot open profiles file: " + path.string());
  return read_profiles(in, summary);
}

SourceBiasTable load_bias_table(const std::filesystem::path& path) {
  require_file(path, "bias table");
  std::ifstream in(path);
  if (!in) throw MissingInputError("cannot open bias table: " + path.string());
  return SourceBiasTable::from_csv(in);
}

TopicLexicon load_lexicon(const std::optional<std::filesystem::path>& file,
                          const TopicLexicon& fallback) {
  if (!file) return fallback;
  require_file(*file, "lexicon file");
  std::ifstream in(*file);
  if (!in) throw MissingInputError("cannot open lexicon file: " + file->string());
  return TopicLexicon::from_stem_file(in);
}

std::string signals_csv(std::span<const UserSignals> signals) {
  std::string out = "user_id,comment_attitude,like_attitude\n";
  for (const auto& s : signals) {
    out += s.user_id;
    out += ',';
    out += s.comment_attitude ? std::to_string(*s.comment_attitude) : std::string("none");
    out += ',';
    out += s.like_attitude ? std::to_string(*s.like_attitude) : std::string("none");
    out += '\n';
  }
  return out;
}

std::vector<UserSignals> read_signals_csv(std::istream& in) {
  CsvTable csv = read_csv(in, "signals");
  const int user = csv.column("user_id");
  const int comment = csv.column("comment_attitude");
  const int like = csv.column("like_attitude");
  if (user < 0 || comment < 0 || like < 0)
    throw std::runtime_error(
        "signals file requires header columns user_id,comment_attitude,like_attitude");
  std::vector<UserSignals> signals;
  for (const auto& row : csv.rows) {
    UserSignals s;
    s.user_id = row[static_cast<std::size_t>(user)];
    const auto& c = row[static_cast<std::size_t>(comment)];
    const auto& l = row[static_cast<std::size_t>(like)];
    if (c != "none") s.comment_attitude = static_cast<int>(parse_long_field(c, "comment_attitude"));
    if (l != "none") s.like_attitude = static_cast<int>(parse_long_field(l, "like_attitude"));
    signals.push_back(std::move(s));
  }
  return signals;
}

Histogram make_histogram(std::span<const double> values, double bin_width,
                         double origin) {
  if (!(bin_width > 0.0)) throw std::invalid_argument("bin width must be positive");
  Histogram hist;
  hist.origin = origin;
  hist.bin_width = bin_width;
  for (double v : values) {
    const double offset = (v - origin) / bin_width;
    if (offset < 0.0) throw std::invalid_argument("histogram value below origin");
    const auto bin = static_cast<std::size_t>(offset);
    if (bin >= hist.counts.size()) hist.counts.resize(bin + 1, 0);
    ++hist.counts[bin];
  }
  return hist;
}

std::string histogram_csv(const Histogram& hist) {
  std::string out = "bin_low,bin_high,count\n";
  for (std::size_t i = 0; i < hist.counts.size(); ++i) {
    out += format_full(hist.origin + hist.bin_width * static_cast<double>(i));
    out += ',';
    out += format_full(hist.origin + hist.bin_width * static_cast<double>(i + 1));
    out += ',';
    out += std::to_string(hist.counts[i]);
    out += '\n';
  }
  return out;
}

namespace {

std::string stage_summary(const std::vector<StageCount>& stages) {
  std::string out;
  for (const auto& stage : stages) {
    if (!out.empty()) out += ", ";
    out += stage.name + "=" + std::to_string(stage.count);
  }
  return out;
}

ordered_json issues_json(const LineLogSummary& summary, std::size_t cap = 20) {
  ordered_json arr = ordered_json::array();
  for (std::size_t i = 0; i < summary.issues.size() && i < cap; ++i)
    arr.push_back({{"line", summary.issues[i].line},
                   {"message", summary.issues[i].message}});
  return arr;
}

}  // namespace

ReportBundle run_report(const PipelineConfig& config) {
  config.validate();

  LineLogSummary event_summary;
  LineLogSummary profile_summary;
  const auto events = load_events(config.events_path, event_summary);
  const auto profiles = load_profiles(config.profiles_path, profile_summary);
  const auto bias = load_bias_table(config.bias_table_path);
  const TopicLexicon post_lexicon =
      load_lexicon(config.post_lexicon_file, TopicLexicon::covid());
  const TopicLexicon comment_lexicon =
      load_lexicon(config.comment_lexicon_file, TopicLexicon::masks());

  SignalStats stats;
  const auto signals = derive_signals(events, post_lexicon, comment_lexicon, &stats);

  std::unordered_map<std::string, const UserProfile*> profile_by_id;
  profile_by_id.reserve(profiles.size());
  for (const auto& profile : profiles) profile_by_id.emplace(profile.user_id, &profile);

  std::vector<UserRecord> records;
  records.reserve(signals.size());
  long without_profile = 0;
  for (const auto& s : signals) {
    UserRecord r;
    r.user_id = s.user_id;
    r.comment_attitude = s.comment_attitude;
    r.like_attitude = s.like_attitude;
    r.overall = fuse(s.comment_attitude, s.like_attitude);
    if (auto it = profile_by_id.find(s.user_id); it != profile_by_id.end()) {
      r.age = it->second->age;
      r.gender = it->second->gender;
      r.friend_count = it->second->friend_count;
      r.subscriptions = it->second->subscriptions;
    } else {
      ++without_profile;
    }
    if (!r.subscriptions.empty()) {
      if (auto score = estimate_x(r.subscriptions, bias);
          score && score->support >= config.min_support)
        r.ideology = score;
    }
    records.push_back(std::move(r));
  }

  ReportBundle bundle;
  for (const auto& r : records)
    if (r.overall == Overall::undefined) ++bundle.undefined_overall;

  std::vector<AttitudeTriple> triples;
  triples.reserve(records.size());
  for (const auto& r : records)
    triples.push_back({r.comment_attitude, r.like_attitude, r.overall});
  bundle.table = tabulate(triples);

  long defined_count = 0;
  for (const auto& r : records)
    if (r.overall == Overall::negative || r.overall == Overall::positive)
      ++defined_count;

  const auto subscribed = apply_filters(
      records, FilterOptions{config.min_subscriptions, std::nullopt, true});

  std::vector<UserRecord> analysis;
  for (const auto& r : subscribed)
    if (r.ideology) analysis.push_back(r);

  if (config.max_age)
    for (const auto& r : analysis)
      if (r.age && *r.age > *config.max_age) ++bundle.anomalous_age_count;

  std::vector<UserRecord> puretypes_sample = analysis;
  if (config.apply_age_to_puretypes && config.max_age)
    puretypes_sample = apply_filters(
        analysis, FilterOptions{config.min_subscriptions, config.max_age, true});

  std::vector<RegressionRow> rows;
  for (const auto& r : analysis) {
    if (!r.age || !r.gender) {
      ++bundle.regression_dropped_missing;
      continue;
    }
    if (config.max_age && *r.age > *config.max_age) continue;
    rows.push_back({r.overall == Overall::positive ? 1 : 0,
                    static_cast<double>(*r.age), *r.gender,
                    static_cast<double>(r.friend_count), r.ideology->x});
  }

  bundle.stages = {
      {"interacting_users", static_cast<long>(records.size())},
      {"defined_attitude", defined_count},
      {"subscription_filter", static_cast<long>(subscribed.size())},
      {"ideology_estimated", static_cast<long>(analysis.size())},
      {"puretypes_observations", static_cast<long>(puretypes_sample.size())},
      {"regression_rows", static_cast<long>(rows.size())},
  };

  if (puretypes_sample.empty())
    throw EmptySampleError("no observations after filtering; " +
                           stage_summary(bundle.stages));

  std::vector<Observation> obs;
  obs.reserve(puretypes_sample.size());
  for (const auto& r : puretypes_sample)
    obs.push_back({r.ideology->x, r.overall == Overall::positive ? +1 : -1});

  FitOptions fit_options;
  fit_options.delta = config.delta;
  bundle.puretypes = fit(obs, fit_options);
  const ContourGrid grid =
      contour_grid(obs, config.grid_resolution, config.grid_exponent, config.delta);

  if (rows.size() < 6)
    throw EmptySampleError("fewer than 6 complete regression rows; " +
                           stage_summary(bundle.stages));
  bundle.logit = fit_logit(rows);

  // summary artifacts over the analysis sample
  long attitude_counts[3] = {0, 0, 0};  // -1, 0, +1
  long gender_counts[3] = {0, 0, 0};    // female, male, unknown
  std::vector<double> ages;
  std::vector<double> xs;
  for (const auto& r : analysis) {
    if (r.overall == Overall::negative) ++attitude_counts[0];
    else if (r.overall == Overall::positive) ++attitude_counts[2];
    else ++attitude_counts[1];
    if (r.gender) ++gender_counts[*r.gender];
    else ++gender_counts[2];
    if (r.age) ages.push_back(static_cast<double>(*r.age));
    xs.push_back(r.ideology->x);
  }

  struct GroupShare {
    long count = 0;
    long positive = 0;
  };
  GroupShare groups[3];
  for (const auto& r : analysis) {
    const auto g = classify_group(r.ideology->x, config.cutoff_low, config.cutoff_high);
    auto& share = groups[static_cast<int>(g)];
    ++share.count;
    if (r.overall == Overall::positive) ++share.positive;
  }

  std::filesystem::create_directories(config.out_dir);
  auto emit = [&](const std::filesystem::path& name, const std::string& content) {
    const auto path = config.out_dir / name;
    write_text_file(path, content);
    bundle.written.push_back(path);
  };

  emit("cohort_table.csv", cohort_table_csv(bundle.table));
  emit("observations.csv", observations_csv(obs));

  {
    std::string fit_csv = "p,q,nll,identifiable,iterations,converged\n";
    fit_csv += format_full(bundle.puretypes.params.p);
    fit_csv += ',' + format_full(bundle.puretypes.params.q);
    fit_csv += ',' + format_full(bundle.puretypes.nll);
    fit_csv += bundle.puretypes.identifiable ? ",true" : ",false";
    fit_csv += ',' + std::to_string(bundle.puretypes.iterations);
    fit_csv += bundle.puretypes.converged ? ",true" : ",false";
    fit_csv += '\n';
    emit("puretypes_fit.csv", fit_csv);
  }

  emit("contour_grid.csv", contour_grid_csv(grid));
  emit("regression_summary.txt", wald_table_text(bundle.logit));
  emit("regression_summary.csv", wald_table_csv(bundle.logit));

  {
    std::string csv = "attitude,count\n";
    csv += "-1," + std::to_string(attitude_counts[0]) + "\n";
    csv += "0," + std::to_string(attitude_counts[1]) + "\n";
    csv += "1," + std::to_string(attitude_counts[2]) + "\n";
    emit("attitude_histogram.csv", csv);
  }
  {
    std::string csv = "gender,count\n";
    csv += "female," + std::to_string(gender_counts[0]) + "\n";
    csv += "male," + std::to_string(gender_counts[1]) + "\n";
    csv += "unknown," + std::to_string(gender_counts[2]) + "\n";
    emit("gender_histogram.csv", csv);
  }
  emit("age_histogram.csv", histogram_csv(make_histogram(ages, config.age_bin_width)));
  emit("ideology_histogram.csv", histogram_csv(make_histogram(xs, config.x_bin_width)));

  {
    std::string csv = "group,count,share_negative,share_positive\n";
    static const PoliticalGroup order[3] = {PoliticalGroup::conservative,
                                            PoliticalGroup::moderate,
                                            PoliticalGroup::oppositionist};
    for (const auto g : order) {
      const auto& share = groups[static_cast<int>(g)];
      const double pos =
          share.count > 0
              ? static_cast<double>(share.positive) / static_cast<double>(share.count)
              : 0.0;
      const double neg = share.count > 0 ? 1.0 - pos : 0.0;
      csv += std::string(group_name(g)) + ',' + std::to_string(share.count) + ',' +
             format_full(neg) + ',' + format_full(pos) + '\n';
    }
    emit("group_proportions.csv", csv);
  }

  {
    ordered_json manifest;
    manifest["config"] = {
        {"events", config.events_path.string()},
        {"profiles", config.profiles_path.string()},
        {"bias_table", config.bias_table_path.string()},
        {"out_dir", config.out_dir.string()},
        {"post_lexicon", config.post_lexicon_file ? config.post_lexicon_file->string()
                                                  : "builtin"},
        {"comment_lexicon", config.comment_lexicon_file
                                ? config.comment_lexicon_file->string()
                                : "builtin"},
        {"delta", config.delta},
        {"grid_resolution", config.grid_resolution},
        {"grid_exponent", config.grid_exponent},
        {"min_subscriptions", config.min_subscriptions},
        {"max_age", config.max_age ? ordered_json(*config.max_age) : ordered_json()},
        {"apply_age_to_puretypes", config.apply_age_to_puretypes},
        {"min_support", config.min_support},
        {"cutoff_low", config.cutoff_low},
        {"cutoff_high", config.cutoff_high},
        {"age_bin_width", config.age_bin_width},
        {"x_bin_width", config.x_bin_width},
    };
    manifest["ingest"] = {
        {"event_lines", event_summary.lines},
        {"events_parsed", event_summary.parsed},
        {"events_malformed", event_summary.malformed},
        {"event_issues", issues_json(event_summary)},
        {"profile_lines", profile_summary.lines},
        {"profiles_parsed", profile_summary.parsed},
        {"profiles_malformed", profile_summary.malformed},
        {"profile_issues", issues_json(profile_summary)},
        {"users_without_profile", without_profile},
        {"topic_posts", stats.topic_posts},
        {"topic_comments", stats.topic_comments},
        {"commenters", stats.commenters},
        {"likers", stats.likers},
        {"dual_signal_users", stats.both_signals},
    };
    ordered_json stages = ordered_json::array();
    for (const auto& stage : bundle.stages)
      stages.push_back({{"stage", stage.name}, {"count", stage.count}});
    manifest["stages"] = stages;
    manifest["undefined_overall"] = bundle.undefined_overall;
    manifest["anomalous_age_count"] = bundle.anomalous_age_count;
    manifest["regression_dropped_missing"] = bundle.regression_dropped_missing;
    manifest["cohort_total"] = bundle.table.total;
    manifest["puretypes"] = {
        {"p", bundle.puretypes.params.p},
        {"q", bundle.puretypes.params.q},
        {"nll", bundle.puretypes.nll},
        {"identifiable", bundle.puretypes.identifiable},
        {"iterations", bundle.puretypes.iterations},
        {"converged", bundle.puretypes.converged},
    };
    manifest["regression"] = {
        {"converged", bundle.logit.converged},
        {"n_used", bundle.logit.n_used},
        {"iterations", bundle.logit.iterations},
    };
    emit("manifest.json", manifest.dump(2) + "\n");
  }

  return bundle;
}

std::vector<std::filesystem::path> run_simulate(const PipelineConfig& config) {
  config.validate();
  const XDistribution xdist = parse_x_distribution(config.sim_x_dist);

  CohortSpec spec;
  spec.n = config.sim_n;
  spec.p_true = config.sim_p;
  spec.q_true = config.sim_q;
  spec.x_distribution = xdist;
  spec.seed = config.seed;

  const auto obs = gen_cohort(spec);

  std::filesystem::create_directories(config.out_dir);
  std::vector<std::filesystem::path> written;
  auto emit = [&](const std::filesystem::path& name, const std::string& content) {
    const auto path = config.out_dir / name;
    write_text_file(path, content);
    written.push_back(path);
  };

  emit("observations.csv", observations_csv(obs));

  ordered_json truth;
  truth["seed"] = config.seed;
  truth["n"] = config.sim_n;
  truth["p_true"] = config.sim_p;
  truth["q_true"] = config.sim_q;
  truth["x_distribution"] = config.sim_x_dist;

  if (config.sim_logit_n > 0) {
    CovariateSpec covariates;
    covariates.x = xdist;
    // separate stream so the two cohorts stay independent
    const std::uint64_t logit_seed = mix64(config.seed ^ 0x6c6f676974ULL);
    const auto rows = gen_logit_cohort(config.sim_logit_n, config.sim_logit_coefs,
                                       covariates, logit_seed);
    emit("regression_rows.csv", regression_rows_csv(rows));
    truth["logit"] = {
        {"n", config.sim_logit_n},
        {"coefficients", config.sim_logit_coefs},
        {"seed", logit_seed},
    };
  }

  emit("truth_manifest.json", truth.dump(2) + "\n");
  return written;
}

}  // namespace attpipe
