#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "attpipe/csv.hpp"
#include "attpipe/events.hpp"
#include "attpipe/fusion.hpp"
#include "attpipe/ideology.hpp"
#include "attpipe/logit.hpp"
#include "attpipe/pipeline.hpp"
#include "attpipe/puretypes.hpp"

namespace fs = std::filesystem;
using namespace attpipe;

namespace {

struct CliState {
  PipelineConfig config;
  std::string events;
  std::string profiles;
  std::string bias_table;
  std::string out_dir;
  std::string post_lexicon;
  std::string comment_lexicon;
  int max_age = 90;
  bool no_max_age = false;

  // single-step subcommands
  std::string signals_in;
  std::string observations_in;
  std::string rows_in;
  std::string out_file;
  std::string grid_out;

  void finalize() {
    config.events_path = events;
    config.profiles_path = profiles;
    config.bias_table_path = bias_table;
    config.out_dir = out_dir;
    if (!post_lexicon.empty()) config.post_lexicon_file = fs::path(post_lexicon);
    if (!comment_lexicon.empty()) config.comment_lexicon_file = fs::path(comment_lexicon);
    config.max_age = no_max_age ? std::nullopt : std::optional<int>(max_age);
  }
};

void add_filter_options(CLI::App* cmd, CliState& state) {
  cmd->add_option("--min-subscriptions", state.config.min_subscriptions,
                  "keep users with strictly more subscriptions than this");
  cmd->add_option("--max-age", state.max_age, "drop stated ages above this");
  cmd->add_flag("--no-max-age", state.no_max_age, "disable the age cut entirely");
  cmd->add_flag("--age-filter-puretypes", state.config.apply_age_to_puretypes,
                "apply the age cut to the pure-types sample too");
  cmd->add_option("--min-support", state.config.min_support,
                  "known-bias sources required to trust an ideology score");
}

void add_puretypes_options(CLI::App* cmd, CliState& state) {
  cmd->add_option("--delta", state.config.delta, "box margin for the fit");
  cmd->add_option("--grid-resolution", state.config.grid_resolution,
                  "contour lattice points per axis");
  cmd->add_option("--grid-exponent", state.config.grid_exponent,
                  "exponent applied to the negative log-likelihood surface");
}

int dispatch(CLI::App& app, CliState& state) {
  state.finalize();

  if (auto* cmd = app.get_subcommand("ingest"); cmd->parsed()) {
    LineLogSummary summary;
    const auto events = load_events(state.config.events_path, summary);
    SignalStats stats;
    const TopicLexicon post_lexicon =
        load_lexicon(state.config.post_lexicon_file, TopicLexicon::covid());
    const TopicLexicon comment_lexicon =
        load_lexicon(state.config.comment_lexicon_file, TopicLexicon::masks());
    const auto signals = derive_signals(events, post_lexicon, comment_lexicon, &stats);
    write_text_file(state.out_file, signals_csv(signals));
    std::cout << "events parsed: " << summary.parsed
              << ", malformed: " << summary.malformed
              << ", topic posts: " << stats.topic_posts
              << ", topic comments: " << stats.topic_comments << "\n"
              << "commenters: " << stats.commenters << ", likers: " << stats.likers
              << ", both: " << stats.both_signals << "\n";
    for (const auto& issue : summary.issues)
      std::cerr << "line " << issue.line << ": " << issue.message << "\n";
    return 0;
  }

  if (auto* cmd = app.get_subcommand("fuse"); cmd->parsed()) {
    std::ifstream in(state.signals_in);
    if (!in) throw MissingInputError("cannot open signals file: " + state.signals_in);
    const auto signals = read_signals_csv(in);
    std::vector<AttitudeTriple> triples;
    std::string fused = "user_id,comment_attitude,like_attitude,overall\n";
    for (const auto& s : signals) {
      const Overall overall = fuse(s.comment_attitude, s.like_attitude);
      triples.push_back({s.comment_attitude, s.like_attitude, overall});
      fused += s.user_id + ',' +
               (s.comment_attitude ? std::to_string(*s.comment_attitude) : "none") +
               ',' + (s.like_attitude ? std::to_string(*s.like_attitude) : "none") +
               ',' + overall_label(overall) + '\n';
    }
    if (!state.out_file.empty()) write_text_file(state.out_file, fused);
    const CohortTable table = tabulate(triples);
    if (!state.grid_out.empty()) write_text_file(state.grid_out, cohort_table_csv(table));
    std::cout << cohort_table_csv(table)
              << "total," << table.total << "\n";
    return 0;
  }

  if (auto* cmd = app.get_subcommand("ideology"); cmd->parsed()) {
    LineLogSummary summary;
    const auto profiles = load_profiles(state.config.profiles_path, summary);
    const auto bias = load_bias_table(state.config.bias_table_path);
    std::string out = "user_id,x,support\n";
    long absent = 0;
    for (const auto& profile : profiles) {
      const auto score = estimate_x(profile.subscriptions, bias);
      if (score && score->support >= state.config.min_support)
        out += profile.user_id + ',' + format_full(score->x) + ',' +
               std::to_string(score->support) + '\n';
      else
        ++absent;
    }
    write_text_file(state.out_file, out);
    std::cout << "profiles parsed: " << summary.parsed
              << ", malformed: " << summary.malformed << ", scored: "
              << (static_cast<long>(summary.parsed) - absent) << ", without score: "
              << absent << "\n";
    return 0;
  }

  if (auto* cmd = app.get_subcommand("fit-puretypes"); cmd->parsed()) {
    std::ifstream in(state.observations_in);
    if (!in)
      throw MissingInputError("cannot open observations file: " + state.observations_in);
    const auto obs = read_observations_csv(in);
    FitOptions options;
    options.delta = state.config.delta;
    const FitResult result = fit(obs, options);
    std::cout << "p = " << format_fixed(result.params.p, 3)
              << ", q = " << format_fixed(result.params.q, 3)
              << ", -lnL = " << format_fixed(result.nll, 3)
              << ", identifiable = " << (result.identifiable ? "yes" : "no")
              << ", iterations = " << result.iterations << "\n";
    if (!state.out_file.empty()) {
      std::string csv = "p,q,nll,identifiable,iterations,converged\n";
      csv += format_full(result.params.p) + ',' + format_full(result.params.q) + ',' +
             format_full(result.nll) + ',' + (result.identifiable ? "true" : "false") +
             ',' + std::to_string(result.iterations) + ',' +
             (result.converged ? "true" : "false") + '\n';
      write_text_file(state.out_file, csv);
    }
    if (!state.grid_out.empty()) {
      const auto grid = contour_grid(obs, state.config.grid_resolution,
                                     state.config.grid_exponent, state.config.delta);
      write_text_file(state.grid_out, contour_grid_csv(grid));
    }
    return 0;
  }

  if (auto* cmd = app.get_subcommand("fit-logit"); cmd->parsed()) {
    std::ifstream in(state.rows_in);
    if (!in) throw MissingInputError("cannot open regression file: " + state.rows_in);
    const auto rows = read_regression_rows_csv(in);
    const LogitFit fit_result = fit_logit(rows);
    std::cout << wald_table_text(fit_result);
    if (!state.out_file.empty()) write_text_file(state.out_file, wald_table_csv(fit_result));
    return 0;
  }

  if (auto* cmd = app.get_subcommand("simulate"); cmd->parsed()) {
    const auto written = run_simulate(state.config);
    for (const auto& path : written) std::cout << path.string() << "\n";
    return 0;
  }

  if (auto* cmd = app.get_subcommand("report"); cmd->parsed()) {
    const ReportBundle bundle = run_report(state.config);
    std::cout << "cohort total: " << bundle.table.total
              << ", undefined: " << bundle.undefined_overall << "\n";
    for (const auto& stage : bundle.stages)
      std::cout << "  " << stage.name << ": " << stage.count << "\n";
    std::cout << "pure types: p = " << format_fixed(bundle.puretypes.params.p, 3)
              << ", q = " << format_fixed(bundle.puretypes.params.q, 3)
              << (bundle.puretypes.identifiable ? "" : " (not identifiable)") << "\n";
    std::cout << wald_table_text(bundle.logit);
    std::cout << "artifacts in " << state.config.out_dir.string() << "\n";
    return 0;
  }

  std::cerr << "error: usage: no subcommand given (try --help)\n";
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"attitude analysis pipeline: signal fusion, ideology scaling, "
               "pure-types estimation, logistic regression"};
  app.require_subcommand(0, 1);
  app.set_config("--config", "", "key=value configuration file");

  CliState state;

  auto* ingest = app.add_subcommand("ingest", "derive per-user attitude signals");
  ingest->add_option("--events", state.events, "event log (JSON lines)")->required();
  ingest->add_option("--out", state.out_file, "signals CSV to write")->required();
  ingest->add_option("--post-lexicon", state.post_lexicon, "stem file for posts");
  ingest->add_option("--comment-lexicon", state.comment_lexicon, "stem file for comments");

  auto* fuse_cmd = app.add_subcommand("fuse", "fuse signals and tabulate the cohort");
  fuse_cmd->add_option("--signals", state.signals_in, "signals CSV")->required();
  fuse_cmd->add_option("--out", state.out_file, "fused attitudes CSV");
  fuse_cmd->add_option("--out-table", state.grid_out, "cohort table CSV");

  auto* ideology_cmd = app.add_subcommand("ideology", "estimate ideology scores");
  ideology_cmd->add_option("--profiles", state.profiles, "profiles (JSON lines)")->required();
  ideology_cmd->add_option("--bias-table", state.bias_table, "source bias CSV")->required();
  ideology_cmd->add_option("--out", state.out_file, "scores CSV to write")->required();
  ideology_cmd->add_option("--min-support", state.config.min_support,
                           "known-bias sources required per user");

  auto* fitp = app.add_subcommand("fit-puretypes", "fit the pure-types model");
  fitp->add_option("--observations", state.observations_in, "observations CSV")->required();
  fitp->add_option("--out", state.out_file, "fit result CSV");
  fitp->add_option("--grid", state.grid_out, "contour grid CSV to write");
  add_puretypes_options(fitp, state);

  auto* fitl = app.add_subcommand("fit-logit", "fit the logistic regression");
  fitl->add_option("--rows", state.rows_in, "regression rows CSV")->required();
  fitl->add_option("--out", state.out_file, "summary CSV to write");

  auto* simulate = app.add_subcommand("simulate", "generate synthetic cohorts");
  simulate->add_option("--out", state.out_dir, "output directory")->required();
  simulate->add_option("--n", state.config.sim_n, "observations to generate");
  simulate->add_option("--p", state.config.sim_p, "true oppositionist approval probability");
  simulate->add_option("--q", state.config.sim_q, "true conservative approval probability");
  simulate->add_option("--seed", state.config.seed, "generator seed");
  simulate->add_option("--x-dist", state.config.sim_x_dist,
                       "default | uniform | beta:a,b | threepoint:a0,a1,a2,w0,w1,w2");
  simulate->add_option("--logit-n", state.config.sim_logit_n,
                       "regression rows to generate (0 = none)");
  simulate->add_option("--logit-coefs", state.config.sim_logit_coefs,
                       "true coefficients: intercept age gender friends x");

  auto* report = app.add_subcommand("report", "run the full pipeline");
  report->add_option("--events", state.events, "event log (JSON lines)")->required();
  report->add_option("--profiles", state.profiles, "profiles (JSON lines)")->required();
  report->add_option("--bias-table", state.bias_table, "source bias CSV")->required();
  report->add_option("--out", state.out_dir, "output directory")->required();
  report->add_option("--post-lexicon", state.post_lexicon, "stem file for posts");
  report->add_option("--comment-lexicon", state.comment_lexicon, "stem file for comments");
  report->add_option("--cutoff-low", state.config.cutoff_low, "conservative/moderate cutoff");
  report->add_option("--cutoff-high", state.config.cutoff_high, "moderate/oppositionist cutoff");
  report->add_option("--age-bin", state.config.age_bin_width, "age histogram bin width");
  report->add_option("--x-bin", state.config.x_bin_width, "ideology histogram bin width");
  add_filter_options(report, state);
  add_puretypes_options(report, state);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    return dispatch(app, state);
  } catch (const MissingInputError& e) {
    std::cerr << "error: input-missing: " << e.what() << "\n";
  } catch (const EmptySampleError& e) {
    std::cerr << "error: empty-sample: " << e.what() << "\n";
  } catch (const RankDeficiencyError& e) {
    std::cerr << "error: rank-deficient: " << e.what() << "\n";
  } catch (const SeparationError& e) {
    std::cerr << "error: separation: " << e.what() << "\n";
  } catch (const FitError& e) {
    std::cerr << "error: no-convergence: " << e.what() << "\n";
  } catch (const std::domain_error& e) {
    std::cerr << "error: domain: " << e.what() << "\n";
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: invalid: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: io: " << e.what() << "\n";
  }
  return 1;
}
