// Shared test fixtures: an engineered event log realizing the reference
// cohort-table marginals, and synthetic end-to-end pipeline inputs generated
// under the pure-types mechanism.
#pragma once

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "attpipe/csv.hpp"
#include "attpipe/synth.hpp"

namespace fixtures {

inline constexpr const char* kTimestamp = "2020-05-15T12:00:00Z";

struct CohortRow {
  std::optional<int> comment;
  std::optional<int> like;
  long count;
};

// Row order and counts of the reference cohort table.
inline const std::array<CohortRow, 11>& cohort_rows() {
  static const std::array<CohortRow, 11> rows = {{
      {-1, std::nullopt, 106},
      {-1, -1, 10},
      {-1, +1, 7},
      {0, std::nullopt, 1098},
      {0, -1, 15},
      {0, +1, 41},
      {+1, std::nullopt, 242},
      {+1, -1, 3},
      {+1, +1, 37},
      {std::nullopt, -1, 178},
      {std::nullopt, +1, 556},
  }};
  return rows;
}

// One topic post, one mask comment per comment-signal user, and likes on two
// anchor comments. The anchors are the first users of the (-1, none) and
// (+1, none) rows, so every derived signal lands exactly on its target row.
inline std::string cohort_event_log() {
  using nlohmann::json;
  std::string out;
  auto emit = [&](const json& j) {
    out += j.dump();
    out += '\n';
  };

  emit({{"event_id", "post1"},
        {"kind", "post"},
        {"actor_id", "page_news"},
        {"text", "Коронавирус: новые ограничения в городе"},
        {"timestamp", kTimestamp}});

  const std::string anchor_negative = "c_r0_u0";
  const std::string anchor_positive = "c_r6_u0";

  const auto& rows = cohort_rows();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (long k = 0; k < rows[r].count; ++k) {
      const std::string user = "u" + std::to_string(r) + "_" + std::to_string(k);
      if (rows[r].comment) {
        json comment = {{"event_id", "c_r" + std::to_string(r) + "_u" + std::to_string(k)},
                        {"kind", "comment"},
                        {"actor_id", user},
                        {"parent_id", "post1"},
                        {"text", "Про маски: моё мнение"},
                        {"timestamp", kTimestamp}};
        // half of the neutral commenters omit the label entirely
        if (*rows[r].comment != 0 || k % 2 == 0) comment["label"] = *rows[r].comment;
        emit(comment);
      }
      if (rows[r].like) {
        emit({{"event_id", "l_r" + std::to_string(r) + "_u" + std::to_string(k)},
              {"kind", "like"},
              {"actor_id", user},
              {"parent_id", *rows[r].like < 0 ? anchor_negative : anchor_positive},
              {"timestamp", kTimestamp}});
      }
    }
  }
  return out;
}

struct SyntheticInputs {
  std::string events_jsonl;
  std::string profiles_jsonl;
  std::string bias_csv;
  long users = 0;
};

// End-to-end pipeline inputs with attitudes drawn from the pure-types
// mechanism on the ideology score the pipeline itself will compute. Includes
// missing ages/genders, a few anomalously high ages, contradictory users and
// malformed log lines.
inline SyntheticInputs make_synthetic_inputs(long n_users, std::uint64_t seed,
                                             double p_true, double q_true,
                                             int anomalous_ages = 6,
                                             bool malformed_lines = true) {
  using nlohmann::json;
  using attpipe::Splitmix64;

  SyntheticInputs inputs;
  inputs.users = n_users;

  constexpr int kSources = 21;
  for (int s = 0; s < kSources; ++s) {
    char name[16];
    std::snprintf(name, sizeof(name), "src%02d", s);
    if (s == 0) inputs.bias_csv = "source_id,bias\n";
    inputs.bias_csv += std::string(name) + "," +
                       attpipe::format_full(static_cast<double>(s) / (kSources - 1)) +
                       "\n";
  }

  auto emit_event = [&](const json& j) {
    inputs.events_jsonl += j.dump();
    inputs.events_jsonl += '\n';
  };
  auto emit_profile = [&](const json& j) {
    inputs.profiles_jsonl += j.dump();
    inputs.profiles_jsonl += '\n';
  };

  emit_event({{"event_id", "post1"},
              {"kind", "post"},
              {"actor_id", "page_news"},
              {"text", "Пандемия: что изменится"},
              {"timestamp", kTimestamp}});
  emit_event({{"event_id", "post_offtopic"},
              {"kind", "post"},
              {"actor_id", "page_news"},
              {"text", "Погода на выходных"},
              {"timestamp", kTimestamp}});

  // Anchor authors carry the liked comments; with no subscriptions they never
  // reach the analysis sample.
  emit_event({{"event_id", "anchor_neg"},
              {"kind", "comment"},
              {"actor_id", "anchor_author_neg"},
              {"parent_id", "post1"},
              {"text", "маски не нужны"},
              {"label", -1},
              {"timestamp", kTimestamp}});
  emit_event({{"event_id", "anchor_pos"},
              {"kind", "comment"},
              {"actor_id", "anchor_author_pos"},
              {"parent_id", "post1"},
              {"text", "маски обязательны"},
              {"label", 1},
              {"timestamp", kTimestamp}});
  emit_profile({{"user_id", "anchor_author_neg"}, {"friend_count", 0}});
  emit_profile({{"user_id", "anchor_author_pos"}, {"friend_count", 0}});

  for (long i = 0; i < n_users; ++i) {
    Splitmix64 rng(attpipe::record_seed(seed, static_cast<std::uint64_t>(i)));
    const std::string user = "user" + std::to_string(i);

    const double centre = rng.beta(2.0, 2.0);
    const long want = 11 + rng.uniform_int(0, 14);
    std::set<int> chosen;
    for (int draws = 0; static_cast<long>(chosen.size()) < want && draws < 120; ++draws) {
      const double biased = centre + 0.2 * rng.normal();
      const int idx = std::clamp(static_cast<int>(std::lround(biased * (kSources - 1))),
                                 0, kSources - 1);
      chosen.insert(idx);
    }
    double bias_sum = 0.0;
    json subs = json::array();
    for (int idx : chosen) {  // ordered set == sorted source ids
      char name[16];
      std::snprintf(name, sizeof(name), "src%02d", idx);
      subs.push_back(name);
      bias_sum += static_cast<double>(idx) / (kSources - 1);
    }
    const double x = bias_sum / static_cast<double>(chosen.size());

    const int attitude = rng.uniform01() < x * p_true + (1.0 - x) * q_true ? 1 : -1;

    const double role = rng.uniform01();
    const bool comments = role < 0.45 || role >= 0.90;
    const bool likes = role >= 0.45;
    const bool contradicts = role >= 0.98;  // comment and like disagree
    if (comments) {
      emit_event({{"event_id", "c_" + user},
                  {"kind", "comment"},
                  {"actor_id", user},
                  {"parent_id", "post1"},
                  {"text", "про масочный режим"},
                  {"label", attitude},
                  {"timestamp", kTimestamp}});
    }
    if (likes) {
      const int like_sign = contradicts ? -attitude : attitude;
      emit_event({{"event_id", "lk_" + user},
                  {"kind", "like"},
                  {"actor_id", user},
                  {"parent_id", like_sign < 0 ? "anchor_neg" : "anchor_pos"},
                  {"timestamp", kTimestamp}});
    }

    json profile = {{"user_id", user},
                    {"friend_count", rng.uniform_int(0, 300)},
                    {"subscriptions", subs}};
    if (i < anomalous_ages)
      profile["age"] = 95;
    else if (rng.uniform01() < 0.6)
      profile["age"] = rng.uniform_int(18, 88);
    if (rng.uniform01() < 0.9) profile["gender"] = rng.uniform01() < 0.5 ? 1 : 0;
    emit_profile(profile);
  }

  if (malformed_lines) {
    inputs.events_jsonl += "{not valid json at all\n";
    inputs.events_jsonl +=
        R"({"event_id":"badlike","kind":"like","actor_id":"user0","text":"likes have no text","parent_id":"anchor_pos","timestamp":"2020-05-15T12:00:00Z"})"
        "\n";
    inputs.profiles_jsonl += R"({"user_id":"broken","age":-4})" "\n";
  }
  return inputs;
}

}  // namespace fixtures
