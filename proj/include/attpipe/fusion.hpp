#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "attpipe/ideology.hpp"

namespace attpipe {

/// Overall attitude fused from the comment and like signals. `undefined`
/// marks users whose two signals point in opposite directions.
enum class Overall : int { negative = -1, neutral = 0, positive = 1, undefined = 2 };

std::string overall_label(Overall a);

/// The comment signal decides unless it is 0 or absent, in which case the
/// like signal decides; opposite nonzero signals give `undefined`. Both
/// signals absent violates the precondition.
Overall fuse(std::optional<int> comment_attitude, std::optional<int> like_attitude);

struct AttitudeTriple {
  std::optional<int> comment;  // -1/0/+1
  std::optional<int> like;     // -1/+1
  Overall overall = Overall::neutral;
};

struct CohortRowSpec {
  std::optional<int> comment;
  std::optional<int> like;
  Overall overall;
};

/// Counts over the 11 reachable (comment, like) signal combinations.
struct CohortTable {
  std::array<long long, 11> rows{};
  long long total = 0;

  static const std::array<CohortRowSpec, 11>& layout();

  long long undefined_count() const;
  long long comment_present() const;
  long long like_present() const;
  long long dual_signal() const;
};

CohortTable tabulate(std::span<const AttitudeTriple> cohort);

/// CSV with columns (comment_attitude, like_attitude, overall_attitude, count)
/// in fixed row order; absent signals render as "none".
std::string cohort_table_csv(const CohortTable& table);

/// One user after signal fusion, joined with profile data and the ideology
/// estimate where available.
struct UserRecord {
  std::string user_id;
  std::optional<int> age;
  std::optional<int> gender;
  long friend_count = 0;
  std::vector<std::string> subscriptions;
  std::optional<int> comment_attitude;
  std::optional<int> like_attitude;
  Overall overall = Overall::neutral;
  std::optional<IdeologyScore> ideology;
};

struct FilterOptions {
  int min_subscriptions = 10;        // keep strictly more than this many
  std::optional<int> max_age;        // keep when age absent or <= max_age
  bool require_defined = true;       // keep only overall in {-1,+1}
};

/// Order-preserving sample filter. Users with an undefined overall attitude
/// are always removed.
std::vector<UserRecord> apply_filters(std::span<const UserRecord> users,
                                      const FilterOptions& options);

}  // namespace attpipe
