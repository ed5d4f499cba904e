#include "attpipe/fusion.hpp"

#include <stdexcept>

#include "attpipe/csv.hpp"

namespace attpipe {

std::string overall_label(Overall a) {
  switch (a) {
    case Overall::negative: return "-1";
    case Overall::neutral: return "0";
    case Overall::positive: return "1";
    case Overall::undefined: return "undefined";
  }
  return "?";
}

Overall fuse(std::optional<int> comment_attitude, std::optional<int> like_attitude) {
  if (!comment_attitude && !like_attitude)
    throw std::invalid_argument("fuse: both signals absent");
  if (!comment_attitude) return static_cast<Overall>(*like_attitude);
  if (*comment_attitude != 0) {
    if (like_attitude && *like_attitude != *comment_attitude) return Overall::undefined;
    return static_cast<Overall>(*comment_attitude);
  }
  // neutral comment signal: the like signal decides when present
  return like_attitude ? static_cast<Overall>(*like_attitude) : Overall::neutral;
}

const std::array<CohortRowSpec, 11>& CohortTable::layout() {
  static const std::array<CohortRowSpec, 11> rows = {{
      {-1, std::nullopt, Overall::negative},
      {-1, -1, Overall::negative},
      {-1, +1, Overall::undefined},
      {0, std::nullopt, Overall::neutral},
      {0, -1, Overall::negative},
      {0, +1, Overall::positive},
      {+1, std::nullopt, Overall::positive},
      {+1, -1, Overall::undefined},
      {+1, +1, Overall::positive},
      {std::nullopt, -1, Overall::negative},
      {std::nullopt, +1, Overall::positive},
  }};
  return rows;
}

namespace {

int row_index(std::optional<int> comment, std::optional<int> like) {
  if (comment) {
    const int base = (*comment + 1) * 3;  // -1 -> 0, 0 -> 3, +1 -> 6
    if (!like) return base;
    return base + (*like < 0 ? 1 : 2);
  }
  if (!like) throw std::invalid_argument("tabulate: triple with both signals absent");
  return *like < 0 ? 9 : 10;
}

}  // namespace

long long CohortTable::undefined_count() const {
  long long n = 0;
  const auto& spec = layout();
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (spec[i].overall == Overall::undefined) n += rows[i];
  return n;
}

long long CohortTable::comment_present() const {
  long long n = 0;
  const auto& spec = layout();
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (spec[i].comment) n += rows[i];
  return n;
}

long long CohortTable::like_present() const {
  long long n = 0;
  const auto& spec = layout();
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (spec[i].like) n += rows[i];
  return n;
}

long long CohortTable::dual_signal() const {
  long long n = 0;
  const auto& spec = layout();
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (spec[i].comment && spec[i].like) n += rows[i];
  return n;
}

CohortTable tabulate(std::span<const AttitudeTriple> cohort) {
  CohortTable table;
  for (const auto& triple : cohort) {
    ++table.rows[static_cast<std::size_t>(row_index(triple.comment, triple.like))];
    ++table.total;
  }
  return table;
}

std::string cohort_table_csv(const CohortTable& table) {
  std::string out = "comment_attitude,like_attitude,overall_attitude,count\n";
  const auto& spec = CohortTable::layout();
  for (std::size_t i = 0; i < spec.size(); ++i) {
    out += spec[i].comment ? std::to_string(*spec[i].comment) : std::string("none");
    out += ',';
    out += spec[i].like ? std::to_string(*spec[i].like) : std::string("none");
    out += ',';
    out += overall_label(spec[i].overall);
    out += ',';
    out += std::to_string(table.rows[i]);
    out += '\n';
  }
  return out;
}

std::vector<UserRecord> apply_filters(std::span<const UserRecord> users,
                                      const FilterOptions& options) {
  if (options.min_subscriptions < 0)
    throw std::invalid_argument("min_subscriptions must be nonnegative");
  std::vector<UserRecord> kept;
  for (const auto& user : users) {
    if (user.overall == Overall::undefined) continue;
    if (options.require_defined && user.overall == Overall::neutral) continue;
    if (static_cast<long>(user.subscriptions.size()) <= options.min_subscriptions)
      continue;
    if (options.max_age && user.age && *user.age > *options.max_age) continue;
    kept.push_back(user);
  }
  return kept;
}

}  // namespace attpipe
