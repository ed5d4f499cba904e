#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "attpipe/fusion.hpp"
#include "attpipe/synth.hpp"
#include "fixtures.hpp"

using namespace attpipe;

TEST_CASE("fuse reproduces every reachable signal combination") {
  CHECK(fuse(-1, std::nullopt) == Overall::negative);
  CHECK(fuse(-1, -1) == Overall::negative);
  CHECK(fuse(-1, +1) == Overall::undefined);
  CHECK(fuse(0, std::nullopt) == Overall::neutral);
  CHECK(fuse(0, -1) == Overall::negative);
  CHECK(fuse(0, +1) == Overall::positive);
  CHECK(fuse(+1, std::nullopt) == Overall::positive);
  CHECK(fuse(+1, -1) == Overall::undefined);
  CHECK(fuse(+1, +1) == Overall::positive);
  CHECK(fuse(std::nullopt, -1) == Overall::negative);
  CHECK(fuse(std::nullopt, +1) == Overall::positive);

  CHECK_THROWS_AS(fuse(std::nullopt, std::nullopt), std::invalid_argument);
}

TEST_CASE("fuse is antisymmetric under signal negation") {
  auto negate_overall = [](Overall a) {
    if (a == Overall::negative) return Overall::positive;
    if (a == Overall::positive) return Overall::negative;
    return a;  // neutral and undefined are fixed points
  };
  for (const auto& row : CohortTable::layout()) {
    const auto comment = row.comment;
    const auto like = row.like;
    std::optional<int> neg_comment = comment ? std::optional<int>(-*comment) : std::nullopt;
    std::optional<int> neg_like = like ? std::optional<int>(-*like) : std::nullopt;
    CHECK(fuse(neg_comment, neg_like) == negate_overall(fuse(comment, like)));
  }
}

TEST_CASE("layout overall values agree with fuse") {
  for (const auto& row : CohortTable::layout())
    CHECK(fuse(row.comment, row.like) == row.overall);
}

namespace {

std::vector<AttitudeTriple> engineered_cohort() {
  std::vector<AttitudeTriple> cohort;
  for (const auto& row : fixtures::cohort_rows())
    for (long k = 0; k < row.count; ++k)
      cohort.push_back({row.comment, row.like, fuse(row.comment, row.like)});
  return cohort;
}

}  // namespace

TEST_CASE("tabulate reproduces the reference marginals") {
  const auto cohort = engineered_cohort();
  const CohortTable table = tabulate(cohort);

  const std::array<long long, 11> expected = {106, 10, 7, 1098, 15, 41, 242, 3, 37, 178, 556};
  for (std::size_t i = 0; i < expected.size(); ++i) CHECK(table.rows[i] == expected[i]);
  CHECK(table.total == 2293);
  CHECK(table.comment_present() == 1559);
  CHECK(table.like_present() == 847);
  CHECK(table.dual_signal() == 113);
  CHECK(table.undefined_count() == 10);
}

TEST_CASE("tabulate is order independent") {
  auto cohort = engineered_cohort();
  const CohortTable before = tabulate(cohort);
  std::mt19937 shuffler(7);
  std::shuffle(cohort.begin(), cohort.end(), shuffler);
  const CohortTable after = tabulate(cohort);
  CHECK(before.rows == after.rows);
  CHECK(before.total == after.total);
}

TEST_CASE("tabulate of an empty cohort is all zeros") {
  const CohortTable table = tabulate(std::vector<AttitudeTriple>{});
  for (long long row : table.rows) CHECK(row == 0);
  CHECK(table.total == 0);
}

TEST_CASE("cohort table serializes in fixed row order") {
  const CohortTable table = tabulate(engineered_cohort());
  const std::string csv = cohort_table_csv(table);
  CHECK(csv ==
        "comment_attitude,like_attitude,overall_attitude,count\n"
        "-1,none,-1,106\n"
        "-1,-1,-1,10\n"
        "-1,1,undefined,7\n"
        "0,none,0,1098\n"
        "0,-1,-1,15\n"
        "0,1,1,41\n"
        "1,none,1,242\n"
        "1,-1,undefined,3\n"
        "1,1,1,37\n"
        "none,-1,-1,178\n"
        "none,1,1,556\n");
}

namespace {

UserRecord user(Overall overall, int subscriptions, std::optional<int> age) {
  UserRecord r;
  r.user_id = "u";
  r.overall = overall;
  r.subscriptions.assign(static_cast<std::size_t>(subscriptions), "src");
  for (std::size_t i = 0; i < r.subscriptions.size(); ++i)
    r.subscriptions[i] += std::to_string(i);
  r.age = age;
  return r;
}

}  // namespace

TEST_CASE("apply_filters enforces attitude, subscriptions and age rules") {
  std::vector<UserRecord> users = {
      user(Overall::positive, 11, 30),    // kept
      user(Overall::neutral, 11, 30),     // neutral removed when required
      user(Overall::positive, 10, 30),    // exactly the threshold: removed
      user(Overall::positive, 11, 95),    // above max age
      user(Overall::positive, 11, std::nullopt),  // missing age survives
      user(Overall::undefined, 11, 30),   // contradictory users always removed
      user(Overall::negative, 12, 90),    // boundary age survives
  };

  FilterOptions options;
  options.min_subscriptions = 10;
  options.max_age = 90;
  options.require_defined = true;
  const auto kept = apply_filters(users, options);
  REQUIRE(kept.size() == 3);
  CHECK(kept[0].subscriptions.size() == 11);
  CHECK_FALSE(kept[1].age.has_value());
  CHECK(kept[2].overall == Overall::negative);

  // order preserved
  CHECK(kept[0].age == 30);
  CHECK(kept[2].age == 90);

  SUBCASE("no age cut when unset") {
    options.max_age = std::nullopt;
    CHECK(apply_filters(users, options).size() == 4);
  }
  SUBCASE("neutral kept when not requiring a defined attitude") {
    options.require_defined = false;
    const auto relaxed = apply_filters(users, options);
    CHECK(relaxed.size() == 4);
    // undefined stays out even then
    for (const auto& r : relaxed) CHECK(r.overall != Overall::undefined);
  }
  SUBCASE("negative threshold rejected") {
    options.min_subscriptions = -1;
    CHECK_THROWS_AS(apply_filters(users, options), std::invalid_argument);
  }
}
