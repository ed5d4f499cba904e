#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "attpipe/ideology.hpp"
#include "attpipe/synth.hpp"

using namespace attpipe;

namespace {

SourceBiasTable table_of(std::initializer_list<std::pair<const char*, double>> entries) {
  SourceBiasTable table;
  for (const auto& [id, bias] : entries) table.bias[id] = bias;
  return table;
}

std::vector<std::string> subs(std::initializer_list<const char*> ids) {
  return {ids.begin(), ids.end()};
}

}  // namespace

TEST_CASE("estimate_x averages known biases") {
  const auto table = table_of({{"a", 1.0}, {"b", 1.0}, {"c", 0.2}, {"d", 0.4}});

  auto all_one = estimate_x(subs({"a", "b"}), table);
  REQUIRE(all_one.has_value());
  CHECK(all_one->x == 1.0);
  CHECK(all_one->support == 2);

  auto mixed = estimate_x(subs({"c", "d"}), table);
  REQUIRE(mixed.has_value());
  CHECK(mixed->x == doctest::Approx(0.3).epsilon(1e-15));

  CHECK_FALSE(estimate_x(subs({"nope", "missing"}), table).has_value());
  CHECK_FALSE(estimate_x({}, table).has_value());
}

TEST_CASE("estimate_x ignores duplicates and unknown sources") {
  const auto table = table_of({{"a", 0.8}, {"b", 0.2}});
  auto with_dupes = estimate_x(subs({"a", "a", "b", "zzz", "a"}), table);
  REQUIRE(with_dupes.has_value());
  CHECK(with_dupes->x == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(with_dupes->support == 2);
}

TEST_CASE("estimate_x is exactly permutation invariant") {
  SourceBiasTable table;
  Splitmix64 rng(11);
  std::vector<std::string> ids;
  for (int i = 0; i < 17; ++i) {
    const std::string id = "s" + std::to_string(i);
    table.bias[id] = rng.uniform01();
    ids.push_back(id);
  }
  const auto baseline = estimate_x(ids, table);
  REQUIRE(baseline.has_value());
  std::mt19937 shuffler(3);
  for (int trial = 0; trial < 20; ++trial) {
    std::shuffle(ids.begin(), ids.end(), shuffler);
    const auto shuffled = estimate_x(ids, table);
    REQUIRE(shuffled.has_value());
    CHECK(shuffled->x == baseline->x);  // bitwise equal
    CHECK(shuffled->support == baseline->support);
  }
}

TEST_CASE("complementing every bias reflects the score") {
  Splitmix64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    SourceBiasTable table, mirrored;
    std::vector<std::string> ids;
    const int n = 1 + static_cast<int>(rng.uniform_int(0, 9));
    for (int i = 0; i < n; ++i) {
      const std::string id = "s" + std::to_string(i);
      const double b = rng.uniform01();
      table.bias[id] = b;
      mirrored.bias[id] = 1.0 - b;
      ids.push_back(id);
    }
    const auto x = estimate_x(ids, table);
    const auto reflected = estimate_x(ids, mirrored);
    REQUIRE(x.has_value());
    REQUIRE(reflected.has_value());
    CHECK(reflected->x == doctest::Approx(1.0 - x->x).epsilon(1e-12));

    const bool boundary = std::abs(x->x - 0.33) < 1e-9 || std::abs(x->x - 0.66) < 1e-9 ||
                          std::abs(x->x - 0.34) < 1e-9 || std::abs(x->x - 0.67) < 1e-9;
    if (!boundary) {
      const auto g = classify_group(x->x);
      const auto h = classify_group(reflected->x);
      if (g == PoliticalGroup::conservative) CHECK(h == PoliticalGroup::oppositionist);
      if (g == PoliticalGroup::oppositionist) CHECK(h == PoliticalGroup::conservative);
      if (g == PoliticalGroup::moderate) CHECK(h == PoliticalGroup::moderate);
    }
  }
}

TEST_CASE("classify_group splits the unit interval") {
  CHECK(classify_group(0.2) == PoliticalGroup::conservative);
  CHECK(classify_group(0.5) == PoliticalGroup::moderate);
  CHECK(classify_group(0.9) == PoliticalGroup::oppositionist);
  // boundaries are moderate
  CHECK(classify_group(0.33) == PoliticalGroup::moderate);
  CHECK(classify_group(0.66) == PoliticalGroup::moderate);
  CHECK(classify_group(0.0) == PoliticalGroup::conservative);
  CHECK(classify_group(1.0) == PoliticalGroup::oppositionist);

  CHECK_THROWS_AS(classify_group(-0.01), std::domain_error);
  CHECK_THROWS_AS(classify_group(1.01), std::domain_error);
  CHECK_THROWS_AS(classify_group(0.5, 0.7, 0.3), std::domain_error);

  // every x lands in exactly one group
  for (int i = 0; i <= 1000; ++i) {
    const double x = i / 1000.0;
    int memberships = 0;
    const auto g = classify_group(x);
    memberships += g == PoliticalGroup::conservative;
    memberships += g == PoliticalGroup::moderate;
    memberships += g == PoliticalGroup::oppositionist;
    CHECK(memberships == 1);
  }
}

TEST_CASE("bias table CSV requires header and valid range") {
  {
    std::istringstream in("source_id,bias\nmeduza_like,0.97\nrt_like,0.05\n");
    const auto table = SourceBiasTable::from_csv(in);
    CHECK(table.bias.size() == 2);
    CHECK(table.bias.at("meduza_like") == 0.97);
  }
  {
    std::istringstream in("id,value\na,0.5\n");
    CHECK_THROWS(SourceBiasTable::from_csv(in));
  }
  {
    std::istringstream in("source_id,bias\na,1.5\n");
    CHECK_THROWS(SourceBiasTable::from_csv(in));
  }
  {
    std::istringstream in("source_id,bias\n");
    CHECK_THROWS(SourceBiasTable::from_csv(in));
  }
}
