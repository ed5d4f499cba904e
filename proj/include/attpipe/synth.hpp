#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "attpipe/logit.hpp"
#include "attpipe/puretypes.hpp"

namespace attpipe {

/// splitmix64: published reference sequence, frozen across releases.
class Splitmix64 {
 public:
  explicit Splitmix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// 53-bit uniform in [0,1).
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  /// uniform in (0,1].
  double uniform_pos() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

  double normal();
  double gamma(double alpha);            // shape alpha, unit scale
  double beta(double alpha, double beta);
  /// integer uniform on [lo, hi] inclusive
  long uniform_int(long lo, long hi);

 private:
  std::uint64_t state_;
};

/// splitmix64 finalizer, used to derive independent per-record streams.
std::uint64_t mix64(std::uint64_t z);
std::uint64_t record_seed(std::uint64_t seed, std::uint64_t index);

/// Ideology-score distribution, supported natively on [0,1].
struct XDistribution {
  enum class Kind { uniform, beta, three_point, beta_with_atoms };

  Kind kind = Kind::beta_with_atoms;
  double alpha = 2.0;
  double beta = 2.0;
  double weight_at_zero = 0.1;  // beta_with_atoms only
  double weight_at_one = 0.1;
  std::array<double, 3> atoms{0.0, 0.5, 1.0};      // three_point only
  std::array<double, 3> weights{1.0 / 3, 1.0 / 3, 1.0 / 3};

  /// 0.1 atom(0) + 0.8 Beta(2,2) + 0.1 atom(1): a moderate bulk with small
  /// peaks at the two extremes.
  static XDistribution default_mixture();
  static XDistribution uniform();
  static XDistribution beta_only(double alpha, double beta);
  static XDistribution three_point(const std::array<double, 3>& atoms,
                                   const std::array<double, 3>& weights);

  void validate() const;
  double sample(Splitmix64& rng) const;
};

struct CohortSpec {
  long n = 0;
  double p_true = 0.5;
  double q_true = 0.5;
  XDistribution x_distribution;
  std::uint64_t seed = 0;

  void validate() const;
};

/// n observations; x ~ x_distribution, then attitude = +1 with probability
/// x*p_true + (1-x)*q_true. Fully determined by the spec: record i uses its
/// own stream seeded from (seed, i), so any thread count produces the same
/// cohort.
std::vector<Observation> gen_cohort(const CohortSpec& spec);

struct CovariateSpec {
  double age_min = 18;
  double age_max = 80;       // integer ages drawn uniformly on [age_min, age_max]
  double male_share = 0.5;
  long friends_min = 0;
  long friends_max = 200;
  XDistribution x = XDistribution::default_mixture();

  void validate() const;
};

/// Rows with response ~ Bernoulli(logistic(c0 + c1*age + c2*gender +
/// c3*friends + c4*x)); seed-deterministic like gen_cohort.
std::vector<RegressionRow> gen_logit_cohort(long n,
                                            const std::array<double, 5>& coefficients,
                                            const CovariateSpec& covariates,
                                            std::uint64_t seed);

}  // namespace attpipe
