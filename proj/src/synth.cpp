#include "attpipe/synth.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace attpipe {

double Splitmix64::normal() {
  // Box-Muller; two fresh uniforms per draw keeps the stream layout fixed
  const double u1 = uniform_pos();
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double Splitmix64::gamma(double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("gamma shape must be positive");
  if (alpha < 1.0) {
    // Marsaglia-Tsang boost for shape < 1
    const double u = uniform_pos();
    return gamma(alpha + 1.0) * std::pow(u, 1.0 / alpha);
  }
  const double d = alpha - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform_pos();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double Splitmix64::beta(double alpha, double beta) {
  while (true) {
    const double g1 = gamma(alpha);
    const double g2 = gamma(beta);
    const double s = g1 + g2;
    if (s > 0.0) return g1 / s;
  }
}

long Splitmix64::uniform_int(long lo, long hi) {
  if (lo > hi) throw std::invalid_argument("empty integer range");
  const auto count = static_cast<double>(hi - lo + 1);
  const long offset = static_cast<long>(uniform01() * count);
  return lo + std::min(offset, hi - lo);
}

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t record_seed(std::uint64_t seed, std::uint64_t index) {
  return mix64(seed + 0x9e3779b97f4a7c15ULL * (index + 1));
}

XDistribution XDistribution::default_mixture() { return XDistribution{}; }

XDistribution XDistribution::uniform() {
  XDistribution d;
  d.kind = Kind::uniform;
  return d;
}

XDistribution XDistribution::beta_only(double alpha, double beta) {
  XDistribution d;
  d.kind = Kind::beta;
  d.alpha = alpha;
  d.beta = beta;
  return d;
}

XDistribution XDistribution::three_point(const std::array<double, 3>& atoms,
                                         const std::array<double, 3>& weights) {
  XDistribution d;
  d.kind = Kind::three_point;
  d.atoms = atoms;
  d.weights = weights;
  return d;
}

void XDistribution::validate() const {
  switch (kind) {
    case Kind::uniform:
      return;
    case Kind::beta:
      if (!(alpha > 0.0) || !(beta > 0.0))
        throw std::invalid_argument("beta parameters must be positive");
      return;
    case Kind::three_point: {
      double sum = 0.0;
      for (double w : weights) {
        if (w < 0.0) throw std::invalid_argument("mixture weights must be nonnegative");
        sum += w;
      }
      if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("mixture weights must sum to 1");
      for (double a : atoms)
        if (!(a >= 0.0 && a <= 1.0))
          throw std::invalid_argument("mixture atoms must lie in [0,1]");
      return;
    }
    case Kind::beta_with_atoms:
      if (!(alpha > 0.0) || !(beta > 0.0))
        throw std::invalid_argument("beta parameters must be positive");
      if (weight_at_zero < 0.0 || weight_at_one < 0.0 ||
          weight_at_zero + weight_at_one > 1.0)
        throw std::invalid_argument("atom weights must be nonnegative, sum <= 1");
      return;
  }
  throw std::invalid_argument("unknown distribution kind");
}

double XDistribution::sample(Splitmix64& rng) const {
  switch (kind) {
    case Kind::uniform:
      return rng.uniform01();
    case Kind::beta:
      return rng.beta(alpha, beta);
    case Kind::three_point: {
      const double u = rng.uniform01();
      if (u < weights[0]) return atoms[0];
      if (u < weights[0] + weights[1]) return atoms[1];
      return atoms[2];
    }
    case Kind::beta_with_atoms: {
      const double u = rng.uniform01();
      if (u < weight_at_zero) return 0.0;
      if (u < weight_at_zero + weight_at_one) return 1.0;
      return rng.beta(alpha, beta);
    }
  }
  throw std::invalid_argument("unknown distribution kind");
}

void CohortSpec::validate() const {
  if (n < 1) throw std::invalid_argument("cohort size must be >= 1");
  if (!(p_true > 0.0 && p_true < 1.0) || !(q_true > 0.0 && q_true < 1.0))
    throw std::invalid_argument("true parameters must lie in (0,1)");
  x_distribution.validate();
}

std::vector<Observation> gen_cohort(const CohortSpec& spec) {
  spec.validate();
  std::vector<Observation> obs(static_cast<std::size_t>(spec.n));
#pragma omp parallel for schedule(static)
  for (long i = 0; i < spec.n; ++i) {
    Splitmix64 rng(record_seed(spec.seed, static_cast<std::uint64_t>(i)));
    const double x = spec.x_distribution.sample(rng);
    const double approve = x * spec.p_true + (1.0 - x) * spec.q_true;
    obs[static_cast<std::size_t>(i)] = {x, rng.uniform01() < approve ? +1 : -1};
  }
  return obs;
}

void CovariateSpec::validate() const {
  if (!(age_min <= age_max)) throw std::invalid_argument("age range empty");
  if (!(male_share >= 0.0 && male_share <= 1.0))
    throw std::invalid_argument("male_share outside [0,1]");
  if (friends_min < 0 || friends_min > friends_max)
    throw std::invalid_argument("friends range invalid");
  x.validate();
}

std::vector<RegressionRow> gen_logit_cohort(long n,
                                            const std::array<double, 5>& coefficients,
                                            const CovariateSpec& covariates,
                                            std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("cohort size must be >= 1");
  covariates.validate();
  std::vector<RegressionRow> rows(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    Splitmix64 rng(record_seed(seed, static_cast<std::uint64_t>(i)));
    RegressionRow r;
    r.age = static_cast<double>(rng.uniform_int(static_cast<long>(covariates.age_min),
                                                static_cast<long>(covariates.age_max)));
    r.gender = rng.uniform01() < covariates.male_share ? 1 : 0;
    r.friend_count = static_cast<double>(
        rng.uniform_int(covariates.friends_min, covariates.friends_max));
    r.x = covariates.x.sample(rng);
    const double eta = coefficients[0] + coefficients[1] * r.age +
                       coefficients[2] * r.gender + coefficients[3] * r.friend_count +
                       coefficients[4] * r.x;
    const double mu = eta >= 0.0 ? 1.0 / (1.0 + std::exp(-eta))
                                 : std::exp(eta) / (1.0 + std::exp(eta));
    r.response = rng.uniform01() < mu ? 1 : 0;
    rows[static_cast<std::size_t>(i)] = r;
  }
  return rows;
}

}  // namespace attpipe
