#include "attpipe/serial_ref.hpp"

#include <cmath>
#include <stdexcept>

namespace attpipe::serial {

namespace {

inline double term_probability(PureTypesParams params, const Observation& o) {
  return o.attitude > 0 ? o.x * params.p + (1.0 - o.x) * params.q
                        : o.x * (1.0 - params.p) + (1.0 - o.x) * (1.0 - params.q);
}

inline double log1pexp(double t) {
  return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

inline double logistic(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

}  // namespace

double neg_log_likelihood(PureTypesParams params, std::span<const Observation> obs) {
  double sum = 0.0;
  for (const auto& o : obs) {
    const double s = term_probability(params, o);
    if (!(s > 0.0)) throw std::domain_error("likelihood term not positive");
    sum -= std::log(s);
  }
  return sum;
}

std::pair<double, double> grad_neg_log_likelihood(PureTypesParams params,
                                                  std::span<const Observation> obs) {
  double dp = 0.0, dq = 0.0;
  for (const auto& o : obs) {
    const double s = term_probability(params, o);
    if (!(s > 0.0)) throw std::domain_error("likelihood term not positive");
    const double sign = o.attitude > 0 ? -1.0 : 1.0;
    dp += sign * o.x / s;
    dq += sign * (1.0 - o.x) / s;
  }
  return {dp, dq};
}

Curvature hessian_neg_log_likelihood(PureTypesParams params,
                                     std::span<const Observation> obs) {
  Curvature h;
  for (const auto& o : obs) {
    const double s = term_probability(params, o);
    if (!(s > 0.0)) throw std::domain_error("likelihood term not positive");
    const double inv2 = 1.0 / (s * s);
    h.dpp += o.x * o.x * inv2;
    h.dpq += o.x * (1.0 - o.x) * inv2;
    h.dqq += (1.0 - o.x) * (1.0 - o.x) * inv2;
  }
  return h;
}

ContourGrid contour_grid(std::span<const Observation> obs, int resolution,
                         double exponent, double delta) {
  if (resolution < 2) throw std::invalid_argument("grid resolution must be >= 2");
  if (!(exponent > 0.0)) throw std::invalid_argument("grid exponent must be positive");
  const double lo = delta;
  const double hi = 1.0 - delta;
  ContourGrid grid;
  grid.exponent = exponent;
  grid.p_lattice.resize(static_cast<std::size_t>(resolution));
  grid.q_lattice.resize(static_cast<std::size_t>(resolution));
  for (int k = 0; k < resolution; ++k) {
    const double v = lo + (hi - lo) * k / (resolution - 1);
    grid.p_lattice[static_cast<std::size_t>(k)] = v;
    grid.q_lattice[static_cast<std::size_t>(k)] = v;
  }
  grid.values.resize(static_cast<std::size_t>(resolution) *
                     static_cast<std::size_t>(resolution));
  std::size_t cell = 0;
  for (int qi = 0; qi < resolution; ++qi)
    for (int pi = 0; pi < resolution; ++pi, ++cell) {
      const PureTypesParams params{grid.p_lattice[static_cast<std::size_t>(pi)],
                                   grid.q_lattice[static_cast<std::size_t>(qi)]};
      grid.values[cell] = std::pow(serial::neg_log_likelihood(params, obs), exponent);
    }
  std::size_t argmin = 0;
  for (std::size_t i = 1; i < grid.values.size(); ++i)
    if (grid.values[i] < grid.values[argmin]) argmin = i;
  grid.argmin_q = static_cast<int>(argmin / static_cast<std::size_t>(resolution));
  grid.argmin_p = static_cast<int>(argmin % static_cast<std::size_t>(resolution));
  return grid;
}

IrlsTerms irls_terms(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     const Eigen::VectorXd& beta) {
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  IrlsTerms terms;
  terms.grad = Eigen::VectorXd::Zero(p);
  terms.xtwx = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double e = X.row(i).dot(beta);
    const double mu = logistic(e);
    const double w = mu * (1.0 - mu);
    terms.loglik += y[i] * e - log1pexp(e);
    const double r = y[i] - mu;
    for (Eigen::Index a = 0; a < p; ++a) {
      terms.grad[a] += X(i, a) * r;
      for (Eigen::Index b = a; b < p; ++b) terms.xtwx(a, b) += w * X(i, a) * X(i, b);
    }
    terms.weight_sum += w;
  }
  for (Eigen::Index a = 0; a < p; ++a)
    for (Eigen::Index b = 0; b < a; ++b) terms.xtwx(a, b) = terms.xtwx(b, a);
  return terms;
}

}  // namespace attpipe::serial
