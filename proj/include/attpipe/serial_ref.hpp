#pragma once

#include "attpipe/logit.hpp"
#include "attpipe/puretypes.hpp"

namespace attpipe::serial {

// Naive single-pass reference implementations of the hot kernels, kept for
// testing the parallel versions and for the benchmark target.

double neg_log_likelihood(PureTypesParams params, std::span<const Observation> obs);
std::pair<double, double> grad_neg_log_likelihood(PureTypesParams params,
                                                  std::span<const Observation> obs);
Curvature hessian_neg_log_likelihood(PureTypesParams params,
                                     std::span<const Observation> obs);
ContourGrid contour_grid(std::span<const Observation> obs, int resolution,
                         double exponent = 1.0 / 256.0, double delta = 1e-5);

IrlsTerms irls_terms(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     const Eigen::VectorXd& beta);

}  // namespace attpipe::serial
