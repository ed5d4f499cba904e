#pragma once

#include <Eigen/Dense>
#include <array>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace attpipe {

/// Complete-case regression input; rows with missing covariates are dropped
/// (and counted) before this point.
struct RegressionRow {
  int response = 0;          // 0/1, from overall attitude -1 -> 0, +1 -> 1
  double age = 0.0;          // years
  int gender = 0;            // 0 female, 1 male
  double friend_count = 0.0;
  double x = 0.0;            // ideology score in [0,1]
};

inline const std::vector<std::string>& logit_column_names() {
  static const std::vector<std::string> names = {"(Intercept)", "age", "gender",
                                                 "friends", "x"};
  return names;
}

struct LogitFit {
  std::vector<std::string> names;
  Eigen::VectorXd coefficients;
  Eigen::VectorXd standard_errors;
  Eigen::VectorXd z;
  Eigen::VectorXd p_values;
  std::vector<std::string> codes;
  bool converged = false;
  long n_used = 0;
  int iterations = 0;
  double log_likelihood = 0.0;
};

class RankDeficiencyError : public std::runtime_error {
 public:
  RankDeficiencyError(const std::string& message, std::vector<std::string> columns)
      : std::runtime_error(message), columns_(std::move(columns)) {}
  const std::vector<std::string>& columns() const { return columns_; }

 private:
  std::vector<std::string> columns_;
};

class SeparationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bernoulli log-likelihood with logistic link and its derivatives.
double logit_loglik(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& beta);
Eigen::VectorXd logit_grad(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                           const Eigen::VectorXd& beta);
/// d^2 ll / d beta d beta' = -X' W X with W = diag(mu (1 - mu)).
Eigen::MatrixXd logit_hessian(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                              const Eigen::VectorXd& beta);

/// One fused pass over the rows: log-likelihood, score and X' W X, plus the
/// total Bernoulli weight (used to detect separation).
struct IrlsTerms {
  double loglik = 0.0;
  Eigen::VectorXd grad;
  Eigen::MatrixXd xtwx;
  double weight_sum = 0.0;
};

IrlsTerms irls_terms(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     const Eigen::VectorXd& beta);

/// Newton / IRLS maximum-likelihood fit for an arbitrary design matrix.
/// Throws RankDeficiencyError naming the collinear columns, SeparationError
/// when the Bernoulli weights underflow.
LogitFit fit_logit_design(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                          std::vector<std::string> names);

/// The five-column model: intercept, age, gender, friends, x. Requires at
/// least 6 rows.
LogitFit fit_logit(std::span<const RegressionRow> rows);

struct WaldRow {
  std::string name;
  double estimate = 0.0;
  double std_error = 0.0;
  double z = 0.0;
  double p = 0.0;
  std::string code;
};

/// Two-sided Wald rows; requires a converged fit.
std::vector<WaldRow> wald_summary(const LogitFit& fit);

/// 2*(1 - Phi(|z|)) via the complementary error function.
double normal_two_sided_p(double z);

/// "***" below 0.001, "**" below 0.01, "*" below 0.05, "." below 0.1, else "".
std::string significance_code(double p);

/// Regression summary in the usual layout, 3 decimals.
std::string wald_table_text(const LogitFit& fit);
std::string wald_table_csv(const LogitFit& fit);

// Regression row file schema: CSV columns (response, age, gender, friends, x).
std::vector<RegressionRow> read_regression_rows_csv(std::istream& in);
std::string regression_rows_csv(std::span<const RegressionRow> rows);

}  // namespace attpipe
