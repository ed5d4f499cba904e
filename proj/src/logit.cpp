#include "attpipe/logit.hpp"

#include <cmath>
#include <istream>
#include <limits>

#include "attpipe/blocked.hpp"
#include "attpipe/csv.hpp"

namespace attpipe {

namespace {

inline double log1pexp(double t) {
  return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

inline double logistic(double t) {
  if (t >= 0.0) {
    const double e = std::exp(-t);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(t);
  return e / (1.0 + e);
}

void check_inputs(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                  const Eigen::VectorXd& beta) {
  if (X.rows() != y.size()) throw std::invalid_argument("X and y row counts differ");
  if (X.cols() != beta.size())
    throw std::invalid_argument("X and beta dimensions differ");
}

IrlsTerms irls_terms_impl(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                          const Eigen::VectorXd& beta, bool use_threads) {
  check_inputs(X, y, beta);
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  const Eigen::VectorXd eta = X * beta;

  // packed layout: [loglik, grad(p), upper XtWX (p(p+1)/2), weight_sum]
  const std::size_t np = static_cast<std::size_t>(p);
  const std::size_t width = 1 + np + np * (np + 1) / 2 + 1;
  const std::vector<double> acc = blocked_sum_vector(
      static_cast<std::ptrdiff_t>(n), width,
      [&](std::ptrdiff_t i, std::span<double> out) {
        const double e = eta[i];
        const double mu = logistic(e);
        const double w = mu * (1.0 - mu);
        out[0] += y[i] * e - log1pexp(e);
        const double r = y[i] - mu;
        std::size_t k = 1 + np;
        for (Eigen::Index a = 0; a < p; ++a) {
          const double xa = X(i, a);
          out[1 + static_cast<std::size_t>(a)] += xa * r;
          const double wxa = w * xa;
          for (Eigen::Index b = a; b < p; ++b) out[k++] += wxa * X(i, b);
        }
        out[width - 1] += w;
      },
      use_threads);

  IrlsTerms terms;
  terms.loglik = acc[0];
  terms.grad = Eigen::Map<const Eigen::VectorXd>(acc.data() + 1, p);
  terms.xtwx.resize(p, p);
  std::size_t k = 1 + np;
  for (Eigen::Index a = 0; a < p; ++a)
    for (Eigen::Index b = a; b < p; ++b) {
      terms.xtwx(a, b) = acc[k];
      terms.xtwx(b, a) = acc[k];
      ++k;
    }
  terms.weight_sum = acc[width - 1];
  return terms;
}

}  // namespace

IrlsTerms irls_terms(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     const Eigen::VectorXd& beta) {
  return irls_terms_impl(X, y, beta, true);
}

double logit_loglik(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& beta) {
  check_inputs(X, y, beta);
  const Eigen::VectorXd eta = X * beta;
  return blocked_sum(static_cast<std::ptrdiff_t>(X.rows()), [&](std::ptrdiff_t i) {
    return y[i] * eta[i] - log1pexp(eta[i]);
  });
}

Eigen::VectorXd logit_grad(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                           const Eigen::VectorXd& beta) {
  return irls_terms(X, y, beta).grad;
}

Eigen::MatrixXd logit_hessian(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                              const Eigen::VectorXd& beta) {
  return -irls_terms(X, y, beta).xtwx;
}

LogitFit fit_logit_design(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                          std::vector<std::string> names) {
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  if (static_cast<Eigen::Index>(names.size()) != p)
    throw std::invalid_argument("one name per design column required");
  if (n < p) throw std::invalid_argument("need at least as many rows as columns");
  if (y.size() != n) throw std::invalid_argument("X and y row counts differ");
  for (Eigen::Index i = 0; i < n; ++i)
    if (y[i] != 0.0 && y[i] != 1.0)
      throw std::invalid_argument("responses must be 0 or 1");

  {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(1e-10);
    const Eigen::Index rank = qr.rank();
    if (rank < p) {
      const auto perm = qr.colsPermutation().indices();
      std::vector<std::string> collinear;
      std::string joined;
      for (Eigen::Index k = rank; k < p; ++k) {
        const auto& name = names[static_cast<std::size_t>(perm[k])];
        if (!joined.empty()) joined += ", ";
        joined += name;
        collinear.push_back(name);
      }
      throw RankDeficiencyError("design matrix is rank deficient; dependent columns: " + joined,
                                std::move(collinear));
    }
  }

  LogitFit fit;
  fit.names = std::move(names);
  fit.n_used = static_cast<long>(n);

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  IrlsTerms terms = irls_terms(X, y, beta);
  double loglik = terms.loglik;

  constexpr int kMaxIterations = 100;
  constexpr double kRelTol = 1e-10;
  constexpr double kGradTol = 1e-8;
  int flat_steps = 0;
  for (int it = 1; it <= kMaxIterations; ++it) {
    fit.iterations = it;
    if (terms.weight_sum < static_cast<double>(n) * 1e-10)
      throw SeparationError(
          "complete separation: Bernoulli weights underflow, estimates diverge");

    const Eigen::VectorXd direction = terms.xtwx.ldlt().solve(terms.grad);
    if (!direction.allFinite())
      throw SeparationError("Newton step not finite, estimates diverge");

    // step-halving keeps the likelihood nondecreasing
    double t = 1.0;
    Eigen::VectorXd beta_new = beta + direction;
    IrlsTerms terms_new = irls_terms(X, y, beta_new);
    for (int halvings = 0;
         halvings < 50 && !(terms_new.loglik >= loglik - 1e-13 * (std::abs(loglik) + 1.0));
         ++halvings) {
      t *= 0.5;
      beta_new = beta + t * direction;
      terms_new = irls_terms(X, y, beta_new);
    }
    if (!std::isfinite(terms_new.loglik))
      throw SeparationError("log-likelihood not finite, estimates diverge");

    const double rel =
        std::abs(terms_new.loglik - loglik) / (std::abs(terms_new.loglik) + 0.1);
    beta = beta_new;
    loglik = terms_new.loglik;
    terms = terms_new;

    if (rel < kRelTol) {
      ++flat_steps;
      // keep polishing until the score equations are tight
      if (terms.grad.lpNorm<Eigen::Infinity>() < kGradTol || flat_steps >= 3) {
        fit.converged = true;
        break;
      }
    } else {
      flat_steps = 0;
    }
  }

  fit.coefficients = beta;
  fit.log_likelihood = loglik;

  const Eigen::MatrixXd cov =
      terms.xtwx.ldlt().solve(Eigen::MatrixXd::Identity(p, p));
  fit.standard_errors.resize(p);
  fit.z.resize(p);
  fit.p_values.resize(p);
  fit.codes.resize(static_cast<std::size_t>(p));
  for (Eigen::Index j = 0; j < p; ++j) {
    const double var = cov(j, j);
    if (!(var > 0.0))
      throw SeparationError("Fisher information not positive definite at the optimum");
    fit.standard_errors[j] = std::sqrt(var);
    fit.z[j] = fit.coefficients[j] / fit.standard_errors[j];
    fit.p_values[j] = normal_two_sided_p(fit.z[j]);
    fit.codes[static_cast<std::size_t>(j)] = significance_code(fit.p_values[j]);
  }
  return fit;
}

LogitFit fit_logit(std::span<const RegressionRow> rows) {
  if (rows.size() < 6)
    throw std::invalid_argument("fit_logit needs at least 6 complete rows");
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd X(n, 5);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const RegressionRow& r = rows[static_cast<std::size_t>(i)];
    X(i, 0) = 1.0;
    X(i, 1) = r.age;
    X(i, 2) = static_cast<double>(r.gender);
    X(i, 3) = r.friend_count;
    X(i, 4) = r.x;
    y[i] = static_cast<double>(r.response);
  }
  return fit_logit_design(X, y, logit_column_names());
}

double normal_two_sided_p(double z) {
  return std::erfc(std::abs(z) / std::sqrt(2.0));
}

std::string significance_code(double p) {
  if (p < 0.001) return "***";
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  if (p < 0.1) return ".";
  return "";
}

std::vector<WaldRow> wald_summary(const LogitFit& fit) {
  if (!fit.converged)
    throw std::invalid_argument("wald_summary requires a converged fit");
  std::vector<WaldRow> rows;
  rows.reserve(fit.names.size());
  for (std::size_t j = 0; j < fit.names.size(); ++j) {
    const auto idx = static_cast<Eigen::Index>(j);
    rows.push_back({fit.names[j], fit.coefficients[idx], fit.standard_errors[idx],
                    fit.z[idx], fit.p_values[idx], fit.codes[j]});
  }
  return rows;
}

std::string wald_table_text(const LogitFit& fit) {
  const auto rows = wald_summary(fit);
  std::size_t name_width = std::string("Coefficient").size();
  for (const auto& row : rows) name_width = std::max(name_width, row.name.size());

  auto pad = [](std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
  };
  auto lead = [](std::string s, std::size_t width) {
    if (s.size() < width) s.insert(0, width - s.size(), ' ');
    return s;
  };

  std::string out = pad("Coefficient", name_width) + "  " + lead("Estimate", 10) +
                    "  " + lead("Std. error", 10) + "  " + lead("z value", 8) + "  " +
                    "Pr(>|z|)\n";
  for (const auto& row : rows) {
    out += pad(row.name, name_width);
    out += "  " + lead(format_fixed(row.estimate, 3), 10);
    out += "  " + lead(format_fixed(row.std_error, 3), 10);
    out += "  " + lead(format_fixed(row.z, 3), 8);
    out += "  " + format_fixed(row.p, 3);
    if (!row.code.empty()) out += " " + row.code;
    out += '\n';
  }
  out += "---\n";
  out += "Signif. codes:  0 '***' 0.001 '**' 0.01 '*' 0.05 '.' 0.1 ' ' 1\n";
  out += "n = " + std::to_string(fit.n_used) +
         ", log-likelihood = " + format_fixed(fit.log_likelihood, 3) + "\n";
  return out;
}

std::string wald_table_csv(const LogitFit& fit) {
  const auto rows = wald_summary(fit);
  std::string out = "term,estimate,std_error,z,p_value,code\n";
  for (const auto& row : rows) {
    out += row.name;
    out += ',' + format_full(row.estimate);
    out += ',' + format_full(row.std_error);
    out += ',' + format_full(row.z);
    out += ',' + format_full(row.p);
    out += ',' + row.code + '\n';
  }
  return out;
}

std::vector<RegressionRow> read_regression_rows_csv(std::istream& in) {
  CsvTable csv = read_csv(in, "regression rows");
  const int response = csv.column("response");
  const int age = csv.column("age");
  const int gender = csv.column("gender");
  const int friends = csv.column("friends");
  const int x = csv.column("x");
  if (response < 0 || age < 0 || gender < 0 || friends < 0 || x < 0)
    throw std::runtime_error(
        "regression file requires header columns response,age,gender,friends,x");
  std::vector<RegressionRow> rows;
  rows.reserve(csv.rows.size());
  for (const auto& fields : csv.rows) {
    RegressionRow r;
    r.response = static_cast<int>(
        parse_long_field(fields[static_cast<std::size_t>(response)], "response"));
    if (r.response != 0 && r.response != 1)
      throw std::runtime_error("response must be 0 or 1");
    r.age = parse_double_field(fields[static_cast<std::size_t>(age)], "age");
    r.gender = static_cast<int>(
        parse_long_field(fields[static_cast<std::size_t>(gender)], "gender"));
    r.friend_count =
        parse_double_field(fields[static_cast<std::size_t>(friends)], "friends");
    r.x = parse_double_field(fields[static_cast<std::size_t>(x)], "x");
    rows.push_back(r);
  }
  return rows;
}

std::string regression_rows_csv(std::span<const RegressionRow> rows) {
  std::string out = "response,age,gender,friends,x\n";
  for (const auto& r : rows) {
    out += std::to_string(r.response);
    out += ',' + format_full(r.age);
    out += ',' + std::to_string(r.gender);
    out += ',' + format_full(r.friend_count);
    out += ',' + format_full(r.x);
    out += '\n';
  }
  return out;
}

}  // namespace attpipe
