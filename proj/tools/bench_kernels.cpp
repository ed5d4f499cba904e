// Times the OpenMP kernels against the naive serial references on synthetic
// cohorts. Thread count follows OMP_NUM_THREADS.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <omp.h>

#include "attpipe/logit.hpp"
#include "attpipe/puretypes.hpp"
#include "attpipe/serial_ref.hpp"
#include "attpipe/synth.hpp"

using namespace attpipe;
using clock_type = std::chrono::steady_clock;

namespace {

template <class Fn>
double best_ms(Fn&& fn, int repeats) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = clock_type::now();
    fn();
    const auto t1 = clock_type::now();
    best = std::min(best,
                    std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

void row(const char* kernel, long n, double serial_ms, double parallel_ms,
         double rel_diff) {
  std::printf("%-22s %10ld %12.2f %12.2f %9.2fx %11.1e\n", kernel, n, serial_ms,
              parallel_ms, serial_ms / parallel_ms, rel_diff);
}

double rel(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1.0});
}

}  // namespace

int main(int argc, char** argv) {
  long n = 2'000'000;
  if (argc > 1) n = std::strtol(argv[1], nullptr, 10);

  std::printf("threads: %d\n", omp_get_max_threads());
  std::printf("%-22s %10s %12s %12s %10s %12s\n", "kernel", "n", "serial ms",
              "parallel ms", "speedup", "max rel diff");

  CohortSpec spec;
  spec.n = n;
  spec.p_true = 0.95;
  spec.q_true = 0.45;
  spec.seed = 7;
  const auto obs = gen_cohort(spec);
  const PureTypesParams params{0.8, 0.3};

  {
    double serial_value = 0.0, parallel_value = 0.0;
    const double s = best_ms([&] { serial_value = serial::neg_log_likelihood(params, obs); }, 3);
    const double p = best_ms([&] { parallel_value = neg_log_likelihood(params, obs); }, 3);
    row("neg_log_likelihood", n, s, p, rel(serial_value, parallel_value));
  }
  {
    std::pair<double, double> gs, gp;
    const double s = best_ms([&] { gs = serial::grad_neg_log_likelihood(params, obs); }, 3);
    const double p = best_ms([&] { gp = grad_neg_log_likelihood(params, obs); }, 3);
    row("grad_nll", n, s, p,
        std::max(rel(gs.first, gp.first), rel(gs.second, gp.second)));
  }
  {
    const long grid_n = std::min<long>(n, 20'000);
    const std::vector<Observation> small(obs.begin(), obs.begin() + grid_n);
    ContourGrid gs, gp;
    const double s = best_ms([&] { gs = serial::contour_grid(small, 48); }, 1);
    const double p = best_ms([&] { gp = contour_grid(small, 48); }, 1);
    double diff = 0.0;
    for (std::size_t i = 0; i < gs.values.size(); ++i)
      diff = std::max(diff, rel(gs.values[i], gp.values[i]));
    row("contour_grid 48x48", grid_n, s, p, diff);
  }
  {
    const long rows_n = std::min<long>(n, 1'000'000);
    const auto rows =
        gen_logit_cohort(rows_n, {0.309, -0.022, -0.751, 0.011, 3.431}, {}, 11);
    Eigen::MatrixXd X(rows_n, 5);
    Eigen::VectorXd y(rows_n);
    for (long i = 0; i < rows_n; ++i) {
      const auto& r = rows[static_cast<std::size_t>(i)];
      X(i, 0) = 1.0;
      X(i, 1) = r.age;
      X(i, 2) = r.gender;
      X(i, 3) = r.friend_count;
      X(i, 4) = r.x;
      y(i) = r.response;
    }
    const Eigen::VectorXd beta = Eigen::VectorXd::Zero(5);
    IrlsTerms ts, tp;
    const double s = best_ms([&] { ts = serial::irls_terms(X, y, beta); }, 3);
    const double p = best_ms([&] { tp = irls_terms(X, y, beta); }, 3);
    double diff = rel(ts.loglik, tp.loglik);
    for (Eigen::Index j = 0; j < 5; ++j) diff = std::max(diff, rel(ts.grad[j], tp.grad[j]));
    row("logit irls_terms", rows_n, s, p, diff);
  }
  return 0;
}
