#include "attpipe/puretypes.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>

#include "attpipe/blocked.hpp"
#include "attpipe/csv.hpp"

namespace attpipe {

namespace {

void check_params(PureTypesParams params) {
  if (!(params.p > 0.0 && params.p < 1.0 && params.q > 0.0 && params.q < 1.0))
    throw std::domain_error("pure-types parameters must lie strictly inside (0,1)");
}

// likelihood term for one observation; positive everywhere inside the box
inline double term_probability(PureTypesParams params, const Observation& o) {
  return o.attitude > 0 ? o.x * params.p + (1.0 - o.x) * params.q
                        : o.x * (1.0 - params.p) + (1.0 - o.x) * (1.0 - params.q);
}

double nll_impl(PureTypesParams params, std::span<const Observation> obs,
                bool use_threads) {
  const double value = blocked_sum(
      static_cast<std::ptrdiff_t>(obs.size()),
      [&](std::ptrdiff_t i) { return -std::log(term_probability(params, obs[i])); },
      use_threads);
  if (!std::isfinite(value))
    throw std::domain_error("pure-types likelihood term not positive");
  return value;
}

std::pair<double, double> grad_impl(PureTypesParams params,
                                    std::span<const Observation> obs,
                                    bool use_threads) {
  const auto sums = blocked_sum_array<2>(
      static_cast<std::ptrdiff_t>(obs.size()),
      [&](std::ptrdiff_t i, std::array<double, 2>& acc) {
        const Observation& o = obs[i];
        const double s = term_probability(params, o);
        const double sign = o.attitude > 0 ? -1.0 : 1.0;
        acc[0] += sign * o.x / s;
        acc[1] += sign * (1.0 - o.x) / s;
      },
      use_threads);
  if (!std::isfinite(sums[0]) || !std::isfinite(sums[1]))
    throw std::domain_error("pure-types likelihood term not positive");
  return {sums[0], sums[1]};
}

Curvature hessian_impl(PureTypesParams params, std::span<const Observation> obs,
                       bool use_threads) {
  const auto sums = blocked_sum_array<3>(
      static_cast<std::ptrdiff_t>(obs.size()),
      [&](std::ptrdiff_t i, std::array<double, 3>& acc) {
        const Observation& o = obs[i];
        const double s = term_probability(params, o);
        const double inv2 = 1.0 / (s * s);
        acc[0] += o.x * o.x * inv2;
        acc[1] += o.x * (1.0 - o.x) * inv2;
        acc[2] += (1.0 - o.x) * (1.0 - o.x) * inv2;
      },
      use_threads);
  if (!std::isfinite(sums[0]) || !std::isfinite(sums[2]))
    throw std::domain_error("pure-types likelihood term not positive");
  return {sums[0], sums[1], sums[2]};
}

}  // namespace

double neg_log_likelihood(PureTypesParams params, std::span<const Observation> obs) {
  if (obs.empty()) throw std::invalid_argument("neg_log_likelihood: no observations");
  check_params(params);
  return nll_impl(params, obs, true);
}

std::pair<double, double> grad_neg_log_likelihood(PureTypesParams params,
                                                  std::span<const Observation> obs) {
  if (obs.empty()) throw std::invalid_argument("grad_neg_log_likelihood: no observations");
  check_params(params);
  return grad_impl(params, obs, true);
}

Curvature hessian_neg_log_likelihood(PureTypesParams params,
                                     std::span<const Observation> obs) {
  if (obs.empty())
    throw std::invalid_argument("hessian_neg_log_likelihood: no observations");
  check_params(params);
  return hessian_impl(params, obs, true);
}

void validate_observations(std::span<const Observation> obs) {
  if (obs.empty()) throw std::invalid_argument("no observations");
  for (const auto& o : obs) {
    if (!(o.x >= 0.0 && o.x <= 1.0))
      throw std::invalid_argument("observation x outside [0,1]");
    if (o.attitude != -1 && o.attitude != 1)
      throw std::invalid_argument("observation attitude must be -1 or +1");
  }
}

std::vector<PureTypesParams> default_starts(double delta) {
  const double lo = delta;
  const double hi = 1.0 - delta;
  std::vector<PureTypesParams> starts;
  starts.reserve(21);
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      const bool corner = (i == 0 || i == 4) && (j == 0 || j == 4);
      if (corner) continue;  // the corner starts are known to stall
      starts.push_back({lo + (hi - lo) * i / 4.0, lo + (hi - lo) * j / 4.0});
    }
  }
  return starts;
}

namespace {

struct LocalRun {
  PureTypesParams point{};
  double nll = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
};

// Projected Newton on the closed box. The objective is convex (each term is
// -log of an affine function), so the Newton direction is a descent direction
// whenever the reduced Hessian is nonsingular.
LocalRun minimize_one(PureTypesParams start, std::span<const Observation> obs,
                      const FitOptions& opt) {
  const double lo = opt.delta;
  const double hi = 1.0 - opt.delta;
  auto box = [&](double v) { return std::clamp(v, lo, hi); };

  double p = box(start.p);
  double q = box(start.q);
  double f = nll_impl({p, q}, obs, true);

  LocalRun run;
  for (int it = 0; it < opt.max_iterations; ++it) {
    run.iterations = it + 1;
    const auto [gp, gq] = grad_impl({p, q}, obs, true);

    const double proj_gp = p - box(p - gp);
    const double proj_gq = q - box(q - gq);
    if (std::max(std::abs(proj_gp), std::abs(proj_gq)) < opt.grad_tol) {
      run.converged = true;
      break;
    }

    const bool p_pinned = (p <= lo && gp > 0.0) || (p >= hi && gp < 0.0);
    const bool q_pinned = (q <= lo && gq > 0.0) || (q >= hi && gq < 0.0);

    const Curvature h = hessian_impl({p, q}, obs, true);
    double dp = 0.0, dq = 0.0;
    if (!p_pinned && !q_pinned) {
      const double det = h.dpp * h.dqq - h.dpq * h.dpq;
      if (det > 0.0 && h.dpp > 0.0) {
        dp = -(h.dqq * gp - h.dpq * gq) / det;
        dq = -(h.dpp * gq - h.dpq * gp) / det;
      } else {
        dp = -gp;
        dq = -gq;
      }
    } else if (!p_pinned) {
      dp = h.dpp > 0.0 ? -gp / h.dpp : -gp;
    } else if (!q_pinned) {
      dq = h.dqq > 0.0 ? -gq / h.dqq : -gq;
    }
    if (dp * gp + dq * gq >= 0.0) {  // fall back to steepest descent
      dp = p_pinned ? 0.0 : -gp;
      dq = q_pinned ? 0.0 : -gq;
    }

    // Armijo backtracking along the projected path
    double np = p, nq = q, nf = f;
    bool stepped = false;
    double t = 1.0;
    for (int halvings = 0; halvings < 60; ++halvings, t *= 0.5) {
      const double cp = box(p + t * dp);
      const double cq = box(q + t * dq);
      if (cp == p && cq == q) break;  // projection removed the whole step
      const double cf = nll_impl({cp, cq}, obs, true);
      const double along = gp * (cp - p) + gq * (cq - q);
      if (cf <= f + 1e-4 * std::min(along, 0.0)) {
        np = cp;
        nq = cq;
        nf = cf;
        stepped = true;
        break;
      }
    }
    if (!stepped) {  // no representable decrease left
      run.converged = true;
      break;
    }
    const double step = std::max(std::abs(np - p), std::abs(nq - q));
    p = np;
    q = nq;
    f = nf;
    if (step < opt.step_tol) {
      run.converged = true;
      break;
    }
  }
  run.point = {p, q};
  run.nll = f;
  return run;
}

bool lex_better(const LocalRun& a, const LocalRun& b) {
  if (a.nll != b.nll) return a.nll < b.nll;
  if (a.point.p != b.point.p) return a.point.p < b.point.p;
  return a.point.q < b.point.q;
}

}  // namespace

FitResult fit(std::span<const Observation> obs, const FitOptions& opt) {
  validate_observations(obs);
  if (!(opt.delta > 0.0 && opt.delta < 0.5))
    throw std::invalid_argument("delta must lie in (0, 0.5)");

  std::vector<PureTypesParams> starts =
      opt.starts.empty() ? default_starts(opt.delta) : opt.starts;

  std::vector<LocalRun> runs(starts.size());
  int total_iterations = 0;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    runs[i] = minimize_one(starts[i], obs, opt);
    total_iterations += runs[i].iterations;
  }

  // Deterministic reduction: minimum NLL with (p, q) lexicographic tie-break.
  int best = -1;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (!runs[i].converged) continue;
    if (best < 0 || lex_better(runs[i], runs[static_cast<std::size_t>(best)]))
      best = static_cast<int>(i);
  }
  if (best < 0) {
    int fallback = 0;
    for (std::size_t i = 1; i < runs.size(); ++i)
      if (lex_better(runs[i], runs[static_cast<std::size_t>(fallback)]))
        fallback = static_cast<int>(i);
    const LocalRun& r = runs[static_cast<std::size_t>(fallback)];
    FitResult partial{r.point, r.nll, false, total_iterations, false};
    throw FitError("pure-types fit did not converge within the iteration cap", partial);
  }

  // On flat ridges every start converges with an equal NLL; report the run
  // seeded nearest the box centre.
  std::size_t centroid = 0;
  double centroid_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < starts.size(); ++i) {
    const double d = std::max(std::abs(starts[i].p - 0.5), std::abs(starts[i].q - 0.5));
    if (d < centroid_dist) {
      centroid_dist = d;
      centroid = i;
    }
  }
  std::size_t winner = static_cast<std::size_t>(best);
  const double tie_tol =
      1e-9 * std::max(1.0, std::abs(runs[static_cast<std::size_t>(best)].nll));
  if (runs[centroid].converged &&
      runs[centroid].nll <= runs[static_cast<std::size_t>(best)].nll + tie_tol)
    winner = centroid;

  FitResult result;
  result.params = runs[winner].point;
  result.nll = neg_log_likelihood(result.params, obs);
  result.iterations = total_iterations;
  result.converged = true;

  bool all_same_x = true;
  for (const auto& o : obs)
    if (o.x != obs[0].x) {
      all_same_x = false;
      break;
    }
  const Curvature h = hessian_impl(result.params, obs, true);
  const double det = h.dpp * h.dqq - h.dpq * h.dpq;
  result.identifiable = !all_same_x && h.dpp * h.dqq > 0.0 &&
                        det > 1e-10 * (h.dpp * h.dqq);
  return result;
}

ContourGrid contour_grid(std::span<const Observation> obs, int resolution,
                         double exponent, double delta) {
  validate_observations(obs);
  if (resolution < 2) throw std::invalid_argument("grid resolution must be >= 2");
  if (!(exponent > 0.0)) throw std::invalid_argument("grid exponent must be positive");
  if (!(delta > 0.0 && delta < 0.5))
    throw std::invalid_argument("delta must lie in (0, 0.5)");

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

  const std::ptrdiff_t cells =
      static_cast<std::ptrdiff_t>(resolution) * resolution;
  grid.values.resize(static_cast<std::size_t>(cells));
  // Cells are independent; each one runs the same blocked accumulation
  // serially, so the stored value is bitwise what neg_log_likelihood returns.
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t cell = 0; cell < cells; ++cell) {
    const int qi = static_cast<int>(cell / resolution);
    const int pi = static_cast<int>(cell % resolution);
    const PureTypesParams params{grid.p_lattice[static_cast<std::size_t>(pi)],
                                 grid.q_lattice[static_cast<std::size_t>(qi)]};
    grid.values[static_cast<std::size_t>(cell)] =
        std::pow(nll_impl(params, obs, false), exponent);
  }

  std::size_t argmin = 0;
  for (std::size_t i = 1; i < grid.values.size(); ++i)
    if (grid.values[i] < grid.values[argmin]) argmin = i;
  grid.argmin_q = static_cast<int>(argmin / static_cast<std::size_t>(resolution));
  grid.argmin_p = static_cast<int>(argmin % static_cast<std::size_t>(resolution));
  return grid;
}

std::string contour_grid_csv(const ContourGrid& grid) {
  std::string out;
  for (double p : grid.p_lattice) {
    out += ',';
    out += format_sig(p, 9);
  }
  out += '\n';
  for (std::size_t qi = 0; qi < grid.q_lattice.size(); ++qi) {
    out += format_sig(grid.q_lattice[qi], 9);
    for (std::size_t pi = 0; pi < grid.p_lattice.size(); ++pi) {
      out += ',';
      out += format_sig(grid.at(static_cast<int>(qi), static_cast<int>(pi)), 9);
    }
    out += '\n';
  }
  return out;
}

std::vector<Observation> read_observations_csv(std::istream& in) {
  CsvTable csv = read_csv(in, "observations");
  const int x_col = csv.column("x");
  const int a_col = csv.column("a");
  if (x_col < 0 || a_col < 0)
    throw std::runtime_error("observations file requires header columns x,a");
  std::vector<Observation> obs;
  obs.reserve(csv.rows.size());
  for (const auto& row : csv.rows) {
    Observation o;
    o.x = parse_double_field(row[static_cast<std::size_t>(x_col)], "x");
    o.attitude =
        static_cast<int>(parse_long_field(row[static_cast<std::size_t>(a_col)], "a"));
    obs.push_back(o);
  }
  validate_observations(obs);
  return obs;
}

std::string observations_csv(std::span<const Observation> obs) {
  std::string out = "x,a\n";
  for (const auto& o : obs) {
    out += format_full(o.x);
    out += ',';
    out += std::to_string(o.attitude);
    out += '\n';
  }
  return out;
}

}  // namespace attpipe
