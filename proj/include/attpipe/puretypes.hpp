#pragma once

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace attpipe {

/// One analysis unit: ideology score and binarized overall attitude.
struct Observation {
  double x = 0.0;  // in [0,1]
  int attitude = 0;  // -1 or +1
};

/// Approval probabilities of the two pure types: p for an oppositional act,
/// q for a conservative act.
struct PureTypesParams {
  double p = 0.5;
  double q = 0.5;
};

struct FitResult {
  PureTypesParams params{};
  double nll = 0.0;          // negative log-likelihood at the optimum
  bool identifiable = true;  // false on flat ridges (e.g. all x equal)
  int iterations = 0;        // total across all starts
  bool converged = false;
};

class FitError : public std::runtime_error {
 public:
  FitError(const std::string& message, FitResult best)
      : std::runtime_error(message), best_(best) {}
  const FitResult& best() const { return best_; }

 private:
  FitResult best_;
};

/// -ln L(p,q): sum of -ln[x*p + (1-x)*q] over attitude=+1 and
/// -ln[x*(1-p) + (1-x)*(1-q)] over attitude=-1, accumulated in the log
/// domain. p or q outside (0,1), or a nonpositive likelihood term, is a
/// domain error.
double neg_log_likelihood(PureTypesParams params, std::span<const Observation> obs);

/// Analytic (d/dp, d/dq) of the negative log-likelihood.
std::pair<double, double> grad_neg_log_likelihood(PureTypesParams params,
                                                  std::span<const Observation> obs);

/// Second derivatives of the negative log-likelihood; positive semidefinite
/// everywhere in the box.
struct Curvature {
  double dpp = 0.0;
  double dpq = 0.0;
  double dqq = 0.0;
};

Curvature hessian_neg_log_likelihood(PureTypesParams params,
                                     std::span<const Observation> obs);

struct FitOptions {
  double delta = 1e-5;                   // box is [delta, 1-delta]^2
  std::vector<PureTypesParams> starts;   // empty -> default lattice
  double grad_tol = 1e-8;                // projected-gradient infinity norm
  double step_tol = 1e-10;
  int max_iterations = 10000;            // per start
};

/// 5x5 uniform lattice over the box with the four corners removed (21 starts,
/// centre included).
std::vector<PureTypesParams> default_starts(double delta);

/// Multi-start projected-Newton minimization of the negative log-likelihood
/// over the closed box. Throws FitError carrying the best point seen when no
/// start converges.
FitResult fit(std::span<const Observation> obs, const FitOptions& options = {});

struct ContourGrid {
  std::vector<double> p_lattice;  // columns
  std::vector<double> q_lattice;  // rows
  std::vector<double> values;     // row-major, rows follow q_lattice
  int argmin_p = 0;
  int argmin_q = 0;
  double exponent = 1.0;

  double at(int qi, int pi) const {
    return values[static_cast<std::size_t>(qi) * p_lattice.size() +
                  static_cast<std::size_t>(pi)];
  }
};

/// (-ln L)^exponent sampled on a uniform resolution x resolution lattice over
/// the box.
ContourGrid contour_grid(std::span<const Observation> obs, int resolution,
                         double exponent = 1.0 / 256.0, double delta = 1e-5);

/// CSV whose header row carries the p lattice and whose first column carries
/// the q lattice; values use 9 significant digits.
std::string contour_grid_csv(const ContourGrid& grid);

// Observation file schema: CSV columns (x, a).
std::vector<Observation> read_observations_csv(std::istream& in);
std::string observations_csv(std::span<const Observation> obs);

/// Validates x in [0,1] and attitude in {-1,+1} for every observation and
/// that the list is nonempty.
void validate_observations(std::span<const Observation> obs);

}  // namespace attpipe
