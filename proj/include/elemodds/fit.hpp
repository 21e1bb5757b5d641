#pragma once

// Least-squares estimation of law parameters from observed frequencies.

#include <Eigen/Core>

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "elemodds/freq.hpp"
#include "elemodds/laws.hpp"

namespace elemodds {

struct FitConfig {
  int max_iterations = 20000;
  double simplex_tolerance = 1e-10;  // spread of objective values over the simplex
  int restarts = 8;
  int delta = 1;  // k2 - k1, never fitted
  bool wilson_weighting = false;
};

struct FitResult {
  LawParams<double> params;
  double ssr = 0;
  int iterations = 0;
  bool converged = false;
  /// The optimum sits on the edge of the search box, i.e. the data cannot
  /// pin the parameters down.
  bool degenerate = false;
  /// Best objective value seen so far, one entry per iteration.
  std::vector<double> objective_history;
};

/// Sum over rows of (frequency - P(h))^2. With `wilson_weighting`, rows with
/// known trial counts are weighted by the inverse squared Wilson half-width.
double ssr_objective(const LawParams<double>& law, std::span<const Observation> data,
                     bool wilson_weighting = false);
double ssr_objective(const LawParams<double>& law, const FrequencySeries& data);

/// Mesh size where the frequency crosses 1/2, linearly interpolated between
/// the bracketing rows; the nearer end of the grid when it never crosses.
double crossing_estimate(std::span<const Observation> data);

struct NelderMeadOptions {
  int max_iterations = 20000;
  double f_tolerance = 1e-10;
  double x_tolerance = 1e-9;
  double initial_step = 0.5;
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  double value = 0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> history;
};

/// Nelder-Mead downhill simplex. Stops when both the objective spread and
/// the simplex diameter (max norm) fall below their tolerances.
NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& objective,
                             const Eigen::VectorXd& start, const NelderMeadOptions& options);

/// h* of the sigmoid law: scan of ln h* over [min h / 100, max h * 100],
/// then golden-section refinement around the best scan point. Ties resolve
/// to the smallest h*.
FitResult fit_sigmoid(std::span<const Observation> data, const FitConfig& config);
FitResult fit_sigmoid(const FrequencySeries& data, const FitConfig& config);

/// (p, q, h*) of the generalized Beta prime law by multi-start Nelder-Mead
/// over (ln p, ln q, ln h*). Needs at least 4 rows.
FitResult fit_gbp(std::span<const Observation> data, const FitConfig& config);
FitResult fit_gbp(const FrequencySeries& data, const FitConfig& config);

/// `param,value` rows: p, q (generalized Beta prime only), h_star, delta,
/// ssr, iterations, converged.
void write_fit_csv(std::ostream& out, const FitResult& result);

}  // namespace elemodds
