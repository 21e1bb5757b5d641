#pragma once

#include <cstdint>

#include "elemodds/laws.hpp"
#include "elemodds/rng.hpp"

namespace elemodds {

struct McEstimate {
  std::int64_t trials = 0;
  std::int64_t successes = 0;
  double estimate = 0;
  double std_error = 0;

  static McEstimate from_counts(std::int64_t trials, std::int64_t successes);
};

/// Standard normal deviate (Box-Muller, one uniform pair per draw).
double sample_normal(Rng& rng);

/// Gamma(shape, 1) deviate; Marsaglia-Tsang squeeze, boosted for shape < 1.
double sample_gamma(double shape, Rng& rng);

/// Beta(p, q) deviate as a ratio of Gamma deviates.
double sample_beta(double p, double q, Rng& rng);

/// Z = -beta_lo + (beta_lo + beta_hi) X with X ~ Beta(p, q).
double sample_Z(const BetaPair<double>& pair, double p, double q, Rng& rng);

/// Monte-Carlo estimate of Prob{Z <= 0}. Trial i draws from substream i of
/// `seed`, so the result is identical for any thread count.
McEstimate mc_prob_event(const BetaPair<double>& pair, double p, double q, std::int64_t n_trials,
                         RngSeed seed, int threads = 1);

/// Monte-Carlo estimate of Prob{X_hi <= X_lo} with X_lo ~ U[0, beta_lo] and
/// X_hi ~ U[0, beta_hi] independent.
McEstimate mc_prob_independent_uniform(const BetaPair<double>& pair, std::int64_t n_trials, RngSeed seed,
                                       int threads = 1);

}  // namespace elemodds
