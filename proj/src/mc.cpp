#include "elemodds/mc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "elemodds/parallel.hpp"

namespace elemodds {

McEstimate McEstimate::from_counts(std::int64_t trials, std::int64_t successes) {
  if (trials < 1 || successes < 0 || successes > trials)
    throw DomainError("McEstimate: need trials >= 1 and 0 <= successes <= trials");
  McEstimate e;
  e.trials = trials;
  e.successes = successes;
  e.estimate = static_cast<double>(successes) / static_cast<double>(trials);
  e.std_error = std::sqrt(e.estimate * (1 - e.estimate) / static_cast<double>(trials));
  return e;
}

double sample_normal(Rng& rng) {
  const double u1 = rng.uniform();
  const double u2 = rng.uniform();
  return std::sqrt(-2 * std::log(u1)) * std::cos(2 * std::numbers::pi * u2);
}

namespace {

// ln of a Gamma(shape, 1) deviate. Working in logs keeps the boosted draw
// U^(1/shape) representable for small shapes.
double sample_log_gamma(double shape, Rng& rng) {
  if (shape < 1) {
    const double boost = std::log(rng.uniform()) / shape;
    return sample_log_gamma(shape + 1, rng) + boost;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1 / std::sqrt(9 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = sample_normal(rng);
      v = 1 + c * x;
    } while (v <= 0);
    v = v * v * v;
    const double u = rng.uniform();
    const double x2 = x * x;
    if (u < 1 - 0.0331 * x2 * x2) return std::log(d * v);
    if (std::log(u) < 0.5 * x2 + d * (1 - v + std::log(v))) return std::log(d * v);
  }
}

void require_shapes(double p, double q) {
  if (!(p > 0) || !(q > 0) || !std::isfinite(p) || !std::isfinite(q))
    throw DomainError("sample_beta: shapes must be positive and finite");
}

void require_trials(std::int64_t n) {
  if (n < 1) throw DomainError("Monte-Carlo estimate needs at least one trial");
}

}  // namespace

double sample_gamma(double shape, Rng& rng) {
  if (!(shape > 0) || !std::isfinite(shape)) throw DomainError("sample_gamma: shape must be positive");
  return std::exp(sample_log_gamma(shape, rng));
}

double sample_beta(double p, double q, Rng& rng) {
  require_shapes(p, q);
  const double log_a = sample_log_gamma(p, rng);
  const double log_b = sample_log_gamma(q, rng);
  // a / (a + b) as a logistic of the log ratio, kept off the endpoints
  // when it rounds onto them.
  const double x = 1 / (1 + std::exp(log_b - log_a));
  return std::clamp(x, std::numeric_limits<double>::denorm_min(), std::nextafter(1.0, 0.0));
}

double sample_Z(const BetaPair<double>& pair, double p, double q, Rng& rng) {
  validate(pair);
  const double x = sample_beta(p, q, rng);
  return -pair.beta_lo + (pair.beta_lo + pair.beta_hi) * x;
}

McEstimate mc_prob_event(const BetaPair<double>& pair, double p, double q, std::int64_t n_trials, RngSeed seed,
                         int threads) {
  validate(pair);
  require_shapes(p, q);
  require_trials(n_trials);
  const std::int64_t successes = parallel_count(n_trials, threads, [&](std::int64_t i) {
    Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(i));
    return sample_Z(pair, p, q, rng) <= 0;
  });
  return McEstimate::from_counts(n_trials, successes);
}

McEstimate mc_prob_independent_uniform(const BetaPair<double>& pair, std::int64_t n_trials, RngSeed seed,
                                       int threads) {
  validate(pair);
  require_trials(n_trials);
  const std::int64_t successes = parallel_count(n_trials, threads, [&](std::int64_t i) {
    Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(i));
    const double x_lo = pair.beta_lo * rng.uniform();
    const double x_hi = pair.beta_hi * rng.uniform();
    return x_hi <= x_lo;
  });
  return McEstimate::from_counts(n_trials, successes);
}

}  // namespace elemodds
