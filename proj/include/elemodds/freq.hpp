#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "elemodds/fem1d.hpp"
#include "elemodds/io.hpp"
#include "elemodds/rng.hpp"

namespace elemodds {

struct FrequencyRow {
  double h;
  std::int64_t trials;
  std::int64_t successes;
  double frequency;
};

struct ExperimentMeta {
  int k1 = 0;
  int k2 = 0;
  double alpha = 0;
  double jitter = 0;
  std::uint64_t seed = 0;
};

/// Empirical frequency with which the higher-degree element is at least as
/// accurate, one row per mesh size.
struct FrequencySeries {
  std::vector<FrequencyRow> rows;
  ExperimentMeta meta;

  /// Throws DomainError unless counts are consistent and h strictly increases.
  void validate() const;
};

struct ExperimentConfig {
  std::vector<double> h_grid;
  std::int64_t trials_per_h = 100;
  double jitter = 0.3;
  RngSeed seed{};
  int threads = 1;
};

/// n log-spaced values from lo to hi inclusive.
std::vector<double> log_spaced(double lo, double hi, int n);

/// 16 log-spaced mesh sizes on [1/128, 1/2].
std::vector<double> default_h_grid();

/// The counted event: error_hi <= error_lo, ties included.
constexpr bool higher_order_wins(double error_hi, double error_lo) noexcept { return error_hi <= error_lo; }

/// For every h, draws `trials_per_h` pairs of independent random meshes
/// (one per degree) and counts the trials the higher degree wins. Cell
/// (row r, trial t) uses RNG substream (seed, r, t); rows follow the sorted,
/// de-duplicated grid.
FrequencySeries run_experiment(const RungeProblem& problem_lo, const RungeProblem& problem_hi,
                               const ExperimentConfig& config);

struct Interval {
  double lo;
  double hi;
};

/// Wilson score interval; z defaults to the two-sided 95% quantile.
Interval wilson_interval(const FrequencyRow& row, double z = 1.959963984540054);

/// Meta comment lines, then `h,trials,successes,frequency` rows.
void write_frequency_csv(std::ostream& out, const FrequencySeries& series);

/// Reads what write_frequency_csv writes (other comment lines are ignored).
FrequencySeries read_frequency_csv(std::istream& in);

/// A (h, frequency) data point; trials == 0 when no counts are known.
struct Observation {
  double h;
  double frequency;
  std::int64_t trials = 0;
};

struct ObservationTable {
  std::vector<Observation> rows;
  CommentMeta meta;
};

std::vector<Observation> observations(const FrequencySeries& series);

/// Accepts either a frequency table or an `h,probability` law curve.
ObservationTable read_observations(std::istream& in);

}  // namespace elemodds
