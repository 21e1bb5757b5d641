#include "elemodds/freq.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "elemodds/error.hpp"
#include "elemodds/parallel.hpp"

namespace elemodds {

void FrequencySeries::validate() const {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (!(row.h > 0)) throw DomainError("FrequencySeries: h must be positive");
    if (row.trials < 1 || row.successes < 0 || row.successes > row.trials)
      throw DomainError("FrequencySeries: need 0 <= successes <= trials and trials >= 1");
    if (row.frequency != static_cast<double>(row.successes) / static_cast<double>(row.trials))
      throw DomainError("FrequencySeries: frequency must equal successes / trials");
    if (i > 0 && !(row.h > rows[i - 1].h)) throw DomainError("FrequencySeries: h must be strictly increasing");
  }
}

std::vector<double> log_spaced(double lo, double hi, int n) {
  if (!(lo > 0) || !(hi >= lo) || n < 1) throw DomainError("log_spaced: need 0 < lo <= hi and n >= 1");
  if (n == 1) return {lo};
  std::vector<double> out(static_cast<std::size_t>(n));
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (n - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<double> default_h_grid() { return log_spaced(1.0 / 128.0, 0.5, 16); }

FrequencySeries run_experiment(const RungeProblem& problem_lo, const RungeProblem& problem_hi,
                               const ExperimentConfig& config) {
  if (problem_lo.degree() >= problem_hi.degree())
    throw DomainError("run_experiment: the lower degree must be smaller than the higher degree");
  if (config.h_grid.empty()) throw DomainError("run_experiment: empty h grid");
  if (config.trials_per_h < 1) throw DomainError("run_experiment: need at least one trial per h");
  if (!(config.jitter >= 0 && config.jitter <= 0.49)) throw DomainError("run_experiment: jitter must lie in [0, 0.49]");

  std::vector<double> grid = config.h_grid;
  for (const double h : grid)
    if (!(h > 0 && h < 1)) throw DomainError("run_experiment: every h must lie in (0, 1)");
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  const auto rows = static_cast<std::int64_t>(grid.size());
  const std::int64_t trials = config.trials_per_h;
  std::vector<char> wins(static_cast<std::size_t>(rows * trials), 0);

  parallel_for(rows * trials, config.threads, [&](std::int64_t cell) {
    const std::int64_t r = cell / trials;
    const std::int64_t t = cell % trials;
    const double h = grid[static_cast<std::size_t>(r)];
    try {
      Rng rng = Rng::substream(config.seed, static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(t));
      const Mesh1D mesh_lo = random_mesh(h, config.jitter, rng);
      const Mesh1D mesh_hi = random_mesh(h, config.jitter, rng);
      const double error_lo = h1_error(problem_lo, assemble_and_solve(problem_lo, mesh_lo));
      const double error_hi = h1_error(problem_hi, assemble_and_solve(problem_hi, mesh_hi));
      wins[static_cast<std::size_t>(cell)] = higher_order_wins(error_hi, error_lo) ? 1 : 0;
    } catch (const std::exception& e) {
      throw InternalError("run_experiment: h=" + format_number(h) + " trial=" + std::to_string(t) + ": " + e.what());
    }
  });

  FrequencySeries series;
  series.meta = {problem_lo.degree(), problem_hi.degree(), problem_lo.alpha(), config.jitter, config.seed.value};
  for (std::int64_t r = 0; r < rows; ++r) {
    const auto first = wins.begin() + r * trials;
    const auto successes = static_cast<std::int64_t>(std::count(first, first + trials, 1));
    series.rows.push_back({grid[static_cast<std::size_t>(r)], trials, successes,
                           static_cast<double>(successes) / static_cast<double>(trials)});
  }
  return series;
}

Interval wilson_interval(const FrequencyRow& row, double z) {
  if (row.trials < 1) throw DomainError("wilson_interval: need at least one trial");
  const double n = static_cast<double>(row.trials);
  const double p = static_cast<double>(row.successes) / n;
  const double z2 = z * z;
  const double denom = 1 + z2 / n;
  const double center = (p + z2 / (2 * n)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom;
  Interval out{std::max(0.0, center - half), std::min(1.0, center + half)};
  if (row.successes == 0) out.lo = 0;
  if (row.successes == row.trials) out.hi = 1;
  return out;
}

void write_frequency_csv(std::ostream& out, const FrequencySeries& series) {
  write_comment(out, "k1", std::to_string(series.meta.k1));
  write_comment(out, "k2", std::to_string(series.meta.k2));
  write_comment(out, "alpha", format_number(series.meta.alpha));
  write_comment(out, "jitter", format_number(series.meta.jitter));
  write_comment(out, "seed", std::to_string(series.meta.seed));
  out << "h,trials,successes,frequency\n";
  for (const auto& row : series.rows)
    out << format_number(row.h) << ',' << row.trials << ',' << row.successes << ',' << format_number(row.frequency)
        << '\n';
}

namespace {

template <class T>
T require_field(std::optional<T> value, std::size_t line, const char* name) {
  if (!value) throw ParseError(line, std::string("malformed ") + name);
  return *value;
}

enum class TableKind { frequency, curve };

}  // namespace

ObservationTable read_observations(std::istream& in) {
  ObservationTable table;
  std::string line;
  std::size_t number = 0;
  std::optional<TableKind> kind;
  while (std::getline(in, line)) {
    ++number;
    if (parse_comment(line, table.meta)) continue;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_fields(line);
    if (!kind) {
      if (fields.size() == 4 && fields[0] == "h" && fields[1] == "trials" && fields[2] == "successes" &&
          fields[3] == "frequency")
        kind = TableKind::frequency;
      else if (fields.size() == 2 && fields[0] == "h" && fields[1] == "probability")
        kind = TableKind::curve;
      else
        throw ParseError(number, "expected header `h,trials,successes,frequency` or `h,probability`");
      continue;
    }
    if (*kind == TableKind::frequency) {
      if (fields.size() != 4) throw ParseError(number, "expected 4 fields");
      const double h = require_field(parse_double(fields[0]), number, "h");
      const auto trials = require_field(parse_integer(fields[1]), number, "trials");
      const auto successes = require_field(parse_integer(fields[2]), number, "successes");
      const double frequency = require_field(parse_double(fields[3]), number, "frequency");
      if (!(h > 0)) throw ParseError(number, "h must be positive");
      if (trials < 1 || successes < 0 || successes > trials)
        throw ParseError(number, "need 0 <= successes <= trials and trials >= 1");
      if (frequency != static_cast<double>(successes) / static_cast<double>(trials))
        throw ParseError(number, "frequency must equal successes / trials");
      table.rows.push_back({h, frequency, trials});
    } else {
      if (fields.size() != 2) throw ParseError(number, "expected 2 fields");
      const double h = require_field(parse_double(fields[0]), number, "h");
      const double p = require_field(parse_double(fields[1]), number, "probability");
      if (!(h > 0)) throw ParseError(number, "h must be positive");
      if (!(p >= 0 && p <= 1)) throw ParseError(number, "probability must lie in [0, 1]");
      table.rows.push_back({h, p, 0});
    }
    if (table.rows.size() > 1 && !(table.rows.back().h > table.rows[table.rows.size() - 2].h))
      throw ParseError(number, "h must be strictly increasing");
  }
  if (!kind) throw ParseError(number, "missing header");
  return table;
}

FrequencySeries read_frequency_csv(std::istream& in) {
  const auto table = read_observations(in);
  FrequencySeries series;
  for (const auto& obs : table.rows) {
    if (obs.trials < 1) throw ParseError(0, "not a frequency table");
    const auto successes = static_cast<std::int64_t>(std::llround(obs.frequency * static_cast<double>(obs.trials)));
    series.rows.push_back({obs.h, obs.trials, successes, obs.frequency});
  }
  auto integer = [&](const char* key) -> std::int64_t {
    const auto it = table.meta.find(key);
    if (it == table.meta.end()) return 0;
    return parse_integer(it->second).value_or(0);
  };
  auto real = [&](const char* key) -> double {
    const auto it = table.meta.find(key);
    if (it == table.meta.end()) return 0;
    return parse_double(it->second).value_or(0);
  };
  series.meta.k1 = static_cast<int>(integer("k1"));
  series.meta.k2 = static_cast<int>(integer("k2"));
  series.meta.alpha = real("alpha");
  series.meta.jitter = real("jitter");
  if (const auto it = table.meta.find("seed"); it != table.meta.end()) {
    std::uint64_t seed = 0;
    const auto& text = it->second;
    if (std::from_chars(text.data(), text.data() + text.size(), seed).ec == std::errc()) series.meta.seed = seed;
  }
  return series;
}

std::vector<Observation> observations(const FrequencySeries& series) {
  std::vector<Observation> out;
  out.reserve(series.rows.size());
  for (const auto& row : series.rows) out.push_back({row.h, row.frequency, row.trials});
  return out;
}

}  // namespace elemodds
