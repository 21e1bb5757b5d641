#include "elemodds/fit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "elemodds/error.hpp"
#include "elemodds/io.hpp"

namespace elemodds {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_data(std::span<const Observation> data) {
  if (data.empty()) throw InsufficientDataError("fit: no observations");
  for (const auto& obs : data)
    if (!(obs.h > 0)) throw DomainError("fit: observation h must be positive");
}

void require_config(const FitConfig& config) {
  if (config.max_iterations < 1) throw DomainError("FitConfig: max_iterations must be positive");
  if (!(config.simplex_tolerance > 0)) throw DomainError("FitConfig: simplex_tolerance must be positive");
  if (config.restarts < 0) throw DomainError("FitConfig: restarts must be nonnegative");
  if (config.delta < 1) throw DomainError("FitConfig: delta must be >= 1");
}

std::pair<double, double> h_range(std::span<const Observation> data) {
  const auto [lo, hi] = std::minmax_element(data.begin(), data.end(),
                                            [](const Observation& a, const Observation& b) { return a.h < b.h; });
  return {lo->h, hi->h};
}

double weight(const Observation& obs, bool wilson_weighting) {
  if (!wilson_weighting || obs.trials < 1) return 1;
  const auto successes = static_cast<std::int64_t>(std::llround(obs.frequency * static_cast<double>(obs.trials)));
  const auto interval = wilson_interval({obs.h, obs.trials, successes, obs.frequency});
  const double sigma = (interval.hi - interval.lo) / (2 * 1.959963984540054);
  return 1 / (sigma * sigma);
}

bool all_saturated(std::span<const Observation> data) {
  const double first = data.front().frequency;
  if (first != 0 && first != 1) return false;
  return std::all_of(data.begin(), data.end(), [first](const Observation& o) { return o.frequency == first; });
}

}  // namespace

double ssr_objective(const LawParams<double>& law, std::span<const Observation> data, bool wilson_weighting) {
  require_data(data);
  double sum = 0;
  for (const auto& obs : data) {
    const auto p = evaluate(law, obs.h);
    if (!p) throw DomainError("ssr_objective: law undefined at h = " + format_number(obs.h));
    const double r = obs.frequency - *p;
    sum += weight(obs, wilson_weighting) * r * r;
  }
  return sum;
}

double ssr_objective(const LawParams<double>& law, const FrequencySeries& data) {
  const auto obs = observations(data);
  return ssr_objective(law, obs);
}

double crossing_estimate(std::span<const Observation> data) {
  require_data(data);
  for (std::size_t i = 0; i + 1 < data.size(); ++i) {
    const double f0 = data[i].frequency - 0.5;
    const double f1 = data[i + 1].frequency - 0.5;
    if (f0 == 0) return data[i].h;
    if (f0 * f1 < 0) {
      const double t = f0 / (f0 - f1);
      return data[i].h + t * (data[i + 1].h - data[i].h);
    }
  }
  const auto [lo, hi] = h_range(data);
  if (data.back().frequency == 0.5) return data.back().h;
  // Never crosses: all above 1/2 pushes h* past the largest h, all below
  // pushes it under the smallest.
  const double mean = std::accumulate(data.begin(), data.end(), 0.0,
                                      [](double s, const Observation& o) { return s + o.frequency; }) /
                      static_cast<double>(data.size());
  return mean > 0.5 ? hi : lo;
}

NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& objective,
                             const Eigen::VectorXd& start, const NelderMeadOptions& options) {
  const Eigen::Index n = start.size();
  if (n < 1) throw DomainError("nelder_mead: empty start point");
  constexpr double reflect = 1.0;
  constexpr double expand = 2.0;
  constexpr double contract = 0.5;
  constexpr double shrink = 0.5;

  std::vector<Eigen::VectorXd> vertices(static_cast<std::size_t>(n) + 1, start);
  std::vector<double> values(static_cast<std::size_t>(n) + 1);
  for (Eigen::Index i = 0; i < n; ++i) vertices[static_cast<std::size_t>(i) + 1][i] += options.initial_step;
  for (std::size_t i = 0; i < vertices.size(); ++i) values[i] = objective(vertices[i]);

  std::vector<std::size_t> order(vertices.size());
  NelderMeadResult result;
  auto sort_vertices = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<Eigen::VectorXd> v2;
    std::vector<double> f2;
    v2.reserve(order.size());
    f2.reserve(order.size());
    for (const auto i : order) {
      v2.push_back(std::move(vertices[i]));
      f2.push_back(values[i]);
    }
    vertices = std::move(v2);
    values = std::move(f2);
  };

  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    sort_vertices();
    double diameter = 0;
    for (std::size_t i = 1; i < vertices.size(); ++i)
      diameter = std::max(diameter, (vertices[i] - vertices[0]).lpNorm<Eigen::Infinity>());
    const double spread = values.back() - values.front();
    if (std::isfinite(values.back()) && spread <= options.f_tolerance && diameter <= options.x_tolerance) {
      result.converged = true;
      break;
    }

    const Eigen::VectorXd centroid =
        std::accumulate(vertices.begin(), vertices.end() - 1, Eigen::VectorXd(Eigen::VectorXd::Zero(n))) /
        static_cast<double>(n);
    const Eigen::VectorXd& worst = vertices.back();

    const Eigen::VectorXd xr = centroid + reflect * (centroid - worst);
    const double fr = objective(xr);
    if (fr < values.front()) {
      const Eigen::VectorXd xe = centroid + expand * (xr - centroid);
      const double fe = objective(xe);
      if (fe < fr) {
        vertices.back() = xe;
        values.back() = fe;
      } else {
        vertices.back() = xr;
        values.back() = fr;
      }
    } else if (fr < values[values.size() - 2]) {
      vertices.back() = xr;
      values.back() = fr;
    } else {
      const bool outside = fr < values.back();
      const Eigen::VectorXd xc =
          outside ? Eigen::VectorXd(centroid + contract * (xr - centroid))
                  : Eigen::VectorXd(centroid + contract * (worst - centroid));
      const double fc = objective(xc);
      if (fc < (outside ? fr : values.back())) {
        vertices.back() = xc;
        values.back() = fc;
      } else {
        for (std::size_t i = 1; i < vertices.size(); ++i) {
          vertices[i] = vertices[0] + shrink * (vertices[i] - vertices[0]);
          values[i] = objective(vertices[i]);
        }
      }
    }
    result.history.push_back(*std::min_element(values.begin(), values.end()));
  }
  sort_vertices();
  result.x = vertices.front();
  result.value = values.front();
  result.iterations = iter;
  return result;
}

FitResult fit_sigmoid(std::span<const Observation> data, const FitConfig& config) {
  require_data(data);
  require_config(config);
  const auto [h_min, h_max] = h_range(data);
  const double t_lo = std::log(h_min / 100);
  const double t_hi = std::log(h_max * 100);
  auto objective = [&](double t) {
    return ssr_objective(Sigmoid<double>{std::exp(t), config.delta}, data, config.wilson_weighting);
  };

  FitResult result;
  double best_so_far = kInf;
  auto record = [&](double f) {
    best_so_far = std::min(best_so_far, f);
    result.objective_history.push_back(best_so_far);
  };

  // Global scan; strict < keeps the smallest h* among ties.
  constexpr int kScanPoints = 401;
  int best = 0;
  double best_value = kInf;
  std::vector<double> scan(kScanPoints);
  for (int i = 0; i < kScanPoints; ++i) {
    const double t = t_lo + (t_hi - t_lo) * i / (kScanPoints - 1);
    scan[static_cast<std::size_t>(i)] = objective(t);
    if (scan[static_cast<std::size_t>(i)] < best_value) {
      best_value = scan[static_cast<std::size_t>(i)];
      best = i;
    }
  }
  record(best_value);

  // Golden-section refinement inside the bracketing scan cells.
  const double step = (t_hi - t_lo) / (kScanPoints - 1);
  double a = t_lo + step * std::max(best - 1, 0);
  double b = t_lo + step * std::min(best + 1, kScanPoints - 1);
  const double inv_phi = (std::sqrt(5.0) - 1) / 2;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = objective(c);
  double fd = objective(d);
  double best_t = t_lo + step * best;
  int iterations = 0;
  bool converged = false;
  while (iterations < config.max_iterations) {
    if (b - a <= 1e-13 * std::max(1.0, std::abs(a))) {
      converged = true;
      break;
    }
    ++iterations;
    if (fc <= fd) {  // ties move toward smaller h*
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = objective(d);
    }
    const double f = std::min(fc, fd);
    if (f < best_value) {
      best_value = f;
      best_t = fc <= fd ? c : d;
    }
    record(f);
  }

  result.params = Sigmoid<double>{std::exp(best_t), config.delta};
  result.ssr = best_value;
  result.iterations = iterations;
  result.degenerate = best == 0 || best == kScanPoints - 1;
  result.converged = converged && !result.degenerate;
  return result;
}

FitResult fit_sigmoid(const FrequencySeries& data, const FitConfig& config) {
  const auto obs = observations(data);
  return fit_sigmoid(obs, config);
}

FitResult fit_gbp(std::span<const Observation> data, const FitConfig& config) {
  require_data(data);
  require_config(config);
  if (data.size() < 4) throw InsufficientDataError("fit_gbp: need at least 4 rows for 3 free parameters");

  const auto [h_min, h_max] = h_range(data);
  const double shape_bound = std::log(1e3);
  const Eigen::Vector3d box_lo(-shape_bound, -shape_bound, std::log(h_min) - std::log(1e3));
  const Eigen::Vector3d box_hi(shape_bound, shape_bound, std::log(h_max) + std::log(1e3));

  auto to_law = [&](const Eigen::VectorXd& x) {
    return GeneralizedBetaPrime<double>{std::exp(x[0]), std::exp(x[1]), config.delta, std::exp(x[2])};
  };
  auto objective = [&](const Eigen::VectorXd& x) {
    if ((x.array() < box_lo.array()).any() || (x.array() > box_hi.array()).any()) return kInf;
    return ssr_objective(to_law(x), data, config.wilson_weighting);
  };

  // Deterministic lattice of starts around p = q = 1, h* = crossing.
  static constexpr std::array<std::array<double, 3>, 8> kOffsets = {{{0, 0, 0},
                                                                     {1, 1, 0},
                                                                     {-1, -1, 0},
                                                                     {1, -1, 0},
                                                                     {-1, 1, 0},
                                                                     {0.5, 0.5, 0.5},
                                                                     {0.5, 0.5, -0.5},
                                                                     {2, 2, 0}}};
  const double t0 = std::log(crossing_estimate(data));
  const int starts = std::max(1, config.restarts);

  NelderMeadOptions options;
  options.max_iterations = config.max_iterations;
  options.f_tolerance = config.simplex_tolerance;

  FitResult result;
  double best_so_far = kInf;
  NelderMeadResult best;
  best.value = kInf;
  for (int s = 0; s < starts; ++s) {
    const auto& off = kOffsets[static_cast<std::size_t>(s) % kOffsets.size()];
    const double scale = 1.0 + static_cast<double>(s / static_cast<int>(kOffsets.size()));
    Eigen::VectorXd x(3);
    x << scale * off[0], scale * off[1], t0 + scale * off[2];
    x = x.cwiseMax(box_lo).cwiseMin(box_hi);

    // Restart from the optimum until it stops improving; a collapsed simplex
    // can stall short of the minimum.
    auto absorb = [&](const NelderMeadResult& r) {
      for (const double f : r.history) {
        best_so_far = std::min(best_so_far, f);
        result.objective_history.push_back(best_so_far);
      }
      result.iterations += r.iterations;
    };
    NelderMeadResult run = nelder_mead(objective, x, options);
    absorb(run);
    NelderMeadOptions polish_options = options;
    polish_options.initial_step = 0.1;
    for (int polish = 0; polish < 4; ++polish) {
      NelderMeadResult next = nelder_mead(objective, run.x, polish_options);
      absorb(next);
      if (!(next.value < run.value)) break;
      const bool significant = next.value < run.value - 1e-3 * options.f_tolerance;
      run.x = next.x;
      run.value = next.value;
      run.converged = next.converged;
      if (!significant) break;
    }
    if (run.value < best.value) best = std::move(run);  // ties keep the earlier start
  }

  result.params = to_law(best.x);
  result.ssr = best.value;
  const double margin = 0.05;
  const bool on_edge = ((best.x - box_lo).array() < margin).any() || ((box_hi - best.x).array() < margin).any();
  result.degenerate = on_edge || all_saturated(data);
  result.converged = best.converged && !result.degenerate;
  return result;
}

FitResult fit_gbp(const FrequencySeries& data, const FitConfig& config) {
  const auto obs = observations(data);
  return fit_gbp(obs, config);
}

void write_fit_csv(std::ostream& out, const FitResult& result) {
  out << "param,value\n";
  std::visit(
      [&out](const auto& law) {
        using Law = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<Law, GeneralizedBetaPrime<double>>) {
          out << "p," << format_number(law.p) << '\n';
          out << "q," << format_number(law.q) << '\n';
        }
        out << "h_star," << format_number(law.h_star) << '\n';
        if constexpr (!std::is_same_v<Law, TwoStep<double>>) out << "delta," << law.delta << '\n';
      },
      result.params);
  out << "ssr," << format_number(result.ssr) << '\n';
  out << "iterations," << result.iterations << '\n';
  out << "converged," << (result.converged ? "true" : "false") << '\n';
}

}  // namespace elemodds
