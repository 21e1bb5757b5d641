#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "elemodds/error.hpp"
#include "elemodds/fit.hpp"

using namespace elemodds;

using GBP = GeneralizedBetaPrime<double>;

namespace {

std::vector<Observation> sample_law(const LawParams<double>& law, const std::vector<double>& hs) {
  std::vector<Observation> rows;
  for (const double h : hs) rows.push_back({h, *evaluate(law, h)});
  return rows;
}

const GBP& as_gbp(const FitResult& r) { return std::get<GBP>(r.params); }

bool history_non_increasing(const FitResult& r) {
  for (std::size_t i = 1; i < r.objective_history.size(); ++i)
    if (r.objective_history[i] > r.objective_history[i - 1]) return false;
  return true;
}

}  // namespace

TEST_CASE("ssr_objective") {
  const LawParams<double> law{GBP{2, 3, 2, 0.1}};
  const auto exact = sample_law(law, log_spaced(0.01, 1, 12));
  CHECK(ssr_objective(law, exact) <= 1e-20);
  const std::vector<Observation> one{{0.1, 1.0}};
  CHECK(ssr_objective(LawParams<double>{Sigmoid<double>{0.1, 2}}, one) == doctest::Approx(0.25));
  const std::vector<Observation> half{{0.1, 0.5}};
  CHECK(ssr_objective(LawParams<double>{GBP{3, 3, 1, 0.1}}, half) <= 1e-24);
}

TEST_CASE("crossing_estimate interpolates the half crossing") {
  const std::vector<Observation> rows{{0.1, 0.9}, {0.2, 0.7}, {0.3, 0.3}, {0.4, 0.1}};
  CHECK(crossing_estimate(rows) == doctest::Approx(0.25));
}

TEST_CASE("nelder_mead minimizes a quadratic") {
  const auto f = [](const Eigen::VectorXd& x) { return (x[0] - 1) * (x[0] - 1) + 10 * (x[1] + 2) * (x[1] + 2); };
  const auto r = nelder_mead(f, Eigen::Vector2d(0, 0), NelderMeadOptions{});
  CHECK(r.converged);
  CHECK(r.x[0] == doctest::Approx(1).epsilon(1e-6));
  CHECK(r.x[1] == doctest::Approx(-2).epsilon(1e-6));
  for (std::size_t i = 1; i < r.history.size(); ++i) CHECK(r.history[i] <= r.history[i - 1]);
}

TEST_CASE("fit_sigmoid recovers h*") {
  for (const int delta : {1, 2}) {
    FitConfig config;
    config.delta = delta;
    const auto rows = sample_law(LawParams<double>{Sigmoid<double>{0.1, delta}}, default_h_grid());
    const auto r = fit_sigmoid(rows, config);
    const double hs = std::get<Sigmoid<double>>(r.params).h_star;
    CHECK(std::abs(hs / 0.1 - 1) <= 1e-6);
    CHECK(r.converged);
    CHECK(history_non_increasing(r));
  }
}

TEST_CASE("fit_sigmoid on flat data") {
  std::vector<Observation> rows;
  for (const double h : default_h_grid()) rows.push_back({h, 0.5});
  FitConfig config;
  config.delta = 2;
  const auto r = fit_sigmoid(rows, config);
  CHECK(r.converged);
  CHECK_FALSE(r.degenerate);
  const auto law = LawParams<double>{std::get<Sigmoid<double>>(r.params)};
  for (const double hs : log_spaced(0.001, 10, 60))
    CHECK(r.ssr <= ssr_objective(LawParams<double>{Sigmoid<double>{hs, 2}}, rows) + 1e-12);
  CHECK(ssr_objective(law, rows) == doctest::Approx(r.ssr));
}

TEST_CASE("fit_gbp recovers noiseless parameters") {
  const GBP truth{2, 5, 2, 0.08};
  const auto rows = sample_law(LawParams<double>{truth}, default_h_grid());
  FitConfig config;
  config.delta = 2;
  const auto r = fit_gbp(rows, config);
  CHECK(r.ssr <= 1e-12);
  CHECK(as_gbp(r).p == doctest::Approx(2).epsilon(1e-3));
  CHECK(as_gbp(r).q == doctest::Approx(5).epsilon(1e-3));
  CHECK(as_gbp(r).h_star == doctest::Approx(0.08).epsilon(1e-4));
  CHECK(r.converged);
  CHECK_FALSE(r.degenerate);
  CHECK(history_non_increasing(r));
}

TEST_CASE("fit_gbp under binomial noise reaches the noise floor") {
  const GBP truth{2, 5, 2, 0.08};
  FitConfig config;
  config.delta = 2;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 gen(seed);
    std::vector<Observation> rows;
    double floor = 0;
    for (const double h : default_h_grid()) {
      const double p = prob_gbp(truth, h);
      std::binomial_distribution<int> draw(100, p);
      const double f = draw(gen) / 100.0;
      rows.push_back({h, f, 100});
      floor += (f - p) * (f - p);
    }
    const auto r = fit_gbp(rows, config);
    CAPTURE(seed);
    CHECK(r.ssr <= floor);
  }
}

TEST_CASE("fit_gbp flags saturated data as degenerate") {
  std::vector<Observation> rows;
  for (const double h : default_h_grid()) rows.push_back({h, 1.0});
  FitConfig config;
  config.delta = 1;
  const auto r = fit_gbp(rows, config);
  CHECK(r.degenerate);
  CHECK_FALSE(r.converged);
  CHECK(as_gbp(r).p > 0);
  CHECK(as_gbp(r).q > 0);
  CHECK(as_gbp(r).h_star > 0);
}

TEST_CASE("fit_gbp is deterministic") {
  const auto rows = sample_law(LawParams<double>{GBP{0.7, 3, 1, 0.05}}, log_spaced(0.005, 0.5, 10));
  FitConfig config;
  const auto a = fit_gbp(rows, config);
  const auto b = fit_gbp(rows, config);
  CHECK(a.ssr == b.ssr);
  CHECK(as_gbp(a).p == as_gbp(b).p);
  CHECK(as_gbp(a).h_star == as_gbp(b).h_star);
  CHECK(a.objective_history == b.objective_history);
}

TEST_CASE("generalized Beta prime fit dominates the sigmoid fit") {
  for (const GBP& truth : {GBP{2, 5, 2, 0.08}, GBP{0.5, 2, 1, 0.1}, GBP{4, 1.5, 3, 0.2}}) {
    const auto rows = sample_law(LawParams<double>{truth}, default_h_grid());
    FitConfig config;
    config.delta = truth.delta;
    CHECK(fit_gbp(rows, config).ssr <= fit_sigmoid(rows, config).ssr);
  }
}

TEST_CASE("fit_gbp needs four rows") {
  const std::vector<Observation> rows{{0.1, 0.9}, {0.2, 0.5}, {0.3, 0.1}};
  CHECK_THROWS_AS(fit_gbp(rows, FitConfig{}), InsufficientDataError);
  CHECK_THROWS_AS(fit_sigmoid(std::vector<Observation>{}, FitConfig{}), InsufficientDataError);
}

TEST_CASE("weighted fit still recovers noiseless data") {
  std::vector<Observation> rows;
  const GBP truth{2, 3, 1, 0.1};
  for (const double h : default_h_grid()) rows.push_back({h, prob_gbp(truth, h), 1000});
  FitConfig config;
  config.wilson_weighting = true;
  const auto r = fit_gbp(rows, config);
  CHECK(as_gbp(r).h_star == doctest::Approx(0.1).epsilon(1e-3));
}

TEST_CASE("fit CSV layout") {
  const auto rows = sample_law(LawParams<double>{GBP{2, 5, 2, 0.08}}, default_h_grid());
  FitConfig config;
  config.delta = 2;
  std::ostringstream out;
  write_fit_csv(out, fit_gbp(rows, config));
  const std::string text = out.str();
  CHECK(text.rfind("param,value\np,", 0) == 0);
  for (const char* key : {"\nq,", "\nh_star,", "\ndelta,2\n", "\nssr,", "\niterations,", "\nconverged,true\n"})
    CHECK(text.find(key) != std::string::npos);

  std::ostringstream sig;
  write_fit_csv(sig, fit_sigmoid(rows, config));
  CHECK(sig.str().find("\np,") == std::string::npos);
}
