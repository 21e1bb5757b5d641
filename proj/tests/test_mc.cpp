#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "elemodds/error.hpp"
#include "elemodds/laws.hpp"
#include "elemodds/mc.hpp"
#include "elemodds/special.hpp"

using namespace elemodds;

namespace {

double mean_of_beta(double p, double q, int n, std::uint64_t seed) {
  Rng rng(seed);
  double sum = 0;
  for (int i = 0; i < n; ++i) sum += sample_beta(p, q, rng);
  return sum / n;
}

}  // namespace

TEST_CASE("substreams are deterministic and distinct") {
  Rng a = Rng::substream(RngSeed{42}, 3, 1);
  Rng b = Rng::substream(RngSeed{42}, 3, 1);
  Rng c = Rng::substream(RngSeed{42}, 1, 3);
  for (int i = 0; i < 10; ++i) {
    const auto x = a();
    CHECK(x == b());
    CHECK(x != c());
  }
}

TEST_CASE("uniform stays inside the open unit interval") {
  Rng rng(1);
  double sum = 0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    CHECK_UNARY(u > 0 && u < 1);
    sum += u;
  }
  CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("sample_beta moments and support") {
  CHECK(std::abs(mean_of_beta(1, 1, 100000, 7) - 0.5) <= 0.005);
  CHECK(std::abs(mean_of_beta(2, 3, 100000, 8) - 0.4) <= 0.005);
  Rng rng(9);
  for (const auto [p, q] : {std::pair{0.05, 0.05}, std::pair{0.5, 200.0}, std::pair{300.0, 0.2}})
    for (int i = 0; i < 20000; ++i) {
      const double x = sample_beta(p, q, rng);
      CHECK_UNARY(x > 0 && x < 1);
    }
  CHECK_THROWS_AS(sample_beta(0, 1, rng), DomainError);
  CHECK_THROWS_AS(sample_beta(1, -1, rng), DomainError);
}

TEST_CASE("sample_gamma mean and variance") {
  for (const double shape : {0.3, 1.0, 4.5}) {
    Rng rng(static_cast<std::uint64_t>(shape * 100));
    const int n = 200000;
    double sum = 0, sq = 0;
    for (int i = 0; i < n; ++i) {
      const double x = sample_gamma(shape, rng);
      sum += x;
      sq += x * x;
    }
    const double mean = sum / n;
    CHECK(std::abs(mean - shape) <= 5 * std::sqrt(shape / n));
    CHECK(sq / n - mean * mean == doctest::Approx(shape).epsilon(0.03));
  }
}

TEST_CASE("Beta draws pass a Kolmogorov-Smirnov test") {
  const int n = 100000;
  const double critical = 1.628 / std::sqrt(double(n));  // significance 0.01
  for (const auto [p, q] : {std::pair{1.0, 1.0}, std::pair{2.0, 3.0}, std::pair{0.5, 0.5}, std::pair{5.0, 2.0}}) {
    Rng rng(1234);
    std::vector<double> draws(n);
    for (auto& x : draws) x = sample_beta(p, q, rng);
    std::sort(draws.begin(), draws.end());
    double d = 0;
    for (int i = 0; i < n; ++i) {
      const double f = reg_inc_beta(draws[i], p, q);
      d = std::max({d, (i + 1.0) / n - f, f - double(i) / n});
    }
    CAPTURE(p);
    CAPTURE(q);
    CHECK(d <= critical);
  }
}

TEST_CASE("sample_Z support and mean") {
  const BetaPair<double> pair{1, 1};
  Rng rng(5);
  double sum = 0;
  for (int i = 0; i < 100000; ++i) {
    const double z = sample_Z(pair, 2, 2, rng);
    CHECK_UNARY(z >= -1 && z <= 1);
    sum += z;
  }
  CHECK(std::abs(sum / 100000) <= 0.01);
  const BetaPair<double> wide{0.5, 4};
  for (int i = 0; i < 10000; ++i) {
    const double z = sample_Z(wide, 0.3, 0.3, rng);
    CHECK_UNARY(z >= -0.5 && z <= 4);
  }
}

TEST_CASE("McEstimate from counts") {
  const auto e = McEstimate::from_counts(100, 25);
  CHECK(e.estimate == 0.25);
  CHECK(e.std_error == doctest::Approx(std::sqrt(0.25 * 0.75 / 100)));
  CHECK_THROWS(McEstimate::from_counts(0, 0));
  CHECK_THROWS(McEstimate::from_counts(10, 11));
}

TEST_CASE("mc_prob_event examples") {
  const auto sym = mc_prob_event(BetaPair<double>{2, 2}, 3, 3, 1000000, RngSeed{1});
  CHECK(std::abs(sym.estimate - 0.5) <= 3 * sym.std_error);
  const auto skew = mc_prob_event(BetaPair<double>{1, 3}, 1, 1, 1000000, RngSeed{2});
  CHECK(std::abs(skew.estimate - 0.25) <= 3 * skew.std_error);
  const auto again = mc_prob_event(BetaPair<double>{1, 3}, 1, 1, 1000000, RngSeed{2});
  CHECK(again.successes == skew.successes);
  CHECK_THROWS(mc_prob_event(BetaPair<double>{1, 3}, 1, 1, 0, RngSeed{2}));
}

TEST_CASE("mc_prob_independent_uniform examples") {
  const auto sym = mc_prob_independent_uniform(BetaPair<double>{2, 2}, 1000000, RngSeed{3});
  CHECK(std::abs(sym.estimate - 0.5) <= 3 * sym.std_error);
  const auto model = BoundModel<double>::with_h_star(1, 3, 0.1);
  const auto coarse = mc_prob_independent_uniform(beta_pair(model, 0.2), 1000000, RngSeed{4});
  CHECK(std::abs(coarse.estimate - 0.125) <= 3 * coarse.std_error);
  const auto fine = mc_prob_independent_uniform(beta_pair(model, 0.05), 1000000, RngSeed{5});
  CHECK(std::abs(fine.estimate - 0.875) <= 3 * fine.std_error);
}

TEST_CASE("estimates do not depend on the thread count") {
  const BetaPair<double> pair{0.7, 1.3};
  const auto one = mc_prob_event(pair, 1.5, 2.5, 200001, RngSeed{77}, 1);
  for (const int threads : {2, 3, 8}) {
    CHECK(mc_prob_event(pair, 1.5, 2.5, 200001, RngSeed{77}, threads).successes == one.successes);
    CHECK(mc_prob_independent_uniform(pair, 200001, RngSeed{77}, threads).successes ==
          mc_prob_independent_uniform(pair, 200001, RngSeed{77}, 1).successes);
  }
}
