#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "elemodds/error.hpp"
#include "elemodds/quadrature.hpp"
#include "elemodds/special.hpp"

using namespace elemodds;

namespace {

double binomial(int n, int k) {
  double c = 1;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

// I_x(p, q) for integer shapes as a binomial tail.
double binomial_tail(double x, int p, int q) {
  const int n = p + q - 1;
  double sum = 0;
  for (int j = p; j <= n; ++j) sum += binomial(n, j) * std::pow(x, j) * std::pow(1 - x, n - j);
  return sum;
}

double factorial(int n) { return n <= 1 ? 1 : n * factorial(n - 1); }

}  // namespace

TEST_CASE("ln_gamma known values") {
  CHECK(ln_gamma(1.0) == 0.0);
  CHECK(ln_gamma(2.0) == 0.0);
  CHECK(ln_gamma(5.0) == doctest::Approx(std::log(24.0)).epsilon(1e-14));
  CHECK(std::abs(ln_gamma(0.5) - 0.5 * std::log(std::numbers::pi)) <= 1e-12);
  CHECK(std::abs(ln_gamma(0.5) - 0.5723649429247001) <= 1e-12);
}

TEST_CASE("ln_gamma agrees with the C library on [1e-6, 1e6]") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> exponent(-6, 6);
  for (int i = 0; i < 2000; ++i) {
    const double x = std::pow(10.0, exponent(gen));
    const double want = static_cast<double>(std::lgamma(static_cast<long double>(x)));
    const double got = ln_gamma(x);
    CAPTURE(x);
    if (std::abs(want) <= 1)
      CHECK(std::abs(got - want) <= 1e-12);
    else
      CHECK(std::abs(got - want) <= 1e-13 * std::abs(want));
  }
}

TEST_CASE("ln_gamma recurrence on [0.5, 100]") {
  for (double x = 0.5; x <= 100; x += 0.37)
    CHECK(std::abs(ln_gamma(x + 1) - ln_gamma(x) - std::log(x)) <= 1e-11);
}

TEST_CASE("ln_gamma rejects nonpositive arguments") {
  CHECK_THROWS_AS(ln_gamma(0.0), DomainError);
  CHECK_THROWS_AS(ln_gamma(-1.5), DomainError);
  CHECK_THROWS_AS(ln_gamma(std::nan("")), DomainError);
}

TEST_CASE("beta_function") {
  CHECK(beta_function(1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(beta_function(2.0, 3.0) == doctest::Approx(factorial(1) * factorial(2) / factorial(4)).epsilon(1e-13));
  CHECK(beta_function(0.5, 0.5) == doctest::Approx(std::numbers::pi).epsilon(1e-13));
  CHECK_THROWS_AS(beta_function(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(beta_function(1.0, -2.0), DomainError);

  // Against direct quadrature of the integrand.
  for (const auto [p, q] : {std::pair{1.5, 2.5}, std::pair{3.0, 7.0}, std::pair{2.2, 1.1}}) {
    const auto r = integrate([&](double u) { return std::pow(u, p - 1) * std::pow(1 - u, q - 1); }, 0.0, 1.0, 1e-14);
    CHECK(beta_function(p, q) == doctest::Approx(r.value).epsilon(1e-10));
  }
}

TEST_CASE("reg_inc_beta examples") {
  CHECK(reg_inc_beta(0.0, 2.0, 3.0) == 0.0);
  CHECK(reg_inc_beta(1.0, 2.0, 3.0) == 1.0);
  CHECK(std::abs(reg_inc_beta(0.5, 3.0, 3.0) - 0.5) <= 1e-12);
  CHECK(std::abs(reg_inc_beta(0.25, 2.0, 3.0) - 0.26171875) <= 1e-12);
  CHECK(std::abs(binomial_tail(0.25, 2, 3) - 0.26171875) <= 1e-15);
}

TEST_CASE("reg_inc_beta endpoints are exact") {
  for (const double p : {0.1, 0.5, 1.0, 3.7, 50.0})
    for (const double q : {0.2, 1.0, 2.5, 80.0}) {
      CHECK(reg_inc_beta(0.0, p, q) == 0.0);
      CHECK(reg_inc_beta(1.0, p, q) == 1.0);
    }
}

TEST_CASE("reg_inc_beta rejects invalid input") {
  CHECK_THROWS_AS(reg_inc_beta(-0.1, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(reg_inc_beta(1.1, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(reg_inc_beta(0.5, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(reg_inc_beta(0.5, 1.0, -1.0), DomainError);
}

TEST_CASE("reg_inc_beta symmetry on random points") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> unit(0, 1);
  std::uniform_real_distribution<double> shape(-1, 1.5);
  for (int i = 0; i < 100; ++i) {
    const double x = unit(gen);
    const double p = std::pow(10.0, shape(gen));
    const double q = std::pow(10.0, shape(gen));
    CAPTURE(x);
    CAPTURE(p);
    CAPTURE(q);
    CHECK(std::abs(reg_inc_beta(x, p, q) + reg_inc_beta(1 - x, q, p) - 1) <= 1e-12);
  }
}

TEST_CASE("reg_inc_beta is monotone in x") {
  for (const auto [p, q] : {std::pair{0.3, 0.7}, std::pair{2.0, 5.0}, std::pair{30.0, 0.5}, std::pair{1.0, 1.0}}) {
    double previous = 0;
    for (int i = 0; i <= 1000; ++i) {
      const double value = reg_inc_beta(i / 1000.0, p, q);
      CHECK(value >= previous);
      previous = value;
    }
  }
}

TEST_CASE("reg_inc_beta matches binomial sums for integer shapes") {
  for (int p = 1; p <= 6; ++p)
    for (int q = 1; q <= 6; ++q)
      for (int i = 0; i <= 40; ++i) {
        const double x = i / 40.0;
        CHECK(std::abs(reg_inc_beta(x, double(p), double(q)) - binomial_tail(x, p, q)) <= 1e-10);
      }
}

TEST_CASE("reg_inc_beta against quadrature for fractional shapes") {
  for (const auto [p, q] : {std::pair{1.5, 2.5}, std::pair{4.2, 1.3}})
    for (const double x : {0.1, 0.45, 0.8}) {
      const auto r = integrate([&](double u) { return std::pow(u, p - 1) * std::pow(1 - u, q - 1); }, 0.0, x, 1e-15);
      CHECK(std::abs(reg_inc_beta(x, p, q) - r.value / beta_function(p, q)) <= 1e-10);
    }
}

TEST_CASE("special functions work for float and long double") {
  CHECK(reg_inc_beta(0.25f, 2.0f, 3.0f) == doctest::Approx(0.26171875).epsilon(1e-5));
  CHECK(std::abs(ln_gamma(0.5L) - 0.5L * std::log(std::numbers::pi_v<long double>)) <= 1e-15L);
}

TEST_CASE("gauss_legendre integrates polynomials exactly") {
  for (int n = 1; n <= 10; ++n) {
    const auto rule = gauss_legendre(n);
    CHECK(rule.weights.sum() == doctest::Approx(2.0).epsilon(1e-14));
    for (int d = 0; d <= 2 * n - 1; ++d) {
      double s = 0;
      for (int i = 0; i < n; ++i) s += rule.weights[i] * std::pow(rule.nodes[i], d);
      const double exact = d % 2 ? 0.0 : 2.0 / (d + 1);
      CHECK(std::abs(s - exact) <= 1e-14);
    }
  }
}
