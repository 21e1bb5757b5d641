#pragma once

// Log-gamma, Euler beta and the regularized incomplete beta function.
//
// All routines are templated on the floating-point type; the approximation
// constants are tuned for IEEE double, so long double gains range but not
// digits.

#include <array>
#include <cmath>
#include <concepts>
#include <limits>
#include <numbers>

#include "elemodds/error.hpp"

namespace elemodds {

namespace detail {

// Lanczos approximation, g = 7, n = 9.
inline constexpr double kLanczosG = 7.0;
inline constexpr std::array<double, 9> kLanczosCoefficients = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

inline constexpr int kBetaCfMaxIterations = 300;
inline constexpr double kBetaCfTolerance = 1e-15;

// Modified Lentz evaluation of the continued fraction for I_x(p, q).
template <std::floating_point Scalar>
Scalar beta_continued_fraction(Scalar x, Scalar p, Scalar q) {
  constexpr Scalar tiny = std::numeric_limits<Scalar>::min() / std::numeric_limits<Scalar>::epsilon();
  const Scalar qab = p + q;
  const Scalar qap = p + 1;
  const Scalar qam = p - 1;

  Scalar c = 1;
  Scalar d = 1 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1 / d;
  Scalar h = d;

  for (int m = 1; m <= kBetaCfMaxIterations; ++m) {
    const Scalar mm = m;
    const Scalar m2 = 2 * mm;

    Scalar aa = mm * (q - mm) * x / ((qam + m2) * (p + m2));
    d = 1 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1 / d;
    h *= d * c;

    aa = -(p + mm) * (qab + mm) * x / ((p + m2) * (qap + m2));
    d = 1 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1 / d;
    const Scalar del = d * c;
    h *= del;
    if (std::abs(del - 1) < Scalar(kBetaCfTolerance)) return h;
  }
  throw InternalError("reg_inc_beta: continued fraction did not converge within 300 iterations");
}

}  // namespace detail

/// ln Gamma(x) for x > 0.
template <std::floating_point Scalar>
Scalar ln_gamma(Scalar x) {
  if (!(x > 0) || !std::isfinite(x)) throw DomainError("ln_gamma: argument must be positive and finite");
  if (x == 1 || x == 2) return 0;
  // Shift small arguments up so the approximation never sees x < 1/2.
  if (x < Scalar(0.5)) return ln_gamma(x + 1) - std::log(x);

  const Scalar z = x - 1;
  Scalar series = Scalar(detail::kLanczosCoefficients[0]);
  for (std::size_t i = 1; i < detail::kLanczosCoefficients.size(); ++i)
    series += Scalar(detail::kLanczosCoefficients[i]) / (z + Scalar(i));
  const Scalar t = z + Scalar(detail::kLanczosG) + Scalar(0.5);
  const Scalar half_log_two_pi = Scalar(0.5) * std::log(2 * std::numbers::pi_v<Scalar>);
  return half_log_two_pi + (z + Scalar(0.5)) * std::log(t) - t + std::log(series);
}

/// ln B(p, q).
template <std::floating_point Scalar>
Scalar ln_beta_function(Scalar p, Scalar q) {
  if (!(p > 0) || !(q > 0)) throw DomainError("beta_function: shapes must be positive");
  return ln_gamma(p) + ln_gamma(q) - ln_gamma(p + q);
}

/// B(p, q) = Gamma(p) Gamma(q) / Gamma(p + q).
template <std::floating_point Scalar>
Scalar beta_function(Scalar p, Scalar q) {
  return std::exp(ln_beta_function(p, q));
}

/// I_x(p, q) where the caller supplies both x and y = 1 - x.
///
/// Passing y separately keeps full relative precision in whichever tail the
/// continued fraction is evaluated in; x + y must equal 1 up to rounding.
template <std::floating_point Scalar>
Scalar reg_inc_beta_xy(Scalar x, Scalar y, Scalar p, Scalar q) {
  if (!(p > 0) || !(q > 0) || !std::isfinite(p) || !std::isfinite(q))
    throw DomainError("reg_inc_beta: shapes must be positive and finite");
  if (!(x >= 0 && x <= 1) || !(y >= 0 && y <= 1))
    throw DomainError("reg_inc_beta: x must lie in [0, 1]");
  if (x == 0 || y == 1) return 0;
  if (y == 0 || x == 1) return 1;

  const Scalar log_front = p * std::log(x) + q * std::log(y) - ln_beta_function(p, q);
  const Scalar front = std::exp(log_front);
  if (x < (p + 1) / (p + q + 2)) return front * detail::beta_continued_fraction(x, p, q) / p;
  return 1 - front * detail::beta_continued_fraction(y, q, p) / q;
}

/// Regularized incomplete beta function I_x(p, q), the Beta(p, q) CDF.
template <std::floating_point Scalar>
Scalar reg_inc_beta(Scalar x, Scalar p, Scalar q) {
  if (!(x >= 0 && x <= 1)) throw DomainError("reg_inc_beta: x must lie in [0, 1]");
  return reg_inc_beta_xy(x, Scalar(1) - x, p, q);
}

}  // namespace elemodds
