#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <concepts>
#include <utility>

#include "elemodds/error.hpp"

namespace elemodds {

/// Gauss-Legendre rule on [-1, 1].
template <std::floating_point Scalar>
struct GaussRule {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> nodes;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> weights;

  [[nodiscard]] Eigen::Index size() const { return nodes.size(); }
};

/// n-point Gauss-Legendre rule, exact for polynomials of degree 2n - 1.
///
/// Nodes come from the symmetric Jacobi matrix (Golub-Welsch) and are then
/// polished by Newton steps on P_n so weights are accurate to rounding.
template <std::floating_point Scalar = double>
GaussRule<Scalar> gauss_legendre(int n) {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  if (n < 1) throw DomainError("gauss_legendre: need at least one point");

  Matrix jacobi = Matrix::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    const Scalar k = i;
    const Scalar b = k / std::sqrt(4 * k * k - 1);
    jacobi(i, i - 1) = b;
    jacobi(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(jacobi, Eigen::EigenvaluesOnly);
  Vector nodes = solver.eigenvalues();
  Vector weights(n);

  // P_n(x) and P_n'(x) by the three-term recurrence.
  auto legendre = [n](Scalar x) {
    Scalar p0 = 1;
    Scalar p1 = x;
    for (int k = 2; k <= n; ++k) {
      const Scalar p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    if (n == 1) return std::pair<Scalar, Scalar>{x, Scalar(1)};
    const Scalar dp = n * (x * p1 - p0) / (x * x - 1);
    return std::pair<Scalar, Scalar>{p1, dp};
  };

  for (int i = 0; i < n; ++i) {
    Scalar x = nodes[i];
    for (int it = 0; it < 3; ++it) {
      const auto [p, dp] = legendre(x);
      x -= p / dp;
    }
    const auto [p, dp] = legendre(x);
    nodes[i] = x;
    weights[i] = 2 / ((1 - x * x) * dp * dp);
  }
  return {std::move(nodes), std::move(weights)};
}

/// Result of an adaptive integration.
template <std::floating_point Scalar>
struct IntegrationResult {
  Scalar value;
  Scalar error_estimate;
  int evaluations;
};

namespace detail {

inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <std::floating_point Scalar, class F>
std::pair<Scalar, Scalar> kronrod15(F& f, Scalar a, Scalar b) {
  const Scalar center = (a + b) / 2;
  const Scalar half = (b - a) / 2;
  const Scalar fc = f(center);
  Scalar kronrod = fc * Scalar(kKronrodWeights[7]);
  Scalar gauss = fc * Scalar(kGaussWeights[3]);
  for (int j = 0; j < 7; ++j) {
    const Scalar dx = half * Scalar(kKronrodNodes[j]);
    const Scalar sum = f(center - dx) + f(center + dx);
    kronrod += Scalar(kKronrodWeights[j]) * sum;
    if (j % 2 == 1) gauss += Scalar(kGaussWeights[j / 2]) * sum;
  }
  return {kronrod * half, std::abs((kronrod - gauss) * half)};
}

template <std::floating_point Scalar, class F>
void adaptive_step(F& f, Scalar a, Scalar b, Scalar whole, Scalar err, Scalar tol, int depth,
                   IntegrationResult<Scalar>& out) {
  if (err <= tol || depth >= 60) {
    out.value += whole;
    out.error_estimate += err;
    return;
  }
  const Scalar mid = (a + b) / 2;
  const auto [left, left_err] = kronrod15(f, a, mid);
  const auto [right, right_err] = kronrod15(f, mid, b);
  out.evaluations += 30;
  adaptive_step(f, a, mid, left, left_err, tol / 2, depth + 1, out);
  adaptive_step(f, mid, b, right, right_err, tol / 2, depth + 1, out);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod (7/15) integration of f over [a, b] to an
/// absolute tolerance.
template <std::floating_point Scalar, class F>
  requires std::invocable<F&, Scalar>
IntegrationResult<Scalar> integrate(F&& f, Scalar a, Scalar b, Scalar abs_tol) {
  IntegrationResult<Scalar> out{0, 0, 15};
  if (a == b) return out;
  const auto [whole, err] = detail::kronrod15(f, a, b);
  detail::adaptive_step(f, a, b, whole, err, abs_tol, 0, out);
  return out;
}

}  // namespace elemodds
