#pragma once

// Probability laws for the event "the P_k2 error is not larger than the P_k1
// error" as a function of the mesh size h.

#include <cmath>
#include <concepts>
#include <optional>
#include <type_traits>
#include <variant>

#include "elemodds/bound_model.hpp"
#include "elemodds/error.hpp"
#include "elemodds/quadrature.hpp"
#include "elemodds/special.hpp"

namespace elemodds {

/// Step law: 1 below h*, 0 above, undefined at h*.
template <std::floating_point Scalar>
struct TwoStep {
  Scalar h_star;
};

/// Law of two independent uniform error variables; delta = k2 - k1.
template <std::floating_point Scalar>
struct Sigmoid {
  Scalar h_star;
  int delta;
};

/// Survival function of a generalized Beta prime variable H.
template <std::floating_point Scalar>
struct GeneralizedBetaPrime {
  Scalar p;
  Scalar q;
  int delta;
  Scalar h_star;
};

template <std::floating_point Scalar>
using LawParams = std::variant<TwoStep<Scalar>, Sigmoid<Scalar>, GeneralizedBetaPrime<Scalar>>;

/// Support endpoints of the error difference Z = X^(k2) - X^(k1), which
/// lives on [-beta_lo, beta_hi].
template <std::floating_point Scalar>
struct BetaPair {
  Scalar beta_lo;
  Scalar beta_hi;
};

template <std::floating_point Scalar>
void validate(const TwoStep<Scalar>& law) {
  if (!(law.h_star > 0)) throw DomainError("TwoStep: h_star must be positive");
}

template <std::floating_point Scalar>
void validate(const Sigmoid<Scalar>& law) {
  if (!(law.h_star > 0)) throw DomainError("Sigmoid: h_star must be positive");
  if (law.delta < 1) throw DomainError("Sigmoid: delta must be >= 1");
}

template <std::floating_point Scalar>
void validate(const GeneralizedBetaPrime<Scalar>& law) {
  if (!(law.h_star > 0)) throw DomainError("GeneralizedBetaPrime: h_star must be positive");
  if (law.delta < 1) throw DomainError("GeneralizedBetaPrime: delta must be >= 1");
  if (!(law.p > 0) || !(law.q > 0)) throw DomainError("GeneralizedBetaPrime: p and q must be positive");
}

template <std::floating_point Scalar>
void validate(const BetaPair<Scalar>& pair) {
  if (!(pair.beta_lo > 0) || !(pair.beta_hi > 0)) throw DomainError("BetaPair: bounds must be positive");
}

template <std::floating_point Scalar>
void validate(const LawParams<Scalar>& law) {
  std::visit([](const auto& l) { validate(l); }, law);
}

namespace detail {
template <std::floating_point Scalar>
void require_mesh_size(Scalar h) {
  if (!(h > 0) || !std::isfinite(h)) throw DomainError("mesh size h must be positive and finite");
}
}  // namespace detail

/// Error bounds of both degrees at mesh size h.
template <std::floating_point Scalar>
BetaPair<Scalar> beta_pair(const BoundModel<Scalar>& model, Scalar h) {
  return {beta_k(model, Degree::lower, h), beta_k(model, Degree::higher, h)};
}

/// 1 for h < h*, 0 for h > h*; std::nullopt at h == h*, where the law is
/// not defined.
template <std::floating_point Scalar>
std::optional<Scalar> prob_two_step(const TwoStep<Scalar>& law, Scalar h) {
  validate(law);
  detail::require_mesh_size(h);
  if (h < law.h_star) return Scalar(1);
  if (h > law.h_star) return Scalar(0);
  return std::nullopt;
}

template <std::floating_point Scalar>
Scalar prob_sigmoid(const Sigmoid<Scalar>& law, Scalar h) {
  validate(law);
  detail::require_mesh_size(h);
  if (h <= law.h_star) return 1 - Scalar(0.5) * std::pow(h / law.h_star, law.delta);
  return Scalar(0.5) * std::pow(law.h_star / h, law.delta);
}

/// P(h) = I_w(p, q) with w = 1 / (1 + (h/h*)^delta).
template <std::floating_point Scalar>
Scalar prob_gbp(const GeneralizedBetaPrime<Scalar>& law, Scalar h) {
  validate(law);
  detail::require_mesh_size(h);
  const Scalar r = std::pow(h / law.h_star, law.delta);
  if (std::isinf(r)) return 0;
  return reg_inc_beta_xy(1 / (1 + r), r / (1 + r), law.p, law.q);
}

/// 1 - P(h), evaluated without cancellation.
template <std::floating_point Scalar>
Scalar prob_gbp_complement(const GeneralizedBetaPrime<Scalar>& law, Scalar h) {
  validate(law);
  detail::require_mesh_size(h);
  const Scalar r = std::pow(h / law.h_star, law.delta);
  if (std::isinf(r)) return 1;
  return reg_inc_beta_xy(r / (1 + r), 1 / (1 + r), law.q, law.p);
}

/// Generalized Beta prime density of H at s > 0.
template <std::floating_point Scalar>
Scalar density_f_H(const GeneralizedBetaPrime<Scalar>& law, Scalar s) {
  validate(law);
  if (!(s > 0)) throw DomainError("density_f_H: s must be positive");
  const Scalar delta = law.delta;
  const Scalar log_ratio = std::log(s / law.h_star);
  const Scalar log_density = -ln_beta_function(law.p, law.q) + std::log(delta / law.h_star) +
                             (law.q * delta - 1) * log_ratio -
                             (law.p + law.q) * std::log1p(std::exp(delta * log_ratio));
  return std::exp(log_density);
}

/// Density of Z = -beta_lo + (beta_lo + beta_hi) X with X ~ Beta(p, q).
template <std::floating_point Scalar>
Scalar density_f_Z(const BetaPair<Scalar>& pair, Scalar p, Scalar q, Scalar z) {
  validate(pair);
  if (!(p > 0) || !(q > 0)) throw DomainError("density_f_Z: p and q must be positive");
  const Scalar lo = pair.beta_lo;
  const Scalar hi = pair.beta_hi;
  if (z < -lo || z > hi) return 0;
  const Scalar log_scale = -ln_beta_function(p, q) + (p - 1) * std::log(lo) + (q - 1) * std::log(hi) -
                           (p + q - 1) * std::log(lo + hi);
  return std::exp(log_scale) * std::pow(1 + z / lo, p - 1) * std::pow(1 - z / hi, q - 1);
}

/// F_Z(0) = Prob{Z <= 0}.
template <std::floating_point Scalar>
Scalar cdf_Z_at_zero(const BetaPair<Scalar>& pair, Scalar p, Scalar q) {
  validate(pair);
  const Scalar total = pair.beta_lo + pair.beta_hi;
  return reg_inc_beta_xy(pair.beta_lo / total, pair.beta_hi / total, p, q);
}

/// Law value at h; std::nullopt only for the step law at its threshold.
template <std::floating_point Scalar>
std::optional<Scalar> evaluate(const LawParams<Scalar>& law, Scalar h) {
  return std::visit(
      [h](const auto& l) -> std::optional<Scalar> {
        using Law = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<Law, TwoStep<Scalar>>)
          return prob_two_step(l, h);
        else if constexpr (std::is_same_v<Law, Sigmoid<Scalar>>)
          return prob_sigmoid(l, h);
        else
          return prob_gbp(l, h);
      },
      law);
}

// Quadrature of the density, independent of the incomplete-beta route. Both
// integrate in t = ln s, where the integrand f_H(e^t) e^t decays
// exponentially in both directions.

namespace detail {

template <std::floating_point Scalar>
auto log_space_density(const GeneralizedBetaPrime<Scalar>& law) {
  return [law](Scalar t) {
    const Scalar s = std::exp(t);
    return density_f_H(law, s) * s;
  };
}

}  // namespace detail

/// Prob{H >= h} = int_h^inf f_H(s) ds by adaptive quadrature.
template <std::floating_point Scalar>
Scalar gbp_tail_by_quadrature(const GeneralizedBetaPrime<Scalar>& law, Scalar h,
                              Scalar abs_tol = Scalar(1e-13)) {
  validate(law);
  detail::require_mesh_size(h);
  // Beyond S the tail is below B(p,q)^-1 (S/h*)^(-p delta) / p.
  const Scalar log_b = ln_beta_function(law.p, law.q);
  const Scalar log_cut = -(std::log(law.p) + log_b + std::log(Scalar(1e-17))) / (law.p * law.delta);
  const Scalar t0 = std::log(h);
  const Scalar t1 = std::max(t0, std::log(law.h_star) + log_cut) + 1;
  return integrate(detail::log_space_density(law), t0, t1, abs_tol).value;
}

/// Prob{H <= h} = int_0^h f_H(s) ds by adaptive quadrature.
template <std::floating_point Scalar>
Scalar gbp_head_by_quadrature(const GeneralizedBetaPrime<Scalar>& law, Scalar h,
                              Scalar abs_tol = Scalar(1e-13)) {
  validate(law);
  detail::require_mesh_size(h);
  // Below s the head mass is below B(p,q)^-1 (s/h*)^(q delta) / q.
  const Scalar log_b = ln_beta_function(law.p, law.q);
  const Scalar log_cut = (std::log(law.q) + log_b + std::log(Scalar(1e-17))) / (law.q * law.delta);
  const Scalar t1 = std::log(h);
  const Scalar t0 = std::min(t1, std::log(law.h_star) + log_cut) - 1;
  return integrate(detail::log_space_density(law), t0, t1, abs_tol).value;
}

}  // namespace elemodds
