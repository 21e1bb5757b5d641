#pragma once

#include <cmath>
#include <concepts>

#include "elemodds/error.hpp"

namespace elemodds {

enum class Degree { lower, higher };

/// Constants of the a priori H1 error bounds for two element degrees
/// k1 < k2:  ||u_h - u||_1 <= C_k h^k |u|_{k+1}.
///
/// C_k and the semi-norms are not observable in practice; the model lets a
/// simulation posit them so the bounds and the critical mesh size can be
/// computed.
template <std::floating_point Scalar>
class BoundModel {
 public:
  BoundModel(int k1, int k2, Scalar c_k1, Scalar c_k2, Scalar s_k1, Scalar s_k2)
      : k1_(k1), k2_(k2), c_k1_(c_k1), c_k2_(c_k2), s_k1_(s_k1), s_k2_(s_k2) {
    if (k1 < 1 || k2 <= k1) throw DomainError("BoundModel: need 1 <= k1 < k2");
    if (!(c_k1 > 0) || !(c_k2 > 0) || !(s_k1 > 0) || !(s_k2 > 0))
      throw DomainError("BoundModel: constants must be strictly positive");
  }

  [[nodiscard]] int k1() const noexcept { return k1_; }
  [[nodiscard]] int k2() const noexcept { return k2_; }
  [[nodiscard]] int delta() const noexcept { return k2_ - k1_; }
  [[nodiscard]] Scalar c_k1() const noexcept { return c_k1_; }
  [[nodiscard]] Scalar c_k2() const noexcept { return c_k2_; }
  [[nodiscard]] Scalar s_k1() const noexcept { return s_k1_; }
  [[nodiscard]] Scalar s_k2() const noexcept { return s_k2_; }

  /// Model with the given degrees whose critical mesh size is `h_star`
  /// (C_k1 = s_k1 = C_k2 = 1).
  static BoundModel with_h_star(int k1, int k2, Scalar h_star) {
    if (!(h_star > 0)) throw DomainError("BoundModel: h_star must be positive");
    return BoundModel(k1, k2, 1, 1, 1, std::pow(h_star, -Scalar(k2 - k1)));
  }

 private:
  int k1_;
  int k2_;
  Scalar c_k1_;
  Scalar c_k2_;
  Scalar s_k1_;
  Scalar s_k2_;
};

/// Error-bound endpoint beta_k = C_k h^k |u|_{k+1} for the selected degree.
template <std::floating_point Scalar>
Scalar beta_k(const BoundModel<Scalar>& model, Degree which, Scalar h) {
  if (!(h > 0)) throw DomainError("beta_k: mesh size must be positive");
  if (which == Degree::lower) return model.c_k1() * std::pow(h, model.k1()) * model.s_k1();
  return model.c_k2() * std::pow(h, model.k2()) * model.s_k2();
}

/// Critical mesh size where both error bounds coincide.
template <std::floating_point Scalar>
Scalar h_star(const BoundModel<Scalar>& model) {
  const Scalar ratio = (model.c_k1() * model.s_k1()) / (model.c_k2() * model.s_k2());
  return std::pow(ratio, Scalar(1) / Scalar(model.delta()));
}

}  // namespace elemodds
