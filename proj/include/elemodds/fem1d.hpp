#pragma once

// Lagrange P_k finite elements (k = 1..4) for -u'' = f on (0, 1) with
// Dirichlet data taken from a manufactured exact solution.

#include <Eigen/Core>

#include <functional>
#include <span>
#include <vector>

#include "elemodds/rng.hpp"

namespace elemodds {

/// Exact solution sample: u(x), u'(x) and the source f(x) = -u''(x).
struct PointValue {
  double value;
  double derivative;
  double source;
};

using ExactField = std::function<PointValue(double)>;

/// Runge-type manufactured solution u(x) = 1 / (1 + alpha (x - center)^2)
/// approximated with elements of the given degree.
class RungeProblem {
 public:
  RungeProblem(double alpha, int degree, double center = 0.5);

  [[nodiscard]] double alpha() const noexcept { return alpha_; }
  [[nodiscard]] double center() const noexcept { return center_; }
  [[nodiscard]] int degree() const noexcept { return degree_; }

  [[nodiscard]] PointValue exact(double x) const;
  [[nodiscard]] ExactField field() const;

  /// Widest quadrature sub-cell that still resolves the peak, whose width
  /// scales like 1/sqrt(alpha).
  [[nodiscard]] double quadrature_width() const noexcept;

 private:
  double alpha_;
  double center_;
  int degree_;
};

PointValue exact_solution(const RungeProblem& problem, double x);

/// Partition of [0, 1] by strictly increasing nodes.
class Mesh1D {
 public:
  explicit Mesh1D(std::vector<double> nodes);

  static Mesh1D uniform(int elements);

  [[nodiscard]] std::span<const double> nodes() const noexcept { return nodes_; }
  [[nodiscard]] int num_elements() const noexcept { return static_cast<int>(nodes_.size()) - 1; }
  [[nodiscard]] double h_max() const noexcept { return h_max_; }

 private:
  std::vector<double> nodes_;
  double h_max_;
};

/// ceil(1/h_target) elements; interior node i sits at i/N + eta_i with
/// eta_i ~ U(-jitter/N, jitter/N).
Mesh1D random_mesh(double h_target, double jitter, Rng& rng);

struct FemSolution {
  Mesh1D mesh;
  int degree;
  /// Values at the global Lagrange nodes, element e local node j at e*k + j.
  Eigen::VectorXd coefficients;

  [[nodiscard]] double value(double x) const;
  [[nodiscard]] double derivative(double x) const;
};

inline constexpr double kDefaultQuadratureWidth = 1.0 / 64.0;

/// Galerkin solution; the load vector uses degree + 2 Gauss points on
/// sub-cells no wider than `quadrature_width`.
FemSolution assemble_and_solve(const ExactField& exact, int degree, const Mesh1D& mesh,
                               double quadrature_width = kDefaultQuadratureWidth);
FemSolution assemble_and_solve(const RungeProblem& problem, const Mesh1D& mesh);

/// Gauss points per sub-cell used by h1_error when none are requested.
int default_error_points(int degree);

/// Full H1 norm of u_h - u. Each element is split into sub-cells no wider
/// than `quadrature_width`, each integrated with `points` Gauss points (0
/// picks default_error_points).
double h1_error(const ExactField& exact, const FemSolution& solution, int points = 0,
                double quadrature_width = kDefaultQuadratureWidth);
double h1_error(const RungeProblem& problem, const FemSolution& solution, int points = 0);

/// max_i |l(phi_i) - a(u_h, phi_i)| over interior basis functions phi_i.
double galerkin_residual(const ExactField& exact, const FemSolution& solution,
                         double quadrature_width = kDefaultQuadratureWidth);

/// Least-squares slope of log(error) against log(h) on uniform meshes with
/// N = round(1/h) elements.
double convergence_rate(const RungeProblem& problem, std::span<const double> mesh_sizes);

/// Slope of the least-squares line through (log x_i, log y_i).
double log_log_slope(std::span<const double> x, std::span<const double> y);

}  // namespace elemodds
