#include "elemodds/fem1d.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <string>

#include "elemodds/error.hpp"
#include "elemodds/quadrature.hpp"

namespace elemodds {

namespace {

constexpr int kMaxDegree = 4;

void require_degree(int degree) {
  if (degree < 1 || degree > kMaxDegree) throw DomainError("element degree must lie in [1, 4]");
}

// Equispaced Lagrange basis on the reference cell [0, 1].
struct ReferenceBasis {
  int degree;

  [[nodiscard]] double node(int i) const { return static_cast<double>(i) / degree; }

  [[nodiscard]] double value(int i, double xi) const {
    double v = 1;
    for (int m = 0; m <= degree; ++m)
      if (m != i) v *= (xi - node(m)) / (node(i) - node(m));
    return v;
  }

  [[nodiscard]] double derivative(int i, double xi) const {
    double sum = 0;
    for (int j = 0; j <= degree; ++j) {
      if (j == i) continue;
      double term = 1 / (node(i) - node(j));
      for (int m = 0; m <= degree; ++m)
        if (m != i && m != j) term *= (xi - node(m)) / (node(i) - node(m));
      sum += term;
    }
    return sum;
  }
};

// Quadrature points on an element [a, b] mapped to the reference cell:
// composite Gauss rule over sub-cells of width at most max_width.
struct CellPoint {
  double xi;      // reference coordinate
  double x;       // physical coordinate
  double weight;  // physical weight
};

std::vector<CellPoint> cell_points(double a, double b, const GaussRule<double>& rule, double max_width) {
  const double length = b - a;
  const int subcells = std::max(1, static_cast<int>(std::ceil(length / max_width - 1e-12)));
  std::vector<CellPoint> points;
  points.reserve(static_cast<std::size_t>(subcells * rule.size()));
  for (int s = 0; s < subcells; ++s) {
    const double lo = static_cast<double>(s) / subcells;
    const double hi = static_cast<double>(s + 1) / subcells;
    for (Eigen::Index g = 0; g < rule.size(); ++g) {
      const double xi = lo + (hi - lo) * (rule.nodes[g] + 1) / 2;
      const double w = (hi - lo) / 2 * rule.weights[g] * length;
      points.push_back({xi, a + length * xi, w});
    }
  }
  return points;
}

int element_of(std::span<const double> nodes, double x) {
  const auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
  const auto e = static_cast<int>(std::distance(nodes.begin(), it)) - 1;
  return std::clamp(e, 0, static_cast<int>(nodes.size()) - 2);
}

}  // namespace

RungeProblem::RungeProblem(double alpha, int degree, double center)
    : alpha_(alpha), center_(center), degree_(degree) {
  if (!(alpha > 0) || !std::isfinite(alpha)) throw DomainError("RungeProblem: alpha must be positive");
  if (!(center > 0 && center < 1)) throw DomainError("RungeProblem: center must lie in (0, 1)");
  require_degree(degree);
}

PointValue RungeProblem::exact(double x) const {
  const double d = x - center_;
  const double denom = 1 + alpha_ * d * d;
  const double value = 1 / denom;
  const double derivative = -2 * alpha_ * d / (denom * denom);
  const double source = (2 * alpha_ - 6 * alpha_ * alpha_ * d * d) / (denom * denom * denom);
  return {value, derivative, source};
}

double RungeProblem::quadrature_width() const noexcept {
  return std::min(kDefaultQuadratureWidth, 0.25 / std::sqrt(alpha_));
}

ExactField RungeProblem::field() const {
  return [problem = *this](double x) { return problem.exact(x); };
}

PointValue exact_solution(const RungeProblem& problem, double x) {
  if (!(x >= 0 && x <= 1)) throw DomainError("exact_solution: x must lie in [0, 1]");
  return problem.exact(x);
}

Mesh1D::Mesh1D(std::vector<double> nodes) : nodes_(std::move(nodes)), h_max_(0) {
  if (nodes_.size() < 2) throw DomainError("Mesh1D: need at least two nodes");
  if (nodes_.front() != 0.0 || nodes_.back() != 1.0) throw DomainError("Mesh1D: endpoints must be 0 and 1");
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    const double width = nodes_[i] - nodes_[i - 1];
    if (!(width > 0)) throw DomainError("Mesh1D: nodes must be strictly increasing");
    h_max_ = std::max(h_max_, width);
  }
}

Mesh1D Mesh1D::uniform(int elements) {
  if (elements < 1) throw DomainError("Mesh1D::uniform: need at least one element");
  std::vector<double> nodes(static_cast<std::size_t>(elements) + 1);
  for (int i = 0; i <= elements; ++i) nodes[static_cast<std::size_t>(i)] = static_cast<double>(i) / elements;
  return Mesh1D(std::move(nodes));
}

Mesh1D random_mesh(double h_target, double jitter, Rng& rng) {
  if (!(h_target > 0 && h_target < 1)) throw DomainError("random_mesh: h_target must lie in (0, 1)");
  if (!(jitter >= 0 && jitter <= 0.49)) throw DomainError("random_mesh: jitter must lie in [0, 0.49]");
  // The 1e-9 slack keeps exact reciprocals such as h = 1/3 at N = 3.
  const int n = static_cast<int>(std::ceil(1 / h_target - 1e-9));
  std::vector<double> nodes(static_cast<std::size_t>(n) + 1);
  nodes.front() = 0;
  nodes.back() = 1;
  for (int i = 1; i < n; ++i) {
    const double eta = jitter * (2 * rng.uniform() - 1) / n;
    nodes[static_cast<std::size_t>(i)] = static_cast<double>(i) / n + eta;
  }
  return Mesh1D(std::move(nodes));
}

double FemSolution::value(double x) const {
  const auto nodes = mesh.nodes();
  const int e = element_of(nodes, x);
  const double a = nodes[static_cast<std::size_t>(e)];
  const double b = nodes[static_cast<std::size_t>(e) + 1];
  const ReferenceBasis basis{degree};
  const double xi = (x - a) / (b - a);
  double v = 0;
  for (int j = 0; j <= degree; ++j) v += coefficients[e * degree + j] * basis.value(j, xi);
  return v;
}

double FemSolution::derivative(double x) const {
  const auto nodes = mesh.nodes();
  const int e = element_of(nodes, x);
  const double a = nodes[static_cast<std::size_t>(e)];
  const double b = nodes[static_cast<std::size_t>(e) + 1];
  const ReferenceBasis basis{degree};
  const double xi = (x - a) / (b - a);
  double v = 0;
  for (int j = 0; j <= degree; ++j) v += coefficients[e * degree + j] * basis.derivative(j, xi);
  return v / (b - a);
}

namespace {

// Element stiffness and load, reused by the solver and the residual check.
struct ElementSystem {
  Eigen::MatrixXd stiffness;
  Eigen::VectorXd load;
};

ElementSystem element_system(const ExactField& exact, int degree, double a, double b,
                             const GaussRule<double>& stiffness_rule, const GaussRule<double>& load_rule,
                             double quadrature_width) {
  const ReferenceBasis basis{degree};
  const int n = degree + 1;
  const double length = b - a;
  ElementSystem sys{Eigen::MatrixXd::Zero(n, n), Eigen::VectorXd::Zero(n)};

  for (Eigen::Index g = 0; g < stiffness_rule.size(); ++g) {
    const double xi = (stiffness_rule.nodes[g] + 1) / 2;
    const double w = stiffness_rule.weights[g] / 2;
    Eigen::VectorXd grad(n);
    for (int i = 0; i < n; ++i) grad[i] = basis.derivative(i, xi);
    sys.stiffness.noalias() += (w / length) * grad * grad.transpose();
  }
  for (const auto& pt : cell_points(a, b, load_rule, quadrature_width)) {
    const double f = exact(pt.x).source;
    for (int i = 0; i < n; ++i) sys.load[i] += pt.weight * f * basis.value(i, pt.xi);
  }
  return sys;
}

}  // namespace

FemSolution assemble_and_solve(const ExactField& exact, int degree, const Mesh1D& mesh,
                               double quadrature_width) {
  require_degree(degree);
  if (!(quadrature_width > 0)) throw DomainError("assemble_and_solve: quadrature width must be positive");
  const auto nodes = mesh.nodes();
  const int elements = mesh.num_elements();
  const int total = elements * degree + 1;
  const int interior = total - 2;

  const auto stiffness_rule = gauss_legendre(degree + 1);
  const auto load_rule = gauss_legendre(degree + 2);

  Eigen::VectorXd coefficients = Eigen::VectorXd::Zero(total);
  coefficients[0] = exact(0.0).value;
  coefficients[total - 1] = exact(1.0).value;
  if (interior == 0) return {mesh, degree, std::move(coefficients)};

  // Unknowns are the interior global nodes 1..total-2, shifted down by one.
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(elements) * (degree + 1) * (degree + 1));
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(interior);

  for (int e = 0; e < elements; ++e) {
    const auto sys = element_system(exact, degree, nodes[static_cast<std::size_t>(e)],
                                    nodes[static_cast<std::size_t>(e) + 1], stiffness_rule, load_rule,
                                    quadrature_width);
    for (int i = 0; i <= degree; ++i) {
      const int gi = e * degree + i;
      if (gi == 0 || gi == total - 1) continue;
      rhs[gi - 1] += sys.load[i];
      for (int j = 0; j <= degree; ++j) {
        const int gj = e * degree + j;
        if (gj == 0 || gj == total - 1)
          rhs[gi - 1] -= sys.stiffness(i, j) * coefficients[gj];
        else
          triplets.emplace_back(gi - 1, gj - 1, sys.stiffness(i, j));
      }
    }
  }

  Eigen::SparseMatrix<double> matrix(interior, interior);
  matrix.setFromTriplets(triplets.begin(), triplets.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(matrix);
  if (solver.info() != Eigen::Success)
    throw InternalError("assemble_and_solve: stiffness factorization failed on " + std::to_string(elements) +
                        " elements");
  coefficients.segment(1, interior) = solver.solve(rhs);
  if (solver.info() != Eigen::Success || !coefficients.allFinite())
    throw InternalError("assemble_and_solve: linear solve failed");
  return {mesh, degree, std::move(coefficients)};
}

FemSolution assemble_and_solve(const RungeProblem& problem, const Mesh1D& mesh) {
  return assemble_and_solve(problem.field(), problem.degree(), mesh, problem.quadrature_width());
}

int default_error_points(int degree) { return degree + 3; }

double h1_error(const ExactField& exact, const FemSolution& solution, int points, double quadrature_width) {
  require_degree(solution.degree);
  if (!(quadrature_width > 0)) throw DomainError("h1_error: quadrature width must be positive");
  const int degree = solution.degree;
  const auto rule = gauss_legendre(points > 0 ? points : default_error_points(degree));
  const ReferenceBasis basis{degree};
  const auto nodes = solution.mesh.nodes();

  double sum = 0;
  for (int e = 0; e < solution.mesh.num_elements(); ++e) {
    const double a = nodes[static_cast<std::size_t>(e)];
    const double b = nodes[static_cast<std::size_t>(e) + 1];
    const auto local = solution.coefficients.segment(e * degree, degree + 1);
    for (const auto& pt : cell_points(a, b, rule, quadrature_width)) {
      double uh = 0;
      double duh = 0;
      for (int j = 0; j <= degree; ++j) {
        uh += local[j] * basis.value(j, pt.xi);
        duh += local[j] * basis.derivative(j, pt.xi);
      }
      duh /= (b - a);
      const auto u = exact(pt.x);
      sum += pt.weight * ((uh - u.value) * (uh - u.value) + (duh - u.derivative) * (duh - u.derivative));
    }
  }
  return std::sqrt(sum);
}

double h1_error(const RungeProblem& problem, const FemSolution& solution, int points) {
  return h1_error(problem.field(), solution, points, problem.quadrature_width());
}

double galerkin_residual(const ExactField& exact, const FemSolution& solution, double quadrature_width) {
  const int degree = solution.degree;
  const auto nodes = solution.mesh.nodes();
  const int elements = solution.mesh.num_elements();
  const int total = elements * degree + 1;
  const auto stiffness_rule = gauss_legendre(degree + 1);
  const auto load_rule = gauss_legendre(degree + 2);

  Eigen::VectorXd residual = Eigen::VectorXd::Zero(total);
  for (int e = 0; e < elements; ++e) {
    const auto sys = element_system(exact, degree, nodes[static_cast<std::size_t>(e)],
                                    nodes[static_cast<std::size_t>(e) + 1], stiffness_rule, load_rule,
                                    quadrature_width);
    const auto local = solution.coefficients.segment(e * degree, degree + 1);
    residual.segment(e * degree, degree + 1) += sys.load - sys.stiffness * local;
  }
  if (total <= 2) return 0;
  return residual.segment(1, total - 2).cwiseAbs().maxCoeff();
}

double log_log_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DomainError("log_log_slope: size mismatch");
  if (x.size() < 3) throw InsufficientDataError("log_log_slope: need at least 3 points");
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd design(n, 2);
  Eigen::VectorXd target(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(x[static_cast<std::size_t>(i)] > 0) || !(y[static_cast<std::size_t>(i)] > 0))
      throw DomainError("log_log_slope: values must be positive");
    design(i, 0) = 1;
    design(i, 1) = std::log(x[static_cast<std::size_t>(i)]);
    target[i] = std::log(y[static_cast<std::size_t>(i)]);
  }
  const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(target);
  return coef[1];
}

double convergence_rate(const RungeProblem& problem, std::span<const double> mesh_sizes) {
  if (mesh_sizes.size() < 3) throw InsufficientDataError("convergence_rate: need at least 3 mesh sizes");
  std::vector<double> hs;
  std::vector<double> errors;
  for (const double h : mesh_sizes) {
    if (!(h > 0 && h <= 1)) throw DomainError("convergence_rate: mesh sizes must lie in (0, 1]");
    const auto mesh = Mesh1D::uniform(static_cast<int>(std::lround(1 / h)));
    const auto solution = assemble_and_solve(problem, mesh);
    hs.push_back(mesh.h_max());
    errors.push_back(h1_error(problem, solution));
  }
  return log_log_slope(hs, errors);
}

}  // namespace elemodds
