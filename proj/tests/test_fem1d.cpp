#include <doctest.h>

#include <cmath>
#include <vector>

#include "elemodds/error.hpp"
#include "elemodds/fem1d.hpp"

using namespace elemodds;

namespace {

// u(x) = sum_j c_j x^j with f = -u''.
ExactField polynomial(std::vector<double> c) {
  return [c](double x) {
    PointValue v{0, 0, 0};
    for (std::size_t j = 0; j < c.size(); ++j) {
      v.value += c[j] * std::pow(x, double(j));
      if (j >= 1) v.derivative += c[j] * j * std::pow(x, double(j) - 1);
      if (j >= 2) v.source -= c[j] * j * (j - 1.0) * std::pow(x, double(j) - 2);
    }
    return v;
  };
}

double error_on_uniform(const RungeProblem& problem, int n) {
  return h1_error(problem, assemble_and_solve(problem, Mesh1D::uniform(n)));
}

}  // namespace

TEST_CASE("exact_solution") {
  const RungeProblem problem(100, 2);
  CHECK(exact_solution(problem, 0.5).value == 1.0);
  CHECK(exact_solution(problem, 0.5).derivative == 0.0);
  CHECK(exact_solution(RungeProblem(1, 1), 1.0).value == doctest::Approx(0.8).epsilon(1e-15));

  // Derivative and source against central differences.
  const RungeProblem off(30, 1, 0.3);
  for (const double x : {0.1, 0.3, 0.55, 0.9}) {
    const double step = 1e-5;
    const auto a = exact_solution(off, x - step);
    const auto b = exact_solution(off, x + step);
    const auto c = exact_solution(off, x);
    CHECK(c.derivative == doctest::Approx((b.value - a.value) / (2 * step)).epsilon(1e-8));
    CHECK(c.source == doctest::Approx(-(b.derivative - a.derivative) / (2 * step)).epsilon(1e-7));
  }
}

TEST_CASE("RungeProblem validation") {
  CHECK_THROWS_AS(RungeProblem(0, 1), DomainError);
  CHECK_THROWS_AS(RungeProblem(1, 0), DomainError);
  CHECK_THROWS_AS(RungeProblem(1, 5), DomainError);
  CHECK_THROWS_AS(RungeProblem(1, 1, 1.0), DomainError);
}

TEST_CASE("Mesh1D invariants") {
  CHECK_THROWS_AS(Mesh1D({0.0, 0.5, 0.5, 1.0}), DomainError);
  CHECK_THROWS_AS(Mesh1D({0.1, 1.0}), DomainError);
  CHECK_THROWS_AS(Mesh1D({0.0, 0.9}), DomainError);
  const Mesh1D m({0.0, 0.2, 0.7, 1.0});
  CHECK(m.num_elements() == 3);
  CHECK(m.h_max() == doctest::Approx(0.5));
}

TEST_CASE("random_mesh") {
  Rng rng(1);
  const auto uniform = random_mesh(0.1, 0.0, rng);
  CHECK(uniform.num_elements() == 10);
  CHECK(uniform.h_max() == doctest::Approx(0.1).epsilon(1e-14));

  Rng a(5), b(5);
  const auto first = random_mesh(0.07, 0.3, a);
  const auto second = random_mesh(0.07, 0.3, b);
  CHECK(std::vector<double>(first.nodes().begin(), first.nodes().end()) ==
        std::vector<double>(second.nodes().begin(), second.nodes().end()));

  CHECK_THROWS_AS(random_mesh(0.0, 0.3, rng), DomainError);
  CHECK_THROWS_AS(random_mesh(1.0, 0.3, rng), DomainError);
  CHECK_THROWS_AS(random_mesh(0.1, 0.5, rng), DomainError);
}

TEST_CASE("random meshes keep ordering and bounds over many draws") {
  int violations = 0;
  for (std::uint64_t s = 0; s < 10000; ++s) {
    Rng rng = Rng::substream(RngSeed{99}, s);
    const double h = 0.01 + 0.5 * rng.uniform();
    const auto mesh = random_mesh(h, 0.49, rng);
    const auto nodes = mesh.nodes();
    const int n = mesh.num_elements();
    bool ok = nodes.front() == 0.0 && nodes.back() == 1.0 && n == static_cast<int>(std::ceil(1 / h - 1e-9));
    for (std::size_t i = 1; i < nodes.size(); ++i) ok = ok && nodes[i] > nodes[i - 1];
    ok = ok && mesh.h_max() <= 1.98 / n + 1e-15;
    violations += ok ? 0 : 1;
  }
  CHECK(violations == 0);
  Rng rng(4);
  CHECK(random_mesh(0.25, 0.49, rng).h_max() <= 1.98 / 4);
}

TEST_CASE("P1 reproduces linear functions") {
  const auto u = polynomial({0, 1});
  Rng rng(2);
  const auto sol = assemble_and_solve(u, 1, random_mesh(0.1, 0.3, rng));
  for (int i = 0; i < sol.coefficients.size(); ++i) {
    const double x = sol.mesh.nodes()[static_cast<std::size_t>(i)];
    CHECK(std::abs(sol.coefficients[i] - x) <= 1e-12);
  }
  CHECK(h1_error(u, sol) <= 1e-12);
}

TEST_CASE("P2 reproduces x(1 - x)") {
  const auto u = polynomial({0, 1, -1});
  CHECK(h1_error(u, assemble_and_solve(u, 2, Mesh1D::uniform(5))) <= 1e-10);
}

TEST_CASE("degree-k exactness on random meshes") {
  const std::vector<double> c{0.3, -1.2, 2.5, -0.7, 1.9};
  for (int k = 1; k <= 4; ++k) {
    const auto u = polynomial(std::vector<double>(c.begin(), c.begin() + k + 1));
    for (std::uint64_t s = 0; s < 5; ++s) {
      Rng rng(s);
      const auto sol = assemble_and_solve(u, k, random_mesh(0.2, 0.45, rng));
      CAPTURE(k);
      CHECK(h1_error(u, sol) <= 1e-9);
      CHECK(sol.coefficients.size() == k * sol.mesh.num_elements() + 1);
    }
  }
}

TEST_CASE("Galerkin orthogonality") {
  for (int k = 1; k <= 4; ++k) {
    const RungeProblem problem(50, k);
    Rng rng(static_cast<std::uint64_t>(k));
    const auto sol = assemble_and_solve(problem, random_mesh(0.1, 0.3, rng));
    CHECK(galerkin_residual(problem.field(), sol, problem.quadrature_width()) <= 1e-10);
  }
}

TEST_CASE("errors decrease under refinement") {
  const RungeProblem problem(100, 1);
  CHECK(error_on_uniform(problem, 16) < error_on_uniform(problem, 8));
  CHECK(error_on_uniform(problem, 32) < error_on_uniform(problem, 16));
}

TEST_CASE("error quadrature is saturated") {
  const RungeProblem problem(10, 2);
  const auto sol = assemble_and_solve(problem, Mesh1D::uniform(16));
  const double base = h1_error(problem, sol);
  const double doubled = h1_error(problem, sol, 2 * default_error_points(2));
  CHECK(std::abs(base - doubled) <= 1e-10 * base);
}

TEST_CASE("convergence rates match the element degree") {
  const std::vector<double> hs{1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128, 1.0 / 256};
  CHECK(std::abs(convergence_rate(RungeProblem(10, 1), hs) - 1) <= 0.2);
  CHECK(std::abs(convergence_rate(RungeProblem(10, 2), hs) - 2) <= 0.2);
  CHECK(std::abs(convergence_rate(RungeProblem(10, 3), hs) - 3) <= 0.3);
  CHECK_THROWS_AS(convergence_rate(RungeProblem(10, 1), std::vector<double>{0.1, 0.05}), InsufficientDataError);
}

TEST_CASE("log_log_slope") {
  const std::vector<double> x{1, 2, 4, 8};
  const std::vector<double> y{3, 12, 48, 192};
  CHECK(log_log_slope(x, y) == doctest::Approx(2.0).epsilon(1e-14));
}
