#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "conesa/cone_geometry.hpp"
#include "conesa/errors.hpp"
#include "support/oracles.hpp"

using namespace conesa;

namespace {

SearchPoint padded(std::initializer_list<double> head, int n) {
  SearchPoint p(head);
  p.resize(static_cast<std::size_t>(n), 0.0);
  return p;
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

/// Random point whose reduced coordinates cover interior, exterior and the
/// region behind the apex.
SearchPoint random_point(int n, std::mt19937_64& engine) {
  std::uniform_real_distribution<double> scale(-3.0, 3.0);
  std::normal_distribution<double> normal;
  SearchPoint p(static_cast<std::size_t>(n));
  const double magnitude = std::pow(10.0, scale(engine));
  for (double& v : p) v = magnitude * normal(engine);
  return p;
}

}  // namespace

TEST_CASE("problem construction validates dimension and xi") {
  CHECK_NOTHROW(ConeProblem(2, 0.01));
  CHECK_THROWS_AS(ConeProblem(1, 1.0), ContractViolation);
  CHECK_THROWS_AS(ConeProblem(5, 0.0), ContractViolation);
  CHECK_THROWS_AS(ConeProblem(5, -1.0), ContractViolation);
  CHECK_THROWS_AS(ConeProblem(5, std::nan("")), ContractViolation);
}

TEST_CASE("objective is the first coordinate") {
  const ConeProblem problem(5, 1.0);
  CHECK(objective(problem, padded({3, 1}, 5)) == 3.0);
  CHECK(objective(problem, padded({}, 5)) == 0.0);
  CHECK(objective(problem, padded({-2, 5}, 5)) == -2.0);
  CHECK_THROWS_AS(objective(problem, padded({1}, 4)), ContractViolation);
}

TEST_CASE("feasibility test") {
  const ConeProblem problem(4, 1.0);
  CHECK(is_feasible(problem, padded({1, 0.5}, 4)));
  CHECK_FALSE(is_feasible(problem, padded({1, 2}, 4)));
  CHECK(is_feasible(problem, padded({}, 4)));
  CHECK_FALSE(is_feasible(problem, padded({-1e-300}, 4)));
  CHECK(is_feasible(problem, padded({1, 1}, 4)));
  CHECK_THROWS_AS(is_feasible(problem, padded({1}, 3)), ContractViolation);

  CHECK(is_feasible(problem, ReducedPoint{1.0, 1.0}));
  CHECK_FALSE(is_feasible(problem, ReducedPoint{-1.0, 0.0}));
}

TEST_CASE("reduce") {
  const ReducedPoint a = reduce(padded({3, 4}, 6));
  CHECK(a.x == 3.0);
  CHECK(a.r == 4.0);
  const ReducedPoint b = reduce(padded({1, 3, 4}, 6));
  CHECK(b.x == 1.0);
  CHECK(b.r == doctest::Approx(5.0).epsilon(1e-15));
  const ReducedPoint c = reduce(padded({}, 6));
  CHECK(c.x == 0.0);
  CHECK(c.r == 0.0);
}

TEST_CASE("projection examples") {
  const ConeProblem problem(5, 1.0);

  SUBCASE("feasible points are fixed") {
    const SearchPoint p = padded({1, 0.5}, 5);
    CHECK(project_onto_cone(problem, p) == p);
  }
  SUBCASE("point on the tail axis") {
    const SearchPoint p = padded({0, 2}, 5);
    const SearchPoint out = project_onto_cone(problem, p);
    const oracle::RayPoint ref = oracle::nearest_on_boundary_ray(0.0, 2.0, 1.0);
    CHECK(ref.x == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(out[0] == doctest::Approx(ref.x).epsilon(1e-12));
    CHECK(out[1] == doctest::Approx(ref.r).epsilon(1e-12));
    for (std::size_t k = 2; k < out.size(); ++k) CHECK(out[k] == 0.0);
  }
  SUBCASE("behind the apex") {
    CHECK(project_onto_cone(problem, padded({-3}, 5)) == padded({}, 5));
  }
  SUBCASE("exactly orthogonal to the boundary ray") {
    CHECK(project_onto_cone(problem, padded({-1, 1}, 5)) == padded({}, 5));
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(project_onto_cone(problem, padded({0, 2}, 3)), ContractViolation);
  }
}

TEST_CASE("reduced projection examples") {
  const ReducedPoint a = project_reduced(ConeProblem(3, 1.0), {0.0, 2.0});
  CHECK(a.x == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(a.r == doctest::Approx(1.0).epsilon(1e-12));

  const ReducedPoint b = project_reduced(ConeProblem(3, 4.0), {2.0, 1.0});
  CHECK(b.x == 2.0);
  CHECK(b.r == 1.0);

  const ReducedPoint c = project_reduced(ConeProblem(3, 7.0), {-5.0, 0.0});
  CHECK(c.x == 0.0);
  CHECK(c.r == 0.0);

  CHECK_THROWS_AS(project_reduced(ConeProblem(3, 1.0), {1.0, -1.0}), ContractViolation);
}

TEST_CASE("projection properties over random points") {
  std::mt19937_64 engine(20240611);
  for (double xi : {0.01, 1.0, 10.0}) {
    CAPTURE(xi);
    for (int trial = 0; trial < 1000; ++trial) {
      const int n = 2 + trial % 9;
      const ConeProblem problem(n, xi);
      const SearchPoint p = random_point(n, engine);
      const SearchPoint once = project_onto_cone(problem, p);
      const SearchPoint twice = project_onto_cone(problem, once);

      REQUIRE(is_feasible(problem, once));
      for (std::size_t k = 0; k < once.size(); ++k) REQUIRE(rel_diff(once[k], twice[k]) <= 1e-12);

      const ReducedPoint via_full = reduce(once);
      const ReducedPoint via_reduced = project_reduced(problem, reduce(p));
      REQUIRE(rel_diff(via_full.x, via_reduced.x) <= 1e-12);
      REQUIRE(rel_diff(via_full.r, via_reduced.r) <= 1e-12);

      if (!is_feasible(problem, p)) {
        // Repaired points sit on the boundary (or the apex).
        const ReducedPoint rp = reduce(once);
        REQUIRE(std::abs(rp.r - rp.x / std::sqrt(xi)) <= 1e-12 * std::max(1.0, rp.x / std::sqrt(xi)));
        const ReducedPoint in = reduce(p);
        const oracle::RayPoint ref = oracle::nearest_on_boundary_ray(in.x, in.r, xi);
        const double scale = std::max(1.0, std::hypot(in.x, in.r));
        REQUIRE(std::abs(rp.x - ref.x) <= 1e-8 * scale);
        REQUIRE(std::abs(rp.r - ref.r) <= 1e-8 * scale);
      }
    }
  }
}

TEST_CASE("projection is the nearest feasible point") {
  std::mt19937_64 engine(7);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (double xi : {0.01, 1.0, 10.0}) {
    for (int trial = 0; trial < 1000; ++trial) {
      const int n = 2 + trial % 9;
      const ConeProblem problem(n, xi);
      SearchPoint p = random_point(n, engine);
      if (is_feasible(problem, p)) p[0] = -std::abs(p[0]) - 1e-3;
      const SearchPoint proj = project_onto_cone(problem, p);
      double best = 0.0;
      for (int k = 0; k < n; ++k) best += (p[k] - proj[k]) * (p[k] - proj[k]);
      best = std::sqrt(best);

      const double reach = std::sqrt(std::inner_product(p.begin(), p.end(), p.begin(), 0.0)) * 2.0 + 1.0;
      double nearest_sample = std::numeric_limits<double>::infinity();
      for (int s = 0; s < 10000; ++s) {
        // Random feasible y: axis position, then a tail inside the cone.
        SearchPoint y(static_cast<std::size_t>(n));
        y[0] = reach * unit(engine);
        double tail = 0.0;
        for (int k = 1; k < n; ++k) {
          y[k] = normal(engine);
          tail += y[k] * y[k];
        }
        const double radius = y[0] / std::sqrt(xi) * unit(engine) / std::sqrt(tail);
        for (int k = 1; k < n; ++k) y[k] *= radius;
        double d = 0.0;
        for (int k = 0; k < n; ++k) d += (p[k] - y[k]) * (p[k] - y[k]);
        nearest_sample = std::min(nearest_sample, std::sqrt(d));
      }
      REQUIRE(best <= nearest_sample + 1e-9);
    }
  }
}

TEST_CASE("objective and feasibility are invariant under tail rotations") {
  std::mt19937_64 engine(99);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 7;
    const ConeProblem problem(n, 0.5 + trial % 5);
    const SearchPoint p = random_point(n, engine);
    const std::vector<double> q = oracle::random_rotation(n - 1, engine);
    const std::vector<double> rotated_tail = oracle::apply(q, std::vector<double>(p.begin() + 1, p.end()));
    SearchPoint rotated{p[0]};
    rotated.insert(rotated.end(), rotated_tail.begin(), rotated_tail.end());

    CHECK(objective(problem, rotated) == objective(problem, p));
    const ReducedPoint a = reduce(p), b = reduce(rotated);
    CHECK(a.r == doctest::Approx(b.r).epsilon(1e-12));
    // Exact feasibility can flip only within rounding of the boundary.
    const double margin = a.x * a.x - problem.xi() * a.r * a.r;
    if (std::abs(margin) > 1e-9 * (a.x * a.x + problem.xi() * a.r * a.r)) {
      CHECK(is_feasible(problem, rotated) == is_feasible(problem, p));
    }
  }
}

TEST_CASE("embed places the pair on the first two axes") {
  const ConeProblem problem(4, 2.0);
  CHECK(embed(problem, {3.0, 1.5}) == SearchPoint{3.0, 1.5, 0.0, 0.0});
}
