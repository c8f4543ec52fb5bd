#include "conesa/cone_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "conesa/errors.hpp"

namespace conesa {
namespace {

void check_dimension(const ConeProblem& problem, std::span<const double> p) {
  if (static_cast<int>(p.size()) != problem.dimension()) {
    throw ContractViolation("point has " + std::to_string(p.size()) +
                            " coordinates, problem dimension is " +
                            std::to_string(problem.dimension()));
  }
}

double tail_norm_squared(std::span<const double> p) {
  double sum = 0.0;
  for (std::size_t k = 1; k < p.size(); ++k) sum += p[k] * p[k];
  return sum;
}

}  // namespace

ConeProblem::ConeProblem(int dimension, double xi)
    : dimension_(dimension), xi_(xi), sqrt_xi_(std::sqrt(xi)) {
  require(dimension >= 2, "cone dimension must be >= 2");
  require(xi > 0.0 && std::isfinite(xi), "cone parameter xi must be finite and > 0");
}

double objective(const ConeProblem& problem, std::span<const double> p) {
  check_dimension(problem, p);
  return p[0];
}

bool is_feasible(const ConeProblem& problem, std::span<const double> p) {
  check_dimension(problem, p);
  return p[0] >= 0.0 && p[0] * p[0] - problem.xi() * tail_norm_squared(p) >= 0.0;
}

bool is_feasible(const ConeProblem& problem, ReducedPoint rp) {
  return rp.x >= 0.0 && rp.x * rp.x - problem.xi() * rp.r * rp.r >= 0.0;
}

ReducedPoint reduce(std::span<const double> p) {
  if (p.empty()) return {};
  return {p[0], std::sqrt(tail_norm_squared(p))};
}

void project_onto_cone_inplace(const ConeProblem& problem, std::span<double> p) {
  if (is_feasible(problem, p)) return;

  const double xi = problem.xi();
  const double sqrt_xi = problem.sqrt_xi();
  const double x1 = p[0];
  const double tail = std::sqrt(tail_norm_squared(p));

  // Sign of the component along the boundary ray e_c; the positive factor
  // 1/sqrt(xi + 1) is irrelevant here. Covers tail == 0 with x1 < 0.
  if (x1 * sqrt_xi + tail <= 0.0) {
    for (double& v : p) v = 0.0;
    return;
  }

  const double q = xi / (xi + 1.0) * (x1 + tail / sqrt_xi);
  const double tail_scale = q / (sqrt_xi * tail);
  p[0] = q;
  for (std::size_t k = 1; k < p.size(); ++k) p[k] *= tail_scale;

  // The closed form lands on the boundary only up to rounding; pull the tail
  // in by a few ulps so the result passes the exact feasibility test.
  while (!is_feasible(problem, p)) {
    for (std::size_t k = 1; k < p.size(); ++k) p[k] *= 1.0 - 0x1p-50;
  }
}

SearchPoint project_onto_cone(const ConeProblem& problem,
                              std::span<const double> p) {
  check_dimension(problem, p);
  SearchPoint out(p.begin(), p.end());
  project_onto_cone_inplace(problem, out);
  return out;
}

ReducedPoint project_reduced(const ConeProblem& problem, ReducedPoint rp) {
  require(rp.r >= 0.0, "reduced point must have r >= 0");
  if (is_feasible(problem, rp)) return rp;

  const double xi = problem.xi();
  const double sqrt_xi = problem.sqrt_xi();
  const double q = std::max(0.0, xi / (xi + 1.0) * (rp.x + rp.r / sqrt_xi));
  double qr = q / sqrt_xi;
  while (q * q - xi * qr * qr < 0.0) qr = std::nextafter(qr, 0.0);
  return {q, qr};
}

SearchPoint embed(const ConeProblem& problem, ReducedPoint rp) {
  SearchPoint p(static_cast<std::size_t>(problem.dimension()), 0.0);
  p[0] = rp.x;
  p[1] = rp.r;
  return p;
}

}  // namespace conesa
