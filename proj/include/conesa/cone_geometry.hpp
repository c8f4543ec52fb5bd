#pragma once

#include <span>
#include <vector>

namespace conesa {

using SearchPoint = std::vector<double>;

/// Minimize f(x) = x_1 subject to x_1^2 - xi * sum_{k>=2} x_k^2 >= 0 and
/// x_1 >= 0.
class ConeProblem {
 public:
  /// Throws ContractViolation unless dimension >= 2 and xi > 0.
  ConeProblem(int dimension, double xi);

  int dimension() const { return dimension_; }
  double xi() const { return xi_; }
  double sqrt_xi() const { return sqrt_xi_; }

 private:
  int dimension_;
  double xi_;
  double sqrt_xi_;
};

/// Position along the cone axis and distance from it.
struct ReducedPoint {
  double x = 0.0;
  double r = 0.0;
};

double objective(const ConeProblem& problem, std::span<const double> p);

/// Exact test of both constraints; no tolerance.
bool is_feasible(const ConeProblem& problem, std::span<const double> p);

/// Feasibility of the reduced pair: x >= 0 and x >= sqrt(xi) * r.
bool is_feasible(const ConeProblem& problem, ReducedPoint rp);

ReducedPoint reduce(std::span<const double> p);

/// Euclidean nearest feasible point. Feasible inputs are returned unchanged.
/// Infeasible inputs land on the cone boundary or, when their component
/// along the boundary ray is nonpositive, on the apex.
SearchPoint project_onto_cone(const ConeProblem& problem,
                              std::span<const double> p);

/// In-place variant used on the hot path of the evolution strategy.
void project_onto_cone_inplace(const ConeProblem& problem, std::span<double> p);

/// project_onto_cone expressed in the (x, r) plane.
ReducedPoint project_reduced(const ConeProblem& problem, ReducedPoint rp);

/// Embeds (x, r) as (x, r, 0, ..., 0).
SearchPoint embed(const ConeProblem& problem, ReducedPoint rp);

}  // namespace conesa
