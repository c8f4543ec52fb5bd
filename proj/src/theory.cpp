#include "conesa/theory.hpp"

#include <cmath>

#include "conesa/coefficients.hpp"
#include "conesa/errors.hpp"
#include "conesa/normal.hpp"

namespace conesa {
namespace {

void validate(const MicroInputs& in) {
  require(in.dimension >= 1, "dimension must be >= 1");
  require(in.xi > 0.0, "xi must be > 0");
  require(in.mu >= 1 && in.mu <= in.lambda, "need 1 <= mu <= lambda");
  require(in.sigma_star >= 0.0, "sigma* must be >= 0");
  require(in.tau >= 0.0, "tau must be >= 0");
  require(in.x >= 0.0 && in.r >= 0.0, "x and r must be >= 0");
}

void require_interior(const MicroInputs& in) {
  validate(in);
  if (!(in.x > 0.0) || !(in.r > 0.0)) {
    throw DegenerateState("progress rates need x > 0 and r > 0");
  }
}

RegimeTriple mix(double p_feas, double feasible, double infeasible) {
  return {feasible, infeasible, p_feas * feasible + (1.0 - p_feas) * infeasible};
}

// phi_x* for an infeasible offspring population, both closed forms.
double phi_x_infeasible(const MicroInputs& in, InfeasibleProgressForm form, double c) {
  const double n = in.dimension;
  const double xi = in.xi;
  const double s2 = in.sigma_star * in.sigma_star;
  const double ratio = in.r / in.x;
  const double sqrt_xi = std::sqrt(xi);

  if (form == InfeasibleProgressForm::finite_dimension) {
    const double shrink = 1.0 - 1.0 / n;
    const double spread = 1.0 + s2 / n * shrink;
    const double half_spread = 1.0 + s2 / (2.0 * n) * shrink;
    const double width = std::sqrt(s2 / (n * n) + (1.0 / xi) * s2 / (n * n) * half_spread / spread);
    return n / (1.0 + xi) * (1.0 - sqrt_xi * ratio * std::sqrt(spread) + xi * ratio * width * c);
  }

  const double spread = 1.0 + s2 / n;
  const double half_spread = 1.0 + s2 / (2.0 * n);
  const double boundary_ratio = sqrt_xi * ratio;
  return n / (1.0 + xi) * (1.0 - boundary_ratio * std::sqrt(spread)) +
         sqrt_xi / (1.0 + xi) * boundary_ratio * in.sigma_star * c *
             std::sqrt(1.0 + (1.0 / xi) * half_spread / spread);
}

}  // namespace

RApprox r_offspring_approx(const MicroInputs& in) {
  validate(in);
  if (!(in.r > 0.0)) throw DegenerateState("offspring r approximation needs r > 0");
  const double n = in.dimension;
  const double s = in.sigma_star;
  const double spread = 1.0 + s * s / n * (1.0 - 1.0 / n);
  const double half_spread = 1.0 + s * s / (2.0 * n) * (1.0 - 1.0 / n);
  return {in.r * std::sqrt(spread), in.r * (s / n) * std::sqrt(half_spread / spread)};
}

double feasibility_probability(const MicroInputs& in) {
  validate(in);
  const double boundary_r = in.x / std::sqrt(in.xi);
  if (in.sigma_star == 0.0) {
    // Zero mutation: every offspring equals the parent.
    return boundary_r >= in.r ? 1.0 : 0.0;
  }
  if (!(in.r > 0.0)) throw DegenerateState("sigma* > 0 is undefined at r = 0");
  const RApprox approx = r_offspring_approx(in);
  return normal_cdf((boundary_r - approx.r_bar) / in.sigma());
}

RegimeTriple progress_x(const MicroInputs& in, const TheoryOptions& options) {
  require_interior(in);
  const double c = c_mu_mu_lambda(in.mu, in.lambda);
  const double feasible = in.r / in.x * in.sigma_star * c;
  const double infeasible = phi_x_infeasible(in, options.infeasible_form, c);
  return mix(feasibility_probability(in), feasible, infeasible);
}

RegimeTriple progress_r(const MicroInputs& in, const TheoryOptions& options) {
  require_interior(in);
  const double n = in.dimension;
  const double s2 = in.sigma_star * in.sigma_star;
  const double recombined = 1.0 + s2 / (in.mu * n);

  const double feasible = n * (1.0 - std::sqrt(recombined));

  const double phi_x_inf = progress_x(in, options).infeasible;
  const double infeasible =
      n * (1.0 - in.x / (std::sqrt(in.xi) * in.r) * (1.0 - phi_x_inf / n) *
                     std::sqrt(recombined / (1.0 + s2 / n)));
  return mix(feasibility_probability(in), feasible, infeasible);
}

RegimeTriple sar(const MicroInputs& in) {
  validate(in);
  const double c = c_mu_mu_lambda(in.mu, in.lambda);
  const double tau2 = in.tau * in.tau;
  const double feasible = tau2 * (0.5 + e11(in.mu, in.lambda));
  const double infeasible = feasible - tau2 * in.sigma_star * c / std::sqrt(1.0 + in.xi);
  return mix(feasibility_probability(in), feasible, infeasible);
}

CentroidQ expected_centroid_q(const MicroInputs& in) {
  require_interior(in);
  const double c = c_mu_mu_lambda(in.mu, in.lambda);
  const double sigma = in.sigma();
  const RApprox approx = r_offspring_approx(in);
  const double xi = in.xi;
  const double weight = xi / (1.0 + xi);
  const double spread = std::sqrt(sigma * sigma + approx.sigma_r * approx.sigma_r / xi);
  return {in.x - sigma * c,
          weight * (in.x + approx.r_bar / std::sqrt(xi)) - weight * spread * c};
}

double expected_centroid_q_sq(const MicroInputs& in) {
  require_interior(in);
  const double c = c_mu_mu_lambda(in.mu, in.lambda);
  const double second = 1.0 + e11(in.mu, in.lambda);
  const double sigma = in.sigma();
  const double x = in.x;
  const double xi = in.xi;
  const RApprox approx = r_offspring_approx(in);

  const double feasible = sigma * sigma * second - 2.0 * sigma * x * c + x * x;

  const double var = sigma * sigma + approx.sigma_r * approx.sigma_r / xi;
  const double centre = x + approx.r_bar / std::sqrt(xi);
  const double scale = (1.0 + 1.0 / xi) * (1.0 + 1.0 / xi);
  const double infeasible = (var * second - 2.0 * std::sqrt(var) * centre * c + centre * centre) / scale;

  const double p = feasibility_probability(in);
  return p * feasible + (1.0 - p) * infeasible;
}

MicroPrediction predict_one_generation(const MicroInputs& in, const TheoryOptions& options) {
  return {feasibility_probability(in), progress_x(in, options), progress_r(in, options), sar(in)};
}

}  // namespace conesa
