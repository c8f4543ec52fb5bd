#include "conesa/dynamics.hpp"

#include <cmath>
#include <stdexcept>

#include "conesa/coefficients.hpp"
#include "conesa/errors.hpp"

namespace conesa {
namespace {

constexpr double kSigmaFloor = 1e-300;

void validate_strategy(int mu, int lambda, double tau) {
  require(mu >= 1 && mu < lambda, "need 1 <= mu < lambda");
  require(tau >= 0.0 && std::isfinite(tau), "tau must be finite and >= 0");
}

}  // namespace

DeterministicTrace iterate_deterministic(const DeterministicState& init, int mu, int lambda, double tau,
                                         const ConeProblem& problem, int generations,
                                         const TheoryOptions& options) {
  validate_strategy(mu, lambda, tau);
  require(generations >= 0, "generations must be >= 0");
  require(init.r > 0.0 && init.x > 0.0, "deterministic iteration needs x > 0 and r > 0");
  require(init.sigma >= 0.0, "sigma must be >= 0");
  require(is_feasible(problem, ReducedPoint{init.x, init.r}), "initial (x, r) must be feasible");

  const int n = problem.dimension();
  DeterministicTrace trace;
  trace.states.reserve(static_cast<std::size_t>(generations) + 1);
  trace.states.push_back(init);

  DeterministicState s = init;
  for (int g = 0; g < generations; ++g) {
    if (s.sigma == 0.0) {
      trace.states.push_back(s);
      continue;
    }
    if (s.sigma < kSigmaFloor) {
      trace.halt = HaltReason::sigma_underflow;
      break;
    }

    const MicroInputs in{s.x, s.r, n * s.sigma / s.r, n, problem.xi(), mu, lambda, tau};
    const MicroPrediction p = predict_one_generation(in, options);

    ReducedPoint next{s.x * (1.0 - p.phi_x.combined / n), s.r * (1.0 - p.phi_r.combined / n)};
    const double sigma = s.sigma * (1.0 + p.psi.combined);
    if (next.r < 0.0) next.r = 0.0;
    if (!is_feasible(problem, next)) next = project_reduced(problem, next);

    if (!(next.x > 0.0) || !(next.r > 0.0) || !std::isfinite(next.x) || !std::isfinite(next.r) ||
        !std::isfinite(sigma)) {
      trace.halt = HaltReason::state_collapse;
      break;
    }
    s = {next.x, next.r, sigma};
    trace.states.push_back(s);
  }
  return trace;
}

double steady_state_progress(double sigma_star, int mu, int lambda, double xi) {
  const double c = c_mu_mu_lambda(mu, lambda);
  return -sigma_star * sigma_star / (2.0 * mu * (1.0 + xi)) + sigma_star * c / std::sqrt(1.0 + xi);
}

double optimal_learning_parameter(int mu, int lambda, int dimension) {
  require(dimension >= 1, "dimension must be >= 1");
  const double c = c_mu_mu_lambda(mu, lambda);
  const double gain = mu * c * c;
  const double denominator = gain - 0.5 - e11(mu, lambda);
  if (!(denominator > 0.0)) {
    throw std::domain_error("optimal tau undefined: mu c^2 <= 1/2 + e^{1,1}");
  }
  return std::sqrt(gain / denominator) / std::sqrt(2.0 * dimension);
}

SteadyStatePrediction steady_state_predict(int mu, int lambda, double tau, double xi, int dimension) {
  validate_strategy(mu, lambda, tau);
  require(tau > 0.0, "tau must be > 0");
  require(xi > 0.0, "xi must be > 0");
  require(dimension >= 1, "dimension must be >= 1");

  const double n = dimension;
  const double c = c_mu_mu_lambda(mu, lambda);
  const double e = e11(mu, lambda);
  const double gain = mu * c * c;
  const double root_xi = std::sqrt(1.0 + xi);

  SteadyStatePrediction out;
  const double a = 1.0 - n * tau * tau;
  out.sigma_star_ss = root_xi * mu * c * (a + std::sqrt(a * a + 2.0 * tau * tau * n * (0.5 + e) / gain));
  out.phi_star_ss = steady_state_progress(out.sigma_star_ss, mu, lambda, xi);

  const double s2 = out.sigma_star_ss * out.sigma_star_ss;
  out.boundary_ratio = std::sqrt((1.0 + s2 / (mu * n)) / (1.0 + s2 / n));
  out.boundary_ratio_linearized = 1.0 + (1.0 + xi) / n * (gain / 2.0) * (1.0 - mu);

  out.sigma_star_max = root_xi * mu * c;
  out.phi_star_max = gain / 2.0;
  if (gain - 0.5 - e > 0.0) out.tau_opt = optimal_learning_parameter(mu, lambda, dimension);
  return out;
}

double sphere_equivalence_factor(const SteadyStatePrediction& prediction, double xi) {
  require(xi > 0.0, "xi must be > 0");
  return prediction.sigma_star_ss / std::sqrt(1.0 + xi);
}

}  // namespace conesa
