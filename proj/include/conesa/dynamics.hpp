#pragma once

#include <optional>
#include <vector>

#include "conesa/cone_geometry.hpp"
#include "conesa/theory.hpp"

namespace conesa {

struct DeterministicState {
  double x = 0.0;
  double r = 0.0;
  double sigma = 0.0;
};

enum class HaltReason {
  completed,
  /// x or r reached zero (or went non-finite) after an update.
  state_collapse,
  /// 0 < sigma < 1e-300.
  sigma_underflow,
};

struct DeterministicTrace {
  std::vector<DeterministicState> states;  ///< states[g] for g = 0, 1, ...
  HaltReason halt = HaltReason::completed;
};

/// Iterates the mean-value evolution equations
///   x <- x (1 - phi_x*/N),  r <- r (1 - phi_r*/N),  sigma <- sigma (1 + psi)
/// with the P_feas-combined closed forms, projecting (x, r) back onto the cone
/// whenever an update leaves the feasible region. sigma == 0 is a fixed point.
DeterministicTrace iterate_deterministic(const DeterministicState& init, int mu, int lambda, double tau,
                                         const ConeProblem& problem, int generations,
                                         const TheoryOptions& options = {});

struct SteadyStatePrediction {
  double sigma_star_ss = 0.0;
  /// Asymptotic steady-state x progress at sigma_star_ss (equal to phi_r*).
  double phi_star_ss = 0.0;
  /// sqrt(xi) r_ss / x_ss at sigma_star_ss; 1 on the cone boundary.
  double boundary_ratio = 0.0;
  /// First-order expansion of the ratio at the progress-optimal sigma*.
  double boundary_ratio_linearized = 0.0;
  double sigma_star_max = 0.0;
  double phi_star_max = 0.0;
  /// Empty when mu c^2 <= 1/2 + e^{1,1}; see optimal_learning_parameter.
  std::optional<double> tau_opt;
};

/// Closed-form steady state of the strategy on the cone (P_feas ~ 0).
SteadyStatePrediction steady_state_predict(int mu, int lambda, double tau, double xi, int dimension);

/// Learning parameter at which sigma*_ss equals the progress-optimal sigma*.
/// Throws std::domain_error when mu c^2 <= 1/2 + e^{1,1}.
double optimal_learning_parameter(int mu, int lambda, int dimension);

/// sigma*_ss / sqrt(1 + xi): the sphere-model steady-state mutation strength.
double sphere_equivalence_factor(const SteadyStatePrediction& prediction, double xi);

/// Asymptotic steady-state x progress as a function of sigma*:
/// -sigma*^2 / (2 mu (1 + xi)) + sigma* c / sqrt(1 + xi).
double steady_state_progress(double sigma_star, int mu, int lambda, double xi);

}  // namespace conesa
