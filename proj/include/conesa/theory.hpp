#pragma once

namespace conesa {

/// Parental state and strategy parameters for the one-generation
/// predictions. The parent is assumed feasible (x >= sqrt(xi) r).
struct MicroInputs {
  double x = 0.0;
  double r = 0.0;
  double sigma_star = 0.0;  ///< N sigma / r
  int dimension = 2;
  double xi = 1.0;
  int mu = 1;
  int lambda = 2;
  double tau = 0.0;

  double sigma() const { return r * sigma_star / dimension; }
};

/// Normal approximation of the offspring distance from the cone axis.
struct RApprox {
  double r_bar = 0.0;
  double sigma_r = 0.0;
};

/// A quantity evaluated under the feasible-offspring and
/// infeasible-offspring hypotheses, and their P_feas-weighted mix.
struct RegimeTriple {
  double feasible = 0.0;
  double infeasible = 0.0;
  double combined = 0.0;
};

struct MicroPrediction {
  double p_feas = 0.0;
  RegimeTriple phi_x;
  RegimeTriple phi_r;
  RegimeTriple psi;
};

/// Which closed form to use for the infeasible x progress rate.
enum class InfeasibleProgressForm {
  /// 1/N neglected against 1; the form iterated and analyzed at steady state.
  asymptotic,
  /// Retains the (1 - 1/N) factors of the offspring-r approximation.
  finite_dimension,
};

struct TheoryOptions {
  InfeasibleProgressForm infeasible_form = InfeasibleProgressForm::asymptotic;
};

RApprox r_offspring_approx(const MicroInputs& in);

double feasibility_probability(const MicroInputs& in);

RegimeTriple progress_x(const MicroInputs& in, const TheoryOptions& options = {});

RegimeTriple progress_r(const MicroInputs& in, const TheoryOptions& options = {});

/// Self-adaptation response.
RegimeTriple sar(const MicroInputs& in);

struct CentroidQ {
  double feasible = 0.0;
  double infeasible = 0.0;
};

/// E[<q>] under each offspring regime.
CentroidQ expected_centroid_q(const MicroInputs& in);

/// E[<q^2>], P_feas-weighted.
double expected_centroid_q_sq(const MicroInputs& in);

MicroPrediction predict_one_generation(const MicroInputs& in, const TheoryOptions& options = {});

}  // namespace conesa
