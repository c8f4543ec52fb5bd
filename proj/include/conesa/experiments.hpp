#pragma once

#include <cstdint>
#include <vector>

#include "conesa/cone_geometry.hpp"
#include "conesa/dynamics.hpp"
#include "conesa/es_core.hpp"
#include "conesa/rng.hpp"
#include "conesa/theory.hpp"

namespace conesa {

/// Worker threads for the Monte Carlo harness; 0 picks the hardware
/// concurrency. Results never depend on this value.
struct Parallelism {
  int threads = 0;
};

/// Sample mean and its standard error.
struct MeanEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
};

struct OneGenEstimate {
  double sigma_star = 0.0;
  std::int64_t trials = 0;
  MeanEstimate phi_x_mc;
  MeanEstimate phi_r_mc;
  MeanEstimate psi_mc;
  double phi_x_th = 0.0;
  double phi_r_th = 0.0;
  double psi_th = 0.0;
  double p_feas_th = 0.0;
};

struct OneGenConfig {
  ReducedPoint parent;
  double sigma_star = 1.0;
  int mu = 3;
  int lambda = 10;
  double tau = 0.0;
  std::int64_t trials = 100000;
};

/// Repeats one generation from the fixed parent (x, r, 0, ..., 0) with
/// sigma = r sigma* / N and averages N(x - <q>)/x, N(r - <q_r>)/r and
/// (sigma' - sigma)/sigma. Trials are grouped into fixed blocks, each with its
/// own substream of seed, so the result is independent of the thread count.
OneGenEstimate one_generation_mc(const OneGenConfig& config, const ConeProblem& problem, const RngSeed& seed,
                                 const Parallelism& parallelism = {}, const TheoryOptions& options = {});

/// Per-generation average over the replicates still running at g.
struct EnsemblePoint {
  std::int64_t g = 0;
  double x = 0.0;
  double r = 0.0;
  double sigma = 0.0;
  double sigma_star = 0.0;
  int count = 0;
};

struct EnsembleResult {
  std::vector<EnsemblePoint> mean;
  DeterministicTrace deterministic;
};

/// Averages `runs` independent runs (replicate i uses substream(seed, i)) and
/// iterates the deterministic system from the same initial (x, r, sigma) for
/// params.max_generations generations.
EnsembleResult dynamics_ensemble(const EsParams& params, const ConeProblem& problem, int runs, const RngSeed& seed,
                                 const Parallelism& parallelism = {});

struct SteadyStateMeasurement {
  MeanEstimate sigma_star_ss_mc;
  MeanEstimate phi_x_ss_mc;
  MeanEstimate phi_r_ss_mc;
  MeanEstimate ratio_mc;  ///< sqrt(xi) r / x
  int replicates = 0;
  std::int64_t generations = 0;
  std::int64_t burn_in = 0;
  /// At least one replicate stopped on f_target before the requested
  /// number of generations; its available window was used.
  bool short_window = false;
};

/// Runs `replicates` independent runs of params.max_generations generations,
/// averages per replicate over the window after burn_in_fraction of the
/// generations, then across replicates (standard errors over replicates).
SteadyStateMeasurement measure_steady_state(const EsParams& params, const ConeProblem& problem, int replicates,
                                            double burn_in_fraction, const RngSeed& seed,
                                            const Parallelism& parallelism = {});

/// Least-squares slope of log(value) against g over the records with
/// g >= from_fraction * (last g).
double log_linear_slope(const std::vector<double>& values, double from_fraction);

/// Anchor parents used for one-generation sweeps, all with x = 1.
enum class ParentAnchor {
  axis,      ///< r = 0.01: feasible offspring dominate
  boundary,  ///< r = 1/sqrt(xi): on the cone boundary
  midway,    ///< r halfway between the two
};

ReducedPoint anchor_parent(ParentAnchor anchor, const ConeProblem& problem);

}  // namespace conesa
