#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "conesa/cone_geometry.hpp"
#include "conesa/rng.hpp"

namespace conesa {

/// Strategy parameters of the (mu/mu_I, lambda)-sigmaSA-ES.
struct EsParams {
  int mu = 3;
  int lambda = 10;
  double tau = 0.0;
  double sigma0 = 1e-4;
  SearchPoint x0;
  std::int64_t max_generations = 1000;
  /// Stop once the parental objective value is <= f_target.
  double f_target = 1e-30;
};

/// Throws ContractViolation on 1 <= mu < lambda, tau >= 0, sigma0 >= 0 or a
/// dimension mismatch of x0.
void validate(const EsParams& params, const ConeProblem& problem);

/// Builds x0 as (x0, r0, 0, ..., 0).
SearchPoint reduced_start(const ConeProblem& problem, double x0, double r0);

struct EsState {
  SearchPoint x;
  double sigma = 0.0;
};

/// Parental state at generation g together with the centroid statistics of
/// the offspring selected in that generation.
struct GenerationRecord {
  std::int64_t g = 0;
  double x = 0.0;
  double r = 0.0;
  double sigma = 0.0;
  double sigma_star = 0.0;
  /// First coordinate of the recombined centroid, before centroid repair.
  /// NaN on the final record of a run (no generation was performed).
  double q_centroid = std::numeric_limits<double>::quiet_NaN();
  /// Distance of that centroid from the cone axis.
  double qr_centroid = std::numeric_limits<double>::quiet_NaN();
  /// The recombined centroid failed the exact feasibility test and was
  /// projected. Convexity rules this out; a set flag indicates a bug.
  bool centroid_repaired = false;
};

/// Initial state; x0 is projected onto the cone if it is infeasible.
EsState initial_state(const EsParams& params, const ConeProblem& problem);

/// One generation of the strategy with reusable buffers. Not thread-safe;
/// use one instance per run.
class EvolutionStrategy {
 public:
  EvolutionStrategy(const ConeProblem& problem, const EsParams& params);

  /// Advances state by one generation and returns the record for the
  /// parental state it started from (record.g is left 0).
  ///
  /// Per offspring the draw order is fixed: one normal for the log-normal
  /// sigma mutation, then N normals for the parameter vector.
  template <NormalSource Source>
  GenerationRecord step(EsState& state, Source& source);

  const ConeProblem& problem() const { return problem_; }
  const EsParams& params() const { return params_; }

 private:
  ConeProblem problem_;
  EsParams params_;
  std::vector<double> offspring_;  // lambda x N, row-major
  std::vector<double> sigmas_;
  std::vector<double> fitness_;
  std::vector<std::size_t> order_;
};

template <NormalSource Source>
GenerationRecord EvolutionStrategy::step(EsState& state, Source& source) {
  const auto n = static_cast<std::size_t>(problem_.dimension());
  const auto lambda = static_cast<std::size_t>(params_.lambda);
  const auto mu = static_cast<std::size_t>(params_.mu);

  GenerationRecord record;
  const ReducedPoint parent = reduce(state.x);
  record.x = parent.x;
  record.r = parent.r;
  record.sigma = state.sigma;
  record.sigma_star = parent.r > 0.0 ? static_cast<double>(n) * state.sigma / parent.r
                                     : std::numeric_limits<double>::infinity();

  for (std::size_t l = 0; l < lambda; ++l) {
    const double sigma_l = state.sigma * std::exp(params_.tau * source.normal());
    std::span<double> child(offspring_.data() + l * n, n);
    source.fill_normal(child);
    for (std::size_t k = 0; k < n; ++k) child[k] = state.x[k] + sigma_l * child[k];
    project_onto_cone_inplace(problem_, child);
    sigmas_[l] = sigma_l;
    fitness_[l] = child[0];
  }

  std::iota(order_.begin(), order_.end(), std::size_t{0});
  std::stable_sort(order_.begin(), order_.end(),
                   [this](std::size_t a, std::size_t b) { return fitness_[a] < fitness_[b]; });

  std::fill(state.x.begin(), state.x.end(), 0.0);
  double sigma_sum = 0.0;
  for (std::size_t m = 0; m < mu; ++m) {
    const double* child = offspring_.data() + order_[m] * n;
    for (std::size_t k = 0; k < n; ++k) state.x[k] += child[k];
    sigma_sum += sigmas_[order_[m]];
  }
  const auto mu_d = static_cast<double>(mu);
  for (double& v : state.x) v /= mu_d;
  state.sigma = sigma_sum / mu_d;

  const ReducedPoint centroid = reduce(state.x);
  record.q_centroid = centroid.x;
  record.qr_centroid = centroid.r;
  if (!is_feasible(problem_, state.x)) {
    record.centroid_repaired = true;
    project_onto_cone_inplace(problem_, state.x);
  }
  return record;
}

struct GenerationResult {
  EsState state;
  GenerationRecord record;
};

/// Single generation from state; returns the successor and the record.
template <NormalSource Source>
GenerationResult run_generation(const EsState& state, const EsParams& params, const ConeProblem& problem,
                                Source& source) {
  EvolutionStrategy es(problem, params);
  GenerationResult result{state, {}};
  result.record = es.step(result.state, source);
  return result;
}

/// Runs until g == max_generations or the parental objective reaches
/// f_target. The trace has one record per visited parental state, the last
/// one without centroid statistics.
template <NormalSource Source>
std::vector<GenerationRecord> run_es(const EsParams& params, const ConeProblem& problem, Source& source) {
  EvolutionStrategy es(problem, params);
  EsState state = initial_state(params, problem);
  std::vector<GenerationRecord> trace;
  for (std::int64_t g = 0;; ++g) {
    if (g >= params.max_generations || state.x[0] <= params.f_target) {
      GenerationRecord last;
      last.g = g;
      const ReducedPoint p = reduce(state.x);
      last.x = p.x;
      last.r = p.r;
      last.sigma = state.sigma;
      last.sigma_star = p.r > 0.0 ? problem.dimension() * state.sigma / p.r
                                  : std::numeric_limits<double>::infinity();
      trace.push_back(last);
      break;
    }
    GenerationRecord record = es.step(state, source);
    record.g = g;
    trace.push_back(record);
  }
  return trace;
}

/// run_es with a fresh Rng on the given stream.
std::vector<GenerationRecord> run_es(const EsParams& params, const ConeProblem& problem, const RngSeed& seed);

}  // namespace conesa
