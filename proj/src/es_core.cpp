#include "conesa/es_core.hpp"

#include <cmath>
#include <string>

#include "conesa/errors.hpp"

namespace conesa {

void validate(const EsParams& params, const ConeProblem& problem) {
  require(params.mu >= 1 && params.mu < params.lambda, "need 1 <= mu < lambda");
  require(params.tau >= 0.0 && std::isfinite(params.tau), "tau must be finite and >= 0");
  require(params.sigma0 >= 0.0 && std::isfinite(params.sigma0), "sigma0 must be finite and >= 0");
  require(params.max_generations >= 0, "max_generations must be >= 0");
  require(static_cast<int>(params.x0.size()) == problem.dimension(),
          "x0 has " + std::to_string(params.x0.size()) + " coordinates, problem dimension is " +
              std::to_string(problem.dimension()));
}

SearchPoint reduced_start(const ConeProblem& problem, double x0, double r0) {
  require(r0 >= 0.0, "r0 must be >= 0");
  return embed(problem, {x0, r0});
}

EsState initial_state(const EsParams& params, const ConeProblem& problem) {
  validate(params, problem);
  return {project_onto_cone(problem, params.x0), params.sigma0};
}

EvolutionStrategy::EvolutionStrategy(const ConeProblem& problem, const EsParams& params)
    : problem_(problem),
      params_(params),
      offspring_(static_cast<std::size_t>(params.lambda) * static_cast<std::size_t>(problem.dimension())),
      sigmas_(static_cast<std::size_t>(params.lambda)),
      fitness_(static_cast<std::size_t>(params.lambda)),
      order_(static_cast<std::size_t>(params.lambda)) {
  validate(params, problem);
}

std::vector<GenerationRecord> run_es(const EsParams& params, const ConeProblem& problem, const RngSeed& seed) {
  Rng rng(seed);
  return run_es(params, problem, rng);
}

}  // namespace conesa
