#include "conesa/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <thread>

#include "conesa/errors.hpp"

namespace conesa {
namespace {

constexpr std::int64_t kTrialsPerBlock = 1000;

/// Running mean / sum of squared deviations (Welford), mergeable in a fixed
/// order so that sums do not depend on scheduling.
struct Moments {
  std::int64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double v) {
    ++n;
    const double delta = v - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (v - mean);
  }

  void merge(const Moments& other) {
    if (other.n == 0) return;
    if (n == 0) {
      *this = other;
      return;
    }
    const double total = static_cast<double>(n + other.n);
    const double delta = other.mean - mean;
    mean += delta * static_cast<double>(other.n) / total;
    m2 += other.m2 + delta * delta * static_cast<double>(n) * static_cast<double>(other.n) / total;
    n += other.n;
  }

  MeanEstimate estimate() const {
    if (n < 2) return {mean, 0.0};
    return {mean, std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n))};
  }
};

int resolve_threads(const Parallelism& parallelism, std::size_t tasks) {
  int threads = parallelism.threads > 0 ? parallelism.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(threads, 1);
  return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(threads), std::max<std::size_t>(tasks, 1)));
}

/// Evaluates task(i) for i in [0, count) on a small pool; results keep
/// index order.
template <class Result>
std::vector<Result> run_indexed(std::size_t count, const Parallelism& parallelism,
                                const std::function<Result(std::size_t)>& task) {
  std::vector<Result> results(count);
  const int threads = resolve_threads(parallelism, count);
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) results[i] = task(i);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
  {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t i = next++; i < count; i = next++) results[i] = task(i);
        } catch (...) {
          errors[static_cast<std::size_t>(t)] = std::current_exception();
          next = count;
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

struct OneGenBlock {
  Moments phi_x;
  Moments phi_r;
  Moments psi;
};

}  // namespace

OneGenEstimate one_generation_mc(const OneGenConfig& config, const ConeProblem& problem, const RngSeed& seed,
                                 const Parallelism& parallelism, const TheoryOptions& options) {
  require(config.trials >= 2, "one-generation experiments need at least 2 trials");
  require(config.sigma_star >= 0.0, "sigma* must be >= 0");
  require(config.parent.x > 0.0 && config.parent.r > 0.0, "parent needs x > 0 and r > 0");
  require(is_feasible(problem, config.parent), "parent must be feasible");

  const int n = problem.dimension();
  const double sigma = config.parent.r * config.sigma_star / n;

  EsParams params;
  params.mu = config.mu;
  params.lambda = config.lambda;
  params.tau = config.tau;
  params.sigma0 = sigma;
  params.x0 = embed(problem, config.parent);
  validate(params, problem);

  const std::int64_t blocks = (config.trials + kTrialsPerBlock - 1) / kTrialsPerBlock;
  auto task = [&](std::size_t b) {
    const std::int64_t begin = static_cast<std::int64_t>(b) * kTrialsPerBlock;
    const std::int64_t end = std::min(config.trials, begin + kTrialsPerBlock);
    Rng rng(substream(seed, b));
    EvolutionStrategy es(problem, params);
    EsState state;
    OneGenBlock block;
    for (std::int64_t t = begin; t < end; ++t) {
      state.x = params.x0;
      state.sigma = sigma;
      const GenerationRecord rec = es.step(state, rng);
      block.phi_x.add(n * (config.parent.x - rec.q_centroid) / config.parent.x);
      block.phi_r.add(n * (config.parent.r - rec.qr_centroid) / config.parent.r);
      block.psi.add(sigma > 0.0 ? (state.sigma - sigma) / sigma : 0.0);
    }
    return block;
  };
  const auto partials = run_indexed<OneGenBlock>(static_cast<std::size_t>(blocks), parallelism, task);

  OneGenBlock total;
  for (const auto& p : partials) {
    total.phi_x.merge(p.phi_x);
    total.phi_r.merge(p.phi_r);
    total.psi.merge(p.psi);
  }

  OneGenEstimate out;
  out.sigma_star = config.sigma_star;
  out.trials = config.trials;
  out.phi_x_mc = total.phi_x.estimate();
  out.phi_r_mc = total.phi_r.estimate();
  out.psi_mc = total.psi.estimate();

  const MicroInputs in{config.parent.x, config.parent.r, config.sigma_star, n, problem.xi(),
                       config.mu,       config.lambda,   config.tau};
  const MicroPrediction th = predict_one_generation(in, options);
  out.phi_x_th = th.phi_x.combined;
  out.phi_r_th = th.phi_r.combined;
  out.psi_th = th.psi.combined;
  out.p_feas_th = th.p_feas;
  return out;
}

EnsembleResult dynamics_ensemble(const EsParams& params, const ConeProblem& problem, int runs, const RngSeed& seed,
                                 const Parallelism& parallelism) {
  require(runs >= 1, "need at least one run");
  validate(params, problem);

  auto task = [&](std::size_t i) { return run_es(params, problem, substream(seed, i)); };
  const auto traces = run_indexed<std::vector<GenerationRecord>>(static_cast<std::size_t>(runs), parallelism, task);

  std::size_t longest = 0;
  for (const auto& t : traces) longest = std::max(longest, t.size());

  EnsembleResult out;
  out.mean.resize(longest);
  for (std::size_t g = 0; g < longest; ++g) {
    EnsemblePoint& p = out.mean[g];
    p.g = static_cast<std::int64_t>(g);
    for (const auto& t : traces) {
      if (g >= t.size()) continue;
      p.x += t[g].x;
      p.r += t[g].r;
      p.sigma += t[g].sigma;
      p.sigma_star += t[g].sigma_star;
      ++p.count;
    }
    p.x /= p.count;
    p.r /= p.count;
    p.sigma /= p.count;
    p.sigma_star /= p.count;
  }

  const EsState start = initial_state(params, problem);
  const ReducedPoint start_reduced = reduce(start.x);
  out.deterministic = iterate_deterministic({start_reduced.x, start_reduced.r, start.sigma}, params.mu,
                                            params.lambda, params.tau, problem,
                                            static_cast<int>(params.max_generations));
  return out;
}

namespace {

struct ReplicateAverages {
  double sigma_star = 0.0;
  double phi_x = 0.0;
  double phi_r = 0.0;
  double ratio = 0.0;
  bool short_window = false;
};

ReplicateAverages average_window(const std::vector<GenerationRecord>& trace, const ConeProblem& problem,
                                 std::int64_t burn_in, std::int64_t generations) {
  ReplicateAverages out;
  const auto last = static_cast<std::int64_t>(trace.size()) - 1;  // final record has no successor
  out.short_window = trace.back().g < generations;
  std::int64_t begin = burn_in;
  if (begin >= last) begin = last / 2;
  const double n = problem.dimension();

  std::int64_t count = 0;
  for (std::int64_t g = begin; g < last; ++g) {
    const auto& now = trace[static_cast<std::size_t>(g)];
    const auto& next = trace[static_cast<std::size_t>(g) + 1];
    out.sigma_star += now.sigma_star;
    out.phi_x += n * (now.x - next.x) / now.x;
    out.phi_r += n * (now.r - next.r) / now.r;
    out.ratio += problem.sqrt_xi() * now.r / now.x;
    ++count;
  }
  if (count > 0) {
    out.sigma_star /= count;
    out.phi_x /= count;
    out.phi_r /= count;
    out.ratio /= count;
  }
  return out;
}

}  // namespace

SteadyStateMeasurement measure_steady_state(const EsParams& params, const ConeProblem& problem, int replicates,
                                            double burn_in_fraction, const RngSeed& seed,
                                            const Parallelism& parallelism) {
  require(replicates >= 1, "need at least one replicate");
  require(burn_in_fraction >= 0.0 && burn_in_fraction < 1.0, "burn-in fraction must be in [0, 1)");
  validate(params, problem);
  const std::int64_t generations = params.max_generations;
  const auto burn_in = static_cast<std::int64_t>(std::floor(burn_in_fraction * static_cast<double>(generations)));
  require(generations > burn_in, "generations must exceed the burn-in");

  auto task = [&](std::size_t i) {
    return average_window(run_es(params, problem, substream(seed, i)), problem, burn_in, generations);
  };
  const auto reps = run_indexed<ReplicateAverages>(static_cast<std::size_t>(replicates), parallelism, task);

  Moments sigma_star, phi_x, phi_r, ratio;
  SteadyStateMeasurement out;
  for (const auto& r : reps) {
    sigma_star.add(r.sigma_star);
    phi_x.add(r.phi_x);
    phi_r.add(r.phi_r);
    ratio.add(r.ratio);
    out.short_window = out.short_window || r.short_window;
  }
  out.sigma_star_ss_mc = sigma_star.estimate();
  out.phi_x_ss_mc = phi_x.estimate();
  out.phi_r_ss_mc = phi_r.estimate();
  out.ratio_mc = ratio.estimate();
  out.replicates = replicates;
  out.generations = generations;
  out.burn_in = burn_in;
  return out;
}

double log_linear_slope(const std::vector<double>& values, double from_fraction) {
  require(!values.empty(), "need at least one value");
  const auto last = values.size() - 1;
  const auto begin = static_cast<std::size_t>(std::floor(from_fraction * static_cast<double>(last)));
  double sg = 0.0, sy = 0.0, sgg = 0.0, sgy = 0.0;
  double count = 0.0;
  for (std::size_t g = begin; g <= last; ++g) {
    const double y = std::log(values[g]);
    const double t = static_cast<double>(g);
    sg += t;
    sy += y;
    sgg += t * t;
    sgy += t * y;
    count += 1.0;
  }
  require(count >= 2.0, "need at least two points for a slope");
  return (count * sgy - sg * sy) / (count * sgg - sg * sg);
}

ReducedPoint anchor_parent(ParentAnchor anchor, const ConeProblem& problem) {
  constexpr double near_axis = 0.01;
  const double on_boundary = 1.0 / problem.sqrt_xi();
  switch (anchor) {
    case ParentAnchor::axis:
      return {1.0, near_axis};
    case ParentAnchor::boundary:
      return {1.0, on_boundary};
    case ParentAnchor::midway:
      return {1.0, 0.5 * (near_axis + on_boundary)};
  }
  return {1.0, on_boundary};
}

}  // namespace conesa
