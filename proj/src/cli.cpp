#include "conesa/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <system_error>

#include "conesa/dynamics.hpp"
#include "conesa/errors.hpp"

namespace conesa::cli {
namespace {

/// Raw option text; every value is converted after CLI11 has matched the
/// flags so that all conversion and range errors can be reported together.
struct RawOptions {
  std::map<std::string, std::string> values;
};

struct FlagSpec {
  const char* name;
  const char* help;
};

constexpr FlagSpec kDim{"dim", "search space dimension N (default 1000)"};
constexpr FlagSpec kXi{"xi", "cone parameter xi (default 20)"};
constexpr FlagSpec kMu{"mu", "parents mu (default 3)"};
constexpr FlagSpec kLambda{"lambda", "offspring lambda (default 10)"};
constexpr FlagSpec kTau{"tau", "learning parameter (default 1/sqrt(2N))"};
constexpr FlagSpec kSigma0{"sigma0", "initial mutation strength (default 1e-4)"};
constexpr FlagSpec kX0{"x0", "initial distance along the axis (default 100)"};
constexpr FlagSpec kR0{"r0", "initial distance from the axis (default 1)"};
constexpr FlagSpec kPoint{"point", "comma-separated search point; its length sets N"};
constexpr FlagSpec kTrials{"trials", "one-generation trials per sigma* (default 100000)"};
constexpr FlagSpec kRuns{"runs", "independent runs (default 20)"};
constexpr FlagSpec kGenerations{"generations", "generations per run (default 50 N)"};
constexpr FlagSpec kBurnIn{"burn-in", "fraction of generations discarded (default 0.5)"};
constexpr FlagSpec kSeed{"seed", "base seed (default 1)"};
constexpr FlagSpec kFTarget{"f-target", "stop when f <= target (default 1e-30; steady: -inf)"};
constexpr FlagSpec kThreads{"threads", "worker threads, 0 = all cores (default 0)"};
constexpr FlagSpec kParent{"parent", "parent anchor: axis, boundary or midway (default boundary)"};
constexpr FlagSpec kSigmaStar{"sigma-star", "comma-separated sigma* grid (default 0.25,0.5,1,2,4,8)"};

std::vector<FlagSpec> flags_for(Command command) {
  switch (command) {
    case Command::project:
      return {kDim, kXi, kX0, kR0, kPoint};
    case Command::onegen:
      return {kDim, kXi, kMu, kLambda, kTau, kParent, kTrials, kSeed, kSigmaStar, kThreads};
    case Command::dynamics:
      return {kDim, kXi, kMu, kLambda, kTau, kSigma0, kX0, kR0, kRuns, kGenerations, kSeed, kFTarget, kThreads};
    case Command::steady:
      return {kDim,  kXi,          kMu,     kLambda, kTau,     kSigma0, kX0, kR0,
              kRuns, kGenerations, kBurnIn, kSeed,   kFTarget, kThreads};
    case Command::predict:
      return {kDim, kXi, kMu, kLambda, kTau};
  }
  return {};
}

constexpr Command kCommands[] = {Command::project, Command::onegen, Command::dynamics, Command::steady,
                                 Command::predict};

const char* command_help(Command command) {
  switch (command) {
    case Command::project:
      return "project a point onto the cone";
    case Command::onegen:
      return "one-generation progress rates and SAR: Monte Carlo vs closed form";
    case Command::dynamics:
      return "averaged ES runs vs the deterministic mean-value iteration";
    case Command::steady:
      return "measured steady state vs closed-form prediction";
    case Command::predict:
      return "closed-form steady-state prediction";
  }
  return "";
}

template <class T>
bool parse_number(const std::string& text, T& out) {
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

bool parse_list(const std::string& text, std::vector<double>& out) {
  out.clear();
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    double v = 0.0;
    if (!parse_number(text.substr(start, comma - start), v)) return false;
    out.push_back(v);
    if (comma == std::string::npos) return true;
    start = comma + 1;
  }
}

class Converter {
 public:
  explicit Converter(const RawOptions& raw) : raw_(raw) {}

  bool given(const char* name) const { return raw_.values.count(name) > 0; }

  template <class T>
  void number(const char* name, T& out) {
    const auto it = raw_.values.find(name);
    if (it == raw_.values.end()) return;
    if (!parse_number(it->second, out)) invalid(name, "'" + it->second + "' is not a valid number");
  }

  void list(const char* name, std::vector<double>& out) {
    const auto it = raw_.values.find(name);
    if (it == raw_.values.end()) return;
    if (!parse_list(it->second, out)) invalid(name, "'" + it->second + "' is not a comma-separated list of numbers");
  }

  void check(bool ok, const char* name, const std::string& message) {
    if (!ok && failed_.count(name) == 0) invalid(name, message);
  }

  void invalid(const char* name, const std::string& message) {
    failed_.insert({name, true});
    errors_ += std::string("  --") + name + ": " + message + "\n";
  }

  const std::string& errors() const { return errors_; }

 private:
  const RawOptions& raw_;
  std::map<std::string, bool> failed_;
  std::string errors_;
};

bool finite(double v) { return std::isfinite(v); }

RunConfig convert(Command command, const RawOptions& raw) {
  RunConfig config;
  config.command = command;
  Converter c(raw);

  c.number("dim", config.dimension);
  c.number("xi", config.xi);
  c.number("mu", config.mu);
  c.number("lambda", config.lambda);
  c.number("sigma0", config.sigma0);
  c.number("x0", config.x0);
  c.number("r0", config.r0);
  c.list("point", config.point);
  c.number("trials", config.trials);
  c.number("runs", config.runs);
  c.number("burn-in", config.burn_in);
  c.number("seed", config.seed);
  c.number("threads", config.threads);
  c.list("sigma-star", config.sigma_star_grid);
  if (const auto it = raw.values.find("output"); it != raw.values.end()) config.output = it->second;

  if (c.given("point")) {
    const auto n = static_cast<int>(config.point.size());
    c.check(!c.given("dim") || n == config.dimension, "point", "length does not match --dim");
    config.dimension = n;
    for (double v : config.point) c.check(finite(v), "point", "entries must be finite");
  }

  c.check(config.dimension >= 2, c.given("point") ? "point" : "dim", "dimension must be >= 2");
  c.check(finite(config.xi) && config.xi > 0.0, "xi", "must be finite and > 0");
  c.check(config.mu >= 1, "mu", "must be >= 1");
  c.check(config.lambda > config.mu, "lambda", "must exceed mu");
  c.check(finite(config.sigma0) && config.sigma0 >= 0.0, "sigma0", "must be finite and >= 0");
  c.check(finite(config.x0), "x0", "must be finite");
  c.check(finite(config.r0) && config.r0 >= 0.0, "r0", "must be finite and >= 0");
  c.check(config.trials >= 2, "trials", "must be >= 2");
  c.check(config.runs >= 1, "runs", "must be >= 1");
  c.check(config.threads >= 0, "threads", "must be >= 0");
  for (double s : config.sigma_star_grid) c.check(finite(s) && s >= 0.0, "sigma-star", "entries must be finite and >= 0");

  config.tau = config.dimension >= 2 ? 1.0 / std::sqrt(2.0 * config.dimension) : 0.0;
  c.number("tau", config.tau);
  c.check(finite(config.tau) && config.tau >= 0.0, "tau", "must be finite and >= 0");

  config.generations = config.dimension >= 2 ? 50 * static_cast<std::int64_t>(config.dimension) : 1;
  c.number("generations", config.generations);
  c.check(config.generations >= 1, "generations", "must be >= 1");
  c.check(config.burn_in >= 0.0 && config.burn_in < 1.0, "burn-in", "must lie in [0, 1)");
  if (config.generations >= 1 && config.burn_in >= 0.0 && config.burn_in < 1.0) {
    const double dropped = std::floor(config.burn_in * static_cast<double>(config.generations));
    c.check(dropped < static_cast<double>(config.generations), "burn-in", "leaves no generations to average");
  }

  if (command == Command::steady) config.f_target = -std::numeric_limits<double>::infinity();
  c.number("f-target", config.f_target);
  c.check(!std::isnan(config.f_target), "f-target", "must be a number");

  if (const auto it = raw.values.find("parent"); it != raw.values.end()) {
    if (it->second == "axis") {
      config.parent = ParentAnchor::axis;
    } else if (it->second == "boundary") {
      config.parent = ParentAnchor::boundary;
    } else if (it->second == "midway") {
      config.parent = ParentAnchor::midway;
    } else {
      c.invalid("parent", "'" + it->second + "' is not one of axis, boundary, midway");
    }
  }

  if (!c.errors().empty()) throw UsageError("invalid arguments:\n" + c.errors());
  return config;
}

const char* parent_name(ParentAnchor anchor) {
  switch (anchor) {
    case ParentAnchor::axis:
      return "axis";
    case ParentAnchor::boundary:
      return "boundary";
    case ParentAnchor::midway:
      return "midway";
  }
  return "boundary";
}

std::string format_list(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ',';
    out += format_double(values[i]);
  }
  return out;
}

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void metadata(const RunConfig& config) {
    out_ << "# conesa";
    for (const auto& arg : canonical_arguments(config)) out_ << ' ' << arg;
    out_ << '\n';
    out_ << "# seed: " << config.seed << '\n';
    out_ << "# version: " << kVersion << '\n';
  }

  void header(std::initializer_list<const char*> columns) {
    bool first = true;
    for (const char* c : columns) {
      if (!first) out_ << ',';
      out_ << c;
      first = false;
    }
    out_ << '\n';
  }

  CsvWriter& cell(double v) { return put(format_double(v)); }
  CsvWriter& cell(std::int64_t v) { return put(std::to_string(v)); }
  CsvWriter& cell(int v) { return put(std::to_string(v)); }
  CsvWriter& cell(const std::string& v) { return put(v); }

  void end_row() {
    out_ << '\n';
    first_ = true;
  }

 private:
  CsvWriter& put(const std::string& text) {
    if (!first_) out_ << ',';
    out_ << text;
    first_ = false;
    return *this;
  }

  std::ostream& out_;
  bool first_ = true;
};

EsParams es_params(const RunConfig& config, const ConeProblem& problem) {
  EsParams params;
  params.mu = config.mu;
  params.lambda = config.lambda;
  params.tau = config.tau;
  params.sigma0 = config.sigma0;
  params.x0 = reduced_start(problem, config.x0, config.r0);
  params.max_generations = config.generations;
  params.f_target = config.f_target;
  return params;
}

void write_project(const RunConfig& config, CsvWriter& csv) {
  const ConeProblem problem(config.dimension, config.xi);
  if (!config.point.empty()) {
    const SearchPoint projected = project_onto_cone(problem, config.point);
    csv.header({"k", "p", "projected"});
    for (std::size_t k = 0; k < projected.size(); ++k) {
      csv.cell(static_cast<std::int64_t>(k)).cell(config.point[k]).cell(projected[k]).end_row();
    }
    return;
  }
  const ReducedPoint projected = project_reduced(problem, {config.x0, config.r0});
  csv.header({"x", "r", "q", "q_r", "feasible"});
  csv.cell(config.x0).cell(config.r0).cell(projected.x).cell(projected.r);
  csv.cell(is_feasible(problem, ReducedPoint{config.x0, config.r0}) ? 1 : 0).end_row();
}

void write_onegen(const RunConfig& config, CsvWriter& csv) {
  const ConeProblem problem(config.dimension, config.xi);
  csv.header({"sigma_star", "phi_x_mc", "phi_x_se", "phi_x_th", "phi_r_mc", "phi_r_se", "phi_r_th", "psi_mc",
              "psi_se", "psi_th"});
  const RngSeed base{config.seed, 0};
  for (std::size_t i = 0; i < config.sigma_star_grid.size(); ++i) {
    OneGenConfig one;
    one.parent = anchor_parent(config.parent, problem);
    one.sigma_star = config.sigma_star_grid[i];
    one.mu = config.mu;
    one.lambda = config.lambda;
    one.tau = config.tau;
    one.trials = config.trials;
    const OneGenEstimate e = one_generation_mc(one, problem, substream(base, i), Parallelism{config.threads});
    csv.cell(e.sigma_star)
        .cell(e.phi_x_mc.mean)
        .cell(e.phi_x_mc.standard_error)
        .cell(e.phi_x_th)
        .cell(e.phi_r_mc.mean)
        .cell(e.phi_r_mc.standard_error)
        .cell(e.phi_r_th)
        .cell(e.psi_mc.mean)
        .cell(e.psi_mc.standard_error)
        .cell(e.psi_th)
        .end_row();
  }
}

void write_dynamics(const RunConfig& config, CsvWriter& csv) {
  const ConeProblem problem(config.dimension, config.xi);
  const EsParams params = es_params(config, problem);
  const EnsembleResult result =
      dynamics_ensemble(params, problem, config.runs, RngSeed{config.seed, 0}, Parallelism{config.threads});
  csv.header({"g", "x_mc", "r_mc", "sigma_mc", "sigma_star_mc", "runs_alive", "x_th", "r_th", "sigma_th",
              "sigma_star_th"});
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const std::size_t rows = std::max(result.mean.size(), result.deterministic.states.size());
  const double n = config.dimension;
  for (std::size_t g = 0; g < rows; ++g) {
    csv.cell(static_cast<std::int64_t>(g));
    if (g < result.mean.size()) {
      const EnsemblePoint& p = result.mean[g];
      csv.cell(p.x).cell(p.r).cell(p.sigma).cell(p.sigma_star).cell(p.count);
    } else {
      csv.cell(nan).cell(nan).cell(nan).cell(nan).cell(0);
    }
    if (g < result.deterministic.states.size()) {
      const DeterministicState& s = result.deterministic.states[g];
      csv.cell(s.x).cell(s.r).cell(s.sigma).cell(s.r > 0.0 ? n * s.sigma / s.r : nan);
    } else {
      csv.cell(nan).cell(nan).cell(nan).cell(nan);
    }
    csv.end_row();
  }
}

void write_steady(const RunConfig& config, CsvWriter& csv) {
  const ConeProblem problem(config.dimension, config.xi);
  const EsParams params = es_params(config, problem);
  const SteadyStateMeasurement m = measure_steady_state(params, problem, config.runs, config.burn_in,
                                                        RngSeed{config.seed, 0}, Parallelism{config.threads});
  const SteadyStatePrediction p = steady_state_predict(config.mu, config.lambda, config.tau, config.xi,
                                                       config.dimension);
  csv.header({"mu", "lambda", "xi", "dim", "sigma_star_ss_mc", "sigma_star_ss_se", "sigma_star_ss_th", "phi_x_ss_mc",
              "phi_x_ss_se", "phi_r_ss_mc", "phi_r_ss_se", "phi_ss_th", "ratio_mc", "ratio_se", "ratio_th",
              "replicates", "generations", "burn_in", "short_window"});
  csv.cell(config.mu)
      .cell(config.lambda)
      .cell(config.xi)
      .cell(config.dimension)
      .cell(m.sigma_star_ss_mc.mean)
      .cell(m.sigma_star_ss_mc.standard_error)
      .cell(p.sigma_star_ss)
      .cell(m.phi_x_ss_mc.mean)
      .cell(m.phi_x_ss_mc.standard_error)
      .cell(m.phi_r_ss_mc.mean)
      .cell(m.phi_r_ss_mc.standard_error)
      .cell(p.phi_star_ss)
      .cell(m.ratio_mc.mean)
      .cell(m.ratio_mc.standard_error)
      .cell(p.boundary_ratio)
      .cell(m.replicates)
      .cell(m.generations)
      .cell(m.burn_in)
      .cell(m.short_window ? 1 : 0)
      .end_row();
}

void write_predict(const RunConfig& config, CsvWriter& csv) {
  const SteadyStatePrediction p = steady_state_predict(config.mu, config.lambda, config.tau, config.xi,
                                                       config.dimension);
  csv.header({"sigma_star_ss", "phi_star_ss", "sigma_star_max", "phi_star_max", "tau_opt", "ratio",
              "ratio_linearized"});
  csv.cell(p.sigma_star_ss)
      .cell(p.phi_star_ss)
      .cell(p.sigma_star_max)
      .cell(p.phi_star_max)
      .cell(p.tau_opt.value_or(std::numeric_limits<double>::quiet_NaN()))
      .cell(p.boundary_ratio)
      .cell(p.boundary_ratio_linearized)
      .end_row();
}

std::string help_text(const CLI::App& app) { return app.help(); }

}  // namespace

const char* command_name(Command command) {
  switch (command) {
    case Command::project:
      return "project";
    case Command::onegen:
      return "onegen";
    case Command::dynamics:
      return "dynamics";
    case Command::steady:
      return "steady";
    case Command::predict:
      return "predict";
  }
  return "";
}

std::string format_double(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, ptr);
}

RunConfig parse_config(const std::vector<std::string>& args) {
  CLI::App app("Self-adaptive evolution strategy with projection repair on a conically constrained problem",
               "conesa");
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  RawOptions raw;
  std::map<const CLI::App*, Command> commands;
  for (Command command : kCommands) {
    CLI::App* sub = app.add_subcommand(command_name(command), command_help(command));
    commands[sub] = command;
    for (const FlagSpec& flag : flags_for(command)) {
      sub->add_option_function<std::string>(
             std::string("--") + flag.name,
             [&raw, name = std::string(flag.name)](const std::string& v) { raw.values[name] = v; }, flag.help)
          ->allow_extra_args(false);
    }
    sub->add_option_function<std::string>(
        "-o,--output", [&raw](const std::string& v) { raw.values["output"] = v; },
        std::string("CSV destination (default: stdout, or $") + kOutputDirEnv + "/<command>.csv)");
  }

  if (args.empty()) throw HelpRequested(help_text(app));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    const auto subs = app.get_subcommands();
    throw HelpRequested(subs.empty() ? app.help() : subs.front()->help());
  } catch (const CLI::CallForAllHelp&) {
    throw HelpRequested(app.help("", CLI::AppFormatMode::All));
  } catch (const CLI::CallForVersion&) {
    throw HelpRequested(std::string("conesa ") + kVersion + "\n");
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }
  return convert(commands.at(app.get_subcommands().front()), raw);
}

std::vector<std::string> canonical_arguments(const RunConfig& config) {
  std::vector<std::string> out{command_name(config.command)};
  auto put = [&out](const char* name, const std::string& value) {
    out.push_back(std::string("--") + name + "=" + value);
  };
  auto put_d = [&put](const char* name, double v) { put(name, format_double(v)); };
  auto put_i = [&put](const char* name, std::int64_t v) { put(name, std::to_string(v)); };

  switch (config.command) {
    case Command::project:
      put_d("xi", config.xi);
      if (!config.point.empty()) {
        put("point", format_list(config.point));
      } else {
        put_i("dim", config.dimension);
        put_d("x0", config.x0);
        put_d("r0", config.r0);
      }
      break;
    case Command::onegen:
      put_i("dim", config.dimension);
      put_d("xi", config.xi);
      put_i("mu", config.mu);
      put_i("lambda", config.lambda);
      put_d("tau", config.tau);
      put("parent", parent_name(config.parent));
      put_i("trials", config.trials);
      put("seed", std::to_string(config.seed));
      put("sigma-star", format_list(config.sigma_star_grid));
      break;
    case Command::dynamics:
    case Command::steady:
      put_i("dim", config.dimension);
      put_d("xi", config.xi);
      put_i("mu", config.mu);
      put_i("lambda", config.lambda);
      put_d("tau", config.tau);
      put_d("sigma0", config.sigma0);
      put_d("x0", config.x0);
      put_d("r0", config.r0);
      put_i("runs", config.runs);
      put_i("generations", config.generations);
      if (config.command == Command::steady) put_d("burn-in", config.burn_in);
      put("seed", std::to_string(config.seed));
      put_d("f-target", config.f_target);
      break;
    case Command::predict:
      put_i("dim", config.dimension);
      put_d("xi", config.xi);
      put_i("mu", config.mu);
      put_i("lambda", config.lambda);
      put_d("tau", config.tau);
      break;
  }
  return out;
}

void dispatch(const RunConfig& config, std::ostream& out) {
  CsvWriter csv(out);
  csv.metadata(config);
  switch (config.command) {
    case Command::project:
      write_project(config, csv);
      break;
    case Command::onegen:
      write_onegen(config, csv);
      break;
    case Command::dynamics:
      write_dynamics(config, csv);
      break;
    case Command::steady:
      write_steady(config, csv);
      break;
    case Command::predict:
      write_predict(config, csv);
      break;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig config;
  try {
    config = parse_config(args);
  } catch (const HelpRequested& h) {
    out << h.what();
    return 0;
  } catch (const UsageError& e) {
    err << "conesa: " << e.what() << "\nRun 'conesa --help' for usage.\n";
    return 1;
  }

  try {
    std::ostringstream buffer;
    dispatch(config, buffer);

    std::string path = config.output;
    if (path.empty()) {
      if (const char* dir = std::getenv(kOutputDirEnv); dir != nullptr && *dir != '\0') {
        path = (std::filesystem::path(dir) / (std::string(command_name(config.command)) + ".csv")).string();
      }
    }
    if (path.empty()) {
      out << buffer.str();
      out.flush();
      if (!out) throw std::runtime_error("failed to write to standard output");
      return 0;
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw std::runtime_error("cannot open '" + path + "' for writing");
    file << buffer.str();
    file.close();
    if (!file) throw std::runtime_error("failed to write '" + path + "'");
    return 0;
  } catch (const std::exception& e) {
    err << "conesa: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace conesa::cli
