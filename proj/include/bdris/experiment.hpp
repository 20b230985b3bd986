#pragma once

// Monte-Carlo experiment driver: configuration, seeding, the worker pool and
// the three experiment kinds (AO runs over a sweep, passive-solver
// complexity benchmark, single-trial convergence traces).

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <initializer_list>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "json.hpp"

#include "bdris/alternating.hpp"

namespace bdris {

inline constexpr const char *kVersion = "0.1.0";

enum class SweepParameter { None, Power, CsiDelta, RisCells, Groups };

inline std::string to_string(SweepParameter p) {
  switch (p) {
  case SweepParameter::None:
    return "none";
  case SweepParameter::Power:
    return "power";
  case SweepParameter::CsiDelta:
    return "csi_delta";
  case SweepParameter::RisCells:
    return "ris_cells";
  case SweepParameter::Groups:
    return "groups";
  }
  return "unknown";
}

inline SweepParameter parse_sweep_parameter(const std::string &name) {
  for (auto p : {SweepParameter::None, SweepParameter::Power, SweepParameter::CsiDelta,
                 SweepParameter::RisCells, SweepParameter::Groups})
    if (to_string(p) == name)
      return p;
  throw ParameterError("unknown sweep parameter '" + name +
                       "' (expected power, csi_delta, ris_cells or groups)");
}

/// FC (G = 1), SC (G = M) or a fixed group count.
struct Architecture {
  enum class Kind { FullyConnected, SingleConnected, Grouped };
  Kind kind = Kind::Grouped;
  int groups = 0;

  static Architecture fully() { return {Kind::FullyConnected, 1}; }
  static Architecture single() { return {Kind::SingleConnected, 0}; }
  static Architecture grouped(int g) { return {Kind::Grouped, g}; }

  int resolve(int cells) const {
    switch (kind) {
    case Kind::FullyConnected:
      return 1;
    case Kind::SingleConnected:
      return cells;
    case Kind::Grouped:
      return groups;
    }
    return groups;
  }

  nlohmann::json to_json() const {
    if (kind == Kind::FullyConnected)
      return "FC";
    if (kind == Kind::SingleConnected)
      return "SC";
    return groups;
  }

  static Architecture from_json(const nlohmann::json &j) {
    if (j.is_string()) {
      const auto s = j.get<std::string>();
      if (s == "FC")
        return fully();
      if (s == "SC")
        return single();
      throw ParameterError("architecture must be \"FC\", \"SC\" or a group count, got '" +
                           s + "'");
    }
    if (!j.is_number_integer() || j.get<int>() < 1)
      throw ParameterError("architecture group count must be a positive integer");
    return grouped(j.get<int>());
  }
};

struct ExperimentSpec {
  std::string name = "experiment";
  SystemConfig scenario;
  SweepParameter sweep = SweepParameter::None;
  std::vector<double> sweep_values;
  /// Empty means the scenario's own group count.
  std::vector<Architecture> architectures;
  std::vector<SolverKind> solvers{SolverKind::RLbfgs};
  int trials = 1;
  std::uint64_t base_seed = 1;
  AoOptions ao;
  /// Write one per-iteration trace file per run next to the CSV.
  bool write_traces = false;

  /// The sweep values, or a single placeholder when there is no sweep.
  std::vector<double> effective_sweep() const {
    if (sweep == SweepParameter::None)
      return {std::numeric_limits<double>::quiet_NaN()};
    return sweep_values;
  }

  std::vector<Architecture> effective_architectures() const {
    if (sweep == SweepParameter::Groups || architectures.empty())
      return {Architecture::grouped(scenario.groups)};
    return architectures;
  }

  /// Scenario for one sweep value and architecture.
  SystemConfig scenario_for(double sweep_value, const Architecture &arch) const {
    SystemConfig cfg = scenario;
    switch (sweep) {
    case SweepParameter::None:
    case SweepParameter::CsiDelta:
      break;
    case SweepParameter::Power:
      cfg.power_max_w = sweep_value;
      break;
    case SweepParameter::RisCells:
      cfg.ris_cells = static_cast<int>(sweep_value);
      break;
    case SweepParameter::Groups:
      cfg.groups = static_cast<int>(sweep_value);
      break;
    }
    if (sweep != SweepParameter::Groups)
      cfg.groups = arch.resolve(cfg.ris_cells);
    return cfg;
  }

  void validate() const {
    if (trials < 1)
      throw ParameterError("trials must be >= 1");
    if (solvers.empty())
      throw ParameterError("at least one solver is required");
    if (sweep != SweepParameter::None && sweep_values.empty())
      throw ParameterError("sweep '" + to_string(sweep) + "' has no values");
    for (double v : sweep_values) {
      if (!std::isfinite(v))
        throw ParameterError("sweep values must be finite");
      const bool integral = v == std::floor(v);
      if (sweep == SweepParameter::Power && !(v > 0.0))
        throw ParameterError("power sweep values must be positive");
      if (sweep == SweepParameter::CsiDelta && !(v >= 0.0))
        throw ParameterError("csi_delta sweep values must be >= 0");
      if ((sweep == SweepParameter::RisCells || sweep == SweepParameter::Groups) &&
          (!integral || v < 1.0))
        throw ParameterError(to_string(sweep) + " sweep values must be positive integers");
    }
    for (double v : effective_sweep())
      for (const auto &arch : effective_architectures())
        scenario_for(v, arch).validate();
    ao.validate();
  }
};

// ---------------------------------------------------------------------------
// Configuration file (JSON). Every key is optional; unknown keys are errors.
// ---------------------------------------------------------------------------

namespace detail {

inline void reject_unknown(const nlohmann::json &j, std::initializer_list<const char *> keys,
                           const std::string &where) {
  if (!j.is_object())
    throw ParameterError(where + " must be a JSON object");
  for (const auto &item : j.items()) {
    bool known = false;
    for (const char *k : keys)
      known = known || item.key() == k;
    if (!known)
      throw ParameterError("unknown key '" + item.key() + "' in " + where);
  }
}

template <class T>
void read_key(const nlohmann::json &j, const char *key, T &out, const std::string &where) {
  if (!j.contains(key))
    return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception &e) {
    throw ParameterError(where + "." + key + ": " + e.what());
  }
}

inline nlohmann::json point_to_json(Point2 p) { return {p.x, p.y}; }

inline Point2 point_from_json(const nlohmann::json &j, const std::string &where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ParameterError(where + " must be [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

} // namespace detail

inline nlohmann::json to_json(const SystemConfig &c) {
  nlohmann::json j;
  j["num_aps"] = c.num_aps;
  j["num_reflective"] = c.num_reflective;
  j["num_transmissive"] = c.num_transmissive;
  j["antennas_per_ap"] = c.antennas_per_ap;
  j["ris_cells"] = c.ris_cells;
  j["groups"] = c.groups;
  j["power_max_w"] = c.power_max_w;
  j["noise_power_w"] = c.noise_power_w;
  j["rician_k_db"] = c.rician_k_db;
  j["path_loss_ref_db"] = c.path_loss_ref_db;
  j["ref_distance_m"] = c.ref_distance_m;
  j["path_loss_exponent"] = c.path_loss_exponent;
  j["ap_positions"] = nlohmann::json::array();
  for (const auto &p : c.aps())
    j["ap_positions"].push_back(detail::point_to_json(p));
  j["ris_position"] = detail::point_to_json(c.ris_position);
  j["ue_radius_m"] = c.ue_radius_m;
  return j;
}

inline SystemConfig system_config_from_json(const nlohmann::json &j) {
  const std::string where = "scenario";
  detail::reject_unknown(j,
                         {"num_aps", "num_reflective", "num_transmissive", "antennas_per_ap",
                          "ris_cells", "groups", "power_max_w", "noise_power_w", "rician_k_db",
                          "path_loss_ref_db", "ref_distance_m", "path_loss_exponent",
                          "ap_positions", "ris_position", "ue_radius_m"},
                         where);
  SystemConfig c;
  detail::read_key(j, "num_aps", c.num_aps, where);
  detail::read_key(j, "num_reflective", c.num_reflective, where);
  detail::read_key(j, "num_transmissive", c.num_transmissive, where);
  detail::read_key(j, "antennas_per_ap", c.antennas_per_ap, where);
  detail::read_key(j, "ris_cells", c.ris_cells, where);
  detail::read_key(j, "groups", c.groups, where);
  detail::read_key(j, "power_max_w", c.power_max_w, where);
  detail::read_key(j, "noise_power_w", c.noise_power_w, where);
  detail::read_key(j, "rician_k_db", c.rician_k_db, where);
  detail::read_key(j, "path_loss_ref_db", c.path_loss_ref_db, where);
  detail::read_key(j, "ref_distance_m", c.ref_distance_m, where);
  detail::read_key(j, "path_loss_exponent", c.path_loss_exponent, where);
  detail::read_key(j, "ue_radius_m", c.ue_radius_m, where);
  if (j.contains("ap_positions")) {
    if (!j["ap_positions"].is_array())
      throw ParameterError("scenario.ap_positions must be a list of [x, y]");
    for (const auto &p : j["ap_positions"])
      c.ap_positions.push_back(detail::point_from_json(p, "scenario.ap_positions[]"));
  }
  if (j.contains("ris_position"))
    c.ris_position = detail::point_from_json(j["ris_position"], "scenario.ris_position");
  return c;
}

inline nlohmann::json to_json(const ExperimentSpec &s) {
  nlohmann::json j;
  j["name"] = s.name;
  j["scenario"] = to_json(s.scenario);
  if (s.sweep != SweepParameter::None)
    j["sweep"] = {{"parameter", to_string(s.sweep)}, {"values", s.sweep_values}};
  j["architectures"] = nlohmann::json::array();
  for (const auto &a : s.architectures)
    j["architectures"].push_back(a.to_json());
  j["solvers"] = nlohmann::json::array();
  for (auto k : s.solvers)
    j["solvers"].push_back(to_string(k));
  j["trials"] = s.trials;
  j["base_seed"] = s.base_seed;
  j["write_traces"] = s.write_traces;
  j["ao"] = {{"max_outer", s.ao.max_outer},
             {"tolerance", s.ao.tolerance},
             {"inner_max_iters", s.ao.passive.max_iters},
             {"inner_grad_tol", s.ao.passive.grad_tol},
             {"memory", s.ao.passive.memory},
             {"pds_max_iters", s.ao.active.max_iters},
             {"pds_tolerance", s.ao.active.tolerance}};
  return j;
}

inline ExperimentSpec experiment_spec_from_json(const nlohmann::json &j) {
  detail::reject_unknown(j,
                         {"name", "scenario", "sweep", "architectures", "solvers", "trials",
                          "base_seed", "ao", "write_traces"},
                         "config");
  ExperimentSpec s;
  detail::read_key(j, "name", s.name, "config");
  if (j.contains("scenario"))
    s.scenario = system_config_from_json(j["scenario"]);
  if (j.contains("sweep")) {
    const auto &sw = j["sweep"];
    detail::reject_unknown(sw, {"parameter", "values"}, "sweep");
    std::string name = "none";
    detail::read_key(sw, "parameter", name, "sweep");
    s.sweep = parse_sweep_parameter(name);
    detail::read_key(sw, "values", s.sweep_values, "sweep");
  }
  if (j.contains("architectures")) {
    if (!j["architectures"].is_array())
      throw ParameterError("architectures must be a list");
    for (const auto &a : j["architectures"])
      s.architectures.push_back(Architecture::from_json(a));
  }
  if (j.contains("solvers")) {
    if (!j["solvers"].is_array())
      throw ParameterError("solvers must be a list of names");
    s.solvers.clear();
    for (const auto &n : j["solvers"]) {
      if (!n.is_string())
        throw ParameterError("solvers must be a list of names");
      s.solvers.push_back(parse_solver(n.get<std::string>()));
    }
  }
  detail::read_key(j, "trials", s.trials, "config");
  detail::read_key(j, "base_seed", s.base_seed, "config");
  detail::read_key(j, "write_traces", s.write_traces, "config");
  if (j.contains("ao")) {
    const auto &a = j["ao"];
    detail::reject_unknown(a,
                           {"max_outer", "tolerance", "inner_max_iters", "inner_grad_tol",
                            "memory", "pds_max_iters", "pds_tolerance"},
                           "ao");
    detail::read_key(a, "max_outer", s.ao.max_outer, "ao");
    detail::read_key(a, "tolerance", s.ao.tolerance, "ao");
    detail::read_key(a, "inner_max_iters", s.ao.passive.max_iters, "ao");
    detail::read_key(a, "inner_grad_tol", s.ao.passive.grad_tol, "ao");
    detail::read_key(a, "memory", s.ao.passive.memory, "ao");
    detail::read_key(a, "pds_max_iters", s.ao.active.max_iters, "ao");
    detail::read_key(a, "pds_tolerance", s.ao.active.tolerance, "ao");
  }
  s.validate();
  return s;
}

// ---------------------------------------------------------------------------
// Seeds
// ---------------------------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Channel realization and starting point of one trial. Independent of the
/// sweep value, architecture and solver, so every arm of an experiment sees
/// the same networks.
inline std::uint64_t trial_seed(std::uint64_t base_seed, int trial) {
  return splitmix64(splitmix64(base_seed) ^ static_cast<std::uint64_t>(trial));
}

/// CSI-error stream for one (trial, sweep value).
inline std::uint64_t csi_seed(std::uint64_t base_seed, int trial, int sweep_index) {
  return splitmix64(trial_seed(base_seed, trial) ^
                    (0x5bd1e995ULL * (static_cast<std::uint64_t>(sweep_index) + 1)));
}

// ---------------------------------------------------------------------------
// Results
// ---------------------------------------------------------------------------

struct ResultRow {
  std::string kind = "run";  // "run" or "complexity"
  std::string sweep_parameter = "none";
  int sweep_index = 0;
  double sweep_value = std::numeric_limits<double>::quiet_NaN();
  int architecture_index = 0;
  std::string architecture;
  int groups = 0;
  int ris_cells = 0;
  int solver_index = 0;
  std::string solver;
  int trial = 0;
  std::uint64_t seed = 0;
  double sum_se_bits = 0.0;
  double initial_sum_se_bits = 0.0;
  int outer_iterations = 0;
  bool converged = false;
  long passive_iterations = 0;
  double passive_cost = 0.0;
  double time_per_iteration_s = 0.0;
  double c1_residual = 0.0;
  /// min_l (P_l - power_l) / P_l
  double power_margin = 0.0;
  std::string status = "ok";

  bool ok() const { return status == "ok"; }
};

inline bool row_order(const ResultRow &a, const ResultRow &b) {
  auto key = [](const ResultRow &r) {
    return std::tuple(r.kind, r.sweep_index, r.architecture_index, r.solver_index, r.trial);
  };
  return key(a) < key(b);
}

struct TrialOutput {
  ResultRow row;
  AoTrace trace;
};

namespace detail {

/// Runs job(i) for i in [0, count) on `threads` workers; results land in
/// slot i, so the output order never depends on scheduling.
template <class Job>
auto run_pool(std::size_t count, int threads, Job job) {
  using Result = decltype(job(std::size_t{}));
  std::vector<Result> out(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++)
      out[i] = job(i);
  };
  const int n = std::max(1, std::min<int>(threads, static_cast<int>(count)));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t)
    pool.emplace_back(worker);
  worker();
  for (auto &t : pool)
    t.join();
  return out;
}

inline double power_margin(const BeamformerSet &w, const SystemConfig &cfg) {
  double margin = std::numeric_limits<double>::infinity();
  for (double p : w.ap_powers())
    margin = std::min(margin, (cfg.power_max_w - p) / cfg.power_max_w);
  return margin;
}

} // namespace detail

/// One AO run. For a csi_delta sweep the optimization sees corrupted
/// channels and the reported sum-SE is evaluated on the true ones.
inline TrialOutput run_trial(const ExperimentSpec &spec, int sweep_index, int arch_index,
                             int solver_index, int trial) {
  const double value = spec.effective_sweep()[static_cast<std::size_t>(sweep_index)];
  const auto arch = spec.effective_architectures()[static_cast<std::size_t>(arch_index)];
  const SolverKind solver = spec.solvers[static_cast<std::size_t>(solver_index)];
  const SystemConfig cfg = spec.scenario_for(value, arch);

  TrialOutput out;
  ResultRow &row = out.row;
  row.sweep_parameter = to_string(spec.sweep);
  row.sweep_index = sweep_index;
  row.sweep_value = value;
  row.architecture_index = arch_index;
  row.architecture = architecture_label(cfg.ris_cells, cfg.groups);
  row.groups = cfg.groups;
  row.ris_cells = cfg.ris_cells;
  row.solver_index = solver_index;
  row.solver = to_string(solver);
  row.trial = trial;
  row.seed = trial_seed(spec.base_seed, trial);
  try {
    std::mt19937_64 rng(row.seed);
    const ChannelSet truth = generate_network(cfg, rng);
    ChannelSet seen = truth;
    if (spec.sweep == SweepParameter::CsiDelta) {
      std::mt19937_64 err(csi_seed(spec.base_seed, trial, sweep_index));
      seen = corrupt_csi(truth, value, err);
    }
    auto theta0 = ScatteringConfig::random_diagonal(cfg.ris_cells, cfg.groups, rng);
    auto w0 = zero_forcing(effective_channels(seen, theta0), cfg.antennas_per_ap,
                           cfg.power_limits());
    const auto noise = cfg.noise_powers();
    row.initial_sum_se_bits = sum_se(truth, theta0, w0, noise);
    const auto res = alternating_optimize(seen, cfg, std::move(theta0), std::move(w0), solver,
                                          spec.ao);
    row.sum_se_bits = sum_se(truth, res.theta, res.w, noise);
    row.outer_iterations = res.trace.iterations();
    row.converged = res.trace.converged;
    row.passive_iterations = res.trace.passive_iterations();
    row.time_per_iteration_s =
        row.passive_iterations > 0
            ? res.trace.passive_seconds() / static_cast<double>(row.passive_iterations)
            : 0.0;
    row.passive_cost = res.trace.records.empty()
                           ? 0.0
                           : -res.trace.records.back().passive_objective_after;
    row.c1_residual = res.theta.max_c1_residual();
    row.power_margin = detail::power_margin(res.w, cfg);
    out.trace = res.trace;
  } catch (const std::exception &e) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    row.sum_se_bits = row.initial_sum_se_bits = row.passive_cost = nan;
    row.time_per_iteration_s = row.c1_residual = row.power_margin = nan;
    row.status = std::string("error: ") + e.what();
  }
  return out;
}

struct JobIndex {
  int sweep = 0;
  int arch = 0;
  int solver = 0;
  int trial = 0;
};

inline std::vector<JobIndex> enumerate_jobs(const ExperimentSpec &spec) {
  std::vector<JobIndex> jobs;
  const int n_sweep = static_cast<int>(spec.effective_sweep().size());
  const int n_arch = static_cast<int>(spec.effective_architectures().size());
  const int n_solver = static_cast<int>(spec.solvers.size());
  for (int s = 0; s < n_sweep; ++s)
    for (int a = 0; a < n_arch; ++a)
      for (int v = 0; v < n_solver; ++v)
        for (int t = 0; t < spec.trials; ++t)
          jobs.push_back({s, a, v, t});
  return jobs;
}

/// Every sweep value x architecture x solver x trial, rows sorted by that key.
inline std::vector<TrialOutput> run_experiment_traced(const ExperimentSpec &spec,
                                                      int threads = 1) {
  spec.validate();
  const auto jobs = enumerate_jobs(spec);
  auto out = detail::run_pool(jobs.size(), threads, [&](std::size_t i) {
    const auto &j = jobs[i];
    return run_trial(spec, j.sweep, j.arch, j.solver, j.trial);
  });
  std::stable_sort(out.begin(), out.end(),
                   [](const TrialOutput &a, const TrialOutput &b) { return row_order(a.row, b.row); });
  return out;
}

inline std::vector<ResultRow> run_experiment(const ExperimentSpec &spec, int threads = 1) {
  std::vector<ResultRow> rows;
  for (auto &o : run_experiment_traced(spec, threads))
    rows.push_back(std::move(o.row));
  return rows;
}

struct TraceSeries {
  double sweep_value = std::numeric_limits<double>::quiet_NaN();
  std::string solver;
  std::string architecture;
  int groups = 0;
  int trial = 0;
  AoTrace trace;
};

inline TraceSeries trace_series(const TrialOutput &o) {
  return {o.row.sweep_value, o.row.solver, o.row.architecture, o.row.groups, o.row.trial,
          o.trace};
}

/// Convergence traces of one trial for every architecture x solver at the
/// first sweep value.
inline std::vector<TraceSeries> trace_experiment(const ExperimentSpec &spec, int trial = 0,
                                                 int threads = 1) {
  spec.validate();
  if (trial < 0)
    throw ParameterError("trace: trial must be >= 0");
  std::vector<JobIndex> jobs;
  for (int a = 0; a < static_cast<int>(spec.effective_architectures().size()); ++a)
    for (int v = 0; v < static_cast<int>(spec.solvers.size()); ++v)
      jobs.push_back({0, a, v, trial});
  auto outs = detail::run_pool(jobs.size(), threads, [&](std::size_t i) {
    return run_trial(spec, 0, jobs[i].arch, jobs[i].solver, trial);
  });
  std::vector<TraceSeries> series;
  for (const auto &o : outs) {
    if (!o.row.ok())
      throw NumericalError("trace: " + o.row.architecture + "/" + o.row.solver + " failed: " +
                           o.row.status);
    series.push_back(trace_series(o));
  }
  return series;
}

/// A passive subproblem as it appears in the first AO iteration: random
/// network, random diagonal Theta, zero-forcing w and tight FP auxiliaries.
struct PassiveBenchmark {
  PassiveAssembly assembly;
  ScatteringConfig theta;
};

inline PassiveBenchmark make_passive_benchmark(const SystemConfig &cfg, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto chs = generate_network(cfg, rng);
  auto theta = ScatteringConfig::random_diagonal(cfg.ris_cells, cfg.groups, rng);
  const auto h = effective_channels(chs, theta);
  const auto w = zero_forcing(h, cfg.antennas_per_ap, cfg.power_limits());
  const auto aux = update_fp_aux(h, w, cfg.noise_powers());
  return {assemble_passive(chs, w, aux), std::move(theta)};
}

/// Passive-solver benchmark: one group sweep per instance, timing the solver
/// only. The first instance of every (sweep value, architecture, solver) arm
/// is solved once untimed before measurement. Runs single-threaded so the
/// timings are not perturbed by sibling jobs.
inline std::vector<ResultRow> compare_complexity(const ExperimentSpec &spec) {
  spec.validate();
  if (spec.sweep == SweepParameter::CsiDelta || spec.sweep == SweepParameter::Power)
    throw ParameterError("complexity benchmark sweeps ris_cells or groups only");
  using Clock = std::chrono::steady_clock;
  std::vector<ResultRow> rows;
  const auto values = spec.effective_sweep();
  const auto archs = spec.effective_architectures();
  for (std::size_t s = 0; s < values.size(); ++s)
    for (std::size_t a = 0; a < archs.size(); ++a) {
      const SystemConfig cfg = spec.scenario_for(values[s], archs[a]);
      for (std::size_t v = 0; v < spec.solvers.size(); ++v) {
        const SolverKind solver = spec.solvers[v];
        {
          const auto warm = make_passive_benchmark(cfg, trial_seed(spec.base_seed, 0));
          (void)optimize_passive(warm.assembly, warm.theta, solver, spec.ao.passive);
        }
        for (int t = 0; t < spec.trials; ++t) {
          ResultRow row;
          row.kind = "complexity";
          row.sweep_parameter = to_string(spec.sweep);
          row.sweep_index = static_cast<int>(s);
          row.sweep_value = values[s];
          row.architecture_index = static_cast<int>(a);
          row.architecture = architecture_label(cfg.ris_cells, cfg.groups);
          row.groups = cfg.groups;
          row.ris_cells = cfg.ris_cells;
          row.solver_index = static_cast<int>(v);
          row.solver = to_string(solver);
          row.trial = t;
          row.seed = trial_seed(spec.base_seed, t);
          try {
            const auto bench = make_passive_benchmark(cfg, row.seed);
            const auto t0 = Clock::now();
            const auto res = optimize_passive(bench.assembly, bench.theta, solver,
                                              spec.ao.passive);
            const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
            row.passive_iterations = res.total_iterations();
            row.time_per_iteration_s =
                row.passive_iterations > 0 ? secs / static_cast<double>(row.passive_iterations)
                                           : 0.0;
            row.passive_cost = -passive_objective(bench.assembly, res.theta);
            row.converged = true;
            for (const auto &tr : res.group_traces)
              row.converged = row.converged && tr.termination == Termination::GradientTolerance;
            row.c1_residual = res.theta.max_c1_residual();
            row.power_margin = 0.0;
          } catch (const std::exception &e) {
            row.status = std::string("error: ") + e.what();
            row.passive_cost = row.time_per_iteration_s = row.c1_residual =
                std::numeric_limits<double>::quiet_NaN();
          }
          rows.push_back(std::move(row));
        }
      }
    }
  std::stable_sort(rows.begin(), rows.end(), row_order);
  return rows;
}

} // namespace bdris
