#pragma once

// Alternating optimization of (w, Theta): tau/rho update, active QCQP,
// group-wise passive update, repeated until the sum-SE settles.

#include <chrono>
#include <cmath>
#include <random>
#include <vector>

#include "bdris/passive.hpp"

namespace bdris {

struct AoOptions {
  int max_outer = 100;
  /// Stop when |SE_t - SE_{t-1}| < tolerance * SE_{t-1}.
  double tolerance = 1e-4;
  SolverOptions passive;
  PdsOptions active;

  void validate() const {
    if (max_outer < 1)
      throw ParameterError("AoOptions: max_outer must be >= 1");
    if (!(tolerance >= 0.0))
      throw ParameterError("AoOptions: tolerance must be >= 0");
    passive.validate();
    active.validate();
  }
};

struct AoRecord {
  int iteration = 0;
  double sum_se_bits = 0.0;
  /// Surrogate (nats) right after the tau/rho update; equals ln 2 * SE of
  /// the previous iterate.
  double surrogate_tight = 0.0;
  /// Surrogate (nats) after the w and Theta updates, same tau/rho.
  double surrogate_after = 0.0;
  /// |surrogate_tight - ln 2 * SE_{t-1}|
  double tightness_gap = 0.0;
  double passive_objective_before = 0.0;
  double passive_objective_after = 0.0;
  std::vector<double> ap_power;
  double c1_residual = 0.0;
  int active_iterations = 0;
  bool active_kept_previous = false;
  int passive_iterations = 0;
  double active_seconds = 0.0;
  double passive_seconds = 0.0;
  double seconds = 0.0;
};

struct AoTrace {
  double initial_sum_se = 0.0;
  std::vector<AoRecord> records;
  bool converged = false;

  int iterations() const { return static_cast<int>(records.size()); }
  double final_sum_se() const {
    return records.empty() ? initial_sum_se : records.back().sum_se_bits;
  }
  int passive_iterations() const {
    int n = 0;
    for (const auto &r : records)
      n += r.passive_iterations;
    return n;
  }
  double passive_seconds() const {
    double s = 0.0;
    for (const auto &r : records)
      s += r.passive_seconds;
    return s;
  }
};

struct AoResult {
  BeamformerSet w;
  ScatteringConfig theta;
  AoTrace trace;
};

/// Runs the alternating optimization from an explicit starting point.
inline AoResult alternating_optimize(const ChannelSet &chs, const SystemConfig &cfg,
                                     ScatteringConfig theta, BeamformerSet w,
                                     SolverKind solver, const AoOptions &opts = {}) {
  using Clock = std::chrono::steady_clock;
  auto seconds_since = [](Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
  };
  opts.validate();
  cfg.validate();
  chs.check_consistent();
  const auto noise = cfg.noise_powers();
  const auto limits = cfg.power_limits();
  detail::require_shape(chs.num_aps() == cfg.num_aps && chs.num_ues() == cfg.num_ues() &&
                            chs.cells() == cfg.ris_cells &&
                            chs.antennas() == cfg.antennas_per_ap,
                        "alternating_optimize: channels do not match the system config");

  AoResult res{std::move(w), std::move(theta), {}};
  auto h = effective_channels(chs, res.theta);
  double se = sum_se(h, res.w, noise);
  res.trace.initial_sum_se = se;

  for (int it = 1; it <= opts.max_outer; ++it) {
    const auto t0 = Clock::now();
    AoRecord rec;
    rec.iteration = it;

    const FPAux aux = update_fp_aux(h, res.w, noise);
    rec.surrogate_tight = surrogate_value(aux, h, res.w, noise);
    rec.tightness_gap = std::abs(rec.surrogate_tight - std::numbers::ln2 * se);

    const auto ta = Clock::now();
    auto active = solve_active(aux, h, limits, cfg.antennas_per_ap, opts.active);
    rec.active_iterations = active.iterations;
    // The QCQP is solved to a finite tolerance; never accept a w that lowers
    // the surrogate below the current (feasible) one.
    if (surrogate_value(aux, h, active.w, noise) >= rec.surrogate_tight)
      res.w = std::move(active.w);
    else
      rec.active_kept_previous = true;
    rec.active_seconds = seconds_since(ta);

    const auto tp = Clock::now();
    const auto assembly = assemble_passive(chs, res.w, aux);
    rec.passive_objective_before = passive_objective(assembly, res.theta);
    auto passive = optimize_passive(assembly, res.theta, solver, opts.passive);
    rec.passive_objective_after = passive_objective(assembly, passive.theta);
    rec.passive_iterations = passive.total_iterations();
    res.theta = std::move(passive.theta);
    rec.passive_seconds = seconds_since(tp);

    h = effective_channels(chs, res.theta);
    rec.surrogate_after = surrogate_value(aux, h, res.w, noise);
    const double prev = se;
    se = sum_se(h, res.w, noise);
    rec.sum_se_bits = se;
    rec.ap_power = res.w.ap_powers();
    rec.c1_residual = res.theta.max_c1_residual();
    rec.seconds = seconds_since(t0);
    res.trace.records.push_back(std::move(rec));

    if (std::abs(se - prev) <= opts.tolerance * std::abs(prev)) {
      res.trace.converged = true;
      break;
    }
  }
  return res;
}

/// Random diagonal Theta (from `rng`) and zero-forcing w, then the
/// alternating optimization.
template <class Rng>
AoResult alternating_optimize(const ChannelSet &chs, const SystemConfig &cfg,
                              SolverKind solver, Rng &rng, const AoOptions &opts = {}) {
  auto theta = ScatteringConfig::random_diagonal(cfg.ris_cells, cfg.groups, rng);
  auto w = zero_forcing(effective_channels(chs, theta), cfg.antennas_per_ap,
                        cfg.power_limits());
  return alternating_optimize(chs, cfg, std::move(theta), std::move(w), solver, opts);
}

} // namespace bdris
