#pragma once

// Active side of the fractional-programming alternating optimization:
// stacked beamformers, SINR / sum-SE evaluation, the closed-form auxiliary
// updates, the per-AP power constrained quadratic program and the
// zero-forcing start.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Cholesky>

#include "bdris/channel.hpp"

namespace bdris {

/// w = [w_1; ...; w_K], w_k = [w_{1,k}; ...; w_{L,k}], each w_{l,k} of length N.
class BeamformerSet {
public:
  BeamformerSet() = default;
  BeamformerSet(Index aps, Index ues, Index antennas)
      : aps_(aps), ues_(ues), antennas_(antennas),
        w_(CVector::Zero(aps * ues * antennas)) {
    if (aps < 1 || ues < 1 || antennas < 1)
      throw ParameterError("BeamformerSet: dimensions must be >= 1");
  }

  Index num_aps() const { return aps_; }
  Index num_ues() const { return ues_; }
  Index antennas() const { return antennas_; }
  Index user_dim() const { return aps_ * antennas_; }

  const CVector &stacked() const { return w_; }
  CVector &stacked() { return w_; }

  auto user(Index k) { return w_.segment(k * user_dim(), user_dim()); }
  auto user(Index k) const { return w_.segment(k * user_dim(), user_dim()); }

  auto slice(Index l, Index k) {
    return w_.segment((k * aps_ + l) * antennas_, antennas_);
  }
  auto slice(Index l, Index k) const {
    return w_.segment((k * aps_ + l) * antennas_, antennas_);
  }

  /// sum_k ||w_{l,k}||^2
  double ap_power(Index l) const {
    double p = 0.0;
    for (Index k = 0; k < ues_; ++k)
      p += slice(l, k).squaredNorm();
    return p;
  }

  std::vector<double> ap_powers() const {
    std::vector<double> out;
    for (Index l = 0; l < aps_; ++l)
      out.push_back(ap_power(l));
    return out;
  }

private:
  Index aps_ = 0;
  Index ues_ = 0;
  Index antennas_ = 0;
  CVector w_;
};

/// Per-UE auxiliary variables of the Lagrangian-dual + quadratic transform.
struct FPAux {
  std::vector<double> rho;
  std::vector<Complex> tau;

  Complex eta(Index k) const {
    const auto i = static_cast<std::size_t>(k);
    return std::sqrt(1.0 + rho[i]) * tau[i];
  }
};

namespace detail {

inline void check_active_inputs(const EffectiveChannels &h, const BeamformerSet &w,
                                const std::vector<double> &noise) {
  require_shape(static_cast<Index>(h.size()) == w.num_ues() &&
                    noise.size() == h.size(),
                "UE count mismatch between channels, beamformers and noise");
  for (const auto &hk : h)
    require_shape(hk.size() == w.user_dim(), "effective channel length != L*N");
}

/// |h_k^H w_j|^2 for all j, and the desired-signal coefficient h_k^H w_k.
struct LinkGains {
  Complex signal;
  double signal_power = 0.0;
  double interference = 0.0;
};

inline LinkGains link_gains(const EffectiveChannels &h, const BeamformerSet &w, Index k) {
  LinkGains out;
  const auto &hk = h[static_cast<std::size_t>(k)];
  for (Index j = 0; j < w.num_ues(); ++j) {
    const Complex c = hk.dot(w.user(j));
    if (j == k) {
      out.signal = c;
      out.signal_power = std::norm(c);
    } else {
      out.interference += std::norm(c);
    }
  }
  return out;
}

} // namespace detail

inline std::vector<double> sinr(const EffectiveChannels &h, const BeamformerSet &w,
                                const std::vector<double> &noise) {
  detail::check_active_inputs(h, w, noise);
  std::vector<double> out;
  for (Index k = 0; k < w.num_ues(); ++k) {
    const auto g = detail::link_gains(h, w, k);
    out.push_back(g.signal_power / (g.interference + noise[static_cast<std::size_t>(k)]));
  }
  return out;
}

/// sum_k log2(1 + SINR_k), bits/s/Hz.
inline double sum_se(const EffectiveChannels &h, const BeamformerSet &w,
                     const std::vector<double> &noise) {
  double total = 0.0;
  for (double g : sinr(h, w, noise))
    total += std::log2(1.0 + g);
  return total;
}

inline double sum_se(const ChannelSet &chs, const ScatteringConfig &theta,
                     const BeamformerSet &w, const std::vector<double> &noise) {
  return sum_se(effective_channels(chs, theta), w, noise);
}

/// rho_k = SINR_k, then tau_k = sqrt(1+rho_k) h_k^H w_k / (sum_j |h_k^H w_j|^2 + sigma_k^2).
inline FPAux update_fp_aux(const EffectiveChannels &h, const BeamformerSet &w,
                           const std::vector<double> &noise) {
  detail::check_active_inputs(h, w, noise);
  FPAux aux;
  for (Index k = 0; k < w.num_ues(); ++k) {
    const auto g = detail::link_gains(h, w, k);
    const double sigma2 = noise[static_cast<std::size_t>(k)];
    const double rho = g.signal_power / (g.interference + sigma2);
    aux.rho.push_back(rho);
    aux.tau.push_back(std::sqrt(1.0 + rho) * g.signal /
                      (g.signal_power + g.interference + sigma2));
  }
  return aux;
}

/// Surrogate in nats:
/// sum_k ln(1+rho_k) - rho_k + 2 sqrt(1+rho_k) Re{tau_k^* h_k^H w_k}
///       - |tau_k|^2 (sum_j |h_k^H w_j|^2 + sigma_k^2).
inline double surrogate_value(const FPAux &aux, const EffectiveChannels &h,
                              const BeamformerSet &w, const std::vector<double> &noise) {
  detail::check_active_inputs(h, w, noise);
  detail::require_shape(aux.rho.size() == h.size() && aux.tau.size() == h.size(),
                        "surrogate_value: aux size mismatch");
  double total = 0.0;
  for (Index k = 0; k < w.num_ues(); ++k) {
    const auto i = static_cast<std::size_t>(k);
    const auto g = detail::link_gains(h, w, k);
    const double rho = aux.rho[i];
    total += std::log1p(rho) - rho +
             2.0 * std::sqrt(1.0 + rho) * std::real(std::conj(aux.tau[i]) * g.signal) -
             std::norm(aux.tau[i]) * (g.signal_power + g.interference + noise[i]);
  }
  return total;
}

// ---------------------------------------------------------------------------
// Active beamforming QCQP
//
//   min_w  sum_k w_k^H a w_k - 2 Re{v_k^H w_k}
//   s.t.   sum_k ||w_{l,k}||^2 <= P_l  for every AP l
//
// with a = sum_k |tau_k|^2 h_k h_k^H and v_k = sqrt(1+rho_k) tau_k h_k.
// ---------------------------------------------------------------------------

struct ActiveProblem {
  CMatrix a;                  // LN x LN
  std::vector<CVector> v;     // K vectors of length LN
  std::vector<double> power;  // P_l
  Index aps = 0;
  Index antennas = 0;

  Index ues() const { return static_cast<Index>(v.size()); }

  /// sum_k w_k^H a w_k - 2 Re{v_k^H w_k}
  double objective(const BeamformerSet &w) const {
    double f = 0.0;
    for (Index k = 0; k < ues(); ++k) {
      const auto wk = w.user(k);
      f += std::real(wk.dot(a * wk)) - 2.0 * std::real(v[static_cast<std::size_t>(k)].dot(wk));
    }
    return f;
  }
};

inline ActiveProblem make_active_problem(const FPAux &aux, const EffectiveChannels &h,
                                         const std::vector<double> &power_limits,
                                         Index antennas) {
  detail::require_shape(!h.empty() && aux.tau.size() == h.size() &&
                            aux.rho.size() == h.size(),
                        "make_active_problem: aux size mismatch");
  const Index dim = h.front().size();
  detail::require_shape(antennas >= 1 && dim % antennas == 0 &&
                            static_cast<Index>(power_limits.size()) == dim / antennas,
                        "make_active_problem: power limits must list one value per AP");
  for (double p : power_limits)
    if (!(p > 0.0))
      throw ParameterError("make_active_problem: power limits must be positive");
  ActiveProblem prob;
  prob.aps = dim / antennas;
  prob.antennas = antennas;
  prob.power = power_limits;
  prob.a = CMatrix::Zero(dim, dim);
  for (std::size_t k = 0; k < h.size(); ++k) {
    detail::require_shape(h[k].size() == dim, "make_active_problem: channel length");
    prob.a.selfadjointView<Eigen::Lower>().rankUpdate(h[k], std::norm(aux.tau[k]));
    prob.v.push_back(aux.eta(static_cast<Index>(k)) * h[k]);
  }
  prob.a = prob.a.selfadjointView<Eigen::Lower>();
  return prob;
}

struct PdsOptions {
  int max_iters = 500;
  /// Stop once every AP satisfies |power_l - P_l| <= tol * P_l where its
  /// multiplier is positive, and power_l <= (1 + tol) P_l everywhere.
  double tolerance = 1e-7;
  /// Ridge added to the inner system, relative to trace(a) / dim.
  double ridge = 1e-12;

  void validate() const {
    if (max_iters < 1)
      throw ParameterError("PdsOptions: max_iters must be >= 1");
    if (!(tolerance > 0.0) || !(ridge >= 0.0))
      throw ParameterError("PdsOptions: tolerance must be positive, ridge >= 0");
  }
};

struct ActiveResult {
  BeamformerSet w;
  std::vector<double> lambda;
  int iterations = 0;
  bool converged = false;
  /// True when the final per-AP rescaling had to shrink some AP's slice.
  bool rescaled = false;
};

namespace detail {

struct DualPoint {
  BeamformerSet w;
  std::vector<double> power;
  double value = 0.0;  // dual function d(lambda)
};

/// Inner minimizer w(lambda) = (a + Lambda (x) I_N + eps I)^{-1} v and the
/// dual function value at lambda.
inline DualPoint dual_evaluate(const ActiveProblem &prob, const std::vector<double> &lambda,
                               double eps) {
  const Index dim = prob.a.rows();
  CMatrix m = prob.a;
  for (Index l = 0; l < prob.aps; ++l)
    for (Index n = 0; n < prob.antennas; ++n)
      m(l * prob.antennas + n, l * prob.antennas + n) +=
          lambda[static_cast<std::size_t>(l)] + eps;
  Eigen::LLT<CMatrix> llt(m);
  if (llt.info() != Eigen::Success)
    throw NumericalError("active QCQP: inner system is not positive definite (dim " +
                         std::to_string(dim) + ", ridge " + std::to_string(eps) + ")");
  DualPoint out{BeamformerSet(prob.aps, prob.ues(), prob.antennas), {}, 0.0};
  for (Index k = 0; k < prob.ues(); ++k) {
    const CVector &vk = prob.v[static_cast<std::size_t>(k)];
    out.w.user(k) = llt.solve(vk);
    out.value -= std::real(vk.dot(out.w.user(k)));
  }
  if (!out.w.stacked().allFinite())
    throw NumericalError("active QCQP: inner solve produced non-finite beamformers");
  out.power = out.w.ap_powers();
  for (Index l = 0; l < prob.aps; ++l)
    out.value -= lambda[static_cast<std::size_t>(l)] * prob.power[static_cast<std::size_t>(l)];
  return out;
}

/// Curvature of the dual along each multiplier:
/// -d power_l / d lambda_l = 2 sum_k Re{w_{l,k}^H [M^{-1}]_{ll} w_{l,k}}.
inline std::vector<double> dual_curvature(const ActiveProblem &prob,
                                          const std::vector<double> &lambda, double eps,
                                          const BeamformerSet &w) {
  CMatrix m = prob.a;
  for (Index l = 0; l < prob.aps; ++l)
    for (Index n = 0; n < prob.antennas; ++n)
      m(l * prob.antennas + n, l * prob.antennas + n) +=
          lambda[static_cast<std::size_t>(l)] + eps;
  Eigen::LLT<CMatrix> llt(m);
  std::vector<double> out(static_cast<std::size_t>(prob.aps), 0.0);
  for (Index k = 0; k < prob.ues(); ++k)
    for (Index l = 0; l < prob.aps; ++l) {
      CVector e = CVector::Zero(prob.a.rows());
      e.segment(l * prob.antennas, prob.antennas) = w.slice(l, k);
      out[static_cast<std::size_t>(l)] += 2.0 * std::real(e.dot(llt.solve(e)));
    }
  return out;
}

inline double kkt_residual(const ActiveProblem &prob, const std::vector<double> &lambda,
                           const std::vector<double> &power) {
  double worst = 0.0;
  for (std::size_t l = 0; l < power.size(); ++l) {
    const double excess = (power[l] - prob.power[l]) / prob.power[l];
    worst = std::max(worst, lambda[l] > 0.0 ? std::abs(excess) : std::max(0.0, excess));
  }
  return worst;
}

} // namespace detail

/// Dual ascent on the per-AP multipliers. Each iteration moves lambda along
/// the subgradient power_l - P_l, scaled by the inverse curvature of the dual
/// in that coordinate and halved until the dual value increases; the primal
/// iterate is the closed-form inner minimizer.
inline ActiveResult solve_active(const ActiveProblem &prob, const PdsOptions &opts = {}) {
  opts.validate();
  const Index dim = prob.a.rows();
  ActiveResult res{BeamformerSet(prob.aps, prob.ues(), prob.antennas),
                   std::vector<double>(static_cast<std::size_t>(prob.aps), 0.0), 0, false,
                   false};
  const double scale = prob.a.trace().real() / static_cast<double>(dim);
  if (!(scale > 0.0)) {
    // a = 0 forces v = 0 as well; the optimum is w = 0.
    res.converged = true;
    return res;
  }
  const double eps = opts.ridge * scale;

  auto &lambda = res.lambda;
  detail::DualPoint cur = detail::dual_evaluate(prob, lambda, eps);
  while (res.iterations < opts.max_iters &&
         detail::kkt_residual(prob, lambda, cur.power) > opts.tolerance) {
    ++res.iterations;
    const auto curv = detail::dual_curvature(prob, lambda, eps, cur.w);
    std::vector<double> step(lambda.size());
    for (std::size_t l = 0; l < lambda.size(); ++l) {
      const double grad = cur.power[l] - prob.power[l];
      const double c = std::max(curv[l], 1e-300);
      step[l] = std::max(0.0, lambda[l] + grad / c) - lambda[l];
    }
    bool improved = false;
    double t = 1.0;
    for (int trial = 0; trial < 60; ++trial, t *= 0.5) {
      std::vector<double> trial_lambda(lambda.size());
      for (std::size_t l = 0; l < lambda.size(); ++l)
        trial_lambda[l] = std::max(0.0, lambda[l] + t * step[l]);
      auto next = detail::dual_evaluate(prob, trial_lambda, eps);
      if (next.value >= cur.value) {
        lambda = std::move(trial_lambda);
        cur = std::move(next);
        improved = true;
        break;
      }
    }
    if (!improved)
      break;
  }
  res.converged = detail::kkt_residual(prob, lambda, cur.power) <= opts.tolerance;
  res.w = std::move(cur.w);
  for (Index l = 0; l < prob.aps; ++l) {
    const double p = res.w.ap_power(l);
    const double limit = prob.power[static_cast<std::size_t>(l)];
    if (p > limit) {
      const double s = std::sqrt(limit / p);
      for (Index k = 0; k < prob.ues(); ++k)
        res.w.slice(l, k) *= s;
      res.rescaled = true;
    }
  }
  return res;
}

inline ActiveResult solve_active(const FPAux &aux, const EffectiveChannels &h,
                                 const std::vector<double> &power_limits, Index antennas,
                                 const PdsOptions &opts = {}) {
  return solve_active(make_active_problem(aux, h, power_limits, antennas), opts);
}

/// Network-wide zero forcing: columns of H (H^H H + eps I)^{-1} normalised to
/// unit norm, then the whole set scaled by min_l sqrt(P_l / power_l).
inline BeamformerSet zero_forcing(const EffectiveChannels &h, Index antennas,
                                  const std::vector<double> &power_limits) {
  detail::require_shape(!h.empty() && antennas >= 1 && h.front().size() % antennas == 0,
                        "zero_forcing: channel length must be a multiple of N");
  const Index dim = h.front().size();
  const Index k_count = static_cast<Index>(h.size());
  const Index aps = dim / antennas;
  detail::require_shape(static_cast<Index>(power_limits.size()) == aps,
                        "zero_forcing: one power limit per AP");
  CMatrix hm(dim, k_count);
  for (Index k = 0; k < k_count; ++k) {
    detail::require_shape(h[static_cast<std::size_t>(k)].size() == dim,
                          "zero_forcing: channel length");
    hm.col(k) = h[static_cast<std::size_t>(k)];
  }
  BeamformerSet w(aps, k_count, antennas);
  CMatrix gram = hm.adjoint() * hm;
  const double scale = gram.trace().real() / static_cast<double>(k_count);
  if (!(scale > 0.0))
    return w;
  gram.diagonal().array() += 1e-10 * scale;
  const CMatrix dirs = hm * gram.llt().solve(CMatrix::Identity(k_count, k_count));
  for (Index k = 0; k < k_count; ++k) {
    const double nrm = dirs.col(k).norm();
    if (nrm > 0.0)
      w.user(k) = dirs.col(k) / nrm;
  }
  double factor = std::numeric_limits<double>::infinity();
  for (Index l = 0; l < aps; ++l) {
    const double p = w.ap_power(l);
    if (p > 0.0)
      factor = std::min(factor, std::sqrt(power_limits[static_cast<std::size_t>(l)] / p));
  }
  if (std::isfinite(factor))
    w.stacked() *= factor;
  return w;
}

} // namespace bdris
