#pragma once

// Riemannian limited-memory BFGS on St(2p, p): two-loop recursion over
// transported curvature pairs, cautious pair admission, Armijo backtracking.

#include <cmath>
#include <cstddef>
#include <deque>
#include <utility>
#include <vector>

#include "bdris/line_search.hpp"

namespace bdris {

struct CurvaturePair {
  TangentVector s;
  TangentVector y;
  double rho; // 1 / <s, y> at admission time
};

/// Bounded history of curvature pairs, oldest first.
class LbfgsMemory {
public:
  explicit LbfgsMemory(std::size_t capacity) : capacity_(capacity) {}

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::deque<CurvaturePair> &entries() const { return entries_; }
  const CurvaturePair &newest() const { return entries_.back(); }

  void clear() { entries_.clear(); }

  /// Appends (s, y, 1/<s,y>) and evicts the oldest entry beyond capacity.
  void push(TangentVector s, TangentVector y) {
    if (capacity_ == 0)
      return;
    const double sy = inner(s, y);
    if (!(sy > 0.0))
      throw ParameterError("LbfgsMemory: <s, y> must be positive");
    entries_.push_back({std::move(s), std::move(y), 1.0 / sy});
    while (entries_.size() > capacity_)
      entries_.pop_front();
  }

  /// Moves every stored vector into T_to. The stored rho values are kept.
  /// All pairs are projected with one product X^H [s_1 y_1 s_2 ...].
  void transport_to(const StiefelPoint &to) {
    if (entries_.empty())
      return;
    const CMatrix &x = to.matrix();
    const Index p = x.cols();
    const Index count = 2 * static_cast<Index>(entries_.size());
    CMatrix all(x.rows(), count * p);
    Index at = 0;
    for (const auto &e : entries_) {
      all.middleCols(at++ * p, p) = e.s.matrix();
      all.middleCols(at++ * p, p) = e.y.matrix();
    }
    CMatrix sym = x.adjoint() * all;
    for (Index i = 0; i < count; ++i) {
      auto blk = sym.middleCols(i * p, p);
      blk = (0.5 * (blk + blk.adjoint())).eval();
    }
    all.noalias() -= x * sym;
    at = 0;
    for (auto &e : entries_) {
      for (TangentVector *v : {&e.s, &e.y}) {
        const double in_norm = v->norm();
        TangentVector moved(to, all.middleCols(at++ * p, p));
        const double out_norm = moved.norm();
        if (in_norm > 0.0 && out_norm >= 1e-14 * in_norm)
          moved *= in_norm / out_norm;
        *v = std::move(moved);
      }
    }
  }

private:
  std::size_t capacity_;
  std::deque<CurvaturePair> entries_;
};

/// eta = -B g with B the L-BFGS inverse-Hessian approximation built from
/// `memory` on top of B0 = b0_scale * I.
inline TangentVector two_loop_direction(const TangentVector &g,
                                        const LbfgsMemory &memory,
                                        double b0_scale) {
  if (!(b0_scale > 0.0))
    throw ParameterError("two_loop_direction: b0_scale must be positive");
  const auto &hist = memory.entries();
  const std::size_t n = hist.size();
  std::vector<double> alpha(n);

  CMatrix r = g.matrix();
  for (std::size_t i = n; i-- > 0;) {
    alpha[i] = hist[i].rho * frobenius_inner(hist[i].s.matrix(), r);
    r -= alpha[i] * hist[i].y.matrix();
  }
  r *= b0_scale;
  for (std::size_t i = 0; i < n; ++i) {
    const double beta = hist[i].rho * frobenius_inner(hist[i].y.matrix(), r);
    r += (alpha[i] - beta) * hist[i].s.matrix();
  }
  return TangentVector(g.base(), -r);
}

enum class CautiousDecision { Accept, Reject, DegenerateStep };

/// Admit (s, y) iff <s,y>/<s,s> >= cautious_scale * grad_norm and <s,y> > 0.
inline CautiousDecision cautious_check(const TangentVector &s,
                                       const TangentVector &y, double grad_norm,
                                       double cautious_scale) {
  const double ss = inner(s, s);
  if (std::sqrt(ss) < 1e-14)
    return CautiousDecision::DegenerateStep;
  const double sy = inner(s, y);
  if (!(sy > 0.0))
    return CautiousDecision::Reject;
  return sy / ss >= cautious_scale * grad_norm ? CautiousDecision::Accept
                                               : CautiousDecision::Reject;
}

inline SolverResult rlbfgs_minimize(const CostModel &model,
                                    const StiefelPoint &start,
                                    const SolverOptions &opts) {
  opts.validate();
  SolverTrace trace;
  StiefelPoint x = start;
  double fx = model.cost(x);
  TangentVector g = model.riemannian_gradient(x);
  trace.records.push_back({fx, g.norm(), 0.0, 0});

  LbfgsMemory memory(static_cast<std::size_t>(opts.memory));
  TangentVector eta = -g;
  trace.termination = Termination::MaxIterations;

  for (int k = 0; k < opts.max_iters; ++k) {
    const double gnorm = g.norm();
    if (gnorm < opts.grad_tol) {
      trace.termination = Termination::GradientTolerance;
      break;
    }
    if (!detail::is_descent(g, eta)) {
      memory.clear();
      eta = -g;
      ++trace.restarts;
    }

    LineSearchResult ls = [&] {
      try {
        return backtracking_line_search(model, x, fx, eta, g, opts);
      } catch (const LineSearchFailure &) {
        return LineSearchResult{0.0, x, fx, -1};
      }
    }();
    if (ls.evaluations < 0) {
      trace.termination = Termination::LineSearchFailure;
      break;
    }

    TangentVector g_new = model.riemannian_gradient(ls.point);
    memory.transport_to(ls.point);
    TangentVector s = transport(ls.point, ls.step * eta);
    TangentVector y = g_new - transport(ls.point, g);
    if (cautious_check(s, y, gnorm, opts.cautious_scale) ==
        CautiousDecision::Accept)
      memory.push(std::move(s), std::move(y));
    else
      ++trace.rejected_updates;

    x = ls.point;
    fx = ls.cost;
    g = std::move(g_new);

    double b0 = 1.0;
    if (!memory.empty()) {
      const auto &last = memory.newest();
      b0 = inner(last.s, last.y) / inner(last.y, last.y);
      if (!(b0 > 0.0) || !std::isfinite(b0))
        b0 = 1.0;
    }
    eta = two_loop_direction(g, memory, b0);
    trace.records.push_back({fx, g.norm(), ls.step, ls.evaluations});
  }
  if (trace.termination == Termination::MaxIterations &&
      g.norm() < opts.grad_tol)
    trace.termination = Termination::GradientTolerance;
  return {x, std::move(trace)};
}

} // namespace bdris
