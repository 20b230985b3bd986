#pragma once

#include <algorithm>
#include <utility>

#include "bdris/line_search.hpp"

namespace bdris {

/// Polak-Ribiere+ coefficient <g1, g1 - T(g0)> / <g0, g0>, clipped at zero.
inline double polak_ribiere_plus(const TangentVector &g_new,
                                 const TangentVector &g_old_transported,
                                 double g_old_sq_norm) {
  if (!(g_old_sq_norm > 0.0))
    return 0.0;
  const double beta =
      inner(g_new, g_new - g_old_transported) / g_old_sq_norm;
  return std::max(0.0, beta);
}

/// Riemannian conjugate gradient (PR+) with the same Armijo backtracking and
/// stopping rule as the quasi-Newton solvers. CG directions carry no step
/// scale, so after the first iteration the trial step is
/// 2.02 (f_{k-1} - f_k) / -<g_k, eta_k>, the usual interpolation guess.
inline SolverResult rcg_minimize(const CostModel &model,
                                 const StiefelPoint &start,
                                 const SolverOptions &opts) {
  opts.validate();
  SolverTrace trace;
  StiefelPoint x = start;
  double fx = model.cost(x);
  TangentVector g = model.riemannian_gradient(x);
  trace.records.push_back({fx, g.norm(), 0.0, 0});

  TangentVector eta = -g;
  double decrease = 0.0;
  SolverOptions ls_opts = opts;
  trace.termination = Termination::MaxIterations;

  for (int k = 0; k < opts.max_iters; ++k) {
    if (g.norm() < opts.grad_tol) {
      trace.termination = Termination::GradientTolerance;
      break;
    }
    if (!detail::is_descent(g, eta)) {
      eta = -g;
      ++trace.restarts;
    }

    const double slope = inner(g, eta);
    ls_opts.initial_step = decrease > 0.0 ? 2.02 * decrease / -slope : opts.initial_step;
    LineSearchResult ls = [&] {
      try {
        return backtracking_line_search(model, x, fx, eta, g, ls_opts);
      } catch (const LineSearchFailure &) {
        return LineSearchResult{0.0, x, fx, -1};
      }
    }();
    if (ls.evaluations < 0) {
      trace.termination = Termination::LineSearchFailure;
      break;
    }

    TangentVector g_new = model.riemannian_gradient(ls.point);
    const TangentVector g_old = transport(ls.point, g);
    const double beta = polak_ribiere_plus(g_new, g_old, inner(g, g));
    TangentVector eta_old = transport(ls.point, eta);

    x = ls.point;
    decrease = fx - ls.cost;
    fx = ls.cost;
    g = std::move(g_new);
    eta = -g + beta * eta_old;
    trace.records.push_back({fx, g.norm(), ls.step, ls.evaluations});
  }
  if (trace.termination == Termination::MaxIterations &&
      g.norm() < opts.grad_tol)
    trace.termination = Termination::GradientTolerance;
  return {x, std::move(trace)};
}

} // namespace bdris
