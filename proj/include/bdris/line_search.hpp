#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "bdris/solver_types.hpp"

namespace bdris {

inline constexpr int kMaxBacktracks = 60;

/// No step of the schedule satisfied the Armijo condition.
class LineSearchFailure : public std::runtime_error {
public:
  LineSearchFailure(double last_step, double last_cost)
      : std::runtime_error("backtracking line search failed after " +
                           std::to_string(kMaxBacktracks) + " trials"),
        last_step(last_step), last_cost(last_cost) {}

  double last_step;
  double last_cost;
};

struct LineSearchResult {
  double step;
  StiefelPoint point;
  double cost;
  int evaluations;
};

/// Armijo backtracking along retract(base, alpha * direction) over the
/// schedule alpha_j = initial_step * backtrack_factor^j, j = 0..59.
inline LineSearchResult backtracking_line_search(const CostModel &model,
                                                 const StiefelPoint &base,
                                                 double base_cost,
                                                 const TangentVector &direction,
                                                 const TangentVector &gradient,
                                                 const SolverOptions &opts) {
  const double slope = inner(gradient, direction);
  if (!(slope < 0.0))
    throw ParameterError("backtracking_line_search: not a descent direction");

  double alpha = opts.initial_step;
  double trial_cost = base_cost;
  for (int j = 0; j < kMaxBacktracks; ++j) {
    StiefelPoint trial = retract(base, alpha * direction);
    trial_cost = model.cost(trial);
    if (trial_cost <= base_cost + opts.armijo_c1 * alpha * slope)
      return {alpha, std::move(trial), trial_cost, j + 1};
    if (j + 1 < kMaxBacktracks)
      alpha *= opts.backtrack_factor;
  }
  throw LineSearchFailure(alpha, trial_cost);
}

inline LineSearchResult backtracking_line_search(const CostModel &model,
                                                 const StiefelPoint &base,
                                                 const TangentVector &direction,
                                                 const TangentVector &gradient,
                                                 const SolverOptions &opts) {
  return backtracking_line_search(model, base, model.cost(base), direction,
                                  gradient, opts);
}

namespace detail {

/// <g, eta> < -1e-12 ||g|| ||eta||
inline bool is_descent(const TangentVector &g, const TangentVector &eta) {
  return inner(g, eta) < -1e-12 * g.norm() * eta.norm();
}

} // namespace detail
} // namespace bdris
