#pragma once

#include <functional>
#include <string>
#include <vector>

#include "bdris/stiefel.hpp"

namespace bdris {

/// A smooth real cost on a Stiefel manifold together with its Euclidean
/// gradient, i.e. the matrix G with d/dt cost(X + tV)|_0 = Re Tr(G^H V).
/// Both callables must be reentrant.
struct CostModel {
  std::function<double(const StiefelPoint &)> cost;
  std::function<CMatrix(const StiefelPoint &)> euclidean_gradient;

  TangentVector riemannian_gradient(const StiefelPoint &x) const {
    return project_to_tangent(x, euclidean_gradient(x));
  }
};

struct SolverOptions {
  int max_iters = 500;
  double grad_tol = 1e-6;
  int memory = 8;
  double armijo_c1 = 1e-4;
  double backtrack_factor = 0.5;
  double initial_step = 1.0;
  /// Slope of nu(t) = cautious_scale * t in the cautious update check.
  double cautious_scale = 1e-4;

  void validate() const {
    if (max_iters < 1)
      throw ParameterError("SolverOptions: max_iters must be >= 1");
    if (!(armijo_c1 > 0.0 && armijo_c1 < 1.0))
      throw ParameterError("SolverOptions: armijo_c1 must lie in (0, 1)");
    if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0))
      throw ParameterError("SolverOptions: backtrack_factor must lie in (0, 1)");
    if (!(grad_tol > 0.0))
      throw ParameterError("SolverOptions: grad_tol must be positive");
    if (memory < 0)
      throw ParameterError("SolverOptions: memory must be >= 0");
    if (!(initial_step > 0.0))
      throw ParameterError("SolverOptions: initial_step must be positive");
    if (!(cautious_scale >= 0.0))
      throw ParameterError("SolverOptions: cautious_scale must be >= 0");
  }
};

enum class Termination { GradientTolerance, MaxIterations, LineSearchFailure };

inline std::string to_string(Termination t) {
  switch (t) {
  case Termination::GradientTolerance:
    return "gradient_tolerance";
  case Termination::MaxIterations:
    return "max_iterations";
  case Termination::LineSearchFailure:
    return "line_search_failure";
  }
  return "unknown";
}

struct IterationRecord {
  double cost = 0.0;
  double grad_norm = 0.0;
  double step = 0.0;
  int evaluations = 0;
};

/// records[0] describes the start point; records[k] the k-th iterate.
struct SolverTrace {
  std::vector<IterationRecord> records;
  Termination termination = Termination::MaxIterations;
  /// Number of times a non-descent direction forced a restart from -g.
  int restarts = 0;
  /// Curvature pairs refused by the cautious check (L-BFGS) or the
  /// positivity test (dense BFGS).
  int rejected_updates = 0;
  /// Dense BFGS only: ||B_{k+1} y_k - s_k|| / ||s_k|| after each update.
  std::vector<double> secant_residuals;

  int iterations() const {
    return records.empty() ? 0 : static_cast<int>(records.size()) - 1;
  }
  double final_cost() const { return records.back().cost; }
  double final_grad_norm() const { return records.back().grad_norm; }
  int total_evaluations() const {
    int n = 0;
    for (const auto &r : records)
      n += r.evaluations;
    return n;
  }
};

struct SolverResult {
  StiefelPoint point;
  SolverTrace trace;
};

} // namespace bdris
