#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "bdris/lbfgs.hpp"
#include "bdris/rbfgs.hpp"
#include "bdris/rcg.hpp"

namespace bdris {

enum class SolverKind { RLbfgs, RBfgs, RCg };

inline std::string to_string(SolverKind k) {
  switch (k) {
  case SolverKind::RLbfgs:
    return "rlbfgs";
  case SolverKind::RBfgs:
    return "rbfgs";
  case SolverKind::RCg:
    return "rcg";
  }
  return "unknown";
}

inline SolverKind parse_solver(std::string_view name) {
  if (name == "rlbfgs")
    return SolverKind::RLbfgs;
  if (name == "rbfgs")
    return SolverKind::RBfgs;
  if (name == "rcg")
    return SolverKind::RCg;
  throw ParameterError("unknown solver '" + std::string(name) +
                       "' (expected rlbfgs, rbfgs or rcg)");
}

inline SolverResult minimize(SolverKind kind, const CostModel &model,
                             const StiefelPoint &start,
                             const SolverOptions &opts) {
  switch (kind) {
  case SolverKind::RLbfgs:
    return rlbfgs_minimize(model, start, opts);
  case SolverKind::RBfgs:
    return rbfgs_minimize(model, start, opts);
  case SolverKind::RCg:
    return rcg_minimize(model, start, opts);
  }
  throw ParameterError("minimize: unknown solver");
}

} // namespace bdris
