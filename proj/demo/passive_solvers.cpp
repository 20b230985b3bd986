// The three Riemannian solvers on the same passive subproblem.

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "bdris/experiment.hpp"

int main(int argc, char **argv) {
  bdris::SystemConfig cfg;
  cfg.ris_cells = argc > 1 ? std::atoi(argv[1]) : 32;
  cfg.groups = 1;
  const auto bench = bdris::make_passive_benchmark(cfg, 42);

  for (auto solver : {bdris::SolverKind::RLbfgs, bdris::SolverKind::RBfgs,
                      bdris::SolverKind::RCg}) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto res = bdris::optimize_passive(bench.assembly, bench.theta, solver, {});
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%-7s objective %.10f  iterations %4d  %.2e s/iteration\n",
                bdris::to_string(solver).c_str(),
                bdris::passive_objective(bench.assembly, res.theta), res.total_iterations(),
                secs / res.total_iterations());
  }
}
