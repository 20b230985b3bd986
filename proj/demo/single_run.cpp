// One alternating-optimization run at the default scenario, printing the
// sum-SE after every outer iteration.

#include <cstdio>
#include <random>

#include "bdris/alternating.hpp"

int main() {
  bdris::SystemConfig cfg;  // 3 APs, 4 UEs, 16 cells in 2 groups, 1 mW per AP
  std::mt19937_64 rng(7);
  const auto chs = bdris::generate_network(cfg, rng);
  const auto res = bdris::alternating_optimize(chs, cfg, bdris::SolverKind::RLbfgs, rng);

  std::printf("start   %8.4f bits\n", res.trace.initial_sum_se);
  for (const auto &r : res.trace.records)
    std::printf("iter %2d %8.4f bits  (passive iterations %d)\n", r.iteration, r.sum_se_bits,
                r.passive_iterations);
  std::printf("%s after %d iterations, C1 residual %.1e\n",
              res.trace.converged ? "converged" : "stopped", res.trace.iterations(),
              res.theta.max_c1_residual());
}
