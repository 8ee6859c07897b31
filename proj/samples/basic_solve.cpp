// Solve the default topology with both distributed algorithms and compare
// against the centralized reference.
#include <cstdio>

#include "rrnum/rrnum.hpp"

int main() {
  const auto net = rrnum::default_topology();

  rrnum::SolverOptions opt;
  opt.record_trace = false;
  opt.schedule = rrnum::StepSchedule::constant(rrnum::kDefaultBetaIntegrated);
  const auto integrated = rrnum::run_integrated(net, opt).result;
  opt.schedule = rrnum::StepSchedule::constant(rrnum::kDefaultBetaDifferentiated);
  const auto differentiated = rrnum::run_differentiated(net, opt).result;

  const auto ref_int = rrnum::solve_global_integrated(net);
  const auto ref_diff = rrnum::solve_global_differentiated(net);

  std::printf("%-16s %12s %12s %8s\n", "policy", "distributed", "oracle", "iters");
  std::printf("%-16s %12.6f %12.6f %8zu\n", "integrated", integrated.total_utility,
              ref_int.total_utility, integrated.iterations);
  std::printf("%-16s %12.6f %12.6f %8zu\n", "differentiated", differentiated.total_utility,
              ref_diff.total_utility, differentiated.iterations);

  std::printf("\n%-4s %10s %10s %10s %10s\n", "src", "x_int", "R_int", "x_diff", "R_diff");
  for (std::size_t s = 0; s < net.num_sources(); ++s) {
    std::printf("%-4s %10.5f %10.6f %10.5f %10.6f\n", net.label_source(s).c_str(),
                integrated.allocation.x[s], integrated.allocation.reliability[s],
                differentiated.allocation.x[s], differentiated.allocation.reliability[s]);
  }
}
