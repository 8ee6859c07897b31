// Weight-spread sweep on the default topology using the centralized solvers.
#include <cstdio>

#include "rrnum/rrnum.hpp"

int main() {
  const auto net = rrnum::default_topology();
  const auto sweep = rrnum::run_v_sweep(net, rrnum::SolverSettings{}, rrnum::SolverKind::oracle,
                                        rrnum::SweepSettings::default_v(), false);
  std::printf("%6s %12s %12s %14s\n", "v", "static", "integrated", "differentiated");
  for (const auto& r : sweep.rows) {
    std::printf("%6.2f %12.6f %12.6f %14.6f\n", r.v, r.static_utility, r.integrated_utility,
                r.differentiated_utility);
  }
}
