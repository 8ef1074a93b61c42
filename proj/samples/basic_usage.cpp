// Exact pressure of a ferromagnetic chain, the quenched pressure of a
// rademacher chain (equal to the ferro one by a gauge change), and a Monte
// Carlo quenched pressure of a gaussian chain against its limit bound.

#include <cstdio>

#include "quenchlab/quenchlab.hpp"

int main() {
  using namespace quenchlab;
  const auto box = Region::box(1, 8);

  const auto ferro = nearest_neighbour_family(1, Deterministic{1.0});
  const auto summary = log_partition(instantiate(ferro, box, 0), 1.0);
  std::printf("ferro chain N=8, beta=1: p = %.12f\n", summary.pressure_density);

  const auto glass = nearest_neighbour_family(1, Rademacher{});
  std::printf("rademacher chain, exact disorder average: %.12f\n", quenched_exact(glass, box, 1.0).mean);

  const auto gaussian = nearest_neighbour_family(1, Gaussian{1.0});
  const auto mc = quenched_mc(gaussian, box, 1.0, 2000, 42);
  const auto bound = bound_value(gaussian, 1.0, BoundKind::automatic);
  std::printf("gaussian chain: %.6f +- %.6f, %s bound %.6f\n", mc.mean, mc.std_error, bound_name(bound.kind).c_str(),
              bound.value);

  const Subset edge = 0b11;
  std::printf("<s0 s1> in the ferro chain: %.12f\n", gibbs_expectation(instantiate(ferro, box, 0), 1.0, edge));
}
