// Best tour conforming to the doubled MST of 200 random points, plus the
// depth-limited variant on a degree-increased tree.

#include <cstdio>

#include "dtsp/dtsp.hpp"

int main() {
  const dtsp::Instance inst = dtsp::generate_uniform(200, 7, 1000.0);

  const dtsp::RootedTree tree = dtsp::rooted_mst(inst);
  const dtsp::UpsweepResult up = dtsp::upsweep(inst, tree, dtsp::kUnlimitedDepth, true);
  const dtsp::Tour tour = dtsp::downsweep(inst, tree, up);
  const dtsp::Tour naive = dtsp::depth_first_shortcut(inst, tree);

  const dtsp::RootedTree wide = dtsp::degree_increase(tree, 5);
  const dtsp::Tour dt5 = dtsp::downsweep(inst, wide, dtsp::upsweep(inst, wide, 16, true));

  const double hk = dtsp::held_karp_lower_bound(inst);
  std::printf("depth-first shortcut  %10.2f\n", naive.weight);
  std::printf("DT                    %10.2f\n", tour.weight);
  std::printf("DT_5_16               %10.2f\n", dt5.weight);
  std::printf("Held-Karp bound       %10.2f\n", hk);
}
