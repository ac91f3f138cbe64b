// Per-cycle displacement of a traveling-wave serpenoid gait as the
// anisotropy ratio varies. Isotropic dissipation (epsilon = 1) does not move.

#include <cstdio>

#include "undulate/optimize.hpp"

int main() {
  using namespace undulate;
  const GaitEllipse gait{1.0, 0.0, 0.0, 0.0, 5.0, 1.0};
  const SimConfig sim;
  std::printf("%8s %14s %14s\n", "epsilon", "disp [BL]", "energy");
  for (double eps : {0.05, 0.1, 0.1865, 0.4, 0.6, 0.8, 1.0}) {
    const auto params = DissipationParams::uniform(sim.vertexCount(), 1.38, eps);
    const Trajectory traj = simulateGait(gait, sim, params);
    std::printf("%8.4f %14.6g %14.6g\n", eps, comDisplacement(traj) / sim.bodyLength,
                totalEnergy(traj));
  }
}
