// Draws a random gait and maximizes its per-cycle displacement, then repeats
// with a dissipation penalty.

#include <cstdio>

#include "undulate/optimize.hpp"

int main() {
  using namespace undulate;
  const GaitBounds bounds;
  const GaitEllipse seed = randomGait(1, bounds);

  for (double c : {0.0, 2.5}) {
    ObjectiveConfig cfg;
    cfg.dissipationCoefficient = c;
    cfg.params = DissipationParams::uniform(cfg.sim.vertexCount(), 1.38, 0.1865);
    const OptimizationResult r = optimizeGait(seed, bounds, cfg);
    std::printf("c = %.1f: displacement %.4f -> %.4f m, energy %.5f -> %.5f (%d evaluations)\n", c,
                r.seedEvaluation.displacement, r.evaluation.displacement, r.seedEvaluation.energy,
                r.evaluation.energy, r.evaluations);
    std::printf("  sigma %.3f  center (%.3f, %.3f)  theta %.3f  a %.3f  xi %.3f\n", r.gait.sigma,
                r.gait.xc, r.gait.yc, r.gait.theta, r.gait.a, r.gait.xi);
  }
}
