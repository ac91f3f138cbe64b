#pragma once

// Gait objectives and derivative-free optimization over ellipse parameters.

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <vector>

#include "undulate/dynamics.hpp"
#include "undulate/nelder_mead.hpp"
#include "undulate/shapespace.hpp"

namespace undulate {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  double clamp(double x) const { return std::min(std::max(x, lo), hi); }
  bool contains(double x) const { return x >= lo && x <= hi; }
};

/// Box constraints on (sigma, xc, yc, theta, a, xi).
struct GaitBounds {
  Interval sigma{0.2, 1.0};
  Interval xc{-3.0, 3.0};
  Interval yc{-3.0, 3.0};
  Interval theta{0.0, std::numbers::pi};
  Interval a{0.5, 8.0};
  Interval xi{0.5, 2.0};

  std::array<Interval, 6> asArray() const { return {sigma, xc, yc, theta, a, xi}; }

  void validate() const {
    for (const auto& i : asArray())
      if (!(i.lo <= i.hi)) throw Error(ErrorCode::InvalidBounds, "interval with lo > hi");
    if (sigma.lo < 0.0 || sigma.hi > 1.0)
      throw Error(ErrorCode::InvalidBounds, "sigma bounds must lie in [0, 1]");
    if (!(a.lo > 0.0) || !(xi.lo > 0.0))
      throw Error(ErrorCode::InvalidBounds, "a and xi lower bounds must be positive");
  }

  GaitEllipse clamp(const GaitEllipse& g) const {
    return {sigma.clamp(g.sigma), xc.clamp(g.xc), yc.clamp(g.yc),
            theta.clamp(g.theta), a.clamp(g.a),   xi.clamp(g.xi)};
  }

  bool contains(const GaitEllipse& g) const {
    return sigma.contains(g.sigma) && xc.contains(g.xc) && yc.contains(g.yc) &&
           theta.contains(g.theta) && a.contains(g.a) && xi.contains(g.xi);
  }
};

inline std::array<double, 6> toArray(const GaitEllipse& g) {
  return {g.sigma, g.xc, g.yc, g.theta, g.a, g.xi};
}

inline GaitEllipse fromArray(const std::array<double, 6>& v) {
  return {v[0], v[1], v[2], v[3], v[4], v[5]};
}

/// Componentwise uniform sample, deterministic for a fixed seed.
inline GaitEllipse randomGait(std::uint64_t seed, const GaitBounds& bounds) {
  bounds.validate();
  std::mt19937_64 rng(seed);
  std::array<double, 6> v{};
  const auto intervals = bounds.asArray();
  for (std::size_t i = 0; i < 6; ++i) {
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    v[i] = intervals[i].lo + dist(rng) * intervals[i].width();
  }
  return fromArray(v);
}

struct ObjectiveConfig {
  double dissipationCoefficient = 0.0;  ///< c in -displacement + c * energy
  std::optional<double> fixedXi;
  SimConfig sim;
  DissipationParams params;
  SolverOptions solver;
};

struct GaitEvaluation {
  double loss = 0.0;
  double displacement = 0.0;
  double energy = 0.0;
};

inline Trajectory simulateGait(const GaitEllipse& ellipse, const SimConfig& sim,
                               const DissipationParams& params, const SolverOptions& solver = {}) {
  const auto shapes = gaitShapes(ellipse, sim);
  return integrateMotionTrajectory(shapes, params, solver);
}

inline double comDisplacement(const Trajectory& traj) {
  const Vec3 c0 = centerOfMass(traj.shapes.front(), traj.params.weights);
  const Vec3 c1 = centerOfMass(traj.shapes.back(), traj.params.weights);
  return (c1 - c0).norm();
}

inline GaitEvaluation evaluateGait(GaitEllipse ellipse, const ObjectiveConfig& cfg) {
  if (cfg.fixedXi) ellipse.xi = *cfg.fixedXi;
  const Trajectory traj = simulateGait(ellipse, cfg.sim, cfg.params, cfg.solver);
  GaitEvaluation ev;
  ev.displacement = comDisplacement(traj);
  ev.energy = totalEnergy(traj);
  ev.loss = -ev.displacement + cfg.dissipationCoefficient * ev.energy;
  return ev;
}

inline double netDisplacement(const GaitEllipse& ellipse, const ObjectiveConfig& cfg) {
  return evaluateGait(ellipse, cfg).displacement;
}

inline double gaitLoss(const GaitEllipse& ellipse, const ObjectiveConfig& cfg) {
  return evaluateGait(ellipse, cfg).loss;
}

struct OptimizationRecord {
  int iteration = 0;
  GaitEllipse gait;
  GaitEvaluation evaluation;
};

struct OptimizationResult {
  GaitEllipse gait;
  GaitEvaluation evaluation;
  GaitEvaluation seedEvaluation;
  int evaluations = 0;
  std::vector<OptimizationRecord> history;  ///< best gait after each iteration
};

/// Nelder-Mead over the gait parameters normalized to their bound
/// intervals. Candidates are clipped to the bounds before evaluation, the
/// initial simplex spans 10% of each interval, and a fixed spatial frequency
/// removes xi from the search.
inline OptimizationResult optimizeGait(const GaitEllipse& seed, const GaitBounds& bounds,
                                       const ObjectiveConfig& cfg,
                                       const NelderMeadOptions& options = {}) {
  bounds.validate();
  if (cfg.dissipationCoefficient < 0.0)
    throw Error(ErrorCode::InvalidBounds, "dissipation coefficient must be non-negative");
  if (cfg.fixedXi && !bounds.xi.contains(*cfg.fixedXi))
    throw Error(ErrorCode::InvalidBounds, "fixed xi outside its bounds");
  if (!bounds.contains(seed)) throw Error(ErrorCode::InvalidBounds, "seed gait outside bounds");

  const auto intervals = bounds.asArray();
  const auto seedValues = toArray(seed);

  auto decode = [&](const std::vector<double>& u) {
    std::array<double, 6> v{};
    for (std::size_t i = 0; i < 6; ++i) {
      const double w = intervals[i].width();
      v[i] = w > 0.0 ? intervals[i].clamp(intervals[i].lo + u[i] * w) : intervals[i].lo;
    }
    GaitEllipse g = fromArray(v);
    if (cfg.fixedXi) g.xi = *cfg.fixedXi;
    return g;
  };

  std::vector<double> u0(6), steps(6);
  for (std::size_t i = 0; i < 6; ++i) {
    const double w = intervals[i].width();
    u0[i] = w > 0.0 ? (seedValues[i] - intervals[i].lo) / w : 0.0;
    steps[i] = w > 0.0 ? 0.1 : 0.0;
    // Step inward from the upper bound so the initial simplex is not clipped flat.
    if (u0[i] + steps[i] > 1.0) steps[i] = -steps[i];
  }
  if (cfg.fixedXi) steps[5] = 0.0;

  std::map<std::array<double, 6>, GaitEvaluation> cache;
  auto evaluateCached = [&](const GaitEllipse& g) {
    const auto key = toArray(g);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    const GaitEvaluation ev = evaluateGait(g, cfg);
    cache.emplace(key, ev);
    return ev;
  };

  auto objective = [&](const std::vector<double>& u) {
    const GaitEllipse g = decode(u);
    const double loss = evaluateCached(g).loss;
    if (!std::isfinite(loss)) {
      std::ostringstream msg;
      msg << "loss is not finite at sigma=" << g.sigma << " xc=" << g.xc << " yc=" << g.yc
          << " theta=" << g.theta << " a=" << g.a << " xi=" << g.xi;
      throw Error(ErrorCode::NonFiniteLoss, msg.str());
    }
    return loss;
  };

  OptimizationResult result;
  GaitEllipse seedGait = seed;
  if (cfg.fixedXi) seedGait.xi = *cfg.fixedXi;
  result.seedEvaluation = evaluateCached(seedGait);

  const NelderMeadResult nm = nelderMead(objective, u0, steps, options);
  result.evaluations = nm.evaluations;
  result.gait = decode(nm.point);
  result.evaluation = evaluateCached(result.gait);
  if (result.evaluation.loss > result.seedEvaluation.loss) {
    result.gait = seedGait;
    result.evaluation = result.seedEvaluation;
  }
  result.history.push_back({0, seedGait, result.seedEvaluation});
  for (std::size_t i = 0; i < nm.bestPoints.size(); ++i) {
    const GaitEllipse g = decode(nm.bestPoints[i]);
    result.history.push_back({static_cast<int>(i) + 1, g, evaluateCached(g)});
  }
  return result;
}

}  // namespace undulate
