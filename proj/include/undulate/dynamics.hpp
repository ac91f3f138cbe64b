#pragma once

// Variational integrator for shape-driven locomotion in a dissipative medium.
//
// Each vertex k carries the anisotropic tensor D_k = w_k (I + (eps - 1) T_k T_k^T).
// Consecutive positioned shapes are coupled by the dissipation energy
//   E = 1/2 sum_k < 1/2 (D_k^t + D_k^{t+1}) dp_k, dp_k >,
// and the physical placement of the next shape is the rigid motion for which
// the geometric momentum mu(prev, next) vanishes. In the plane only three of
// the six momentum components are nontrivial (vertical rotation, in-plane
// translation), matching the three unknowns (angle, b_x, b_y).

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "undulate/geometry.hpp"

namespace undulate {

struct DissipationParams {
  std::vector<double> weights;
  double epsilon = 1.0;

  /// w_k = totalMass / n for every vertex.
  static DissipationParams uniform(std::size_t n, double totalMass, double epsilon) {
    return {std::vector<double>(n, totalMass / static_cast<double>(n)), epsilon};
  }

  double totalWeight() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

  void validate(std::size_t vertexCount) const {
    if (!(epsilon > 0.0 && epsilon <= 1.0))
      throw Error(ErrorCode::InvalidAnisotropy, "anisotropy ratio must lie in (0, 1]");
    if (weights.size() != vertexCount)
      throw Error(ErrorCode::ShapeMismatch, "expected " + std::to_string(vertexCount) +
                                                " weights, got " + std::to_string(weights.size()));
    for (double w : weights)
      if (!(w > 0.0)) throw Error(ErrorCode::InvalidWeight, "weights must be positive");
  }
};

inline Mat3 localTensor(const Vec3& tangent, double w, double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1.0))
    throw Error(ErrorCode::InvalidAnisotropy, "anisotropy ratio must lie in (0, 1]");
  if (!(w > 0.0)) throw Error(ErrorCode::InvalidWeight, "weight must be positive");
  return w * (Mat3::Identity() + (epsilon - 1.0) * tangent * tangent.transpose());
}

namespace detail {

inline void requireMatching(const PositionedShape& a, const PositionedShape& b,
                            const DissipationParams& params) {
  if (a.size() != b.size() || a.tangents.size() != a.size() || b.tangents.size() != b.size())
    throw Error(ErrorCode::ShapeMismatch, "shapes differ in vertex count");
  params.validate(a.size());
}

// Unchecked tensor, for inner loops after validation.
inline Mat3 tensor(const Vec3& t, double w, double epsilon) {
  return w * (Mat3::Identity() + (epsilon - 1.0) * t * t.transpose());
}

}  // namespace detail

inline double stepEnergy(const PositionedShape& prev, const PositionedShape& next,
                         const DissipationParams& params) {
  detail::requireMatching(prev, next, params);
  double energy = 0.0;
  for (std::size_t k = 0; k < prev.size(); ++k) {
    const Vec3 dp = next.vertices[k] - prev.vertices[k];
    const Mat3 mean = 0.5 * (detail::tensor(prev.tangents[k], params.weights[k], params.epsilon) +
                             detail::tensor(next.tangents[k], params.weights[k], params.epsilon));
    energy += dp.dot(mean * dp);
  }
  return 0.5 * energy;
}

/// Geometric momentum (mu_rot, mu_tran), including the -1/2 prefactor.
struct Momentum {
  Vec3 rot = Vec3::Zero();
  Vec3 tran = Vec3::Zero();

  /// The three components that are nontrivial for planar shapes.
  Vec3 planar() const { return {rot.z(), tran.x(), tran.y()}; }
};

inline Momentum geometricMomentum(const PositionedShape& prev, const PositionedShape& next,
                                  const DissipationParams& params) {
  detail::requireMatching(prev, next, params);
  Momentum mu;
  for (std::size_t k = 0; k < prev.size(); ++k) {
    const Vec3& p0 = prev.vertices[k];
    const Vec3& p1 = next.vertices[k];
    const Vec3 dp = p1 - p0;
    const Vec3 d0 = detail::tensor(prev.tangents[k], params.weights[k], params.epsilon) * dp;
    const Vec3 d1 = detail::tensor(next.tangents[k], params.weights[k], params.epsilon) * dp;
    mu.rot += p1.cross(d0) + p0.cross(d1);
    mu.tran += 0.5 * (d0 + d1);
  }
  mu.rot *= -0.5;
  mu.tran *= -0.5;
  return mu;
}

struct SolverOptions {
  double tolerance = 1e-10;  ///< relative to (sum w_k) * bodyLength
  int maxIterations = 100;
};

struct StepSolution {
  RigidMotion motion;
  PositionedShape positioned;
  Vec3 residual = Vec3::Zero();
  int iterations = 0;
};

namespace detail {

// Jacobian of the planar momentum with respect to a correction
// x -> R(theta)(x - pivot) + pivot + b applied to `candidate`, at theta = 0, b = 0.
inline Mat3 momentumJacobian(const PositionedShape& prev, const PositionedShape& candidate,
                             const DissipationParams& params, const Vec3& pivot) {
  const Vec3 z = Vec3::UnitZ();
  const double eps = params.epsilon;
  Vec3 rotTheta = Vec3::Zero(), tranTheta = Vec3::Zero();
  Mat3 rotB = Mat3::Zero(), tranB = Mat3::Zero();

  for (std::size_t k = 0; k < prev.size(); ++k) {
    const double w = params.weights[k];
    const Vec3& p0 = prev.vertices[k];
    const Vec3& p1 = candidate.vertices[k];
    const Vec3& t1 = candidate.tangents[k];
    const Vec3 dp = p1 - p0;
    const Mat3 d0 = tensor(prev.tangents[k], w, eps);
    const Mat3 d1 = tensor(t1, w, eps);
    const Vec3 d0dp = d0 * dp;

    const Vec3 v = z.cross(p1 - pivot);
    const Vec3 tdot = z.cross(t1);
    const Mat3 dd1 = w * (eps - 1.0) * (tdot * t1.transpose() + t1 * tdot.transpose());

    tranTheta += (d0 + d1) * v + dd1 * dp;
    rotTheta += v.cross(d0dp) + p1.cross(d0 * v) + p0.cross(dd1 * dp + d1 * v);

    for (int j = 0; j < 3; ++j) {
      const Vec3 e = Vec3::Unit(j);
      tranB.col(j) += (d0 + d1) * e;
      rotB.col(j) += e.cross(d0dp) + p1.cross(d0 * e) + p0.cross(d1 * e);
    }
  }

  // mu_rot = -1/2 sum(...), mu_tran = -1/4 sum((D0 + D1) dp)
  Mat3 jac;
  jac(0, 0) = -0.5 * rotTheta.z();
  jac(0, 1) = -0.5 * rotB(2, 0);
  jac(0, 2) = -0.5 * rotB(2, 1);
  jac(1, 0) = -0.25 * tranTheta.x();
  jac(1, 1) = -0.25 * tranB(0, 0);
  jac(1, 2) = -0.25 * tranB(0, 1);
  jac(2, 0) = -0.25 * tranTheta.y();
  jac(2, 1) = -0.25 * tranB(1, 0);
  jac(2, 2) = -0.25 * tranB(1, 1);
  return jac;
}

inline RigidMotion correction(const Vec3& delta, const Vec3& pivot) {
  // x -> R(x - c) + c + b  ==  R x + (c - R c + b)
  RigidMotion h{delta(0), Vec2::Zero()};
  const Vec3 rc = h.rotate(pivot);
  h.translation = Vec2(pivot.x() - rc.x() + delta(1), pivot.y() - rc.y() + delta(2));
  return h;
}

inline StepSolution newtonSolve(const PositionedShape& prev, const PositionedShape& nextShape,
                                const DissipationParams& params, const RigidMotion& guess,
                                const SolverOptions& options, double threshold) {
  StepSolution sol;
  sol.motion = guess;
  sol.positioned = applyRigidMotion(guess, nextShape);
  sol.residual = geometricMomentum(prev, sol.positioned, params).planar();
  double norm = sol.residual.norm();

  while (true) {
    if (!std::isfinite(norm))
      throw SolverError(ErrorCode::NoConvergence, "non-finite momentum residual", sol.residual,
                        sol.iterations);
    if (norm <= threshold) return sol;
    if (sol.iterations >= options.maxIterations)
      throw SolverError(ErrorCode::NoConvergence, "iteration limit reached", sol.residual,
                        sol.iterations);
    ++sol.iterations;

    const Vec3 pivot = centerOfMass(sol.positioned, params.weights);
    const Mat3 jac = momentumJacobian(prev, sol.positioned, params, pivot);
    Vec3 delta;
    Eigen::FullPivLU<Mat3> lu(jac);
    if (lu.isInvertible() && lu.rcond() > 1e-14) {
      delta = lu.solve(-sol.residual);
    } else {
      // Levenberg-style regularization for (near) rank-deficient Jacobians.
      const double lambda = 1e-8 * std::max(jac.norm(), std::numeric_limits<double>::min());
      const Mat3 normal = jac.transpose() * jac + lambda * lambda * Mat3::Identity();
      Eigen::LDLT<Mat3> ldlt(normal);
      if (ldlt.info() != Eigen::Success || !(jac.norm() > 0.0))
        throw SolverError(ErrorCode::DegenerateJacobian, "singular momentum Jacobian",
                          sol.residual, sol.iterations);
      delta = ldlt.solve(-(jac.transpose() * sol.residual));
    }
    if (!delta.allFinite())
      throw SolverError(ErrorCode::DegenerateJacobian, "singular momentum Jacobian", sol.residual,
                        sol.iterations);

    // Backtracking: halve the step until the residual norm decreases.
    bool accepted = false;
    double step = 1.0;
    for (int halving = 0; halving < 40; ++halving, step *= 0.5) {
      const RigidMotion motion = correction(step * delta, pivot).compose(sol.motion);
      PositionedShape positioned = applyRigidMotion(motion, nextShape);
      const Vec3 residual = geometricMomentum(prev, positioned, params).planar();
      const double trial = residual.norm();
      if (trial < norm) {
        sol.motion = motion;
        sol.positioned = std::move(positioned);
        sol.residual = residual;
        norm = trial;
        accepted = true;
        break;
      }
    }
    if (!accepted)
      throw SolverError(ErrorCode::NoConvergence, "line search stalled", sol.residual,
                        sol.iterations);
  }
}

}  // namespace detail

/// Places `nextShape` by the rigid motion that zeroes the planar momentum
/// against `prev`, using damped Newton iterations started at `guess`. If the
/// iteration from `guess` fails, it is restarted once from the weighted
/// least-squares alignment of `nextShape` onto `prev`.
inline StepSolution positionStep(const PositionedShape& prev, const PositionedShape& nextShape,
                                 const DissipationParams& params, const RigidMotion& guess,
                                 const SolverOptions& options = {}) {
  detail::requireMatching(prev, nextShape, params);
  const double scale = params.totalWeight() * std::max(prev.length(), kEdgeEpsilon);
  const double threshold = options.tolerance * scale;
  try {
    return detail::newtonSolve(prev, nextShape, params, guess, options, threshold);
  } catch (const SolverError&) {
    const RigidMotion aligned = alignRigidly(nextShape, prev, params.weights);
    return detail::newtonSolve(prev, nextShape, params, aligned, options, threshold);
  }
}

struct Trajectory {
  std::vector<PositionedShape> shapes;
  std::vector<double> stepEnergies;
  std::vector<RigidMotion> motions;   ///< g_t for t = 1..T
  std::vector<Vec3> residuals;        ///< planar momentum at each accepted step
  DissipationParams params;

  std::size_t steps() const { return stepEnergies.size(); }
};

inline double totalEnergy(const Trajectory& traj) {
  return std::accumulate(traj.stepEnergies.begin(), traj.stepEnergies.end(), 0.0);
}

/// Integrates a shape sequence into positioned shapes. The first shape is
/// kept verbatim; each following shape is positioned by `positionStep`,
/// seeded with the previous motion (the first step is seeded by rigid
/// alignment onto the initial shape).
inline Trajectory integrateMotionTrajectory(std::span<const PositionedShape> shapes,
                                            const DissipationParams& params,
                                            const SolverOptions& options = {}) {
  if (shapes.empty()) throw Error(ErrorCode::InvalidShape, "empty shape sequence");
  const std::size_t n = shapes.front().size();
  if (n < 2) throw Error(ErrorCode::InvalidShape, "shapes need at least two vertices");
  params.validate(n);
  for (const auto& s : shapes)
    if (s.size() != n || s.tangents.size() != n)
      throw Error(ErrorCode::ShapeMismatch, "shapes differ in vertex count");

  Trajectory traj;
  traj.params = params;
  traj.shapes.reserve(shapes.size());
  traj.stepEnergies.reserve(shapes.size() - 1);
  traj.motions.reserve(shapes.size() - 1);
  traj.residuals.reserve(shapes.size() - 1);
  traj.shapes.push_back(shapes.front());

  RigidMotion guess;
  for (std::size_t t = 1; t < shapes.size(); ++t) {
    const PositionedShape& prev = traj.shapes.back();
    if (t == 1) guess = alignRigidly(shapes[1], prev, params.weights);
    StepSolution sol;
    try {
      sol = positionStep(prev, shapes[t], params, guess, options);
    } catch (const SolverError& e) {
      throw e.atTimestep(static_cast<long>(t));
    }
    traj.stepEnergies.push_back(stepEnergy(prev, sol.positioned, params));
    traj.motions.push_back(sol.motion);
    traj.residuals.push_back(sol.residual);
    traj.shapes.push_back(std::move(sol.positioned));
    guess = sol.motion;
  }
  return traj;
}

}  // namespace undulate
