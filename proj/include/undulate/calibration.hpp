#pragma once

// Fitting the anisotropy ratio against measured marker trajectories.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "undulate/dynamics.hpp"

namespace undulate {

struct MocapTrajectory {
  std::vector<double> times;              ///< seconds, strictly increasing
  std::vector<std::vector<Vec2>> frames;  ///< markers per frame, meters

  std::size_t markerCount() const { return frames.empty() ? 0 : frames.front().size(); }

  void validate() const {
    if (frames.empty() || times.size() != frames.size())
      throw Error(ErrorCode::InvalidMocap, "frame and time counts must match and be nonzero");
    const std::size_t n = frames.front().size();
    if (n < 2) throw Error(ErrorCode::InvalidMocap, "need at least two markers per frame");
    for (std::size_t i = 0; i < frames.size(); ++i) {
      if (frames[i].size() != n)
        throw Error(ErrorCode::InconsistentMarkerCount,
                    "frame " + std::to_string(i) + " has " + std::to_string(frames[i].size()) +
                        " markers, expected " + std::to_string(n));
      if (i > 0 && !(times[i] > times[i - 1]))
        throw Error(ErrorCode::InvalidMocap, "times must be strictly increasing");
    }
  }
};

struct ComCurve {
  std::vector<double> times;
  std::vector<Vec2> positions;

  std::size_t size() const { return positions.size(); }

  /// |CoM(t_i) - CoM(t_0)| for every frame.
  std::vector<double> displacement() const {
    std::vector<double> out;
    out.reserve(positions.size());
    for (const auto& p : positions) out.push_back((p - positions.front()).norm());
    return out;
  }
};

/// Frame indices of a uniform downsampling to `count` frames that keeps the
/// first and last frame.
inline std::vector<std::size_t> downsampleIndices(std::size_t frames, std::size_t count) {
  std::vector<std::size_t> idx;
  if (frames == 0) return idx;
  if (count >= frames || count < 2) {
    idx.resize(frames);
    for (std::size_t i = 0; i < frames; ++i) idx[i] = i;
    return idx;
  }
  idx.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double pos = static_cast<double>(i) * static_cast<double>(frames - 1) /
                       static_cast<double>(count - 1);
    idx.push_back(static_cast<std::size_t>(std::llround(pos)));
  }
  return idx;
}

inline MocapTrajectory downsample(const MocapTrajectory& mocap, std::size_t count) {
  MocapTrajectory out;
  for (std::size_t i : downsampleIndices(mocap.frames.size(), count)) {
    out.times.push_back(mocap.times[i]);
    out.frames.push_back(mocap.frames[i]);
  }
  return out;
}

/// Marker frames as positioned shapes; `targetSteps` optionally downsamples
/// to that many frames.
inline std::vector<PositionedShape> extractShapes(const MocapTrajectory& mocap,
                                                  std::optional<std::size_t> targetSteps = {}) {
  mocap.validate();
  const MocapTrajectory source = targetSteps ? downsample(mocap, *targetSteps) : mocap;
  std::vector<PositionedShape> shapes;
  shapes.reserve(source.frames.size());
  for (const auto& frame : source.frames) {
    std::vector<Vec3> vertices;
    vertices.reserve(frame.size());
    for (const auto& m : frame) vertices.emplace_back(m.x(), m.y(), 0.0);
    shapes.push_back(shapeFromVertices(std::move(vertices)));
  }
  return shapes;
}

/// Marker frames of a simulated trajectory, sampled every `dt` seconds.
inline MocapTrajectory toMocap(const Trajectory& traj, double dt) {
  MocapTrajectory mocap;
  for (std::size_t t = 0; t < traj.shapes.size(); ++t) {
    mocap.times.push_back(static_cast<double>(t) * dt);
    std::vector<Vec2> frame;
    for (const auto& p : traj.shapes[t].vertices) frame.emplace_back(p.x(), p.y());
    mocap.frames.push_back(std::move(frame));
  }
  return mocap;
}

/// Integrates the executed shapes, anchored at the first measured pose.
inline Trajectory resimulate(const MocapTrajectory& mocap, const DissipationParams& params,
                             const SolverOptions& options = {}) {
  const auto shapes = extractShapes(mocap);
  return integrateMotionTrajectory(shapes, params, options);
}

inline ComCurve comCurve(const Trajectory& traj, std::span<const double> times) {
  if (times.size() != traj.shapes.size())
    throw Error(ErrorCode::DimensionMismatch, "time count differs from shape count");
  ComCurve curve;
  curve.times.assign(times.begin(), times.end());
  for (const auto& s : traj.shapes) {
    const Vec3 c = centerOfMass(s, traj.params.weights);
    curve.positions.emplace_back(c.x(), c.y());
  }
  return curve;
}

inline ComCurve comCurve(const MocapTrajectory& mocap, std::span<const double> weights) {
  mocap.validate();
  if (weights.size() != mocap.markerCount())
    throw Error(ErrorCode::ShapeMismatch, "weight count differs from marker count");
  ComCurve curve;
  curve.times = mocap.times;
  for (const auto& frame : mocap.frames) {
    Vec2 sum = Vec2::Zero();
    double total = 0.0;
    for (std::size_t k = 0; k < frame.size(); ++k) {
      if (!(weights[k] > 0.0)) throw Error(ErrorCode::NonPositiveWeight, "weights must be positive");
      sum += weights[k] * frame[k];
      total += weights[k];
    }
    curve.positions.push_back(sum / total);
  }
  return curve;
}

/// Linear interpolation of `curve` at `t`, clamped to its time range.
inline Vec2 interpolate(const ComCurve& curve, double t) {
  const auto& ts = curve.times;
  if (t <= ts.front()) return curve.positions.front();
  if (t >= ts.back()) return curve.positions.back();
  const auto it = std::upper_bound(ts.begin(), ts.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - ts.begin());
  const double u = (t - ts[i - 1]) / (ts[i] - ts[i - 1]);
  return (1.0 - u) * curve.positions[i - 1] + u * curve.positions[i];
}

/// Root-mean-square distance between two CoM paths. Curves of different
/// length are compared on the shorter curve's time grid, interpolating the
/// longer one linearly.
inline double rmsError(const ComCurve& a, const ComCurve& b) {
  if (a.size() == 0 || b.size() == 0) throw Error(ErrorCode::EmptyCurve, "empty CoM curve");
  double sum = 0.0;
  if (a.size() == b.size()) {
    for (std::size_t i = 0; i < a.size(); ++i) sum += (a.positions[i] - b.positions[i]).squaredNorm();
    return std::sqrt(sum / static_cast<double>(a.size()));
  }
  const ComCurve& shorter = a.size() < b.size() ? a : b;
  const ComCurve& longer = a.size() < b.size() ? b : a;
  if (longer.times.size() != longer.size() || shorter.times.size() != shorter.size())
    throw Error(ErrorCode::DimensionMismatch, "curves of different length need time stamps");
  for (std::size_t i = 0; i < shorter.size(); ++i)
    sum += (shorter.positions[i] - interpolate(longer, shorter.times[i])).squaredNorm();
  return std::sqrt(sum / static_cast<double>(shorter.size()));
}

struct FitSample {
  double epsilon = 0.0;
  double displacement = 0.0;  ///< final CoM displacement of the resimulation
  double rms = 0.0;
};

struct FitResult {
  double epsilon = 0.0;
  double rms = 0.0;
  double measuredDisplacement = 0.0;
  bool nonMonotone = false;  ///< displacements were not decreasing in epsilon
  std::vector<FitSample> history;
};

struct FitOptions {
  double intervalTolerance = 1e-4;
  int maxIterations = 50;
  double monotoneSlack = 0.01;
  SolverOptions solver;
};

/// Fits epsilon in [lo, hi]. Bisection matches the final resimulated CoM
/// displacement to the measured one (displacement decreases with epsilon);
/// the reported value is the evaluated candidate with the smallest CoM-path
/// RMS error. If the sampled displacements are not monotone, the search
/// switches to golden-section minimization of the RMS error.
inline FitResult fitAnisotropy(const MocapTrajectory& mocap, std::span<const double> weights,
                               double lo, double hi, const FitOptions& options = {}) {
  if (!(lo > 0.0 && lo < hi && hi <= 1.0))
    throw Error(ErrorCode::InvalidBounds, "need 0 < lo < hi <= 1");
  mocap.validate();
  const auto shapes = extractShapes(mocap);
  const ComCurve measured = comCurve(mocap, weights);
  const double target = (measured.positions.back() - measured.positions.front()).norm();

  FitResult result;
  result.measuredDisplacement = target;
  const std::vector<double> w(weights.begin(), weights.end());

  auto evaluate = [&](double eps) {
    const Trajectory traj = integrateMotionTrajectory(shapes, {w, eps}, options.solver);
    const ComCurve sim = comCurve(traj, mocap.times);
    FitSample sample{eps, (sim.positions.back() - sim.positions.front()).norm(),
                     rmsError(sim, measured)};
    result.history.push_back(sample);
    return sample;
  };

  auto monotone = [&] {
    std::vector<FitSample> sorted = result.history;
    std::sort(sorted.begin(), sorted.end(),
              [](const FitSample& a, const FitSample& b) { return a.epsilon < b.epsilon; });
    for (std::size_t i = 1; i < sorted.size(); ++i)
      if (sorted[i].displacement > sorted[i - 1].displacement * (1.0 + options.monotoneSlack) +
                                       1e-12)
        return false;
    return true;
  };

  const FitSample atLo = evaluate(lo);
  const FitSample atHi = evaluate(hi);
  result.nonMonotone = !monotone();

  if (!result.nonMonotone && target < atLo.displacement && target > atHi.displacement) {
    double a = lo, b = hi;
    for (int it = 0; it < options.maxIterations && b - a >= options.intervalTolerance; ++it) {
      const double mid = 0.5 * (a + b);
      const FitSample s = evaluate(mid);
      if (!monotone()) {
        result.nonMonotone = true;
        break;
      }
      if (s.displacement > target)
        a = mid;
      else
        b = mid;
    }
  }

  if (result.nonMonotone) {
    const double invPhi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - invPhi * (b - a), d = a + invPhi * (b - a);
    double fc = evaluate(c).rms, fd = evaluate(d).rms;
    for (int it = 0; it < options.maxIterations && b - a >= options.intervalTolerance; ++it) {
      if (fc < fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - invPhi * (b - a);
        fc = evaluate(c).rms;
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + invPhi * (b - a);
        fd = evaluate(d).rms;
      }
    }
  }

  const auto best = std::min_element(
      result.history.begin(), result.history.end(),
      [](const FitSample& x, const FitSample& y) { return x.rms < y.rms; });
  result.epsilon = best->epsilon;
  result.rms = best->rms;
  return result;
}

}  // namespace undulate
