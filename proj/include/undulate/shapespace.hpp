#pragma once

// Serpenoid shape space and elliptical gaits.
//
// A shape is the curvature profile
//   kappa(s) = w1 sin(2 pi xi s) + w2 cos(2 pi xi s),   s in [0, 1],
// where s is arc length normalized by the body length, so xi counts waves per
// body length. A gait is an ellipse traced once in the (w1, w2) plane.

#include <cmath>
#include <numbers>
#include <vector>

#include "undulate/geometry.hpp"

namespace undulate {

struct SerpenoidPoint {
  double w1 = 0.0;
  double w2 = 0.0;
};

struct GaitEllipse {
  double sigma = 1.0;  ///< flatness, minor/major axis ratio in [0, 1]
  double xc = 0.0;
  double yc = 0.0;
  double theta = 0.0;  ///< orientation of the major axis
  double a = 1.0;      ///< major semi-axis
  double xi = 1.0;     ///< spatial frequency, waves per body length

  void validate() const {
    if (!(sigma >= 0.0 && sigma <= 1.0))
      throw Error(ErrorCode::InvalidBounds, "sigma must lie in [0, 1]");
    // a = 0 is the degenerate (stationary) gait and stays admissible.
    if (!(a >= 0.0)) throw Error(ErrorCode::InvalidBounds, "major semi-axis must be non-negative");
    if (!(xi > 0.0)) throw Error(ErrorCode::InvalidBounds, "spatial frequency must be positive");
  }

  bool operator==(const GaitEllipse&) const = default;
};

/// Discretization of one gait cycle.
struct SimConfig {
  int timesteps = 50;  ///< samples per cycle, duplicate endpoint excluded
  int edges = 11;      ///< 12 vertices, 10 interior joints
  double bodyLength = 0.92;
  int cycles = 1;

  int vertexCount() const { return edges + 1; }
};

inline double serpenoidCurvature(const SerpenoidPoint& point, double xi, double s) {
  const double phase = 2.0 * std::numbers::pi * xi * s;
  return point.w1 * std::sin(phase) + point.w2 * std::cos(phase);
}

inline SerpenoidPoint sampleGait(const GaitEllipse& e, double t) {
  const double phase = 2.0 * std::numbers::pi * t;
  const double u = e.a * std::cos(phase);
  const double v = e.a * e.sigma * std::sin(phase);
  const double c = std::cos(e.theta), s = std::sin(e.theta);
  return {c * u - s * v + e.xc, s * u + c * v + e.yc};
}

/// Curvature samples at the M edge midpoints.
inline std::vector<double> curvatureSamples(const SerpenoidPoint& point, double xi, int edges) {
  std::vector<double> samples(static_cast<std::size_t>(edges));
  for (int i = 0; i < edges; ++i)
    samples[static_cast<std::size_t>(i)] =
        serpenoidCurvature(point, xi, (i + 0.5) / static_cast<double>(edges));
  return samples;
}

inline PositionedShape serpenoidShape(const SerpenoidPoint& point, double xi, int edges,
                                      double bodyLength) {
  return curveFromCurvature(curvatureSamples(point, xi, edges), bodyLength);
}

/// One gait cycle as `timesteps` canonical shapes at t = j / timesteps.
inline std::vector<PositionedShape> gaitToShapeSequence(const GaitEllipse& ellipse, int timesteps,
                                                        int edges, double bodyLength) {
  if (timesteps < 2) throw Error(ErrorCode::InvalidShape, "need at least two timesteps per cycle");
  if (edges < 2) throw Error(ErrorCode::InvalidShape, "need at least two edges");
  std::vector<PositionedShape> shapes;
  shapes.reserve(static_cast<std::size_t>(timesteps));
  for (int j = 0; j < timesteps; ++j) {
    const SerpenoidPoint p = sampleGait(ellipse, static_cast<double>(j) / timesteps);
    shapes.push_back(serpenoidShape(p, ellipse.xi, edges, bodyLength));
  }
  return shapes;
}

/// Repeats one cycle `cycles` times and closes the last cycle with the
/// initial shape, giving cycles * timesteps steps in total.
inline std::vector<PositionedShape> repeatCycles(const std::vector<PositionedShape>& cycle,
                                                 int cycles) {
  std::vector<PositionedShape> out;
  if (cycle.empty() || cycles < 1) return out;
  out.reserve(cycle.size() * static_cast<std::size_t>(cycles) + 1);
  for (int c = 0; c < cycles; ++c) out.insert(out.end(), cycle.begin(), cycle.end());
  out.push_back(cycle.front());
  return out;
}

inline std::vector<PositionedShape> gaitShapes(const GaitEllipse& ellipse, const SimConfig& sim) {
  return repeatCycles(gaitToShapeSequence(ellipse, sim.timesteps, sim.edges, sim.bodyLength),
                      sim.cycles);
}

/// Row-major T x (N - 2) matrix of signed turning angles.
struct JointAngles {
  int rows = 0;
  int cols = 0;
  std::vector<double> values;

  double operator()(int r, int c) const { return values[static_cast<std::size_t>(r * cols + c)]; }
  double& operator()(int r, int c) { return values[static_cast<std::size_t>(r * cols + c)]; }
};

/// Signed turning angle between consecutive edges at every interior vertex,
/// counter-clockwise positive.
inline JointAngles shapesToJointAngles(const std::vector<PositionedShape>& shapes) {
  JointAngles out;
  if (shapes.empty()) return out;
  const std::size_t n = shapes.front().size();
  if (n < 3) throw Error(ErrorCode::InvalidShape, "joint angles need at least three vertices");
  out.rows = static_cast<int>(shapes.size());
  out.cols = static_cast<int>(n - 2);
  out.values.resize(shapes.size() * (n - 2));
  for (std::size_t j = 0; j < shapes.size(); ++j) {
    const auto& v = shapes[j].vertices;
    if (v.size() != n) throw Error(ErrorCode::ShapeMismatch, "shapes differ in vertex count");
    for (std::size_t k = 1; k + 1 < n; ++k) {
      const Vec3 e0 = v[k] - v[k - 1];
      const Vec3 e1 = v[k + 1] - v[k];
      const double cross = e0.x() * e1.y() - e0.y() * e1.x();
      const double dot = e0.x() * e1.x() + e0.y() * e1.y();
      out(static_cast<int>(j), static_cast<int>(k - 1)) = std::atan2(cross, dot);
    }
  }
  return out;
}

/// Canonical shapes (origin, first edge along +x) with equal edges.
inline std::vector<PositionedShape> jointAnglesToShapes(const JointAngles& angles,
                                                        double edgeLength) {
  if (!(edgeLength > 0.0)) throw Error(ErrorCode::InvalidLength, "edge length must be positive");
  std::vector<PositionedShape> shapes;
  shapes.reserve(static_cast<std::size_t>(angles.rows));
  for (int j = 0; j < angles.rows; ++j) {
    std::vector<Vec3> vertices(static_cast<std::size_t>(angles.cols) + 2, Vec3::Zero());
    double heading = 0.0;
    vertices[1] = Vec3(edgeLength, 0.0, 0.0);
    for (int k = 0; k < angles.cols; ++k) {
      heading += angles(j, k);
      vertices[static_cast<std::size_t>(k) + 2] =
          vertices[static_cast<std::size_t>(k) + 1] +
          edgeLength * Vec3(std::cos(heading), std::sin(heading), 0.0);
    }
    shapes.push_back(shapeFromVertices(std::move(vertices)));
  }
  return shapes;
}

}  // namespace undulate
