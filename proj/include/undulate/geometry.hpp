#pragma once

// Discrete planar curves embedded in R^3 (zero vertical component), planar
// rigid motions acting on them, and curvature-to-curve reconstruction.

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "undulate/error.hpp"

namespace undulate {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kEdgeEpsilon = 1e-12;

/// Rotation about the vertical axis followed by a planar translation,
/// x -> A x + b.
struct RigidMotion {
  double angle = 0.0;
  Vec2 translation = Vec2::Zero();

  static RigidMotion identity() { return {}; }

  Mat3 rotation() const {
    return Eigen::AngleAxisd(angle, Vec3::UnitZ()).toRotationMatrix();
  }

  Vec3 translation3() const { return {translation.x(), translation.y(), 0.0}; }

  Vec3 apply(const Vec3& x) const {
    const double c = std::cos(angle), s = std::sin(angle);
    return {c * x.x() - s * x.y() + translation.x(), s * x.x() + c * x.y() + translation.y(),
            x.z()};
  }

  Vec3 rotate(const Vec3& v) const {
    const double c = std::cos(angle), s = std::sin(angle);
    return {c * v.x() - s * v.y(), s * v.x() + c * v.y(), v.z()};
  }

  /// (this ∘ other)(x) = this(other(x)).
  RigidMotion compose(const RigidMotion& other) const {
    const double c = std::cos(angle), s = std::sin(angle);
    const Vec2& b = other.translation;
    return {angle + other.angle,
            Vec2(c * b.x() - s * b.y(), s * b.x() + c * b.y()) + translation};
  }

  RigidMotion inverse() const {
    const double c = std::cos(angle), s = std::sin(angle);
    const Vec2& b = translation;
    return {-angle, Vec2(-(c * b.x() + s * b.y()), -(-s * b.x() + c * b.y()))};
  }
};

/// Polygonal curve in world coordinates with one unit tangent per vertex.
struct PositionedShape {
  std::vector<Vec3> vertices;
  std::vector<Vec3> tangents;

  std::size_t size() const { return vertices.size(); }

  /// Total polyline length.
  double length() const {
    double total = 0.0;
    for (std::size_t k = 1; k < vertices.size(); ++k) total += (vertices[k] - vertices[k - 1]).norm();
    return total;
  }
};

/// Unit tangents by the angle-bisector rule: interior vertices get the
/// normalized sum of the adjacent unit edge vectors, endpoints their single
/// edge direction.
inline std::vector<Vec3> tangentsFromVertices(std::span<const Vec3> vertices) {
  const std::size_t n = vertices.size();
  if (n < 2) throw Error(ErrorCode::InvalidShape, "a curve needs at least two vertices");

  std::vector<Vec3> edges(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const Vec3 e = vertices[k + 1] - vertices[k];
    const double len = e.norm();
    if (len <= kEdgeEpsilon)
      throw Error(ErrorCode::ZeroLengthEdge,
                  "vertices " + std::to_string(k) + " and " + std::to_string(k + 1) + " coincide");
    edges[k] = e / len;
  }

  std::vector<Vec3> tangents(n);
  tangents.front() = edges.front();
  tangents.back() = edges.back();
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const Vec3 sum = edges[k - 1] + edges[k];
    const double len = sum.norm();
    // A full fold has no bisector; keep the incoming direction.
    tangents[k] = len > kEdgeEpsilon ? Vec3(sum / len) : edges[k - 1];
  }
  return tangents;
}

inline PositionedShape shapeFromVertices(std::vector<Vec3> vertices) {
  PositionedShape shape;
  shape.tangents = tangentsFromVertices(vertices);
  shape.vertices = std::move(vertices);
  return shape;
}

inline PositionedShape applyRigidMotion(const RigidMotion& g, const PositionedShape& shape) {
  PositionedShape out;
  out.vertices.reserve(shape.size());
  out.tangents.reserve(shape.tangents.size());
  for (const auto& p : shape.vertices) out.vertices.push_back(g.apply(p));
  for (const auto& t : shape.tangents) out.tangents.push_back(g.rotate(t));
  return out;
}

/// Reconstructs a polygonal curve of M = samples.size() equal edges from
/// curvature samples taken at the edge midpoints s_i = (i + 1/2)/M of the
/// normalized arc length. The heading of edge i is the midpoint-rule integral
/// of the curvature from 0 to s_i, so the tangent of the underlying smooth
/// curve at s = 0 points along +x and the curve starts at the origin.
inline PositionedShape curveFromCurvature(std::span<const double> samples, double bodyLength) {
  if (!(bodyLength > 0.0)) throw Error(ErrorCode::InvalidLength, "body length must be positive");
  if (samples.empty()) throw Error(ErrorCode::InvalidShape, "at least one curvature sample is required");

  const std::size_t m = samples.size();
  const double ds = 1.0 / static_cast<double>(m);
  const double edge = bodyLength / static_cast<double>(m);

  std::vector<Vec3> vertices(m + 1, Vec3::Zero());
  double heading = 0.5 * samples[0] * ds;
  for (std::size_t i = 0; i < m; ++i) {
    if (i > 0) heading += 0.5 * (samples[i - 1] + samples[i]) * ds;
    vertices[i + 1] = vertices[i] + edge * Vec3(std::cos(heading), std::sin(heading), 0.0);
  }
  return shapeFromVertices(std::move(vertices));
}

inline Vec3 centerOfMass(const PositionedShape& shape, std::span<const double> weights) {
  if (weights.size() != shape.size())
    throw Error(ErrorCode::ShapeMismatch, "weight count differs from vertex count");
  Vec3 sum = Vec3::Zero();
  double total = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (!(weights[k] > 0.0)) throw Error(ErrorCode::NonPositiveWeight, "weights must be positive");
    sum += weights[k] * shape.vertices[k];
    total += weights[k];
  }
  return sum / total;
}

/// Weighted least-squares planar alignment: the rigid motion g minimizing
/// sum_k w_k |g(source_k) - target_k|^2.
inline RigidMotion alignRigidly(const PositionedShape& source, const PositionedShape& target,
                                std::span<const double> weights) {
  if (source.size() != target.size() || weights.size() != source.size())
    throw Error(ErrorCode::ShapeMismatch, "alignment needs matching vertex counts");
  const Vec3 cs = centerOfMass(source, weights);
  const Vec3 ct = centerOfMass(target, weights);
  double dot = 0.0, cross = 0.0;
  for (std::size_t k = 0; k < source.size(); ++k) {
    const Vec3 a = source.vertices[k] - cs;
    const Vec3 b = target.vertices[k] - ct;
    dot += weights[k] * (a.x() * b.x() + a.y() * b.y());
    cross += weights[k] * (a.x() * b.y() - a.y() * b.x());
  }
  RigidMotion g{std::atan2(cross, dot), Vec2::Zero()};
  const Vec3 moved = g.rotate(cs);
  g.translation = Vec2(ct.x() - moved.x(), ct.y() - moved.y());
  return g;
}

}  // namespace undulate
