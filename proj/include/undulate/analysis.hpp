#pragma once

// Cross-class performance comparison and cost of transport.

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "undulate/dynamics.hpp"
#include "undulate/error.hpp"

namespace undulate {

enum class DataClass { Exp, Sim, Resim };

inline const char* toString(DataClass c) {
  switch (c) {
    case DataClass::Exp: return "Exp";
    case DataClass::Sim: return "Sim";
    case DataClass::Resim: return "Resim";
  }
  return "?";
}

struct ClassDisplacements {
  DataClass label = DataClass::Sim;
  std::vector<double> values;  ///< per-gait displacement, same gait order in every class
};

/// Dense row-major square matrix.
struct SquareMatrix {
  std::size_t n = 0;
  std::vector<double> data;

  explicit SquareMatrix(std::size_t size = 0, double fill = 0.0) : n(size), data(size * size, fill) {}

  double operator()(std::size_t i, std::size_t j) const { return data[i * n + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data[i * n + j]; }
};

/// delta[i][j] = v_i / v_j.
inline SquareMatrix performanceRatios(std::span<const double> values) {
  for (double v : values)
    if (!(v > 0.0) || !std::isfinite(v))
      throw Error(ErrorCode::NonPositiveDisplacement, "displacements must be positive and finite");
  SquareMatrix delta(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    for (std::size_t j = 0; j < values.size(); ++j)
      delta(i, j) = i == j ? 1.0 : values[i] / values[j];
  return delta;
}

inline SquareMatrix performanceRatios(const ClassDisplacements& cls) {
  return performanceRatios(cls.values);
}

enum class StdKind { Population, Sample };

struct Summary {
  double mean = 0.0;
  double std = 0.0;
};

struct QuotientResult {
  SquareMatrix xi;
  Summary offDiagonal;  ///< diagonal excluded
};

namespace detail {

inline Summary summarize(std::span<const double> values, StdKind kind) {
  if (values.empty()) throw Error(ErrorCode::EmptyInput, "no values to summarize");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - mean) * (v - mean);
  const double denom = kind == StdKind::Population ? static_cast<double>(values.size())
                                                   : static_cast<double>(values.size()) - 1.0;
  return {mean, denom > 0.0 ? std::sqrt(sq / denom) : 0.0};
}

}  // namespace detail

/// Xi = dX / dY elementwise, with mean and standard deviation over the
/// off-diagonal entries.
inline QuotientResult ratioQuotients(const SquareMatrix& dX, const SquareMatrix& dY,
                                     StdKind kind = StdKind::Population) {
  if (dX.n != dY.n) throw Error(ErrorCode::DimensionMismatch, "ratio matrices differ in size");
  QuotientResult out{SquareMatrix(dX.n), {}};
  std::vector<double> off;
  for (std::size_t i = 0; i < dX.n; ++i)
    for (std::size_t j = 0; j < dX.n; ++j) {
      out.xi(i, j) = dX(i, j) / dY(i, j);
      if (i != j) off.push_back(out.xi(i, j));
    }
  if (!off.empty()) out.offDiagonal = detail::summarize(off, kind);
  else out.offDiagonal = {1.0, 0.0};
  return out;
}

inline Summary trialStats(std::span<const double> values, StdKind kind = StdKind::Population) {
  return detail::summarize(values, kind);
}

/// CoT = P / (m g v), dimensionless.
inline double costOfTransport(double power, double mass, double gravity, double velocity) {
  if (!(power > 0.0) || !(mass > 0.0) || !(gravity > 0.0) || !(velocity > 0.0))
    throw Error(ErrorCode::NonPositiveInput, "cost of transport needs positive inputs");
  return power / (mass * gravity * velocity);
}

/// Total dissipation divided by the cycle duration; a stand-in for logged
/// power when no hardware measurement exists.
inline double simulatedPowerProxy(const Trajectory& traj, double cycleDuration) {
  if (!(cycleDuration > 0.0))
    throw Error(ErrorCode::NonPositiveDuration, "duration must be positive");
  return totalEnergy(traj) / cycleDuration;
}

struct PowerLog {
  std::vector<double> times;
  std::vector<double> power;

  /// Time average by the trapezoid rule; a single sample is its own mean.
  double mean() const {
    if (power.empty()) throw Error(ErrorCode::EmptyInput, "empty power log");
    if (power.size() == 1) return power.front();
    double area = 0.0;
    for (std::size_t i = 1; i < power.size(); ++i)
      area += 0.5 * (power[i] + power[i - 1]) * (times[i] - times[i - 1]);
    return area / (times.back() - times.front());
  }

  void validate() const {
    if (times.size() != power.size() || times.empty())
      throw Error(ErrorCode::DimensionMismatch, "power log needs matching nonempty columns");
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (power[i] < 0.0) throw Error(ErrorCode::NonPositiveInput, "negative power sample");
      if (i > 0 && !(times[i] > times[i - 1]))
        throw Error(ErrorCode::InvalidMocap, "power log times must increase");
    }
  }
};

/// Velocity over active locomotion time; pauses between cycles are excluded.
inline double activeVelocity(double displacement, double activeTime) {
  if (!(activeTime > 0.0)) throw Error(ErrorCode::NonPositiveDuration, "active time must be positive");
  return displacement / activeTime;
}

}  // namespace undulate
