#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "undulate/io.hpp"

namespace undulate {

/// Defaults describe the reference robot: 0.92 m, 1.38 kg, 12 marker and
/// wheel stations, and the averaged fitted anisotropy 0.1865.
struct RunConfig {
  double bodyLength = 0.92;
  double totalMass = 1.38;
  int vertices = 12;
  std::optional<std::filesystem::path> weightsFile;

  int timesteps = 50;
  int cycles = 1;
  double epsilon = 0.1865;

  SolverOptions solver;
  GaitBounds bounds;

  void validate() const {
    if (vertices < 3) throw Error(ErrorCode::ParseError, "vertices must be at least 3");
    if (timesteps < 2) throw Error(ErrorCode::ParseError, "timesteps must be at least 2");
    if (cycles < 1) throw Error(ErrorCode::ParseError, "cycles must be at least 1");
    if (!(epsilon > 0.0 && epsilon <= 1.0))
      throw Error(ErrorCode::InvalidAnisotropy, "epsilon must lie in (0, 1]");
    if (!(bodyLength > 0.0)) throw Error(ErrorCode::InvalidLength, "body length must be positive");
    if (!(totalMass > 0.0)) throw Error(ErrorCode::NonPositiveWeight, "mass must be positive");
    if (!(solver.tolerance > 0.0)) throw Error(ErrorCode::ParseError, "solver tolerance must be positive");
    if (solver.maxIterations < 0)
      throw Error(ErrorCode::ParseError, "solver iteration limit must be non-negative");
    bounds.validate();
  }

  SimConfig sim() const { return {timesteps, vertices - 1, bodyLength, cycles}; }

  /// Per-vertex weights for `n` vertices: the weight file when given,
  /// otherwise the total mass split evenly.
  std::vector<double> weights(std::size_t n) const {
    if (!weightsFile) return std::vector<double>(n, totalMass / static_cast<double>(n));
    auto in = io::openRead(*weightsFile);
    auto w = io::readWeights(in);
    if (w.size() != n)
      throw Error(ErrorCode::ShapeMismatch, "weight file has " + std::to_string(w.size()) +
                                                " entries, expected " + std::to_string(n));
    return w;
  }

  DissipationParams params(std::size_t n) const { return {weights(n), epsilon}; }

  /// Applies recognized keys; unknown keys are rejected.
  void apply(const io::KeyValues& kv) {
    for (const auto& [key, value] : kv) {
      if (key == "body_length") bodyLength = io::parseDouble(value, key);
      else if (key == "mass") totalMass = io::parseDouble(value, key);
      else if (key == "vertices") vertices = static_cast<int>(io::parseInt(value, key));
      else if (key == "edges") vertices = static_cast<int>(io::parseInt(value, key)) + 1;
      else if (key == "weights") weightsFile = value;
      else if (key == "timesteps") timesteps = static_cast<int>(io::parseInt(value, key));
      else if (key == "cycles") cycles = static_cast<int>(io::parseInt(value, key));
      else if (key == "epsilon") epsilon = io::parseDouble(value, key);
      else if (key == "solver_tolerance") solver.tolerance = io::parseDouble(value, key);
      else if (key == "solver_max_iterations")
        solver.maxIterations = static_cast<int>(io::parseInt(value, key));
      else if (key.starts_with("bounds_")) applyBound(key, value);
      else throw Error(ErrorCode::ParseError, "unknown config key '" + key + "'");
    }
  }

  /// `bounds_<param> = lo, hi` for one of sigma, xc, yc, theta, a, xi.
  void applyBound(const std::string& key, const std::string& value) {
    const auto comma = value.find(',');
    if (comma == std::string::npos)
      throw Error(ErrorCode::ParseError, key + " expects 'lo, hi'");
    const Interval range{io::parseDouble(value.substr(0, comma), key),
                         io::parseDouble(value.substr(comma + 1), key)};
    const std::string name = key.substr(7);
    if (name == "sigma") bounds.sigma = range;
    else if (name == "xc") bounds.xc = range;
    else if (name == "yc") bounds.yc = range;
    else if (name == "theta") bounds.theta = range;
    else if (name == "a") bounds.a = range;
    else if (name == "xi") bounds.xi = range;
    else throw Error(ErrorCode::ParseError, "unknown bound '" + key + "'");
  }

  /// Discretization keys carried by a gait file.
  void applyGaitFile(const io::KeyValues& kv) {
    if (auto it = kv.find("timesteps"); it != kv.end())
      timesteps = static_cast<int>(io::parseInt(it->second, "timesteps"));
    if (auto it = kv.find("edges"); it != kv.end())
      vertices = static_cast<int>(io::parseInt(it->second, "edges")) + 1;
    if (auto it = kv.find("body_length"); it != kv.end())
      bodyLength = io::parseDouble(it->second, "body_length");
  }
};

}  // namespace undulate
