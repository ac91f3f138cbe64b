#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

namespace undulate {

struct NelderMeadOptions {
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
  double diameterTolerance = 1e-4;
  int maxEvaluations = 500;
};

struct NelderMeadResult {
  std::vector<double> point;
  double value = 0.0;
  int evaluations = 0;
  int iterations = 0;
  std::vector<double> bestHistory;               ///< best value after each iteration
  std::vector<std::vector<double>> bestPoints;  ///< best vertex after each iteration
};

/// Downhill simplex minimization of `f` starting from `x0`. The initial
/// simplex offsets coordinate i by `steps[i]`; coordinates with a zero step
/// are held fixed.
template <class F>
NelderMeadResult nelderMead(F&& f, const std::vector<double>& x0, const std::vector<double>& steps,
                            const NelderMeadOptions& opt = {}) {
  using Point = std::vector<double>;
  const std::size_t dim = x0.size();

  NelderMeadResult result;
  auto eval = [&](const Point& x) {
    ++result.evaluations;
    return f(x);
  };

  std::vector<Point> simplex{x0};
  for (std::size_t i = 0; i < dim; ++i) {
    if (steps[i] == 0.0) continue;
    Point p = x0;
    p[i] += steps[i];
    simplex.push_back(std::move(p));
  }
  std::vector<double> values;
  values.reserve(simplex.size());
  for (const auto& p : simplex) values.push_back(eval(p));

  const std::size_t n = simplex.size() - 1;
  std::vector<std::size_t> order(simplex.size());
  auto sortSimplex = [&] {
    std::iota(order.begin(), order.end(), std::size_t{0});
    // Stable so that ties keep the earlier (older) vertex ahead.
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<Point> s;
    std::vector<double> v;
    for (std::size_t i : order) {
      s.push_back(simplex[i]);
      v.push_back(values[i]);
    }
    simplex = std::move(s);
    values = std::move(v);
  };
  auto diameter = [&] {
    double d = 0.0;
    for (std::size_t i = 1; i < simplex.size(); ++i) {
      double sq = 0.0;
      for (std::size_t j = 0; j < dim; ++j) sq += std::pow(simplex[i][j] - simplex[0][j], 2);
      d = std::max(d, std::sqrt(sq));
    }
    return d;
  };
  auto along = [&](const Point& from, const Point& to, double t) {
    Point p(dim);
    for (std::size_t j = 0; j < dim; ++j) p[j] = from[j] + t * (to[j] - from[j]);
    return p;
  };

  sortSimplex();
  while (n > 0 && result.evaluations < opt.maxEvaluations && diameter() >= opt.diameterTolerance) {
    ++result.iterations;
    Point centroid(dim, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < dim; ++j) centroid[j] += simplex[i][j] / static_cast<double>(n);

    const Point& worst = simplex[n];
    const Point reflected = along(centroid, worst, -opt.reflection);
    const double fr = eval(reflected);

    if (fr < values[0]) {
      const Point expanded = along(centroid, worst, -opt.reflection * opt.expansion);
      const double fe = eval(expanded);
      if (fe < fr) {
        simplex[n] = expanded;
        values[n] = fe;
      } else {
        simplex[n] = reflected;
        values[n] = fr;
      }
    } else if (fr < values[n - 1]) {
      simplex[n] = reflected;
      values[n] = fr;
    } else {
      const bool outside = fr < values[n];
      const Point contracted = outside ? along(centroid, reflected, opt.contraction)
                                       : along(centroid, worst, opt.contraction);
      const double fc = eval(contracted);
      if (fc < std::min(fr, values[n])) {
        simplex[n] = contracted;
        values[n] = fc;
      } else {
        for (std::size_t i = 1; i < simplex.size(); ++i) {
          simplex[i] = along(simplex[0], simplex[i], opt.shrink);
          values[i] = eval(simplex[i]);
        }
      }
    }
    sortSimplex();
    result.bestHistory.push_back(values[0]);
    result.bestPoints.push_back(simplex[0]);
  }

  result.point = simplex[0];
  result.value = values[0];
  return result;
}

}  // namespace undulate
