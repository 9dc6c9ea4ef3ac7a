#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "survplaus/model.hpp"

namespace survplaus {

// Evaluation lattice over the parameter space: one axis per coordinate,
// points enumerated row-major (first axis outermost).
struct ParameterGrid {
  std::vector<std::vector<double>> axes;
  std::vector<ParameterVector> points;

  std::size_t dimension() const { return axes.size(); }
  std::size_t size() const { return points.size(); }

  void rebuild_points() {
    points.clear();
    if (axes.size() == 1) {
      points.reserve(axes[0].size());
      for (double v : axes[0]) points.emplace_back(v);
    } else if (axes.size() == 2) {
      points.reserve(axes[0].size() * axes[1].size());
      for (double a : axes[0]) {
        for (double b : axes[1]) points.emplace_back(a, b);
      }
    } else {
      throw std::invalid_argument("ParameterGrid: dimension must be 1 or 2");
    }
  }

  // Flat index of the lattice node nearest to theta (per-axis nearest).
  std::size_t nearest_index(const ParameterVector& theta) const {
    std::vector<std::size_t> idx(axes.size());
    for (std::size_t a = 0; a < axes.size(); ++a) {
      std::size_t best = 0;
      double best_d = std::fabs(axes[a][0] - theta[a]);
      for (std::size_t i = 1; i < axes[a].size(); ++i) {
        const double d = std::fabs(axes[a][i] - theta[a]);
        if (d < best_d) {
          best_d = d;
          best = i;
        }
      }
      idx[a] = best;
    }
    return axes.size() == 1 ? idx[0] : idx[0] * axes[1].size() + idx[1];
  }
};

namespace detail {

// Axis of `count` points around a center value, spanning
// [lo_factor*center, hi_factor*center] multiplicatively and containing the
// center exactly. Geometric spacing on each side of the center; mirrored for
// negative centers (the log-normal location can sit anywhere in R), linear
// fallback when the center is at zero.
inline std::vector<double> axis_around(double center, double lo_factor,
                                       double hi_factor, std::size_t count) {
  if (count < 3) throw std::invalid_argument("axis needs at least 3 points");
  std::vector<double> axis;
  axis.reserve(count);
  if (std::fabs(center) < 1e-12) {
    for (std::size_t i = 0; i < count; ++i) {
      axis.push_back(-1.0 + 2.0 * static_cast<double>(i) /
                                static_cast<double>(count - 1));
    }
    return axis;
  }
  const double mag = std::fabs(center);
  const std::size_t below = (count - 1) / 2;
  const std::size_t above = count - 1 - below;
  std::vector<double> mags;
  mags.reserve(count);
  for (std::size_t i = 0; i < below; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(below);
    mags.push_back(mag * lo_factor * std::pow(1.0 / lo_factor, f));
  }
  mags.push_back(mag);
  for (std::size_t i = 1; i <= above; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(above);
    mags.push_back(mag * std::pow(hi_factor, f));
  }
  if (center > 0.0) {
    for (double v : mags) axis.push_back(v);
  } else {
    for (std::size_t i = mags.size(); i-- > 0;) axis.push_back(-mags[i]);
  }
  return axis;
}

}  // namespace detail

// Explicit axis from bounds: `logarithmic` requires positive bounds.
inline std::vector<double> make_axis(double lo, double hi, std::size_t count,
                                     bool logarithmic) {
  if (!(hi > lo)) throw std::invalid_argument("make_axis: need hi > lo");
  if (count < 2) throw std::invalid_argument("make_axis: need >= 2 points");
  if (logarithmic && !(lo > 0.0)) {
    throw std::invalid_argument("make_axis: log spacing needs positive bounds");
  }
  std::vector<double> axis(count);
  const double a = logarithmic ? std::log(lo) : lo;
  const double b = logarithmic ? std::log(hi) : hi;
  for (std::size_t i = 0; i < count; ++i) {
    const double v =
        a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1);
    axis[i] = logarithmic ? std::exp(v) : v;
  }
  return axis;
}

// Default evaluation grid centered on the fitted estimate: 201 points over
// [0.2, 3] x estimate for one-parameter families, a 61 x 61 box over
// [0.3, 3] x estimate per coordinate for two-parameter families. The
// estimate itself is always a lattice node.
inline ParameterGrid default_grid(const ModelSpec& model,
                                  const ParameterVector& estimate) {
  ParameterGrid grid;
  if (model.parameter_dimension() == 1) {
    grid.axes.push_back(detail::axis_around(estimate[0], 0.2, 3.0, 201));
  } else {
    grid.axes.push_back(detail::axis_around(estimate[0], 0.3, 3.0, 61));
    grid.axes.push_back(detail::axis_around(estimate[1], 0.3, 3.0, 61));
  }
  grid.rebuild_points();
  return grid;
}

inline ParameterGrid single_point_grid(const ParameterVector& theta) {
  ParameterGrid grid;
  for (std::size_t a = 0; a < theta.dimension(); ++a) {
    grid.axes.push_back({theta[a]});
  }
  grid.points.push_back(theta);
  return grid;
}

}  // namespace survplaus
