#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

namespace survplaus {

struct SimplexOptions {
  double f_tolerance = 1e-8;      // spread of objective values over the simplex
  double x_tolerance = 1e-3;      // simplex diameter, inf-norm
  int max_iterations = 500;
  double initial_step = 0.2;      // per-coordinate offset for the start simplex
};

struct SimplexResult {
  std::array<double, 2> x{{0.0, 0.0}};
  double f = 0.0;
  bool converged = false;
  int iterations = 0;
};

// Nelder-Mead downhill simplex, standard coefficients (reflect 1, expand 2,
// contract 1/2, shrink 1/2). Dimension is 1 or 2 here, so vertices live in
// fixed storage. Minimizes f.
template <typename F>
SimplexResult nelder_mead(F&& f, const std::array<double, 2>& start,
                          std::size_t dim, const SimplexOptions& opt = {}) {
  using Point = std::array<double, 2>;
  const std::size_t m = dim + 1;  // vertex count

  std::array<Point, 3> x{};
  std::array<double, 3> fx{};
  for (std::size_t i = 0; i < m; ++i) {
    x[i] = start;
    if (i > 0) x[i][i - 1] += opt.initial_step;
    fx[i] = f(x[i]);
  }

  auto order = [&] {
    for (std::size_t i = 1; i < m; ++i) {
      for (std::size_t j = i; j > 0 && fx[j] < fx[j - 1]; --j) {
        std::swap(fx[j], fx[j - 1]);
        std::swap(x[j], x[j - 1]);
      }
    }
  };
  auto diameter = [&] {
    double d = 0.0;
    for (std::size_t i = 1; i < m; ++i) {
      for (std::size_t k = 0; k < dim; ++k) {
        d = std::max(d, std::fabs(x[i][k] - x[0][k]));
      }
    }
    return d;
  };

  order();
  SimplexResult result;
  int iter = 0;
  for (; iter < opt.max_iterations; ++iter) {
    if (fx[m - 1] - fx[0] < opt.f_tolerance && diameter() < opt.x_tolerance) {
      result.converged = true;
      break;
    }

    Point centroid{{0.0, 0.0}};
    for (std::size_t i = 0; i + 1 < m; ++i) {
      for (std::size_t k = 0; k < dim; ++k) centroid[k] += x[i][k];
    }
    for (std::size_t k = 0; k < dim; ++k) centroid[k] /= static_cast<double>(m - 1);

    auto blend = [&](double c) {
      Point p{{0.0, 0.0}};
      for (std::size_t k = 0; k < dim; ++k) {
        p[k] = centroid[k] + c * (centroid[k] - x[m - 1][k]);
      }
      return p;
    };

    const Point xr = blend(1.0);
    const double fr = f(xr);
    if (fr < fx[0]) {
      const Point xe = blend(2.0);
      const double fe = f(xe);
      if (fe < fr) {
        x[m - 1] = xe;
        fx[m - 1] = fe;
      } else {
        x[m - 1] = xr;
        fx[m - 1] = fr;
      }
    } else if (fr < fx[m - 2]) {
      x[m - 1] = xr;
      fx[m - 1] = fr;
    } else {
      bool shrink = false;
      if (fr < fx[m - 1]) {
        const Point xc = blend(0.5);  // outside contraction
        const double fc = f(xc);
        if (fc <= fr) {
          x[m - 1] = xc;
          fx[m - 1] = fc;
        } else {
          shrink = true;
        }
      } else {
        const Point xc = blend(-0.5);  // inside contraction
        const double fc = f(xc);
        if (fc < fx[m - 1]) {
          x[m - 1] = xc;
          fx[m - 1] = fc;
        } else {
          shrink = true;
        }
      }
      if (shrink) {
        for (std::size_t i = 1; i < m; ++i) {
          for (std::size_t k = 0; k < dim; ++k) {
            x[i][k] = x[0][k] + 0.5 * (x[i][k] - x[0][k]);
          }
          fx[i] = f(x[i]);
        }
      }
    }
    order();
  }

  result.x = x[0];
  result.f = fx[0];
  result.iterations = iter;
  return result;
}

}  // namespace survplaus
