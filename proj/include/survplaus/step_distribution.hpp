#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "survplaus/data.hpp"
#include "survplaus/random.hpp"

namespace survplaus {

enum class AtomLocation { None, PositiveInfinity, Zero };

inline const char* to_string(AtomLocation loc) {
  switch (loc) {
    case AtomLocation::None: return "none";
    case AtomLocation::PositiveInfinity: return "positive_infinity";
    case AtomLocation::Zero: return "zero";
  }
  return "unknown";
}

// A right-continuous step survival function with an optional boundary atom.
// survival_values[k] is the value on [jump_points[k], jump_points[k+1]).
// With an atom at +infinity the survival function levels off at the atom
// mass; with an atom at 0 it starts at 1 - mass instead of 1.
struct StepDistribution {
  std::vector<double> jump_points;
  std::vector<double> survival_values;
  double boundary_atom_mass = 0.0;
  AtomLocation boundary_atom_location = AtomLocation::None;

  double initial_value() const {
    return boundary_atom_location == AtomLocation::Zero
               ? 1.0 - boundary_atom_mass
               : 1.0;
  }

  double survival_at(double t) const {
    auto it = std::upper_bound(jump_points.begin(), jump_points.end(), t);
    if (it == jump_points.begin()) return initial_value();
    return survival_values[static_cast<std::size_t>(it - jump_points.begin()) - 1];
  }

  void validate() const {
    if (jump_points.size() != survival_values.size()) {
      throw std::logic_error("StepDistribution: jump/value size mismatch");
    }
    for (std::size_t i = 0; i < jump_points.size(); ++i) {
      if (i > 0 && !(jump_points[i] > jump_points[i - 1])) {
        throw std::logic_error("StepDistribution: jump points not increasing");
      }
      if (survival_values[i] < -1e-15 || survival_values[i] > initial_value() + 1e-15) {
        throw std::logic_error("StepDistribution: survival value out of range");
      }
      if (i > 0 && survival_values[i] > survival_values[i - 1] + 1e-15) {
        throw std::logic_error("StepDistribution: survival values increase");
      }
    }
    const double tail = survival_values.empty() ? initial_value()
                                                : survival_values.back();
    const double expected_tail =
        boundary_atom_location == AtomLocation::PositiveInfinity
            ? boundary_atom_mass
            : 0.0;
    if (std::fabs(tail - expected_tail) > 1e-12) {
      throw std::logic_error("StepDistribution: tail mass inconsistent");
    }
  }
};

namespace detail {

struct ProductLimit {
  std::vector<double> jumps;   // distinct event times, ascending
  std::vector<double> values;  // survival value at and after each jump
  double trailing_mass = 1.0;  // survival beyond the last observation
};

// Product-limit sweep over arbitrary real times. Ties between events and
// censorings at the same time: events are taken first, so tied censored
// units still count as at risk for that time's events.
inline ProductLimit product_limit(std::vector<double> times,
                                  std::vector<int> statuses) {
  const std::size_t n = times.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return times[a] < times[b];
  });

  ProductLimit pl;
  double surv = 1.0;
  std::size_t at_risk = n;
  std::size_t i = 0;
  while (i < n) {
    const double t = times[order[i]];
    std::size_t events = 0, total = 0;
    for (; i < n && times[order[i]] == t; ++i, ++total) {
      events += static_cast<std::size_t>(statuses[order[i]]);
    }
    if (events > 0) {
      surv *= 1.0 - static_cast<double>(events) / static_cast<double>(at_risk);
      pl.jumps.push_back(t);
      pl.values.push_back(surv);
    }
    at_risk -= total;
  }
  pl.trailing_mass = surv;
  return pl;
}

}  // namespace detail

// Standard Kaplan-Meier product-limit estimate for right-censored data. When
// the largest observation is censored, the unresolved mass stays as a
// boundary atom at +infinity.
inline StepDistribution kaplan_meier(const SurvivalDataset& data) {
  if (data.censoring_side() != CensoringSide::Right) {
    throw std::invalid_argument("kaplan_meier expects right-censoring orientation");
  }
  std::vector<double> times;
  std::vector<int> statuses;
  times.reserve(data.size());
  statuses.reserve(data.size());
  for (const auto& obs : data.observations()) {
    times.push_back(obs.time);
    statuses.push_back(obs.status);
  }
  const auto pl = detail::product_limit(std::move(times), std::move(statuses));

  StepDistribution dist;
  dist.jump_points = pl.jumps;
  dist.survival_values = pl.values;
  if (pl.trailing_mass > 0.0) {
    dist.boundary_atom_mass = pl.trailing_mass;
    dist.boundary_atom_location = AtomLocation::PositiveInfinity;
  }
  return dist;
}

// Kaplan-Meier with the event/censored roles reversed: estimates the
// censoring distribution G from the same observations. Right-censored data:
// flip every status and run the standard estimator, which leaves an atom at
// +infinity whenever the largest observation is an (original) event. Left-
// censored data: the same construction on the time-reversed axis, so the
// atom lands at 0 when the smallest observation is an event.
inline StepDistribution reversed_kaplan_meier(const SurvivalDataset& data) {
  if (data.censoring_side() == CensoringSide::Right) {
    return kaplan_meier(data.with_flipped_status());
  }

  std::vector<double> times;
  std::vector<int> statuses;
  times.reserve(data.size());
  statuses.reserve(data.size());
  for (const auto& obs : data.observations()) {
    times.push_back(-obs.time);
    statuses.push_back(1 - obs.status);
  }
  const auto pl = detail::product_limit(std::move(times), std::move(statuses));

  // Reflect back. Atoms at -s with mass v[j-1]-v[j]; survival on the
  // original axis at the j-th smallest jump is 1 - v[k-j].
  StepDistribution dist;
  const std::size_t k = pl.jumps.size();
  dist.jump_points.resize(k);
  dist.survival_values.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    dist.jump_points[j] = -pl.jumps[k - 1 - j];
    const double v_before = (k - 1 - j == 0) ? 1.0 : pl.values[k - 2 - j];
    dist.survival_values[j] = 1.0 - v_before;
  }
  if (pl.trailing_mass > 0.0) {
    dist.boundary_atom_mass = pl.trailing_mass;
    dist.boundary_atom_location = AtomLocation::Zero;
  }
  return dist;
}

// One draw by the generalized inverse CDF, inf{t : F(t) >= u}. Boundary
// atoms come out as +infinity or exactly 0.
inline double sample_one(const StepDistribution& dist, double u) {
  if (dist.boundary_atom_location == AtomLocation::PositiveInfinity &&
      u > 1.0 - dist.boundary_atom_mass) {
    return std::numeric_limits<double>::infinity();
  }
  if (dist.boundary_atom_location == AtomLocation::Zero &&
      u <= dist.boundary_atom_mass) {
    return 0.0;
  }
  // First jump with F(t_j) = 1 - v_j >= u; survival values are non-increasing.
  auto it = std::partition_point(
      dist.survival_values.begin(), dist.survival_values.end(),
      [&](double v) { return v > 1.0 - u; });
  if (it == dist.survival_values.end()) {
    throw std::logic_error("sample_one: no quantile found (invalid distribution)");
  }
  return dist.jump_points[static_cast<std::size_t>(
      it - dist.survival_values.begin())];
}

inline std::vector<double> sample(const StepDistribution& dist, std::size_t n,
                                  std::mt19937_64& rng) {
  if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = sample_one(dist, uniform01(rng));
  return out;
}

}  // namespace survplaus
