#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <thread>
#include <vector>

#include "survplaus/common.hpp"
#include "survplaus/data.hpp"
#include "survplaus/grid.hpp"
#include "survplaus/mle.hpp"
#include "survplaus/model.hpp"
#include "survplaus/random.hpp"
#include "survplaus/step_distribution.hpp"

namespace survplaus {

struct MonteCarloConfig {
  std::size_t replicates = 500;   // M, Monte Carlo copies per grid point
  std::uint64_t seed = 20240901;  // master seed
  std::size_t parallel_workers = 0;  // 0 = hardware concurrency
};

// M sorted simulated relative-likelihood values at one theta; the Monte
// Carlo estimate of the sampling distribution of R under (theta, Ghat).
struct EmpiricalRLDistribution {
  ParameterVector theta;
  std::vector<double> draws;  // ascending, each in [0,1]
  std::size_t replicates = 0;
  std::uint64_t master_seed = 0;
  std::uint64_t stream = 0;
  std::size_t rejected_replicates = 0;     // degenerate samples redrawn
  std::size_t nonconverged_replicates = 0; // accepted at the best point found
  double mean_censored_fraction = 0.0;     // over the accepted replicates
};

inline std::vector<std::string> parameter_names(Family family) {
  switch (family) {
    case Family::Exponential: return {"rate"};
    case Family::Weibull: return {"shape", "scale"};
    case Family::LogNormal: return {"meanlog", "sdlog"};
  }
  return {};
}

struct PlausibilityCurve {
  ModelSpec model;
  CensoringSide side = CensoringSide::Right;
  ParameterGrid grid;
  std::vector<double> values;  // aligned with grid.points; NaN = not evaluated
  MleResult mle;
  MonteCarloConfig config;
  std::vector<std::string> axis_labels;  // parameter names, or the functional
};

struct PlausibilityRegion {
  double alpha = 0.05;
  std::vector<std::size_t> members;  // indices into the curve's grid
  // Interval hull [lower, upper] of the members, for one-parameter families.
  bool has_interval = false;
  double lower = 0.0;
  double upper = 0.0;
};

namespace detail {

inline double clamp_unit(double r) { return std::clamp(r, 0.0, 1.0); }

// Run fn(i) for i in [0, n) across a worker pool. Work items must be
// independent; results keyed by index, so the worker count never affects
// the output.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n || failed.load()) return;
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace detail

// R_y(theta) = L_y(theta) / L_y(theta_hat), clamped to [0,1] against
// floating-point excess at the maximizer.
inline double relative_likelihood(const ModelSpec& model,
                                  const SurvivalDataset& data,
                                  const ParameterVector& theta,
                                  const MleResult& mle) {
  require_valid_theta(model, theta);
  const double ll = LogLikContext(model, data).evaluate(theta);
  return detail::clamp_unit(std::exp(ll - mle.loglik_at_estimate));
}

// Fraction of simulated draws <= r (weak inequality).
inline double evaluate_cdf(const EmpiricalRLDistribution& dist, double r) {
  if (dist.draws.empty()) return 0.0;
  const auto count =
      std::upper_bound(dist.draws.begin(), dist.draws.end(), r) -
      dist.draws.begin();
  return static_cast<double>(count) / static_cast<double>(dist.draws.size());
}

// Draws one censoring time from a fixed step distribution (the plug-in Ghat).
struct StepDistributionSampler {
  const StepDistribution* dist;
  double operator()(std::mt19937_64& rng) const {
    return sample_one(*dist, uniform01(rng));
  }
};

// A known censoring law for the harness: Unif(a,b).
struct UniformCensoringSampler {
  double a = 0.0;
  double b = 1.0;
  double operator()(std::mt19937_64& rng) const {
    return a + (b - a) * uniform01(rng);
  }
};

// No censoring: the bound never binds on either side.
struct NoCensoringSampler {
  CensoringSide side = CensoringSide::Right;
  double operator()(std::mt19937_64&) const {
    return side == CensoringSide::Right
               ? std::numeric_limits<double>::infinity()
               : 0.0;
  }
};

// Monte Carlo sample of R_{Y*}(theta): each replicate draws a sample of size
// n from (F_theta, censoring law), refits the MLE, and records the relative
// likelihood of theta under the simulated data. Degenerate replicates (too
// few events to fit) are redrawn; `replicates` consecutive rejections abort.
// Streams are keyed by (seed, stream, replicate index) only.
template <typename CensoringSampler>
EmpiricalRLDistribution simulate_rl_distribution(
    const ModelSpec& model, const ParameterVector& theta,
    const CensoringSampler& censoring, CensoringSide side, std::size_t n,
    const MonteCarloConfig& config, std::uint64_t stream = 0) {
  require_valid_theta(model, theta);
  if (n < 1) throw std::invalid_argument("simulate_rl_distribution: n must be >= 1");
  if (config.replicates < 1) {
    throw std::invalid_argument("simulate_rl_distribution: M must be >= 1");
  }
  const std::size_t dim = model.parameter_dimension();
  const bool right = side == CensoringSide::Right;

  EmpiricalRLDistribution out;
  out.theta = theta;
  out.replicates = config.replicates;
  out.master_seed = config.seed;
  out.stream = stream;
  out.draws.reserve(config.replicates);

  std::vector<CensoredObservation> obs(n);
  double censored_sum = 0.0;
  for (std::size_t m = 0; m < config.replicates; ++m) {
    auto rng = make_stream(config.seed, stream, m);
    std::size_t consecutive_rejections = 0;
    for (;;) {
      std::size_t events = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const double x = quantile(model, theta, uniform01(rng));
        const double c = censoring(rng);
        const bool event = right ? (x <= c) : (x >= c);
        obs[i].time = right ? std::min(x, c) : std::max(x, c);
        obs[i].status = event ? 1 : 0;
        events += static_cast<std::size_t>(event);
      }
      if (events < dim) {
        ++out.rejected_replicates;
        if (++consecutive_rejections >= config.replicates) {
          throw degenerate_configuration_error(
              "simulate_rl_distribution: " +
              std::to_string(consecutive_rejections) +
              " consecutive degenerate replicates");
        }
        continue;
      }
      const SurvivalDataset sample_data(obs, side);
      const LogLikContext ctx(model, sample_data);
      // theta is a known good start: the replicate was generated from it.
      const MleResult fit = detail::fit_mle_ctx(ctx, theta);
      if (!fit.converged) ++out.nonconverged_replicates;
      out.draws.push_back(detail::clamp_unit(
          std::exp(ctx.evaluate(theta) - fit.loglik_at_estimate)));
      censored_sum += static_cast<double>(n - events) / static_cast<double>(n);
      break;
    }
  }
  out.mean_censored_fraction =
      censored_sum / static_cast<double>(config.replicates);
  std::sort(out.draws.begin(), out.draws.end());
  return out;
}

inline EmpiricalRLDistribution simulate_rl_distribution(
    const ModelSpec& model, const ParameterVector& theta,
    const StepDistribution& ghat, CensoringSide side, std::size_t n,
    const MonteCarloConfig& config, std::uint64_t stream = 0) {
  return simulate_rl_distribution(model, theta,
                                  StepDistributionSampler{&ghat}, side, n,
                                  config, stream);
}

// The plausibility contour p_y(theta) on a grid: fit once, estimate the
// censoring distribution once by role-reversed Kaplan-Meier, then for each
// grid point evaluate the Monte Carlo CDF of R at the observed relative
// likelihood. Grid points are independent work units; identical seeds give
// identical curves for any worker count.
inline PlausibilityCurve plausibility_contour(const ModelSpec& model,
                                              const SurvivalDataset& data,
                                              const ParameterGrid& grid,
                                              const MonteCarloConfig& config) {
  if (grid.size() == 0) {
    throw std::invalid_argument("plausibility_contour: empty grid");
  }
  PlausibilityCurve curve;
  curve.model = model;
  curve.side = data.censoring_side();
  curve.grid = grid;
  curve.config = config;
  curve.mle = fit_mle(model, data);
  curve.values.assign(grid.size(), 0.0);
  curve.axis_labels = parameter_names(model.family);

  const StepDistribution ghat = reversed_kaplan_meier(data);
  const LogLikContext ctx(model, data);
  const double loglik_hat = curve.mle.loglik_at_estimate;
  const std::size_t n = data.size();
  const CensoringSide side = data.censoring_side();

  detail::parallel_for(grid.size(), config.parallel_workers, [&](std::size_t i) {
    const ParameterVector& theta = grid.points[i];
    const double r =
        detail::clamp_unit(std::exp(ctx.evaluate(theta) - loglik_hat));
    try {
      const auto dist = simulate_rl_distribution(model, theta, ghat, side, n,
                                                 config, /*stream=*/i);
      curve.values[i] = evaluate_cdf(dist, r);
    } catch (const degenerate_configuration_error&) {
      // Data drawn from (theta, Ghat) is almost never estimable, e.g. a far
      // grid corner whose lifetimes outlive every censoring bound. Recorded
      // as missing; such points never join a region.
      curve.values[i] = std::numeric_limits<double>::quiet_NaN();
    }
  });
  return curve;
}

// Superlevel set {theta on grid : p_y(theta) > alpha}. An empty region is a
// valid result, not an error.
inline PlausibilityRegion plausibility_region(const PlausibilityCurve& curve,
                                              double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("plausibility_region: alpha must lie in (0,1)");
  }
  PlausibilityRegion region;
  region.alpha = alpha;
  for (std::size_t i = 0; i < curve.values.size(); ++i) {
    if (curve.values[i] > alpha) region.members.push_back(i);  // NaN excluded
  }
  if (curve.grid.dimension() == 1 && !region.members.empty()) {
    region.has_interval = true;
    region.lower = curve.grid.points[region.members.front()][0];
    region.upper = region.lower;
    for (std::size_t i : region.members) {
      region.lower = std::min(region.lower, curve.grid.points[i][0]);
      region.upper = std::max(region.upper, curve.grid.points[i][0]);
    }
  }
  return region;
}

// Consonant marginal for a scalar functional of theta: each psi-grid bin
// takes the maximum contour value over the grid points whose psi lands in
// the bin. Bins are the midpoint cells of psi_grid; bins that catch no grid
// point stay NaN (missing, not zero).
inline PlausibilityCurve marginal_plausibility(
    const PlausibilityCurve& curve,
    const std::function<double(const ParameterVector&)>& psi,
    const std::vector<double>& psi_grid) {
  if (psi_grid.size() < 2) {
    throw std::invalid_argument("marginal_plausibility: psi grid too small");
  }
  for (std::size_t i = 1; i < psi_grid.size(); ++i) {
    if (!(psi_grid[i] > psi_grid[i - 1])) {
      throw std::invalid_argument("marginal_plausibility: psi grid not increasing");
    }
  }
  const std::size_t k = psi_grid.size();
  std::vector<double> edges(k + 1);
  edges[0] = psi_grid[0] - 0.5 * (psi_grid[1] - psi_grid[0]);
  for (std::size_t i = 1; i < k; ++i) {
    edges[i] = 0.5 * (psi_grid[i - 1] + psi_grid[i]);
  }
  edges[k] = psi_grid[k - 1] + 0.5 * (psi_grid[k - 1] - psi_grid[k - 2]);

  PlausibilityCurve marginal;
  marginal.model = curve.model;
  marginal.side = curve.side;
  marginal.mle = curve.mle;
  marginal.config = curve.config;
  marginal.axis_labels = {"psi"};
  marginal.grid.axes.push_back(psi_grid);
  marginal.grid.rebuild_points();
  marginal.values.assign(k, std::numeric_limits<double>::quiet_NaN());

  for (std::size_t i = 0; i < curve.grid.size(); ++i) {
    const double v = psi(curve.grid.points[i]);
    if (!(v >= edges.front() && v < edges.back())) continue;
    const std::size_t bin = static_cast<std::size_t>(
        std::upper_bound(edges.begin(), edges.end(), v) - edges.begin() - 1);
    const double p = curve.values[i];
    if (std::isnan(p)) continue;
    if (std::isnan(marginal.values[bin]) || p > marginal.values[bin]) {
      marginal.values[bin] = p;
    }
  }
  return marginal;
}

}  // namespace survplaus
