#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "survplaus/common.hpp"
#include "survplaus/data.hpp"
#include "survplaus/grid.hpp"
#include "survplaus/math.hpp"
#include "survplaus/mle.hpp"
#include "survplaus/model.hpp"
#include "survplaus/plausibility.hpp"
#include "survplaus/random.hpp"
#include "survplaus/step_distribution.hpp"

namespace survplaus {

enum class CensoringLawKind { UniformRight, UniformLeft, KnownNone };

struct CensoringLaw {
  CensoringLawKind kind = CensoringLawKind::UniformRight;
  double a = 0.0;
  double b = 1.0;

  CensoringSide side() const {
    return kind == CensoringLawKind::UniformLeft ? CensoringSide::Left
                                                 : CensoringSide::Right;
  }
};

// What "the region covers the truth" means for a run: membership of the
// true theta in the joint region, or of psi(true theta) in the consonant
// marginal region for a scalar functional.
enum class CoverageTarget { JointTheta, MarginalPsi };

struct ExperimentDesign {
  std::string name = "custom";
  ModelSpec model;
  ParameterVector true_theta;
  CensoringLaw censoring;
  std::size_t n = 15;
  std::size_t replications = 1000;
  double alpha = 0.05;
  MonteCarloConfig mc;
  CoverageTarget target = CoverageTarget::JointTheta;
  // MarginalPsi settings: functional, psi-axis resolution, joint-axis size.
  std::function<double(const ParameterVector&)> psi;
  std::size_t psi_bins = 101;
  std::size_t marginal_axis_points = 61;
  // Also evaluate the full default-grid region per replication to report its
  // mean size (interval length, or lattice-cell count for pairs). Far more
  // expensive than the membership check alone, so off by default.
  bool measure_region_size = false;
};

struct ReplicationRecord {
  std::size_t index = 0;
  bool dropped = false;           // degenerate data, no estimate possible
  double censored_fraction = 0.0;
  double p_at_truth = std::numeric_limits<double>::quiet_NaN();
  int covered = -1;       // -1 = n/a
  int wald_covered = -1;  // -1 = comparator unavailable
  double region_size = std::numeric_limits<double>::quiet_NaN();
  std::size_t rejected_replicates = 0;  // inside the Monte Carlo engine
};

struct SimulationReport {
  std::string kind;  // "validity" or "coverage"
  ExperimentDesign design;
  std::size_t replications_used = 0;
  std::size_t dropped = 0;
  double coverage = std::numeric_limits<double>::quiet_NaN();
  double wald_coverage = std::numeric_limits<double>::quiet_NaN();
  double mean_censoring_fraction = 0.0;
  double mean_region_size = std::numeric_limits<double>::quiet_NaN();
  double ks_distance = std::numeric_limits<double>::quiet_NaN();
  double pvalue_uniformity = std::numeric_limits<double>::quiet_NaN();
  std::vector<ReplicationRecord> records;
};

namespace detail {
inline constexpr std::uint64_t kDataStreamTag = 0xda7a5eedull;
inline constexpr std::uint64_t kEngineSeedTag = 0xca11b4a7ull;
}  // namespace detail

// One synthetic dataset: event values from F_theta, bounds from the
// censoring law, observed pair (min, 1{X<=C}) under right censoring and the
// mirror (max, 1{X>=C}) under left censoring.
inline SurvivalDataset generate_censored_sample(const ExperimentDesign& design,
                                                std::mt19937_64& rng) {
  require_valid_theta(design.model, design.true_theta);
  std::vector<CensoredObservation> obs(design.n);
  const bool left = design.censoring.side() == CensoringSide::Left;
  for (std::size_t i = 0; i < design.n; ++i) {
    const double x = quantile(design.model, design.true_theta, uniform01(rng));
    double c;
    switch (design.censoring.kind) {
      case CensoringLawKind::KnownNone:
        c = std::numeric_limits<double>::infinity();
        break;
      default:
        c = design.censoring.a +
            (design.censoring.b - design.censoring.a) * uniform01(rng);
    }
    if (left) {
      obs[i].time = std::max(x, c);
      obs[i].status = x >= c ? 1 : 0;
    } else {
      obs[i].time = std::min(x, c);
      obs[i].status = x <= c ? 1 : 0;
    }
  }
  return SurvivalDataset(std::move(obs), left ? CensoringSide::Left
                                              : CensoringSide::Right);
}

// ---------------------------------------------------------------------------
// Wald / MLE comparator
// ---------------------------------------------------------------------------

struct WaldSummary {
  bool available = false;
  MleResult mle;
  std::size_t dim = 1;
  double alpha = 0.05;
  std::array<double, 4> information{};  // row-major observed information
  double z = 0.0;               // normal quantile, 1-d
  double chi2_threshold = 0.0;  // chi-square quantile, 2-d ellipsoid
  double lower = std::numeric_limits<double>::quiet_NaN();
  double upper = std::numeric_limits<double>::quiet_NaN();

  bool covers(const ParameterVector& theta) const {
    if (!available) return false;
    if (dim == 1) return theta[0] >= lower && theta[0] <= upper;
    const double d0 = theta[0] - mle.estimate[0];
    const double d1 = theta[1] - mle.estimate[1];
    const double q = d0 * d0 * information[0] + 2.0 * d0 * d1 * information[1] +
                     d1 * d1 * information[3];
    return q <= chi2_threshold;
  }
};

namespace detail {

inline std::array<double, 2> hessian_steps(const ModelSpec& model,
                                           const ParameterVector& at) {
  // Step 1e-5 in the unconstrained scale: relative for positive parameters,
  // absolute for the free log-normal location.
  std::array<double, 2> h{1e-5, 1e-5};
  switch (model.family) {
    case Family::Exponential:
      h[0] = 1e-5 * std::fabs(at[0]);
      break;
    case Family::Weibull:
      h[0] = 1e-5 * std::fabs(at[0]);
      h[1] = 1e-5 * std::fabs(at[1]);
      break;
    case Family::LogNormal:
      h[0] = 1e-5;
      h[1] = 1e-5 * std::fabs(at[1]);
      break;
  }
  return h;
}

// Observed information -d2/dtheta2 log-likelihood by central differences.
inline std::array<double, 4> observed_information(const LogLikContext& ctx,
                                                  const ParameterVector& at) {
  const ModelSpec& model = ctx.model();
  const std::size_t dim = model.parameter_dimension();
  const auto h = hessian_steps(model, at);
  auto f = [&](double d0, double d1) {
    ParameterVector p = at;
    p[0] += d0;
    if (dim > 1) p[1] += d1;
    return ctx.evaluate(p);
  };
  std::array<double, 4> info{};
  const double f0 = f(0.0, 0.0);
  info[0] = -(f(h[0], 0.0) - 2.0 * f0 + f(-h[0], 0.0)) / (h[0] * h[0]);
  if (dim > 1) {
    info[3] = -(f(0.0, h[1]) - 2.0 * f0 + f(0.0, -h[1])) / (h[1] * h[1]);
    info[1] = -(f(h[0], h[1]) - f(h[0], -h[1]) - f(-h[0], h[1]) +
                f(-h[0], -h[1])) /
              (4.0 * h[0] * h[1]);
    info[2] = info[1];
  }
  return info;
}

inline bool positive_definite(const std::array<double, 4>& m, std::size_t dim) {
  if (dim == 1) return m[0] > 0.0;
  return m[0] > 0.0 && (m[0] * m[3] - m[1] * m[2]) > 0.0;
}

}  // namespace detail

// Normal-theory comparator: estimate +/- z * I(estimate)^{-1/2} for scalar
// parameters, the chi-square ellipsoid of asymptotic normality for pairs.
// Information that is not positive definite marks the comparator unavailable.
inline WaldSummary wald_interval(const ModelSpec& model,
                                 const SurvivalDataset& data, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("wald_interval: alpha must lie in (0,1)");
  }
  const LogLikContext ctx(model, data);
  WaldSummary wald;
  wald.alpha = alpha;
  wald.dim = model.parameter_dimension();
  wald.mle = detail::fit_mle_ctx(ctx);
  if (!wald.mle.converged) return wald;
  wald.information = detail::observed_information(ctx, wald.mle.estimate);
  if (!detail::positive_definite(wald.information, wald.dim)) return wald;
  wald.available = true;
  wald.z = normal_quantile(1.0 - alpha / 2.0);
  if (wald.dim == 1) {
    const double se = 1.0 / std::sqrt(wald.information[0]);
    wald.lower = wald.mle.estimate[0] - wald.z * se;
    wald.upper = wald.mle.estimate[0] + wald.z * se;
  } else {
    wald.chi2_threshold = -2.0 * std::log(alpha);  // chi-square df 2
  }
  return wald;
}

// Delta-method interval for a scalar functional psi(theta).
struct PsiInterval {
  bool available = false;
  double estimate = std::numeric_limits<double>::quiet_NaN();
  double lower = std::numeric_limits<double>::quiet_NaN();
  double upper = std::numeric_limits<double>::quiet_NaN();
};

inline PsiInterval wald_psi_interval(
    const ModelSpec& model, const SurvivalDataset& data, double alpha,
    const std::function<double(const ParameterVector&)>& psi) {
  const WaldSummary wald = wald_interval(model, data, alpha);
  PsiInterval out;
  if (!wald.available) return out;
  const ParameterVector& at = wald.mle.estimate;
  out.estimate = psi(at);
  const auto h = detail::hessian_steps(model, at);
  std::array<double, 2> grad{0.0, 0.0};
  for (std::size_t k = 0; k < wald.dim; ++k) {
    ParameterVector hi = at, lo = at;
    hi[k] += h[k];
    lo[k] -= h[k];
    grad[k] = (psi(hi) - psi(lo)) / (2.0 * h[k]);
  }
  double var;
  if (wald.dim == 1) {
    var = grad[0] * grad[0] / wald.information[0];
  } else {
    const double det = wald.information[0] * wald.information[3] -
                       wald.information[1] * wald.information[2];
    // inverse of the 2x2 information
    const double i00 = wald.information[3] / det;
    const double i01 = -wald.information[1] / det;
    const double i11 = wald.information[0] / det;
    var = grad[0] * grad[0] * i00 + 2.0 * grad[0] * grad[1] * i01 +
          grad[1] * grad[1] * i11;
  }
  if (!(var > 0.0) || !std::isfinite(var)) return out;
  const double z = normal_quantile(1.0 - alpha / 2.0);
  out.available = true;
  out.lower = out.estimate - z * std::sqrt(var);
  out.upper = out.estimate + z * std::sqrt(var);
  return out;
}

// ---------------------------------------------------------------------------
// Validity and coverage studies
// ---------------------------------------------------------------------------

namespace detail {

template <typename Fn>
EmpiricalRLDistribution simulate_under_law(const ExperimentDesign& design,
                                           const MonteCarloConfig& cfg,
                                           bool use_plugin,
                                           const SurvivalDataset& data,
                                           Fn&& plugin_dist) {
  const CensoringSide side = design.censoring.side();
  if (use_plugin) {
    return simulate_rl_distribution(design.model, design.true_theta,
                                    plugin_dist(), side, design.n, cfg);
  }
  switch (design.censoring.kind) {
    case CensoringLawKind::KnownNone:
      return simulate_rl_distribution(design.model, design.true_theta,
                                      NoCensoringSampler{side}, side, design.n,
                                      cfg);
    default:
      return simulate_rl_distribution(
          design.model, design.true_theta,
          UniformCensoringSampler{design.censoring.a, design.censoring.b},
          side, design.n, cfg);
  }
}

}  // namespace detail

// Distribution of the plausibility at the true parameter: one p_Y(theta)
// per replication, evaluated with the plug-in Kaplan-Meier estimate of the
// censoring law (use_plugin) or with the law itself. Under the exact-law
// variant the p values are uniform up to Monte Carlo resolution; the report
// carries their KS distance from Unif(0,1).
inline SimulationReport run_validity(const ExperimentDesign& design,
                                     bool use_plugin) {
  if (design.replications < 1 || design.n < 2) {
    throw std::invalid_argument("run_validity: invalid design");
  }
  SimulationReport report;
  report.kind = "validity";
  report.design = design;
  report.records.assign(design.replications, {});

  detail::parallel_for(
      design.replications, design.mc.parallel_workers, [&](std::size_t r) {
        ReplicationRecord& rec = report.records[r];
        rec.index = r;
        auto data_rng =
            make_stream(design.mc.seed, detail::kDataStreamTag, r);
        const SurvivalDataset data = generate_censored_sample(design, data_rng);
        rec.censored_fraction =
            static_cast<double>(data.censored_count()) /
            static_cast<double>(data.size());
        MonteCarloConfig cfg = design.mc;
        cfg.seed = derive_seed(design.mc.seed, detail::kEngineSeedTag, r);
        cfg.parallel_workers = 1;
        try {
          const LogLikContext ctx(design.model, data);
          const MleResult mle = detail::fit_mle_ctx(ctx);
          const double r_obs = detail::clamp_unit(std::exp(
              ctx.evaluate(design.true_theta) - mle.loglik_at_estimate));
          const auto dist = detail::simulate_under_law(
              design, cfg, use_plugin, data,
              [&] { return reversed_kaplan_meier(data); });
          rec.p_at_truth = evaluate_cdf(dist, r_obs);
          rec.rejected_replicates = dist.rejected_replicates;
        } catch (const degenerate_data_error&) {
          rec.dropped = true;
        }
      });

  std::vector<double> pvals;
  double censoring_sum = 0.0;
  for (const auto& rec : report.records) {
    censoring_sum += rec.censored_fraction;
    if (rec.dropped) {
      ++report.dropped;
    } else {
      pvals.push_back(rec.p_at_truth);
    }
  }
  report.replications_used = pvals.size();
  report.mean_censoring_fraction =
      censoring_sum / static_cast<double>(design.replications);
  if (!pvals.empty()) {
    report.ks_distance = ks_distance_uniform(pvals);
    report.pvalue_uniformity = ks_pvalue(report.ks_distance, pvals.size());
  }
  return report;
}

// Membership of psi(true theta) in the marginal region, decided by scanning
// only the grid points whose psi value lands in the same bin: the binned
// consonant maximum exceeds alpha iff one of them does.
inline bool marginal_covers(const ExperimentDesign& design,
                            const SurvivalDataset& data,
                            const MonteCarloConfig& cfg) {
  const MleResult mle = fit_mle(design.model, data);
  ParameterGrid grid;
  grid.axes.push_back(detail::axis_around(mle.estimate[0], 0.3, 3.0,
                                          design.marginal_axis_points));
  grid.axes.push_back(detail::axis_around(mle.estimate[1], 0.3, 3.0,
                                          design.marginal_axis_points));
  grid.rebuild_points();

  const double psi_hat = design.psi(mle.estimate);
  const std::vector<double> psi_axis =
      detail::axis_around(psi_hat, 0.2, 3.0, design.psi_bins);
  std::vector<double> edges(psi_axis.size() + 1);
  edges[0] = psi_axis[0] - 0.5 * (psi_axis[1] - psi_axis[0]);
  for (std::size_t i = 1; i < psi_axis.size(); ++i) {
    edges[i] = 0.5 * (psi_axis[i - 1] + psi_axis[i]);
  }
  edges[psi_axis.size()] =
      psi_axis.back() +
      0.5 * (psi_axis.back() - psi_axis[psi_axis.size() - 2]);

  const double psi0 = design.psi(design.true_theta);
  if (!(psi0 >= edges.front() && psi0 < edges.back())) return false;
  const std::size_t bin = static_cast<std::size_t>(
      std::upper_bound(edges.begin(), edges.end(), psi0) - edges.begin() - 1);

  const StepDistribution ghat = reversed_kaplan_meier(data);
  const LogLikContext ctx(design.model, data);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = design.psi(grid.points[i]);
    if (!(v >= edges[bin] && v < edges[bin + 1])) continue;
    const double r_obs = detail::clamp_unit(
        std::exp(ctx.evaluate(grid.points[i]) - mle.loglik_at_estimate));
    try {
      const auto dist =
          simulate_rl_distribution(design.model, grid.points[i], ghat,
                                   data.censoring_side(), design.n, cfg, i);
      if (evaluate_cdf(dist, r_obs) > design.alpha) return true;
    } catch (const degenerate_configuration_error&) {
      continue;  // not evaluable at this grid point
    }
  }
  return false;
}

// Descriptive region-size runs center the full grid on the replicate's own
// fit, which is how the tool is used on real data.
inline ParameterVector full_grid_center(const ExperimentDesign& design,
                                        const SurvivalDataset& data) {
  return fit_mle(design.model, data).estimate;
}

// Empirical coverage of the level-alpha plausibility region. Joint target:
// the region (evaluated through the engine on the lattice cell holding the
// true theta) contains the truth iff p at that cell exceeds alpha. Marginal
// target: psi(true theta) falls in the consonant marginal region iff some
// grid point of the level set's psi-bin has p above alpha. A Wald comparator
// is recorded alongside.
inline SimulationReport run_coverage(const ExperimentDesign& design) {
  if (design.replications < 1 || design.n < 2) {
    throw std::invalid_argument("run_coverage: invalid design");
  }
  if (design.target == CoverageTarget::MarginalPsi && !design.psi) {
    throw std::invalid_argument("run_coverage: marginal target needs a psi");
  }
  SimulationReport report;
  report.kind = "coverage";
  report.design = design;
  report.records.assign(design.replications, {});

  detail::parallel_for(
      design.replications, design.mc.parallel_workers, [&](std::size_t r) {
        ReplicationRecord& rec = report.records[r];
        rec.index = r;
        auto data_rng =
            make_stream(design.mc.seed, detail::kDataStreamTag, r);
        const SurvivalDataset data = generate_censored_sample(design, data_rng);
        rec.censored_fraction =
            static_cast<double>(data.censored_count()) /
            static_cast<double>(data.size());
        MonteCarloConfig cfg = design.mc;
        cfg.seed = derive_seed(design.mc.seed, detail::kEngineSeedTag, r);
        cfg.parallel_workers = 1;
        try {
          if (design.target == CoverageTarget::JointTheta) {
            const PlausibilityCurve curve = plausibility_contour(
                design.model, data, single_point_grid(design.true_theta), cfg);
            const PlausibilityRegion region =
                plausibility_region(curve, design.alpha);
            rec.p_at_truth = curve.values[0];
            rec.covered = region.members.empty() ? 0 : 1;
            if (design.measure_region_size) {
              const PlausibilityCurve full = plausibility_contour(
                  design.model, data,
                  default_grid(design.model, full_grid_center(design, data)),
                  cfg);
              const PlausibilityRegion full_region =
                  plausibility_region(full, design.alpha);
              rec.region_size =
                  full.grid.dimension() == 1 && full_region.has_interval
                      ? full_region.upper - full_region.lower
                      : static_cast<double>(full_region.members.size());
            }
          } else {
            rec.covered = marginal_covers(design, data, cfg) ? 1 : 0;
          }
          const WaldSummary wald =
              wald_interval(design.model, data, design.alpha);
          if (design.target == CoverageTarget::JointTheta) {
            if (wald.available) {
              rec.wald_covered = wald.covers(design.true_theta) ? 1 : 0;
            }
          } else {
            const PsiInterval psi_ci = wald_psi_interval(
                design.model, data, design.alpha, design.psi);
            if (psi_ci.available) {
              const double psi0 = design.psi(design.true_theta);
              rec.wald_covered =
                  (psi0 >= psi_ci.lower && psi0 <= psi_ci.upper) ? 1 : 0;
            }
          }
        } catch (const degenerate_data_error&) {
          rec.dropped = true;
        }
      });

  std::size_t used = 0, covered = 0, wald_used = 0, wald_covered = 0;
  std::size_t sized = 0;
  double censoring_sum = 0.0, size_sum = 0.0;
  for (const auto& rec : report.records) {
    censoring_sum += rec.censored_fraction;
    if (rec.dropped) {
      ++report.dropped;
      continue;
    }
    ++used;
    covered += rec.covered == 1;
    if (rec.wald_covered >= 0) {
      ++wald_used;
      wald_covered += rec.wald_covered == 1;
    }
    if (!std::isnan(rec.region_size)) {
      ++sized;
      size_sum += rec.region_size;
    }
  }
  if (sized > 0) {
    report.mean_region_size = size_sum / static_cast<double>(sized);
  }
  report.replications_used = used;
  report.mean_censoring_fraction =
      censoring_sum / static_cast<double>(design.replications);
  if (used > 0) {
    report.coverage = static_cast<double>(covered) / static_cast<double>(used);
  }
  if (wald_used > 0) {
    report.wald_coverage =
        static_cast<double>(wald_covered) / static_cast<double>(wald_used);
  }
  return report;
}

// The log-normal mean, the functional marginalized in the left-censored
// environmental example.
inline double lognormal_mean(const ParameterVector& theta) {
  return std::exp(theta.meanlog() + 0.5 * theta.sdlog() * theta.sdlog());
}

// Built-in experiment designs mirroring the simulation settings the library
// is validated against.
inline ExperimentDesign preset_design(const std::string& name) {
  ExperimentDesign d;
  d.name = name;
  auto exp_design = [&](double theta, std::size_t n) {
    d.model.family = Family::Exponential;
    d.true_theta = ParameterVector(theta);
    d.censoring = {CensoringLawKind::UniformRight, 0.0, 5.0};
    d.n = n;
    d.replications = 1000;
    d.mc.replicates = 300;
  };
  if (name == "exp-validity-n15") {
    exp_design(1.0, 15);
    return d;
  }
  for (std::size_t n : {15, 50}) {
    for (double theta : {0.5, 1.0, 2.0}) {
      std::string token = "exp-coverage-n" + std::to_string(n) + "-theta";
      // match "0.5", "1", "2"
      std::string tail =
          theta == 0.5 ? "0.5" : std::to_string(static_cast<int>(theta));
      if (name == token + tail) {
        exp_design(theta, n);
        return d;
      }
    }
  }
  if (name == "weibull-coverage-n25") {
    d.model.family = Family::Weibull;
    d.true_theta = ParameterVector(1.0, 1.0);
    d.censoring = {CensoringLawKind::UniformRight, 0.0, 4.0};
    d.n = 25;
    d.replications = 500;
    d.mc.replicates = 300;
    return d;
  }
  if (name == "lognormal-marginal-n20") {
    d.model.family = Family::LogNormal;
    d.true_theta = ParameterVector(0.0, 1.0);
    d.censoring = {CensoringLawKind::UniformLeft, 0.0, 1.0};
    d.n = 20;
    d.replications = 200;
    d.mc.replicates = 200;
    d.target = CoverageTarget::MarginalPsi;
    d.psi = lognormal_mean;
    d.marginal_axis_points = 41;
    return d;
  }
  throw std::invalid_argument("unknown design preset: " + name);
}

inline std::vector<std::string> preset_design_names() {
  return {"exp-validity-n15",
          "exp-coverage-n15-theta0.5",
          "exp-coverage-n15-theta1",
          "exp-coverage-n15-theta2",
          "exp-coverage-n50-theta0.5",
          "exp-coverage-n50-theta1",
          "exp-coverage-n50-theta2",
          "weibull-coverage-n25",
          "lognormal-marginal-n20"};
}

}  // namespace survplaus
