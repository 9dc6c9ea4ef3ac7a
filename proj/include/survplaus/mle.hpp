#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>

#include "survplaus/common.hpp"
#include "survplaus/data.hpp"
#include "survplaus/model.hpp"
#include "survplaus/nelder_mead.hpp"

namespace survplaus {

struct MleResult {
  ParameterVector estimate;
  double loglik_at_estimate = 0.0;
  bool converged = false;
  int iterations = 0;
};

namespace detail {

// Constrained theta <-> unconstrained coordinates. Positive parameters are
// log-transformed; the log-normal location stays as-is.
inline std::array<double, 2> to_unconstrained(Family family,
                                              const ParameterVector& theta) {
  switch (family) {
    case Family::Exponential:
      return {std::log(theta.rate()), 0.0};
    case Family::Weibull:
      return {std::log(theta.shape()), std::log(theta.scale())};
    case Family::LogNormal:
      return {theta.meanlog(), std::log(theta.sdlog())};
  }
  throw std::logic_error("unreachable");
}

inline ParameterVector from_unconstrained(Family family,
                                          const std::array<double, 2>& phi) {
  switch (family) {
    case Family::Exponential:
      return ParameterVector(std::exp(phi[0]));
    case Family::Weibull:
      return ParameterVector(std::exp(phi[0]), std::exp(phi[1]));
    case Family::LogNormal:
      return ParameterVector(phi[0], std::exp(phi[1]));
  }
  throw std::logic_error("unreachable");
}

inline void require_estimable(const LogLikContext& ctx) {
  const std::size_t dim = ctx.model().parameter_dimension();
  if (ctx.event_count() < dim) {
    throw degenerate_data_error(
        std::string(to_string(ctx.model().family)) + " fit needs at least " +
        std::to_string(dim) + " exact observation(s), got " +
        std::to_string(ctx.event_count()));
  }
}

// Method-of-moments-style starting point; cheap and inside the domain.
inline ParameterVector default_start(const LogLikContext& ctx) {
  const double crude_rate =
      static_cast<double>(ctx.event_count()) / ctx.sum_times();
  switch (ctx.model().family) {
    case Family::Exponential:
      return ParameterVector(crude_rate);
    case Family::Weibull:
      return ParameterVector(1.0, crude_rate);
    case Family::LogNormal: {
      const double k = static_cast<double>(ctx.event_count());
      const double mean = ctx.sum_exact_logt() / k;
      double ss = 0.0;
      for (double lt : ctx.exact_logt()) ss += (lt - mean) * (lt - mean);
      const double sd = std::sqrt(ss / k);
      return ParameterVector(mean, std::max(sd, 0.05));
    }
  }
  throw std::logic_error("unreachable");
}

// Shared numeric path: simplex search over the unconstrained coordinates.
inline MleResult fit_numeric(const LogLikContext& ctx,
                             const ParameterVector& start) {
  const Family family = ctx.model().family;
  auto negloglik = [&](const std::array<double, 2>& phi) {
    return -ctx.evaluate(from_unconstrained(family, phi));
  };
  const SimplexResult sr =
      nelder_mead(negloglik, to_unconstrained(family, start),
                  ctx.model().parameter_dimension());
  MleResult result;
  result.estimate = from_unconstrained(family, sr.x);
  result.loglik_at_estimate = -sr.f;
  result.converged = sr.converged;
  result.iterations = sr.iterations;
  return result;
}

// Full fit given a prepared likelihood context and a start. The exponential
// right-censored estimate is the closed form (sum of event flags over the sum
// of all times); everything else goes through the simplex.
inline MleResult fit_mle_ctx(const LogLikContext& ctx,
                             const ParameterVector& start) {
  require_estimable(ctx);
  if (ctx.model().family == Family::Exponential &&
      ctx.side() == CensoringSide::Right) {
    MleResult result;
    result.estimate = ParameterVector(
        static_cast<double>(ctx.event_count()) / ctx.sum_times());
    result.loglik_at_estimate = ctx.evaluate(result.estimate);
    result.converged = true;
    result.iterations = 0;
    return result;
  }
  return fit_numeric(ctx, start);
}

inline MleResult fit_mle_ctx(const LogLikContext& ctx) {
  require_estimable(ctx);
  return fit_mle_ctx(ctx, default_start(ctx));
}

}  // namespace detail

// Maximum likelihood fit. Throws degenerate_data_error when the sample has
// fewer exact observations than free parameters; reports converged = false
// when the simplex search exhausts its iteration budget.
inline MleResult fit_mle(const ModelSpec& model, const SurvivalDataset& data) {
  LogLikContext ctx(model, data);
  return detail::fit_mle_ctx(ctx);
}

}  // namespace survplaus
