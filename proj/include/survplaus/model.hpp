#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "survplaus/data.hpp"
#include "survplaus/math.hpp"
#include "survplaus/random.hpp"

namespace survplaus {

enum class Family { Exponential, Weibull, LogNormal };

inline const char* to_string(Family family) {
  switch (family) {
    case Family::Exponential: return "exponential";
    case Family::Weibull: return "weibull";
    case Family::LogNormal: return "lognormal";
  }
  return "unknown";
}

inline Family family_from_string(const std::string& name) {
  if (name == "exponential" || name == "exp") return Family::Exponential;
  if (name == "weibull") return Family::Weibull;
  if (name == "lognormal" || name == "log-normal") return Family::LogNormal;
  throw std::invalid_argument("unknown model family: " + name);
}

struct ModelSpec {
  Family family = Family::Exponential;

  std::size_t parameter_dimension() const {
    return family == Family::Exponential ? 1 : 2;
  }
};

// A point in the parameter space of one family. Exponential: (rate);
// Weibull: (shape, scale) entering the survival function as
// exp(-scale * t^shape), so the scale acts as a rate; LogNormal:
// (meanlog, sdlog).
class ParameterVector {
 public:
  ParameterVector() = default;
  ParameterVector(double v0) : dim_(1) { v_[0] = v0; }
  ParameterVector(double v0, double v1) : dim_(2) {
    v_[0] = v0;
    v_[1] = v1;
  }
  explicit ParameterVector(const std::vector<double>& values)
      : dim_(values.size()) {
    if (dim_ < 1 || dim_ > 2) {
      throw std::invalid_argument("ParameterVector: dimension must be 1 or 2");
    }
    for (std::size_t i = 0; i < dim_; ++i) v_[i] = values[i];
  }

  std::size_t dimension() const { return dim_; }
  double operator[](std::size_t i) const { return v_[i]; }
  double& operator[](std::size_t i) { return v_[i]; }

  double rate() const { return v_[0]; }
  double shape() const { return v_[0]; }
  double scale() const { return v_[1]; }
  double meanlog() const { return v_[0]; }
  double sdlog() const { return v_[1]; }

  std::vector<double> values() const {
    return std::vector<double>(v_.begin(), v_.begin() + dim_);
  }

  bool operator==(const ParameterVector& other) const {
    if (dim_ != other.dim_) return false;
    for (std::size_t i = 0; i < dim_; ++i) {
      if (v_[i] != other.v_[i]) return false;
    }
    return true;
  }

 private:
  std::array<double, 2> v_{{0.0, 0.0}};
  std::size_t dim_ = 0;
};

inline bool theta_is_valid(const ModelSpec& model, const ParameterVector& theta) {
  if (theta.dimension() != model.parameter_dimension()) return false;
  for (std::size_t i = 0; i < theta.dimension(); ++i) {
    if (!std::isfinite(theta[i])) return false;
  }
  switch (model.family) {
    case Family::Exponential: return theta.rate() > 0.0;
    case Family::Weibull: return theta.shape() > 0.0 && theta.scale() > 0.0;
    case Family::LogNormal: return theta.sdlog() > 0.0;
  }
  return false;
}

inline void require_valid_theta(const ModelSpec& model,
                                const ParameterVector& theta) {
  if (!theta_is_valid(model, theta)) {
    throw std::domain_error(std::string("invalid parameter for ") +
                            to_string(model.family) + " model");
  }
}

inline void require_positive_time(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw std::domain_error("time must be a positive finite real");
  }
}

// log f_theta(t)
inline double log_density(const ModelSpec& model, const ParameterVector& theta,
                          double t) {
  require_valid_theta(model, theta);
  require_positive_time(t);
  switch (model.family) {
    case Family::Exponential:
      return std::log(theta.rate()) - theta.rate() * t;
    case Family::Weibull: {
      const double lt = std::log(t);
      return std::log(theta.scale()) + std::log(theta.shape()) +
             (theta.shape() - 1.0) * lt - theta.scale() * std::exp(theta.shape() * lt);
    }
    case Family::LogNormal: {
      const double z = (std::log(t) - theta.meanlog()) / theta.sdlog();
      return -std::log(t) - std::log(theta.sdlog()) - kHalfLog2Pi - 0.5 * z * z;
    }
  }
  throw std::logic_error("unreachable");
}

// log of the survival function, log(1 - F_theta(t)). Formulated so extreme
// parameter values probed by contour evaluation do not lose precision.
inline double log_survival(const ModelSpec& model, const ParameterVector& theta,
                           double t) {
  require_valid_theta(model, theta);
  require_positive_time(t);
  switch (model.family) {
    case Family::Exponential:
      return -theta.rate() * t;
    case Family::Weibull:
      return -theta.scale() * std::exp(theta.shape() * std::log(t));
    case Family::LogNormal:
      return normal_log_sf((std::log(t) - theta.meanlog()) / theta.sdlog());
  }
  throw std::logic_error("unreachable");
}

// log F_theta(t); the censored contribution under left censoring.
inline double log_cdf(const ModelSpec& model, const ParameterVector& theta,
                      double t) {
  require_valid_theta(model, theta);
  require_positive_time(t);
  switch (model.family) {
    case Family::Exponential:
      return std::log(-std::expm1(-theta.rate() * t));
    case Family::Weibull:
      return std::log(
          -std::expm1(-theta.scale() * std::exp(theta.shape() * std::log(t))));
    case Family::LogNormal:
      return normal_log_cdf((std::log(t) - theta.meanlog()) / theta.sdlog());
  }
  throw std::logic_error("unreachable");
}

// Inverse CDF. F_theta(quantile(u)) = u for u in (0,1).
inline double quantile(const ModelSpec& model, const ParameterVector& theta,
                       double u) {
  require_valid_theta(model, theta);
  if (!(u > 0.0 && u < 1.0)) {
    throw std::domain_error("quantile: u must lie in (0,1)");
  }
  switch (model.family) {
    case Family::Exponential:
      return -std::log1p(-u) / theta.rate();
    case Family::Weibull:
      return std::pow(-std::log1p(-u) / theta.scale(), 1.0 / theta.shape());
    case Family::LogNormal:
      return std::exp(theta.meanlog() + theta.sdlog() * normal_quantile(u));
  }
  throw std::logic_error("unreachable");
}

// n iid draws from F_theta by inverse-CDF transform; deterministic given the
// stream state.
inline std::vector<double> sample_event_times(const ModelSpec& model,
                                              const ParameterVector& theta,
                                              std::size_t n,
                                              std::mt19937_64& rng) {
  require_valid_theta(model, theta);
  if (n < 1) throw std::invalid_argument("sample_event_times: n must be >= 1");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = quantile(model, theta, uniform01(rng));
  return out;
}

// Censored-data log-likelihood with per-dataset transforms cached once.
// Exponential right-censored data collapses to sufficient statistics, so a
// likelihood evaluation is O(1) there; the two-parameter families keep
// log(t) precomputed. Repeated evaluation of one dataset (optimizer loops,
// contour grids) goes through this.
class LogLikContext {
 public:
  LogLikContext(const ModelSpec& model, const SurvivalDataset& data)
      : model_(model), side_(data.censoring_side()) {
    n_events_ = 0;
    for (const auto& obs : data.observations()) {
      sum_t_ += obs.time;  // in dataset order, so the closed form is exact
      if (obs.status == 1) {
        ++n_events_;
        exact_t_.push_back(obs.time);
        exact_logt_.push_back(std::log(obs.time));
        sum_exact_t_ += obs.time;
        sum_exact_logt_ += std::log(obs.time);
      } else {
        cens_t_.push_back(obs.time);
        cens_logt_.push_back(std::log(obs.time));
      }
    }
  }

  const ModelSpec& model() const { return model_; }
  CensoringSide side() const { return side_; }
  std::size_t event_count() const { return n_events_; }
  std::size_t size() const { return exact_t_.size() + cens_t_.size(); }
  double sum_times() const { return sum_t_; }
  double sum_exact_logt() const { return sum_exact_logt_; }
  const std::vector<double>& exact_logt() const { return exact_logt_; }

  // Assumes theta already satisfies the positivity invariants.
  double evaluate(const ParameterVector& theta) const {
    switch (model_.family) {
      case Family::Exponential: return eval_exponential(theta.rate());
      case Family::Weibull: return eval_weibull(theta.shape(), theta.scale());
      case Family::LogNormal: return eval_lognormal(theta.meanlog(), theta.sdlog());
    }
    throw std::logic_error("unreachable");
  }

 private:
  double eval_exponential(double rate) const {
    const double log_rate = std::log(rate);
    if (side_ == CensoringSide::Right) {
      return static_cast<double>(n_events_) * log_rate - rate * sum_times();
    }
    double ll = static_cast<double>(n_events_) * log_rate - rate * sum_exact_t_;
    for (double t : cens_t_) ll += std::log(-std::expm1(-rate * t));
    return ll;
  }

  double eval_weibull(double shape, double scale) const {
    const double log_shape = std::log(shape);
    const double log_scale = std::log(scale);
    double ll = static_cast<double>(n_events_) * (log_shape + log_scale) +
                (shape - 1.0) * sum_exact_logt_;
    for (double lt : exact_logt_) ll -= scale * std::exp(shape * lt);
    if (side_ == CensoringSide::Right) {
      for (double lt : cens_logt_) ll -= scale * std::exp(shape * lt);
    } else {
      for (double lt : cens_logt_)
        ll += std::log(-std::expm1(-scale * std::exp(shape * lt)));
    }
    return ll;
  }

  double eval_lognormal(double meanlog, double sdlog) const {
    const double inv_sd = 1.0 / sdlog;
    double ll = -sum_exact_logt_ -
                static_cast<double>(n_events_) * (std::log(sdlog) + kHalfLog2Pi);
    for (double lt : exact_logt_) {
      const double z = (lt - meanlog) * inv_sd;
      ll -= 0.5 * z * z;
    }
    if (side_ == CensoringSide::Right) {
      for (double lt : cens_logt_) ll += normal_log_sf((lt - meanlog) * inv_sd);
    } else {
      for (double lt : cens_logt_) ll += normal_log_cdf((lt - meanlog) * inv_sd);
    }
    return ll;
  }

  ModelSpec model_;
  CensoringSide side_;
  std::size_t n_events_ = 0;
  std::vector<double> exact_t_, exact_logt_;
  std::vector<double> cens_t_, cens_logt_;
  double sum_t_ = 0.0, sum_exact_t_ = 0.0, sum_exact_logt_ = 0.0;
};

// Sum over observations of d*log f + (1-d)*log Fbar (right censoring) or
// d*log f + (1-d)*log F (left censoring). Multiplicative terms from the
// censoring law are dropped; they cancel from every likelihood ratio.
inline double log_likelihood(const ModelSpec& model,
                             const ParameterVector& theta,
                             const SurvivalDataset& data) {
  require_valid_theta(model, theta);
  return LogLikContext(model, data).evaluate(theta);
}

}  // namespace survplaus
