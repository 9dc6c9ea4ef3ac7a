#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "survplaus/csv.hpp"
#include "survplaus/mle.hpp"
#include "survplaus/model.hpp"
#include "oracle_helpers.hpp"

using namespace survplaus;
using Catch::Approx;

namespace {

SurvivalDataset make_data(std::vector<std::pair<double, int>> rows,
                          CensoringSide side = CensoringSide::Right) {
  std::vector<CensoredObservation> obs;
  for (auto [t, d] : rows) obs.push_back({t, d});
  return SurvivalDataset(std::move(obs), side);
}

SurvivalDataset random_right_censored(std::mt19937_64& rng, std::size_t n,
                                      double rate, double cmax) {
  std::vector<CensoredObservation> obs;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = -std::log(unif(rng)) / rate;
    const double c = cmax * unif(rng);
    obs.push_back({std::min(x, c), x <= c ? 1 : 0});
  }
  return SurvivalDataset(std::move(obs));
}

}  // namespace

TEST_CASE("log_density matches the family formulas") {
  CHECK(log_density({Family::Exponential}, ParameterVector(1.0), 1.0) ==
        Approx(-1.0).margin(1e-14));
  CHECK(log_density({Family::Weibull}, ParameterVector(1.0, 1.0), 1.0) ==
        Approx(-1.0).margin(1e-14));
  CHECK(log_density({Family::LogNormal}, ParameterVector(0.0, 1.0), 1.0) ==
        Approx(-0.5 * std::log(2.0 * M_PI)).margin(1e-14));
}

TEST_CASE("log_survival matches the family formulas") {
  CHECK(log_survival({Family::Exponential}, ParameterVector(2.0), 3.0) ==
        Approx(-6.0).margin(1e-13));
  CHECK(log_survival({Family::Weibull}, ParameterVector(2.0, 1.0), 2.0) ==
        Approx(-4.0).margin(1e-13));
  CHECK(log_survival({Family::LogNormal}, ParameterVector(0.0, 1.0), 1.0) ==
        Approx(std::log(0.5)).margin(1e-14));
}

TEST_CASE("log_survival is well behaved at the support edges") {
  const ModelSpec weib{Family::Weibull};
  const ParameterVector theta(1.7, 0.8);
  double prev = 0.0;
  for (double t : {1e-9, 1e-4, 0.1, 1.0, 5.0, 50.0, 500.0}) {
    const double ls = log_survival(weib, theta, t);
    CHECK(ls <= prev + 1e-15);  // exp(log_survival) non-increasing
    prev = ls;
  }
  CHECK(log_survival(weib, theta, 1e-12) == Approx(0.0).margin(1e-9));
  // deep tail stays finite for the normal-tail family
  const double tail =
      log_survival({Family::LogNormal}, ParameterVector(0.0, 0.1), 100.0);
  CHECK(std::isfinite(tail));
  CHECK(tail < -700.0);
}

TEST_CASE("log_likelihood sums event and censored contributions") {
  const ModelSpec expo{Family::Exponential};
  SECTION("right-censored") {
    const auto data = make_data({{1.0, 1}, {2.0, 0}});
    CHECK(log_likelihood(expo, ParameterVector(1.0), data) ==
          Approx(-3.0).margin(1e-13));
  }
  SECTION("a single exact observation reduces to the density") {
    for (Family family : {Family::Exponential, Family::Weibull, Family::LogNormal}) {
      const ModelSpec model{family};
      const ParameterVector theta =
          family == Family::Exponential ? ParameterVector(0.7)
                                        : ParameterVector(0.9, 1.3);
      const auto data = make_data({{1.7, 1}});
      CHECK(log_likelihood(model, theta, data) ==
            Approx(log_density(model, theta, 1.7)).margin(1e-13));
    }
  }
  SECTION("left-censored uses the distribution function") {
    const auto data =
        make_data({{0.05, 0}, {0.2, 1}}, CensoringSide::Left);
    const double expected =
        std::log(1.0 - std::exp(-0.025)) + std::log(0.5) - 0.1;
    CHECK(log_likelihood(expo, ParameterVector(0.5), data) ==
          Approx(expected).margin(1e-13));
  }
}

TEST_CASE("weibull with unit shape collapses to the exponential") {
  std::mt19937_64 rng(7);
  const ModelSpec expo{Family::Exponential};
  const ModelSpec weib{Family::Weibull};
  for (int rep = 0; rep < 20; ++rep) {
    const double lambda = 0.2 + 2.0 * uniform01(rng);
    const double t = 0.05 + 4.0 * uniform01(rng);
    CHECK(log_density(weib, {1.0, lambda}, t) ==
          Approx(log_density(expo, ParameterVector(lambda), t)).margin(1e-12));
    CHECK(log_survival(weib, {1.0, lambda}, t) ==
          Approx(log_survival(expo, ParameterVector(lambda), t)).margin(1e-12));
  }
  const auto data = make_data({{0.4, 1}, {1.1, 0}, {2.3, 1}, {0.9, 0}});
  CHECK(log_likelihood(weib, {1.0, 0.8}, data) ==
        Approx(log_likelihood(expo, ParameterVector(0.8), data)).margin(1e-12));
  const auto left = make_data({{0.4, 1}, {1.1, 0}, {2.3, 1}, {0.9, 0}},
                              CensoringSide::Left);
  CHECK(log_likelihood(weib, {1.0, 0.8}, left) ==
        Approx(log_likelihood(expo, ParameterVector(0.8), left)).margin(1e-12));
}

TEST_CASE("numerical gradient of log_likelihood matches the analytic score") {
  std::mt19937_64 seed_rng(42);
  auto numeric_grad = [](auto&& f, double at) {
    const double h = 1e-6;
    return (f(at + h) - f(at - h)) / (2.0 * h);
  };

  SECTION("exponential, both sides") {
    for (auto side : {CensoringSide::Right, CensoringSide::Left}) {
      const auto data = make_data({{0.3, 1}, {1.2, 0}, {2.7, 1}, {0.8, 0}}, side);
      const ModelSpec model{Family::Exponential};
      const double theta = 0.9;
      auto f = [&](double v) {
        return log_likelihood(model, ParameterVector(v), data);
      };
      const double analytic = side == CensoringSide::Right
                                  ? oracle::exponential_score_right(theta, data)
                                  : oracle::exponential_score_left(theta, data);
      CHECK(numeric_grad(f, theta) == Approx(analytic).epsilon(1e-4));
    }
  }

  SECTION("weibull, right-censored") {
    const auto data =
        make_data({{0.5, 1}, {1.4, 0}, {0.9, 1}, {2.2, 1}, {1.7, 0}});
    const ModelSpec model{Family::Weibull};
    const double shape = 1.3, scale = 0.7;
    const auto [ds, dl] = oracle::weibull_score_right(shape, scale, data);
    auto f_shape = [&](double v) {
      return log_likelihood(model, ParameterVector(v, scale), data);
    };
    auto f_scale = [&](double v) {
      return log_likelihood(model, ParameterVector(shape, v), data);
    };
    CHECK(numeric_grad(f_shape, shape) == Approx(ds).epsilon(1e-4));
    CHECK(numeric_grad(f_scale, scale) == Approx(dl).epsilon(1e-4));
  }

  SECTION("lognormal, both sides") {
    for (auto side : {CensoringSide::Right, CensoringSide::Left}) {
      const auto data =
          make_data({{0.3, 1}, {1.6, 0}, {0.7, 1}, {2.9, 0}, {1.1, 1}}, side);
      const ModelSpec model{Family::LogNormal};
      const double mu = 0.2, sigma = 1.1;
      const auto [dm, dsg] = oracle::lognormal_score(mu, sigma, data);
      auto f_mu = [&](double v) {
        return log_likelihood(model, ParameterVector(v, sigma), data);
      };
      auto f_sigma = [&](double v) {
        return log_likelihood(model, ParameterVector(mu, v), data);
      };
      CHECK(numeric_grad(f_mu, mu) == Approx(dm).epsilon(1e-4));
      CHECK(numeric_grad(f_sigma, sigma) == Approx(dsg).epsilon(1e-4));
    }
  }
}

TEST_CASE("exponential right-censored fit is the closed form, exactly") {
  SECTION("stated examples") {
    const auto fit1 =
        fit_mle({Family::Exponential}, make_data({{1, 1}, {2, 1}, {3, 1}}));
    CHECK(fit1.estimate.rate() == 0.5);
    CHECK(fit1.converged);
    const auto fit2 =
        fit_mle({Family::Exponential}, make_data({{1, 1}, {2, 0}}));
    CHECK(fit2.estimate.rate() == Approx(1.0 / 3.0).margin(1e-16));
  }
  SECTION("random datasets: bitwise equality with sum ratio") {
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 50; ++rep) {
      const auto data = random_right_censored(rng, 12, 1.3, 2.5);
      if (data.event_count() == 0) continue;
      double sum_t = 0.0, sum_d = 0.0;
      for (const auto& obs : data.observations()) {
        sum_t += obs.time;
        sum_d += obs.status;
      }
      const auto fit = fit_mle({Family::Exponential}, data);
      CHECK(fit.estimate.rate() == sum_d / sum_t);
    }
  }
}

TEST_CASE("fit_mle rejects degenerate samples") {
  CHECK_THROWS_AS(
      fit_mle({Family::Exponential}, make_data({{1.0, 0}, {2.0, 0}})),
      degenerate_data_error);
  CHECK_THROWS_AS(
      fit_mle({Family::Weibull}, make_data({{1.0, 1}, {2.0, 0}, {0.5, 0}})),
      degenerate_data_error);
  CHECK_THROWS_AS(
      fit_mle({Family::LogNormal},
              make_data({{0.1, 0}, {0.4, 1}}, CensoringSide::Left)),
      degenerate_data_error);
}

TEST_CASE("fitted estimates are stationary points of the log-likelihood") {
  std::mt19937_64 rng(23);
  const double tol = 1e-8;
  for (Family family : {Family::Weibull, Family::LogNormal}) {
    const ModelSpec model{family};
    for (int rep = 0; rep < 10; ++rep) {
      const auto data = random_right_censored(rng, 40, 1.0, 3.0);
      const auto fit = fit_mle(model, data);
      REQUIRE(fit.converged);
      const double base = fit.loglik_at_estimate;
      CHECK(base == Approx(log_likelihood(model, fit.estimate, data)).margin(1e-10));
      for (std::size_t k = 0; k < model.parameter_dimension(); ++k) {
        for (double dir : {-1e-3, 1e-3}) {
          ParameterVector theta = fit.estimate;
          if (family == Family::LogNormal && k == 0) {
            theta[k] += dir;  // unconstrained location
          } else {
            theta[k] *= std::exp(dir);  // log scale for positive parameters
          }
          CHECK(log_likelihood(model, theta, data) <= base + tol);
        }
      }
    }
  }
}

TEST_CASE("left-censored exponential fit maximizes the mirrored likelihood") {
  const auto data = make_data(
      {{0.05, 0}, {0.2, 1}, {0.6, 1}, {0.1, 0}, {1.4, 1}}, CensoringSide::Left);
  const ModelSpec model{Family::Exponential};
  const auto fit = fit_mle(model, data);
  REQUIRE(fit.converged);
  const double base = fit.loglik_at_estimate;
  for (double dir : {-1e-3, 1e-3}) {
    const ParameterVector theta(fit.estimate.rate() * std::exp(dir));
    CHECK(log_likelihood(model, theta, data) <= base + 1e-8);
  }
}

TEST_CASE("lognormal fit on the atrazine fixture reproduces the known MLE") {
  const auto data = parse_dataset_file(
      std::string(SURVPLAUS_DATA_DIR) + "/atrazine.csv", CensoringSide::Left);
  REQUIRE(data.size() == 24);
  REQUIRE(data.censored_count() == 11);
  const auto fit = fit_mle({Family::LogNormal}, data);
  REQUIRE(fit.converged);
  CHECK(fit.estimate.meanlog() == Approx(-4.206).margin(0.005));
  CHECK(fit.estimate.sdlog() == Approx(1.462).margin(0.005));
}

TEST_CASE("quantile inverts the distribution function") {
  CHECK(quantile({Family::Exponential}, ParameterVector(1.0), 0.5) ==
        Approx(-std::log(0.5)).margin(1e-14));
  CHECK(quantile({Family::Weibull}, ParameterVector(2.0, 1.0),
                 1.0 - std::exp(-1.0)) == Approx(1.0).margin(1e-12));
  CHECK(quantile({Family::LogNormal}, ParameterVector(0.0, 1.0), 0.5) ==
        Approx(1.0).margin(1e-12));
}

TEST_CASE("sample_event_times is deterministic given the stream") {
  const ModelSpec model{Family::Weibull};
  const ParameterVector theta(1.4, 0.6);
  auto rng1 = make_stream(99, 1, 2);
  auto rng2 = make_stream(99, 1, 2);
  const auto a = sample_event_times(model, theta, 32, rng1);
  const auto b = sample_event_times(model, theta, 32, rng2);
  CHECK(a == b);
  for (double t : a) CHECK(t > 0.0);
}

TEST_CASE("domain errors on invalid inputs") {
  const ModelSpec expo{Family::Exponential};
  CHECK_THROWS_AS(log_density(expo, ParameterVector(-1.0), 1.0),
                  std::domain_error);
  CHECK_THROWS_AS(log_density(expo, ParameterVector(1.0), 0.0),
                  std::domain_error);
  CHECK_THROWS_AS(log_survival({Family::Weibull}, ParameterVector(0.0, 1.0), 1.0),
                  std::domain_error);
  CHECK_THROWS_AS(
      log_likelihood({Family::LogNormal}, ParameterVector(0.0, -2.0),
                     make_data({{1.0, 1}})),
      std::domain_error);
  CHECK_THROWS_AS(quantile(expo, ParameterVector(1.0), 1.5), std::domain_error);
  CHECK_THROWS_AS(SurvivalDataset({}), std::invalid_argument);
  CHECK_THROWS_AS(make_data({{-1.0, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(make_data({{1.0, 2}}), std::invalid_argument);
}
