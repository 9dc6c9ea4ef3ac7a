#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "survplaus/simulation.hpp"

using namespace survplaus;
using Catch::Approx;

namespace {

ExperimentDesign exp_design(double theta, std::size_t n,
                            CensoringLaw law = {CensoringLawKind::UniformRight,
                                                0.0, 5.0}) {
  ExperimentDesign d;
  d.model.family = Family::Exponential;
  d.true_theta = ParameterVector(theta);
  d.censoring = law;
  d.n = n;
  return d;
}

}  // namespace

TEST_CASE("generate_censored_sample") {
  SECTION("no censoring law gives a fully observed sample") {
    auto design = exp_design(1.0, 40, {CensoringLawKind::KnownNone});
    auto rng = make_stream(1, 0, 0);
    const auto data = generate_censored_sample(design, rng);
    CHECK(data.event_count() == 40);
    CHECK(data.censoring_side() == CensoringSide::Right);
  }
  SECTION("censored fraction matches the analytic value") {
    // P(X > C) = (1 - e^{-5})/5 for X ~ Exp(1), C ~ Unif(0,5)
    auto design = exp_design(1.0, 15);
    const double analytic = (1.0 - std::exp(-5.0)) / 5.0;
    double censored = 0.0;
    const std::size_t reps = 2000;
    for (std::size_t r = 0; r < reps; ++r) {
      auto rng = make_stream(77, 3, r);
      const auto data = generate_censored_sample(design, rng);
      censored += static_cast<double>(data.censored_count());
    }
    CHECK(censored / (15.0 * reps) == Approx(analytic).margin(0.01));
  }
  SECTION("a collapsing censoring window censors everything") {
    auto design = exp_design(1.0, 25, {CensoringLawKind::UniformRight, 0.0, 1e-9});
    auto rng = make_stream(5, 0, 0);
    const auto data = generate_censored_sample(design, rng);
    CHECK(data.event_count() == 0);
  }
  SECTION("left censoring mirrors the observation rule") {
    ExperimentDesign d;
    d.model.family = Family::LogNormal;
    d.true_theta = ParameterVector(0.0, 1.0);
    d.censoring = {CensoringLawKind::UniformLeft, 0.0, 1.0};
    d.n = 200;
    auto rng = make_stream(9, 0, 0);
    const auto data = generate_censored_sample(d, rng);
    CHECK(data.censoring_side() == CensoringSide::Left);
    // every censored record reports the bound, which is below 1
    for (const auto& obs : data.observations()) {
      if (obs.status == 0) CHECK(obs.time <= 1.0);
    }
    CHECK(data.censored_count() > 0);
    CHECK(data.event_count() > 0);
  }
}

TEST_CASE("wald interval against the analytic exponential information") {
  // Uncensored exponential: I(theta_hat) = n / theta_hat^2, so the interval
  // is theta_hat * (1 +/- z / sqrt(n)).
  std::vector<CensoredObservation> obs;
  auto rng = make_stream(123, 0, 0);
  const ModelSpec expo{Family::Exponential};
  for (int i = 0; i < 50; ++i) {
    obs.push_back({quantile(expo, ParameterVector(0.8), uniform01(rng)), 1});
  }
  const SurvivalDataset data(obs);
  const auto wald = wald_interval(expo, data, 0.05);
  REQUIRE(wald.available);
  const double theta_hat = wald.mle.estimate.rate();
  const double n = 50.0;
  CHECK(wald.z == Approx(1.9599639845400545).margin(1e-9));
  CHECK(wald.z == Approx(1.96).margin(5e-4));
  CHECK(wald.information[0] == Approx(n / (theta_hat * theta_hat)).epsilon(1e-5));
  CHECK(wald.lower == Approx(theta_hat * (1.0 - wald.z / std::sqrt(n))).epsilon(1e-5));
  CHECK(wald.upper == Approx(theta_hat * (1.0 + wald.z / std::sqrt(n))).epsilon(1e-5));
  CHECK(wald.covers(wald.mle.estimate));
  CHECK(!wald.covers(ParameterVector(theta_hat * 3.0)));
}

TEST_CASE("wald ellipsoid and delta-method functional interval") {
  auto rng = make_stream(321, 0, 0);
  const ModelSpec weib{Family::Weibull};
  std::vector<CensoredObservation> obs;
  for (int i = 0; i < 40; ++i) {
    const double x = quantile(weib, ParameterVector(1.3, 0.9), uniform01(rng));
    const double c = 4.0 * uniform01(rng);
    obs.push_back({std::min(x, c), x <= c ? 1 : 0});
  }
  const SurvivalDataset data(obs);
  const auto wald = wald_interval(weib, data, 0.05);
  REQUIRE(wald.available);
  CHECK(wald.chi2_threshold == Approx(-2.0 * std::log(0.05)).margin(1e-12));
  CHECK(wald.covers(wald.mle.estimate));
  CHECK(!wald.covers(ParameterVector(wald.mle.estimate.shape() * 5.0,
                                     wald.mle.estimate.scale() * 5.0)));

  // Identity functional on the exponential reduces to the plain interval.
  std::vector<CensoredObservation> eobs;
  for (int i = 0; i < 30; ++i) {
    eobs.push_back({quantile({Family::Exponential}, ParameterVector(1.0),
                             uniform01(rng)),
                    1});
  }
  const SurvivalDataset edata(eobs);
  const auto interval = wald_interval({Family::Exponential}, edata, 0.05);
  const auto psi = wald_psi_interval(
      {Family::Exponential}, edata, 0.05,
      [](const ParameterVector& t) { return t.rate(); });
  REQUIRE(psi.available);
  CHECK(psi.lower == Approx(interval.lower).epsilon(1e-6));
  CHECK(psi.upper == Approx(interval.upper).epsilon(1e-6));
}

TEST_CASE("validity run with the exact censoring law") {
  auto design = exp_design(1.0, 15);
  design.replications = 400;
  design.mc.replicates = 150;
  design.mc.seed = 1234;
  const auto report = run_validity(design, /*use_plugin=*/false);
  CHECK(report.kind == "validity");
  CHECK(report.replications_used + report.dropped == 400);

  std::vector<double> pvals;
  for (const auto& rec : report.records) {
    if (!rec.dropped) {
      CHECK(rec.p_at_truth >= 0.0);
      CHECK(rec.p_at_truth <= 1.0);
      pvals.push_back(rec.p_at_truth);
    }
  }
  // validity: P(p <= alpha) <= alpha up to binomial noise, on a ladder
  const double n = static_cast<double>(pvals.size());
  for (double alpha = 0.05; alpha < 0.96; alpha += 0.05) {
    double below = 0.0;
    for (double p : pvals) below += p <= alpha;
    const double se = std::sqrt(alpha * (1.0 - alpha) / n);
    CHECK(below / n <= alpha + 3.0 * se);
  }
  CHECK(report.mean_censoring_fraction ==
        Approx((1.0 - std::exp(-5.0)) / 5.0).margin(0.02));
  CHECK(report.ks_distance < 0.1);
  CHECK(report.pvalue_uniformity >= 0.0);
  CHECK(report.pvalue_uniformity <= 1.0);
}

TEST_CASE("plug-in calibration stays near uniform at n = 15") {
  ExperimentDesign design = preset_design("exp-validity-n15");
  design.mc.seed = 60601;
  const auto report = run_validity(design, /*use_plugin=*/true);
  std::vector<double> pvals;
  for (const auto& rec : report.records) {
    if (!rec.dropped) pvals.push_back(rec.p_at_truth);
  }
  const double n = static_cast<double>(pvals.size());
  for (double alpha = 0.05; alpha < 0.96; alpha += 0.05) {
    double below = 0.0;
    for (double p : pvals) below += p <= alpha;
    CHECK(below / n <= alpha + 0.04);
  }
}

TEST_CASE("validity degenerates to zero-one plausibilities at M = 1") {
  auto design = exp_design(1.0, 12, {CensoringLawKind::KnownNone});
  design.replications = 60;
  design.mc.replicates = 1;
  design.mc.seed = 5;
  const auto report = run_validity(design, false);
  for (const auto& rec : report.records) {
    if (!rec.dropped) {
      CHECK((rec.p_at_truth == 0.0 || rec.p_at_truth == 1.0));
    }
  }
  CHECK(report.ks_distance > 0.2);  // nothing like uniform
}

TEST_CASE("coverage run on the uncensored exponential") {
  auto design = exp_design(1.0, 30, {CensoringLawKind::KnownNone});
  design.replications = 300;
  design.alpha = 0.05;
  design.mc.replicates = 150;
  design.mc.seed = 42;
  const auto report = run_coverage(design);
  CHECK(report.kind == "coverage");
  CHECK(report.replications_used == 300);
  const double se = std::sqrt(0.95 * 0.05 / 300.0);
  CHECK(report.coverage == Approx(0.95).margin(3.0 * se));
  CHECK(report.wald_coverage > 0.8);
  CHECK(report.wald_coverage <= 1.0);
  CHECK(report.mean_censoring_fraction == 0.0);

  SECTION("coverage is monotone in alpha") {
    auto loose = design;
    loose.alpha = 0.25;
    const auto loose_report = run_coverage(loose);
    CHECK(report.coverage >= loose_report.coverage);
  }
  SECTION("alpha near zero covers almost surely") {
    auto tiny = design;
    tiny.alpha = 1e-4;
    tiny.replications = 200;
    const auto tiny_report = run_coverage(tiny);
    CHECK(tiny_report.coverage >= 0.99);
  }
}

TEST_CASE("coverage estimates are stable across master seeds") {
  auto design = exp_design(1.0, 20);
  design.replications = 300;
  design.mc.replicates = 120;
  design.mc.seed = 1001;
  const double c1 = run_coverage(design).coverage;
  const double c1_again = run_coverage(design).coverage;
  CHECK(c1 == c1_again);  // same seed, same answer
  design.mc.seed = 2002;
  const double c2 = run_coverage(design).coverage;
  const double se = std::sqrt(0.95 * 0.05 / 300.0);
  CHECK(std::fabs(c1 - c2) < 4.0 * se);
}

TEST_CASE("optional region-size measurement") {
  auto design = exp_design(1.0, 20, {CensoringLawKind::KnownNone});
  design.replications = 15;
  design.mc.replicates = 60;
  design.mc.seed = 8;
  design.measure_region_size = true;
  const auto report = run_coverage(design);
  REQUIRE(std::isfinite(report.mean_region_size));
  CHECK(report.mean_region_size > 0.0);
  for (const auto& rec : report.records) {
    if (!rec.dropped) CHECK(rec.region_size > 0.0);
  }
}

TEST_CASE("marginal-psi coverage smoke run") {
  ExperimentDesign design;
  design.model.family = Family::LogNormal;
  design.true_theta = ParameterVector(0.0, 1.0);
  design.censoring = {CensoringLawKind::UniformLeft, 0.0, 1.0};
  design.n = 12;
  design.replications = 30;
  design.alpha = 0.05;
  design.mc.replicates = 60;
  design.mc.seed = 31;
  design.target = CoverageTarget::MarginalPsi;
  design.psi = lognormal_mean;
  design.marginal_axis_points = 9;
  design.psi_bins = 15;
  const auto report = run_coverage(design);
  CHECK(report.replications_used + report.dropped == 30);
  CHECK(report.coverage >= 0.5);
  CHECK(report.coverage <= 1.0);
}

TEST_CASE("preset designs resolve by name") {
  for (const auto& name : preset_design_names()) {
    const auto design = preset_design(name);
    CHECK(design.name == name);
    CHECK(design.replications >= 1);
  }
  CHECK(preset_design("exp-validity-n15").n == 15);
  CHECK(preset_design("exp-coverage-n50-theta0.5").true_theta.rate() == 0.5);
  CHECK(preset_design("weibull-coverage-n25").model.family == Family::Weibull);
  CHECK_THROWS_AS(preset_design("no-such-design"), std::invalid_argument);
}
