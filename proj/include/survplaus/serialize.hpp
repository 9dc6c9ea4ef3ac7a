#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "survplaus/common.hpp"
#include "survplaus/mle.hpp"
#include "survplaus/model.hpp"
#include "survplaus/plausibility.hpp"
#include "survplaus/simulation.hpp"
#include "survplaus/step_distribution.hpp"

namespace survplaus {

using json = nlohmann::json;

// Shortest decimal that round-trips exactly, for CSV payloads; NaN becomes
// an empty field.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == v) break;
  }
  return buf;
}

// Missing values (NaN) become JSON null.
inline json number_or_null(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

inline json numbers_or_nulls(const std::vector<double>& values) {
  json arr = json::array();
  for (double v : values) arr.push_back(number_or_null(v));
  return arr;
}

inline json to_json(const ParameterVector& theta, Family family) {
  json j;
  const auto names = parameter_names(family);
  for (std::size_t i = 0; i < theta.dimension(); ++i) j[names[i]] = theta[i];
  j["values"] = theta.values();
  return j;
}

inline json to_json(const MleResult& mle, Family family) {
  return json{{"estimate", to_json(mle.estimate, family)},
              {"loglik", mle.loglik_at_estimate},
              {"converged", mle.converged},
              {"iterations", mle.iterations}};
}

inline json to_json(const StepDistribution& dist) {
  return json{{"jump_points", dist.jump_points},
              {"survival_values", dist.survival_values},
              {"atom",
               {{"location", to_string(dist.boundary_atom_location)},
                {"mass", dist.boundary_atom_mass}}}};
}

inline json axes_to_json(const ParameterGrid& grid) {
  json axes = json::array();
  for (const auto& axis : grid.axes) axes.push_back(axis);
  return axes;
}

inline json to_json(const PlausibilityCurve& curve) {
  json grid_points = json::array();
  for (const auto& p : curve.grid.points) grid_points.push_back(p.values());
  return json{{"version", kVersion},
              {"seed", curve.config.seed},
              {"M", curve.config.replicates},
              {"model", to_string(curve.model.family)},
              {"censoring", to_string(curve.side)},
              {"axis_labels", curve.axis_labels},
              {"axes", axes_to_json(curve.grid)},
              {"grid", grid_points},
              {"plausibility", numbers_or_nulls(curve.values)},
              {"mle", to_json(curve.mle, curve.model.family)}};
}

inline json to_json(const PlausibilityRegion& region,
                    const PlausibilityCurve& curve) {
  json members = json::array();
  for (std::size_t i : region.members) {
    members.push_back(curve.grid.points[i].values());
  }
  json j{{"version", kVersion},
         {"seed", curve.config.seed},
         {"M", curve.config.replicates},
         {"model", to_string(curve.model.family)},
         {"alpha", region.alpha},
         {"member_indices", region.members},
         {"members", members},
         {"mle", to_json(curve.mle, curve.model.family)}};
  if (region.has_interval) {
    j["interval"] = {{"lower", region.lower}, {"upper", region.upper}};
  } else {
    j["interval"] = nullptr;
  }
  return j;
}

// Two-column CSV for scalar grids, three-column for parameter pairs.
inline std::string to_csv(const PlausibilityCurve& curve) {
  std::string out;
  for (const auto& label : curve.axis_labels) {
    out += label;
    out += ',';
  }
  out += "plausibility\n";
  for (std::size_t i = 0; i < curve.grid.size(); ++i) {
    const auto& p = curve.grid.points[i];
    for (std::size_t a = 0; a < p.dimension(); ++a) {
      out += format_double(p[a]);
      out += ',';
    }
    out += format_double(curve.values[i]);
    out += '\n';
  }
  return out;
}

inline json censoring_to_json(const CensoringLaw& law) {
  switch (law.kind) {
    case CensoringLawKind::KnownNone:
      return json{{"kind", "none"}};
    case CensoringLawKind::UniformRight:
      return json{{"kind", "uniform-right"}, {"a", law.a}, {"b", law.b}};
    case CensoringLawKind::UniformLeft:
      return json{{"kind", "uniform-left"}, {"a", law.a}, {"b", law.b}};
  }
  return json{};
}

inline json to_json(const ExperimentDesign& design) {
  return json{{"name", design.name},
              {"model", to_string(design.model.family)},
              {"true_theta", design.true_theta.values()},
              {"censoring", censoring_to_json(design.censoring)},
              {"n", design.n},
              {"replications", design.replications},
              {"alpha", design.alpha},
              {"M", design.mc.replicates},
              {"seed", design.mc.seed},
              {"target",
               design.target == CoverageTarget::JointTheta ? "joint"
                                                           : "marginal"}};
}

inline json to_json(const SimulationReport& report,
                    bool include_records = true) {
  json j{{"version", kVersion},
         {"kind", report.kind},
         {"design", to_json(report.design)},
         {"seed", report.design.mc.seed},
         {"M", report.design.mc.replicates},
         {"replications_used", report.replications_used},
         {"dropped", report.dropped},
         {"coverage", number_or_null(report.coverage)},
         {"wald_coverage", number_or_null(report.wald_coverage)},
         {"mean_censoring_fraction", report.mean_censoring_fraction},
         {"mean_region_size", number_or_null(report.mean_region_size)},
         {"ks_distance", number_or_null(report.ks_distance)},
         {"pvalue_uniformity", number_or_null(report.pvalue_uniformity)}};
  if (include_records) {
    json records = json::array();
    for (const auto& rec : report.records) {
      records.push_back(json{{"index", rec.index},
                             {"dropped", rec.dropped},
                             {"censored_fraction", rec.censored_fraction},
                             {"p_at_truth", number_or_null(rec.p_at_truth)},
                             {"covered", rec.covered},
                             {"wald_covered", rec.wald_covered},
                             {"region_size", number_or_null(rec.region_size)},
                             {"rejected", rec.rejected_replicates}});
    }
    j["records"] = records;
  }
  return j;
}

// Long-form CSV, one row per replication; feeds external plotting.
inline std::string to_csv(const SimulationReport& report) {
  std::string out =
      "rep,dropped,censored_fraction,p_at_truth,covered,wald_covered,"
      "region_size,rejected\n";
  for (const auto& rec : report.records) {
    out += std::to_string(rec.index);
    out += ',';
    out += rec.dropped ? "1" : "0";
    out += ',';
    out += format_double(rec.censored_fraction);
    out += ',';
    out += format_double(rec.p_at_truth);
    out += ',';
    out += rec.covered < 0 ? "" : std::to_string(rec.covered);
    out += ',';
    out += rec.wald_covered < 0 ? "" : std::to_string(rec.wald_covered);
    out += ',';
    out += format_double(rec.region_size);
    out += ',';
    out += std::to_string(rec.rejected_replicates);
    out += '\n';
  }
  return out;
}

}  // namespace survplaus
