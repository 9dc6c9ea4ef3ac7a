// Command-line front-end: model fitting, Kaplan-Meier estimation,
// plausibility contours and regions, consonant marginals, and simulation
// studies, all with reproducible seeds and machine-readable outputs.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "survplaus/survplaus.hpp"

namespace {

using namespace survplaus;

// Exit codes: 0 ok, 2 usage, 3 data/input, 4 degenerate data or Monte Carlo
// configuration, 5 optimizer non-convergence, 6 output I/O.
constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitDegenerate = 4;
constexpr int kExitNonConvergence = 5;
constexpr int kExitIo = 6;

struct nonconvergence_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GridSpec {
  std::string raw = "auto";
  bool is_auto = true;
  double lo = 0.0, hi = 0.0;
  std::size_t count = 0;
  bool logarithmic = true;
};

GridSpec parse_grid_spec(const std::string& text) {
  GridSpec spec;
  spec.raw = text;
  if (text == "auto") return spec;
  spec.is_auto = false;
  std::vector<std::string> parts;
  std::string token;
  std::stringstream ss(text);
  while (std::getline(ss, token, ':')) parts.push_back(token);
  if (parts.size() < 3 || parts.size() > 4) {
    throw CLI::ValidationError("grid", "expected lo:hi:count[:log|lin]");
  }
  try {
    spec.lo = std::stod(parts[0]);
    spec.hi = std::stod(parts[1]);
    spec.count = static_cast<std::size_t>(std::stoul(parts[2]));
  } catch (const std::exception&) {
    throw CLI::ValidationError("grid", "cannot parse `" + text + "`");
  }
  if (parts.size() == 4) {
    if (parts[3] == "log") {
      spec.logarithmic = true;
    } else if (parts[3] == "lin") {
      spec.logarithmic = false;
    } else {
      throw CLI::ValidationError("grid", "spacing must be `log` or `lin`");
    }
  } else {
    spec.logarithmic = spec.lo > 0.0;
  }
  return spec;
}

std::vector<double> realize_axis(const GridSpec& spec, double center,
                                 double lo_factor, double hi_factor,
                                 std::size_t count) {
  if (spec.is_auto) {
    return survplaus::detail::axis_around(center, lo_factor, hi_factor, count);
  }
  return make_axis(spec.lo, spec.hi, spec.count, spec.logarithmic);
}

void write_artifact(const std::string& path, const std::string& payload) {
  if (path.empty() || path == "-") {
    std::cout << payload;
    if (!payload.empty() && payload.back() != '\n') std::cout << '\n';
    return;
  }
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::ios_base::failure("cannot open " + tmp.string());
    out << payload;
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw std::ios_base::failure("short write to " + tmp.string());
    }
  }
  fs::rename(tmp, target);
}

struct CommonOptions {
  std::string input;
  std::string model = "exponential";
  std::string censoring = "right";
  std::string output;
  std::string format = "json";
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::size_t replicates = 500;
  bool replicates_given = false;
  std::size_t workers = 0;
  double alpha = 0.05;
};

void add_io_options(CLI::App* cmd, CommonOptions& opt, bool needs_model) {
  cmd->add_option("--input,-i", opt.input, "input CSV with time,status columns")
      ->required();
  if (needs_model) {
    cmd->add_option("--model,-m", opt.model, "exponential|weibull|lognormal")
        ->check(CLI::IsMember({"exponential", "weibull", "lognormal"}));
  }
  cmd->add_option("--censoring,-c", opt.censoring,
                  "censoring side of the dataset")
      ->check(CLI::IsMember({"right", "left"}));
  cmd->add_option("--output,-o", opt.output, "output path (default stdout)");
  cmd->add_option("--format,-f", opt.format, "json|csv")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--seed", opt.seed, "master seed (omit for a fresh one)")
      ->each([&](const std::string&) { opt.seed_given = true; });
}

void add_mc_options(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--M", opt.replicates, "Monte Carlo replicates per grid point")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--workers", opt.workers, "worker threads (0 = hardware)");
}

std::uint64_t resolve_seed(CommonOptions& opt) {
  if (!opt.seed_given) {
    std::random_device rd;
    opt.seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    opt.seed_given = true;
    std::cerr << "seed: " << opt.seed << "\n";
  }
  return opt.seed;
}

CensoringSide side_of(const CommonOptions& opt) {
  return opt.censoring == "left" ? CensoringSide::Left : CensoringSide::Right;
}

MonteCarloConfig config_of(CommonOptions& opt) {
  MonteCarloConfig cfg;
  cfg.replicates = opt.replicates;
  cfg.seed = resolve_seed(opt);
  cfg.parallel_workers = opt.workers;
  return cfg;
}

MleResult fit_or_throw(const ModelSpec& model, const SurvivalDataset& data) {
  const MleResult mle = fit_mle(model, data);
  if (!mle.converged) {
    throw nonconvergence_error("maximum likelihood fit did not converge");
  }
  return mle;
}

ParameterGrid build_grid(const ModelSpec& model, const ParameterVector& center,
                         const GridSpec& g1, const GridSpec& g2) {
  ParameterGrid grid;
  if (model.parameter_dimension() == 1) {
    grid.axes.push_back(realize_axis(g1, center[0], 0.2, 3.0, 201));
  } else {
    grid.axes.push_back(realize_axis(g1, center[0], 0.3, 3.0, 61));
    grid.axes.push_back(realize_axis(g2, center[1], 0.3, 3.0, 61));
  }
  grid.rebuild_points();
  return grid;
}

int run_fit(CommonOptions& opt) {
  const auto data = parse_dataset_file(opt.input, side_of(opt));
  const ModelSpec model{family_from_string(opt.model)};
  const MleResult mle = fit_or_throw(model, data);
  json j = to_json(mle, model.family);
  j["version"] = kVersion;
  j["seed"] = resolve_seed(opt);
  j["model"] = to_string(model.family);
  j["censoring"] = to_string(data.censoring_side());
  j["n"] = data.size();
  j["events"] = data.event_count();
  write_artifact(opt.output, j.dump(2));
  return kExitOk;
}

int run_km(CommonOptions& opt, bool reversed) {
  const auto data = parse_dataset_file(opt.input, side_of(opt));
  const StepDistribution dist =
      reversed ? reversed_kaplan_meier(data) : kaplan_meier(data);
  json j = to_json(dist);
  j["version"] = kVersion;
  j["seed"] = resolve_seed(opt);
  j["reversed"] = reversed;
  j["censoring"] = to_string(data.censoring_side());
  j["n"] = data.size();
  write_artifact(opt.output, j.dump(2));
  return kExitOk;
}

json curve_json(const PlausibilityCurve& curve, const GridSpec& g1,
                const GridSpec& g2) {
  json j = to_json(curve);
  j["grid_spec"] = json::array({g1.raw, g2.raw});
  return j;
}

int run_plaus(CommonOptions& opt, const GridSpec& g1, const GridSpec& g2) {
  const auto data = parse_dataset_file(opt.input, side_of(opt));
  const ModelSpec model{family_from_string(opt.model)};
  const MleResult mle = fit_or_throw(model, data);
  const ParameterGrid grid = build_grid(model, mle.estimate, g1, g2);
  const PlausibilityCurve curve =
      plausibility_contour(model, data, grid, config_of(opt));
  write_artifact(opt.output, opt.format == "csv"
                                 ? to_csv(curve)
                                 : curve_json(curve, g1, g2).dump(2));
  return kExitOk;
}

int run_region(CommonOptions& opt, const GridSpec& g1, const GridSpec& g2) {
  const auto data = parse_dataset_file(opt.input, side_of(opt));
  const ModelSpec model{family_from_string(opt.model)};
  const MleResult mle = fit_or_throw(model, data);
  const ParameterGrid grid = build_grid(model, mle.estimate, g1, g2);
  const PlausibilityCurve curve =
      plausibility_contour(model, data, grid, config_of(opt));
  const PlausibilityRegion region = plausibility_region(curve, opt.alpha);
  if (opt.format == "csv") {
    PlausibilityCurve members;
    members.model = curve.model;
    members.axis_labels = curve.axis_labels;
    for (std::size_t i : region.members) {
      members.grid.points.push_back(curve.grid.points[i]);
      members.values.push_back(curve.values[i]);
    }
    write_artifact(opt.output, to_csv(members));
  } else {
    json j = to_json(region, curve);
    j["grid_spec"] = json::array({g1.raw, g2.raw});
    write_artifact(opt.output, j.dump(2));
  }
  return kExitOk;
}

int run_marginal(CommonOptions& opt, const GridSpec& g1, const GridSpec& g2,
                 const GridSpec& psi_spec, const std::string& functional) {
  if (functional != "lognormal-mean") {
    throw CLI::ValidationError("--functional",
                               "only `lognormal-mean` is available");
  }
  const auto data = parse_dataset_file(opt.input, side_of(opt));
  const ModelSpec model{Family::LogNormal};
  const MleResult mle = fit_or_throw(model, data);
  const ParameterGrid grid = build_grid(model, mle.estimate, g1, g2);
  const PlausibilityCurve curve =
      plausibility_contour(model, data, grid, config_of(opt));
  const double psi_hat = lognormal_mean(mle.estimate);
  const std::vector<double> psi_axis =
      realize_axis(psi_spec, psi_hat, 0.2, 3.0, 201);
  const PlausibilityCurve marginal =
      marginal_plausibility(curve, lognormal_mean, psi_axis);
  if (opt.format == "csv") {
    write_artifact(opt.output, to_csv(marginal));
  } else {
    json j = to_json(marginal);
    j["grid_spec"] = json::array({g1.raw, g2.raw, psi_spec.raw});
    j["functional"] = functional;
    j["psi_at_mle"] = psi_hat;
    write_artifact(opt.output, j.dump(2));
  }
  return kExitOk;
}

struct StudyConfig {
  ExperimentDesign design;
  std::string study = "coverage";  // or "validity"
  bool use_plugin = true;
};

StudyConfig load_design(const std::string& name,
                        const std::string& design_file) {
  StudyConfig study;
  if (!design_file.empty()) {
    std::ifstream in(design_file);
    if (!in) throw csv_error(design_file + ": cannot open design file");
    json j = json::parse(in);
    ExperimentDesign& d = study.design;
    d.name = j.value("name", design_file);
    d.model.family = family_from_string(j.at("model").get<std::string>());
    d.true_theta =
        ParameterVector(j.at("true_theta").get<std::vector<double>>());
    const json& cj = j.at("censoring");
    const std::string kind = cj.at("kind").get<std::string>();
    if (kind == "none") {
      d.censoring.kind = CensoringLawKind::KnownNone;
    } else if (kind == "uniform-right") {
      d.censoring = {CensoringLawKind::UniformRight, cj.at("a").get<double>(),
                     cj.at("b").get<double>()};
    } else if (kind == "uniform-left") {
      d.censoring = {CensoringLawKind::UniformLeft, cj.at("a").get<double>(),
                     cj.at("b").get<double>()};
    } else {
      throw csv_error(design_file + ": unknown censoring kind " + kind);
    }
    d.n = j.at("n").get<std::size_t>();
    d.replications = j.value("replications", std::size_t{1000});
    d.alpha = j.value("alpha", 0.05);
    d.mc.replicates = j.value("M", std::size_t{300});
    if (j.value("target", "joint") == std::string("marginal")) {
      d.target = CoverageTarget::MarginalPsi;
      d.psi = lognormal_mean;
    }
    d.measure_region_size = j.value("measure_region_size", false);
    study.study = j.value("study", "coverage");
    study.use_plugin = j.value("plugin", true);
    return study;
  }
  study.design = preset_design(name);
  study.study = name.find("validity") != std::string::npos ? "validity"
                                                           : "coverage";
  return study;
}

int run_simulate(CommonOptions& opt, const std::string& name,
                 const std::string& design_file, bool known_g,
                 std::size_t replications_override) {
  StudyConfig study = load_design(name, design_file);
  ExperimentDesign& design = study.design;
  design.mc.seed = resolve_seed(opt);
  design.mc.parallel_workers = opt.workers;
  if (opt.replicates_given) design.mc.replicates = opt.replicates;
  if (replications_override > 0) design.replications = replications_override;
  if (known_g) study.use_plugin = false;

  const SimulationReport report =
      study.study == "validity" ? run_validity(design, study.use_plugin)
                                : run_coverage(design);
  if (opt.format == "csv") {
    write_artifact(opt.output, to_csv(report));
  } else {
    json j = to_json(report);
    j["plugin"] = study.use_plugin;
    write_artifact(opt.output, j.dump(2));
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "plausibility-contour inference for censored time-to-event data"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  CommonOptions opt;
  GridSpec g1, g2, psi_spec;
  std::string grid1_text = "auto", grid2_text = "auto", psi_text = "auto";
  bool reversed = false;
  bool known_g = false;
  std::string functional = "lognormal-mean";
  std::string design_name, design_file;
  std::size_t replications_override = 0;

  auto* fit = app.add_subcommand("fit", "maximum likelihood estimate");
  add_io_options(fit, opt, true);

  auto* km = app.add_subcommand("km", "Kaplan-Meier product-limit estimate");
  add_io_options(km, opt, false);
  km->add_flag("--reversed", reversed,
               "estimate the censoring distribution (roles reversed)");

  auto* plaus = app.add_subcommand("plaus", "plausibility contour on a grid");
  add_io_options(plaus, opt, true);
  add_mc_options(plaus, opt);
  plaus->add_option("--grid", grid1_text, "axis 1 spec lo:hi:count[:log|lin]");
  plaus->add_option("--grid2", grid2_text, "axis 2 spec (two-parameter models)");

  auto* region = app.add_subcommand("region", "plausibility region at level alpha");
  add_io_options(region, opt, true);
  add_mc_options(region, opt);
  region->add_option("--grid", grid1_text, "axis 1 spec lo:hi:count[:log|lin]");
  region->add_option("--grid2", grid2_text, "axis 2 spec");
  region->add_option("--alpha", opt.alpha, "plausibility level")
      ->check(CLI::Range(1e-9, 1.0 - 1e-9));

  auto* marginal = app.add_subcommand(
      "marginal", "consonant marginal plausibility of a functional");
  add_io_options(marginal, opt, false);
  add_mc_options(marginal, opt);
  marginal->add_option("--functional", functional,
                       "named functional (lognormal-mean)");
  marginal->add_option("--grid", grid1_text, "joint axis 1 spec");
  marginal->add_option("--grid2", grid2_text, "joint axis 2 spec");
  marginal->add_option("--psi-grid", psi_text, "functional axis spec");

  auto* simulate = app.add_subcommand("simulate", "validity/coverage study");
  simulate->add_option("--design", design_name, "built-in design name");
  simulate->add_option("--design-file", design_file, "JSON design file");
  simulate->add_option("--replications", replications_override,
                       "override the design's replication count");
  simulate->add_flag("--known-g", known_g,
                     "use the true censoring law instead of the plug-in");
  simulate->add_option("--output,-o", opt.output, "output path");
  simulate->add_option("--format,-f", opt.format, "json|csv")
      ->check(CLI::IsMember({"json", "csv"}));
  simulate->add_option("--M", opt.replicates, "Monte Carlo replicates")
      ->each([&](const std::string&) { opt.replicates_given = true; });
  simulate->add_option("--seed", opt.seed, "master seed")
      ->each([&](const std::string&) { opt.seed_given = true; });
  simulate->add_option("--workers", opt.workers, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    g1 = parse_grid_spec(grid1_text);
    g2 = parse_grid_spec(grid2_text);
    psi_spec = parse_grid_spec(psi_text);
    if (fit->parsed()) return run_fit(opt);
    if (km->parsed()) return run_km(opt, reversed);
    if (plaus->parsed()) return run_plaus(opt, g1, g2);
    if (region->parsed()) return run_region(opt, g1, g2);
    if (marginal->parsed()) return run_marginal(opt, g1, g2, psi_spec, functional);
    if (simulate->parsed()) {
      if (design_name.empty() && design_file.empty()) {
        std::cerr << "simulate: need --design or --design-file; presets:\n";
        for (const auto& n : preset_design_names()) std::cerr << "  " << n << "\n";
        return kExitUsage;
      }
      return run_simulate(opt, design_name, design_file, known_g,
                          replications_override);
    }
    return kExitUsage;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const csv_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const degenerate_data_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const degenerate_configuration_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const nonconvergence_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNonConvergence;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
