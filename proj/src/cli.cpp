#include "hsmooth/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "hsmooth/error.hpp"
#include "hsmooth/io.hpp"
#include "hsmooth/priors.hpp"
#include "hsmooth/sampler.hpp"
#include "hsmooth/study.hpp"
#include "hsmooth/synth.hpp"

namespace hsmooth {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

const std::vector<std::string> kSubcommands{"fit", "simulate", "study", "threshold"};

std::string grid_text(Index nx, Index ny) {
  return std::to_string(nx) + "x" + std::to_string(ny);
}

void parse_grid(const std::string& text, Index& nx, Index& ny) {
  const auto x = text.find_first_of("xX");
  try {
    if (x == std::string::npos) throw std::invalid_argument(text);
    std::size_t used = 0;
    const std::string w = text.substr(0, x);
    const std::string h = text.substr(x + 1);
    nx = std::stoll(w, &used);
    if (used != w.size()) throw std::invalid_argument(text);
    ny = std::stoll(h, &used);
    if (used != h.size()) throw std::invalid_argument(text);
  } catch (const std::exception&) {
    throw ConfigError("--grid expects WxH, got '" + text + "'");
  }
}

ScalingPrior prior_for(const std::string& name) {
  return make_prior(name == "tps" ? std::string("nj") : name);
}

Metadata run_metadata(const RunConfig& cfg) {
  return {{"subcommand", cfg.subcommand}, {"seed", std::to_string(cfg.seed)},
          {"prior", cfg.prior}};
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
  return (fs::path(cfg.out_dir) / name).string();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ConfigError("cannot write " + path);
  f << text;
}

int run_fit(const RunConfig& cfg) {
  const GridData data = ingest_grid(cfg.inputs.front());
  const GridGraph grid = build_grid(data.nx, data.ny);
  const HybridModel model = HybridModel::build(grid, cfg.order);
  const Observations obs = cfg.ensemble ? Observations::ensemble(data.members)
                                        : Observations::single(data.members.front());

  SamplerConfig sc;
  sc.n_iter = cfg.n_iter;
  sc.burn_in = cfg.burn_in;
  sc.thin = cfg.thin;
  sc.partial_update_period = cfg.partial_update_period;
  sc.seed = cfg.seed;
  sc.include_rough = cfg.prior != "tps";
  const Samples s = run_chain(obs, model, prior_for(cfg.prior), sc);

  Metadata meta = run_metadata(cfg);
  meta.emplace_back("members", std::to_string(obs.members()));

  std::vector<std::string> header{"iteration"};
  header.insert(header.end(), s.trace_names.begin(), s.trace_names.end());
  std::vector<std::vector<std::string>> rows;
  for (Index k = 0; k < s.stored(); ++k) {
    std::vector<std::string> row{std::to_string(s.iterations[k])};
    for (const auto& col : s.traces) row.push_back(format_double(col[k]));
    rows.push_back(std::move(row));
  }
  write_table_csv(out_path(cfg, "chain.csv"), header, rows, meta);

  rows.clear();
  for (const auto& p : s.summaries()) {
    rows.push_back({p.name, format_double(p.mean), format_double(p.sd),
                    format_double(p.q025), format_double(p.q975),
                    format_double(p.ess)});
  }
  write_table_csv(out_path(cfg, "summary.csv"),
                  {"parameter", "mean", "sd", "q025", "q975", "ess"}, rows, meta);

  write_grid_csv(out_path(cfg, "mu_mean.csv"), grid.nx, grid.ny, {s.mu.mean}, meta);
  write_grid_csv(out_path(cfg, "mu_sd.csv"), grid.nx, grid.ny, {s.mu.sd()}, meta);
  write_grid_csv(out_path(cfg, "gamma_mean.csv"), grid.nx, grid.ny, {s.gamma.mean},
                 meta);
  write_grid_csv(out_path(cfg, "gamma_sd.csv"), grid.nx, grid.ny, {s.gamma.sd()}, meta);
  write_grid_csv(out_path(cfg, "smooth_mean.csv"), grid.nx, grid.ny,
                 {s.smooth.mean}, meta);

  const LambdaHistogram hist = lambda_histogram_export(s);
  rows.clear();
  const std::size_t m = static_cast<std::size_t>(model.diff.rows());
  for (std::size_t k = 0; k < hist.lambda2.size(); ++k) {
    rows.push_back({std::to_string(k / m), std::to_string(k % m),
                    format_double(hist.lambda2[k]), format_double(hist.neg_log10[k]),
                    format_double(hist.inverse[k])});
  }
  write_table_csv(out_path(cfg, "lambda_hist.csv"),
                  {"snapshot", "edge", "lambda2", "neg_log10_lambda2", "inverse_lambda2"},
                  rows, meta);

  std::string modes;
  for (std::size_t k = 0; k < hist.mode_locations.size(); ++k) {
    modes += (k ? ";" : "") + format_double(hist.mode_locations[k]);
  }
  const double edf = estimate_edf(s);
  write_table_csv(out_path(cfg, "metrics.csv"), {"metric", "value"},
                  {{"edf", format_double(edf)},
                   {"members", std::to_string(obs.members())},
                   {"stored_draws", std::to_string(s.stored())},
                   {"gamma_draws", std::to_string(s.gamma_draws)},
                   {"ystar_draws", std::to_string(s.ystar_draws)},
                   {"lambda_modes", std::to_string(hist.mode_locations.size())},
                   {"lambda_mode_locations", modes}},
                  meta);
  Json summary{{"subcommand", "fit"}, {"out", cfg.out_dir}, {"edf", edf},
               {"stored_draws", s.stored()}};
  std::cout << summary.dump() << '\n';
  return 0;
}

int run_simulate(const RunConfig& cfg) {
  const GridGraph grid = build_grid(cfg.nx, cfg.ny);
  const TpsKernel kernel = build_tps_kernel(grid, 1.0);
  const RoughTemplate tmpl = RoughTemplate::bundled().resample(cfg.nx, cfg.ny);
  const Index members = cfg.ensemble && cfg.members == 1 ? 30 : cfg.members;

  Rng rng(derive_seed(cfg.seed, {1}));
  const SyntheticData data = make_synthetic(kernel, tmpl, cfg.magnitude, cfg.tau2, rng,
                                            members, cfg.sigma2);
  Metadata meta = run_metadata(cfg);
  const bool canonical = is_canonical_level(cfg.magnitude, cfg.tau2);
  meta.emplace_back("magnitude", format_double(cfg.magnitude));
  meta.emplace_back("tau2", format_double(cfg.tau2));
  meta.emplace_back("canonical", canonical ? "true" : "false");
  if (!canonical) {
    std::cerr << "note: magnitude/tau2 are not levels of the study design\n";
  }

  std::vector<long> ids;
  for (Index i = 0; i < members; ++i) ids.push_back(static_cast<long>(i + 1));
  write_grid_csv(out_path(cfg, "synthetic.csv"), grid.nx, grid.ny, data.z, meta,
                 members > 1 ? ids : std::vector<long>{});
  write_grid_csv(out_path(cfg, "truth_gamma.csv"), grid.nx, grid.ny, {data.gamma}, meta);
  write_grid_csv(out_path(cfg, "gp.csv"), grid.nx, grid.ny, {data.y}, meta);

  Json summary{{"subcommand", "simulate"}, {"out", cfg.out_dir}, {"members", members}};
  if (cfg.prior != "tps") {
    Rng ngp_rng(derive_seed(cfg.seed, {2}));
    const Eigen::VectorXd field =
        simulate_ngp_field(grid, simulation_prior(cfg.prior), ngp_rng);
    const double ratio = step_structure_ratio(grid, field);
    Metadata ngp_meta = meta;
    ngp_meta.emplace_back("step_ratio", format_double(ratio));
    write_grid_csv(out_path(cfg, "ngp.csv"), grid.nx, grid.ny, {field}, ngp_meta);
    summary["step_ratio"] = ratio;
  }
  std::cout << summary.dump() << '\n';
  return 0;
}

int run_study(const RunConfig& cfg) {
  StudyDesign d = cfg.paper_scale ? StudyDesign::paper_scale() : StudyDesign::desk_scale();
  d.replicates = cfg.replicates;
  d.nx = cfg.nx;
  d.ny = cfg.ny;
  d.n_iter = cfg.n_iter;
  d.burn_in = cfg.burn_in;
  d.base_seed = cfg.seed;
  d.workers = cfg.workers;
  d.noise_levels = cfg.noise_levels;
  d.magnitudes = cfg.magnitudes;
  d.methods.clear();
  for (const auto& m : cfg.methods) d.methods.push_back(parse_method(m));
  d.cache_dir = cfg.cache_dir;
  d.sigma2 = cfg.sigma2;

  std::size_t done = 0;
  const std::size_t total = d.noise_levels.size() * d.magnitudes.size() *
                            d.methods.size() * static_cast<std::size_t>(d.replicates);
  const StudyResult result = run_factorial(d, [&](const ReplicateResult& r) {
    ++done;
    std::cerr << "[" << done << "/" << total << "] tau2=" << r.tau2
              << " magnitude=" << r.magnitude << " " << method_name(r.method)
              << " rep " << r.replicate << (r.error.empty() ? "" : " FAILED") << '\n';
  });
  write_study_csv(cfg.out_dir, result, d, cfg.timing);
  Json summary{{"subcommand", "study"}, {"out", cfg.out_dir},
               {"cells", result.cells.size()}, {"runs", result.replicates.size()}};
  std::cout << summary.dump() << '\n';
  return 0;
}

int run_threshold(const RunConfig& cfg) {
  const ScalingPrior prior = make_prior(cfg.prior);
  std::vector<double> theta;
  const Index n = cfg.theta_points;
  for (Index i = 0; i < n; ++i) {
    theta.push_back(n == 1 ? cfg.theta_min
                           : cfg.theta_min + (cfg.theta_max - cfg.theta_min) *
                                                 static_cast<double>(i) /
                                                 static_cast<double>(n - 1));
  }
  const auto curve = thresholding_curve(prior, theta, cfg.noise_scale);
  std::vector<std::vector<std::string>> rows;
  for (const auto& p : curve) {
    rows.push_back({format_double(p.theta_star), format_double(p.posterior_mean),
                    format_double(p.posterior_mean - p.theta_star)});
  }
  Metadata meta = run_metadata(cfg);
  meta.emplace_back("noise_scale", format_double(cfg.noise_scale));
  write_table_csv(out_path(cfg, "threshold.csv"),
                  {"theta_star", "posterior_mean", "shift"}, rows, meta);
  Json summary{{"subcommand", "threshold"}, {"out", cfg.out_dir}, {"points", n}};
  std::cout << summary.dump() << '\n';
  return 0;
}

// Copies one explicitly given flag from the parsed values onto the config.
struct Binding {
  CLI::Option* option;
  std::function<void(RunConfig&, const RunConfig&)> copy;
};

}  // namespace

void RunConfig::validate() const {
  if (schema_version != 1) {
    throw ConfigError("unsupported schema_version " + std::to_string(schema_version));
  }
  if (std::find(kSubcommands.begin(), kSubcommands.end(), subcommand) ==
      kSubcommands.end()) {
    throw ConfigError("unknown subcommand '" + subcommand + "'");
  }
  if (out_dir.empty()) throw ConfigError("output directory must not be empty");
  if (prior != "tps") {
    (void)make_prior(prior);
  } else if (subcommand == "threshold") {
    throw ConfigError("threshold needs one of the five scaling priors, not tps");
  }
  if (nx < 2 || ny < 2) throw InvalidGridError("grid must be at least 2x2");
  if (order < 1 || order > 3) throw InvalidOrderError("order must be 1, 2 or 3");
  if (subcommand == "fit" || subcommand == "study") {
    if (n_iter < 1 || burn_in < 0 || burn_in >= n_iter) {
      throw ConfigError("need 0 <= burnin < iters");
    }
    if (thin < 1 || partial_update_period < 1) {
      throw ConfigError("thin and period must be at least 1");
    }
  }
  if (subcommand == "fit") {
    if (inputs.empty()) throw ConfigError("fit needs an input CSV");
    for (const auto& p : inputs) {
      if (!fs::exists(p)) throw IngestError("input file not found: " + p);
    }
  }
  if (subcommand == "simulate") {
    if (!(tau2 >= 0.0) || !(sigma2 >= 0.0) || !(magnitude >= 0.0)) {
      throw ConfigError("magnitude, tau2 and sigma2 must be non-negative");
    }
    if (members < 1) throw ConfigError("members must be at least 1");
  }
  if (subcommand == "study") {
    if (replicates < 1) throw ConfigError("replicates must be at least 1");
    for (const auto& m : methods) (void)parse_method(m);
  }
  if (subcommand == "threshold") {
    if (theta_points < 1) throw ConfigError("points must be at least 1");
    if (!(theta_max >= theta_min)) throw ConfigError("theta-max must be >= theta-min");
    if (!(noise_scale > 0.0)) throw ConfigError("noise-scale must be positive");
  }
}

std::string RunConfig::to_json() const {
  Json j;
  j["schema_version"] = schema_version;
  j["subcommand"] = subcommand;
  j["inputs"] = inputs;
  j["out_dir"] = out_dir;
  j["prior"] = prior;
  j["iters"] = n_iter;
  j["burnin"] = burn_in;
  j["thin"] = thin;
  j["period"] = partial_update_period;
  j["order"] = order;
  j["seed"] = seed;
  j["grid"] = grid_text(nx, ny);
  j["ensemble"] = ensemble;
  j["magnitude"] = magnitude;
  j["tau2"] = tau2;
  j["sigma2"] = sigma2;
  j["members"] = members;
  j["desk_scale"] = desk_scale;
  j["paper_scale"] = paper_scale;
  j["replicates"] = replicates;
  j["workers"] = workers;
  j["noise_levels"] = noise_levels;
  j["magnitudes"] = magnitudes;
  j["methods"] = methods;
  j["cache_dir"] = cache_dir;
  j["timing"] = timing;
  j["theta_min"] = theta_min;
  j["theta_max"] = theta_max;
  j["theta_points"] = theta_points;
  j["noise_scale"] = noise_scale;
  return j.dump(2) + "\n";
}

RunConfig RunConfig::from_json(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig c;
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& k = it.key();
      const Json& v = it.value();
      if (k == "schema_version") {
        c.schema_version = v.get<int>();
        if (c.schema_version != 1) {
          throw ConfigError("unsupported schema_version " +
                            std::to_string(c.schema_version));
        }
      }
      else if (k == "subcommand") c.subcommand = v.get<std::string>();
      else if (k == "inputs") c.inputs = v.get<std::vector<std::string>>();
      else if (k == "out_dir") c.out_dir = v.get<std::string>();
      else if (k == "prior") c.prior = v.get<std::string>();
      else if (k == "iters") c.n_iter = v.get<Index>();
      else if (k == "burnin") c.burn_in = v.get<Index>();
      else if (k == "thin") c.thin = v.get<Index>();
      else if (k == "period") c.partial_update_period = v.get<Index>();
      else if (k == "order") c.order = v.get<int>();
      else if (k == "seed") c.seed = v.get<std::uint64_t>();
      else if (k == "grid") parse_grid(v.get<std::string>(), c.nx, c.ny);
      else if (k == "ensemble") c.ensemble = v.get<bool>();
      else if (k == "magnitude") c.magnitude = v.get<double>();
      else if (k == "tau2") c.tau2 = v.get<double>();
      else if (k == "sigma2") c.sigma2 = v.get<double>();
      else if (k == "members") c.members = v.get<Index>();
      else if (k == "desk_scale") c.desk_scale = v.get<bool>();
      else if (k == "paper_scale") c.paper_scale = v.get<bool>();
      else if (k == "replicates") c.replicates = v.get<Index>();
      else if (k == "workers") c.workers = v.get<unsigned>();
      else if (k == "noise_levels") c.noise_levels = v.get<std::vector<double>>();
      else if (k == "magnitudes") c.magnitudes = v.get<std::vector<double>>();
      else if (k == "methods") c.methods = v.get<std::vector<std::string>>();
      else if (k == "cache_dir") c.cache_dir = v.get<std::string>();
      else if (k == "timing") c.timing = v.get<bool>();
      else if (k == "theta_min") c.theta_min = v.get<double>();
      else if (k == "theta_max") c.theta_max = v.get<double>();
      else if (k == "theta_points") c.theta_points = v.get<Index>();
      else if (k == "noise_scale") c.noise_scale = v.get<double>();
      else throw ConfigError("unknown config key '" + k + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config has a value of the wrong type: ") + e.what());
  }
  return c;
}

RunConfig parse_command_line(int argc, const char* const* argv, bool& help,
                             std::string& help_text) {
  help = false;
  CLI::App app{"Hybrid smooth-plus-rough surface smoothing"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  RunConfig parsed;
  std::string config_path;
  std::string grid = grid_text(parsed.nx, parsed.ny);
  std::vector<Binding> bindings;

  auto bind = [&](CLI::Option* o, std::function<void(RunConfig&, const RunConfig&)> f) {
    bindings.push_back({o, std::move(f)});
    return o;
  };
#define HSMOOTH_COPY(field) [](RunConfig& d, const RunConfig& s) { d.field = s.field; }

  std::map<std::string, CLI::App*> subs;
  subs["fit"] = app.add_subcommand("fit", "Fit the hybrid model to a grid CSV");
  subs["simulate"] = app.add_subcommand("simulate", "Simulate rough, smooth and synthetic fields");
  subs["study"] = app.add_subcommand("study", "Run the factorial simulation study");
  subs["threshold"] = app.add_subcommand("threshold", "Write thresholding curves of a prior");

  for (auto& [name, sub] : subs) {
    sub->add_option("--config", config_path, "JSON config; flags override it");
    bind(sub->add_option("--out", parsed.out_dir, "Output directory"), HSMOOTH_COPY(out_dir));
    bind(sub->add_option("--seed", parsed.seed, "Random seed"), HSMOOTH_COPY(seed));
    if (name != "study") {
      bind(sub->add_option("--prior", parsed.prior,
                           "lasso, horseshoe, cauchy, pareto, nj or tps"),
           HSMOOTH_COPY(prior));
    }
    if (name == "fit" || name == "study") {
      bind(sub->add_option("--iters", parsed.n_iter, "MCMC iterations"), HSMOOTH_COPY(n_iter));
      bind(sub->add_option("--burnin", parsed.burn_in, "Burn-in iterations"),
           HSMOOTH_COPY(burn_in));
    }
    if (name == "simulate" || name == "study") {
      bind(sub->add_option("--grid", grid, "Grid size WxH"),
           [&grid](RunConfig& d, const RunConfig&) { parse_grid(grid, d.nx, d.ny); });
      bind(sub->add_option("--sigma2", parsed.sigma2, "Smooth-field variance"),
           HSMOOTH_COPY(sigma2));
    }
    if (name == "fit" || name == "simulate") {
      bind(sub->add_flag("--ensemble", parsed.ensemble,
                         name == "fit" ? "Use every ensemble member"
                                       : "Write a 30-member ensemble"),
           HSMOOTH_COPY(ensemble));
    }
  }

  auto* fit = subs["fit"];
  bind(fit->add_option("input,--input", parsed.inputs, "Grid CSV (row,col[,member],value)"),
       HSMOOTH_COPY(inputs));
  bind(fit->add_option("--thin", parsed.thin, "Keep every k-th draw"), HSMOOTH_COPY(thin));
  bind(fit->add_option("--period", parsed.partial_update_period,
                       "Draw y* and gamma every k-th iteration"),
       HSMOOTH_COPY(partial_update_period));
  bind(fit->add_option("--order", parsed.order, "Differencing order 1-3"), HSMOOTH_COPY(order));

  auto* sim = subs["simulate"];
  bind(sim->add_option("--magnitude", parsed.magnitude, "Rough template magnitude"),
       HSMOOTH_COPY(magnitude));
  bind(sim->add_option("--tau2", parsed.tau2, "Noise variance"), HSMOOTH_COPY(tau2));
  bind(sim->add_option("--members", parsed.members, "Number of realizations"),
       HSMOOTH_COPY(members));

  auto* study = subs["study"];
  auto* desk = bind(study->add_flag("--desk-scale", parsed.desk_scale,
                                    "10 replicates, 20x20, 3000 iterations"),
                    HSMOOTH_COPY(desk_scale));
  auto* paper = bind(study->add_flag("--paper-scale", parsed.paper_scale, "100 replicates"),
                     HSMOOTH_COPY(paper_scale));
  bind(study->add_option("--replicates", parsed.replicates, "Replicates per cell"),
       HSMOOTH_COPY(replicates));
  bind(study->add_option("--workers", parsed.workers, "Worker threads (0: all cores)"),
       HSMOOTH_COPY(workers));
  bind(study->add_option("--noise", parsed.noise_levels, "tau2 levels")->delimiter(','),
       HSMOOTH_COPY(noise_levels));
  bind(study->add_option("--magnitudes", parsed.magnitudes, "Template magnitudes")
           ->delimiter(','),
       HSMOOTH_COPY(magnitudes));
  bind(study->add_option("--methods", parsed.methods, "Methods to compare")->delimiter(','),
       HSMOOTH_COPY(methods));
  bind(study->add_option("--cache", parsed.cache_dir, "Cache directory for resuming"),
       HSMOOTH_COPY(cache_dir));
  bind(study->add_flag("--timing", parsed.timing, "Add wall times to tidy.csv"),
       HSMOOTH_COPY(timing));
  desk->excludes(paper);

  auto* thr = subs["threshold"];
  bind(thr->add_option("--theta-min", parsed.theta_min, "Smallest theta*"),
       HSMOOTH_COPY(theta_min));
  bind(thr->add_option("--theta-max", parsed.theta_max, "Largest theta*"),
       HSMOOTH_COPY(theta_max));
  bind(thr->add_option("--points", parsed.theta_points, "Number of theta* values"),
       HSMOOTH_COPY(theta_points));
  bind(thr->add_option("--noise-scale", parsed.noise_scale, "Noise standard deviation s"),
       HSMOOTH_COPY(noise_scale));
#undef HSMOOTH_COPY

  std::vector<std::string> args;
  for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    help = true;
    help_text = app.help();
    return parsed;
  } catch (const CLI::CallForAllHelp&) {
    help = true;
    help_text = app.help("", CLI::AppFormatMode::All);
    return parsed;
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }
  for (auto& [name, sub] : subs) {
    if (sub->parsed() && sub->get_help_ptr()->count() > 0) {
      help = true;
      help_text = sub->help();
      return parsed;
    }
  }

  std::string sub_name;
  for (auto& [name, sub] : subs) {
    if (sub->parsed()) sub_name = name;
  }

  RunConfig cfg;
  if (!config_path.empty()) {
    std::ifstream f(config_path);
    if (!f) throw ConfigError("cannot read config " + config_path);
    std::stringstream ss;
    ss << f.rdbuf();
    cfg = RunConfig::from_json(ss.str());
    if (!cfg.subcommand.empty() && cfg.subcommand != sub_name) {
      throw ConfigError("config is for '" + cfg.subcommand + "', not '" + sub_name + "'");
    }
  }
  cfg.subcommand = sub_name;

  // Scale presets first, then every explicitly given flag.
  for (const auto& b : bindings) {
    if ((b.option == desk || b.option == paper) && b.option->count() > 0) b.copy(cfg, parsed);
  }
  if (sub_name == "study" && (cfg.desk_scale || cfg.paper_scale)) {
    const StudyDesign d = cfg.paper_scale ? StudyDesign::paper_scale()
                                          : StudyDesign::desk_scale();
    cfg.replicates = d.replicates;
    cfg.nx = d.nx;
    cfg.ny = d.ny;
    cfg.n_iter = d.n_iter;
    cfg.burn_in = d.burn_in;
  }
  for (const auto& b : bindings) {
    if (b.option->count() > 0 && b.option != desk && b.option != paper) b.copy(cfg, parsed);
  }
  return cfg;
}

int dispatch(const RunConfig& cfg) {
  cfg.validate();
  fs::create_directories(cfg.out_dir);
  write_text(out_path(cfg, "config.json"), cfg.to_json());
  if (cfg.subcommand == "fit") return run_fit(cfg);
  if (cfg.subcommand == "simulate") return run_simulate(cfg);
  if (cfg.subcommand == "study") return run_study(cfg);
  return run_threshold(cfg);
}

int cli_main(int argc, const char* const* argv) {
  auto report = [](const std::string& code, const std::string& message) {
    const Json j{{"error", {{"code", code}, {"message", message}}}};
    std::cerr << j.dump() << '\n';
  };
  try {
    bool help = false;
    std::string help_text;
    const RunConfig cfg = parse_command_line(argc, argv, help, help_text);
    if (help) {
      std::cout << help_text;
      return 0;
    }
    return dispatch(cfg);
  } catch (const ConfigError& e) {
    report(e.code(), e.what());
    return 2;
  } catch (const Error& e) {
    report(e.code(), e.what());
    return 1;
  } catch (const std::exception& e) {
    report("internal", e.what());
    return 1;
  }
}

}  // namespace hsmooth
