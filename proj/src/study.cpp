#include "hsmooth/study.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>
#include <tuple>

#include "hsmooth/diagnostics.hpp"
#include "hsmooth/error.hpp"
#include "hsmooth/io.hpp"
#include "hsmooth/synth.hpp"

namespace hsmooth {

namespace fs = std::filesystem;

std::string method_name(Method m) {
  switch (m) {
    case Method::Lasso: return "lasso";
    case Method::Horseshoe: return "horseshoe";
    case Method::Cauchy: return "cauchy";
    case Method::Pareto: return "pareto";
    case Method::NJ: return "nj";
    case Method::TPS: return "tps";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  for (Method m : kAllMethods) {
    if (method_name(m) == name) return m;
  }
  if (name == "laplace") return Method::Lasso;
  throw ConfigError("unknown method '" + name +
                    "' (expected lasso, horseshoe, cauchy, pareto, nj or tps)");
}

double relative_l1_success(const Eigen::VectorXd& gamma_hat,
                           const Eigen::VectorXd& gamma_true) {
  if (gamma_hat.size() != gamma_true.size()) {
    throw DimensionError("estimate and truth differ in length");
  }
  const double norm = gamma_true.lpNorm<1>();
  if (!(norm > 0.0)) {
    throw MetricError("relative L1 success is undefined for a zero truth");
  }
  return 1.0 - (gamma_hat - gamma_true).lpNorm<1>() / norm;
}

bool coverage_check(std::span<const double> draws, double truth, double level) {
  if (draws.size() < 100) {
    throw TooFewDrawsError("coverage needs at least 100 draws, have " +
                           std::to_string(draws.size()));
  }
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("level must lie in (0, 1)");
  const double tail = 0.5 * (1.0 - level);
  return quantile(draws, tail) <= truth && truth <= quantile(draws, 1.0 - tail);
}

StudyDesign StudyDesign::desk_scale() { return StudyDesign{}; }

StudyDesign StudyDesign::paper_scale() {
  StudyDesign d;
  d.replicates = 100;
  return d;
}

void StudyDesign::validate() const {
  if (noise_levels.empty() || magnitudes.empty() || methods.empty()) {
    throw ConfigError("study design needs noise levels, magnitudes and methods");
  }
  for (double t : noise_levels) {
    if (!(t > 0.0)) throw ConfigError("noise levels must be positive");
  }
  for (double m : magnitudes) {
    if (!(m >= 0.0)) throw ConfigError("magnitudes must be non-negative");
  }
  if (replicates < 1) throw ConfigError("replicates must be at least 1");
  if (nx < 2 || ny < 2) throw InvalidGridError("study grid must be at least 2 x 2");
  if (burn_in < 0 || burn_in >= n_iter) {
    throw ConfigError("burn_in must lie in [0, n_iter)");
  }
  if (n_iter - burn_in < 100) {
    throw ConfigError("need at least 100 post-burn-in iterations for coverage");
  }
  if (!(sigma2 > 0.0)) throw ConfigError("sigma2 must be positive");
}

std::uint64_t study_data_seed(const StudyDesign& d, std::size_t noise_index,
                              std::size_t magnitude_index, Index replicate) {
  return derive_seed(d.base_seed, {1, noise_index, magnitude_index,
                                   static_cast<std::uint64_t>(replicate)});
}

std::uint64_t study_chain_seed(const StudyDesign& d, std::size_t noise_index,
                               std::size_t magnitude_index, Method method,
                               Index replicate) {
  return derive_seed(d.base_seed, {2, noise_index, magnitude_index,
                                   static_cast<std::uint64_t>(method),
                                   static_cast<std::uint64_t>(replicate)});
}

namespace {

struct Job {
  std::size_t ti;
  std::size_t mi;
  Method method;
  Index replicate;
};

struct SharedModel {
  GridGraph grid;
  TpsKernel kernel;
  HybridModel model;
  RoughTemplate tmpl;
};

// Identifies the settings a cached replicate depends on.
std::uint64_t design_fingerprint(const StudyDesign& d, const Job& j) {
  return derive_seed(
      d.base_seed,
      {std::bit_cast<std::uint64_t>(d.noise_levels[j.ti]),
       std::bit_cast<std::uint64_t>(d.magnitudes[j.mi]),
       static_cast<std::uint64_t>(j.method), static_cast<std::uint64_t>(j.replicate),
       static_cast<std::uint64_t>(d.nx), static_cast<std::uint64_t>(d.ny),
       static_cast<std::uint64_t>(d.n_iter), static_cast<std::uint64_t>(d.burn_in),
       std::bit_cast<std::uint64_t>(d.sigma2), j.ti, j.mi});
}

std::string cache_path(const StudyDesign& d, const Job& j) {
  std::ostringstream name;
  name << method_name(j.method) << "_t" << j.ti << "_m" << j.mi << "_r"
       << j.replicate << "_" << std::hex << design_fingerprint(d, j) << ".txt";
  return (fs::path(d.cache_dir) / name.str()).string();
}

std::string opt_text(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string("NA");
}

void save_cached(const std::string& path, const ReplicateResult& r) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::trunc);
    f << "l1_success=" << opt_text(r.l1_success) << '\n'
      << "tau2_covered=" << r.tau2_covered << '\n'
      << "sigma2_covered=" << r.sigma2_covered << '\n'
      << "tau2_mean=" << format_double(r.tau2_mean) << '\n'
      << "sigma2_mean=" << format_double(r.sigma2_mean) << '\n'
      << "edf=" << format_double(r.edf) << '\n'
      << "lambda_modes=" << r.lambda_modes << '\n'
      << "seconds=" << format_double(r.seconds) << '\n'
      << "error=" << r.error << '\n';
    if (!f) return;
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
}

bool load_cached(const std::string& path, ReplicateResult& r) {
  std::ifstream f(path);
  if (!f) return false;
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(f, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  const char* keys[] = {"l1_success", "tau2_covered", "sigma2_covered", "tau2_mean",
                        "sigma2_mean", "edf", "lambda_modes", "seconds", "error"};
  for (const char* k : keys) {
    if (!kv.count(k)) return false;
  }
  r.l1_success = kv["l1_success"] == "NA"
                     ? std::nullopt
                     : std::optional<double>(std::strtod(kv["l1_success"].c_str(), nullptr));
  r.tau2_covered = kv["tau2_covered"] == "1";
  r.sigma2_covered = kv["sigma2_covered"] == "1";
  r.tau2_mean = std::strtod(kv["tau2_mean"].c_str(), nullptr);
  r.sigma2_mean = std::strtod(kv["sigma2_mean"].c_str(), nullptr);
  r.edf = std::strtod(kv["edf"].c_str(), nullptr);
  r.lambda_modes = std::strtol(kv["lambda_modes"].c_str(), nullptr, 10);
  r.seconds = std::strtod(kv["seconds"].c_str(), nullptr);
  r.error = kv["error"];
  return true;
}

ReplicateResult run_job(const StudyDesign& d, const SharedModel& shared,
                        const Job& j) {
  ReplicateResult r;
  r.tau2 = d.noise_levels[j.ti];
  r.magnitude = d.magnitudes[j.mi];
  r.method = j.method;
  r.replicate = j.replicate;
  r.data_seed = study_data_seed(d, j.ti, j.mi, j.replicate);
  r.chain_seed = study_chain_seed(d, j.ti, j.mi, j.method, j.replicate);

  const auto start = std::chrono::steady_clock::now();
  try {
    Rng data_rng(r.data_seed);
    const SyntheticData data =
        make_synthetic(shared.kernel, shared.tmpl, r.magnitude, r.tau2, data_rng,
                       1, d.sigma2);
    SamplerConfig cfg;
    cfg.n_iter = d.n_iter;
    cfg.burn_in = d.burn_in;
    cfg.seed = r.chain_seed;
    cfg.include_rough = j.method != Method::TPS;
    const ScalingPrior prior =
        make_prior(j.method == Method::TPS ? std::string("nj") : method_name(j.method));
    const Samples s =
        run_chain(Observations::single(data.z[0]), shared.model, prior, cfg);

    const auto& tau2 = s.trace("tau2");
    const auto& sigma2 = s.trace("sigma2");
    r.tau2_covered = coverage_check(tau2, r.tau2);
    r.sigma2_covered = coverage_check(sigma2, d.sigma2);
    r.tau2_mean = mean(tau2);
    r.sigma2_mean = mean(sigma2);
    r.edf = estimate_edf(s);
    if (cfg.include_rough) {
      try {
        r.l1_success = relative_l1_success(s.gamma.mean, data.gamma);
      } catch (const MetricError&) {
        r.l1_success.reset();
      }
      r.lambda_modes =
          static_cast<Index>(lambda_histogram_export(s).mode_locations.size());
    }
  } catch (const std::exception& e) {
    r.error = e.what();
    std::replace(r.error.begin(), r.error.end(), '\n', ' ');
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                  .count();
  return r;
}

}  // namespace

StudyResult run_factorial(const StudyDesign& design,
                          const std::function<void(const ReplicateResult&)>& on_done) {
  design.validate();
  std::vector<Job> jobs;
  for (std::size_t ti = 0; ti < design.noise_levels.size(); ++ti) {
    for (std::size_t mi = 0; mi < design.magnitudes.size(); ++mi) {
      for (Method m : design.methods) {
        for (Index r = 0; r < design.replicates; ++r) jobs.push_back({ti, mi, m, r});
      }
    }
  }

  SharedModel shared;
  shared.grid = build_grid(design.nx, design.ny);
  shared.kernel = build_tps_kernel(shared.grid, 1.0);
  shared.model = {orthogonalize(default_design(shared.grid), shared.kernel),
                  build_diff_matrix(shared.grid, 1),
                  AnchorSpec{}.resolve(shared.grid)};
  shared.tmpl = RoughTemplate::bundled().resample(design.nx, design.ny);

  if (!design.cache_dir.empty()) fs::create_directories(design.cache_dir);

  StudyResult result;
  result.replicates.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex done_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= jobs.size()) return;
      const Job& j = jobs[k];
      ReplicateResult r;
      bool cached = false;
      if (!design.cache_dir.empty()) {
        r.tau2 = design.noise_levels[j.ti];
        r.magnitude = design.magnitudes[j.mi];
        r.method = j.method;
        r.replicate = j.replicate;
        r.data_seed = study_data_seed(design, j.ti, j.mi, j.replicate);
        r.chain_seed = study_chain_seed(design, j.ti, j.mi, j.method, j.replicate);
        cached = load_cached(cache_path(design, j), r);
      }
      if (!cached) {
        r = run_job(design, shared, j);
        if (!design.cache_dir.empty()) save_cached(cache_path(design, j), r);
      }
      result.replicates[k] = r;
      if (on_done) {
        std::lock_guard<std::mutex> lock(done_mutex);
        on_done(r);
      }
    }
  };

  unsigned n_workers = design.workers ? design.workers : std::thread::hardware_concurrency();
  n_workers = std::max(1u, std::min<unsigned>(n_workers, static_cast<unsigned>(jobs.size())));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  result.cells = aggregate(result.replicates);
  return result;
}

std::vector<CellAggregate> aggregate(const std::vector<ReplicateResult>& reps) {
  using Key = std::tuple<double, double, int>;
  std::map<Key, std::vector<const ReplicateResult*>> groups;
  for (const auto& r : reps) {
    groups[{r.tau2, r.magnitude, static_cast<int>(r.method)}].push_back(&r);
  }
  std::vector<CellAggregate> out;
  for (const auto& [key, members] : groups) {
    CellAggregate c;
    c.tau2 = std::get<0>(key);
    c.magnitude = std::get<1>(key);
    c.method = static_cast<Method>(std::get<2>(key));
    c.replicates = static_cast<Index>(members.size());
    std::vector<double> l1;
    std::vector<double> edf;
    Index ok = 0;
    Index tau_hits = 0;
    Index sigma_hits = 0;
    for (const auto* r : members) {
      if (!r->error.empty()) {
        ++c.failures;
        continue;
      }
      ++ok;
      tau_hits += r->tau2_covered;
      sigma_hits += r->sigma2_covered;
      edf.push_back(r->edf);
      if (r->l1_success) l1.push_back(*r->l1_success);
    }
    // Sorted before reduction so that the result does not depend on the
    // replicate order.
    std::sort(l1.begin(), l1.end());
    std::sort(edf.begin(), edf.end());
    if (!l1.empty()) {
      c.median_l1 = quantile(l1, 0.5);
      c.mean_l1 = mean(l1);
    }
    if (ok > 0) {
      c.tau2_coverage = static_cast<double>(tau_hits) / static_cast<double>(ok);
      c.sigma2_coverage = static_cast<double>(sigma_hits) / static_cast<double>(ok);
      c.median_edf = quantile(edf, 0.5);
    }
    out.push_back(c);
  }
  return out;
}

void write_study_csv(const std::string& dir, const StudyResult& result,
                     const StudyDesign& design, bool include_timing) {
  fs::create_directories(dir);
  const Metadata meta{{"seed", std::to_string(design.base_seed)},
                      {"replicates", std::to_string(design.replicates)},
                      {"grid", std::to_string(design.nx) + "x" + std::to_string(design.ny)},
                      {"iters", std::to_string(design.n_iter)},
                      {"burnin", std::to_string(design.burn_in)}};

  std::vector<std::string> header{"tau2",         "magnitude",      "method",
                                  "replicate",    "data_seed",      "chain_seed",
                                  "l1_success",   "tau2_covered",   "sigma2_covered",
                                  "tau2_mean",    "sigma2_mean",    "edf",
                                  "lambda_modes", "error"};
  if (include_timing) header.push_back("seconds");
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : result.replicates) {
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::vector<std::string> row{format_double(r.tau2),
                                 format_double(r.magnitude),
                                 method_name(r.method),
                                 std::to_string(r.replicate),
                                 std::to_string(r.data_seed),
                                 std::to_string(r.chain_seed),
                                 opt_text(r.l1_success),
                                 std::to_string(r.tau2_covered),
                                 std::to_string(r.sigma2_covered),
                                 format_double(r.tau2_mean),
                                 format_double(r.sigma2_mean),
                                 format_double(r.edf),
                                 std::to_string(r.lambda_modes),
                                 err};
    if (include_timing) row.push_back(format_double(r.seconds));
    rows.push_back(std::move(row));
  }
  write_table_csv((fs::path(dir) / "tidy.csv").string(), header, rows, meta);

  rows.clear();
  for (const auto& c : result.cells) {
    rows.push_back({format_double(c.tau2), format_double(c.magnitude),
                    method_name(c.method), std::to_string(c.replicates),
                    std::to_string(c.failures), opt_text(c.median_l1),
                    opt_text(c.mean_l1), format_double(c.tau2_coverage),
                    format_double(c.sigma2_coverage), format_double(c.median_edf)});
  }
  write_table_csv((fs::path(dir) / "aggregate.csv").string(),
                  {"tau2", "magnitude", "method", "replicates", "failures",
                   "median_l1", "mean_l1", "tau2_coverage", "sigma2_coverage",
                   "median_edf"},
                  rows, meta);
}

LambdaHistogram lambda_histogram_export(const Samples& samples) {
  LambdaHistogram h;
  for (const auto& snap : samples.lambda2_snapshots) {
    for (Index k = 0; k < snap.size(); ++k) {
      h.lambda2.push_back(snap[k]);
      h.neg_log10.push_back(-std::log10(snap[k]));
      h.inverse.push_back(1.0 / snap[k]);
    }
  }
  if (!h.neg_log10.empty()) h.mode_locations = kde_modes(h.neg_log10);
  return h;
}

std::vector<double> kde_modes(std::span<const double> x, double min_separation) {
  if (x.empty()) return {};
  std::vector<double> s(x.begin(), x.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  const double sd = stddev(s);
  const double iqr = quantile(s, 0.75) - quantile(s, 0.25);
  double spread = std::min(sd, iqr / 1.34);
  if (!(spread > 0.0)) spread = sd;
  if (!(spread > 0.0) || s.size() < 2) return {s.front()};
  const double h = 0.9 * spread * std::pow(n, -0.2);

  constexpr int G = 512;
  const double lo = s.front() - 3.0 * h;
  const double hi = s.back() + 3.0 * h;
  const double dx = (hi - lo) / (G - 1);
  std::vector<double> w(G, 0.0);
  for (double v : s) {
    const double pos = (v - lo) / dx;
    const int k = std::clamp(static_cast<int>(std::floor(pos)), 0, G - 2);
    const double frac = pos - k;
    w[k] += 1.0 - frac;
    w[k + 1] += frac;
  }
  const int reach = static_cast<int>(std::ceil(5.0 * h / dx));
  std::vector<double> kern(reach + 1);
  for (int d = 0; d <= reach; ++d) {
    const double u = d * dx / h;
    kern[d] = std::exp(-0.5 * u * u);
  }
  std::vector<double> f(G, 0.0);
  for (int g = 0; g < G; ++g) {
    if (w[g] == 0.0) continue;
    for (int k = std::max(0, g - reach); k <= std::min(G - 1, g + reach); ++k) {
      f[k] += w[g] * kern[std::abs(k - g)];
    }
  }

  const double fmax = *std::max_element(f.begin(), f.end());
  std::vector<std::pair<double, double>> peaks;  // (location, height)
  for (int g = 0; g < G; ++g) {
    const double left = g > 0 ? f[g - 1] : -1.0;
    const double right = g + 1 < G ? f[g + 1] : -1.0;
    if (f[g] > left && f[g] >= right && f[g] >= 0.01 * fmax) {
      peaks.emplace_back(lo + g * dx, f[g]);
    }
  }
  std::vector<std::pair<double, double>> merged;
  for (const auto& p : peaks) {
    if (!merged.empty() && p.first - merged.back().first < min_separation) {
      if (p.second > merged.back().second) merged.back() = p;
      continue;
    }
    merged.push_back(p);
  }
  std::vector<double> out;
  for (const auto& p : merged) out.push_back(p.first);
  return out;
}

}  // namespace hsmooth
