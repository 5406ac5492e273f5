#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hsmooth/grid.hpp"
#include "hsmooth/sampler.hpp"

namespace hsmooth {

enum class Method { Lasso, Horseshoe, Cauchy, Pareto, NJ, TPS };

inline constexpr std::array<Method, 6> kAllMethods{
    Method::Lasso, Method::Horseshoe, Method::Cauchy,
    Method::Pareto, Method::NJ, Method::TPS};

/// "lasso", "horseshoe", "cauchy", "pareto", "nj" or "tps".
std::string method_name(Method m);
/// Inverse of method_name; throws ConfigError for unknown names.
Method parse_method(const std::string& name);

/// 1 - ||gamma_hat - gamma||_1 / ||gamma||_1. Throws MetricError when the
/// truth is identically zero.
double relative_l1_success(const Eigen::VectorXd& gamma_hat,
                           const Eigen::VectorXd& gamma_true);

/// truth within the central `level` interval of the draws (type-7
/// quantiles). Needs at least 100 draws.
bool coverage_check(std::span<const double> draws, double truth,
                    double level = 0.95);

struct StudyDesign {
  std::vector<double> noise_levels{0.001, 0.01, 0.1};  // tau2
  std::vector<double> magnitudes{0.5, 1.0, 2.0, 4.0};
  std::vector<Method> methods{kAllMethods.begin(), kAllMethods.end()};
  Index replicates = 10;
  std::uint64_t base_seed = 1;
  Index nx = 20;
  Index ny = 20;
  Index n_iter = 3000;
  Index burn_in = 1000;
  double sigma2 = 0.5;
  unsigned workers = 0;    // 0: one per hardware thread
  std::string cache_dir;   // empty: no caching

  /// 10 replicates, 20 x 20 grid, 3000 iterations, 1000 burn-in.
  static StudyDesign desk_scale();
  /// 100 replicates, otherwise as desk_scale.
  static StudyDesign paper_scale();
  void validate() const;
};

struct ReplicateResult {
  double tau2 = 0.0;
  double magnitude = 0.0;
  Method method = Method::NJ;
  Index replicate = 0;
  std::uint64_t data_seed = 0;
  std::uint64_t chain_seed = 0;
  std::optional<double> l1_success;  // absent for TPS or on failure
  bool tau2_covered = false;
  bool sigma2_covered = false;
  double tau2_mean = 0.0;
  double sigma2_mean = 0.0;
  double edf = 0.0;
  Index lambda_modes = 0;  // 0 when no lambda^2 was sampled
  double seconds = 0.0;    // wall time, not part of the deterministic output
  std::string error;       // empty on success
};

struct CellAggregate {
  double tau2 = 0.0;
  double magnitude = 0.0;
  Method method = Method::NJ;
  Index replicates = 0;
  Index failures = 0;
  std::optional<double> median_l1;
  std::optional<double> mean_l1;
  double tau2_coverage = 0.0;    // fraction of successful replicates
  double sigma2_coverage = 0.0;
  double median_edf = 0.0;
};

struct StudyResult {
  std::vector<ReplicateResult> replicates;  // cell-major, then replicate
  std::vector<CellAggregate> cells;
};

/// Seeds: the data of (noise, magnitude, replicate) are shared by every
/// method; each chain has its own stream.
std::uint64_t study_data_seed(const StudyDesign& d, std::size_t noise_index,
                              std::size_t magnitude_index, Index replicate);
std::uint64_t study_chain_seed(const StudyDesign& d, std::size_t noise_index,
                               std::size_t magnitude_index, Method method,
                               Index replicate);

/// Runs every cell x replicate (skipping those found in the cache) on a
/// worker pool. Per-replicate failures are recorded, not thrown. The
/// optional callback is invoked after each finished job.
StudyResult run_factorial(
    const StudyDesign& design,
    const std::function<void(const ReplicateResult&)>& on_done = {});

/// Per-cell summaries, ordered by (noise, magnitude, method) independently
/// of the replicate order.
std::vector<CellAggregate> aggregate(const std::vector<ReplicateResult>& reps);

/// tidy.csv (one row per cell x replicate) and aggregate.csv in `dir`.
/// Wall times are written only when include_timing is set.
void write_study_csv(const std::string& dir, const StudyResult& result,
                     const StudyDesign& design, bool include_timing = false);

struct LambdaHistogram {
  std::vector<double> lambda2;      // pooled stored draws
  std::vector<double> neg_log10;    // -log10(lambda^2)
  std::vector<double> inverse;      // 1 / lambda^2
  std::vector<double> mode_locations;  // in -log10 units
};

/// Pools the stored lambda^2 snapshots and counts modes of -log10(lambda^2).
/// Empty when the chain has no lambda^2.
LambdaHistogram lambda_histogram_export(const Samples& samples);

/// Modes of a Gaussian kernel density estimate (Silverman bandwidth, 512-bin
/// linear binning). Local maxima below 1% of the highest one are dropped and
/// maxima closer than min_separation are merged into the higher one.
std::vector<double> kde_modes(std::span<const double> x,
                              double min_separation = 1.0);

}  // namespace hsmooth
