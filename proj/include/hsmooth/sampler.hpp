#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hsmooth/diagnostics.hpp"
#include "hsmooth/distributions.hpp"
#include "hsmooth/grid.hpp"
#include "hsmooth/model.hpp"
#include "hsmooth/priors.hpp"

namespace hsmooth {

/// One or more realizations z_1..z_m of the same surface (m = 1: single
/// field; m > 1: ensemble sharing beta*, y*, gamma).
class Observations {
 public:
  static Observations single(Eigen::VectorXd z);
  static Observations ensemble(std::vector<Eigen::VectorXd> members);

  Index members() const { return static_cast<Index>(members_.size()); }
  Index n() const { return sum_.size(); }
  const Eigen::VectorXd& member(Index i) const { return members_[i]; }
  const Eigen::VectorXd& sum() const { return sum_; }
  const Eigen::VectorXd& mean() const { return mean_; }
  /// sum_i ||z_i - mean||^2.
  double within_ss() const { return within_ss_; }

 private:
  std::vector<Eigen::VectorXd> members_;
  Eigen::VectorXd sum_;
  Eigen::VectorXd mean_;
  double within_ss_ = 0.0;
};

struct Hyperpriors {
  double alpha_tau2 = 0.001;
  double beta_tau2 = 0.001;
  double alpha_sigma2 = 0.001;
  double beta_sigma2 = 0.001;
};

/// Lower bound on lambda^2 during the first iterations of burn-in:
/// floor(t) = floor_start * decay^t for t < end_iteration, where decay is
/// chosen so that floor(end_iteration) = delta_floor. No floor afterwards.
struct AdaptiveFloor {
  bool enabled = true;
  double floor_start = 1.0;
  std::optional<Index> end_iteration;  // default burn_in / 2

  Index end(Index burn_in) const { return end_iteration.value_or(burn_in / 2); }
  std::optional<double> at(Index t, Index burn_in, double delta_floor) const;
};

struct SamplerConfig {
  Index n_iter = 3000;
  Index burn_in = 1000;
  Index thin = 1;
  Index partial_update_period = 3;
  AdaptiveFloor adaptive;
  Hyperpriors hyper;
  std::uint64_t seed = 1;

  // Model switches. Without the rough part gamma stays at 0 and lambda^2 is
  // not updated (the thin-plate baseline). Without the smooth part y* stays
  // at 0 and gamma enters the mean through I - P_X.
  bool include_smooth = true;
  bool include_rough = true;

  // Pinned values; the corresponding blocks are not updated.
  std::optional<double> fixed_tau2;
  std::optional<double> fixed_sigma2;
  std::optional<Eigen::VectorXd> fixed_lambda2;

  // Store a lambda^2 vector every this many stored draws (0: never).
  Index lambda_snapshot_every = 10;

  void validate() const;
};

/// Everything the sampler needs that does not change between iterations.
struct HybridModel {
  ModelMatrices mats;
  DiffMatrix diff;
  AnchorSpec anchor;  // resolved

  /// Grid, thin-plate kernel of unit variance, default design, differencing
  /// matrix and centre anchor.
  static HybridModel build(const GridGraph& grid, int order = 1,
                           const AnchorSpec& anchor = {},
                           std::optional<double> delta_ridge = {});
};

struct ChainState {
  Eigen::VectorXd beta;
  Eigen::VectorXd ystar;
  Eigen::VectorXd gamma;
  Eigen::VectorXd lambda2_star;
  Eigen::VectorXd lambda2;
  double tau2 = 1.0;
  double sigma2 = 1.0;
  ScalingPrior prior;
  Index iteration = 0;
  Index gamma_draws = 0;
  Index ystar_draws = 0;
};

/// Least-squares beta, y* = 0, gamma = (I - P_X) mean(z) (0 without the rough
/// part), lambda^2 = floor_start, tau2 from the least-squares residual
/// variance and sigma2 = 1. Pinned values take precedence.
ChainState initial_state(const Observations& obs, const HybridModel& model,
                         const ScalingPrior& prior, const SamplerConfig& cfg);

/// Parameters of an inverse-gamma full conditional.
struct InvGammaParams {
  double shape;
  double scale;
};

/// Single-block full conditionals, exposed for testing.
namespace gibbs {
Eigen::VectorXd draw_beta(const ChainState& s, const Observations& obs,
                          const HybridModel& model, const SamplerConfig& cfg,
                          Rng& rng);
Eigen::VectorXd draw_ystar(const ChainState& s, const Observations& obs,
                           const HybridModel& model, const SamplerConfig& cfg,
                           Rng& rng);
Eigen::VectorXd draw_gamma(const ChainState& s, const Observations& obs,
                           const HybridModel& model, const SamplerConfig& cfg,
                           Rng& rng);
InvGammaParams tau2_params(const ChainState& s, const Observations& obs,
                           const HybridModel& model, const SamplerConfig& cfg);
InvGammaParams sigma2_params(const ChainState& s, const HybridModel& model,
                             const SamplerConfig& cfg);
/// X beta* + Psi y* + H gamma.
Eigen::VectorXd fitted_mean(const ChainState& s, const HybridModel& model,
                            const SamplerConfig& cfg);
}  // namespace gibbs

/// One sweep: beta*, y*, gamma, tau2, sigma2, lambda^2. y* and gamma are
/// drawn only when iteration % partial_update_period == 0. Throws ChainError
/// (with the iteration) on a failed factorization or a non-finite draw.
void gibbs_step(ChainState& state, const Observations& obs,
                const HybridModel& model, const SamplerConfig& cfg, Rng& rng);

/// Running mean and variance of a vector-valued quantity.
struct FieldMoments {
  Index count = 0;
  Eigen::VectorXd mean;
  Eigen::VectorXd m2;

  void add(const Eigen::VectorXd& x);
  Eigen::VectorXd variance() const;  // sample variance (count - 1)
  Eigen::VectorXd sd() const;
};

struct Samples {
  std::vector<Index> iterations;  // stored iteration numbers
  std::vector<std::string> trace_names;
  std::vector<std::vector<double>> traces;  // one column per name
  FieldMoments mu;
  FieldMoments gamma;
  FieldMoments smooth;  // Psi y*
  std::vector<Eigen::VectorXd> lambda2_snapshots;
  Index iterations_run = 0;
  Index gamma_draws = 0;
  Index ystar_draws = 0;
  Index observation_members = 1;
  std::string prior_name;
  ChainState final_state;

  Index stored() const { return static_cast<Index>(iterations.size()); }
  /// Column by name; throws ConfigError if absent.
  const std::vector<double>& trace(const std::string& name) const;
  bool has_trace(const std::string& name) const;
  std::vector<ParamSummary> summaries() const;
};

Samples run_chain(const Observations& obs, const HybridModel& model,
                  const ScalingPrior& prior, const SamplerConfig& cfg);

/// Posterior-variance degrees of freedom:
///   sum_i Var(mu_i | z) / (E[tau2 | z] / m),
/// which equals the trace of the hat matrix for a linear Gaussian smoother.
/// Needs at least 100 stored draws.
double estimate_edf(const Samples& samples);

}  // namespace hsmooth
