#include "hsmooth/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hsmooth/error.hpp"
#include "hsmooth/linalg.hpp"

namespace hsmooth {

namespace {

void check_finite(const Eigen::VectorXd& v, const char* block, Index iteration) {
  if (!v.allFinite()) {
    throw ChainError(iteration, std::string("non-finite value in the ") + block +
                                    " draw at iteration " +
                                    std::to_string(iteration));
  }
}

void check_finite(double v, const char* block, Index iteration) {
  if (!std::isfinite(v) || !(v > 0.0)) {
    throw ChainError(iteration, std::string("invalid value in the ") + block +
                                    " draw at iteration " +
                                    std::to_string(iteration));
  }
}

double members(const Observations& obs) {
  return static_cast<double>(obs.members());
}

// H gamma, or (I - P_X) gamma when the smooth part is switched off.
Eigen::VectorXd rough_term(const ChainState& s, const HybridModel& model,
                           const SamplerConfig& cfg) {
  if (!cfg.include_rough) return Eigen::VectorXd::Zero(model.mats.n());
  if (cfg.include_smooth) return model.mats.H * s.gamma;
  return s.gamma - model.mats.PX * s.gamma;
}

Eigen::VectorXd smooth_term(const ChainState& s, const HybridModel& model,
                            const SamplerConfig& cfg) {
  if (!cfg.include_smooth) return Eigen::VectorXd::Zero(model.mats.n());
  return model.mats.Psi * s.ystar;
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void push_prior_traces(const ScalingPrior& prior,
                       std::vector<std::string>& names) {
  std::visit(overloaded{[&](const LaplacePrior&) { names.push_back("b2"); },
                        [&](const HorseshoePrior&) {
                          names.push_back("t2");
                          names.push_back("a");
                        },
                        [&](const CauchyPrior&) { names.push_back("b2"); },
                        [&](const ParetoPrior&) {
                          names.push_back("alpha");
                          names.push_back("lambda2_min");
                        },
                        [&](const NormalJeffreysPrior&) {}},
             prior.family);
}

void prior_values(const ScalingPrior& prior, std::vector<double>& out) {
  std::visit(overloaded{[&](const LaplacePrior& p) { out.push_back(p.b2); },
                        [&](const HorseshoePrior& p) {
                          out.push_back(p.t2);
                          out.push_back(p.a);
                        },
                        [&](const CauchyPrior& p) { out.push_back(p.b2); },
                        [&](const ParetoPrior& p) {
                          out.push_back(p.alpha);
                          out.push_back(p.lambda2_min);
                        },
                        [&](const NormalJeffreysPrior&) {}},
             prior.family);
}

}  // namespace

Observations Observations::single(Eigen::VectorXd z) {
  std::vector<Eigen::VectorXd> v;
  v.push_back(std::move(z));
  return ensemble(std::move(v));
}

Observations Observations::ensemble(std::vector<Eigen::VectorXd> members) {
  if (members.empty()) throw DimensionError("no observations");
  const Index n = members.front().size();
  for (const auto& z : members) {
    if (z.size() != n) throw DimensionError("ensemble members differ in length");
    if (!z.allFinite()) throw DimensionError("observations must be finite");
  }
  Observations o;
  o.members_ = std::move(members);
  o.sum_ = Eigen::VectorXd::Zero(n);
  for (const auto& z : o.members_) o.sum_ += z;
  o.mean_ = o.sum_ / static_cast<double>(o.members_.size());
  for (const auto& z : o.members_) o.within_ss_ += (z - o.mean_).squaredNorm();
  return o;
}

std::optional<double> AdaptiveFloor::at(Index t, Index burn_in,
                                        double delta_floor) const {
  const Index stop = end(burn_in);
  if (!enabled || stop <= 0 || t >= stop) return std::nullopt;
  const double log_decay = std::log(delta_floor / floor_start) /
                           static_cast<double>(stop);
  return floor_start * std::exp(log_decay * static_cast<double>(t));
}

void SamplerConfig::validate() const {
  if (n_iter < 1) throw ConfigError("n_iter must be positive");
  if (burn_in < 0 || burn_in >= n_iter) {
    throw ConfigError("burn_in must lie in [0, n_iter)");
  }
  if (thin < 1) throw ConfigError("thin must be at least 1");
  if (partial_update_period < 1) {
    throw ConfigError("partial_update_period must be at least 1");
  }
  if (adaptive.enabled) {
    if (!(adaptive.floor_start > 0.0)) {
      throw ConfigError("adaptive floor_start must be positive");
    }
    const Index e = adaptive.end(burn_in);
    if (e < 0 || (burn_in > 0 && e >= burn_in)) {
      throw ConfigError("adaptive end_iteration must be below burn_in");
    }
  }
  if (!(hyper.alpha_tau2 > 0.0 && hyper.beta_tau2 >= 0.0 &&
        hyper.alpha_sigma2 > 0.0 && hyper.beta_sigma2 >= 0.0)) {
    throw ConfigError("inverse-gamma hyperparameters must be positive");
  }
  if (fixed_tau2 && !(*fixed_tau2 > 0.0)) throw ConfigError("fixed tau2 must be positive");
  if (fixed_sigma2 && !(*fixed_sigma2 > 0.0)) {
    throw ConfigError("fixed sigma2 must be positive");
  }
  if (fixed_lambda2 && !(fixed_lambda2->array() > 0.0).all()) {
    throw ConfigError("fixed lambda2 must be positive");
  }
  if (lambda_snapshot_every < 0) {
    throw ConfigError("lambda_snapshot_every must be non-negative");
  }
}

HybridModel HybridModel::build(const GridGraph& grid, int order,
                               const AnchorSpec& anchor,
                               std::optional<double> delta_ridge) {
  const TpsKernel kernel = build_tps_kernel(grid, 1.0);
  return {orthogonalize(default_design(grid), kernel, delta_ridge),
          build_diff_matrix(grid, order), anchor.resolve(grid)};
}

ChainState initial_state(const Observations& obs, const HybridModel& model,
                         const ScalingPrior& prior, const SamplerConfig& cfg) {
  const auto& mm = model.mats;
  if (obs.n() != mm.n()) {
    throw DimensionError("observations have length " + std::to_string(obs.n()) +
                         ", model has " + std::to_string(mm.n()) + " cells");
  }
  prior.validate();
  ChainState s;
  s.prior = prior;
  s.beta = mm.XtX.llt().solve(mm.X.transpose() * obs.mean());
  s.ystar = Eigen::VectorXd::Zero(mm.n());
  // The rough part starts at the detrended data so that the early,
  // floor-limited lambda^2 draws see every jump before any edge fuses.
  s.gamma = cfg.include_rough ? Eigen::VectorXd(obs.mean() - mm.PX * obs.mean())
                              : Eigen::VectorXd::Zero(mm.n());
  const Index m = model.diff.rows();
  if (cfg.fixed_lambda2) {
    if (cfg.fixed_lambda2->size() != m) {
      throw DimensionError("fixed lambda2 has the wrong length");
    }
    s.lambda2 = *cfg.fixed_lambda2;
  } else {
    s.lambda2 = Eigen::VectorXd::Constant(
        m, cfg.adaptive.floor_start + prior.delta_floor);
  }
  s.lambda2_star = (s.lambda2.array() - prior.delta_floor).cwiseMax(0.0);
  const Eigen::VectorXd resid = obs.mean() - mm.X * s.beta;
  const double dof = static_cast<double>(std::max<Index>(mm.n() - mm.p(), 1));
  s.tau2 = cfg.fixed_tau2.value_or(std::max(resid.squaredNorm() / dof, 1e-8));
  s.sigma2 = cfg.fixed_sigma2.value_or(1.0);
  return s;
}

namespace gibbs {

Eigen::VectorXd fitted_mean(const ChainState& s, const HybridModel& model,
                            const SamplerConfig& cfg) {
  return model.mats.X * s.beta + smooth_term(s, model, cfg) +
         rough_term(s, model, cfg);
}

Eigen::VectorXd draw_beta(const ChainState& s, const Observations& obs,
                          const HybridModel& model, const SamplerConfig& cfg,
                          Rng& rng) {
  const auto& mm = model.mats;
  const double m = members(obs);
  const Eigen::MatrixXd A = (m / s.tau2) * mm.XtX;
  const Eigen::VectorXd r =
      obs.sum() - m * (smooth_term(s, model, cfg) + rough_term(s, model, cfg));
  const Eigen::VectorXd b = mm.X.transpose() * r / s.tau2;
  return sample_gaussian_precision(spd_factorize(A), b, rng);
}

Eigen::VectorXd draw_ystar(const ChainState& s, const Observations& obs,
                           const HybridModel& model, const SamplerConfig& cfg,
                           Rng& rng) {
  const auto& mm = model.mats;
  const double m = members(obs);
  // A = I / sigma2 + m Psi^T Psi / tau2 is diagonal in the eigenbasis of
  // Psi^T Psi.
  const Eigen::VectorXd prec =
      (1.0 / s.sigma2 + (m / s.tau2) * mm.psi_values.array()).matrix();
  const Eigen::VectorXd r =
      obs.sum() - m * (mm.X * s.beta + rough_term(s, model, cfg));
  Eigen::VectorXd b = mm.Psi.transpose() * r / s.tau2;
  if (cfg.include_rough) b += mm.J * s.gamma / s.sigma2;
  const Eigen::VectorXd bt = mm.psi_vectors.transpose() * b;
  const Eigen::VectorXd xi = draw::normal_vector(mm.n(), rng);
  const Eigen::VectorXd coef =
      (bt.array() / prec.array() + xi.array() / prec.array().sqrt()).matrix();
  return mm.psi_vectors * coef;
}

Eigen::VectorXd draw_gamma(const ChainState& s, const Observations& obs,
                           const HybridModel& model, const SamplerConfig& cfg,
                           Rng& rng) {
  const auto& mm = model.mats;
  const double m = members(obs);
  const Eigen::VectorXd r =
      obs.sum() - m * (mm.X * s.beta + smooth_term(s, model, cfg));
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  if (cfg.include_smooth) {
    A = (m / s.tau2) * mm.HtH + (1.0 / s.sigma2) * mm.JtJ;
    b = mm.H.transpose() * r / s.tau2 + mm.J.transpose() * s.ystar / s.sigma2;
  } else {
    const Eigen::MatrixXd IminusPX =
        Eigen::MatrixXd::Identity(mm.n(), mm.n()) - mm.PX;
    A = (m / s.tau2) * IminusPX;
    b = IminusPX * r / s.tau2;
  }
  const SparseMatrix Q = precision_matrix(model.diff, s.lambda2, model.anchor);
  for (int k = 0; k < Q.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(Q, k); it; ++it) {
      A(it.row(), it.col()) += it.value();
    }
  }
  return sample_gaussian_precision(spd_factorize(A), b, rng);
}

InvGammaParams tau2_params(const ChainState& s, const Observations& obs,
                           const HybridModel& model, const SamplerConfig& cfg) {
  const double m = members(obs);
  const double n = static_cast<double>(obs.n());
  const Eigen::VectorXd mu = fitted_mean(s, model, cfg);
  const double rss = obs.within_ss() + m * (obs.mean() - mu).squaredNorm();
  InvGammaParams p{0.5 * m * n + cfg.hyper.alpha_tau2,
                   0.5 * rss + cfg.hyper.beta_tau2};
  if (cfg.include_rough) {
    if (const auto* hs = std::get_if<HorseshoePrior>(&s.prior.family)) {
      p.shape += 0.5;
      p.scale += 1.0 / hs->a;
    }
  }
  return p;
}

InvGammaParams sigma2_params(const ChainState& s, const HybridModel& model,
                             const SamplerConfig& cfg) {
  const double n = static_cast<double>(model.mats.n());
  Eigen::VectorXd r = s.ystar;
  if (cfg.include_rough) r -= model.mats.J * s.gamma;
  return {0.5 * n + cfg.hyper.alpha_sigma2,
          0.5 * r.squaredNorm() + cfg.hyper.beta_sigma2};
}

}  // namespace gibbs

void gibbs_step(ChainState& s, const Observations& obs,
                const HybridModel& model, const SamplerConfig& cfg, Rng& rng) {
  const Index t = s.iteration;
  try {
    s.beta = gibbs::draw_beta(s, obs, model, cfg, rng);
    check_finite(s.beta, "beta*", t);

    if (t % cfg.partial_update_period == 0) {
      if (cfg.include_smooth) {
        s.ystar = gibbs::draw_ystar(s, obs, model, cfg, rng);
        check_finite(s.ystar, "y*", t);
        ++s.ystar_draws;
      }
      if (cfg.include_rough) {
        s.gamma = gibbs::draw_gamma(s, obs, model, cfg, rng);
        check_finite(s.gamma, "gamma", t);
        ++s.gamma_draws;
      }
    }
  } catch (const NotSpdError& e) {
    throw ChainError(t, std::string("factorization failed at iteration ") +
                            std::to_string(t) + ": " + e.what());
  }

  if (!cfg.fixed_tau2) {
    const auto p = gibbs::tau2_params(s, obs, model, cfg);
    s.tau2 = draw::inverse_gamma(p.shape, p.scale, rng);
    check_finite(s.tau2, "tau2", t);
  }
  if (cfg.include_smooth && !cfg.fixed_sigma2) {
    const auto p = gibbs::sigma2_params(s, model, cfg);
    s.sigma2 = draw::inverse_gamma(p.shape, p.scale, rng);
    check_finite(s.sigma2, "sigma2", t);
  }
  if (cfg.include_rough && !cfg.fixed_lambda2) {
    const Eigen::VectorXd d = model.diff.D * s.gamma;
    const auto floor = cfg.adaptive.at(t, cfg.burn_in, s.prior.delta_floor);
    auto upd = update_lambda_posterior(s.prior, d, s.tau2, rng, floor);
    s.prior = std::move(upd.prior);
    s.lambda2_star = std::move(upd.lambda2_star);
    s.lambda2 = std::move(upd.lambda2);
    check_finite(s.lambda2, "lambda2", t);
  }
  ++s.iteration;
}

void FieldMoments::add(const Eigen::VectorXd& x) {
  if (count == 0) {
    mean = Eigen::VectorXd::Zero(x.size());
    m2 = Eigen::VectorXd::Zero(x.size());
  }
  ++count;
  const Eigen::VectorXd delta = x - mean;
  mean += delta / static_cast<double>(count);
  m2 += delta.cwiseProduct(x - mean);
}

Eigen::VectorXd FieldMoments::variance() const {
  if (count < 2) return Eigen::VectorXd::Zero(mean.size());
  return m2 / static_cast<double>(count - 1);
}

Eigen::VectorXd FieldMoments::sd() const { return variance().cwiseSqrt(); }

bool Samples::has_trace(const std::string& name) const {
  return std::find(trace_names.begin(), trace_names.end(), name) !=
         trace_names.end();
}

const std::vector<double>& Samples::trace(const std::string& name) const {
  const auto it = std::find(trace_names.begin(), trace_names.end(), name);
  if (it == trace_names.end()) throw ConfigError("no trace named '" + name + "'");
  return traces[static_cast<std::size_t>(it - trace_names.begin())];
}

std::vector<ParamSummary> Samples::summaries() const {
  std::vector<ParamSummary> out;
  for (std::size_t k = 0; k < trace_names.size(); ++k) {
    if (traces[k].empty()) continue;
    out.push_back(summarize(trace_names[k], traces[k]));
  }
  return out;
}

Samples run_chain(const Observations& obs, const HybridModel& model,
                  const ScalingPrior& prior, const SamplerConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  ChainState s = initial_state(obs, model, prior, cfg);

  Samples out;
  out.observation_members = obs.members();
  out.prior_name = cfg.include_rough ? prior.name() : std::string("tps");
  out.trace_names = {"tau2", "sigma2"};
  for (Index j = 0; j < model.mats.p(); ++j) {
    out.trace_names.push_back("beta" + std::to_string(j));
  }
  if (cfg.include_rough && !cfg.fixed_lambda2) {
    push_prior_traces(prior, out.trace_names);
  }
  out.traces.resize(out.trace_names.size());

  std::vector<double> row;
  for (Index t = 0; t < cfg.n_iter; ++t) {
    gibbs_step(s, obs, model, cfg, rng);
    if (t < cfg.burn_in || (t - cfg.burn_in) % cfg.thin != 0) continue;

    row.clear();
    row.push_back(s.tau2);
    row.push_back(s.sigma2);
    for (Index j = 0; j < s.beta.size(); ++j) row.push_back(s.beta[j]);
    if (cfg.include_rough && !cfg.fixed_lambda2) prior_values(s.prior, row);
    for (std::size_t k = 0; k < row.size(); ++k) out.traces[k].push_back(row[k]);

    out.iterations.push_back(t);
    const Eigen::VectorXd smooth = smooth_term(s, model, cfg);
    out.mu.add(model.mats.X * s.beta + smooth + rough_term(s, model, cfg));
    out.smooth.add(smooth);
    out.gamma.add(s.gamma);
    if (cfg.include_rough && cfg.lambda_snapshot_every > 0 &&
        (out.stored() - 1) % cfg.lambda_snapshot_every == 0) {
      out.lambda2_snapshots.push_back(s.lambda2);
    }
  }
  out.iterations_run = cfg.n_iter;
  out.gamma_draws = s.gamma_draws;
  out.ystar_draws = s.ystar_draws;
  out.final_state = std::move(s);
  return out;
}

double estimate_edf(const Samples& samples) {
  if (samples.stored() < 100) {
    throw TooFewDrawsError("EDF needs at least 100 stored draws, have " +
                           std::to_string(samples.stored()));
  }
  const double tau2_hat = mean(samples.trace("tau2"));
  const double noise = tau2_hat / static_cast<double>(samples.observation_members);
  return samples.mu.variance().sum() / noise;
}

}  // namespace hsmooth
