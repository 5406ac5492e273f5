#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "hsmooth/distributions.hpp"

namespace hsmooth {

// Scale-mixture families for the adjacent differences d_v of the rough field:
// d_v | lambda^2_v ~ N(0, lambda^2_v), lambda^2_v = lambda*^2_v + delta_floor.
// Each struct carries its hyperparameters together with any latent variables
// the Gibbs sampler updates.

/// lambda*^2 ~ Exp(rate b2 / 2); d ~ Laplace(0, 1/b). b2 has a 1/b2 prior.
struct LaplacePrior {
  double b2 = 1.0;
};

/// Half-Cauchy mixture of half-Cauchy mixtures, written as inverse gammas:
/// lambda*^2 | v ~ IG(1/2, 1/v), v | t2 ~ IG(1/2, 1/t2),
/// t2 | a ~ IG(1/2, 1/a), a | tau2 ~ IG(1/2, 1/tau2).
/// For forward simulation lambda ~ C+(0, sqrt(t2)).
struct HorseshoePrior {
  Eigen::VectorXd v;  // empty until the first update; then length m
  double t2 = 1.0;
  double a = 1.0;
};

/// lambda*^2 ~ IG(1/2, 1/(2 b2)); d ~ Cauchy(0, 1/sqrt(b2)). b2 has a 1/b2
/// prior.
struct CauchyPrior {
  double b2 = 1.0;
};

/// lambda*^2 ~ Pareto(alpha, lambda2_min) with 1/alpha and 1/lambda2_min
/// priors. The sampler keeps lambda2_min >= delta_floor.
struct ParetoPrior {
  double alpha = 1.0;
  double lambda2_min = 1e-6;
};

/// [lambda*^2] proportional to 1/lambda*^2, truncated to
/// [exp(log_lower), exp(log_upper)] where a proper law is needed.
struct NormalJeffreysPrior {
  double log_lower = std::log(1e-100);
  double log_upper = std::log(1e100);
};

using PriorFamily = std::variant<LaplacePrior, HorseshoePrior, CauchyPrior,
                                 ParetoPrior, NormalJeffreysPrior>;

struct ScalingPrior {
  PriorFamily family;
  double delta_floor = 1e-12;

  /// One of "lasso", "horseshoe", "cauchy", "pareto", "nj".
  std::string name() const;
  void validate() const;
};

/// Default-configured prior by name; throws PriorError for unknown names.
ScalingPrior make_prior(const std::string& name);

/// m iid draws of lambda^2 from the scaling law, each plus delta_floor.
Eigen::VectorXd simulate_lambda(const ScalingPrior& prior, Eigen::Index m,
                                Rng& rng);

struct LambdaUpdate {
  ScalingPrior prior;            // latents after the pass
  Eigen::VectorXd lambda2_star;  // lambda*^2
  Eigen::VectorXd lambda2;       // lambda*^2 + delta_floor
};

/// One Gibbs pass over every lambda*^2_v and the family's hyperlatents, given
/// the current differences d = D gamma.
///
/// `tau2` is only read by the horseshoe (its top layer is scaled by the
/// nugget). When `floor_override` is set every returned lambda^2_v is raised
/// to at least that value; lambda*^2 and the hyperlatents are left unclamped.
LambdaUpdate update_lambda_posterior(const ScalingPrior& prior,
                                     const Eigen::VectorXd& diffs, double tau2,
                                     Rng& rng,
                                     std::optional<double> floor_override = {});

/// Single-site full conditionals. Exposed so that each block can be checked
/// against its analytic law in isolation.
namespace conditional {

// NJ: lambda*^2 | d ~ IG(1/2, d^2/2).
double nj_local(double diff, Rng& rng);

// Horseshoe layers.
double horseshoe_local(double diff, double v, Rng& rng);  // IG(1, d^2/2 + 1/v)
double horseshoe_v(double lambda2_star, double t2, Rng& rng);  // IG(1, 1/l + 1/t2)
double horseshoe_t2(double sum_inv_v, Eigen::Index m, double a,
                    Rng& rng);  // IG((m+1)/2, sum 1/v + 1/a)
double horseshoe_a(double t2, double tau2, Rng& rng);  // IG(1, 1/t2 + 1/tau2)

// Laplace: 1/lambda*^2 ~ InvGaussian(sqrt(b2 / d^2), b2); d = 0 gives
// lambda*^2 ~ Gamma(1/2, rate b2/2).
double lasso_local(double diff, double b2, Rng& rng);
double lasso_b2(double sum_lambda2_star, Eigen::Index m,
                Rng& rng);  // Gamma(m, rate sum/2)

// Cauchy.
double cauchy_local(double diff, double b2,
                    Rng& rng);  // IG(1, d^2/2 + 1/(2 b2))
double cauchy_b2(double sum_inv_lambda2_star, Eigen::Index m,
                 Rng& rng);  // IG(m/2, sum 1/(2 lambda*^2))

// Pareto.
double pareto_local(double diff, double alpha, double lambda2_min,
                    Rng& rng);  // IG(alpha + 1/2, d^2/2) on [lambda2_min, inf)
double pareto_alpha(double sum_log_ratio, Eigen::Index m,
                    Rng& rng);  // Gamma(m, rate sum log(l / lambda2_min))
double pareto_lambda2_min(double min_lambda2_star, Eigen::Index m, double alpha,
                          double u);  // min * u^{1/(m alpha)}

}  // namespace conditional

/// log pi(lambda^2) of the family at its current hyperparameters (up to an
/// additive constant for the NJ law). Returns -inf outside the support.
double scaling_log_density(const ScalingPrior& prior, double lambda2);

struct CurvePoint {
  double theta_star;
  double posterior_mean;  // theta* + s^2 d/dtheta log p(theta) at theta*
};

/// Shrinkage profile of the prior: for each theta*, theta* + noise_scale^2 *
/// (d/dtheta) log p(theta) at theta = theta*, where p is the marginal prior
/// density of a difference, p(theta) = int N(theta; 0, l) pi(l) dl.
/// The integral is evaluated by adaptive Gauss-Kronrod quadrature on
/// log lambda^2 (relative tolerance 1e-8); the derivative by central
/// differences with step 1e-4. Throws CurveError on non-convergence.
std::vector<CurvePoint> thresholding_curve(const ScalingPrior& prior,
                                           std::span<const double> theta_star,
                                           double noise_scale = 1.0);

/// log p(theta) as used by thresholding_curve (up to a constant).
double marginal_log_density(const ScalingPrior& prior, double theta);

}  // namespace hsmooth
