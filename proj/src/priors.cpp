#include "hsmooth/priors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hsmooth/error.hpp"

namespace hsmooth {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw PriorError(what);
}

}  // namespace

std::string ScalingPrior::name() const {
  return std::visit(
      overloaded{[](const LaplacePrior&) { return std::string("lasso"); },
                 [](const HorseshoePrior&) { return std::string("horseshoe"); },
                 [](const CauchyPrior&) { return std::string("cauchy"); },
                 [](const ParetoPrior&) { return std::string("pareto"); },
                 [](const NormalJeffreysPrior&) { return std::string("nj"); }},
      family);
}

void ScalingPrior::validate() const {
  require(delta_floor > 0.0, "delta_floor must be positive");
  std::visit(
      overloaded{
          [](const LaplacePrior& p) { require(p.b2 > 0.0, "lasso: b2 must be positive"); },
          [](const HorseshoePrior& p) {
            require(p.t2 > 0.0 && p.a > 0.0, "horseshoe: t2 and a must be positive");
            require((p.v.array() > 0.0).all(), "horseshoe: v must be positive");
          },
          [](const CauchyPrior& p) { require(p.b2 > 0.0, "cauchy: b2 must be positive"); },
          [](const ParetoPrior& p) {
            require(p.alpha > 0.0, "pareto: alpha must be positive");
            require(p.lambda2_min > 0.0, "pareto: lambda2_min must be positive");
          },
          [](const NormalJeffreysPrior& p) {
            require(std::isfinite(p.log_lower) && std::isfinite(p.log_upper) &&
                        p.log_lower < p.log_upper,
                    "nj: need finite log_lower < log_upper");
          }},
      family);
}

ScalingPrior make_prior(const std::string& name) {
  ScalingPrior p;
  if (name == "lasso" || name == "laplace") {
    p.family = LaplacePrior{};
  } else if (name == "horseshoe") {
    p.family = HorseshoePrior{};
  } else if (name == "cauchy") {
    p.family = CauchyPrior{};
  } else if (name == "pareto") {
    p.family = ParetoPrior{};
  } else if (name == "nj") {
    p.family = NormalJeffreysPrior{};
  } else {
    throw PriorError("unknown prior '" + name +
                     "' (expected lasso, horseshoe, cauchy, pareto or nj)");
  }
  return p;
}

Eigen::VectorXd simulate_lambda(const ScalingPrior& prior, Eigen::Index m,
                                Rng& rng) {
  prior.validate();
  Eigen::VectorXd out(m);
  std::visit(
      overloaded{
          [&](const LaplacePrior& p) {
            for (Eigen::Index k = 0; k < m; ++k) out[k] = draw::exponential(0.5 * p.b2, rng);
          },
          [&](const HorseshoePrior& p) {
            for (Eigen::Index k = 0; k < m; ++k) {
              const double c = draw::half_cauchy(rng);
              out[k] = p.t2 * c * c;
            }
          },
          [&](const CauchyPrior& p) {
            for (Eigen::Index k = 0; k < m; ++k) {
              out[k] = draw::inverse_gamma(0.5, 0.5 / p.b2, rng);
            }
          },
          [&](const ParetoPrior& p) {
            for (Eigen::Index k = 0; k < m; ++k) {
              out[k] = p.lambda2_min * std::pow(draw::uniform(rng), -1.0 / p.alpha);
            }
          },
          [&](const NormalJeffreysPrior& p) {
            // Inverse transform of the log-uniform CDF.
            for (Eigen::Index k = 0; k < m; ++k) {
              const double u = draw::uniform(rng);
              out[k] = std::exp(u * p.log_upper + (1.0 - u) * p.log_lower);
            }
          }},
      prior.family);
  out.array() += prior.delta_floor;
  return out;
}

namespace conditional {

double nj_local(double diff, Rng& rng) {
  return draw::inverse_gamma(0.5, 0.5 * diff * diff, rng);
}

double horseshoe_local(double diff, double v, Rng& rng) {
  return draw::inverse_gamma(1.0, 0.5 * diff * diff + 1.0 / v, rng);
}

double horseshoe_v(double lambda2_star, double t2, Rng& rng) {
  return draw::inverse_gamma(1.0, 1.0 / lambda2_star + 1.0 / t2, rng);
}

double horseshoe_t2(double sum_inv_v, Eigen::Index m, double a, Rng& rng) {
  return draw::inverse_gamma(0.5 * static_cast<double>(m + 1),
                             sum_inv_v + 1.0 / a, rng);
}

double horseshoe_a(double t2, double tau2, Rng& rng) {
  return draw::inverse_gamma(1.0, 1.0 / t2 + 1.0 / tau2, rng);
}

double lasso_local(double diff, double b2, Rng& rng) {
  const double d2 = diff * diff;
  if (d2 == 0.0) return draw::gamma(0.5, 0.5 * b2, rng);
  const double inv = draw::inverse_gaussian(std::sqrt(b2 / d2), b2, rng);
  return 1.0 / inv;
}

double lasso_b2(double sum_lambda2_star, Eigen::Index m, Rng& rng) {
  return draw::gamma(static_cast<double>(m), 0.5 * sum_lambda2_star, rng);
}

double cauchy_local(double diff, double b2, Rng& rng) {
  return draw::inverse_gamma(1.0, 0.5 * diff * diff + 0.5 / b2, rng);
}

double cauchy_b2(double sum_inv_lambda2_star, Eigen::Index m, Rng& rng) {
  return draw::inverse_gamma(0.5 * static_cast<double>(m),
                             0.5 * sum_inv_lambda2_star, rng);
}

double pareto_local(double diff, double alpha, double lambda2_min, Rng& rng) {
  return draw::truncated_inverse_gamma(alpha + 0.5, 0.5 * diff * diff,
                                       lambda2_min, rng);
}

double pareto_alpha(double sum_log_ratio, Eigen::Index m, Rng& rng) {
  return draw::gamma(static_cast<double>(m), sum_log_ratio, rng);
}

double pareto_lambda2_min(double min_lambda2_star, Eigen::Index m, double alpha,
                          double u) {
  return std::exp(std::log(u) / (static_cast<double>(m) * alpha) +
                  std::log(min_lambda2_star));
}

}  // namespace conditional

LambdaUpdate update_lambda_posterior(const ScalingPrior& prior,
                                     const Eigen::VectorXd& diffs, double tau2,
                                     Rng& rng,
                                     std::optional<double> floor_override) {
  const Eigen::Index m = diffs.size();
  LambdaUpdate out{prior, Eigen::VectorXd(m), Eigen::VectorXd(m)};
  auto& ls = out.lambda2_star;
  const double tiny = std::numeric_limits<double>::min();

  std::visit(
      overloaded{
          [&](LaplacePrior& p) {
            for (Eigen::Index k = 0; k < m; ++k) {
              ls[k] = conditional::lasso_local(diffs[k], p.b2, rng);
            }
            p.b2 = conditional::lasso_b2(ls.sum(), m, rng);
          },
          [&](HorseshoePrior& p) {
            if (p.v.size() != m) p.v = Eigen::VectorXd::Ones(m);
            for (Eigen::Index k = 0; k < m; ++k) {
              ls[k] = conditional::horseshoe_local(diffs[k], p.v[k], rng);
            }
            for (Eigen::Index k = 0; k < m; ++k) {
              p.v[k] = conditional::horseshoe_v(std::max(ls[k], tiny), p.t2, rng);
            }
            p.t2 = conditional::horseshoe_t2(p.v.cwiseInverse().sum(), m, p.a, rng);
            p.a = conditional::horseshoe_a(p.t2, tau2, rng);
          },
          [&](CauchyPrior& p) {
            for (Eigen::Index k = 0; k < m; ++k) {
              ls[k] = conditional::cauchy_local(diffs[k], p.b2, rng);
            }
            p.b2 = conditional::cauchy_b2(ls.cwiseMax(tiny).cwiseInverse().sum(), m, rng);
          },
          [&](ParetoPrior& p) {
            for (Eigen::Index k = 0; k < m; ++k) {
              ls[k] = conditional::pareto_local(diffs[k], p.alpha, p.lambda2_min, rng);
            }
            const double sum_log_ratio =
                (ls.array() / p.lambda2_min).log().sum();
            p.alpha = conditional::pareto_alpha(sum_log_ratio, m, rng);
            // Below delta_floor lambda*^2 no longer changes lambda^2, and with
            // exactly zero differences the 1/lambda2_min prior would let the
            // bound collapse to 0.
            p.lambda2_min = std::max(
                conditional::pareto_lambda2_min(ls.minCoeff(), m, p.alpha,
                                                draw::uniform(rng)),
                prior.delta_floor);
          },
          [&](NormalJeffreysPrior&) {
            for (Eigen::Index k = 0; k < m; ++k) {
              ls[k] = conditional::nj_local(diffs[k], rng);
            }
          }},
      out.prior.family);

  out.lambda2 = ls.array() + prior.delta_floor;
  if (floor_override) out.lambda2 = out.lambda2.cwiseMax(*floor_override);
  return out;
}

double scaling_log_density(const ScalingPrior& prior, double lambda2) {
  const double ninf = -std::numeric_limits<double>::infinity();
  if (!(lambda2 > 0.0)) return ninf;
  return std::visit(
      overloaded{
          [&](const LaplacePrior& p) {
            return std::log(0.5 * p.b2) - 0.5 * p.b2 * lambda2;
          },
          [&](const HorseshoePrior& p) {
            // lambda ~ C+(0, t): density of lambda^2 is
            // 1 / (pi t lambda (1 + lambda^2 / t^2)).
            const double t = std::sqrt(p.t2);
            return -std::log(std::numbers::pi * t) - 0.5 * std::log(lambda2) -
                   std::log1p(lambda2 / p.t2);
          },
          [&](const CauchyPrior& p) {
            const double shape = 0.5;
            const double scale = 0.5 / p.b2;
            return shape * std::log(scale) - std::lgamma(shape) -
                   (shape + 1.0) * std::log(lambda2) - scale / lambda2;
          },
          [&](const ParetoPrior& p) {
            if (lambda2 < p.lambda2_min) return ninf;
            return std::log(p.alpha) + p.alpha * std::log(p.lambda2_min) -
                   (p.alpha + 1.0) * std::log(lambda2);
          },
          [&](const NormalJeffreysPrior& p) {
            const double l = std::log(lambda2);
            if (l < p.log_lower || l > p.log_upper) return ninf;
            return -l - std::log(p.log_upper - p.log_lower);
          }},
      prior.family);
}

}  // namespace hsmooth
