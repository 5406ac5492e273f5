#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "hsmooth/error.hpp"
#include "hsmooth/priors.hpp"

namespace hsmooth {

namespace {

constexpr double kRelTol = 1e-8;
constexpr double kStep = 1e-4;
constexpr double kSegment = 2.0;

// Integration window on u = log lambda^2. Outside [-200, 200] the integrand
// N(theta; 0, e^u) pi(e^u) e^u is below exp(-90) of its peak for every
// supported family at the hyperparameters used in practice.
std::pair<double, double> log_support(const ScalingPrior& prior) {
  double lo = -200.0;
  double hi = 200.0;
  if (const auto* nj = std::get_if<NormalJeffreysPrior>(&prior.family)) {
    lo = nj->log_lower;
    hi = nj->log_upper;
  } else if (const auto* par = std::get_if<ParetoPrior>(&prior.family)) {
    lo = std::log(par->lambda2_min);
    hi = std::max(hi, lo + 400.0);
  }
  return {lo, hi};
}

double log_integrand(const ScalingPrior& prior, double theta, double u) {
  const double l = std::exp(u);
  const double lp = scaling_log_density(prior, l);
  if (!std::isfinite(lp)) return -std::numeric_limits<double>::infinity();
  return -0.5 * std::log(2.0 * std::numbers::pi) - 0.5 * u -
         0.5 * theta * theta / l + lp + u;
}

}  // namespace

double marginal_log_density(const ScalingPrior& prior, double theta) {
  const auto [lo, hi] = log_support(prior);
  const auto segments = static_cast<int>(std::ceil((hi - lo) / kSegment));
  const double width = (hi - lo) / segments;

  // Shift by the largest log-integrand on the segment midpoints so the
  // quadrature works on O(1) values.
  double shift = -std::numeric_limits<double>::infinity();
  for (int s = 0; s <= 4 * segments; ++s) {
    shift = std::max(shift, log_integrand(prior, theta, lo + s * width / 4.0));
  }
  if (!std::isfinite(shift)) {
    throw CurveError("marginal density vanishes at theta = " +
                     std::to_string(theta));
  }

  auto f = [&](double u) { return std::exp(log_integrand(prior, theta, u) - shift); };
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  double total = 0.0;
  double total_err = 0.0;
  for (int s = 0; s < segments; ++s) {
    const double a = lo + s * width;
    const double b = (s + 1 == segments) ? hi : a + width;
    double err = 0.0;
    total += GK::integrate(f, a, b, 12, 1e-11, &err);
    total_err += err;
  }
  if (!(total > 0.0) || !(total_err <= kRelTol * total)) {
    throw CurveError("quadrature did not converge at theta = " +
                     std::to_string(theta));
  }
  return shift + std::log(total);
}

std::vector<CurvePoint> thresholding_curve(const ScalingPrior& prior,
                                           std::span<const double> theta_star,
                                           double noise_scale) {
  prior.validate();
  std::vector<CurvePoint> out;
  out.reserve(theta_star.size());
  for (const double t : theta_star) {
    if (!std::isfinite(t)) throw CurveError("theta* must be finite");
    const double up = marginal_log_density(prior, t + kStep);
    const double down = marginal_log_density(prior, t - kStep);
    const double score = (up - down) / (2.0 * kStep);
    out.push_back({t, t + noise_scale * noise_scale * score});
  }
  return out;
}

}  // namespace hsmooth
