#include "hsmooth/distributions.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>
#include <numbers>

namespace hsmooth {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base,
                          std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = splitmix64(base);
  for (auto k : keys) h = splitmix64(h ^ splitmix64(k + 0x632be59bd9b4e019ULL));
  return h;
}

namespace draw {

double uniform(Rng& rng) {
  // 53 random bits mapped to the open interval (0, 1).
  const double u =
      (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
  return u;
}

double normal(Rng& rng) {
  std::normal_distribution<double> d;
  return d(rng);
}

Eigen::VectorXd normal_vector(Eigen::Index n, Rng& rng) {
  std::normal_distribution<double> d;
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = d(rng);
  return z;
}

double exponential(double rate, Rng& rng) {
  return -std::log(uniform(rng)) / rate;
}

double gamma(double shape, double rate, Rng& rng) {
  std::gamma_distribution<double> d(shape, 1.0);
  return d(rng) / rate;
}

double inverse_gamma(double shape, double scale, Rng& rng) {
  if (scale == 0.0) return 0.0;
  return scale / gamma(shape, 1.0, rng);
}

double truncated_inverse_gamma(double shape, double scale, double lower,
                               Rng& rng) {
  if (scale <= 0.0) {
    // x^{-shape-1} on [lower, inf): a Pareto tail.
    return lower * std::pow(uniform(rng), -1.0 / shape);
  }
  // x = scale / g with g ~ Gamma(shape, 1) restricted to (0, scale / lower].
  const double g_max = scale / lower;
  if (shape > 2.0) {
    // Large shapes overflow the incomplete-gamma route; use rejection.
    const double mode = shape - 1.0;
    if (g_max >= std::max(mode - std::sqrt(mode), 0.5 * mode)) {
      for (;;) {
        const double g = gamma(shape, 1.0, rng);
        if (g <= g_max) return scale / g;
      }
    }
    // Below the mode, y = g_max - g has log density
    // f(y) = (shape - 1) log(1 - y / g_max) + y + const, concave with
    // f'(0) = -rate, so Exp(rate) truncated to [0, g_max) dominates it.
    const double rate = mode / g_max - 1.0;
    const double tail = -std::expm1(-rate * g_max);
    for (;;) {
      const double y = -std::log1p(-uniform(rng) * tail) / rate;
      if (!(y < g_max)) continue;
      const double log_accept = mode * std::log1p(-y / g_max) + y + rate * y;
      if (std::log(uniform(rng)) <= log_accept) return scale / (g_max - y);
    }
  }
  const double p_max = boost::math::gamma_p(shape, g_max);
  if (p_max >= 0.25) {
    for (;;) {
      const double g = gamma(shape, 1.0, rng);
      if (g <= g_max) return scale / g;
    }
  }
  const double u = uniform(rng);
  double g;
  if (p_max < 1e-280) {
    // Deep in the left tail P(a, g) ~ g^a / Gamma(a + 1).
    g = g_max * std::pow(u, 1.0 / shape);
  } else {
    g = boost::math::gamma_p_inv(shape, u * p_max);
    g = std::min(g, g_max);
  }
  if (!(g > 0.0)) return std::numeric_limits<double>::infinity();
  return scale / g;
}

double inverse_gaussian(double mean, double shape, Rng& rng) {
  const double nu = normal(rng);
  const double v = nu * nu;
  // x = mean * (1 + y - sqrt(y^2 + 2y)) with y = mean v / (2 shape),
  // rewritten as 1 / (1/mean + c + sqrt(c^2 + 2c/mean)), c = v / (2 shape),
  // which stays finite as mean -> inf.
  const double c = v / (2.0 * shape);
  const double inv_mean = 1.0 / mean;
  const double x = 1.0 / (inv_mean + c + std::sqrt(c * c + 2.0 * c * inv_mean));
  const double u = uniform(rng);
  if (u * (mean + x) <= mean) return x;
  return mean * (mean / x);
}

double half_cauchy(Rng& rng) {
  return std::abs(std::tan(std::numbers::pi * (uniform(rng) - 0.5)));
}

}  // namespace draw
}  // namespace hsmooth
