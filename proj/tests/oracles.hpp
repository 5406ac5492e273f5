#pragma once

// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls into the library under test.

#include <Eigen/Dense>

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

// Kolmogorov survival function P(K > x).
inline double kolmogorov_q(double x) {
  if (x < 0.2) return 1.0;
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    s += (k % 2 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(s, 0.0, 1.0);
}

struct KsResult {
  double d;
  double p;
};

// One-sample KS against a continuous CDF (Stephens' small-sample correction).
inline KsResult ks_one_sample(std::vector<double> x,
                              const std::function<double(double)>& cdf) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  const double sn = std::sqrt(n);
  return {d, kolmogorov_q((sn + 0.12 + 0.11 / sn) * d)};
}

inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  return {d, kolmogorov_q((ne + 0.12 + 0.11 / ne) * d)};
}

// Inverse-gamma (shape a, scale b) CDF: Q(a, b/x).
inline double inv_gamma_cdf(double x, double a, double b) {
  return x <= 0.0 ? 0.0 : boost::math::gamma_q(a, b / x);
}

// Quantile by bisection on the CDF in log space.
inline double inv_gamma_quantile(double p, double a, double b) {
  double lo = -300.0;
  double hi = 300.0;
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    (inv_gamma_cdf(std::exp(mid), a, b) < p ? lo : hi) = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

inline double gamma_cdf(double x, double shape, double rate) {
  return x <= 0.0 ? 0.0 : boost::math::gamma_p(shape, rate * x);
}

inline double normal_cdf(double x, double mean, double sd) {
  return 0.5 * std::erfc(-(x - mean) / (sd * std::sqrt(2.0)));
}

// Inverse-Gaussian CDF with mean mu and shape lambda.
inline double inverse_gaussian_cdf(double x, double mu, double lambda) {
  if (x <= 0.0) return 0.0;
  const double r = std::sqrt(lambda / x);
  const double a = normal_cdf(r * (x / mu - 1.0), 0.0, 1.0);
  const double log_b = 2.0 * lambda / mu +
                       std::log(normal_cdf(-r * (x / mu + 1.0), 0.0, 1.0));
  return a + std::exp(log_b);
}

// Graph Laplacian of an nx-by-ny grid (row-major) by pairwise distance.
inline Eigen::MatrixXd grid_laplacian(int nx, int ny) {
  const int n = nx * ny;
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (a == b) continue;
      const int dr = std::abs(a / nx - b / nx);
      const int dc = std::abs(a % nx - b % nx);
      if (dr + dc == 1) {
        L(a, b) = -1.0;
        L(a, a) += 1.0;
      }
    }
  }
  return L;
}

inline Eigen::MatrixXd sample_covariance(const std::vector<Eigen::VectorXd>& xs) {
  const Eigen::Index n = xs.front().size();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
  for (const auto& x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
  for (const auto& x : xs) c += (x - mean) * (x - mean).transpose();
  return c / static_cast<double>(xs.size() - 1);
}

}  // namespace oracle
