#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <initializer_list>
#include <random>

namespace hsmooth {

/// One generator per chain. Never shared between threads.
using Rng = std::mt19937_64;

/// Deterministic child seed from a base seed and a path of integer keys
/// (splitmix64 mixing).
std::uint64_t derive_seed(std::uint64_t base,
                          std::initializer_list<std::uint64_t> keys);

namespace draw {

/// Uniform on the open interval (0, 1).
double uniform(Rng& rng);
double normal(Rng& rng);
Eigen::VectorXd normal_vector(Eigen::Index n, Rng& rng);

double exponential(double rate, Rng& rng);

/// Gamma with the given shape and rate (mean shape / rate).
double gamma(double shape, double rate, Rng& rng);

/// Inverse-gamma with density proportional to x^{-shape-1} exp(-scale / x).
/// scale == 0 returns 0 (the degenerate limit).
double inverse_gamma(double shape, double scale, Rng& rng);

/// Inverse-gamma truncated to [lower, inf). Uses rejection when the
/// truncation keeps most of the mass and inverse-CDF sampling otherwise.
double truncated_inverse_gamma(double shape, double scale, double lower,
                               Rng& rng);

/// Inverse Gaussian with mean `mean` and shape `shape` (Michael, Schucany
/// and Haas transformation, written in a cancellation-free form).
double inverse_gaussian(double mean, double shape, Rng& rng);

/// |standard Cauchy|.
double half_cauchy(Rng& rng);

}  // namespace draw
}  // namespace hsmooth
