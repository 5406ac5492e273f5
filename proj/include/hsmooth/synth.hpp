#pragma once

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "hsmooth/distributions.hpp"
#include "hsmooth/grid.hpp"
#include "hsmooth/linalg.hpp"
#include "hsmooth/model.hpp"
#include "hsmooth/priors.hpp"

namespace hsmooth {

/// Piecewise-constant truth for the rough component: an integer label per
/// cell, mapped to plateau values 0, 1, 2, 3 and scaled by a magnitude.
struct RoughTemplate {
  Index nx = 0;
  Index ny = 0;
  std::vector<int> labels;  // row-major, values in 0..3
  std::array<double, 4> plateau{0.0, 1.0, 2.0, 3.0};

  /// Reads a `row,col,value` CSV of integer labels.
  static RoughTemplate load(const std::string& path);
  /// The template shipped in data/rough_template_v1.csv.
  static RoughTemplate bundled();

  /// Nearest-neighbour resampling onto an nx-by-ny grid.
  RoughTemplate resample(Index nx, Index ny) const;
  /// magnitude * plateau[label] per cell.
  Eigen::VectorXd field(double magnitude) const;
};

/// Field with covariance Q(lambda2)^{-1}: x = P^T L^{-T} D^{-1/2} noise from
/// the sparse factor of Q.
Eigen::VectorXd ngp_field_from_lambda(const DiffMatrix& diff,
                                      const Eigen::VectorXd& lambda2,
                                      const AnchorSpec& anchor,
                                      const Eigen::VectorXd& noise);

/// Draws lambda^2 from the prior, then a field as above. With shared_noise
/// the same white noise can be reused across priors.
Eigen::VectorXd simulate_ngp_field(
    const GridGraph& grid, const ScalingPrior& prior, Rng& rng,
    const std::optional<Eigen::VectorXd>& shared_noise = {},
    const AnchorSpec& anchor = {});

/// Prior used when simulating fields: the fitting defaults, except that the
/// NJ bounds are narrowed to [1e-8, 1e8] so that Q stays factorizable in
/// double precision.
ScalingPrior simulation_prior(const std::string& name);

/// sqrt(sigma2) * M u with u ~ N(0, I) and M the factor of a unit-variance
/// kernel.
Eigen::VectorXd simulate_gp_field(const TpsKernel& unit_kernel, double sigma2,
                                  Rng& rng);

struct SyntheticData {
  std::vector<Eigen::VectorXd> z;  // one per member
  Eigen::VectorXd y;               // smooth truth
  Eigen::VectorXd gamma;           // rough truth
  std::vector<Eigen::VectorXd> noise;
  double magnitude = 0.0;
  double tau2 = 0.0;
  double sigma2 = 0.5;
};

/// z_i = y + magnitude * template + eps_i, y a GP draw with variance sigma2,
/// eps_i ~ N(0, tau2 I) independently for each of `members` realizations.
SyntheticData make_synthetic(const TpsKernel& unit_kernel,
                             const RoughTemplate& tmpl, double magnitude,
                             double tau2, Rng& rng, Index members = 1,
                             double sigma2 = 0.5);

/// True when magnitude and tau2 are levels of the study design.
bool is_canonical_level(double magnitude, double tau2);

/// median |D1 x| / 95th percentile |D1 x| over first-order differences.
double step_structure_ratio(const GridGraph& grid, const Eigen::VectorXd& field);

/// step_structure_ratio < 0.01.
bool has_step_structure(const GridGraph& grid, const Eigen::VectorXd& field);

}  // namespace hsmooth
