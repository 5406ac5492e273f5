#pragma once

#include <Eigen/Dense>

#include <optional>

#include "hsmooth/grid.hpp"
#include "hsmooth/linalg.hpp"

namespace hsmooth {

/// Matrices of the orthogonalized hierarchical model
///
///   z | beta*, y*, gamma ~ N(X beta* + Psi y* + H gamma, tau2 I)
///   y* | gamma           ~ N(J gamma, sigma2 I)
///
/// with Psi = (I - P_X) M, P_Psi = Psi (Psi^T Psi + delta I)^{-1} Psi^T,
/// J = (Psi^T Psi + delta I)^{-1} Psi^T (I - P_X), H = (I - P_Psi)(I - P_X).
struct ModelMatrices {
  Eigen::MatrixXd X;
  Eigen::MatrixXd M;
  Eigen::MatrixXd PX;
  Eigen::MatrixXd Psi;
  Eigen::MatrixXd PPsi;
  Eigen::MatrixXd J;
  Eigen::MatrixXd H;
  double delta_ridge = 0.0;

  // Cached products used by every Gibbs sweep.
  Eigen::MatrixXd XtX;
  Eigen::MatrixXd HtH;
  Eigen::MatrixXd JtJ;
  // Psi^T Psi = psi_vectors * diag(psi_values) * psi_vectors^T.
  Eigen::MatrixXd psi_vectors;
  Eigen::VectorXd psi_values;

  Index n() const { return X.rows(); }
  Index p() const { return X.cols(); }
};

/// Columns [1, x, y] on unit-square coordinates, each scaled to unit norm.
Eigen::MatrixXd default_design(const GridGraph& grid);

/// delta_ridge defaults to 1e-8 * mean(diag(Psi^T Psi)). Throws DesignError
/// when X is rank deficient or its row count does not match the kernel.
ModelMatrices orthogonalize(const Eigen::MatrixXd& X, const TpsKernel& kernel,
                            std::optional<double> delta_ridge = {});

/// How Q = D^T Lambda^{-1} D + E is made invertible: either a single strongly
/// weighted cell (precision anchor_weight at anchor_index) or a ridge
/// ridge_delta * I.
struct AnchorSpec {
  enum class Mode { SingleAnchor, Ridge };

  Mode mode = Mode::SingleAnchor;
  Index anchor_index = -1;  // -1: grid centre, resolved by resolve()
  double anchor_weight = 1e10;
  double ridge_delta = 1e-6;

  static AnchorSpec single(Index index, double weight = 1e10);
  static AnchorSpec ridge(double delta);

  /// Copy with anchor_index filled in for `grid`.
  AnchorSpec resolve(const GridGraph& grid) const;
};

/// D^T diag(lambda2)^{-1} D + E, without checking definiteness.
SparseMatrix precision_matrix(const DiffMatrix& diff,
                              const Eigen::VectorXd& lambda2,
                              const AnchorSpec& anchor);

/// As precision_matrix, but verifies that the result factors as SPD and
/// throws AnchoringError otherwise.
SparseMatrix build_Q(const DiffMatrix& diff, const Eigen::VectorXd& lambda2,
                     const AnchorSpec& anchor);

}  // namespace hsmooth
