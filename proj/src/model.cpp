#include "hsmooth/model.hpp"

#include <string>

#include "hsmooth/error.hpp"

namespace hsmooth {

Eigen::MatrixXd default_design(const GridGraph& grid) {
  const Index n = grid.n();
  Eigen::MatrixXd X(n, 3);
  for (Index k = 0; k < n; ++k) {
    const auto c = grid.unit_coords(k);
    X(k, 0) = 1.0;
    X(k, 1) = c[0];
    X(k, 2) = c[1];
  }
  for (Index j = 0; j < 3; ++j) X.col(j).normalize();
  return X;
}

ModelMatrices orthogonalize(const Eigen::MatrixXd& X, const TpsKernel& kernel,
                            std::optional<double> delta_ridge) {
  const Index n = X.rows();
  const Index p = X.cols();
  if (kernel.M.rows() != n) {
    throw DesignError("design has " + std::to_string(n) +
                      " rows but the kernel has " +
                      std::to_string(kernel.M.rows()));
  }
  if (p == 0 || p >= n) throw DesignError("design must have 1 <= p < n columns");

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  const double rmax = qr.matrixR().diagonal().cwiseAbs().maxCoeff();
  qr.setThreshold(1e-10);
  if (qr.rank() < p || !(rmax > 0.0)) {
    throw DesignError("design matrix is rank deficient (rank " +
                      std::to_string(qr.rank()) + " < " + std::to_string(p) +
                      ")");
  }
  const Eigen::MatrixXd Qx =
      qr.householderQ() * Eigen::MatrixXd::Identity(n, p);

  ModelMatrices mm;
  mm.X = X;
  mm.M = kernel.M;
  mm.PX = Qx * Qx.transpose();
  const Eigen::MatrixXd IminusPX = Eigen::MatrixXd::Identity(n, n) - mm.PX;
  mm.Psi = mm.M - Qx * (Qx.transpose() * mm.M);

  const Eigen::MatrixXd PtP = mm.Psi.transpose() * mm.Psi;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(PtP);
  if (eig.info() != Eigen::Success) {
    throw DesignError("eigendecomposition of Psi^T Psi failed");
  }
  mm.psi_vectors = eig.eigenvectors();
  mm.psi_values = eig.eigenvalues().cwiseMax(0.0);
  mm.delta_ridge = delta_ridge.value_or(1e-8 * PtP.diagonal().mean());
  if (!(mm.delta_ridge > 0.0)) throw DesignError("delta_ridge must be positive");

  // (Psi^T Psi + delta I)^{-1} Psi^T via the eigenbasis.
  const Eigen::VectorXd inv = (mm.psi_values.array() + mm.delta_ridge).inverse();
  const Eigen::MatrixXd ridge_inv_PsiT =
      mm.psi_vectors *
      (inv.asDiagonal() * (mm.psi_vectors.transpose() * mm.Psi.transpose()));

  mm.J = ridge_inv_PsiT * IminusPX;
  mm.PPsi = mm.Psi * ridge_inv_PsiT;
  mm.H = (Eigen::MatrixXd::Identity(n, n) - mm.PPsi) * IminusPX;

  mm.XtX = X.transpose() * X;
  mm.HtH = mm.H.transpose() * mm.H;
  mm.JtJ = mm.J.transpose() * mm.J;
  return mm;
}

AnchorSpec AnchorSpec::single(Index index, double weight) {
  AnchorSpec a;
  a.mode = Mode::SingleAnchor;
  a.anchor_index = index;
  a.anchor_weight = weight;
  return a;
}

AnchorSpec AnchorSpec::ridge(double delta) {
  AnchorSpec a;
  a.mode = Mode::Ridge;
  a.ridge_delta = delta;
  return a;
}

AnchorSpec AnchorSpec::resolve(const GridGraph& grid) const {
  AnchorSpec a = *this;
  if (a.mode == Mode::SingleAnchor && a.anchor_index < 0) {
    a.anchor_index = grid.center();
  }
  return a;
}

SparseMatrix precision_matrix(const DiffMatrix& diff,
                              const Eigen::VectorXd& lambda2,
                              const AnchorSpec& anchor) {
  if (lambda2.size() != diff.rows()) {
    throw DimensionError("lambda2 has length " + std::to_string(lambda2.size()) +
                         ", differencing matrix has " +
                         std::to_string(diff.rows()) + " rows");
  }
  const Index n = diff.D.cols();
  SparseMatrix Q = SparseMatrix(diff.D.transpose()) *
                   lambda2.cwiseInverse().asDiagonal() * diff.D;
  if (anchor.mode == AnchorSpec::Mode::SingleAnchor) {
    if (anchor.anchor_index < 0 || anchor.anchor_index >= n) {
      throw ConfigError("anchor index " + std::to_string(anchor.anchor_index) +
                        " is not a grid cell (resolve the anchor first)");
    }
    Q.coeffRef(anchor.anchor_index, anchor.anchor_index) += anchor.anchor_weight;
  } else {
    for (Index k = 0; k < n; ++k) Q.coeffRef(k, k) += anchor.ridge_delta;
  }
  Q.makeCompressed();
  return Q;
}

SparseMatrix build_Q(const DiffMatrix& diff, const Eigen::VectorXd& lambda2,
                     const AnchorSpec& anchor) {
  SparseMatrix Q = precision_matrix(diff, lambda2, anchor);
  try {
    (void)spd_factorize(Q);
  } catch (const NotSpdError& e) {
    throw AnchoringError(
        std::string("Q is not positive definite with this anchoring: ") +
        e.what());
  }
  return Q;
}

}  // namespace hsmooth
