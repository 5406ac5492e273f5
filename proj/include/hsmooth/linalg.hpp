#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <memory>
#include <variant>

#include "hsmooth/distributions.hpp"
#include "hsmooth/grid.hpp"

namespace hsmooth {

/// Cholesky-type factor of a symmetric positive definite matrix A.
///
/// Sparse input is factored as P A P^T = L D L^T with a fill-reducing (AMD)
/// permutation P; dense input as A = L L^T. A pivot d_k is rejected when
/// d_k <= n * eps * A_kk (k in factor ordering), which catches singular
/// matrices whose last pivot is rounding noise.
class SpdFactor {
 public:
  Index size() const { return n_; }
  bool is_sparse() const;

  /// A^{-1} b.
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;

  /// Maps white noise z to x with Cov(x) = A^{-1}:
  /// x = P^T L^{-T} D^{-1/2} z (sparse) or L^{-T} z (dense).
  Eigen::VectorXd whiten_inverse(const Eigen::VectorXd& z) const;

  /// Dense lower factor G with P^T G G^T P = A, and the permutation P
  /// (identity for dense factors).
  Eigen::MatrixXd lower() const;
  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> permutation()
      const;

  /// log det A.
  double log_det() const;

  friend SpdFactor spd_factorize(const SparseMatrix& A);
  friend SpdFactor spd_factorize(const Eigen::MatrixXd& A);

 private:
  using SparseLdlt =
      Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower,
                            Eigen::AMDOrdering<int>>;
  Index n_ = 0;
  std::shared_ptr<const SparseLdlt> sparse_;
  std::shared_ptr<const Eigen::LLT<Eigen::MatrixXd>> dense_;
};

/// Throws NotSpdError carrying the original index of the first rejected pivot.
SpdFactor spd_factorize(const SparseMatrix& A);
SpdFactor spd_factorize(const Eigen::MatrixXd& A);

/// One draw from N(A^{-1} b, A^{-1}) given a factor of A, built from
/// draw::normal_vector(size(), rng).
Eigen::VectorXd sample_gaussian_precision(const SpdFactor& factor,
                                          const Eigen::VectorXd& b, Rng& rng);

/// Thin-plate covariance on the grid.
///
/// K = variance * (floor_0[(I - P) Phi (I - P)] + nugget I), where
/// Phi_ij = r_ij^2 log r_ij on unit-square coordinates (phi(0) = 0), P is the
/// orthogonal projector onto span{1, x, y}, floor_0 clips negative
/// eigenvalues to zero and nugget = 1e-10 * (largest eigenvalue) makes the
/// matrix strictly positive definite. M is the lower Cholesky factor of K.
struct TpsKernel {
  Eigen::MatrixXd coords;  // n x 2, columns (x, y)
  Eigen::MatrixXd K;
  Eigen::MatrixXd M;
  double variance = 1.0;
};

TpsKernel build_tps_kernel(const GridGraph& grid, double variance);

/// r^2 log r with the limit 0 at r = 0.
double tps_radial(double r);

}  // namespace hsmooth
