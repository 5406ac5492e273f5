#include "hsmooth/linalg.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "hsmooth/error.hpp"

namespace hsmooth {

namespace {

double pivot_tolerance(Index n) {
  return static_cast<double>(n) * std::numeric_limits<double>::epsilon();
}

// First k with a non-positive (or rounding-level) pivot in a right-looking
// unblocked Cholesky. Only used to report the failing index.
Index first_bad_pivot(const Eigen::MatrixXd& A) {
  const Index n = A.rows();
  Eigen::MatrixXd L = A;
  const double tol = pivot_tolerance(n);
  for (Index k = 0; k < n; ++k) {
    const double d = L(k, k);
    if (!(d > tol * A(k, k))) return k;
    const double s = std::sqrt(d);
    L.col(k).tail(n - k - 1) /= s;
    for (Index j = k + 1; j < n; ++j) {
      L.col(j).tail(n - j) -= L(j, k) * L.col(k).tail(n - j);
    }
  }
  return n;
}

}  // namespace

bool SpdFactor::is_sparse() const { return sparse_ != nullptr; }

SpdFactor spd_factorize(const SparseMatrix& A) {
  if (A.rows() != A.cols()) {
    throw DimensionError("spd_factorize: matrix is not square");
  }
  SpdFactor f;
  f.n_ = A.rows();
  auto ldlt = std::make_shared<SpdFactor::SparseLdlt>();
  ldlt->compute(A);

  const auto& d = ldlt->vectorD();
  const auto pinv = ldlt->permutationPinv();
  const double tol = pivot_tolerance(f.n_);
  const Eigen::VectorXd diag = A.diagonal();
  for (Index k = 0; k < f.n_; ++k) {
    const Index orig = pinv.indices()(k);
    // A zero pivot stops Eigen early; entries past it are meaningless, so the
    // scan stops at the first rejected pivot.
    if (!(d[k] > tol * diag[orig])) {
      throw NotSpdError(static_cast<std::size_t>(orig),
                        "matrix is not positive definite: pivot at index " +
                            std::to_string(orig) + " is " +
                            std::to_string(d[k]));
    }
  }
  if (ldlt->info() != Eigen::Success) {
    throw NotSpdError(0, "sparse LDL^T factorization failed");
  }
  f.sparse_ = std::move(ldlt);
  return f;
}

SpdFactor spd_factorize(const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols()) {
    throw DimensionError("spd_factorize: matrix is not square");
  }
  SpdFactor f;
  f.n_ = A.rows();
  auto llt = std::make_shared<Eigen::LLT<Eigen::MatrixXd>>(A);
  bool ok = llt->info() == Eigen::Success;
  if (ok) {
    const double tol = pivot_tolerance(f.n_);
    const auto& L = llt->matrixLLT();
    for (Index k = 0; k < f.n_; ++k) {
      if (!(L(k, k) * L(k, k) > tol * A(k, k))) {
        ok = false;
        break;
      }
    }
  }
  if (!ok) {
    const Index k = first_bad_pivot(A);
    throw NotSpdError(static_cast<std::size_t>(k),
                      "matrix is not positive definite: pivot at index " +
                          std::to_string(k));
  }
  f.dense_ = std::move(llt);
  return f;
}

Eigen::VectorXd SpdFactor::solve(const Eigen::VectorXd& b) const {
  if (b.size() != n_) throw DimensionError("solve: right-hand side length");
  if (sparse_) return sparse_->solve(b);
  return dense_->solve(b);
}

Eigen::VectorXd SpdFactor::whiten_inverse(const Eigen::VectorXd& z) const {
  if (z.size() != n_) throw DimensionError("whiten_inverse: noise length");
  if (sparse_) {
    Eigen::VectorXd w = z.cwiseQuotient(sparse_->vectorD().cwiseSqrt());
    sparse_->matrixU().solveInPlace(w);
    return sparse_->permutationPinv() * w;
  }
  return dense_->matrixU().solve(z);
}

Eigen::MatrixXd SpdFactor::lower() const {
  if (sparse_) {
    const Eigen::MatrixXd stored(sparse_->matrixL().nestedExpression());
    Eigen::MatrixXd L = stored.triangularView<Eigen::StrictlyLower>();
    L.diagonal().setOnes();
    return L * sparse_->vectorD().cwiseSqrt().asDiagonal();
  }
  return Eigen::MatrixXd(dense_->matrixL());
}

Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int>
SpdFactor::permutation() const {
  if (sparse_) return sparse_->permutationP();
  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> p(n_);
  p.setIdentity();
  return p;
}

double SpdFactor::log_det() const {
  if (sparse_) return sparse_->vectorD().array().log().sum();
  return 2.0 * dense_->matrixLLT().diagonal().array().log().sum();
}

Eigen::VectorXd sample_gaussian_precision(const SpdFactor& factor,
                                          const Eigen::VectorXd& b, Rng& rng) {
  if (b.size() != factor.size()) {
    throw DimensionError("sample_gaussian_precision: b has length " +
                         std::to_string(b.size()) + ", factor has size " +
                         std::to_string(factor.size()));
  }
  Eigen::VectorXd x = factor.solve(b);
  x += factor.whiten_inverse(draw::normal_vector(factor.size(), rng));
  return x;
}

double tps_radial(double r) {
  if (r <= 0.0) return 0.0;
  return r * r * std::log(r);
}

TpsKernel build_tps_kernel(const GridGraph& grid, double variance) {
  if (!(variance > 0.0)) throw KernelError("variance must be positive");
  const Index n = grid.n();
  TpsKernel out;
  out.variance = variance;
  out.coords.resize(n, 2);
  for (Index k = 0; k < n; ++k) {
    const auto c = grid.unit_coords(k);
    out.coords(k, 0) = c[0];
    out.coords(k, 1) = c[1];
  }

  Eigen::MatrixXd phi(n, n);
  for (Index a = 0; a < n; ++a) {
    phi(a, a) = 0.0;
    for (Index b = a + 1; b < n; ++b) {
      const double r = (out.coords.row(a) - out.coords.row(b)).norm();
      phi(a, b) = phi(b, a) = tps_radial(r);
    }
  }

  Eigen::MatrixXd T(n, 3);
  T.col(0).setOnes();
  T.col(1) = out.coords.col(0);
  T.col(2) = out.coords.col(1);
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(T);
  const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, 3);
  // (I - QQ^T) Phi (I - QQ^T)
  const Eigen::MatrixXd PhiQ = phi * Q;
  Eigen::MatrixXd Kp = phi - PhiQ * Q.transpose() - Q * PhiQ.transpose() +
                       Q * (Q.transpose() * PhiQ) * Q.transpose();
  Kp = 0.5 * (Kp + Kp.transpose()).eval();

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Kp);
  if (eig.info() != Eigen::Success) {
    throw KernelError("eigendecomposition of the projected kernel failed");
  }
  Eigen::VectorXd evals = eig.eigenvalues().cwiseMax(0.0);
  const double top = evals.maxCoeff();
  if (!(top > 0.0)) throw KernelError("projected kernel is identically zero");
  evals.array() += 1e-10 * top;
  out.K = variance * (eig.eigenvectors() * evals.asDiagonal() *
                      eig.eigenvectors().transpose());
  out.K = 0.5 * (out.K + out.K.transpose()).eval();

  const Eigen::LLT<Eigen::MatrixXd> llt(out.K);
  if (llt.info() != Eigen::Success) {
    throw KernelError("Cholesky factorization of the TPS kernel failed");
  }
  out.M = llt.matrixL();
  return out;
}

}  // namespace hsmooth
