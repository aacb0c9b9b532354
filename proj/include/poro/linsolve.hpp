#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "poro/errors.hpp"
#include "poro/types.hpp"

namespace poro {

/// Direct sparse solve with one refinement pass and a relative-residual
/// contract; throws SolverBreakdown when the factorization fails or the
/// residual stays above `tol`.
template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> sparse_solve(
    const Eigen::SparseMatrix<Scalar>& A,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& b, double tol = 1e-10) {
  using VecT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  Eigen::SparseLU<Eigen::SparseMatrix<Scalar>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success)
    throw SolverBreakdown("sparse LU factorization failed");
  VecT x = lu.solve(b);
  double bn = b.norm();
  if (bn == 0.0) return VecT::Zero(b.size());
  VecT r = b - A * x;
  if (r.norm() > tol * bn) {
    x += lu.solve(r).eval();
    r = b - A * x;
  }
  if (!(r.norm() <= tol * bn))
    throw SolverBreakdown("relative residual " + std::to_string(r.norm() / bn) +
                          " above tolerance");
  return x;
}

/// Factorization reused across several right-hand sides (one operator, many
/// loads).
template <class Scalar>
class SparseFactor {
public:
  using MatT = Eigen::SparseMatrix<Scalar>;
  using VecT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  explicit SparseFactor(MatT A) : a_(std::move(A)) {
    lu_.compute(a_);
    if (lu_.info() != Eigen::Success)
      throw SolverBreakdown("sparse LU factorization failed");
  }

  VecT solve(const VecT& b, double tol = 1e-10) const {
    double bn = b.norm();
    if (bn == 0.0) return VecT::Zero(b.size());
    VecT x = lu_.solve(b);
    VecT r = b - a_ * x;
    if (r.norm() > tol * bn) {
      x += lu_.solve(r).eval();
      r = b - a_ * x;
    }
    if (!(r.norm() <= tol * bn))
      throw SolverBreakdown("relative residual " + std::to_string(r.norm() / bn) +
                            " above tolerance");
    return x;
  }

  const MatT& matrix() const { return a_; }

private:
  MatT a_;
  Eigen::SparseLU<MatT> lu_;
};

} // namespace poro
