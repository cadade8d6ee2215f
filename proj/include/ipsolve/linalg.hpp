#pragma once

#include <memory>
#include <optional>
#include <span>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>

#include "ipsolve/types.hpp"

namespace ipsolve {

/// Symmetric sparse matrix holding only its upper triangle (diagonal
/// included) in compressed column storage. Column j of the upper triangle is
/// row j of the lower triangle, so the same arrays read as CSR of the lower
/// half.
class SparseSymmetric {
 public:
  using Storage = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

  SparseSymmetric() = default;
  /// Throws std::invalid_argument if `upper` is not square, not compressed,
  /// or has entries below the diagonal.
  explicit SparseSymmetric(Storage upper);

  /// Upper triangle of a dense symmetric matrix. Exact zeros off the
  /// diagonal are dropped; the diagonal is always stored.
  static SparseSymmetric from_dense(const Matrix& dense);
  static SparseSymmetric identity(int n);

  int dim() const { return static_cast<int>(upper_.rows()); }
  Eigen::Index nnz() const { return upper_.nonZeros(); }
  const Storage& upper() const { return upper_; }

  std::span<double> values() { return {upper_.valuePtr(), static_cast<std::size_t>(upper_.nonZeros())}; }
  std::span<const double> values() const {
    return {upper_.valuePtr(), static_cast<std::size_t>(upper_.nonZeros())};
  }
  /// Position of entry (row, col), row <= col, in values(); -1 if not stored.
  int find(int row, int col) const;

  Vector multiply(const Vector& x) const;
  double quadratic_form(const Vector& x) const { return x.dot(multiply(x)); }
  Matrix to_dense() const;
  Vector diagonal() const;
  /// Largest absolute entry.
  double max_abs() const;
  /// Frobenius norm of the full symmetric matrix.
  double frobenius_norm() const;

 private:
  Storage upper_;
};

/// Sparse Cholesky factor usable as the operator A^-1. Solves are
/// serialized internally, so one factor may be shared between threads.
class SpdFactor {
 public:
  SpdFactor(SpdFactor&&) noexcept;
  SpdFactor& operator=(SpdFactor&&) noexcept;
  ~SpdFactor();

  int dim() const;
  /// Throws std::invalid_argument on dimension mismatch.
  Vector solve(const Vector& b) const;

 private:
  struct Impl;
  explicit SpdFactor(std::unique_ptr<Impl> impl);
  std::unique_ptr<Impl> impl_;
  friend std::optional<SpdFactor> cholesky(const SparseSymmetric& a);
};

/// Sparse Cholesky. std::nullopt signals that a non-positive pivot was met,
/// i.e. A is not (numerically) positive definite. No retries happen here.
std::optional<SpdFactor> cholesky(const SparseSymmetric& a);

Vector solve_spd(const SpdFactor& factor, const Vector& b);

/// Direct LU solve of a symmetric, possibly indefinite system. Returns
/// std::nullopt when A is numerically singular (reciprocal pivot condition
/// below 1e-12) or the solution is not finite.
std::optional<Vector> solve_indefinite(const SparseSymmetric& a, const Vector& b);

/// Clamps the eigenvalues of a dense symmetric matrix to [0, inf).
template <typename Derived>
typename Derived::PlainObject project_to_psd(const Eigen::MatrixBase<Derived>& a) {
  using Plain = typename Derived::PlainObject;
  Eigen::SelfAdjointEigenSolver<Plain> eig(a.derived());
  const auto& values = eig.eigenvalues();
  if (values.minCoeff() >= 0.0) return a.derived();
  const auto& vectors = eig.eigenvectors();
  Plain projected = vectors * values.cwiseMax(0.0).asDiagonal() * vectors.transpose();
  return 0.5 * (projected + projected.transpose());
}

}  // namespace ipsolve
