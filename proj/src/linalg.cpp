#include "ipsolve/linalg.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/CholmodSupport>
#include <umfpack.h>

namespace ipsolve {

SparseSymmetric::SparseSymmetric(Storage upper) : upper_(std::move(upper)) {
  if (upper_.rows() != upper_.cols()) throw std::invalid_argument("SparseSymmetric: matrix must be square");
  if (!upper_.isCompressed()) upper_.makeCompressed();
  for (int col = 0; col < upper_.outerSize(); ++col) {
    for (Storage::InnerIterator it(upper_, col); it; ++it) {
      if (it.row() > col) throw std::invalid_argument("SparseSymmetric: entry below the diagonal");
    }
  }
}

SparseSymmetric SparseSymmetric::from_dense(const Matrix& dense) {
  if (dense.rows() != dense.cols()) throw std::invalid_argument("SparseSymmetric: matrix must be square");
  std::vector<Eigen::Triplet<double, int>> entries;
  for (int j = 0; j < dense.cols(); ++j) {
    for (int i = 0; i <= j; ++i) {
      if (i == j || dense(i, j) != 0.0) entries.emplace_back(i, j, dense(i, j));
    }
  }
  Storage upper(dense.rows(), dense.cols());
  upper.setFromTriplets(entries.begin(), entries.end());
  upper.makeCompressed();
  return SparseSymmetric(std::move(upper));
}

SparseSymmetric SparseSymmetric::identity(int n) {
  Storage upper(n, n);
  upper.setIdentity();
  upper.makeCompressed();
  return SparseSymmetric(std::move(upper));
}

int SparseSymmetric::find(int row, int col) const {
  const int* outer = upper_.outerIndexPtr();
  const int* inner = upper_.innerIndexPtr();
  const int* begin = inner + outer[col];
  const int* end = inner + outer[col + 1];
  const int* it = std::lower_bound(begin, end, row);
  if (it == end || *it != row) return -1;
  return static_cast<int>(it - inner);
}

Vector SparseSymmetric::multiply(const Vector& x) const {
  if (x.size() != dim()) throw std::invalid_argument("SparseSymmetric::multiply: dimension mismatch");
  return upper_.selfadjointView<Eigen::Upper>() * x;
}

Matrix SparseSymmetric::to_dense() const {
  Matrix upper = Matrix(upper_);
  Matrix full = upper + upper.transpose();
  full.diagonal() = upper.diagonal();
  return full;
}

Vector SparseSymmetric::diagonal() const { return upper_.diagonal(); }

double SparseSymmetric::max_abs() const {
  double m = 0.0;
  for (double v : values()) m = std::max(m, std::abs(v));
  return m;
}

double SparseSymmetric::frobenius_norm() const {
  double sum = 0.0;
  for (int col = 0; col < upper_.outerSize(); ++col) {
    for (Storage::InnerIterator it(upper_, col); it; ++it) {
      sum += (it.row() == col ? 1.0 : 2.0) * it.value() * it.value();
    }
  }
  return std::sqrt(sum);
}

struct SpdFactor::Impl {
  Eigen::CholmodSupernodalLLT<SparseSymmetric::Storage, Eigen::Upper> llt;
  std::mutex mutex;
  int dim = 0;
};

SpdFactor::SpdFactor(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
SpdFactor::SpdFactor(SpdFactor&&) noexcept = default;
SpdFactor& SpdFactor::operator=(SpdFactor&&) noexcept = default;
SpdFactor::~SpdFactor() = default;

int SpdFactor::dim() const { return impl_->dim; }

Vector SpdFactor::solve(const Vector& b) const {
  if (b.size() != impl_->dim) throw std::invalid_argument("SpdFactor::solve: dimension mismatch");
  std::lock_guard lock(impl_->mutex);
  return impl_->llt.solve(b);
}

std::optional<SpdFactor> cholesky(const SparseSymmetric& a) {
  auto impl = std::make_unique<SpdFactor::Impl>();
  impl->dim = a.dim();
  // Indefinite input is an expected outcome; keep CHOLMOD quiet about it.
  impl->llt.cholmod().print = 0;
  impl->llt.cholmod().error_handler = nullptr;
  impl->llt.compute(a.upper());
  if (impl->llt.info() != Eigen::Success) return std::nullopt;
  return SpdFactor(std::move(impl));
}

Vector solve_spd(const SpdFactor& factor, const Vector& b) { return factor.solve(b); }

std::optional<Vector> solve_indefinite(const SparseSymmetric& a, const Vector& b) {
  if (b.size() != a.dim()) throw std::invalid_argument("solve_indefinite: dimension mismatch");
  const int n = a.dim();
  if (n == 0) return Vector();
  SparseSymmetric::Storage full = a.upper().selfadjointView<Eigen::Upper>();
  full.makeCompressed();

  double control[UMFPACK_CONTROL];
  double info[UMFPACK_INFO];
  umfpack_di_defaults(control);
  control[UMFPACK_PRL] = 0;

  void* symbolic = nullptr;
  void* numeric = nullptr;
  int status = umfpack_di_symbolic(n, n, full.outerIndexPtr(), full.innerIndexPtr(), full.valuePtr(),
                                   &symbolic, control, info);
  if (status != UMFPACK_OK) {
    umfpack_di_free_symbolic(&symbolic);
    return std::nullopt;
  }
  status = umfpack_di_numeric(full.outerIndexPtr(), full.innerIndexPtr(), full.valuePtr(), symbolic,
                              &numeric, control, info);
  umfpack_di_free_symbolic(&symbolic);
  const double rcond = info[UMFPACK_RCOND];
  if (status != UMFPACK_OK || !(rcond >= 1e-12)) {
    umfpack_di_free_numeric(&numeric);
    return std::nullopt;
  }
  Vector x(n);
  status = umfpack_di_solve(UMFPACK_A, full.outerIndexPtr(), full.innerIndexPtr(), full.valuePtr(), x.data(),
                            b.data(), numeric, control, info);
  umfpack_di_free_numeric(&numeric);
  if (status != UMFPACK_OK || !x.allFinite()) return std::nullopt;
  return x;
}

}  // namespace ipsolve
