#include "nmr/linalg.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace nmr {

double dot(const Vector& x, const Vector& y) {
  if (x.size() != y.size()) throw std::invalid_argument("dot: dimension mismatch");
  return kernels::dot(x, y);
}

double norm(const Vector& x) { return kernels::nrm2(x); }

void axpy_inplace(double a, const Vector& x, Vector& y) {
  if (x.size() != y.size()) throw std::invalid_argument("axpy: dimension mismatch");
  kernels::axpy(a, x, y);
}

Vector scaled(const Vector& x, double a) {
  Vector out(x);
  kernels::scal(a, out);
  return out;
}

Vector add_scaled(const Vector& x, double a, const Vector& y) {
  Vector out(x.size());
  kernels::combine(1.0, x, a, y, out);
  return out;
}

SymmetricOperator::SymmetricOperator(int dim, ApplyFn fn)
    : dim_(dim), fn_(std::move(fn)), count_(std::make_shared<long long>(0)) {
  if (dim <= 0) throw std::invalid_argument("operator dimension must be positive");
}

SymmetricOperator::SymmetricOperator(int dim, ApplyFn fn,
                                     std::shared_ptr<long long> count)
    : dim_(dim), fn_(std::move(fn)), count_(std::move(count)) {}

void SymmetricOperator::apply(std::span<const double> v,
                              std::span<double> out) const {
  if (static_cast<int>(v.size()) != dim_ || static_cast<int>(out.size()) != dim_)
    throw std::invalid_argument("operator apply: dimension mismatch");
  ++*count_;
  fn_(v, out);
}

Vector SymmetricOperator::apply(const Vector& v) const {
  Vector out(static_cast<std::size_t>(dim_));
  apply(std::span<const double>(v), std::span<double>(out));
  return out;
}

SymmetricOperator SymmetricOperator::shifted(double sigma) const {
  ApplyFn inner = fn_;
  const int d = dim_;
  ApplyFn fn = [inner, sigma, d](std::span<const double> v, std::span<double> out) {
    inner(v, out);
    for (int i = 0; i < d; ++i) out[i] += sigma * v[i];
  };
  return SymmetricOperator(dim_, std::move(fn), count_);
}

SymmetricOperator shift(const SymmetricOperator& op, double sigma) {
  return op.shifted(sigma);
}

DenseSymmetricMatrix::DenseSymmetricMatrix(int dim)
    : dim_(dim), data_(static_cast<std::size_t>(dim) * dim, 0.0) {
  if (dim <= 0) throw std::invalid_argument("matrix dimension must be positive");
}

DenseSymmetricMatrix::DenseSymmetricMatrix(int dim, std::vector<double> entries)
    : dim_(dim), data_(std::move(entries)) {
  if (dim <= 0) throw std::invalid_argument("matrix dimension must be positive");
  if (data_.size() != static_cast<std::size_t>(dim) * dim)
    throw std::invalid_argument("matrix entries: size mismatch");
  for (int i = 0; i < dim_; ++i) {
    for (int j = i + 1; j < dim_; ++j) {
      const std::size_t ij = static_cast<std::size_t>(i) * dim_ + j;
      const std::size_t ji = static_cast<std::size_t>(j) * dim_ + i;
      const double m = 0.5 * (data_[ij] + data_[ji]);
      data_[ij] = m;
      data_[ji] = m;
    }
  }
}

void DenseSymmetricMatrix::set(int i, int j, double v) {
  data_[static_cast<std::size_t>(i) * dim_ + j] = v;
  data_[static_cast<std::size_t>(j) * dim_ + i] = v;
}

Vector DenseSymmetricMatrix::matvec(const Vector& x) const {
  if (static_cast<int>(x.size()) != dim_)
    throw std::invalid_argument("matvec: dimension mismatch");
  Vector out(static_cast<std::size_t>(dim_));
  kernels::symv(data_, dim_, x, out);
  return out;
}

SymmetricOperator DenseSymmetricMatrix::as_operator() const {
  auto entries = std::make_shared<std::vector<double>>(data_);
  const int d = dim_;
  return SymmetricOperator(
      d, [entries, d](std::span<const double> v, std::span<double> out) {
        kernels::symv(*entries, d, v, out);
      });
}

double DenseSymmetricMatrix::inf_norm() const {
  double best = 0.0;
  for (int i = 0; i < dim_; ++i) {
    double row = 0.0;
    for (int j = 0; j < dim_; ++j) row += std::abs((*this)(i, j));
    if (row > best) best = row;
  }
  return best;
}

SymmetricOperator identity_operator(int dim) {
  return SymmetricOperator(dim,
                           [](std::span<const double> v, std::span<double> out) {
                             for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i];
                           });
}

SymmetricOperator diagonal_operator(Vector diag) {
  const int d = static_cast<int>(diag.size());
  auto dd = std::make_shared<Vector>(std::move(diag));
  return SymmetricOperator(d, [dd](std::span<const double> v, std::span<double> out) {
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = (*dd)[i] * v[i];
  });
}

SymmetricOperator zero_operator(int dim) {
  return SymmetricOperator(dim,
                           [](std::span<const double> v, std::span<double> out) {
                             for (std::size_t i = 0; i < v.size(); ++i) out[i] = 0.0;
                           });
}

}  // namespace nmr
