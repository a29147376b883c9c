#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "nmr/kernels.hpp"

namespace nmr {

using Vector = std::vector<double>;

double dot(const Vector& x, const Vector& y);
double norm(const Vector& x);
// y += a*x
void axpy_inplace(double a, const Vector& x, Vector& y);
Vector scaled(const Vector& x, double a);
Vector add_scaled(const Vector& x, double a, const Vector& y);  // x + a*y

/// Matrix-free symmetric operator: a dimension plus an apply map.
/// Each apply() bumps a tally shared by all shifted views of the
/// operator, which is what the oracle accounting reads back.
/// The tally is intentionally unsynchronized; one solver run owns an
/// operator instance at a time.
class SymmetricOperator {
 public:
  using ApplyFn = std::function<void(std::span<const double>, std::span<double>)>;

  SymmetricOperator(int dim, ApplyFn fn);

  int dim() const { return dim_; }
  long long apply_count() const { return *count_; }

  void apply(std::span<const double> v, std::span<double> out) const;
  Vector apply(const Vector& v) const;

  /// Operator mapping v to this->apply(v) + sigma*v, sharing this
  /// operator's apply tally.
  SymmetricOperator shifted(double sigma) const;

 private:
  SymmetricOperator(int dim, ApplyFn fn, std::shared_ptr<long long> count);

  int dim_;
  ApplyFn fn_;
  std::shared_ptr<long long> count_;
};

SymmetricOperator shift(const SymmetricOperator& op, double sigma);

/// Dense symmetric matrix, symmetrized on construction as (M + M^T)/2.
class DenseSymmetricMatrix {
 public:
  explicit DenseSymmetricMatrix(int dim);
  DenseSymmetricMatrix(int dim, std::vector<double> row_major_entries);

  int dim() const { return dim_; }
  double operator()(int i, int j) const {
    return data_[static_cast<std::size_t>(i) * dim_ + j];
  }
  /// Symmetric write: sets both (i,j) and (j,i).
  void set(int i, int j, double v);
  const std::vector<double>& data() const { return data_; }

  Vector matvec(const Vector& x) const;
  /// Counting operator view; copies the entries.
  SymmetricOperator as_operator() const;

  /// Largest |entry|-based cheap scale proxy and spectral norm bound.
  double inf_norm() const;

 private:
  int dim_;
  std::vector<double> data_;
};

SymmetricOperator identity_operator(int dim);
SymmetricOperator diagonal_operator(Vector diag);
SymmetricOperator zero_operator(int dim);

}  // namespace nmr
