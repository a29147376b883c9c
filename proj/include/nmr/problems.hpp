#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nmr/linalg.hpp"

namespace nmr {

/// Tally of objective, gradient, and Hessian-vector evaluations in
/// function-equivalent units.
struct OracleCounter {
  long long f_evals = 0;
  long long g_evals = 0;
  long long hv_evals = 0;
  double w_f = 1.0;
  double w_g = 2.0;
  double w_hv = 4.0;

  double total() const { return w_f * f_evals + w_g * g_evals + w_hv * hv_evals; }
  void reset() { f_evals = g_evals = hv_evals = 0; }
};

struct KnownOptimum {
  double f_star;
  std::string description;
};

/// Objective bundle: evaluators plus a matrix-free Hessian factory, all
/// charging one shared counter. Evaluators themselves are pure in x.
class Problem {
 public:
  using FFn = std::function<double(const Vector&)>;
  using GradFn = std::function<Vector(const Vector&)>;
  using HessFn = std::function<SymmetricOperator::ApplyFn(const Vector&)>;

  Problem(std::string name, int dim, FFn f, GradFn grad, HessFn hess);

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }

  double f(const Vector& x) const;
  Vector grad(const Vector& x) const;
  /// Counting Hessian-vector-product operator at x; never materializes H.
  SymmetricOperator hessian_at(const Vector& x) const;

  /// Accounting is shared mutable state behind the evaluators; a const
  /// Problem still tallies.
  OracleCounter& counter() const { return *counter_; }

  std::optional<KnownOptimum> known_optimum;

 private:
  std::string name_;
  int dim_;
  FFn f_;
  GradFn grad_;
  HessFn hess_;
  std::shared_ptr<OracleCounter> counter_;
};

struct SyntheticDataset {
  int n = 0;
  int d = 0;
  std::vector<double> rows;  // n*d, row-major
  std::vector<double> labels;  // 0/1
  std::uint64_t seed = 0;
};

/// Rows scaled standard normal; labels Bernoulli under a hidden logistic
/// model. Deterministic per seed.
SyntheticDataset synthetic_dataset(int n, int d, std::uint64_t seed);

void dataset_to_csv(const SyntheticDataset& ds, std::ostream& os);
SyntheticDataset dataset_from_csv(std::istream& is);

/// (1/n) sum_i (b_i - sigma(<a_i,x>))^2 + lambda * sum_j x_j^2/(1+x_j^2).
Problem regularized_nlls(const SyntheticDataset& data, double lambda);

Problem rosenbrock(int d);
/// f = x0^4/4 - x0^2/2 + sum_{i>0} x_i^2; saddle at 0, minima at (+-1, 0).
Problem quartic_saddle(int d);
Problem convex_quadratic(int d, std::uint64_t seed);
/// 0.5 x'Ax + (gamma/4)||x||^4 with indefinite A; bounded below.
Problem indefinite_quartic(int d, std::uint64_t seed, double gamma = 1.0);

/// Desk-scale analytic test set with known optima where available.
std::vector<Problem> analytic_suite();

struct PlantedInstance {
  DenseSymmetricMatrix H;
  Vector g;
};

/// H = Q diag(eigenvalues, padding) Q^T with seeded random orthogonal Q and
/// g = Q w carrying sqrt(weight) on each planted coordinate, so the
/// g-relevant spectrum is exactly the planted (eigenvalue, weight) set.
/// Padding eigenvalues are distinct positives in [3,5] with zero weight.
PlantedInstance planted_spectrum_instance(const std::vector<double>& eigenvalues,
                                          const std::vector<double>& weights,
                                          int d, std::uint64_t seed,
                                          bool identity_rotation = false);

}  // namespace nmr
