#pragma once

#include <optional>
#include <vector>

#include "nmr/linalg.hpp"

namespace nmr {

/// Ground-truth description of the part of a dense symmetric matrix's
/// spectrum that is visible through a given right-hand side: eigenvalues
/// whose eigenspaces carry a nonnegligible projection of g, with the
/// squared projection as the weight.
struct SpectrumReport {
  struct Entry {
    double lambda;
    double weight;  // squared norm of the projection of g on the eigenspace
  };
  std::vector<Entry> relevant;  // sorted by lambda, descending
  int psi_plus = 0;
  int psi_minus = 0;
  int psi_zero = 0;  // 0 or 1
  int grade = 0;     // = psi_plus + psi_minus + psi_zero
  double lambda_max_rel = 0.0;
  double lambda_min_rel = 0.0;

  double relevant_mass() const;  // sum of all weights
  double nonzero_mass() const;   // weights over nonzero eigenvalues only
  /// Fraction of the nonzero relevant mass carried by eigenvalues
  /// lambda_j..lambda_psi (1-indexed in the descending order).
  double nu_j(int j) const;
  /// lambda_1 / (-lambda_j) for a negative relevant eigenvalue.
  double kappa_j(int j) const;
};

SpectrumReport g_relevant_spectrum(const DenseSymmetricMatrix& M, const Vector& g,
                                   double eig_cluster_tol = 1e-8,
                                   double proj_tol = 1e-10);

/// Independent grade computation: numerical rank of [g, Mg, ..., M^{d-1}g].
int krylov_rank(const DenseSymmetricMatrix& M, const Vector& g,
                double tol = 1e-8);

/// Reference minimizer of ||M s + g|| over the order-t Krylov subspace,
/// via an explicitly orthogonalized basis and a dense least-squares solve.
Vector krylov_brute_force_minres(const DenseSymmetricMatrix& M, const Vector& g,
                                 int t);

/// Same minimizer through the normal equations; retained as a second,
/// algebraically distinct route for cross-validation.
Vector krylov_brute_force_minres_normal_eq(const DenseSymmetricMatrix& M,
                                           const Vector& g, int t);

/// Smallest eigenvalue of the symmetric tridiagonal with diagonal `alpha`
/// and off-diagonal `beta` (sizes t and t-1).
double lambda_min_tridiag(const std::vector<double>& alpha,
                          const std::vector<double>& beta);

/// Constants parameterizing the iteration-count calculators.
struct BoundInputs {
  double L_g = 1.0;  // bound on the magnitude of relevant eigenvalues
  double mu = 1.0;   // magnitude floor for the selected eigenvalues
  double nu = 1.0;   // selected fraction of the nonzero relevant mass
  double kappa_plus = 1.0;
  double kappa_minus = 1.0;
  int grade = 1;
};

/// Inputs for the inexactness-iteration bound with the selection
/// (i, j) = (psi_plus, psi_plus + psi_zero + 1) unless overridden.
BoundInputs sol_bound_inputs(const SpectrumReport& report,
                             std::optional<int> i = std::nullopt,
                             std::optional<int> j = std::nullopt);

/// Inputs for the detection-iteration bound over the negative block
/// starting at j (default: all negative relevant eigenvalues).
BoundInputs npc_bound_inputs(const SpectrumReport& report,
                             std::optional<int> j = std::nullopt);

/// Iterations until the inexactness test must fire.
int bound_T_S(const BoundInputs& inp, double eta);

/// Iterations until the curvature test must fire when psi_minus >= 1.
int bound_T_N(const BoundInputs& inp);

/// Convergence bound on lambda_min(T_t) - lambda_j for an indefinite
/// relevant spectrum.
double lanczos_eig_gap_bound(const SpectrumReport& report, int j, int t);

/// Randomized-probe iteration bound without structural assumptions.
int bound_T_NL(double L_g, double eps_h, double delta, int d);

/// Randomized-probe iteration bound under the benign-saddle property.
int bound_T_P(double L_g, double mu, double eps_h, double delta, int d);

}  // namespace nmr
