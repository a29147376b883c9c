#pragma once

#include <functional>
#include <vector>

#include "nmr/linalg.hpp"

namespace nmr {

enum class DirectionType { Sol, Npc };

enum class MinresStop {
  SolTest,          // inexactness test fired
  NpcTest,          // nonpositive-curvature test fired
  ZeroCurvature,    // Krylov exhausted on a singular reduced system
  Exhausted,        // Krylov exhausted with the reduced system solved
  MaxIterations,
};

struct MinresConfig {
  double eta = 0.1;            // inexactness tolerance; 0 demands an exact solve
  int max_iters = 1000;
  double beta_zero_tol = 1e-12;  // relative to ||g||; Lanczos breakdown floor
  bool disable_sol_test = false;
  bool disable_npc_test = false;
  bool full_reorthogonalize = false;
};

/// Live per-iteration state handed to an observer; references stay valid
/// only during the callback.
struct MinresState {
  int t;
  double phi0;
  double phi_prev;        // phi_{t-1}
  double phi;             // phi_t
  double alpha;           // Lanczos diagonal entry
  double tbeta;           // beta_t
  double tbeta_next;      // beta_{t+1}
  double c_prev, s_prev;  // previous Givens pair
  double c, s;            // current Givens pair
  double gamma1, gamma2;
  double delta1_next, delta2, eps_next;
  double tau;
  const Vector& v_prev;
  const Vector& v;
  const Vector& w_prev2;
  const Vector& w_prev;
  const Vector& w;
  const Vector& s_vec_prev;
  const Vector& s_vec;
  const Vector& r_vec_prev;
  const Vector& r_vec;
};

struct MinresTraceRow {
  int t;
  double alpha;      // tridiagonal diagonal entry at t
  double beta_next;  // tridiagonal off-diagonal entry beta_{t+1}
  double phi;        // residual norm at the end of iteration t
  double curvature;  // -c_{t-1} gamma1_t, the Rayleigh quotient of r_{t-1}
  double hs_norm;    // ||H s_{t-1}|| from the scalar identity
  double hr_norm;    // ||H r_{t-1}|| from the scalar identity
  char flag;         // ' ', 'S'=SOL, 'N'=NPC, 'Z'=zero-curvature, 'X'=exhausted, 'M'=max-iters
};

struct MinresResult {
  Vector direction;
  DirectionType d_type = DirectionType::Sol;
  int iters = 0;
  MinresStop stop = MinresStop::SolTest;
  bool forced = false;           // neither test fired; termination was forced
  double residual_curvature = 0; // -c_{t-1} gamma1_t at return
  double c_prev = 0, gamma1 = 0; // raw pair behind residual_curvature
  double phi_final = 0;          // residual norm attached to the returned vector
  std::vector<MinresTraceRow> trace;
};

/// Inexactness test: phi_prev*sqrt(gamma1^2+delta1_next^2) <= eta*sqrt(phi0^2-phi_prev^2),
/// equivalently ||H r_{t-1}|| <= eta ||H s_{t-1}||.
bool sol_test(double phi_prev, double gamma1, double delta1_next, double phi0,
              double eta);

/// Curvature test: c_prev*gamma1 >= 0 means <r_{t-1}, H r_{t-1}> <= 0.
bool npc_test(double c_prev, double gamma1);

/// Curvature of the unit-normalized residual under the unshifted operator
/// when MINRES ran on the operator shifted by `shift`.
double residual_curvature(double c_prev, double gamma1, double shift);

using MinresObserver = std::function<void(const MinresState&)>;

MinresResult run_minres(const SymmetricOperator& H, const Vector& g,
                        const MinresConfig& cfg,
                        const MinresObserver& observer = nullptr);

}  // namespace nmr
