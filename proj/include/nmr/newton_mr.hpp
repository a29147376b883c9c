#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "nmr/linesearch.hpp"
#include "nmr/minres.hpp"
#include "nmr/problems.hpp"
#include "nmr/rng.hpp"

namespace nmr {

enum class EtaMode {
  theory,  // inner tolerance theta*sqrt(eps_g)
  fixed,   // inner tolerance theta, the flat experimental setting
};

struct FirstOrderConfig {
  double eps_g = 1e-8;   // first-order tolerance, in (0, 1]
  double theta = 0.1;    // inexactness scale
  EtaMode eta_mode = EtaMode::theory;
  double rho_sol = 1e-4;  // Armijo parameter on solution steps, in (0, 1/2)
  double rho_npc = 1e-4;  // Armijo parameter on curvature steps, in (0, 1)
  LineSearchConfig ls;
  MinresConfig minres;    // template for the inner solver
  int max_outer_iters = 100000;
  double oracle_budget = 1e5;  // function-equivalent units
  bool diagnostics = false;    // per-step direction-quality checks (1 extra Hv)
};

struct SecondOrderConfig : FirstOrderConfig {
  double eps_h = 0.1;  // curvature tolerance, in (0, 1]
  std::uint64_t rng_seed = 0;
};

enum class StepKind { Sol, Npc, ProbeNpc, Certified };

struct IterationRecord {
  int k = 0;
  double f = 0.0;          // objective at x_k
  double grad_norm = 0.0;  // ||g_k||
  StepKind kind = StepKind::Sol;
  int inner_iters = 0;
  double alpha = 0.0;
  double step_norm = 0.0;   // ||d_k||
  double slope = 0.0;       // <g_k, d_k>
  double dir_curvature = 0.0;  // <d_k, H_k d_k> when known without extra products
  int ls_trials = 0;
  double oracle_total = 0.0;  // cumulative, function-equivalent
  double wall_time_s = 0.0;
};

enum class SolveStatus {
  FirstOrderOptimal,
  SecondOrderOptimal,
  BudgetExhausted,
  LineSearchFailed,
};

struct SolveResult {
  Vector x_final;
  SolveStatus status = SolveStatus::FirstOrderOptimal;
  double f_final = 0.0;
  double grad_norm_final = 0.0;
  std::vector<IterationRecord> trace;
  // Diagnostics-mode residual violations; zero when the mode is off.
  double max_sol_angle_violation = 0.0;  // <d, Hg> - tol*||g||*||Hd||, positive part
  double max_npc_identity_violation = 0.0;  // relative error in <d,g> = -||d||^2
};

SolveResult solve_first_order(const Problem& problem, const Vector& x0,
                              const FirstOrderConfig& cfg);

struct ProbeOutcome {
  Vector direction;   // unit norm, sign-aligned against the gradient
  double curvature;   // <d, H d> under the unshifted operator
  int inner_iters;
};

/// Curvature probe around a first-order stationary point: runs the inner
/// solver on H + (eps_h/2) I against a random unit vector with zero
/// inexactness tolerance. A detected NPC direction is returned normalized
/// and sign-flipped against g (sign(0) taken as +1); termination without
/// one certifies positive definiteness of the shifted operator on the
/// explored Krylov space.
std::optional<ProbeOutcome> negative_curvature_probe(const SymmetricOperator& H,
                                                     const Vector& g, double eps_h,
                                                     Rng& rng,
                                                     const MinresConfig& minres_cfg);

SolveResult solve_second_order(const Problem& problem, const Vector& x0,
                               const SecondOrderConfig& cfg);

}  // namespace nmr
