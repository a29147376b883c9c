#include "nmr/newton_mr.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace nmr {

namespace {

using Clock = std::chrono::steady_clock;

void validate(const FirstOrderConfig& cfg) {
  if (!(cfg.eps_g > 0.0 && cfg.eps_g <= 1.0))
    throw std::invalid_argument("eps_g must lie in (0, 1]");
  if (!(cfg.rho_sol > 0.0 && cfg.rho_sol < 0.5))
    throw std::invalid_argument("rho_sol must lie in (0, 1/2)");
  if (!(cfg.rho_npc > 0.0 && cfg.rho_npc < 1.0))
    throw std::invalid_argument("rho_npc must lie in (0, 1)");
  if (cfg.theta <= 0.0) throw std::invalid_argument("theta must be positive");
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double inner_eta(const FirstOrderConfig& cfg) {
  return cfg.eta_mode == EtaMode::theory ? cfg.theta * std::sqrt(cfg.eps_g)
                                         : cfg.theta;
}

struct LoopShared {
  const Problem& problem;
  const FirstOrderConfig& cfg;
  SolveResult& res;
  Clock::time_point t0;
};

// One line-searched update x <- x + alpha*d. Returns false when the run
// must stop with the status already set on res.
bool take_step(LoopShared& sh, Vector& x, double& f_x, const Vector& d,
               StepKind kind, int inner_iters, double slope, double dHd,
               int k, double gnorm) {
  const auto& cfg = sh.cfg;
  LineSearchConfig ls = cfg.ls;
  ls.alpha0 = 1.0;

  Evaluate evaluate = [&](double alpha) {
    Vector trial = add_scaled(x, alpha, d);
    return sh.problem.f(trial);
  };

  LineSearchOutcome out;
  if (kind == StepKind::Sol) {
    out = backtrack(evaluate,
                    [&](double ft, double a) {
                      return armijo_holds(ft, f_x, a, slope, cfg.rho_sol);
                    },
                    ls);
  } else if (kind == StepKind::Npc) {
    out = forward_backward(evaluate,
                           [&](double ft, double a) {
                             return armijo_holds(ft, f_x, a, slope, cfg.rho_npc);
                           },
                           ls);
  } else {  // probe direction under the curvature condition
    out = forward_backward(evaluate,
                           [&](double ft, double a) {
                             return armijo2_holds(ft, f_x, a, dHd, cfg.rho_npc);
                           },
                           ls);
  }

  IterationRecord rec;
  rec.k = k;
  rec.f = f_x;
  rec.grad_norm = gnorm;
  rec.kind = kind;
  rec.inner_iters = inner_iters;
  rec.alpha = out.alpha;
  rec.step_norm = norm(d);
  rec.slope = slope;
  rec.dir_curvature = dHd;
  rec.ls_trials = out.trials;
  rec.oracle_total = sh.problem.counter().total();
  rec.wall_time_s = seconds_since(sh.t0);
  sh.res.trace.push_back(rec);

  if (out.status != LineSearchStatus::Accepted) {
    sh.res.status = SolveStatus::LineSearchFailed;
    return false;
  }
  axpy_inplace(out.alpha, d, x);
  f_x = out.f_new;
  return true;
}

void run_diagnostics(LoopShared& sh, const SymmetricOperator& H, const Vector& g,
                     const Vector& d, DirectionType ty, double hd_norm) {
  const double gnorm = norm(g);
  if (ty == DirectionType::Sol) {
    // One extra product: <d, Hg> must stay numerically nonpositive.
    const Vector hg = H.apply(g);
    const double dhg = dot(d, hg);
    const double viol = dhg - 1e-10 * gnorm * hd_norm;
    if (viol > sh.res.max_sol_angle_violation) sh.res.max_sol_angle_violation = viol;
  } else {
    const double dn2 = dot(d, d);
    const double rel = std::abs(dot(d, g) + dn2) / std::max(dn2, 1e-300);
    if (rel > sh.res.max_npc_identity_violation)
      sh.res.max_npc_identity_violation = rel;
  }
}

}  // namespace

SolveResult solve_first_order(const Problem& problem, const Vector& x0,
                              const FirstOrderConfig& cfg) {
  validate(cfg);
  SolveResult res;
  Vector x = x0;
  const auto t0 = Clock::now();
  LoopShared sh{problem, cfg, res, t0};

  double f_x = problem.f(x);
  for (int k = 0; k < cfg.max_outer_iters; ++k) {
    const Vector g = problem.grad(x);
    const double gnorm = norm(g);
    if (!std::isfinite(f_x) || !std::isfinite(gnorm))
      throw std::runtime_error("solve_first_order: non-finite objective or gradient");
    if (gnorm <= cfg.eps_g) {
      res.status = SolveStatus::FirstOrderOptimal;
      res.x_final = std::move(x);
      res.f_final = f_x;
      res.grad_norm_final = gnorm;
      return res;
    }
    if (problem.counter().total() > cfg.oracle_budget) {
      res.status = SolveStatus::BudgetExhausted;
      break;
    }

    const SymmetricOperator H = problem.hessian_at(x);
    MinresConfig mcfg = cfg.minres;
    mcfg.eta = inner_eta(cfg);
    const MinresResult inner = run_minres(H, g, mcfg);
    const Vector& d = inner.direction;
    const double slope = dot(g, d);
    const StepKind kind =
        inner.d_type == DirectionType::Sol ? StepKind::Sol : StepKind::Npc;
    if (cfg.diagnostics)
      run_diagnostics(sh, H, g, d, inner.d_type,
                      inner.trace.empty() ? 0.0 : inner.trace.back().hs_norm);

    if (!take_step(sh, x, f_x, d, kind, inner.iters, slope,
                   inner.residual_curvature, k, gnorm))
      break;
  }
  if (res.trace.size() >= static_cast<std::size_t>(cfg.max_outer_iters) &&
      res.status != SolveStatus::LineSearchFailed)
    res.status = SolveStatus::BudgetExhausted;
  res.x_final = std::move(x);
  res.f_final = f_x;
  res.grad_norm_final = norm(problem.grad(res.x_final));
  return res;
}

std::optional<ProbeOutcome> negative_curvature_probe(const SymmetricOperator& H,
                                                     const Vector& g, double eps_h,
                                                     Rng& rng,
                                                     const MinresConfig& minres_cfg) {
  if (eps_h <= 0.0)
    throw std::invalid_argument("negative_curvature_probe: eps_h must be positive");
  const int d = H.dim();
  const Vector gt = rng.unit_sphere(d);
  const SymmetricOperator Hs = shift(H, 0.5 * eps_h);

  MinresConfig cfg = minres_cfg;
  cfg.eta = 0.0;
  cfg.disable_sol_test = false;
  cfg.disable_npc_test = false;
  // Exhausting the Krylov space needs at most dim iterations.
  cfg.max_iters = std::min(cfg.max_iters, d);

  const MinresResult res = run_minres(Hs, gt, cfg);
  if (res.d_type != DirectionType::Npc) return std::nullopt;

  const Vector& r = res.direction;
  const double rn = norm(r);
  if (rn == 0.0) return std::nullopt;
  const double sgn = dot(g, r) >= 0.0 ? 1.0 : -1.0;  // sign(0) taken as +1
  ProbeOutcome out;
  out.direction = scaled(r, -sgn / rn);
  out.curvature = residual_curvature(res.c_prev, res.gamma1, 0.5 * eps_h);
  out.inner_iters = res.iters;
  return out;
}

SolveResult solve_second_order(const Problem& problem, const Vector& x0,
                               const SecondOrderConfig& cfg) {
  validate(cfg);
  if (!(cfg.eps_h > 0.0 && cfg.eps_h <= 1.0))
    throw std::invalid_argument("eps_h must lie in (0, 1]");
  SolveResult res;
  Vector x = x0;
  const auto t0 = Clock::now();
  LoopShared sh{problem, cfg, res, t0};
  Rng rng(Rng::mix(cfg.rng_seed, 0x5ec0ull));

  double f_x = problem.f(x);
  for (int k = 0; k < cfg.max_outer_iters; ++k) {
    const Vector g = problem.grad(x);
    const double gnorm = norm(g);
    if (!std::isfinite(f_x) || !std::isfinite(gnorm))
      throw std::runtime_error("solve_second_order: non-finite objective or gradient");
    if (problem.counter().total() > cfg.oracle_budget) {
      res.status = SolveStatus::BudgetExhausted;
      break;
    }

    if (gnorm > cfg.eps_g) {
      const SymmetricOperator H = problem.hessian_at(x);
      MinresConfig mcfg = cfg.minres;
      mcfg.eta = inner_eta(cfg);
      const MinresResult inner = run_minres(H, g, mcfg);
      const Vector& d = inner.direction;
      const double slope = dot(g, d);
      const StepKind kind =
          inner.d_type == DirectionType::Sol ? StepKind::Sol : StepKind::Npc;
      if (cfg.diagnostics)
        run_diagnostics(sh, H, g, d, inner.d_type,
                        inner.trace.empty() ? 0.0 : inner.trace.back().hs_norm);
      if (!take_step(sh, x, f_x, d, kind, inner.iters, slope,
                     inner.residual_curvature, k, gnorm))
        break;
      continue;
    }

    // First-order point: probe for residual negative curvature.
    const SymmetricOperator H = problem.hessian_at(x);
    const auto probe = negative_curvature_probe(H, g, cfg.eps_h, rng, cfg.minres);
    if (!probe) {
      IterationRecord rec;
      rec.k = k;
      rec.f = f_x;
      rec.grad_norm = gnorm;
      rec.kind = StepKind::Certified;
      rec.oracle_total = problem.counter().total();
      rec.wall_time_s = seconds_since(t0);
      res.trace.push_back(rec);
      res.status = SolveStatus::SecondOrderOptimal;
      res.x_final = std::move(x);
      res.f_final = f_x;
      res.grad_norm_final = gnorm;
      return res;
    }
    const double slope = dot(g, probe->direction);
    if (!take_step(sh, x, f_x, probe->direction, StepKind::ProbeNpc,
                   probe->inner_iters, slope, probe->curvature, k, gnorm))
      break;
  }
  if (res.trace.size() >= static_cast<std::size_t>(cfg.max_outer_iters) &&
      res.status != SolveStatus::LineSearchFailed &&
      res.status != SolveStatus::BudgetExhausted)
    res.status = SolveStatus::BudgetExhausted;
  res.x_final = std::move(x);
  res.f_final = f_x;
  res.grad_norm_final = norm(problem.grad(res.x_final));
  return res;
}

}  // namespace nmr
