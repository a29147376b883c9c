#include "nmr/linesearch.hpp"

namespace nmr {

bool armijo_holds(double f_trial, double f_x, double alpha, double slope,
                  double rho) {
  return f_trial <= f_x + rho * alpha * slope;
}

bool armijo2_holds(double f_trial, double f_x, double alpha, double dHd,
                   double rho) {
  return f_trial <= f_x + 0.5 * rho * alpha * alpha * dHd;
}

LineSearchOutcome backtrack(const Evaluate& evaluate, const AcceptTest& condition,
                            const LineSearchConfig& cfg) {
  LineSearchOutcome out;
  double alpha = cfg.alpha0;
  while (out.trials < cfg.max_ls_iters) {
    const double f = evaluate(alpha);
    ++out.trials;
    if (condition(f, alpha)) {
      out.alpha = alpha;
      out.f_new = f;
      out.status = LineSearchStatus::Accepted;
      return out;
    }
    alpha *= cfg.zeta;
    if (alpha < cfg.min_step) {
      out.alpha = alpha;
      out.f_new = f;
      out.status = LineSearchStatus::FailedMinStep;
      return out;
    }
  }
  out.alpha = alpha;
  out.status = LineSearchStatus::FailedMaxIters;
  return out;
}

LineSearchOutcome forward_backward(const Evaluate& evaluate,
                                   const AcceptTest& condition,
                                   const LineSearchConfig& cfg) {
  LineSearchOutcome out;
  double alpha = cfg.alpha0;
  double f = evaluate(alpha);
  ++out.trials;
  if (!condition(f, alpha)) {
    // Backward phase, continuing the trial count from the failed alpha0.
    alpha *= cfg.zeta;
    while (out.trials < cfg.max_ls_iters) {
      if (alpha < cfg.min_step) {
        out.alpha = alpha;
        out.f_new = f;
        out.status = LineSearchStatus::FailedMinStep;
        return out;
      }
      f = evaluate(alpha);
      ++out.trials;
      if (condition(f, alpha)) {
        out.alpha = alpha;
        out.f_new = f;
        out.status = LineSearchStatus::Accepted;
        return out;
      }
      alpha *= cfg.zeta;
    }
    out.alpha = alpha;
    out.status = LineSearchStatus::FailedMaxIters;
    return out;
  }

  // Forward phase: grow while the condition holds; the returned step is the
  // last trial that passed, i.e. zeta times the first failing trial.
  out.alpha = alpha;
  out.f_new = f;
  out.status = LineSearchStatus::Accepted;
  while (out.trials < cfg.max_ls_iters) {
    const double alpha_next = alpha / cfg.zeta;
    if (alpha_next > cfg.max_step) break;
    const double f_next = evaluate(alpha_next);
    ++out.trials;
    if (!condition(f_next, alpha_next)) break;
    alpha = alpha_next;
    out.alpha = alpha;
    out.f_new = f_next;
  }
  return out;
}

}  // namespace nmr
