#pragma once

#include <functional>

namespace nmr {

struct LineSearchConfig {
  double rho = 1e-4;       // sufficient-decrease parameter, in (0,1)
  double zeta = 0.5;       // shrink/grow factor, in (0,1)
  double alpha0 = 1.0;     // initial trial step
  int max_ls_iters = 1000;
  double min_step = 1e-18;
  double max_step = 1e12;  // cap on forward growth
};

enum class LineSearchStatus { Accepted, FailedMinStep, FailedMaxIters };

struct LineSearchOutcome {
  double alpha = 0.0;
  double f_new = 0.0;
  int trials = 0;  // number of condition evaluations == objective evaluations
  LineSearchStatus status = LineSearchStatus::Accepted;
};

/// f_trial <= f_x + rho*alpha*slope, with slope = <g, d>.
bool armijo_holds(double f_trial, double f_x, double alpha, double slope,
                  double rho);

/// f_trial <= f_x + 0.5*rho*alpha^2*dHd, the curvature form used for
/// nonpositive-curvature steps near first-order stationary points.
bool armijo2_holds(double f_trial, double f_x, double alpha, double dHd,
                   double rho);

using Evaluate = std::function<double(double)>;           // alpha -> f(x+alpha*d)
using AcceptTest = std::function<bool(double, double)>;   // (f_trial, alpha) -> ok

/// Backward tracking: first alpha in {alpha0, zeta*alpha0, ...} passing the
/// condition.
LineSearchOutcome backtrack(const Evaluate& evaluate, const AcceptTest& condition,
                            const LineSearchConfig& cfg);

/// Forward/backward tracking: backtracks if alpha0 fails, otherwise grows the
/// step by 1/zeta while the condition keeps holding and returns the last
/// accepted trial.
LineSearchOutcome forward_backward(const Evaluate& evaluate,
                                   const AcceptTest& condition,
                                   const LineSearchConfig& cfg);

}  // namespace nmr
