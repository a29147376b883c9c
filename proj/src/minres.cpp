#include "nmr/minres.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace nmr {

bool sol_test(double phi_prev, double gamma1, double delta1_next, double phi0,
              double eta) {
  const double lhs = phi_prev * std::hypot(gamma1, delta1_next);
  const double gap = std::max(phi0 * phi0 - phi_prev * phi_prev, 0.0);
  return lhs <= eta * std::sqrt(gap);
}

bool npc_test(double c_prev, double gamma1) { return c_prev * gamma1 >= 0.0; }

double residual_curvature(double c_prev, double gamma1, double shift) {
  return -c_prev * gamma1 - shift;
}

namespace {

char flag_of(MinresStop s) {
  switch (s) {
    case MinresStop::SolTest: return 'S';
    case MinresStop::NpcTest: return 'N';
    case MinresStop::ZeroCurvature: return 'Z';
    case MinresStop::Exhausted: return 'X';
    case MinresStop::MaxIterations: return 'M';
  }
  return '?';
}

}  // namespace

MinresResult run_minres(const SymmetricOperator& H, const Vector& g,
                        const MinresConfig& cfg, const MinresObserver& observer) {
  const int d = H.dim();
  if (static_cast<int>(g.size()) != d)
    throw std::invalid_argument("run_minres: dimension mismatch");
  const double phi0 = norm(g);
  if (phi0 == 0.0) throw std::invalid_argument("run_minres: zero right-hand side");
  if (cfg.max_iters < 1)
    throw std::invalid_argument("run_minres: max_iters must be >= 1");

  const double breakdown = cfg.beta_zero_tol * phi0;
  const auto n = static_cast<std::size_t>(d);

  MinresResult res;
  res.trace.reserve(32);

  // Working set: three Lanczos vectors, three update vectors, and the
  // current and previous iterate and residual.
  Vector v_prev(n, 0.0);
  Vector v = scaled(g, -1.0 / phi0);  // v_1 = r_0/phi_0 with r_0 = -g
  Vector v_next(n, 0.0);
  Vector q(n, 0.0);
  Vector w_prev2(n, 0.0);
  Vector w_prev(n, 0.0);
  Vector w(n, 0.0);
  Vector s_vec(n, 0.0);
  Vector s_vec_prev(n, 0.0);
  Vector r_vec = scaled(g, -1.0);  // r_0
  Vector r_vec_prev = r_vec;

  std::vector<Vector> basis;  // retained only when reorthogonalizing
  if (cfg.full_reorthogonalize) basis.push_back(v);

  double phi_prev = phi0;
  double c_prev = -1.0, s_prev = 0.0;
  double delta1 = 0.0;   // delta^{(1)}_t
  double tbeta = 0.0;    // beta_t
  double eps_cur = 0.0;  // eps_t
  double alpha_scale = 0.0;  // running max |alpha|, a cheap operator-norm proxy
  // Last evaluated curvature-test pair, reported on forced returns.
  double last_c_prev = -1.0, last_gamma1 = 0.0;
  bool have_next_v = true;

  auto finish = [&](Vector dir, DirectionType ty, int iters, MinresStop stop,
                    bool forced, double cp, double g1, double phi_out) {
    res.direction = std::move(dir);
    res.d_type = ty;
    res.iters = iters;
    res.stop = stop;
    res.forced = forced;
    res.c_prev = cp;
    res.gamma1 = g1;
    res.residual_curvature = -cp * g1;
    res.phi_final = phi_out;
    if (!res.trace.empty() && res.trace.back().flag == ' ')
      res.trace.back().flag = flag_of(stop);
    return std::move(res);
  };

  for (int t = 1; t <= cfg.max_iters; ++t) {
    if (!have_next_v) {
      // The Lanczos process terminated last iteration with the reduced
      // system solved (phi ~ 0): the inexactness test holds trivially here
      // without any further operator application.
      return finish(s_vec, DirectionType::Sol, t, MinresStop::Exhausted,
                    cfg.disable_sol_test, last_c_prev, last_gamma1, phi_prev);
    }

    // Lanczos step: the iteration's single operator application.
    H.apply(v, q);
    const double alpha = dot(v, q);
    if (t > 1) kernels::axpy(-tbeta, v_prev, q);
    kernels::axpy(-alpha, v, q);
    if (cfg.full_reorthogonalize) {
      // two Gram-Schmidt passes push the leftover components to round-off
      for (int pass = 0; pass < 2; ++pass)
        for (const Vector& b : basis) kernels::axpy(-dot(q, b), b, q);
    }
    const double tbeta_next = norm(q);
    if (!std::isfinite(alpha) || !std::isfinite(tbeta_next))
      throw std::runtime_error("run_minres: numerical breakdown");

    // Reflection of the new tridiagonal column.
    const double delta2 = c_prev * delta1 + s_prev * alpha;
    const double gamma1 = s_prev * delta1 - c_prev * alpha;
    const double eps_next = s_prev * tbeta_next;
    const double delta1_next = -c_prev * tbeta_next;

    last_c_prev = c_prev;
    last_gamma1 = gamma1;
    const double curv = -c_prev * gamma1;
    const double hs = std::sqrt(std::max(phi0 * phi0 - phi_prev * phi_prev, 0.0));
    const double hr = phi_prev * std::hypot(gamma1, delta1_next);
    res.trace.push_back({t, alpha, tbeta_next, phi_prev, curv, hs, hr, ' '});

    const bool sol_fires = !cfg.disable_sol_test &&
                           sol_test(phi_prev, gamma1, delta1_next, phi0, cfg.eta);
    const bool npc_fires = !cfg.disable_npc_test && npc_test(c_prev, gamma1);
    if (sol_fires) {
      if (t == 1 && npc_fires) {
        // Both tests pass together at t = 1 only when H g = 0; g itself is
        // then the zero-curvature direction.
        return finish(r_vec, DirectionType::Npc, t, MinresStop::NpcTest, false,
                      c_prev, gamma1, phi_prev);
      }
      return finish(s_vec, DirectionType::Sol, t, MinresStop::SolTest, false,
                    c_prev, gamma1, phi_prev);
    }
    if (npc_fires) {
      return finish(r_vec, DirectionType::Npc, t, MinresStop::NpcTest, false,
                    c_prev, gamma1, phi_prev);
    }

    const double gamma2 = std::hypot(gamma1, tbeta_next);
    const bool exhausted = tbeta_next <= breakdown;
    alpha_scale = std::max(alpha_scale, std::abs(alpha));

    if (exhausted && (gamma2 <= breakdown ||
                      std::abs(c_prev * gamma1) <= 1e-8 * alpha_scale)) {
      // Krylov exhaustion with a (numerically) singular reduced system:
      // the previous residual is a zero-curvature direction. A genuinely
      // solved system leaves a last pivot of the order of the smallest
      // relevant eigenvalue instead.
      if (!cfg.disable_npc_test) {
        return finish(r_vec, DirectionType::Npc, t, MinresStop::ZeroCurvature,
                      false, c_prev, gamma1, phi_prev);
      }
      // detection suppressed: leave the iterate as it stands
      return finish(s_vec, DirectionType::Sol, t, MinresStop::ZeroCurvature,
                    true, c_prev, gamma1, phi_prev);
    }

    const double c = gamma1 / gamma2;
    const double s = tbeta_next / gamma2;
    const double tau = c * phi_prev;
    const double phi = s * phi_prev;
    if (!std::isfinite(phi)) throw std::runtime_error("run_minres: numerical breakdown");

    for (int i = 0; i < d; ++i)
      w[i] = (v[i] - delta2 * w_prev[i] - eps_cur * w_prev2[i]) / gamma2;
    s_vec_prev = s_vec;
    kernels::axpy(tau, w, s_vec);

    r_vec_prev = r_vec;
    if (!exhausted) {
      v_next = scaled(q, 1.0 / tbeta_next);
      if (cfg.full_reorthogonalize) basis.push_back(v_next);
      // r_t = s_t^2 r_{t-1} - phi_t c_t v_{t+1}
      Vector r_new(n);
      kernels::combine(s * s, r_vec_prev, -phi * c, v_next, r_new);
      r_vec = std::move(r_new);
    } else {
      // beta_{t+1} vanished with a nonsingular pivot: the reduced system is
      // solved exactly, phi_t ~ 0, and no next Lanczos vector exists.
      r_vec = scaled(r_vec_prev, s * s);
      have_next_v = false;
    }

    if (observer) {
      observer(MinresState{t, phi0, phi_prev, phi, alpha, tbeta, tbeta_next,
                           c_prev, s_prev, c, s, gamma1, gamma2, delta1_next,
                           delta2, eps_next, tau, v_prev, v, w_prev2, w_prev, w,
                           s_vec_prev, s_vec, r_vec_prev, r_vec});
    }
    res.trace.back().phi = phi;

    // Shift the recurrence window.
    c_prev = c;
    s_prev = s;
    phi_prev = phi;
    delta1 = delta1_next;
    eps_cur = eps_next;
    tbeta = tbeta_next;
    std::swap(v_prev, v);
    std::swap(v, v_next);
    std::swap(w_prev2, w_prev);
    std::swap(w_prev, w);  // w_prev <- w_t; the old buffer is recycled
  }

  return finish(s_vec, DirectionType::Sol, cfg.max_iters,
                MinresStop::MaxIterations, true, last_c_prev, last_gamma1,
                phi_prev);
}

}  // namespace nmr
