#include "nmr/harness.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <deque>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "nmr/rng.hpp"

namespace nmr {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void format_double(std::ostream& os, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  os << buf;
}

}  // namespace

Vector initial_point(const ProblemSpec& spec, std::uint64_t seed) {
  Rng rng(Rng::mix(seed, fnv1a(spec.name)));
  if (spec.init == InitStyle::standard_normal) return rng.normal_vector(spec.dim);
  return rng.unit_sphere(spec.dim);
}

std::uint64_t vector_hash(const Vector& v) {
  std::uint64_t h = 1469598103934665603ull;
  for (double x : v) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, sizeof(bits));
    for (int i = 0; i < 8; ++i) {
      h ^= (bits >> (8 * i)) & 0xffu;
      h *= 1099511628211ull;
    }
  }
  return h;
}

ProblemSpec spec_of(const Problem& prototype, InitStyle init,
                    std::function<Problem()> make) {
  return ProblemSpec{prototype.name(), prototype.dim(), init, std::move(make)};
}

std::vector<ProblemSpec> analytic_suite_specs() {
  std::vector<ProblemSpec> specs;
  const std::vector<Problem> protos = analytic_suite();
  for (std::size_t i = 0; i < protos.size(); ++i) {
    specs.push_back(ProblemSpec{protos[i].name(), protos[i].dim(),
                                InitStyle::unit_sphere,
                                [i]() { return analytic_suite()[i]; }});
  }
  return specs;
}

namespace {

RunStatus map_status(SolveStatus s) {
  switch (s) {
    case SolveStatus::FirstOrderOptimal:
    case SolveStatus::SecondOrderOptimal:
      return RunStatus::Converged;
    case SolveStatus::BudgetExhausted:
      return RunStatus::BudgetExhausted;
    case SolveStatus::LineSearchFailed:
      return RunStatus::LineSearchFailed;
  }
  return RunStatus::Error;
}

void write_trace_csv(const std::string& path, const std::vector<IterationRecord>& trace) {
  std::ofstream os(path);
  os << "k,f,grad_norm,kind,inner_iters,alpha,step_norm,ls_trials,oracle_total,wall_time_s\n";
  for (const auto& r : trace) {
    const char* kind = r.kind == StepKind::Sol       ? "SOL"
                       : r.kind == StepKind::Npc     ? "NPC"
                       : r.kind == StepKind::ProbeNpc ? "ProbeNPC"
                                                      : "Certified";
    os << r.k << ',';
    format_double(os, r.f);
    os << ',';
    format_double(os, r.grad_norm);
    os << ',' << kind << ',' << r.inner_iters << ',';
    format_double(os, r.alpha);
    os << ',';
    format_double(os, r.step_norm);
    os << ',' << r.ls_trials << ',';
    format_double(os, r.oracle_total);
    os << ',';
    format_double(os, r.wall_time_s);
    os << '\n';
  }
}

FirstOrderConfig first_order_config(const Protocol& proto) {
  FirstOrderConfig cfg;
  cfg.eps_g = proto.eps_g;
  cfg.theta = proto.theta;
  cfg.eta_mode = proto.eta_mode;
  cfg.ls.min_step = proto.min_step;
  cfg.minres.max_iters = proto.inner_max_iters;
  cfg.max_outer_iters = proto.max_outer_iters;
  cfg.oracle_budget = proto.budget;
  return cfg;
}

RunRecord finalize(const Problem& problem, const std::string& solver,
                   const SolveResult& sr, Clock::time_point t0,
                   const std::string& trace_path) {
  RunRecord rec;
  rec.solver = solver;
  rec.problem = problem.name();
  rec.status = map_status(sr.status);
  rec.iterations = static_cast<long long>(sr.trace.size());
  rec.f_final = sr.f_final;
  rec.grad_norm_final = sr.grad_norm_final;
  rec.oracle_total = problem.counter().total();
  rec.wall_time_s = seconds_since(t0);
  if (!trace_path.empty()) {
    write_trace_csv(trace_path, sr.trace);
    rec.trace_path = trace_path;
  }
  return rec;
}

}  // namespace

RunRecord run_newton_mr_first(const Problem& problem, const Vector& x0,
                              const Protocol& proto, std::uint64_t seed,
                              const std::string& trace_path) {
  (void)seed;
  const auto t0 = Clock::now();
  problem.counter() = OracleCounter{0, 0, 0, proto.weights.w_f, proto.weights.w_g,
                                    proto.weights.w_hv};
  const SolveResult sr = solve_first_order(problem, x0, first_order_config(proto));
  return finalize(problem, "newton-mr-1st", sr, t0, trace_path);
}

RunRecord run_newton_mr_second(const Problem& problem, const Vector& x0,
                               const Protocol& proto, std::uint64_t seed,
                               const std::string& trace_path) {
  const auto t0 = Clock::now();
  problem.counter() = OracleCounter{0, 0, 0, proto.weights.w_f, proto.weights.w_g,
                                    proto.weights.w_hv};
  SecondOrderConfig cfg;
  static_cast<FirstOrderConfig&>(cfg) = first_order_config(proto);
  cfg.eps_h = proto.eps_h;
  cfg.rng_seed = Rng::mix(seed, fnv1a(problem.name()));
  const SolveResult sr = solve_second_order(problem, x0, cfg);
  return finalize(problem, "newton-mr-2nd", sr, t0, trace_path);
}

RunRecord baseline_steepest_descent(const Problem& problem, const Vector& x0,
                                    const Protocol& proto) {
  const auto t0 = Clock::now();
  problem.counter() = OracleCounter{0, 0, 0, proto.weights.w_f, proto.weights.w_g,
                                    proto.weights.w_hv};
  RunRecord rec;
  rec.solver = "sd";
  rec.problem = problem.name();

  Vector x = x0;
  double f_x = problem.f(x);
  double warm_alpha = 1.0;
  long long iters = 0;
  RunStatus status = RunStatus::BudgetExhausted;
  double gn = 0.0;

  for (; iters < proto.max_outer_iters; ++iters) {
    const Vector g = problem.grad(x);
    gn = norm(g);
    if (gn <= proto.eps_g) {
      status = RunStatus::Converged;
      break;
    }
    if (problem.counter().total() > proto.budget) {
      status = RunStatus::BudgetExhausted;
      break;
    }
    const double slope = -gn * gn;
    LineSearchConfig ls;
    // Warm-started backtracking: retrying from one grid notch above the
    // last accepted step (capped at the unit step) keeps the trial count
    // near two per iteration.
    ls.alpha0 = std::clamp(warm_alpha / ls.zeta, proto.min_step * 2.0, 1.0);
    ls.min_step = proto.min_step;
    const Evaluate evaluate = [&](double a) {
      Vector trial = add_scaled(x, -a, g);
      return problem.f(trial);
    };
    const LineSearchOutcome out = backtrack(
        evaluate,
        [&](double ft, double a) { return armijo_holds(ft, f_x, a, slope, 1e-4); },
        ls);
    if (out.status != LineSearchStatus::Accepted) {
      status = RunStatus::LineSearchFailed;
      break;
    }
    axpy_inplace(-out.alpha, g, x);
    f_x = out.f_new;
    warm_alpha = out.alpha;
  }

  rec.status = status;
  rec.iterations = iters;
  rec.f_final = f_x;
  rec.grad_norm_final = gn;
  rec.oracle_total = problem.counter().total();
  rec.wall_time_s = seconds_since(t0);
  return rec;
}

namespace {

struct WolfeResult {
  bool ok = false;
  double alpha = 0.0;
  double f_new = 0.0;
  Vector g_new;
};

// Strong Wolfe search (bracket then bisection zoom); c1, c2 per protocol.
// When rounding prevents certifying the curvature condition the best
// sufficient-decrease trial seen is accepted instead of reporting failure.
WolfeResult strong_wolfe(const Problem& problem, const Vector& x, const Vector& d,
                         double f0, double slope0, double c1, double c2,
                         double min_step, int max_trials) {
  WolfeResult best;
  WolfeResult fallback;  // best Armijo-passing trial so far
  auto eval = [&](double a, double& f_a, Vector& g_a) {
    Vector trial = add_scaled(x, a, d);
    f_a = problem.f(trial);
    g_a = problem.grad(trial);
    if (f_a <= f0 + c1 * a * slope0 && (!fallback.ok || f_a < fallback.f_new)) {
      fallback.ok = true;
      fallback.alpha = a;
      fallback.f_new = f_a;
      fallback.g_new = g_a;
    }
  };
  auto zoom = [&](double lo, double hi, double f_lo, int trials_left) {
    for (int j = 0; j < trials_left; ++j) {
      const double a = 0.5 * (lo + hi);
      if (std::abs(hi - lo) < min_step || a < min_step) return;
      double f_a;
      Vector g_a;
      eval(a, f_a, g_a);
      if (f_a > f0 + c1 * a * slope0 || f_a >= f_lo) {
        hi = a;
      } else {
        const double da = dot(g_a, d);
        if (std::abs(da) <= -c2 * slope0) {
          best.ok = true;
          best.alpha = a;
          best.f_new = f_a;
          best.g_new = std::move(g_a);
          return;
        }
        if (da * (hi - lo) >= 0.0) hi = lo;
        lo = a;
        f_lo = f_a;
      }
    }
  };

  double a_prev = 0.0, f_prev = f0;
  double a = 1.0;
  for (int i = 1; i <= max_trials; ++i) {
    double f_a;
    Vector g_a;
    eval(a, f_a, g_a);
    if (f_a > f0 + c1 * a * slope0 || (i > 1 && f_a >= f_prev)) {
      zoom(a_prev, a, f_prev, max_trials - i);
      return best.ok ? best : fallback;
    }
    const double da = dot(g_a, d);
    if (std::abs(da) <= -c2 * slope0) {
      best.ok = true;
      best.alpha = a;
      best.f_new = f_a;
      best.g_new = std::move(g_a);
      return best;
    }
    if (da >= 0.0) {
      zoom(a, a_prev, f_a, max_trials - i);
      return best.ok ? best : fallback;
    }
    a_prev = a;
    f_prev = f_a;
    a = std::min(2.0 * a, 1e12);
  }
  return best.ok ? best : fallback;
}

}  // namespace

RunRecord baseline_lbfgs(const Problem& problem, const Vector& x0,
                         const Protocol& proto, int memory) {
  if (memory < 1) throw std::invalid_argument("baseline_lbfgs: memory must be >= 1");
  const auto t0 = Clock::now();
  problem.counter() = OracleCounter{0, 0, 0, proto.weights.w_f, proto.weights.w_g,
                                    proto.weights.w_hv};
  RunRecord rec;
  rec.solver = "lbfgs";
  rec.problem = problem.name();

  const int d = problem.dim();
  Vector x = x0;
  double f_x = problem.f(x);
  Vector g = problem.grad(x);
  std::deque<std::pair<Vector, Vector>> pairs;  // (s, y)
  long long iters = 0;
  RunStatus status = RunStatus::BudgetExhausted;
  double gn = norm(g);

  for (; iters < proto.max_outer_iters; ++iters) {
    gn = norm(g);
    if (gn <= proto.eps_g) {
      status = RunStatus::Converged;
      break;
    }
    if (problem.counter().total() > proto.budget) {
      status = RunStatus::BudgetExhausted;
      break;
    }

    // Two-loop recursion.
    Vector q = g;
    std::vector<double> a_coef(pairs.size());
    for (int i = static_cast<int>(pairs.size()) - 1; i >= 0; --i) {
      const auto& [s, y] = pairs[static_cast<std::size_t>(i)];
      const double rho = 1.0 / dot(y, s);
      a_coef[static_cast<std::size_t>(i)] = rho * dot(s, q);
      axpy_inplace(-a_coef[static_cast<std::size_t>(i)], y, q);
    }
    if (!pairs.empty()) {
      const auto& [s, y] = pairs.back();
      const double gamma = dot(s, y) / dot(y, y);
      kernels::scal(gamma, q);
    }
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const auto& [s, y] = pairs[i];
      const double rho = 1.0 / dot(y, s);
      const double b = rho * dot(y, q);
      axpy_inplace(a_coef[i] - b, s, q);
    }
    Vector dir(static_cast<std::size_t>(d));
    kernels::combine(-1.0, q, 0.0, q, dir);

    double slope = dot(g, dir);
    if (slope >= 0.0) {  // fall back to steepest descent
      dir = scaled(g, -1.0);
      slope = -gn * gn;
    }

    const WolfeResult w =
        strong_wolfe(problem, x, dir, f_x, slope, 1e-4, 0.1, proto.min_step, 60);
    if (!w.ok) {
      status = RunStatus::LineSearchFailed;
      break;
    }

    Vector s = scaled(dir, w.alpha);
    Vector y(static_cast<std::size_t>(d));
    kernels::combine(1.0, w.g_new, -1.0, g, y);
    const double sy = dot(s, y);
    if (sy > 1e-14 * norm(s) * norm(y)) {
      pairs.emplace_back(std::move(s), std::move(y));
      if (static_cast<int>(pairs.size()) > memory) pairs.pop_front();
    }
    axpy_inplace(w.alpha, dir, x);
    f_x = w.f_new;
    g = w.g_new;
  }

  rec.status = status;
  rec.iterations = iters;
  rec.f_final = f_x;
  rec.grad_norm_final = gn;
  rec.oracle_total = problem.counter().total();
  rec.wall_time_s = seconds_since(t0);
  return rec;
}

// CG-Steihaug on the quadratic model, with negative-curvature and boundary
// exits to the trust-region surface.
SteihaugResult steihaug(const SymmetricOperator& H, const Vector& g, double radius,
                        double rtol, int max_iters) {
  const int d = H.dim();
  SteihaugResult out;
  Vector z(static_cast<std::size_t>(d), 0.0);
  Vector r = g;
  Vector dir = scaled(g, -1.0);
  const double gn = norm(g);
  double rr = gn * gn;

  auto to_boundary = [&](const Vector& base, const Vector& step) {
    const double bd = dot(base, step);
    const double ss = dot(step, step);
    const double bb = dot(base, base);
    const double disc = std::max(bd * bd + ss * (radius * radius - bb), 0.0);
    const double tau = (-bd + std::sqrt(disc)) / ss;
    return add_scaled(base, tau, step);
  };

  for (int j = 0; j < max_iters; ++j) {
    ++out.iters;
    const Vector hd = H.apply(dir);
    const double dhd = dot(dir, hd);
    if (dhd <= 0.0) {
      out.p = to_boundary(z, dir);
      out.boundary = true;
      return out;
    }
    const double alpha = rr / dhd;
    Vector z_next = add_scaled(z, alpha, dir);
    if (norm(z_next) >= radius) {
      out.p = to_boundary(z, dir);
      out.boundary = true;
      return out;
    }
    Vector r_next = add_scaled(r, alpha, hd);
    const double rr_next = dot(r_next, r_next);
    if (std::sqrt(rr_next) <= rtol * gn) {
      out.p = std::move(z_next);
      return out;
    }
    const double beta = rr_next / rr;
    Vector dir_next(static_cast<std::size_t>(d));
    kernels::combine(-1.0, r_next, beta, dir, dir_next);
    z = std::move(z_next);
    r = std::move(r_next);
    dir = std::move(dir_next);
    rr = rr_next;
  }
  out.p = std::move(z);
  return out;
}

RunRecord baseline_tr_steihaug(const Problem& problem, const Vector& x0,
                               const Protocol& proto) {
  const auto t0 = Clock::now();
  problem.counter() = OracleCounter{0, 0, 0, proto.weights.w_f, proto.weights.w_g,
                                    proto.weights.w_hv};
  RunRecord rec;
  rec.solver = "tr-steihaug";
  rec.problem = problem.name();

  Vector x = x0;
  double f_x = problem.f(x);
  double radius = proto.tr_init_radius;
  long long iters = 0;
  RunStatus status = RunStatus::BudgetExhausted;
  double gn = 0.0;

  for (; iters < proto.max_outer_iters; ++iters) {
    const Vector g = problem.grad(x);
    gn = norm(g);
    if (gn <= proto.eps_g) {
      status = RunStatus::Converged;
      break;
    }
    if (problem.counter().total() > proto.budget) {
      status = RunStatus::BudgetExhausted;
      break;
    }

    const SymmetricOperator H = problem.hessian_at(x);
    const SteihaugResult inner =
        steihaug(H, g, radius, 0.1, proto.inner_max_iters);
    const Vector hp = H.apply(inner.p);
    const double predicted = -(dot(g, inner.p) + 0.5 * dot(inner.p, hp));
    const double f_trial = problem.f(add_scaled(x, 1.0, inner.p));
    const double actual = f_x - f_trial;

    if (predicted > 0.0 && actual > 0.2 * predicted)
      radius = std::min(3.0 * radius, proto.tr_max_radius);
    else
      radius *= 0.5;

    if (actual > 0.0) {
      axpy_inplace(1.0, inner.p, x);
      f_x = f_trial;
    }
    if (radius < proto.min_step) {
      status = RunStatus::LineSearchFailed;
      break;
    }
  }

  rec.status = status;
  rec.iterations = iters;
  rec.f_final = f_x;
  rec.grad_norm_final = gn;
  rec.oracle_total = problem.counter().total();
  rec.wall_time_s = seconds_since(t0);
  return rec;
}

bool is_known_solver(const std::string& name) {
  return name == "newton-mr-1st" || name == "newton-mr-2nd" || name == "sd" ||
         name == "lbfgs" || name == "tr-steihaug";
}

std::vector<std::string> default_solvers() {
  return {"newton-mr-1st", "newton-mr-2nd", "sd", "lbfgs", "tr-steihaug"};
}

std::vector<RunRecord> run_grid(const std::vector<std::string>& solvers,
                                const std::vector<ProblemSpec>& problems,
                                const std::vector<std::uint64_t>& seeds,
                                const Protocol& proto, bool parallel,
                                const std::string& trace_dir) {
  for (const auto& s : solvers)
    if (!is_known_solver(s)) throw std::invalid_argument("unknown solver: " + s);

  struct Cell {
    std::size_t solver, problem, seed;
  };
  std::vector<Cell> cells;
  for (std::size_t si = 0; si < solvers.size(); ++si)
    for (std::size_t pi = 0; pi < problems.size(); ++pi)
      for (std::size_t ki = 0; ki < seeds.size(); ++ki) cells.push_back({si, pi, ki});

  std::vector<RunRecord> records(cells.size());
  const int nthreads = parallel ? omp_get_max_threads() : 1;

#pragma omp parallel for schedule(dynamic) num_threads(nthreads)
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const Cell& cell = cells[c];
    const std::string& solver = solvers[cell.solver];
    const ProblemSpec& spec = problems[cell.problem];
    const std::uint64_t seed = seeds[cell.seed];
    RunRecord rec;
    rec.solver = solver;
    rec.problem = spec.name;
    rec.seed = seed;
    try {
      Problem problem = spec.make();
      const Vector x0 = initial_point(spec, seed);
      std::string trace_path;
      if (!trace_dir.empty())
        trace_path = trace_dir + "/trace_" + solver + "_" + spec.name + "_" +
                     std::to_string(seed) + ".csv";
      if (solver == "newton-mr-1st") {
        rec = run_newton_mr_first(problem, x0, proto, seed, trace_path);
      } else if (solver == "newton-mr-2nd") {
        rec = run_newton_mr_second(problem, x0, proto, seed, trace_path);
      } else if (solver == "sd") {
        rec = baseline_steepest_descent(problem, x0, proto);
      } else if (solver == "lbfgs") {
        rec = baseline_lbfgs(problem, x0, proto, proto.lbfgs_memory);
      } else {
        rec = baseline_tr_steihaug(problem, x0, proto);
      }
      rec.seed = seed;
    } catch (const std::exception&) {
      rec.status = RunStatus::Error;
    }
    records[c] = std::move(rec);
  }
  return records;
}

std::vector<ProfileCurve> performance_profile(const std::vector<RunRecord>& records,
                                              ProfileMetric metric) {
  if (records.empty()) throw std::invalid_argument("performance_profile: no records");
  const double inf = std::numeric_limits<double>::infinity();

  auto metric_of = [&](const RunRecord& r) {
    if (r.status != RunStatus::Converged && r.status != RunStatus::BudgetExhausted &&
        r.status != RunStatus::LineSearchFailed)
      return inf;
    switch (metric) {
      case ProfileMetric::f_final: return r.f_final;
      case ProfileMetric::grad_norm_final: return r.grad_norm_final;
      case ProfileMetric::oracle_total: return r.oracle_total;
    }
    return inf;
  };
  // Runs that failed to converge are charged an unattainable value.
  auto failed = [](const RunRecord& r) { return r.status != RunStatus::Converged; };

  std::vector<std::string> solvers, problem_keys;
  for (const auto& r : records) {
    if (std::find(solvers.begin(), solvers.end(), r.solver) == solvers.end())
      solvers.push_back(r.solver);
    const std::string key = r.problem + "#" + std::to_string(r.seed);
    if (std::find(problem_keys.begin(), problem_keys.end(), key) ==
        problem_keys.end())
      problem_keys.push_back(key);
  }

  // Objective values can be nonpositive; shift to a positive range first.
  double shift = 0.0;
  if (metric == ProfileMetric::f_final) {
    double lo = inf;
    for (const auto& r : records) {
      const double m = metric_of(r);
      if (!failed(r) && m < lo) lo = m;
    }
    if (lo < inf) shift = -lo + 1e-16;
  }

  const std::size_t S = solvers.size(), P = problem_keys.size();
  std::vector<std::vector<double>> val(S, std::vector<double>(P, inf));
  for (const auto& r : records) {
    const auto si = static_cast<std::size_t>(
        std::find(solvers.begin(), solvers.end(), r.solver) - solvers.begin());
    const std::string key = r.problem + "#" + std::to_string(r.seed);
    const auto pi = static_cast<std::size_t>(
        std::find(problem_keys.begin(), problem_keys.end(), key) -
        problem_keys.begin());
    val[si][pi] = failed(r) ? inf : metric_of(r) + shift;
  }

  std::vector<double> best(P, inf);
  for (std::size_t p = 0; p < P; ++p)
    for (std::size_t s = 0; s < S; ++s) best[p] = std::min(best[p], val[s][p]);

  // Common breakpoint grid over all finite performance ratios.
  std::set<double> taus{1.0};
  for (std::size_t p = 0; p < P; ++p) {
    if (!(best[p] < inf)) continue;
    for (std::size_t s = 0; s < S; ++s) {
      if (!(val[s][p] < inf)) continue;
      if (best[p] > 0.0)
        taus.insert(std::max(val[s][p] / best[p], 1.0));
      else if (val[s][p] == 0.0)
        taus.insert(1.0);
    }
  }

  std::vector<ProfileCurve> curves(S);
  for (std::size_t s = 0; s < S; ++s) {
    curves[s].solver = solvers[s];
    for (double tau : taus) {
      std::size_t count = 0;
      for (std::size_t p = 0; p < P; ++p) {
        if (!(best[p] < inf) || !(val[s][p] < inf)) continue;
        // Tiny slack absorbs the division/multiplication round-off.
        if (val[s][p] <= tau * best[p] * (1.0 + 1e-12)) ++count;
      }
      curves[s].points.emplace_back(tau, static_cast<double>(count) /
                                             static_cast<double>(P));
    }
  }
  return curves;
}

const char* const kRecordsCsvHeader =
    "solver,problem,seed,status,iterations,f_final,grad_norm_final,oracle_total,"
    "wall_time_s";

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Converged: return "Converged";
    case RunStatus::BudgetExhausted: return "BudgetExhausted";
    case RunStatus::LineSearchFailed: return "LineSearchFailed";
    case RunStatus::Error: return "Error";
  }
  return "Error";
}

RunStatus run_status_from_string(const std::string& s) {
  if (s == "Converged") return RunStatus::Converged;
  if (s == "BudgetExhausted") return RunStatus::BudgetExhausted;
  if (s == "LineSearchFailed") return RunStatus::LineSearchFailed;
  if (s == "Error") return RunStatus::Error;
  throw std::invalid_argument("unknown run status: " + s);
}

std::string to_string(ProfileMetric m) {
  switch (m) {
    case ProfileMetric::f_final: return "f_final";
    case ProfileMetric::grad_norm_final: return "grad_norm_final";
    case ProfileMetric::oracle_total: return "oracle_total";
  }
  return "f_final";
}

ProfileMetric profile_metric_from_string(const std::string& s) {
  if (s == "f_final") return ProfileMetric::f_final;
  if (s == "grad_norm_final") return ProfileMetric::grad_norm_final;
  if (s == "oracle_total") return ProfileMetric::oracle_total;
  throw std::invalid_argument("unknown profile metric: " + s);
}

void write_records_csv(std::ostream& os, const std::vector<RunRecord>& records) {
  os << kRecordsCsvHeader << '\n';
  for (const auto& r : records) {
    os << r.solver << ',' << r.problem << ',' << r.seed << ','
       << to_string(r.status) << ',' << r.iterations << ',';
    format_double(os, r.f_final);
    os << ',';
    format_double(os, r.grad_norm_final);
    os << ',';
    format_double(os, r.oracle_total);
    os << ',';
    format_double(os, r.wall_time_s);
    os << '\n';
  }
}

std::vector<RunRecord> read_records_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("records csv: empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kRecordsCsvHeader) throw std::runtime_error("records csv: bad header");
  std::vector<RunRecord> out;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 9) throw std::runtime_error("records csv: bad row");
    RunRecord r;
    r.solver = cells[0];
    r.problem = cells[1];
    r.seed = std::stoull(cells[2]);
    r.status = run_status_from_string(cells[3]);
    r.iterations = std::stoll(cells[4]);
    r.f_final = std::stod(cells[5]);
    r.grad_norm_final = std::stod(cells[6]);
    r.oracle_total = std::stod(cells[7]);
    r.wall_time_s = std::stod(cells[8]);
    out.push_back(std::move(r));
  }
  return out;
}

void write_profile_csv(std::ostream& os, const std::vector<ProfileCurve>& curves) {
  os << "solver,tau,fraction\n";
  for (const auto& c : curves) {
    for (const auto& [tau, frac] : c.points) {
      os << c.solver << ',';
      format_double(os, tau);
      os << ',';
      format_double(os, frac);
      os << '\n';
    }
  }
}

}  // namespace nmr
