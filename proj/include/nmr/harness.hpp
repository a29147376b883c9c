#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "nmr/newton_mr.hpp"
#include "nmr/problems.hpp"

namespace nmr {

/// Experimental protocol shared by every solver in a grid.
struct Protocol {
  double eps_g = 1e-10;      // success when the gradient norm falls below this
  double eps_h = 0.1;        // curvature tolerance for the second-order solver
  double theta = 0.1;        // inner inexactness scale
  EtaMode eta_mode = EtaMode::fixed;  // flat inner tolerance, as run in practice
  double budget = 1e5;       // oracle-call cap in function-equivalent units
  double min_step = 1e-18;   // step/radius floor, below which a run fails
  int inner_max_iters = 1000;
  int max_outer_iters = 1000000;
  int lbfgs_memory = 10;
  double tr_init_radius = 1.0;
  double tr_max_radius = 1e10;
  OracleCounter weights;     // only the w_* fields are read
};

enum class RunStatus { Converged, BudgetExhausted, LineSearchFailed, Error };

struct RunRecord {
  std::string solver;
  std::string problem;
  std::uint64_t seed = 0;
  RunStatus status = RunStatus::Error;
  long long iterations = 0;
  double f_final = 0.0;
  double grad_norm_final = 0.0;
  double oracle_total = 0.0;
  double wall_time_s = 0.0;
  std::string trace_path;
};

enum class InitStyle { standard_normal, unit_sphere };

struct ProblemSpec {
  std::string name;
  int dim = 0;
  InitStyle init = InitStyle::unit_sphere;
  std::function<Problem()> make;
};

/// Deterministic shared starting point for a (problem, seed) cell.
Vector initial_point(const ProblemSpec& spec, std::uint64_t seed);
std::uint64_t vector_hash(const Vector& v);

ProblemSpec spec_of(const Problem& prototype, InitStyle init,
                    std::function<Problem()> make);
std::vector<ProblemSpec> analytic_suite_specs();

/// Newton-MR solvers routed through the protocol.
RunRecord run_newton_mr_first(const Problem& problem, const Vector& x0,
                              const Protocol& proto, std::uint64_t seed,
                              const std::string& trace_path = "");
RunRecord run_newton_mr_second(const Problem& problem, const Vector& x0,
                               const Protocol& proto, std::uint64_t seed,
                               const std::string& trace_path = "");

/// Steepest descent with Armijo tracking: the first-order control.
RunRecord baseline_steepest_descent(const Problem& problem, const Vector& x0,
                                    const Protocol& proto);

/// Two-loop L-BFGS with a strong Wolfe line search.
RunRecord baseline_lbfgs(const Problem& problem, const Vector& x0,
                         const Protocol& proto, int memory = 10);

struct SteihaugResult {
  Vector p;
  bool boundary = false;
  int iters = 0;
};

/// CG on the quadratic model with negative-curvature and trust-region
/// boundary exits to the sphere of the given radius.
SteihaugResult steihaug(const SymmetricOperator& H, const Vector& g, double radius,
                        double rtol, int max_iters);

/// Trust region with a CG-Steihaug subproblem solver.
RunRecord baseline_tr_steihaug(const Problem& problem, const Vector& x0,
                               const Protocol& proto);

/// Known solver names: newton-mr-1st, newton-mr-2nd, sd, lbfgs, tr-steihaug.
bool is_known_solver(const std::string& name);
std::vector<std::string> default_solvers();

/// Runs every (solver, problem, seed) cell with fresh counters and the
/// identical per-(problem, seed) starting point; per-cell failures are
/// recorded, never thrown. Cells may run in parallel.
std::vector<RunRecord> run_grid(const std::vector<std::string>& solvers,
                                const std::vector<ProblemSpec>& problems,
                                const std::vector<std::uint64_t>& seeds,
                                const Protocol& proto, bool parallel = true,
                                const std::string& trace_dir = "");

enum class ProfileMetric { f_final, grad_norm_final, oracle_total };

struct ProfileCurve {
  std::string solver;
  std::vector<std::pair<double, double>> points;  // (tau, fraction), tau >= 1
};

std::vector<ProfileCurve> performance_profile(const std::vector<RunRecord>& records,
                                              ProfileMetric metric);

extern const char* const kRecordsCsvHeader;
void write_records_csv(std::ostream& os, const std::vector<RunRecord>& records);
std::vector<RunRecord> read_records_csv(std::istream& is);
void write_profile_csv(std::ostream& os, const std::vector<ProfileCurve>& curves);

std::string to_string(RunStatus s);
RunStatus run_status_from_string(const std::string& s);
std::string to_string(ProfileMetric m);
ProfileMetric profile_metric_from_string(const std::string& s);

}  // namespace nmr
