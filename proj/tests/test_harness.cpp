#include <doctest.h>

#include <cmath>
#include <sstream>

#include "nmr/harness.hpp"
#include "nmr/rng.hpp"
#include "oracles.hpp"

using namespace nmr;

namespace {

ProblemSpec quadratic_spec() {
  return ProblemSpec{"convex_quadratic_d10", 10, InitStyle::unit_sphere,
                     [] { return convex_quadratic(10, 11); }};
}

}  // namespace

TEST_CASE("grid basics") {
  SUBCASE("one cell converges to the known optimum") {
    Protocol proto;
    const auto records = run_grid({"newton-mr-1st"}, {quadratic_spec()}, {0},
                                  proto, false);
    REQUIRE(records.size() == 1);
    CHECK(records[0].status == RunStatus::Converged);
    const Problem proto_p = convex_quadratic(10, 11);
    REQUIRE(proto_p.known_optimum.has_value());
    CHECK(std::abs(records[0].f_final - proto_p.known_optimum->f_star) <= 1e-8);
  }

  SUBCASE("empty solver list gives an empty grid") {
    Protocol proto;
    CHECK(run_grid({}, {quadratic_spec()}, {0, 1}, proto).empty());
  }

  SUBCASE("shared starts per (problem, seed)") {
    const ProblemSpec spec = quadratic_spec();
    const Vector a = initial_point(spec, 3);
    const Vector b = initial_point(spec, 3);
    CHECK(vector_hash(a) == vector_hash(b));
    CHECK(vector_hash(a) != vector_hash(initial_point(spec, 4)));
  }

  SUBCASE("unknown solver is rejected") {
    Protocol proto;
    CHECK_THROWS_AS((void)run_grid({"nope"}, {quadratic_spec()}, {0}, proto),
                    std::invalid_argument);
  }
}

TEST_CASE("records csv round trip") {
  std::vector<RunRecord> recs(2);
  recs[0] = {"sd", "rosenbrock_d2", 1, RunStatus::Converged, 1234, 1.25e-17,
             9.9e-11, 54321.0, 0.125, ""};
  recs[1] = {"lbfgs", "quartic_saddle_d2", 7, RunStatus::LineSearchFailed, 88,
             -0.2499999999, 3.3e-4, 100000.0, 2.5, ""};
  std::stringstream ss;
  write_records_csv(ss, recs);
  const std::string text = ss.str();
  CHECK(text.substr(0, text.find('\n')) == kRecordsCsvHeader);
  std::stringstream in(text);
  const auto back = read_records_csv(in);
  REQUIRE(back.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(back[i].solver == recs[i].solver);
    CHECK(back[i].problem == recs[i].problem);
    CHECK(back[i].seed == recs[i].seed);
    CHECK(back[i].status == recs[i].status);
    CHECK(back[i].iterations == recs[i].iterations);
    CHECK(back[i].f_final == recs[i].f_final);
    CHECK(back[i].grad_norm_final == recs[i].grad_norm_final);
    CHECK(back[i].oracle_total == recs[i].oracle_total);
    CHECK(back[i].wall_time_s == recs[i].wall_time_s);
  }
}

namespace {

RunRecord fixture_record(const std::string& solver, const std::string& problem,
                         double oracle, bool ok = true) {
  RunRecord r;
  r.solver = solver;
  r.problem = problem;
  r.seed = 0;
  r.status = ok ? RunStatus::Converged : RunStatus::BudgetExhausted;
  r.oracle_total = oracle;
  return r;
}

double curve_at(const ProfileCurve& c, double tau) {
  double v = 0.0;
  for (const auto& [t, f] : c.points)
    if (t <= tau + 1e-12) v = f;
  return v;
}

}  // namespace

TEST_CASE("performance profile") {
  SUBCASE("single solver plateaus at its solved fraction") {
    std::vector<RunRecord> recs;
    recs.push_back(fixture_record("a", "p1", 10.0));
    recs.push_back(fixture_record("a", "p2", 20.0));
    recs.push_back(fixture_record("a", "p3", 5.0, false));
    const auto curves = performance_profile(recs, ProfileMetric::oracle_total);
    REQUIRE(curves.size() == 1);
    for (const auto& [tau, frac] : curves[0].points)
      CHECK(frac == doctest::Approx(2.0 / 3.0));
  }

  SUBCASE("dominant solver is at one from the start") {
    std::vector<RunRecord> recs;
    for (const char* p : {"p1", "p2", "p3"}) {
      recs.push_back(fixture_record("fast", p, 10.0));
      recs.push_back(fixture_record("slow", p, 40.0));
    }
    const auto curves = performance_profile(recs, ProfileMetric::oracle_total);
    REQUIRE(curves.size() == 2);
    const auto& fast = curves[0].solver == "fast" ? curves[0] : curves[1];
    const auto& slow = curves[0].solver == "fast" ? curves[1] : curves[0];
    CHECK(curve_at(fast, 1.0) == doctest::Approx(1.0));
    CHECK(curve_at(slow, 1.0) == doctest::Approx(0.0));
    CHECK(curve_at(slow, 3.9) == doctest::Approx(0.0));
    CHECK(curve_at(slow, 4.0) == doctest::Approx(1.0));
  }

  SUBCASE("hand-enumerated three-solver five-problem table") {
    // oracle totals; inf = failed run
    const double table[3][5] = {
        {10, 40, 30, 100, 25},   // A
        {20, 20, 90, 50, -1},    // B (-1 marks a failure)
        {40, 10, 30, 200, 50},   // C
    };
    const char* solvers[3] = {"A", "B", "C"};
    const char* problems[5] = {"p1", "p2", "p3", "p4", "p5"};
    std::vector<RunRecord> recs;
    for (int s = 0; s < 3; ++s)
      for (int p = 0; p < 5; ++p)
        recs.push_back(fixture_record(solvers[s], problems[p],
                                      table[s][p] < 0 ? 1.0 : table[s][p],
                                      table[s][p] >= 0));
    const auto curves = performance_profile(recs, ProfileMetric::oracle_total);
    REQUIRE(curves.size() == 3);
    auto find = [&](const std::string& n) -> const ProfileCurve& {
      for (const auto& c : curves)
        if (c.solver == n) return c;
      throw std::logic_error("missing curve");
    };
    // best per problem: 10, 10, 30, 50, 25
    // ratios A: 1, 4, 1, 2, 1 -> at tau=1: 3/5; tau=2: 4/5; tau=4: 1
    // ratios B: 2, 2, 3, 1, inf -> tau=1: 1/5; tau=2: 3/5; tau=3: 4/5
    // ratios C: 4, 1, 1, 4, 2 -> tau=1: 2/5; tau=2: 3/5; tau=4: 1
    CHECK(curve_at(find("A"), 1.0) == doctest::Approx(0.6));
    CHECK(curve_at(find("A"), 2.0) == doctest::Approx(0.8));
    CHECK(curve_at(find("A"), 4.0) == doctest::Approx(1.0));
    CHECK(curve_at(find("B"), 1.0) == doctest::Approx(0.2));
    CHECK(curve_at(find("B"), 2.0) == doctest::Approx(0.6));
    CHECK(curve_at(find("B"), 3.0) == doctest::Approx(0.8));
    CHECK(curve_at(find("B"), 100.0) == doctest::Approx(0.8));
    CHECK(curve_at(find("C"), 1.0) == doctest::Approx(0.4));
    CHECK(curve_at(find("C"), 2.0) == doctest::Approx(0.6));
    CHECK(curve_at(find("C"), 4.0) == doctest::Approx(1.0));
  }

  SUBCASE("nonpositive objective values are shifted before ratios") {
    std::vector<RunRecord> recs;
    auto rec = [&](const char* s, const char* p, double f) {
      RunRecord r = fixture_record(s, p, 1.0);
      r.f_final = f;
      return r;
    };
    recs.push_back(rec("a", "p1", -0.25));
    recs.push_back(rec("b", "p1", 0.75));
    const auto curves = performance_profile(recs, ProfileMetric::f_final);
    // shifted values: 1e-16 and 1.0; solver a is best everywhere
    const auto& ca = curves[0].solver == "a" ? curves[0] : curves[1];
    const auto& cb = curves[0].solver == "a" ? curves[1] : curves[0];
    CHECK(curve_at(ca, 1.0) == doctest::Approx(1.0));
    CHECK(curve_at(cb, 1.0) == doctest::Approx(0.0));
  }
}

TEST_CASE("steepest descent baseline") {
  // First-order methods comparing objective values cannot certify gradients
  // much below the square root of the objective's rounding noise, so the
  // baseline checks run at 1e-8.
  Protocol proto;
  proto.eps_g = 1e-8;

  SUBCASE("convex quadratic converges") {
    const Problem p = convex_quadratic(10, 11);
    Rng rng(1);
    const auto rec = baseline_steepest_descent(p, rng.unit_sphere(10), proto);
    CHECK(rec.status == RunStatus::Converged);
  }

  SUBCASE("stalls successfully at an exact saddle") {
    const Problem p = quartic_saddle(2);
    const auto rec = baseline_steepest_descent(p, Vector{0.0, 0.0}, proto);
    CHECK(rec.status == RunStatus::Converged);  // first-order only, by design
    CHECK(rec.iterations == 0);
  }

  SUBCASE("rosenbrock 2d within budget") {
    const Problem p = rosenbrock(2);
    Rng rng(5);
    const auto rec = baseline_steepest_descent(p, rng.unit_sphere(2), proto);
    CHECK(rec.status == RunStatus::Converged);
    CHECK(rec.f_final <= 1e-8);
    CHECK(rec.oracle_total <= proto.budget);
  }
}

TEST_CASE("lbfgs baseline") {
  Protocol proto;
  proto.eps_g = 1e-6;

  SUBCASE("convex quadratic in few iterations") {
    const Problem p = convex_quadratic(10, 11);
    Rng rng(2);
    const auto rec = baseline_lbfgs(p, rng.unit_sphere(10), proto, 10);
    CHECK(rec.status == RunStatus::Converged);
    CHECK(rec.iterations <= 30);
  }

  SUBCASE("memory one still converges on a convex quadratic") {
    const Problem p = convex_quadratic(10, 11);
    Rng rng(2);
    const auto rec = baseline_lbfgs(p, rng.unit_sphere(10), proto, 1);
    CHECK(rec.status == RunStatus::Converged);
  }

  SUBCASE("handles a nonconvex landscape") {
    const Problem p = quartic_saddle(2);
    const auto rec = baseline_lbfgs(p, Vector{0.3, 0.7}, proto, 10);
    CHECK(rec.status == RunStatus::Converged);
    CHECK(rec.f_final == doctest::Approx(-0.25).epsilon(1e-6));
    // skipped-pair rule: nonpositive curvature pairs never enter the memory,
    // observable as a run that still terminates cleanly from a saddle side
    CHECK(rec.iterations < 1000);
  }
}

TEST_CASE("trust region baseline") {
  Protocol proto;
  proto.eps_g = 1e-8;

  SUBCASE("huge initial radius behaves like a damped exact step") {
    Protocol wide = proto;
    wide.tr_init_radius = 1e10;
    const Problem p = convex_quadratic(10, 11);
    Rng rng(3);
    const auto rec = baseline_tr_steihaug(p, rng.unit_sphere(10), wide);
    CHECK(rec.status == RunStatus::Converged);
    CHECK(rec.iterations <= 10);
  }

  SUBCASE("negative-curvature exit lands on the boundary") {
    const DenseSymmetricMatrix A(2, {-2.0, 0.0, 0.0, 1.0});
    const Vector g{0.4, 0.3};
    const double radius = 0.9;
    const auto out = steihaug(A.as_operator(), g, radius, 0.1, 100);
    CHECK(out.boundary);
    CHECK(norm(out.p) == doctest::Approx(radius).epsilon(1e-10));
  }

  SUBCASE("escapes the saddle region") {
    const Problem p = quartic_saddle(2);
    const auto rec = baseline_tr_steihaug(p, Vector{1e-3, 0.2}, proto);
    CHECK(rec.status == RunStatus::Converged);
    CHECK(rec.f_final == doctest::Approx(-0.25).epsilon(1e-6));
  }
}

TEST_CASE("full grid smoke with all solvers") {
  Protocol proto;
  proto.budget = 2e4;  // keep the unit-test grid quick
  const auto specs = analytic_suite_specs();
  const auto records = run_grid(default_solvers(), specs, {0}, proto, true);
  CHECK(records.size() == specs.size() * default_solvers().size());
  for (const auto& r : records) CHECK(r.status != RunStatus::Error);
}

TEST_CASE("oracle totals are exactly reproducible per cell") {
  Protocol proto;
  const auto specs = analytic_suite_specs();
  const auto a = run_grid({"newton-mr-2nd", "lbfgs"}, {specs[2], specs[4]}, {1, 2},
                          proto, false);
  const auto b = run_grid({"newton-mr-2nd", "lbfgs"}, {specs[2], specs[4]}, {1, 2},
                          proto, true);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].oracle_total == b[i].oracle_total);  // bitwise equality
    CHECK(a[i].iterations == b[i].iterations);
    CHECK(a[i].f_final == b[i].f_final);
  }
}
