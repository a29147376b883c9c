#include <doctest.h>

#include <cmath>
#include <vector>

#include "nmr/minres.hpp"
#include "nmr/problems.hpp"
#include "nmr/rng.hpp"
#include "nmr/spectrum.hpp"
#include "oracles.hpp"

using namespace nmr;

namespace {

struct IterationCapture {
  std::vector<double> c, s, gamma1, gamma2, alpha, beta_next, phi;
  std::vector<Vector> iterates, residuals;
};

MinresObserver capture_into(IterationCapture& cap) {
  return [&cap](const MinresState& st) {
    cap.c.push_back(st.c);
    cap.s.push_back(st.s);
    cap.gamma1.push_back(st.gamma1);
    cap.gamma2.push_back(st.gamma2);
    cap.alpha.push_back(st.alpha);
    cap.beta_next.push_back(st.tbeta_next);
    cap.phi.push_back(st.phi);
    cap.iterates.push_back(st.s_vec);
    cap.residuals.push_back(st.r_vec);
  };
}

}  // namespace

TEST_CASE("identity system solved at the first step, returned at the second") {
  for (int d : {3, 8}) {
    const SymmetricOperator H = identity_operator(d);
    const Vector g(static_cast<std::size_t>(d), 1.0);
    MinresConfig cfg;
    cfg.eta = 0.1;
    const MinresResult res = run_minres(H, g, cfg);
    CHECK(res.d_type == DirectionType::Sol);
    CHECK(res.iters == 2);
    CHECK(H.apply_count() == 1);  // the trivial second iteration costs nothing
    for (int i = 0; i < d; ++i)
      CHECK(res.direction[static_cast<std::size_t>(i)] == doctest::Approx(-1.0));
    // ||H s + g|| = 0
    Vector hs = identity_operator(d).apply(res.direction);
    axpy_inplace(1.0, g, hs);
    CHECK(norm(hs) <= 1e-14);
  }
}

TEST_CASE("negative definite operator detected at the first iteration") {
  const int d = 4;
  const SymmetricOperator H = diagonal_operator(Vector(d, -1.0));
  Rng rng(2);
  const Vector g = rng.normal_vector(d);
  const MinresResult res = run_minres(H, g, MinresConfig{});
  CHECK(res.d_type == DirectionType::Npc);
  CHECK(res.iters == 1);
  CHECK(res.residual_curvature == doctest::Approx(-1.0));
  // r_0 = -g
  for (int i = 0; i < d; ++i)
    CHECK(res.direction[static_cast<std::size_t>(i)] ==
          doctest::Approx(-g[static_cast<std::size_t>(i)]));
}

TEST_CASE("zero right-hand side is rejected") {
  const SymmetricOperator H = identity_operator(3);
  CHECK_THROWS_AS((void)run_minres(H, Vector(3, 0.0), MinresConfig{}),
                  std::invalid_argument);
}

TEST_CASE("two-by-two closed forms") {
  const double L = 4.0, mu = 1.0;

  SUBCASE("strong crossing detects at t = 1") {
    const double e = 3.0;  // e^2 = 9 >= L/mu
    const SymmetricOperator H = diagonal_operator({L, -mu});
    const Vector g{-1.0, -e};
    MinresConfig cfg;
    cfg.eta = 0.0;
    const MinresResult res = run_minres(H, g, cfg);
    CHECK(res.d_type == DirectionType::Npc);
    CHECK(res.iters == 1);
    const double alpha1 = (L - mu * e * e) / (1.0 + e * e);
    CHECK(res.residual_curvature == doctest::Approx(alpha1).epsilon(1e-12));
    CHECK(res.gamma1 == doctest::Approx(alpha1).epsilon(1e-12));
  }

  SUBCASE("weak crossing detects at t = 2 with the predicted relative residual") {
    const double e = 0.5;  // e^2 = 0.25 < L/mu
    const SymmetricOperator H = diagonal_operator({L, -mu});
    const Vector g{-1.0, -e};
    MinresConfig cfg;
    cfg.eta = 0.0;
    IterationCapture cap;
    const MinresResult res = run_minres(H, g, cfg, capture_into(cap));
    CHECK(res.d_type == DirectionType::Npc);
    CHECK(res.iters == 2);

    const double denom = std::sqrt((1.0 + e * e) * (L * L + e * e * mu * mu));
    const double c1 = (L - mu * e * e) / denom;
    const double s1 = e * (L + mu) / denom;
    const double g11 = (L - mu * e * e) / (1.0 + e * e);
    const double g12 = std::sqrt((L * L + e * e * mu * mu) / (1.0 + e * e));
    const double g21 = L * mu * std::sqrt((1.0 + e * e) / (L * L + e * e * mu * mu));
    REQUIRE(cap.c.size() >= 1);
    CHECK(cap.gamma1[0] == doctest::Approx(g11).epsilon(1e-12));
    CHECK(cap.gamma2[0] == doctest::Approx(g12).epsilon(1e-12));
    CHECK(cap.c[0] == doctest::Approx(c1).epsilon(1e-12));
    CHECK(cap.s[0] == doctest::Approx(s1).epsilon(1e-12));
    CHECK(res.gamma1 == doctest::Approx(g21).epsilon(1e-12));
    // ||r_1|| / ||g|| = s_1
    CHECK(norm(res.direction) / norm(g) == doctest::Approx(s1).epsilon(1e-12));
    // the detected direction really has nonpositive curvature
    const Vector hd = diagonal_operator({L, -mu}).apply(res.direction);
    CHECK(dot(res.direction, hd) <= 0.0);
  }
}

TEST_CASE("sol_test boundary behavior") {
  CHECK(sol_test(0.0, 1.0, 1.0, 1.0, 0.0));      // zero residual accepted always
  CHECK(!sol_test(1.0, 0.5, 0.5, 1.0, 100.0));   // first iteration never passes
  CHECK(sol_test(0.5, 0.1, 0.0, 1.0, 10.0));

  // Dense cross-check on diag(2,1), g=(1,1): the identities give
  // ||H r_1|| = phi_1*sqrt(gamma2^2+delta3^2), ||H s_1|| = sqrt(phi0^2-phi1^2).
  const DenseSymmetricMatrix m(2, {2.0, 0.0, 0.0, 1.0});
  const Vector g{1.0, 1.0};
  MinresConfig cfg;
  cfg.eta = 0.0;
  cfg.disable_sol_test = true;
  cfg.disable_npc_test = true;
  IterationCapture cap;
  (void)run_minres(m.as_operator(), g, cfg, capture_into(cap));
  REQUIRE(cap.phi.size() >= 2);
  const Vector s1 = cap.iterates[0];
  const Vector r1 = cap.residuals[0];
  const double hs1 = norm(m.matvec(s1));
  const double hr1 = norm(m.matvec(r1));
  const double phi0 = norm(g);
  CHECK(std::sqrt(phi0 * phi0 - cap.phi[0] * cap.phi[0]) ==
        doctest::Approx(hs1).epsilon(1e-10));
  // eta = 10 accepts s_1 at t = 2; eta small does not
  CHECK(hr1 <= 10.0 * hs1);
  CHECK(hr1 > 0.01 * hs1);
}

TEST_CASE("npc_test sign cases") {
  CHECK(npc_test(-1.0, -0.5));  // initial cosine, nonpositive diagonal
  CHECK(!npc_test(-1.0, 0.5));
  CHECK(npc_test(0.3, 0.0));  // boundary counts as detection
}

TEST_CASE("residual curvature under a shift") {
  CHECK(residual_curvature(-1.0, -1.0, 0.0) == doctest::Approx(-1.0));

  // Zero operator run under shift sigma: alpha_1 = sigma, so the unshifted
  // curvature comes out exactly zero.
  const double sigma = 0.7;
  const SymmetricOperator Z = zero_operator(3);
  const SymmetricOperator S = shift(Z, sigma);
  Rng rng(3);
  const Vector g = rng.normal_vector(3);
  MinresConfig cfg;
  cfg.eta = 0.0;
  const MinresResult res = run_minres(S, g, cfg);
  CHECK(residual_curvature(res.c_prev, res.gamma1, sigma) ==
        doctest::Approx(0.0).epsilon(1e-14));

  // Indefinite dense case: the scalar matches the dense quadratic form.
  const DenseSymmetricMatrix m(2, {1.0, 0.0, 0.0, -1.0});
  const double sh = 0.5;
  const Vector g2{-0.3, -0.9};
  const MinresResult r2 = run_minres(m.as_operator().shifted(sh), g2, cfg);
  REQUIRE(r2.d_type == DirectionType::Npc);
  const Vector dir = scaled(r2.direction, 1.0 / norm(r2.direction));
  const double want = oracles::quadratic_form(m, dir);
  CHECK(residual_curvature(r2.c_prev, r2.gamma1, sh) ==
        doctest::Approx(want).epsilon(1e-10));
}

TEST_CASE("iterates match the brute-force Krylov least-squares minimizer") {
  Rng rng(101);
  for (int rep = 0; rep < 5; ++rep) {
    const int d = 20;
    const DenseSymmetricMatrix m = oracles::random_symmetric(d, rng);
    const Vector g = rng.normal_vector(d);
    MinresConfig cfg;
    cfg.disable_sol_test = true;
    cfg.disable_npc_test = true;
    cfg.full_reorthogonalize = true;
    cfg.max_iters = 4 * d;
    IterationCapture cap;
    (void)run_minres(m.as_operator(), g, cfg, capture_into(cap));
    const int grade = krylov_rank(m, g);
    REQUIRE(static_cast<int>(cap.iterates.size()) >= grade);
    for (int t = 1; t <= grade; ++t) {
      const Vector want = krylov_brute_force_minres(m, g, t);
      const Vector& got = cap.iterates[static_cast<std::size_t>(t - 1)];
      if (norm(want) > 1e-12)
        CHECK(oracles::rel_err_vec(got, want) < 1e-8);
    }
  }
}

TEST_CASE("residual identities and monotonicity") {
  Rng rng(55);
  for (int rep = 0; rep < 6; ++rep) {
    const int d = 12;
    const DenseSymmetricMatrix m = oracles::random_symmetric(d, rng);
    const Vector g = rng.normal_vector(d);
    MinresConfig cfg;
    cfg.disable_sol_test = true;
    cfg.disable_npc_test = true;
    cfg.full_reorthogonalize = true;
    IterationCapture cap;
    const MinresResult res = run_minres(m.as_operator(), g, cfg, capture_into(cap));
    const double hnorm = oracles::lambda_max_abs_dense(m);
    const double phi0 = norm(g);

    double prev_phi = phi0;
    for (std::size_t k = 0; k < cap.phi.size(); ++k) {
      // phi_t == ||r_t|| and it never increases
      CHECK(std::abs(cap.phi[k] - norm(cap.residuals[k])) <=
            1e-8 * (phi0 + cap.phi[k]));
      CHECK(cap.phi[k] <= prev_phi + 1e-12 * phi0);
      prev_phi = cap.phi[k];

      // <r_t, g> = -||r_t||^2
      const double rg = dot(cap.residuals[k], g);
      const double rn2 = dot(cap.residuals[k], cap.residuals[k]);
      CHECK(std::abs(rg + rn2) <= 1e-8 * phi0 * phi0);
    }

    // H-conjugacy of distinct residuals
    for (std::size_t a = 0; a < cap.residuals.size(); ++a) {
      const Vector hra = m.matvec(cap.residuals[a]);
      for (std::size_t b = a + 1; b < cap.residuals.size(); ++b) {
        const double v = dot(cap.residuals[b], hra);
        const double scale =
            norm(cap.residuals[a]) * norm(cap.residuals[b]) + 1e-4 * phi0 * phi0;
        CHECK(std::abs(v) <= 1e-8 * hnorm * scale);
      }
    }

    // scalar-identity columns of the trace against dense products
    double prev_hs = 0.0;
    for (std::size_t k = 0; k < cap.iterates.size(); ++k) {
      const auto& row = res.trace[k];
      if (k >= 1) {
        const double hs_dense = norm(m.matvec(cap.iterates[k - 1]));
        const double hr_dense = norm(m.matvec(cap.residuals[k - 1]));
        CHECK(std::abs(row.hs_norm - hs_dense) <= 1e-8 * hnorm * phi0);
        CHECK(std::abs(row.hr_norm - hr_dense) <= 1e-8 * hnorm * phi0);
      }
      CHECK(row.hs_norm >= prev_hs - 1e-12 * hnorm * phi0);
      prev_hs = row.hs_norm;
    }
  }
}

TEST_CASE("pre-detection iterates yield descent") {
  Rng rng(77);
  for (int rep = 0; rep < 5; ++rep) {
    const int d = 10;
    const DenseSymmetricMatrix m = oracles::random_symmetric(d, rng);
    const Vector g = rng.normal_vector(d);
    MinresConfig cfg;
    cfg.disable_sol_test = true;
    cfg.full_reorthogonalize = true;
    IterationCapture cap;
    (void)run_minres(m.as_operator(), g, cfg, capture_into(cap));
    const double gn2 = dot(g, g);
    // every completed iteration happened before detection
    for (const Vector& s : cap.iterates) {
      const double v = dot(s, g) + oracles::quadratic_form(m, s);
      CHECK(v <= 1e-10 * gn2);
    }
  }
}

TEST_CASE("detector characterization on planted spectra") {
  MinresConfig cfg;
  cfg.disable_sol_test = true;
  cfg.full_reorthogonalize = true;
  cfg.max_iters = 200;
  cfg.beta_zero_tol = 1e-10;  // exact-arithmetic exhaustion semantics

  SUBCASE("negative relevant eigenvalue fires strictly") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
      const auto inst = planted_spectrum_instance({2.5, 1.2, -0.8}, {1.0, 1.0, 1.0},
                                                  10, seed);
      const MinresResult res = run_minres(inst.H.as_operator(), inst.g, cfg);
      const SpectrumReport rep = g_relevant_spectrum(inst.H, inst.g);
      CHECK(res.d_type == DirectionType::Npc);
      CHECK(res.iters <= rep.grade);
      CHECK(res.residual_curvature <
            -1e-8 * oracles::lambda_max_abs_dense(inst.H));
    }
  }

  SUBCASE("zero relevant eigenvalue fires exactly at the grade with zero curvature") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
      const auto inst = planted_spectrum_instance({2.5, 1.2, 0.0}, {1.0, 1.0, 1.0},
                                                  10, seed);
      const MinresResult res = run_minres(inst.H.as_operator(), inst.g, cfg);
      const SpectrumReport rep = g_relevant_spectrum(inst.H, inst.g);
      CHECK(rep.psi_zero == 1);
      CHECK(res.d_type == DirectionType::Npc);
      CHECK(res.iters == rep.grade);
      CHECK(std::abs(res.residual_curvature) <=
            1e-8 * oracles::lambda_max_abs_dense(inst.H));
    }
  }

  SUBCASE("positive relevant spectrum never fires") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
      const auto inst = planted_spectrum_instance({2.5, 1.2, 0.7}, {1.0, 1.0, 1.0},
                                                  10, seed);
      const MinresResult res = run_minres(inst.H.as_operator(), inst.g, cfg);
      CHECK(res.d_type == DirectionType::Sol);
      CHECK((res.stop == MinresStop::Exhausted ||
             res.stop == MinresStop::MaxIterations));
      // the final reduced system is solved exactly
      Vector resid = inst.H.matvec(res.direction);
      axpy_inplace(1.0, inst.g, resid);
      CHECK(norm(resid) <= 1e-8 * norm(inst.g));
    }
  }
}

TEST_CASE("runs on g and 10g share the scaled trace and detection iteration") {
  const auto inst = planted_spectrum_instance(
      {3.2, 2.9, 2.6, 2.3, 2.0, 1.8, 1.6, 1.4, 1.25, 1.1, 1.0, 0.9, 0.8, 0.7,
       0.6, 0.5, 0.45, 0.4, -0.75, 0.0},
      std::vector<double>(20, 1.0), 20, 5);
  MinresConfig cfg;
  cfg.disable_sol_test = true;
  cfg.full_reorthogonalize = true;
  cfg.max_iters = 80;

  IterationCapture a, b;
  const MinresResult ra = run_minres(inst.H.as_operator(), inst.g, cfg, capture_into(a));
  const Vector g10 = scaled(inst.g, 10.0);
  const MinresResult rb = run_minres(inst.H.as_operator(), g10, cfg, capture_into(b));

  CHECK(ra.d_type == DirectionType::Npc);
  CHECK(ra.iters == rb.iters);
  REQUIRE(a.phi.size() == b.phi.size());
  const double phi0a = norm(inst.g), phi0b = norm(g10);
  for (std::size_t k = 0; k < a.phi.size(); ++k) {
    CHECK(std::abs(a.phi[k] / phi0a - b.phi[k] / phi0b) <= 1e-10);
    CHECK(std::abs(a.c[k] - b.c[k]) <= 1e-10);
    CHECK(std::abs(a.s[k] - b.s[k]) <= 1e-10);
    CHECK(std::abs(a.gamma1[k] - b.gamma1[k]) <= 1e-10 * (1.0 + std::abs(a.gamma1[k])));
  }
}

TEST_CASE("max_iters forces a flagged return") {
  Rng rng(31);
  const DenseSymmetricMatrix m = oracles::random_spd(12, rng);
  const Vector g = rng.normal_vector(12);
  MinresConfig cfg;
  cfg.eta = 1e-14;  // unreachable this early
  cfg.max_iters = 3;
  const MinresResult res = run_minres(m.as_operator(), g, cfg);
  CHECK(res.iters == 3);
  CHECK(res.forced);
  CHECK(res.stop == MinresStop::MaxIterations);
  CHECK(res.d_type == DirectionType::Sol);
}

TEST_CASE("one operator application per iteration") {
  Rng rng(63);
  const DenseSymmetricMatrix m = oracles::random_spd(10, rng);
  const SymmetricOperator op = m.as_operator();
  const Vector g = rng.normal_vector(10);
  MinresConfig cfg;
  cfg.eta = 0.05;
  const MinresResult res = run_minres(op, g, cfg);
  CHECK(op.apply_count() == res.trace.size());
  CHECK(res.trace.size() <= static_cast<std::size_t>(res.iters));
}
