#include <doctest.h>

#include <igamg/bench.hpp>
#include <igamg/multigrid.hpp>
#include <random>

#include "oracles.hpp"

using namespace igamg;

TEST_SUITE_BEGIN("multigrid");

TEST_CASE("coarsest level rule") {
    CHECK(MultigridHierarchy::default_coarse_level(1) == 0);
    CHECK(MultigridHierarchy::default_coarse_level(2) == 1);
    CHECK(MultigridHierarchy::default_coarse_level(3) == 1);
    CHECK(MultigridHierarchy::default_coarse_level(4) == 2);
    CHECK(MultigridHierarchy::default_coarse_level(7) == 2);
    CHECK(MultigridHierarchy::default_coarse_level(8) == 3);
    CHECK(MultigridHierarchy::default_coarse_level(14) == 3);
    for (int p = 1; p <= 14; ++p) {
        const int l0 = MultigridHierarchy::default_coarse_level(p);
        CHECK((Index(1) << (l0 + 1)) >= p + 1);   // smoothed levels are valid
        if (l0 > 0) CHECK((Index(1) << l0) < p + 1);  // and the rule is tight
    }
}

TEST_CASE("sigma presets") {
    CHECK(sigma_coefficient(SigmaMode::theory, 2) == 12.0);
    CHECK(sigma_coefficient(SigmaMode::preset, 1) == doctest::Approx(1.0 / 0.09));
    CHECK(sigma_coefficient(SigmaMode::preset, 2) == doctest::Approx(1.0 / 0.18));
    CHECK(sigma_coefficient(SigmaMode::preset, 3) == doctest::Approx(1.0 / 0.19));
    CHECK(sigma_coefficient(SigmaMode::preset, 4) == 12.0);
    CHECK(sigma_coefficient(SigmaMode::explicit_value, 1, 7.5) == 7.5);
    CHECK_THROWS_AS(sigma_coefficient(SigmaMode::explicit_value, 1, 0.0), std::invalid_argument);
    // degree-1 preset falls back to the theory value
    CHECK(effective_sigma_coefficient(SigmaMode::preset, 2, 1) == 12.0);
    CHECK(effective_sigma_coefficient(SigmaMode::preset, 2, 2) == doctest::Approx(1.0 / 0.18));
}

TEST_CASE("degree-1 discretizations converge in every dimension") {
    for (const auto& [d, l] : {std::pair<int, int>{1, 5}, {2, 4}, {3, 3}}) {
        RunConfig cfg;
        cfg.d = d;
        cfg.p = 1;
        cfg.level = l;
        const RunRecord rec = run_single(cfg);
        CHECK(rec.converged);
    }
}

TEST_CASE("the construction carries over to four dimensions") {
    RunConfig cfg;
    cfg.d = 4;
    cfg.p = 2;
    cfg.level = 3;
    const RunRecord rec = run_single(cfg);
    CHECK(rec.converged);
    CHECK(rec.iterations < 150);
}

TEST_CASE("smoothing fixes solved systems and steps=0 is the identity") {
    MultigridHierarchy h(2, 3, 4, MultigridHierarchy::default_coarse_level(3), SigmaMode::preset);
    std::mt19937 gen(1);
    const Vector u = oracles::random_vector(h.level_size(4), gen);
    const Vector f = h.level(4).A.apply(u);
    CHECK((h.smooth(4, u, f, 3, 1.0) - u).norm() < 1e-11 * u.norm());
    const Vector v = oracles::random_vector(h.level_size(4), gen);
    CHECK((h.smooth(4, v, f, 0, 1.0) - v).norm() == 0.0);
}

TEST_CASE("smoothing contracts the error in the A-norm") {
    MultigridHierarchy h(2, 3, 4, MultigridHierarchy::default_coarse_level(3), SigmaMode::preset);
    const TensorOperator& A = h.level(4).A;
    std::mt19937 gen(2);
    const Vector u_exact = oracles::random_vector(h.level_size(4), gen);
    const Vector f = A.apply(u_exact);
    Vector u = oracles::random_vector(h.level_size(4), gen);
    double prev = std::sqrt((u - u_exact).dot(A.apply(u - u_exact)));
    for (int s = 0; s < 5; ++s) {
        u = h.smooth(4, std::move(u), f, 1, 1.0);
        const double cur = std::sqrt((u - u_exact).dot(A.apply(u - u_exact)));
        CHECK(cur <= prev * (1.0 + 1e-12));
        prev = cur;
    }
}

TEST_CASE("the cycle at the coarsest level is an exact solve") {
    MultigridHierarchy h(2, 2, 1, 1, SigmaMode::preset);
    std::mt19937 gen(3);
    const Vector f = oracles::random_vector(h.level_size(1), gen);
    SolverConfig sc;
    const Vector u = h.cycle(1, Vector::Zero(f.size()), f, sc);
    CHECK((f - h.level(1).A.apply(u)).norm() < 1e-12 * f.norm());
}

TEST_CASE("two-grid contraction below one over random starts") {
    MultigridHierarchy h(1, 2, 4, 3, SigmaMode::preset);  // two levels
    const TensorOperator& A = h.level(4).A;
    const Matrix Ad = A.dense();
    const Vector f = assemble_rhs(h.level(4).space, 1);
    const Vector u_exact = Ad.llt().solve(f);
    SolverConfig sc;
    sc.cycle = CycleType::two_grid;
    std::mt19937 gen(4);
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
        Vector u = oracles::random_vector(h.level_size(4), gen);
        const double before = std::sqrt((u - u_exact).dot(Ad * (u - u_exact)));
        u = h.cycle(4, std::move(u), f, sc);
        const double after = std::sqrt((u - u_exact).dot(Ad * (u - u_exact)));
        worst = std::max(worst, after / before);
    }
    CHECK(worst < 1.0);
}

TEST_CASE("symmetric V-cycle induces a symmetric preconditioner") {
    MultigridHierarchy h(2, 2, 4, MultigridHierarchy::default_coarse_level(2), SigmaMode::preset);
    SolverConfig sc;
    std::mt19937 gen(5);
    const Vector x = oracles::random_vector(h.level_size(4), gen);
    const Vector y = oracles::random_vector(h.level_size(4), gen);
    const Vector Bx = h.cycle(4, Vector::Zero(x.size()), x, sc);
    const Vector By = h.cycle(4, Vector::Zero(y.size()), y, sc);
    CHECK(std::abs(y.dot(Bx) - x.dot(By)) < 1e-10 * std::abs(y.dot(Bx)));
}

TEST_CASE("per-level univariate matrices satisfy the Galerkin identity") {
    MultigridHierarchy h(1, 4, 5, MultigridHierarchy::default_coarse_level(4), SigmaMode::preset);
    for (int l = h.coarse_level() + 1; l <= 5; ++l) {
        const Matrix P = Matrix(h.level(l).P);
        const Matrix Mf = h.level(l).M.dense(), Mc = h.level(l - 1).M.dense();
        const Matrix Kf = h.level(l).K.dense(), Kc = h.level(l - 1).K.dense();
        CHECK((P.transpose() * Mf * P - Mc).norm() < 1e-12 * Mc.norm());
        CHECK((P.transpose() * Kf * P - Kc).norm() < 1e-12 * Kc.norm());
    }
}

TEST_CASE("iteration counts reproduce the reported 1-D results") {
    RunConfig cfg;
    cfg.d = 1;
    cfg.p = 2;
    cfg.level = 9;
    cfg.solver = SolverKind::mg;
    const RunRecord mg = run_single(cfg);
    CHECK(mg.converged);
    CHECK(mg.iterations >= 30);  // reported: 33
    CHECK(mg.iterations <= 36);
    cfg.solver = SolverKind::pcg;
    const RunRecord pcg = run_single(cfg);
    CHECK(pcg.converged);
    CHECK(pcg.iterations >= 10);  // reported: 13
    CHECK(pcg.iterations <= 16);
}

TEST_CASE("pcg never needs more iterations than the stationary cycle") {
    for (const auto& [d, p, l] : {std::tuple<int, int, int>{1, 2, 7}, {1, 5, 7}, {2, 2, 5}}) {
        RunConfig cfg;
        cfg.d = d;
        cfg.p = p;
        cfg.level = l;
        cfg.solver = SolverKind::mg;
        const RunRecord mg = run_single(cfg);
        cfg.solver = SolverKind::pcg;
        const RunRecord pcg = run_single(cfg);
        REQUIRE(mg.converged);
        REQUIRE(pcg.converged);
        CHECK(pcg.iterations <= mg.iterations);
        if (d == 2) CHECK(mg.contraction_estimate <= 0.70);
    }
}

TEST_CASE("w-cycle converges at least as fast as the v-cycle") {
    MultigridHierarchy h(1, 3, 6, MultigridHierarchy::default_coarse_level(3), SigmaMode::preset);
    const Vector f = assemble_rhs(h.level(6).space, 1);
    std::mt19937 gen(6);
    Vector u0 = oracles::random_vector(f.size(), gen);
    SolverConfig sc;
    sc.cycle = CycleType::v_cycle;
    const SolveResult v = solve_mg(h, f, sc, &u0);
    sc.cycle = CycleType::w_cycle;
    const SolveResult w = solve_mg(h, f, sc, &u0);
    REQUIRE(v.converged);
    REQUIRE(w.converged);
    CHECK(w.iterations <= v.iterations);
}

TEST_CASE("divergence is reported, not thrown") {
    MultigridHierarchy h(1, 2, 5, MultigridHierarchy::default_coarse_level(2), SigmaMode::preset);
    const Vector f = assemble_rhs(h.level(5).space, 1);
    SolverConfig sc;
    sc.max_iter = 2;
    const SolveResult r = solve_mg(h, f, sc);
    CHECK_FALSE(r.converged);
    CHECK_FALSE(r.failure.empty());
    CHECK(r.residual_history.size() == 2);
}

TEST_CASE("pcg rejects asymmetric smoothing") {
    MultigridHierarchy h(1, 2, 4, MultigridHierarchy::default_coarse_level(2), SigmaMode::preset);
    const Vector f = assemble_rhs(h.level(4).space, 1);
    SolverConfig sc;
    sc.nu_pre = 2;
    sc.nu_post = 1;
    CHECK_THROWS_AS(solve_pcg(h, f, sc), std::invalid_argument);
}

TEST_CASE("hierarchy construction rejects invalid configurations") {
    // smoothed level with m < p + 1
    CHECK_THROWS_AS(MultigridHierarchy(2, 4, 2, 1, SigmaMode::preset), std::invalid_argument);
    CHECK_THROWS_AS(MultigridHierarchy(1, 2, 3, 4, SigmaMode::preset), std::invalid_argument);
    // coarse level must keep the dense solver tractable
    CHECK_THROWS_AS(MultigridHierarchy(3, 2, 7, 6, SigmaMode::preset), std::invalid_argument);
}

TEST_CASE("coarse approximation constant stays small") {
    double d1_value = 0.0;
    for (int p : {2, 4, 8}) {
        const int l0 = MultigridHierarchy::default_coarse_level(p);
        MultigridHierarchy h(1, p, 4, l0, SigmaMode::theory);
        const double c = coarse_approx_check(h, 4);
        CHECK(c <= 10.0);
        if (p == 2) d1_value = c;
    }
    MultigridHierarchy h2(2, 2, 3, MultigridHierarchy::default_coarse_level(2), SigmaMode::theory);
    const double c2 = coarse_approx_check(h2, 3);
    CHECK(c2 <= 2.0 * d1_value);
    CHECK_THROWS_AS(coarse_approx_check(h2, 1), std::invalid_argument);

    // (16 + 2)^3 = 5832 unknowns exceeds the dense-computation guard
    MultigridHierarchy big(3, 2, 4, MultigridHierarchy::default_coarse_level(2), SigmaMode::theory);
    CHECK_THROWS_AS(coarse_approx_check(big, 4), std::invalid_argument);
}

TEST_CASE("projector fixes the coarse space") {
    MultigridHierarchy h(2, 2, 3, MultigridHierarchy::default_coarse_level(2), SigmaMode::theory);
    const MgLevel& lev = h.level(3);
    const Matrix Af = lev.A.dense();
    const Matrix Puni = Matrix(lev.P);
    const std::vector<Matrix> pf = {Puni, Puni};
    const Matrix P = kron_dense(pf);
    const Matrix Ac = P.transpose() * Af * P;
    std::mt19937 gen(8);
    const Vector uc = oracles::random_vector(Ac.rows(), gen);
    const Vector u = P * uc;
    const Vector Tcu = P * Ac.llt().solve(P.transpose() * (Af * u));
    CHECK((u - Tcu).norm() < 1e-10 * u.norm());
}

TEST_SUITE_END();
