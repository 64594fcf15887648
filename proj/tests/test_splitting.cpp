#include <doctest.h>

#include <Eigen/Dense>
#include <igamg/splitting.hpp>
#include <numbers>
#include <random>

#include "oracles.hpp"

using namespace igamg;

TEST_SUITE_BEGIN("splitting");

namespace {

double max_gev(const Matrix& A, const Matrix& B) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(A, B, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
    return es.eigenvalues().maxCoeff();
}

}  // namespace

TEST_CASE("boundary derivative matrix for p = 2") {
    const SplineSpace s = make_space(2, 4);
    const Matrix D = boundary_derivative_matrix(s, Side::left);
    REQUIRE(D.rows() == 2);
    CHECK(D(0, 0) == doctest::Approx(-2.0));
    CHECK(D(0, 1) == doctest::Approx(2.0));
    CHECK(D.row(1).norm() == 0.0);

    const Matrix DR = boundary_derivative_matrix(s, Side::right);
    CHECK(DR(0, 0) == doctest::Approx(-2.0));
    CHECK(DR(0, 1) == doctest::Approx(2.0));
}

TEST_CASE("boundary derivative matrix edge cases") {
    // p = 1: no odd orders below 1, the padded matrix is zero
    const Matrix D1 = boundary_derivative_matrix(make_space(1, 3), Side::left);
    CHECK(D1.norm() == 0.0);

    // p = 3: only the first-derivative row is populated, rank k = 1
    const Matrix D3 = boundary_derivative_matrix(make_space(3, 5), Side::left);
    Eigen::FullPivLU<Matrix> lu(D3);
    CHECK(lu.rank() == 1);

    CHECK_THROWS_AS(boundary_derivative_matrix(make_space(4, 4), Side::left), std::invalid_argument);
}

TEST_CASE("splitting dimensions") {
    {
        const SplineSpace s = make_space(4, 20);
        const SplittingBasis b = compute_splitting(s, assemble_mass(s));
        CHECK(b.dim0() == 20);
        CHECK(b.dim1() == 4);
    }
    {
        const SplineSpace s = make_space(2, 4);
        const SplittingBasis b = compute_splitting(s, assemble_mass(s));
        CHECK(b.dim0() == 4);
        CHECK(b.dim1() == 2);
    }
    {
        // p = 1: the splitting degenerates to the identity
        const SplineSpace s = make_space(1, 6);
        const SplittingBasis b = compute_splitting(s, assemble_mass(s));
        CHECK(b.k == 0);
        CHECK(b.dim1() == 0);
        CHECK((Matrix(b.P0) - Matrix::Identity(s.dim(), s.dim())).norm() == 0.0);
    }
    for (int p = 1; p <= 14; ++p) {
        Index m = 2;
        while (m < p + 1) m *= 2;
        const SplineSpace s = make_space(p, m);
        const SplittingBasis b = compute_splitting(s, assemble_mass(s));
        CHECK(b.dim0() == s.dim() - 2 * (p / 2));
        CHECK(b.dim0() >= s.dim() - p);
    }
}

TEST_CASE("splitting bases are orthonormal and L2-orthogonal") {
    for (int p : {2, 3, 5, 8, 11, 14}) {
        Index m = 2;
        while (m < p + 1) m *= 2;
        for (int rep = 0; rep < 2; ++rep, m *= 2) {
            const SplineSpace s = make_space(p, m);
            const BandedSymMatrix M = assemble_mass(s);
            const SplittingBasis b = compute_splitting(s, M);

            Matrix PP(s.dim(), s.dim());
            PP.leftCols(b.dim0()) = Matrix(b.P0);
            PP.rightCols(b.dim1()) = Matrix(b.P_perp);
            CHECK((PP.transpose() * PP - Matrix::Identity(s.dim(), s.dim())).norm() < 1e-12);

            CHECK((Matrix(b.P0).transpose() * Matrix(b.P_perp)).norm() < 1e-12);

            const Matrix G = Matrix(b.P0).transpose() * (M.dense() * b.P1);
            CHECK(G.norm() < 1e-10 * M.dense().norm());
        }
    }
}

TEST_CASE("columns of P0 annihilate the boundary derivatives") {
    for (int p : {2, 4, 6, 9, 12, 14}) {
        Index m = 2;
        while (m < p + 1) m *= 2;
        const SplineSpace s = make_space(p, m);
        const SplittingBasis b = compute_splitting(s, assemble_mass(s));
        const Matrix DL = boundary_derivative_matrix(s, Side::left);
        const Matrix DR = boundary_derivative_matrix(s, Side::right);
        const Matrix left_block = Matrix(b.P0).topLeftCorner(p, p - b.k);
        const Matrix right_block = Matrix(b.P0).bottomRightCorner(p, p - b.k);
        // scaled: high-order derivative rows reach 1e10 for p = 14
        CHECK((DL * left_block).norm() <= 1e-10 * std::max(1.0, DL.norm()));
        CHECK((DR * right_block).norm() <= 1e-10 * std::max(1.0, DR.norm()));
        if (p <= 8) {
            CHECK((DL * left_block).norm() <= 1e-10);
            CHECK((DR * right_block).norm() <= 1e-10);
        }
    }
}

TEST_CASE("splitting is reproducible and rejects invalid spaces") {
    const SplineSpace s = make_space(5, 8);
    const BandedSymMatrix M = assemble_mass(s);
    const SplittingBasis a = compute_splitting(s, M), b = compute_splitting(s, M);
    CHECK((Matrix(a.P0) - Matrix(b.P0)).norm() == 0.0);
    CHECK((a.P1 - b.P1).norm() == 0.0);

    CHECK_THROWS_AS(compute_splitting(make_space(4, 4), assemble_mass(make_space(4, 4))),
                    std::invalid_argument);
}

TEST_CASE("subspace gram matrices: definiteness and kernels") {
    const SplineSpace s = make_space(2, 8);
    const BandedSymMatrix M = assemble_mass(s), K = assemble_stiffness(s);
    const SplittingBasis b = compute_splitting(s, M);
    const SubspaceGram g = subspace_gram(b, M, K);

    CHECK(g.M0.bandwidth() <= 2 * s.degree);
    Eigen::SelfAdjointEigenSolver<Matrix> em(g.M0.dense());
    CHECK(em.eigenvalues().minCoeff() > 0.0);
    Eigen::SelfAdjointEigenSolver<Matrix> ek(g.K0.dense());
    CHECK(ek.eigenvalues().minCoeff() > -1e-12);
    Eigen::SelfAdjointEigenSolver<Matrix> e1(g.M1);
    CHECK(e1.eigenvalues().minCoeff() > 0.0);

    // constants live in S0: K0 applied to the P0-coefficients of 1 vanishes
    const Vector c0 = Matrix(b.P0).transpose() * Vector::Ones(s.dim());
    CHECK(g.K0.apply(c0).norm() < 1e-12);
}

TEST_CASE("inverse inequality on S0 (squared constant 12)") {
    const SplineSpace s = make_space(3, 16);
    const BandedSymMatrix M = assemble_mass(s), K = assemble_stiffness(s);
    const SplittingBasis b = compute_splitting(s, M);
    const SubspaceGram g = subspace_gram(b, M, K);
    const double lam = max_gev(g.K0.dense(), g.M0.dense());
    CHECK(lam <= 12.0 / (s.h * s.h) * (1.0 + 1e-8));

    for (int p = 1; p <= 10; ++p) {
        Index m = 2;
        while (m < p + 1) m *= 2;
        for (; m <= 64; m *= 2) {
            const SplineSpace sp = make_space(p, m);
            const BandedSymMatrix Mp = assemble_mass(sp), Kp = assemble_stiffness(sp);
            const SubspaceGram gp = subspace_gram(compute_splitting(sp, Mp), Mp, Kp);
            const double l = max_gev(gp.K0.dense(), gp.M0.dense()) * sp.h * sp.h;
            CHECK(l <= 12.0 + 1e-6);
        }
    }
}

TEST_CASE("mass energy splits over the two subspaces") {
    const SplineSpace s = make_space(4, 12);
    const BandedSymMatrix M = assemble_mass(s), K = assemble_stiffness(s);
    const SplittingBasis b = compute_splitting(s, M);
    const SubspaceGram g = subspace_gram(b, M, K);
    std::mt19937 gen(12);
    for (int t = 0; t < 20; ++t) {
        const Vector e = oracles::random_vector(b.dim0(), gen);
        const Vector f = oracles::random_vector(b.dim1(), gen);
        const Vector v = Matrix(b.P0) * e + b.P1 * f;
        const double full = v.dot(M.apply(v));
        const double split = e.dot(g.M0.apply(e)) + f.dot(g.M1 * f);
        CHECK(full == doctest::Approx(split).epsilon(1e-10));
    }
}

TEST_CASE("approximation property and L2-orthogonal decomposition") {
    std::mt19937 gen(13);
    for (int p : {2, 5, 8}) {
        for (Index m : {Index(16), Index(64)}) {
            const SplineSpace s = make_space(p, m);
            const BandedSymMatrix M = assemble_mass(s), K = assemble_stiffness(s);
            const SplittingBasis b = compute_splitting(s, M);
            const SubspaceGram g = subspace_gram(b, M, K);
            const BandedCholesky M0chol(g.M0);
            const Matrix P0 = Matrix(b.P0);
            const Matrix Md = M.dense(), Kd = K.dense();
            for (int t = 0; t < 200; ++t) {
                const Vector u = oracles::random_vector(s.dim(), gen);
                const Vector q0 = P0 * M0chol.solve(P0.transpose() * (Md * u));
                const Vector diff = u - q0;
                const double l2_diff = std::sqrt(diff.dot(Md * diff));
                const double l2_u = std::sqrt(u.dot(Md * u));
                const double h1_u = std::sqrt(u.dot(Kd * u));
                CHECK(l2_diff <= std::numbers::sqrt2 * s.h * h1_u + 1e-10 * l2_u);
                const double sum = q0.dot(Md * q0) + l2_diff * l2_diff;
                CHECK(sum == doctest::Approx(l2_u * l2_u).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("H1 stability constant is bounded and does not grow with m") {
    for (int p : {2, 4, 7}) {
        double prev = -1.0;
        for (Index m : {Index(8), Index(16), Index(32)}) {
            if (m < p + 1) continue;
            const SplineSpace s = make_space(p, m);
            const BandedSymMatrix M = assemble_mass(s), K = assemble_stiffness(s);
            const SplittingBasis b = compute_splitting(s, M);
            const SubspaceGram g = subspace_gram(b, M, K);
            const Matrix P0 = Matrix(b.P0);
            const Matrix Md = M.dense(), Kd = K.dense();
            const Matrix Q0 = P0 * g.M0.dense().llt().solve(P0.transpose() * Md);
            const Matrix Q1 = Matrix::Identity(s.dim(), s.dim()) - Q0;
            const Matrix Z = Q0.transpose() * Kd * Q0 + Q1.transpose() * Kd * Q1;
            const Matrix W =
                Eigen::HouseholderQR<Matrix>(Matrix(Matrix::Ones(s.dim(), 1))).householderQ();
            const Matrix Wc = W.rightCols(s.dim() - 1);
            const double c_emp = max_gev(Wc.transpose() * Z * Wc, Wc.transpose() * Kd * Wc);
            CHECK(c_emp <= 100.0);
            if (prev >= 0.0) CHECK(c_emp <= prev * 1.05);
            prev = c_emp;
        }
    }
}

TEST_SUITE_END();
