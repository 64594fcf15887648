#include "igamg/multigrid.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace igamg {

double sigma_coefficient(SigmaMode mode, int d, double explicit_scale) {
    switch (mode) {
        case SigmaMode::theory:
            return 12.0;
        case SigmaMode::preset:
            if (d == 1) return 1.0 / 0.09;
            if (d == 2) return 1.0 / 0.18;
            if (d == 3) return 1.0 / 0.19;
            return 12.0;
        case SigmaMode::explicit_value:
            if (!(explicit_scale > 0.0))
                throw std::invalid_argument("sigma_coefficient: explicit sigma scale must be positive");
            return explicit_scale;
    }
    throw std::invalid_argument("sigma_coefficient: unknown mode");
}

double effective_sigma_coefficient(SigmaMode mode, int d, int degree, double explicit_scale) {
    if (mode == SigmaMode::preset && degree == 1) return sigma_coefficient(SigmaMode::theory, d);
    return sigma_coefficient(mode, d, explicit_scale);
}

int MultigridHierarchy::default_coarse_level(int degree) {
    int l = 0;
    while ((Index(1) << (l + 1)) < degree + 1) ++l;  // smallest l with 2^(l+1) >= p+1
    return l;
}

MultigridHierarchy::MultigridHierarchy(int d, int degree, int fine_level, int coarse_level,
                                       SigmaMode sigma_mode, double sigma_scale)
    : d_(d), p_(degree), coarse_level_(coarse_level), fine_level_(fine_level) {
    if (d < 1) throw std::invalid_argument("MultigridHierarchy: d must be >= 1");
    if (fine_level < coarse_level)
        throw std::invalid_argument("MultigridHierarchy: fine level below coarse level");
    if (coarse_level < 0) throw std::invalid_argument("MultigridHierarchy: negative coarse level");
    if (fine_level > coarse_level && (Index(1) << (coarse_level + 1)) < degree + 1)
        throw std::invalid_argument(
            "MultigridHierarchy: smoothed levels require 2^level >= degree + 1");

    flops::ScopedPhase phase(flops::Phase::setup);
    levels_.reserve(static_cast<size_t>(fine_level - coarse_level + 1));
    const double sigma_coef = effective_sigma_coefficient(sigma_mode, d, degree, sigma_scale);
    for (int l = coarse_level; l <= fine_level; ++l) {
        MgLevel lev;
        lev.space = make_space(degree, Index(1) << l);
        lev.M = assemble_mass(lev.space);
        lev.K = assemble_stiffness(lev.space);
        lev.A = build_operator(lev.space, d);
        if (l > coarse_level) {
            const MgLevel& below = levels_.back();
            lev.P = prolongation(below.space, lev.space);
            lev.basis = compute_splitting(lev.space, lev.M);
            lev.gram = subspace_gram(*lev.basis, lev.M, lev.K);
            const double sigma = sigma_coef / (lev.space.h * lev.space.h);
            lev.smoother.emplace(*lev.basis, *lev.gram, d, sigma);
        }
        levels_.push_back(std::move(lev));
    }

    const Index coarse_size = level_size(coarse_level_);
    if (coarse_size > 6000)
        throw std::invalid_argument("MultigridHierarchy: coarsest level too large for a dense solver (" +
                                    std::to_string(coarse_size) + " unknowns)");
    coarse_llt_.compute(levels_.front().A.dense());
    if (coarse_llt_.info() != Eigen::Success)
        throw std::runtime_error("MultigridHierarchy: coarse operator not SPD");
}

Index MultigridHierarchy::level_size(int l) const {
    Index s = 1;
    for (int a = 0; a < d_; ++a) s *= level(l).space.dim();
    return s;
}

Vector MultigridHierarchy::smooth(int l, Vector u, const Vector& f, int steps, double tau) const {
    const MgLevel& lev = level(l);
    if (steps > 0 && !lev.smoother)
        throw std::invalid_argument("smooth: no smoother on the coarsest level");
    for (int s = 0; s < steps; ++s) {
        Vector r;
        {
            flops::ScopedPhase phase(flops::Phase::residual);
            r = f - lev.A.apply(u);
        }
        flops::ScopedPhase phase(flops::Phase::smooth);
        u += tau * lev.smoother->apply_inverse(r);
    }
    return u;
}

Vector MultigridHierarchy::restrict_residual(int fine_l, const Vector& r) const {
    flops::ScopedPhase phase(flops::Phase::transfer);
    const SparseMatrix& P = level(fine_l).P;
    std::vector<Index> dims(static_cast<size_t>(d_), P.rows());
    Vector cur = r;
    for (int a = 0; a < d_; ++a) {
        std::vector<Index> out_dims = dims;
        out_dims[static_cast<size_t>(a)] = P.cols();
        Vector next(product(out_dims));
        mode_apply(SparseApplyTransposedOp{P}, dims, a, cur.data(), next.data());
        cur.swap(next);
        dims = std::move(out_dims);
    }
    return cur;
}

Vector MultigridHierarchy::prolong_correction(int fine_l, const Vector& e) const {
    flops::ScopedPhase phase(flops::Phase::transfer);
    const SparseMatrix& P = level(fine_l).P;
    std::vector<Index> dims(static_cast<size_t>(d_), P.cols());
    Vector cur = e;
    for (int a = 0; a < d_; ++a) {
        std::vector<Index> out_dims = dims;
        out_dims[static_cast<size_t>(a)] = P.rows();
        Vector next(product(out_dims));
        mode_apply(SparseApplyOp{P}, dims, a, cur.data(), next.data());
        cur.swap(next);
        dims = std::move(out_dims);
    }
    return cur;
}

Vector MultigridHierarchy::coarse_solve(const Vector& f) const {
    flops::ScopedPhase phase(flops::Phase::coarse);
    Vector u = f;
    coarse_llt_.solveInPlace(u);
    flops::add(static_cast<std::uint64_t>(2 * f.size() * f.size()));
    return u;
}

Vector MultigridHierarchy::cycle(int l, Vector u, const Vector& f, const SolverConfig& config) const {
    if (l == coarse_level_) return coarse_solve(f);
    u = smooth(l, std::move(u), f, config.nu_pre, config.tau);
    Vector r;
    {
        flops::ScopedPhase phase(flops::Phase::residual);
        r = f - level(l).A.apply(u);
    }
    const Vector rc = restrict_residual(l, r);
    Vector ec = Vector::Zero(rc.size());
    const int recursions = (config.cycle == CycleType::w_cycle && l - 1 > coarse_level_) ? 2 : 1;
    for (int g = 0; g < recursions; ++g) ec = cycle(l - 1, std::move(ec), rc, config);
    u += prolong_correction(l, ec);
    return smooth(l, std::move(u), f, config.nu_post, config.tau);
}

SolveResult solve_mg(const MultigridHierarchy& hierarchy, const Vector& f, const SolverConfig& config,
                     const Vector* initial_guess) {
    const int fine = hierarchy.fine_level();
    const TensorOperator& A = hierarchy.level(fine).A;
    if (f.size() != hierarchy.level_size(fine)) throw std::invalid_argument("solve_mg: rhs size mismatch");
    SolveResult res;
    res.u = initial_guess ? *initial_guess : Vector::Zero(f.size());
    const double norm0 = (f - A.apply(res.u)).norm();
    if (norm0 == 0.0) {
        res.converged = true;
        res.residual_history.push_back(0.0);
        return res;
    }
    for (int it = 1; it <= config.max_iter; ++it) {
        res.u = hierarchy.cycle(fine, std::move(res.u), f, config);
        double rel;
        {
            flops::ScopedPhase phase(flops::Phase::residual);
            rel = (f - A.apply(res.u)).norm() / norm0;
        }
        res.residual_history.push_back(rel);
        res.iterations = it;
        if (rel <= config.tol) {
            res.converged = true;
            return res;
        }
    }
    res.failure = "max_iter reached without residual reduction to tolerance";
    return res;
}

SolveResult solve_pcg(const MultigridHierarchy& hierarchy, const Vector& f, const SolverConfig& config,
                      const Vector* initial_guess) {
    if (config.nu_pre != config.nu_post)
        throw std::invalid_argument("solve_pcg: nu_pre must equal nu_post for an SPD preconditioner");
    const int fine = hierarchy.fine_level();
    const TensorOperator& A = hierarchy.level(fine).A;
    if (f.size() != hierarchy.level_size(fine)) throw std::invalid_argument("solve_pcg: rhs size mismatch");

    const auto precondition = [&](const Vector& r) {
        return hierarchy.cycle(fine, Vector::Zero(r.size()), r, config);
    };

    SolveResult res;
    res.u = initial_guess ? *initial_guess : Vector::Zero(f.size());
    Vector r = f - A.apply(res.u);
    const double norm0 = r.norm();
    if (norm0 == 0.0) {
        res.converged = true;
        res.residual_history.push_back(0.0);
        return res;
    }
    Vector z = precondition(r);
    double rz = r.dot(z);
    if (rz <= 0.0) {
        res.failure = "pcg breakdown: <r, z> <= 0, preconditioner not SPD";
        return res;
    }
    Vector p = z;
    for (int it = 1; it <= config.max_iter; ++it) {
        Vector q;
        {
            flops::ScopedPhase phase(flops::Phase::residual);
            q = A.apply(p);
        }
        const double alpha = rz / p.dot(q);
        res.u += alpha * p;
        r -= alpha * q;
        const double rel = r.norm() / norm0;
        res.residual_history.push_back(rel);
        res.iterations = it;
        if (rel <= config.tol) {
            res.converged = true;
            return res;
        }
        z = precondition(r);
        const double rz_next = r.dot(z);
        if (rz_next <= 0.0) {
            res.failure = "pcg breakdown: <r, z> <= 0, preconditioner not SPD";
            return res;
        }
        p = z + (rz_next / rz) * p;
        rz = rz_next;
    }
    res.failure = "max_iter reached without residual reduction to tolerance";
    return res;
}

double coarse_approx_check(const MultigridHierarchy& hierarchy, int level) {
    if (level <= hierarchy.coarse_level())
        throw std::invalid_argument("coarse_approx_check: level must be above the coarsest");
    const Index n = hierarchy.level_size(level);
    if (n > 5000) throw std::invalid_argument("coarse_approx_check: refusing above 5000 unknowns");

    const MgLevel& lev = hierarchy.level(level);
    const Matrix Af = lev.A.dense();
    const Matrix Puni = Matrix(lev.P);
    std::vector<Matrix> pf(static_cast<size_t>(hierarchy.dim_count()), Puni);
    const Matrix P = kron_dense(pf);

    const Matrix Ac = P.transpose() * Af * P;
    const Matrix Tc = P * Ac.llt().solve(P.transpose() * Af);
    const Matrix B = Matrix::Identity(n, n) - Tc;

    const Matrix Md = build_mass_operator(lev.space, hierarchy.dim_count()).dense();
    const Matrix S = B.transpose() * Md * B;
    const double h = lev.space.h;

    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(0.5 * (S + S.transpose()), (h * h) * Af,
                                                        Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
    if (es.info() != Eigen::Success) throw std::runtime_error("coarse_approx_check: eigensolver failed");
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

}  // namespace igamg
