#include "igamg/model_problem.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace igamg {

TensorOperator build_operator(const SplineSpace& space, int d) {
    if (d < 1) throw std::invalid_argument("build_operator: d must be >= 1");
    const BandedSymMatrix M = assemble_mass(space);
    const BandedSymMatrix K = assemble_stiffness(space);
    std::vector<Index> dims(static_cast<size_t>(d), space.dim());
    std::vector<std::vector<BandedSymMatrix>> terms;
    terms.reserve(static_cast<size_t>(d + 1));
    for (int slot = 0; slot < d; ++slot) {
        std::vector<BandedSymMatrix> term(static_cast<size_t>(d), M);
        term[static_cast<size_t>(slot)] = K;
        terms.push_back(std::move(term));
    }
    terms.emplace_back(static_cast<size_t>(d), M);
    return TensorOperator(std::move(dims), std::move(terms));
}

TensorOperator build_mass_operator(const SplineSpace& space, int d) {
    if (d < 1) throw std::invalid_argument("build_mass_operator: d must be >= 1");
    const BandedSymMatrix M = assemble_mass(space);
    std::vector<Index> dims(static_cast<size_t>(d), space.dim());
    std::vector<std::vector<BandedSymMatrix>> terms;
    terms.emplace_back(static_cast<size_t>(d), M);
    return TensorOperator(std::move(dims), std::move(terms));
}

Vector cosine_moments(const SplineSpace& space) {
    const int p = space.degree;
    const int npts = p + 2;
    const GaussRule rule = gauss_legendre(npts);
    Vector v = Vector::Zero(space.dim());
    for (Index el = 0; el < space.intervals; ++el) {
        const double a = static_cast<double>(el) * space.h;
        for (int q = 0; q < npts; ++q) {
            const double x = a + space.h * rule.nodes[q];
            const double w = space.h * rule.weights[q] * std::cos(std::numbers::pi * x);
            const BasisValues bv = eval_basis(space, x);
            for (Index i = 0; i <= p; ++i) v[bv.first + i] += w * bv.values[i];
        }
    }
    return v;
}

Vector assemble_rhs(const SplineSpace& space, int d) {
    if (d < 1) throw std::invalid_argument("assemble_rhs: d must be >= 1");
    const Vector v = cosine_moments(space);
    const Index n = space.dim();
    // rhs = d pi^2 (v x ... x v), last axis fastest
    Vector rhs = v;
    for (int a = 1; a < d; ++a) {
        Vector next(rhs.size() * n);
        for (Index i = 0; i < rhs.size(); ++i)
            for (Index j = 0; j < n; ++j) next[i * n + j] = rhs[i] * v[j];
        rhs.swap(next);
    }
    rhs *= static_cast<double>(d) * std::numbers::pi * std::numbers::pi;
    return rhs;
}

double exact_solution_error(const Vector& u, const SplineSpace& space, int d) {
    const Index n = space.dim();
    Index size = 1;
    for (int a = 0; a < d; ++a) size *= n;
    if (u.size() != size) throw std::invalid_argument("exact_solution_error: coefficient count mismatch");
    const double pi = std::numbers::pi;
    const double amp = static_cast<double>(d) * pi * pi / (static_cast<double>(d) * pi * pi + 1.0);

    const int p = space.degree;
    const int npts = p + 2;
    const GaussRule rule = gauss_legendre(npts);
    const Index q = space.intervals * npts;

    // univariate evaluation matrix E(q_i, j) = phi_j(x_i) at all quadrature
    // points, plus per-point weights and cos(pi x) values
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<size_t>(q * (p + 1)));
    Vector w(q), cosx(q);
    for (Index el = 0; el < space.intervals; ++el) {
        const double a = static_cast<double>(el) * space.h;
        for (int g = 0; g < npts; ++g) {
            const Index row = el * npts + g;
            const double x = a + space.h * rule.nodes[g];
            w[row] = space.h * rule.weights[g];
            cosx[row] = std::cos(pi * x);
            const BasisValues bv = eval_basis(space, x);
            for (Index i = 0; i <= p; ++i) trips.emplace_back(row, bv.first + i, bv.values[i]);
        }
    }
    SparseMatrix E(q, n);
    E.setFromTriplets(trips.begin(), trips.end());

    // evaluate u_h on the tensor quadrature grid by d mode products
    std::vector<Index> dims(static_cast<size_t>(d), n);
    Vector vals = u;
    for (int a = 0; a < d; ++a) {
        std::vector<Index> out_dims = dims;
        out_dims[static_cast<size_t>(a)] = q;
        Vector next(product(out_dims));
        mode_apply(SparseApplyOp{E}, dims, a, vals.data(), next.data());
        vals.swap(next);
        dims = std::move(out_dims);
    }

    // accumulate sum w (u_h - u*)^2 over the grid
    double err2 = 0.0;
    std::vector<Index> idx(static_cast<size_t>(d), 0);
    for (Index flat = 0; flat < vals.size(); ++flat) {
        double weight = 1.0, exact = amp;
        for (int a = 0; a < d; ++a) {
            weight *= w[idx[static_cast<size_t>(a)]];
            exact *= cosx[idx[static_cast<size_t>(a)]];
        }
        const double diff = vals[flat] - exact;
        err2 += weight * diff * diff;
        for (int a = d - 1; a >= 0; --a) {
            if (++idx[static_cast<size_t>(a)] < q) break;
            idx[static_cast<size_t>(a)] = 0;
        }
    }
    return std::sqrt(err2);
}

ModelProblem make_model_problem(const SplineSpace& space, int d) {
    ModelProblem mp;
    mp.d = d;
    mp.space = space;
    mp.A = build_operator(space, d);
    mp.Md = build_mass_operator(space, d);
    mp.rhs = assemble_rhs(space, d);
    return mp;
}

}  // namespace igamg
