#include "igamg/splitting.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

namespace igamg {

Matrix boundary_derivative_matrix(const SplineSpace& space, Side side) {
    const int p = space.degree;
    if (p + 1 > space.intervals)
        throw std::invalid_argument("boundary_derivative_matrix: requires p + 1 <= m");
    const int k = p / 2;
    Matrix D = Matrix::Zero(p, p);
    for (int i = 1; i <= k; ++i) {
        const int order = 2 * i - 1;
        const double scale = std::pow(space.h, order);
        const BasisValues bv = eval_basis(space, side == Side::left ? 0.0 : 1.0, order);
        // left: the first p of the p+1 active functions; right: the last p
        const Index offset = side == Side::left ? 0 : 1;
        for (int j = 0; j < p; ++j) D(i - 1, j) = scale * bv.values[offset + j];
    }
    return D;
}

namespace {

// Right singular vectors of D, rows equilibrated to unit norm before the
// SVD so that rank detection stays reliable for large p.  Columns are sign
// normalized (largest-magnitude entry positive) for reproducibility.
Matrix kernel_splitting_svd(const Matrix& D, int k) {
    const Index p = D.rows();
    Matrix Dhat = D;
    for (Index i = 0; i < p; ++i) {
        const double norm = Dhat.row(i).norm();
        if (norm > 0.0) Dhat.row(i) /= norm;
    }
    Eigen::JacobiSVD<Matrix> svd(Dhat, Eigen::ComputeFullV);
    const Vector& sv = svd.singularValues();
    const double threshold = sv.size() > 0 ? 1e-8 * sv[0] : 0.0;
    int rank = 0;
    for (Index i = 0; i < sv.size(); ++i)
        if (sv[i] > threshold) ++rank;
    if (rank != k)
        throw std::runtime_error("compute_splitting: numerical rank " + std::to_string(rank) +
                                 " of boundary derivative matrix differs from k = " + std::to_string(k));
    Matrix V = svd.matrixV();
    for (Index j = 0; j < V.cols(); ++j) {
        Index imax = 0;
        V.col(j).cwiseAbs().maxCoeff(&imax);
        if (V(imax, j) < 0.0) V.col(j) = -V.col(j);
    }
    return V;
}

}  // namespace

SplittingBasis compute_splitting(const SplineSpace& space, const BandedSymMatrix& mass) {
    const int p = space.degree;
    const Index n = space.dim();
    if (p + 1 > space.intervals) throw std::invalid_argument("compute_splitting: requires p + 1 <= m");
    if (mass.dim() != n) throw std::invalid_argument("compute_splitting: mass matrix dimension mismatch");
    const int k = p / 2;

    const Matrix VL = kernel_splitting_svd(boundary_derivative_matrix(space, Side::left), k);
    const Matrix VR = kernel_splitting_svd(boundary_derivative_matrix(space, Side::right), k);

    SplittingBasis basis;
    basis.space = space;
    basis.k = k;

    const Index n0 = n - 2 * k;
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<size_t>(2 * p * (p - k) + n));
    // left boundary block: last p-k right singular vectors (the kernel of D)
    for (Index i = 0; i < p; ++i)
        for (Index j = 0; j < p - k; ++j) trips.emplace_back(i, j, VL(i, k + j));
    // interior identity block
    for (Index i = 0; i < n - 2 * p; ++i) trips.emplace_back(p + i, (p - k) + i, 1.0);
    // right boundary block
    for (Index i = 0; i < p; ++i)
        for (Index j = 0; j < p - k; ++j) trips.emplace_back(n - p + i, n0 - (p - k) + j, VR(i, k + j));
    basis.P0.resize(n, n0);
    basis.P0.setFromTriplets(trips.begin(), trips.end());
    basis.P0.makeCompressed();

    trips.clear();
    for (Index i = 0; i < p; ++i)
        for (Index j = 0; j < k; ++j) {
            trips.emplace_back(i, j, VL(i, j));
            trips.emplace_back(n - p + i, k + j, VR(i, j));
        }
    basis.P_perp.resize(n, 2 * k);
    basis.P_perp.setFromTriplets(trips.begin(), trips.end());
    basis.P_perp.makeCompressed();

    // P1 = M^{-1} P_perp.  The mass matrix becomes increasingly
    // ill-conditioned for large p, so the solves run in extended precision
    // with one refinement step.
    basis.P1.resize(n, 2 * k);
    if (k > 0) {
        const auto mass_ld = mass.cast<long double>();
        const BandedCholeskyT<long double> chol(mass_ld);
        const Matrix perp_dense = Matrix(basis.P_perp);
        std::vector<long double> col(static_cast<size_t>(n)), rhs(static_cast<size_t>(n)),
            resid(static_cast<size_t>(n)), tmp(static_cast<size_t>(n));
        for (Index j = 0; j < 2 * k; ++j) {
            for (Index i = 0; i < n; ++i) rhs[static_cast<size_t>(i)] = static_cast<long double>(perp_dense(i, j));
            col = rhs;
            chol.solve_inplace(col.data());
            mass_ld.apply(col.data(), tmp.data());
            for (Index i = 0; i < n; ++i) resid[static_cast<size_t>(i)] = rhs[static_cast<size_t>(i)] - tmp[static_cast<size_t>(i)];
            chol.solve_inplace(resid.data());
            for (Index i = 0; i < n; ++i) basis.P1(i, j) = static_cast<double>(col[static_cast<size_t>(i)] + resid[static_cast<size_t>(i)]);
        }
        // remove the leftover S0 component in the M-inner product so that
        // P0^T M P1 vanishes to roundoff; the residual is accumulated in
        // extended precision because |P1| grows with the mass condition
        const SparseMatrix Ms = mass.sparse();
        const SparseMatrix M0s = basis.P0.transpose() * (Ms * basis.P0).eval();
        Index bw = 0;
        for (int jc = 0; jc < M0s.outerSize(); ++jc)
            for (SparseMatrix::InnerIterator it(M0s, jc); it; ++it)
                bw = std::max(bw, std::abs(it.row() - it.col()));
        BandedSymMatrix M0(M0s.rows(), bw);
        for (int jc = 0; jc < M0s.outerSize(); ++jc)
            for (SparseMatrix::InnerIterator it(M0s, jc); it; ++it)
                if (it.row() >= it.col()) M0.at(it.row(), it.col()) = it.value();
        const BandedCholesky m0_chol(M0);
        Matrix G(n0, 2 * k);
        std::vector<long double> w(static_cast<size_t>(n));
        for (Index j = 0; j < 2 * k; ++j) {
            for (Index i = 0; i < n; ++i) col[static_cast<size_t>(i)] = static_cast<long double>(basis.P1(i, j));
            mass_ld.apply(col.data(), w.data());
            for (int jc = 0; jc < basis.P0.outerSize(); ++jc) {
                long double dot = 0.0L;
                for (SparseMatrix::InnerIterator it(basis.P0, jc); it; ++it)
                    dot += static_cast<long double>(it.value()) * w[static_cast<size_t>(it.row())];
                G(jc, j) = static_cast<double>(dot);
            }
        }
        for (Index j = 0; j < 2 * k; ++j) {
            const Vector correction = m0_chol.solve(G.col(j));
            basis.P1.col(j) -= basis.P0 * correction;
        }
        // unit column norms keep the S1 basis representable in doubles (the
        // raw M^{-1} P_perp columns reach 1e7 for p = 14); all consumers are
        // invariant under this rescaling
        for (Index j = 0; j < 2 * k; ++j) basis.P1.col(j) /= basis.P1.col(j).norm();
    }
    return basis;
}

namespace {

BandedSymMatrix banded_from_sparse(const SparseMatrix& G, Index max_bw) {
    Index bw = 0;
    for (int jc = 0; jc < G.outerSize(); ++jc)
        for (SparseMatrix::InnerIterator it(G, jc); it; ++it)
            if (it.value() != 0.0) bw = std::max(bw, std::abs(it.row() - it.col()));
    bw = std::min(bw, max_bw);
    BandedSymMatrix B(G.rows(), bw);
    for (int jc = 0; jc < G.outerSize(); ++jc)
        for (SparseMatrix::InnerIterator it(G, jc); it; ++it) {
            if (it.row() < it.col()) continue;
            if (it.row() - it.col() > bw) continue;
            // average with the mirrored entry so the band is exactly symmetric
            B.at(it.row(), it.col()) = 0.5 * (it.value() + G.coeff(it.col(), it.row()));
        }
    return B;
}

}  // namespace

SubspaceGram subspace_gram(const SplittingBasis& basis, const BandedSymMatrix& M,
                           const BandedSymMatrix& K) {
    const Index n = basis.space.dim();
    if (M.dim() != n || K.dim() != n) throw std::invalid_argument("subspace_gram: dimension mismatch");
    const int p = basis.space.degree;
    const SparseMatrix Ms = M.sparse();
    const SparseMatrix Ks = K.sparse();

    SubspaceGram g;
    const SparseMatrix M0s = basis.P0.transpose() * (Ms * basis.P0).eval();
    const SparseMatrix K0s = basis.P0.transpose() * (Ks * basis.P0).eval();
    g.M0 = banded_from_sparse(M0s, 2 * p);
    g.K0 = banded_from_sparse(K0s, 2 * p);

    if (basis.k > 0) {
        const Matrix MP1 = Ms * basis.P1;
        const Matrix KP1 = Ks * basis.P1;
        g.M1 = basis.P1.transpose() * MP1;
        g.K1 = basis.P1.transpose() * KP1;
        g.M1 = 0.5 * (g.M1 + g.M1.transpose()).eval();
        g.K1 = 0.5 * (g.K1 + g.K1.transpose()).eval();
    } else {
        g.M1.resize(0, 0);
        g.K1.resize(0, 0);
    }
    return g;
}

}  // namespace igamg
