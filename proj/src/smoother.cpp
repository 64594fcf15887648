#include "igamg/smoother.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace igamg {

SubspaceSmoother::SubspaceSmoother(const SplittingBasis& basis, const SubspaceGram& gram, int d,
                                   double sigma)
    : d_(d), sigma_(sigma) {
    if (d < 1) throw std::invalid_argument("SubspaceSmoother: d must be >= 1");
    if (!(sigma > 0.0)) throw std::invalid_argument("SubspaceSmoother: sigma must be positive");
    n_ = basis.space.dim();
    n0_ = basis.dim0();
    n1_ = basis.dim1();
    P0_ = basis.P0;
    P1_ = basis.P1;
    m0_chol_ = std::make_shared<BandedCholesky>(gram.M0);

    // dense factors X_j, shared between blocks with the same number of ones
    std::vector<std::shared_ptr<const Eigen::LLT<Matrix>>> xfactors(static_cast<size_t>(d) + 1);
    if (n1_ > 0) {
        for (int j = 1; j <= d; ++j) {
            std::vector<Matrix> factors(static_cast<size_t>(j), gram.M1);
            Matrix X = (1.0 + (d - j) * sigma) * kron_dense(factors);
            for (int s = 0; s < j; ++s) {
                factors.assign(static_cast<size_t>(j), gram.M1);
                factors[static_cast<size_t>(s)] = gram.K1;
                X += kron_dense(factors);
            }
            auto llt = std::make_shared<Eigen::LLT<Matrix>>(X);
            if (llt->info() != Eigen::Success)
                throw std::runtime_error("SubspaceSmoother: dense subspace operator not SPD");
            xfactors[static_cast<size_t>(j)] = std::move(llt);
        }
    }

    const int nblocks = n1_ > 0 ? (1 << d) : 1;
    blocks_.reserve(static_cast<size_t>(nblocks));
    for (int bits = 0; bits < nblocks; ++bits) {
        SubspaceBlock blk;
        blk.alpha.resize(static_cast<size_t>(d));
        std::vector<int> order;
        order.reserve(static_cast<size_t>(d));
        for (int a = 0; a < d; ++a) {
            blk.alpha[static_cast<size_t>(a)] = static_cast<std::uint8_t>((bits >> (d - 1 - a)) & 1);
            if (blk.alpha[static_cast<size_t>(a)] == 0) order.push_back(a);
        }
        blk.num_zero = static_cast<int>(order.size());
        for (int a = 0; a < d; ++a)
            if (blk.alpha[static_cast<size_t>(a)] == 1) order.push_back(a);
        blk.to_canonical = AxisPermutation(std::move(order));
        const int ones = d - blk.num_zero;
        if (ones == 0) {
            blk.scale = 1.0 + d * sigma;
        } else {
            blk.dense_factor = xfactors[static_cast<size_t>(ones)];
            blk.dense_dim = 1;
            for (int j = 0; j < ones; ++j) blk.dense_dim *= n1_;
        }
        blocks_.push_back(std::move(blk));
    }
}

Index SubspaceSmoother::size() const {
    Index s = 1;
    for (int a = 0; a < d_; ++a) s *= n_;
    return s;
}

Vector SubspaceSmoother::apply_inverse(const Vector& residual) const {
    if (residual.size() != size()) throw std::invalid_argument("apply_inverse: size mismatch");
    Vector out = Vector::Zero(residual.size());

    for (const SubspaceBlock& blk : blocks_) {
        // restriction P_alpha^T r, axis by axis
        std::vector<Index> dims(static_cast<size_t>(d_), n_);
        Vector cur = residual;
        for (int a = 0; a < d_; ++a) {
            std::vector<Index> out_dims = dims;
            out_dims[static_cast<size_t>(a)] = blk.alpha[static_cast<size_t>(a)] == 0 ? n0_ : n1_;
            Vector next(product(out_dims));
            if (blk.alpha[static_cast<size_t>(a)] == 0)
                mode_apply(SparseApplyTransposedOp{P0_}, dims, a, cur.data(), next.data());
            else
                mode_apply(DenseApplyTransposedOp{P1_}, dims, a, cur.data(), next.data());
            cur.swap(next);
            dims = std::move(out_dims);
        }

        // renumber so the S1 axes are trailing (and contiguous)
        const bool permuted = !blk.to_canonical.is_identity();
        if (permuted) {
            cur = permute_axes(cur, dims, blk.to_canonical);
            dims = permute_dims(dims, blk.to_canonical);
        }

        // L_alpha^{-1}: banded mass solves on the S0 axes, one dense solve on
        // the flattened S1 axes
        for (int a = 0; a < blk.num_zero; ++a) {
            Vector next(cur.size());
            mode_apply(BandSolveOp{*m0_chol_}, dims, a, cur.data(), next.data());
            cur.swap(next);
        }
        if (blk.dense_factor) {
            Index lead = 1;
            for (int a = 0; a < blk.num_zero; ++a) lead *= dims[static_cast<size_t>(a)];
            const std::vector<Index> flat_dims = {lead, blk.dense_dim};
            Vector next(cur.size());
            mode_apply(LLTSolveOp{*blk.dense_factor}, flat_dims, 1, cur.data(), next.data());
            cur.swap(next);
        }
        if (blk.scale != 1.0) cur /= blk.scale;

        if (permuted) {
            const AxisPermutation back = blk.to_canonical.inverse();
            cur = permute_axes(cur, dims, back);
            dims = permute_dims(dims, back);
        }

        // prolongation P_alpha
        for (int a = 0; a < d_; ++a) {
            std::vector<Index> out_dims = dims;
            out_dims[static_cast<size_t>(a)] = n_;
            Vector next(product(out_dims));
            if (blk.alpha[static_cast<size_t>(a)] == 0)
                mode_apply(SparseApplyOp{P0_}, dims, a, cur.data(), next.data());
            else
                mode_apply(DenseApplyOp{P1_}, dims, a, cur.data(), next.data());
            cur.swap(next);
            dims = std::move(out_dims);
        }
        out += cur;
    }
    return out;
}

double estimate_smoother_spectrum(const SubspaceSmoother& sm, const TensorOperator& A, int iters,
                                  double* rel_change) {
    if (A.size() != sm.size()) throw std::invalid_argument("estimate_smoother_spectrum: size mismatch");
    std::mt19937 gen(20240901u);
    std::normal_distribution<double> dist;
    Vector v(A.size());
    for (Index i = 0; i < v.size(); ++i) v[i] = dist(gen);

    double lambda = 0.0, change = 1.0;
    for (int it = 0; it < iters; ++it) {
        const Vector z = A.apply(v);
        const Vector w = sm.apply_inverse(z);
        const double num = z.dot(w);
        const double den = z.dot(v);
        const double next = num / den;
        change = std::abs(next - lambda) / std::max(std::abs(next), 1e-300);
        lambda = next;
        const double wnorm = std::sqrt(w.dot(A.apply(w)));
        v = w / wnorm;
    }
    if (rel_change) *rel_change = change;
    return lambda;
}

}  // namespace igamg
