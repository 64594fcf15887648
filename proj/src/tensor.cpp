#include "igamg/tensor.hpp"

namespace igamg {

std::vector<Index> permute_dims(std::span<const Index> dims, const AxisPermutation& perm) {
    std::vector<Index> out(dims.size());
    for (size_t a = 0; a < dims.size(); ++a) out[a] = dims[static_cast<size_t>(perm.order[a])];
    return out;
}

void permute_axes(std::span<const Index> dims, const AxisPermutation& perm, const double* x, double* y) {
    const int d = static_cast<int>(dims.size());
    if (static_cast<int>(perm.order.size()) != d) throw std::invalid_argument("permute_axes: rank mismatch");
    if (!perm.valid()) throw std::invalid_argument("permute_axes: invalid permutation");
    const Index n = product(dims);
    if (perm.is_identity()) {
        std::copy(x, x + n, y);
        return;
    }
    // strides of the input tensor
    std::vector<Index> stride_in(static_cast<size_t>(d));
    Index s = 1;
    for (int a = d - 1; a >= 0; --a) {
        stride_in[static_cast<size_t>(a)] = s;
        s *= dims[static_cast<size_t>(a)];
    }
    std::vector<Index> dims_out = permute_dims(dims, perm);
    // stride in the input for each output axis
    std::vector<Index> step(static_cast<size_t>(d));
    for (int a = 0; a < d; ++a) step[static_cast<size_t>(a)] = stride_in[static_cast<size_t>(perm.order[static_cast<size_t>(a)])];

    std::vector<Index> idx(static_cast<size_t>(d), 0);
    Index src = 0;
    for (Index of = 0; of < n; ++of) {
        y[of] = x[src];
        // mixed-radix increment over the output index
        for (int a = d - 1; a >= 0; --a) {
            idx[static_cast<size_t>(a)]++;
            src += step[static_cast<size_t>(a)];
            if (idx[static_cast<size_t>(a)] < dims_out[static_cast<size_t>(a)]) break;
            src -= step[static_cast<size_t>(a)] * dims_out[static_cast<size_t>(a)];
            idx[static_cast<size_t>(a)] = 0;
        }
    }
    flops::add(static_cast<std::uint64_t>(n));
}

Vector permute_axes(const Vector& x, std::span<const Index> dims, const AxisPermutation& perm) {
    if (x.size() != product(dims)) throw std::invalid_argument("permute_axes: size mismatch");
    Vector y(x.size());
    permute_axes(dims, perm, x.data(), y.data());
    return y;
}

Vector kron_apply(std::span<const BandedSymMatrix* const> factors, const Vector& x) {
    std::vector<Index> dims(factors.size());
    for (size_t a = 0; a < factors.size(); ++a) dims[a] = factors[a]->dim();
    if (x.size() != product(dims)) throw std::invalid_argument("kron_apply: size mismatch");
    Vector cur = x, next(x.size());
    for (int a = 0; a < static_cast<int>(factors.size()); ++a) {
        mode_apply(BandApplyOp{*factors[static_cast<size_t>(a)]}, dims, a, cur.data(), next.data());
        cur.swap(next);
    }
    return cur;
}

Vector kron_apply(std::span<const Matrix> factors, const Vector& x) {
    std::vector<Index> dims(factors.size());
    Index in_size = 1;
    for (size_t a = 0; a < factors.size(); ++a) {
        dims[a] = factors[a].cols();
        in_size *= factors[a].cols();
    }
    if (x.size() != in_size) throw std::invalid_argument("kron_apply: size mismatch");
    Vector cur = x;
    for (int a = 0; a < static_cast<int>(factors.size()); ++a) {
        const Matrix& A = factors[static_cast<size_t>(a)];
        std::vector<Index> out_dims = dims;
        out_dims[static_cast<size_t>(a)] = A.rows();
        Vector next(product(out_dims));
        mode_apply(DenseApplyOp{A}, dims, a, cur.data(), next.data());
        cur.swap(next);
        dims = std::move(out_dims);
    }
    return cur;
}

Vector kron_solve(std::span<const KroneckerFactor> factors, const Vector& b) {
    std::vector<Index> dims(factors.size());
    for (size_t a = 0; a < factors.size(); ++a) dims[a] = factors[a].dim();
    if (b.size() != product(dims)) throw std::invalid_argument("kron_solve: size mismatch");
    Vector cur = b, next(b.size());
    for (int a = 0; a < static_cast<int>(factors.size()); ++a) {
        const KroneckerFactor& f = factors[static_cast<size_t>(a)];
        if (f.is_banded())
            mode_apply(BandSolveOp{f.banded_chol()}, dims, a, cur.data(), next.data());
        else
            mode_apply(LLTSolveOp{f.dense_chol()}, dims, a, cur.data(), next.data());
        cur.swap(next);
    }
    return cur;
}

Matrix kron_dense(std::span<const Matrix> factors) {
    Matrix K = Matrix::Ones(1, 1);
    for (const Matrix& A : factors) {
        Matrix next(K.rows() * A.rows(), K.cols() * A.cols());
        for (Index i = 0; i < K.rows(); ++i)
            for (Index j = 0; j < K.cols(); ++j) next.block(i * A.rows(), j * A.cols(), A.rows(), A.cols()) = K(i, j) * A;
        K = std::move(next);
    }
    return K;
}

TensorOperator::TensorOperator(std::vector<Index> dims, std::vector<std::vector<BandedSymMatrix>> terms)
    : dims_(std::move(dims)), terms_(std::move(terms)) {
    size_ = product(dims_);
    for (const auto& t : terms_) {
        if (t.size() != dims_.size()) throw std::invalid_argument("TensorOperator: term rank mismatch");
        for (size_t a = 0; a < t.size(); ++a)
            if (t[a].dim() != dims_[a]) throw std::invalid_argument("TensorOperator: factor dimension mismatch");
    }
}

Vector TensorOperator::apply(const Vector& x) const {
    if (x.size() != size_) throw std::invalid_argument("TensorOperator::apply: size mismatch");
    Vector y = Vector::Zero(size_);
    Vector cur(size_), next(size_);
    for (const auto& t : terms_) {
        cur = x;
        for (int a = 0; a < static_cast<int>(t.size()); ++a) {
            mode_apply(BandApplyOp{t[static_cast<size_t>(a)]}, dims_, a, cur.data(), next.data());
            cur.swap(next);
        }
        y += cur;
    }
    return y;
}

Matrix TensorOperator::dense() const {
    Matrix A = Matrix::Zero(size_, size_);
    for (const auto& t : terms_) {
        std::vector<Matrix> dense_factors;
        dense_factors.reserve(t.size());
        for (const auto& f : t) dense_factors.push_back(f.dense());
        A += kron_dense(dense_factors);
    }
    return A;
}

}  // namespace igamg
