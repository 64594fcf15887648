#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <memory>
#include <numeric>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "igamg/banded.hpp"
#include "igamg/flops.hpp"

namespace igamg {

inline Index product(std::span<const Index> dims) {
    Index n = 1;
    for (Index d : dims) n *= d;
    return n;
}

// ---------------------------------------------------------------------------
// Mode products
//
// Coefficient tensors are stored with the LAST axis fastest-varying, so
// (A_1 x ... x A_d) acts with A_1 on the slowest axis.  mode_apply applies a
// single univariate operator along one axis; fibers are gathered to a
// contiguous scratch buffer, transformed, and scattered back.
// ---------------------------------------------------------------------------

// x and y must not alias; dims describes the input tensor.
template <class Op>
void mode_apply(const Op& op, std::span<const Index> dims, int axis, const double* x, double* y) {
    const int d = static_cast<int>(dims.size());
    const Index nin = op.in_dim();
    const Index nout = op.out_dim();
    if (dims[axis] != nin) throw std::invalid_argument("mode_apply: axis dimension mismatch");
    Index left = 1, right = 1;
    for (int a = 0; a < axis; ++a) left *= dims[a];
    for (int a = axis + 1; a < d; ++a) right *= dims[a];

    if (right == 1) {
        for (Index l = 0; l < left; ++l) op.run(x + l * nin, y + l * nout);
    } else {
        thread_local std::vector<double> fin, fout;
        fin.resize(static_cast<size_t>(nin));
        fout.resize(static_cast<size_t>(nout));
        for (Index l = 0; l < left; ++l) {
            const double* xl = x + l * nin * right;
            double* yl = y + l * nout * right;
            for (Index r = 0; r < right; ++r) {
                for (Index j = 0; j < nin; ++j) fin[static_cast<size_t>(j)] = xl[j * right + r];
                op.run(fin.data(), fout.data());
                for (Index j = 0; j < nout; ++j) yl[j * right + r] = fout[static_cast<size_t>(j)];
            }
        }
    }
}

struct BandApplyOp {
    const BandedSymMatrix& A;
    Index in_dim() const { return A.dim(); }
    Index out_dim() const { return A.dim(); }
    void run(const double* in, double* out) const { A.apply(in, out); }
};

struct BandSolveOp {
    const BandedCholesky& chol;
    Index in_dim() const { return chol.dim(); }
    Index out_dim() const { return chol.dim(); }
    void run(const double* in, double* out) const {
        std::copy(in, in + chol.dim(), out);
        chol.solve_inplace(out);
    }
};

struct DenseApplyOp {
    const Matrix& A;
    Index in_dim() const { return A.cols(); }
    Index out_dim() const { return A.rows(); }
    void run(const double* in, double* out) const {
        Eigen::Map<Vector>(out, A.rows()).noalias() = A * Eigen::Map<const Vector>(in, A.cols());
        flops::add(static_cast<std::uint64_t>(2 * A.rows() * A.cols()));
    }
};

struct DenseApplyTransposedOp {
    const Matrix& A;
    Index in_dim() const { return A.rows(); }
    Index out_dim() const { return A.cols(); }
    void run(const double* in, double* out) const {
        Eigen::Map<Vector>(out, A.cols()).noalias() = A.transpose() * Eigen::Map<const Vector>(in, A.rows());
        flops::add(static_cast<std::uint64_t>(2 * A.rows() * A.cols()));
    }
};

struct SparseApplyOp {
    const SparseMatrix& A;
    Index in_dim() const { return A.cols(); }
    Index out_dim() const { return A.rows(); }
    void run(const double* in, double* out) const {
        Eigen::Map<Vector>(out, A.rows()).noalias() = A * Eigen::Map<const Vector>(in, A.cols());
        flops::add(static_cast<std::uint64_t>(2 * A.nonZeros()));
    }
};

struct SparseApplyTransposedOp {
    const SparseMatrix& A;
    Index in_dim() const { return A.rows(); }
    Index out_dim() const { return A.cols(); }
    void run(const double* in, double* out) const {
        Eigen::Map<Vector>(out, A.cols()).noalias() = A.transpose() * Eigen::Map<const Vector>(in, A.rows());
        flops::add(static_cast<std::uint64_t>(2 * A.nonZeros()));
    }
};

struct LLTSolveOp {
    const Eigen::LLT<Matrix>& llt;
    Index in_dim() const { return llt.matrixLLT().rows(); }
    Index out_dim() const { return llt.matrixLLT().rows(); }
    void run(const double* in, double* out) const {
        const Index n = in_dim();
        Eigen::Map<Vector> o(out, n);
        o = Eigen::Map<const Vector>(in, n);
        llt.solveInPlace(o);
        flops::add(static_cast<std::uint64_t>(2 * n * n));
    }
};

// ---------------------------------------------------------------------------
// Axis permutations (the renumbering of degrees of freedom)
// ---------------------------------------------------------------------------

// Output axis a is input axis order[a]; dims_out[a] = dims_in[order[a]].
struct AxisPermutation {
    std::vector<int> order;

    explicit AxisPermutation(std::vector<int> o = {}) : order(std::move(o)) {}

    static AxisPermutation identity(int d) {
        std::vector<int> o(static_cast<size_t>(d));
        std::iota(o.begin(), o.end(), 0);
        return AxisPermutation(std::move(o));
    }

    bool is_identity() const {
        for (int a = 0; a < static_cast<int>(order.size()); ++a)
            if (order[static_cast<size_t>(a)] != a) return false;
        return true;
    }

    AxisPermutation inverse() const {
        std::vector<int> inv(order.size());
        for (int a = 0; a < static_cast<int>(order.size()); ++a) inv[static_cast<size_t>(order[static_cast<size_t>(a)])] = a;
        return AxisPermutation(std::move(inv));
    }

    bool valid() const {
        std::vector<bool> seen(order.size(), false);
        for (int v : order) {
            if (v < 0 || v >= static_cast<int>(order.size()) || seen[static_cast<size_t>(v)]) return false;
            seen[static_cast<size_t>(v)] = true;
        }
        return true;
    }
};

std::vector<Index> permute_dims(std::span<const Index> dims, const AxisPermutation& perm);
void permute_axes(std::span<const Index> dims, const AxisPermutation& perm, const double* x, double* y);
Vector permute_axes(const Vector& x, std::span<const Index> dims, const AxisPermutation& perm);

// ---------------------------------------------------------------------------
// Kronecker factors and solves
// ---------------------------------------------------------------------------

// One univariate SPD factor of a Kronecker product, factorized at construction.
class KroneckerFactor {
public:
    static KroneckerFactor banded(const BandedSymMatrix& A) {
        KroneckerFactor f;
        f.dim_ = A.dim();
        f.banded_ = std::make_shared<BandedCholesky>(A);
        return f;
    }

    static KroneckerFactor dense(const Matrix& A) {
        KroneckerFactor f;
        f.dim_ = A.rows();
        auto llt = std::make_shared<Eigen::LLT<Matrix>>(A);
        if (llt->info() != Eigen::Success) throw std::runtime_error("dense Cholesky failed: matrix not SPD");
        f.dense_ = std::move(llt);
        return f;
    }

    Index dim() const { return dim_; }
    bool is_banded() const { return banded_ != nullptr; }
    const BandedCholesky& banded_chol() const { return *banded_; }
    const Eigen::LLT<Matrix>& dense_chol() const { return *dense_; }

private:
    Index dim_ = 0;
    std::shared_ptr<const BandedCholesky> banded_;
    std::shared_ptr<const Eigen::LLT<Matrix>> dense_;
};

// Applies (A_1 x ... x A_d) to x, all factors banded.
Vector kron_apply(std::span<const BandedSymMatrix* const> factors, const Vector& x);

// Applies (A_1 x ... x A_d) to x, all factors dense.
Vector kron_apply(std::span<const Matrix> factors, const Vector& x);

// Solves (A_1 x ... x A_d) y = b componentwise using the factor Choleskys.
Vector kron_solve(std::span<const KroneckerFactor> factors, const Vector& b);

// Dense Kronecker product, for small oracles and the coarse-grid operator.
Matrix kron_dense(std::span<const Matrix> factors);

// ---------------------------------------------------------------------------
// Sums of Kronecker products of banded univariate matrices
// ---------------------------------------------------------------------------

class TensorOperator {
public:
    TensorOperator() = default;
    // terms[t][axis] is the axis-th univariate factor of term t
    TensorOperator(std::vector<Index> dims, std::vector<std::vector<BandedSymMatrix>> terms);

    const std::vector<Index>& dims() const { return dims_; }
    Index size() const { return size_; }
    int num_terms() const { return static_cast<int>(terms_.size()); }
    const std::vector<BandedSymMatrix>& term(int t) const { return terms_[static_cast<size_t>(t)]; }

    Vector apply(const Vector& x) const;
    Matrix dense() const;

private:
    std::vector<Index> dims_;
    Index size_ = 0;
    std::vector<std::vector<BandedSymMatrix>> terms_;
};

}  // namespace igamg
