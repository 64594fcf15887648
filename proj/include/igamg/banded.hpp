#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "igamg/flops.hpp"

namespace igamg {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

// Symmetric banded matrix, lower-triangle band storage.
// band(k)[i] holds A(i+k, i) for k = 0..bandwidth.
template <typename Scalar>
class BandedSymMatrixT {
public:
    BandedSymMatrixT() = default;
    BandedSymMatrixT(Index dim, Index bandwidth)
        : dim_(dim), bw_(bandwidth < dim ? bandwidth : (dim > 0 ? dim - 1 : 0)) {
        bands_.resize(bw_ + 1);
        for (Index k = 0; k <= bw_; ++k) bands_[k].assign(static_cast<size_t>(dim_ - k), Scalar(0));
    }

    Index dim() const { return dim_; }
    Index bandwidth() const { return bw_; }

    Scalar& at(Index i, Index j) {
        if (i < j) std::swap(i, j);
        return bands_[i - j][static_cast<size_t>(j)];
    }

    Scalar operator()(Index i, Index j) const {
        if (i < j) std::swap(i, j);
        const Index k = i - j;
        if (k > bw_) return Scalar(0);
        return bands_[k][static_cast<size_t>(j)];
    }

    void scale(Scalar s) {
        for (auto& band : bands_)
            for (auto& v : band) v *= s;
    }

    // this += s * other (dims must match; bandwidth grows as needed)
    void axpy(Scalar s, const BandedSymMatrixT& other) {
        if (other.dim_ != dim_) throw std::invalid_argument("banded axpy: dimension mismatch");
        if (other.bw_ > bw_) {
            bands_.resize(other.bw_ + 1);
            for (Index k = bw_ + 1; k <= other.bw_; ++k)
                bands_[k].assign(static_cast<size_t>(dim_ - k), Scalar(0));
            bw_ = other.bw_;
        }
        for (Index k = 0; k <= other.bw_; ++k)
            for (size_t i = 0; i < other.bands_[k].size(); ++i) bands_[k][i] += s * other.bands_[k][i];
    }

    // y = A x on contiguous buffers
    void apply(const Scalar* x, Scalar* y) const {
        const Index n = dim_;
        const Scalar* d0 = bands_[0].data();
        for (Index i = 0; i < n; ++i) y[i] = d0[i] * x[i];
        for (Index k = 1; k <= bw_; ++k) {
            const Scalar* dk = bands_[k].data();
            const Index len = n - k;
            for (Index i = 0; i < len; ++i) {
                y[i + k] += dk[i] * x[i];
                y[i] += dk[i] * x[i + k];
            }
        }
        flops::add(static_cast<std::uint64_t>(n * (4 * bw_ + 2)));
    }

    Vector apply(const Vector& x) const
        requires std::is_same_v<Scalar, double>
    {
        if (x.size() != dim_) throw std::invalid_argument("banded apply: dimension mismatch");
        Vector y(dim_);
        apply(x.data(), y.data());
        return y;
    }

    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> dense() const {
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> A =
            Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(dim_, dim_);
        for (Index k = 0; k <= bw_; ++k)
            for (Index j = 0; j + k < dim_; ++j) {
                A(j + k, j) = bands_[k][static_cast<size_t>(j)];
                A(j, j + k) = bands_[k][static_cast<size_t>(j)];
            }
        return A;
    }

    SparseMatrix sparse() const
        requires std::is_same_v<Scalar, double>
    {
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(static_cast<size_t>(dim_ * (2 * bw_ + 1)));
        for (Index k = 0; k <= bw_; ++k)
            for (Index j = 0; j + k < dim_; ++j) {
                const double v = bands_[k][static_cast<size_t>(j)];
                if (v == 0.0) continue;
                trips.emplace_back(j + k, j, v);
                if (k > 0) trips.emplace_back(j, j + k, v);
            }
        SparseMatrix S(dim_, dim_);
        S.setFromTriplets(trips.begin(), trips.end());
        return S;
    }

    template <typename T>
    BandedSymMatrixT<T> cast() const {
        BandedSymMatrixT<T> out(dim_, bw_);
        for (Index k = 0; k <= bw_; ++k)
            for (Index j = 0; j + k < dim_; ++j) out.at(j + k, j) = static_cast<T>(bands_[k][static_cast<size_t>(j)]);
        return out;
    }

    const std::vector<Scalar>& band(Index k) const { return bands_[k]; }

private:
    Index dim_ = 0;
    Index bw_ = 0;
    std::vector<std::vector<Scalar>> bands_;
};

using BandedSymMatrix = BandedSymMatrixT<double>;

// Cholesky factorization L L^T of an SPD banded matrix; L stored in band form.
template <typename Scalar>
class BandedCholeskyT {
public:
    BandedCholeskyT() = default;

    explicit BandedCholeskyT(const BandedSymMatrixT<Scalar>& A) : L_(A) {
        const Index n = A.dim();
        const Index bw = A.bandwidth();
        for (Index j = 0; j < n; ++j) {
            Scalar s = L_.at(j, j);
            const Index k0 = j > bw ? j - bw : Index(0);
            for (Index k = k0; k < j; ++k) s -= L_.at(j, k) * L_.at(j, k);
            if (!(s > Scalar(0)))
                throw std::runtime_error("banded Cholesky: matrix not positive definite at row " +
                                         std::to_string(j));
            const Scalar ljj = std::sqrt(s);
            L_.at(j, j) = ljj;
            const Index imax = std::min(n - 1, j + bw);
            for (Index i = j + 1; i <= imax; ++i) {
                Scalar v = L_.at(i, j);
                const Index kk0 = i > bw ? i - bw : Index(0);
                for (Index k = kk0; k < j; ++k) v -= L_.at(i, k) * L_.at(j, k);
                L_.at(i, j) = v / ljj;
            }
        }
        flops::add(static_cast<std::uint64_t>(n * (bw + 1) * (bw + 3)));
    }

    Index dim() const { return L_.dim(); }
    Index bandwidth() const { return L_.bandwidth(); }

    // Solves A x = b in place (forward + backward substitution).
    void solve_inplace(Scalar* x) const {
        const Index n = L_.dim();
        const Index bw = L_.bandwidth();
        const Scalar* diag = L_.band(0).data();
        for (Index i = 0; i < n; ++i) {
            Scalar s = x[i];
            const Index kmax = std::min(bw, i);
            for (Index k = 1; k <= kmax; ++k) s -= L_.band(k)[static_cast<size_t>(i - k)] * x[i - k];
            x[i] = s / diag[i];
        }
        for (Index i = n; i-- > 0;) {
            Scalar s = x[i];
            const Index kmax = std::min(bw, n - 1 - i);
            for (Index k = 1; k <= kmax; ++k) s -= L_.band(k)[static_cast<size_t>(i)] * x[i + k];
            x[i] = s / diag[i];
        }
        flops::add(static_cast<std::uint64_t>(n * (4 * bw + 4)));
    }

    Vector solve(Vector b) const
        requires std::is_same_v<Scalar, double>
    {
        if (b.size() != dim()) throw std::invalid_argument("banded solve: dimension mismatch");
        solve_inplace(b.data());
        return b;
    }

private:
    BandedSymMatrixT<Scalar> L_;
};

using BandedCholesky = BandedCholeskyT<double>;

}  // namespace igamg
