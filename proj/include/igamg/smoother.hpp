#pragma once

#include <cstdint>
#include <memory>

#include "igamg/splitting.hpp"
#include "igamg/tensor.hpp"

namespace igamg {

// One subspace S_alpha of the 2^d-fold tensor splitting together with the
// factorized local operator L_alpha.  Axes are permuted so that all S0
// factors come first; the trailing S1 axes merge into a single dense factor
//
//   X_j = (1 + (d-j) sigma) M1^(x j) + sum_s M1 x ... x K1(slot s) x ... x M1,
//
// which is the result of replacing every K0 by sigma M0 in A_alpha.
struct SubspaceBlock {
    std::vector<std::uint8_t> alpha;  // multiindex in {0,1}^d
    AxisPermutation to_canonical;     // zeros-first axis order
    int num_zero = 0;                 // k_alpha
    double scale = 1.0;               // all-zeros block: 1 + d sigma
    std::shared_ptr<const Eigen::LLT<Matrix>> dense_factor;  // X_{d - k_alpha}
    Index dense_dim = 1;
};

class SubspaceSmoother {
public:
    SubspaceSmoother(const SplittingBasis& basis, const SubspaceGram& gram, int d, double sigma);

    // Applies L^{-1} = sum_alpha P_alpha L_alpha^{-1} P_alpha^T to a residual.
    Vector apply_inverse(const Vector& residual) const;

    int dim_count() const { return d_; }
    double sigma() const { return sigma_; }
    int block_count() const { return static_cast<int>(blocks_.size()); }
    const std::vector<SubspaceBlock>& blocks() const { return blocks_; }
    Index size() const;

private:
    int d_ = 1;
    double sigma_ = 0.0;
    Index n_ = 0, n0_ = 0, n1_ = 0;
    SparseMatrix P0_;
    Matrix P1_;
    std::shared_ptr<const BandedCholesky> m0_chol_;
    std::vector<SubspaceBlock> blocks_;
};

// Largest eigenvalue of L^{-1} A estimated by power iteration in the A-inner
// product; rel_change (optional) receives the last relative update.
double estimate_smoother_spectrum(const SubspaceSmoother& sm, const TensorOperator& A, int iters,
                                  double* rel_change = nullptr);

}  // namespace igamg
