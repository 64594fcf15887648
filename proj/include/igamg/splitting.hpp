#pragma once

#include "igamg/banded.hpp"
#include "igamg/spline.hpp"

namespace igamg {

enum class Side { left, right };

// Matrix of scaled odd B-spline derivatives at one endpoint: rows i = 1..k
// hold h^(2i-1) * phi_j^(2i-1)(endpoint) over the p boundary B-splines,
// padded with p - k zero rows to a p x p matrix, k = floor(p/2).
// Requires p + 1 <= m.
Matrix boundary_derivative_matrix(const SplineSpace& space, Side side);

// Basis matrices of the splitting S = S0 (+) S1: S0 is the subspace of
// splines with vanishing odd derivatives of order < p at both endpoints,
// S1 its L2-orthogonal complement.
struct SplittingBasis {
    SplineSpace space;
    int k = 0;           // floor(p/2)
    SparseMatrix P0;     // n x (n - 2k), block diagonal
    SparseMatrix P_perp; // n x 2k, columns of [P0 | P_perp] orthonormal
    Matrix P1;           // n x 2k, = M^{-1} P_perp with unit column norms (dense)

    Index dim0() const { return P0.cols(); }
    Index dim1() const { return P_perp.cols(); }
};

// Builds the splitting from the kernels of the boundary derivative matrices
// (one SVD per side).  Throws if the numerical rank of either derivative
// matrix differs from k.  `mass` must be the mass matrix of `space`.
SplittingBasis compute_splitting(const SplineSpace& space, const BandedSymMatrix& mass);

// Gram matrices of mass and stiffness restricted to the two subspaces.
struct SubspaceGram {
    BandedSymMatrix M0, K0;  // bandwidth <= 2p
    Matrix M1, K1;           // 2k x 2k, dense symmetric
};

SubspaceGram subspace_gram(const SplittingBasis& basis, const BandedSymMatrix& M,
                           const BandedSymMatrix& K);

}  // namespace igamg
