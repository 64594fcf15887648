#pragma once

#include <vector>

#include "igamg/banded.hpp"

namespace igamg {

// Univariate spline space of degree p with maximum smoothness C^{p-1} on
// (0,1), subdivided into m equal knot spans, open uniform knot vector.
struct SplineSpace {
    int degree = 0;       // p >= 1
    Index intervals = 0;  // m >= 1
    double h = 0.0;       // 1/m
    std::vector<double> knots;  // size m + 2p + 1

    Index dim() const { return intervals + degree; }
};

SplineSpace make_space(int degree, Index intervals);

// Values (or derivatives) of the at most p+1 B-splines active at x.
// values[i] corresponds to basis function first + i.
struct BasisValues {
    Index first = 0;
    Vector values;
};

// Right-limit convention at interior knots, left limit at x = 1.
// deriv_order > p yields all zeros.
BasisValues eval_basis(const SplineSpace& space, double x, int deriv_order = 0);

// Evaluates the spline with the given coefficients at x.
double eval_spline(const SplineSpace& space, const Vector& coeffs, double x, int deriv_order = 0);

// Gauss-Legendre rule on [0,1].
struct GaussRule {
    Vector nodes;
    Vector weights;
};
GaussRule gauss_legendre(int npoints);

// Mass and stiffness matrices, bandwidth p, per-span Gauss quadrature with
// `points_per_span` nodes (default p+1, exact for the degree-2p integrands).
BandedSymMatrix assemble_mass(const SplineSpace& space, int points_per_span = 0);
BandedSymMatrix assemble_stiffness(const SplineSpace& space, int points_per_span = 0);

// Two-scale prolongation for dyadic refinement (fine.intervals == 2 * coarse.intervals),
// computed by repeated single knot insertion.  Columns have at most p+2 nonzeros.
SparseMatrix prolongation(const SplineSpace& coarse, const SplineSpace& fine);

}  // namespace igamg
