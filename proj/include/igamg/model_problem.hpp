#pragma once

#include "igamg/spline.hpp"
#include "igamg/tensor.hpp"

namespace igamg {

// Galerkin operator of a(u,v) = int grad u . grad v + u v on (0,1)^d with the
// same univariate space per axis: d stiffness-bearing Kronecker terms plus the
// pure mass term.
TensorOperator build_operator(const SplineSpace& space, int d);

// The d-dimensional mass operator M^d (a single Kronecker term).
TensorOperator build_mass_operator(const SplineSpace& space, int d);

// Univariate moments v_j = int_0^1 cos(pi x) phi_j(x) dx (Gauss, p+2 points
// per span).
Vector cosine_moments(const SplineSpace& space);

// Load vector for f(x) = d pi^2 prod_j sin(pi (x_j + 1/2)), assembled as the
// scaled d-fold outer product of the cosine moments.
Vector assemble_rhs(const SplineSpace& space, int d);

// L2 distance between the spline with coefficients u and the closed-form
// solution u*(x) = d pi^2 / (d pi^2 + 1) * prod_j cos(pi x_j), by tensor
// Gauss quadrature with p+2 points per span.
double exact_solution_error(const Vector& u, const SplineSpace& space, int d);

struct ModelProblem {
    int d = 1;
    SplineSpace space;
    TensorOperator A;
    TensorOperator Md;
    Vector rhs;
};

ModelProblem make_model_problem(const SplineSpace& space, int d);

}  // namespace igamg
