#pragma once

// Test-only reference implementations, kept independent of the library's
// Kronecker machinery.

#include <igamg/spline.hpp>
#include <igamg/tensor.hpp>
#include <random>

namespace oracles {

using igamg::Index;
using igamg::Matrix;
using igamg::Vector;

inline Vector random_vector(Index n, std::mt19937& gen) {
    std::normal_distribution<double> dist;
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = dist(gen);
    return v;
}

inline Matrix random_spd(Index n, std::mt19937& gen) {
    Matrix R(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) R(i, j) = random_vector(1, gen)[0];
    return R * R.transpose() + static_cast<double>(n) * Matrix::Identity(n, n);
}

// naive Kronecker product, independent of igamg::kron_dense
inline Matrix kron(const Matrix& A, const Matrix& B) {
    Matrix K(A.rows() * B.rows(), A.cols() * B.cols());
    for (Index i = 0; i < A.rows(); ++i)
        for (Index j = 0; j < A.cols(); ++j)
            for (Index k = 0; k < B.rows(); ++k)
                for (Index l = 0; l < B.cols(); ++l)
                    K(i * B.rows() + k, j * B.cols() + l) = A(i, j) * B(k, l);
    return K;
}

// brute-force assembly of the d=2 Galerkin matrix of grad-grad + mass by
// element loops over tensor Gauss points
inline Matrix assemble_2d_operator(const igamg::SplineSpace& s) {
    const int p = s.degree;
    const igamg::GaussRule g = igamg::gauss_legendre(p + 1);
    const Index n = s.dim();
    Matrix A = Matrix::Zero(n * n, n * n);
    for (Index ex = 0; ex < s.intervals; ++ex)
        for (Index ey = 0; ey < s.intervals; ++ey)
            for (Index qx = 0; qx < g.nodes.size(); ++qx)
                for (Index qy = 0; qy < g.nodes.size(); ++qy) {
                    const double x = ex * s.h + s.h * g.nodes[qx];
                    const double y = ey * s.h + s.h * g.nodes[qy];
                    const double w = s.h * g.weights[qx] * s.h * g.weights[qy];
                    const auto vx = igamg::eval_basis(s, x, 0), vy = igamg::eval_basis(s, y, 0);
                    const auto dx = igamg::eval_basis(s, x, 1), dy = igamg::eval_basis(s, y, 1);
                    for (Index i1 = 0; i1 <= p; ++i1)
                        for (Index j1 = 0; j1 <= p; ++j1)
                            for (Index i2 = 0; i2 <= p; ++i2)
                                for (Index j2 = 0; j2 <= p; ++j2) {
                                    const Index I = (vx.first + i1) * n + (vy.first + j1);
                                    const Index J = (vx.first + i2) * n + (vy.first + j2);
                                    const double grad =
                                        dx.values[i1] * vy.values[j1] * dx.values[i2] * vy.values[j2] +
                                        vx.values[i1] * dy.values[j1] * vx.values[i2] * dy.values[j2];
                                    const double mass =
                                        vx.values[i1] * vy.values[j1] * vx.values[i2] * vy.values[j2];
                                    A(I, J) += w * (grad + mass);
                                }
                }
    return A;
}

}  // namespace oracles
