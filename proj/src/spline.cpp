#include "igamg/spline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace igamg {

SplineSpace make_space(int degree, Index intervals) {
    if (degree < 1) throw std::invalid_argument("make_space: degree must be >= 1");
    if (intervals < 1) throw std::invalid_argument("make_space: intervals must be >= 1");
    SplineSpace s;
    s.degree = degree;
    s.intervals = intervals;
    s.h = 1.0 / static_cast<double>(intervals);
    s.knots.reserve(static_cast<size_t>(intervals + 2 * degree + 1));
    for (int i = 0; i <= degree; ++i) s.knots.push_back(0.0);
    for (Index j = 1; j < intervals; ++j) s.knots.push_back(static_cast<double>(j) * s.h);
    for (int i = 0; i <= degree; ++i) s.knots.push_back(1.0);
    return s;
}

namespace {

// Knot span index mu with knots[mu] <= x < knots[mu+1]; the last nonempty
// span is used at x = 1 (left limit).
Index find_span(const SplineSpace& s, double x) {
    const int p = s.degree;
    const Index last = p + s.intervals - 1;
    if (x >= 1.0) return last;
    auto it = std::upper_bound(s.knots.begin() + p, s.knots.begin() + (last + 1), x);
    return static_cast<Index>(it - s.knots.begin()) - 1;
}

// Basis functions and derivatives at x in span mu (The NURBS Book, A2.3).
// Returns rows 0..nd, row k holding the k-th derivatives of the p+1 active
// functions.
Matrix ders_basis_funs(const SplineSpace& s, Index mu, double x, int nd) {
    const int p = s.degree;
    const double* U = s.knots.data();
    Matrix ndu(p + 1, p + 1);
    std::vector<double> left(static_cast<size_t>(p + 1)), right(static_cast<size_t>(p + 1));
    ndu(0, 0) = 1.0;
    for (int j = 1; j <= p; ++j) {
        left[static_cast<size_t>(j)] = x - U[mu + 1 - j];
        right[static_cast<size_t>(j)] = U[mu + j] - x;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            ndu(j, r) = right[static_cast<size_t>(r + 1)] + left[static_cast<size_t>(j - r)];
            const double temp = ndu(r, j - 1) / ndu(j, r);
            ndu(r, j) = saved + right[static_cast<size_t>(r + 1)] * temp;
            saved = left[static_cast<size_t>(j - r)] * temp;
        }
        ndu(j, j) = saved;
    }
    Matrix ders = Matrix::Zero(nd + 1, p + 1);
    for (int j = 0; j <= p; ++j) ders(0, j) = ndu(j, p);
    Matrix a(2, p + 1);
    for (int r = 0; r <= p; ++r) {
        int s1 = 0, s2 = 1;
        a(0, 0) = 1.0;
        for (int k = 1; k <= nd; ++k) {
            double dd = 0.0;
            const int rk = r - k, pk = p - k;
            if (r >= k) {
                a(s2, 0) = a(s1, 0) / ndu(pk + 1, rk);
                dd = a(s2, 0) * ndu(rk, pk);
            }
            const int j1 = rk >= -1 ? 1 : -rk;
            const int j2 = r - 1 <= pk ? k - 1 : p - r;
            for (int j = j1; j <= j2; ++j) {
                a(s2, j) = (a(s1, j) - a(s1, j - 1)) / ndu(pk + 1, rk + j);
                dd += a(s2, j) * ndu(rk + j, pk);
            }
            if (r <= pk) {
                a(s2, k) = -a(s1, k - 1) / ndu(pk + 1, r);
                dd += a(s2, k) * ndu(r, pk);
            }
            ders(k, r) = dd;
            std::swap(s1, s2);
        }
    }
    double r = static_cast<double>(p);
    for (int k = 1; k <= nd; ++k) {
        for (int j = 0; j <= p; ++j) ders(k, j) *= r;
        r *= static_cast<double>(p - k);
    }
    return ders;
}

}  // namespace

BasisValues eval_basis(const SplineSpace& space, double x, int deriv_order) {
    if (x < 0.0 || x > 1.0) throw std::invalid_argument("eval_basis: x outside [0,1]");
    if (deriv_order < 0) throw std::invalid_argument("eval_basis: negative derivative order");
    const int p = space.degree;
    const Index mu = find_span(space, x);
    BasisValues out;
    out.first = mu - p;
    if (deriv_order > p) {
        out.values = Vector::Zero(p + 1);
        return out;
    }
    const Matrix ders = ders_basis_funs(space, mu, x, deriv_order);
    out.values = ders.row(deriv_order).transpose();
    return out;
}

double eval_spline(const SplineSpace& space, const Vector& coeffs, double x, int deriv_order) {
    if (coeffs.size() != space.dim()) throw std::invalid_argument("eval_spline: coefficient count mismatch");
    const BasisValues bv = eval_basis(space, x, deriv_order);
    double v = 0.0;
    for (Index i = 0; i < bv.values.size(); ++i) v += coeffs[bv.first + i] * bv.values[i];
    return v;
}

GaussRule gauss_legendre(int npoints) {
    if (npoints < 1) throw std::invalid_argument("gauss_legendre: need at least one point");
    GaussRule rule;
    rule.nodes.resize(npoints);
    rule.weights.resize(npoints);
    const int n = npoints;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Newton iteration on the Legendre polynomial P_n
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        // map from [-1,1] to [0,1]
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = 0.5 * (1.0 - x);
        rule.weights[i] = 0.5 * w;
        rule.nodes[n - 1 - i] = 0.5 * (1.0 + x);
        rule.weights[n - 1 - i] = 0.5 * w;
    }
    return rule;
}

namespace {

BandedSymMatrix assemble_gram(const SplineSpace& s, int deriv, int points_per_span) {
    const int p = s.degree;
    const int npts = points_per_span > 0 ? points_per_span : p + 1;
    const GaussRule rule = gauss_legendre(npts);
    BandedSymMatrix A(s.dim(), p);
    for (Index el = 0; el < s.intervals; ++el) {
        const double a = static_cast<double>(el) * s.h;
        for (int q = 0; q < npts; ++q) {
            const double x = a + s.h * rule.nodes[q];
            const double w = s.h * rule.weights[q];
            const BasisValues bv = eval_basis(s, x, deriv);
            for (Index i = 0; i <= p; ++i)
                for (Index j = 0; j <= i; ++j)
                    A.at(bv.first + i, bv.first + j) += w * bv.values[i] * bv.values[j];
        }
    }
    return A;
}

}  // namespace

BandedSymMatrix assemble_mass(const SplineSpace& space, int points_per_span) {
    return assemble_gram(space, 0, points_per_span);
}

BandedSymMatrix assemble_stiffness(const SplineSpace& space, int points_per_span) {
    return assemble_gram(space, 1, points_per_span);
}

SparseMatrix prolongation(const SplineSpace& coarse, const SplineSpace& fine) {
    if (coarse.degree != fine.degree) throw std::invalid_argument("prolongation: degree mismatch");
    if (fine.intervals != 2 * coarse.intervals)
        throw std::invalid_argument("prolongation: fine space must halve the coarse mesh");
    const int p = coarse.degree;
    const Index nc = coarse.dim();

    // Boehm single knot insertion, applied once per new midpoint knot.
    std::vector<double> knots = coarse.knots;
    Matrix C = Matrix::Identity(nc, nc);
    for (Index j = 0; j < coarse.intervals; ++j) {
        const double xbar = (2.0 * static_cast<double>(j) + 1.0) * fine.h;
        const Index mu = static_cast<Index>(std::upper_bound(knots.begin(), knots.end(), xbar) - knots.begin()) - 1;
        const Index dim = C.rows();
        Matrix next(dim + 1, nc);
        for (Index i = 0; i <= mu - p; ++i) next.row(i) = C.row(i);
        for (Index i = mu - p + 1; i <= mu; ++i) {
            const double ai = (xbar - knots[static_cast<size_t>(i)]) /
                              (knots[static_cast<size_t>(i + p)] - knots[static_cast<size_t>(i)]);
            next.row(i) = ai * C.row(i) + (1.0 - ai) * C.row(i - 1);
        }
        for (Index i = mu + 1; i < dim + 1; ++i) next.row(i) = C.row(i - 1);
        C = std::move(next);
        knots.insert(knots.begin() + (mu + 1), xbar);
    }

    SparseMatrix P(fine.dim(), nc);
    std::vector<Eigen::Triplet<double>> trips;
    for (Index i = 0; i < C.rows(); ++i)
        for (Index j = 0; j < nc; ++j)
            if (std::abs(C(i, j)) > 1e-14) trips.emplace_back(i, j, C(i, j));
    P.setFromTriplets(trips.begin(), trips.end());
    P.makeCompressed();
    return P;
}

}  // namespace igamg
