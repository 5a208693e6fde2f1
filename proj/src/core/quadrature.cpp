#include "core/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "core/types.hpp"

namespace ma2d {

namespace {

void add_centroid(QuadratureRule& r, double w) {
    r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
    r.weights.push_back(w);
}

// Orbit (a, a, 1 - 2a): three permutations, same weight.
void add_orbit3(QuadratureRule& r, double a, double w) {
    const double c = 1.0 - 2.0 * a;
    r.points.push_back({c, a, a});
    r.points.push_back({a, c, a});
    r.points.push_back({a, a, c});
    r.weights.insert(r.weights.end(), 3, w);
}

// Orbit (a, b, 1 - a - b): six permutations, same weight.
void add_orbit6(QuadratureRule& r, double a, double b, double w) {
    const double c = 1.0 - a - b;
    r.points.push_back({a, b, c});
    r.points.push_back({a, c, b});
    r.points.push_back({b, a, c});
    r.points.push_back({b, c, a});
    r.points.push_back({c, a, b});
    r.points.push_back({c, b, a});
    r.weights.insert(r.weights.end(), 6, w);
}

void normalize_weights(QuadratureRule& r) {
    double s = 0.0;
    for (double w : r.weights) s += w;
    for (double& w : r.weights) w /= s;
}

QuadratureRule symmetric_rule(int degree) {
    QuadratureRule r;
    r.exactness_degree = degree;
    switch (degree) {
        case 1:
            add_centroid(r, 1.0);
            break;
        case 2:
            add_orbit3(r, 1.0 / 6.0, 1.0 / 3.0);
            break;
        case 4:
            add_orbit3(r, 0.445948490915965, 0.223381589678011);
            add_orbit3(r, 0.091576213509771, 0.109951743655322);
            break;
        case 5: {
            const double s15 = std::sqrt(15.0);
            add_centroid(r, 9.0 / 40.0);
            add_orbit3(r, (6.0 + s15) / 21.0, (155.0 + s15) / 1200.0);
            add_orbit3(r, (6.0 - s15) / 21.0, (155.0 - s15) / 1200.0);
            break;
        }
        case 6:
            add_orbit3(r, 0.249286745170910, 0.116786275726379);
            add_orbit3(r, 0.063089014491502, 0.050844906370207);
            add_orbit6(r, 0.310352451033785, 0.053145049844816, 0.082851075618374);
            break;
        default:
            throw InvalidArgument("no symmetric triangle rule tabulated for degree " +
                                  std::to_string(degree));
    }
    normalize_weights(r);
    return r;
}

// Conical-product rule: x = xi * (1 - y) with the Jacobian factor (1 - y)
// folded into the integrand, so plain Gauss-Legendre works in both
// directions. Exact for total degree d with m1 = ceil((d+1)/2) points in xi
// and m2 = ceil((d+2)/2) points in y.
QuadratureRule conical_rule(int degree) {
    const int m1 = (degree + 2) / 2;
    const int m2 = (degree + 3) / 2;
    std::vector<double> xp, xw, yp, yw;
    gauss_legendre_01(m1, xp, xw);
    gauss_legendre_01(m2, yp, yw);

    QuadratureRule r;
    r.exactness_degree = degree;
    for (int j = 0; j < m2; ++j) {
        for (int i = 0; i < m1; ++i) {
            const double y = yp[j];
            const double x = xp[i] * (1.0 - y);
            r.points.push_back({1.0 - x - y, x, y});
            // factor 2 restores sum-to-1 normalization: plain weights sum
            // to the reference-triangle area 1/2 after the (1 - y) fold.
            r.weights.push_back(2.0 * xw[i] * yw[j] * (1.0 - y));
        }
    }
    normalize_weights(r);
    return r;
}

}  // namespace

void gauss_legendre_01(int m, std::vector<double>& points, std::vector<double>& weights) {
    if (m < 1) throw InvalidArgument("gauss_legendre_01: need at least one point");
    points.resize(m);
    weights.resize(m);
    if (m == 1) {
        points[0] = 0.5;
        weights[0] = 1.0;
        return;
    }
    // Golub-Welsch: Jacobi matrix of the Legendre recurrence.
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m, m);
    for (int k = 1; k < m; ++k) {
        const double b = k / std::sqrt(4.0 * k * k - 1.0);
        J(k, k - 1) = b;
        J(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    for (int i = 0; i < m; ++i) {
        points[i] = 0.5 * (es.eigenvalues()(i) + 1.0);
        const double v0 = es.eigenvectors()(0, i);
        weights[i] = v0 * v0;  // total mass 2 on [-1,1] maps to 1 on [0,1]
    }
}

QuadratureRule triangle_quadrature(int min_exactness) {
    if (min_exactness > kMaxTriangleExactness)
        throw InvalidArgument("triangle_quadrature: requested exactness " +
                              std::to_string(min_exactness) + " above table limit " +
                              std::to_string(kMaxTriangleExactness));
    const int d = std::max(min_exactness, 1);
    // Degree 3 maps to the degree-4 table: the classical 4-point degree-3
    // rule has a negative weight.
    if (d <= 2) return symmetric_rule(d);
    if (d <= 4) return symmetric_rule(4);
    if (d <= 6) return symmetric_rule(d);
    return conical_rule(d);
}

EdgeQuadratureRule edge_quadrature(int min_exactness) {
    if (min_exactness > kMaxEdgeExactness)
        throw InvalidArgument("edge_quadrature: requested exactness " +
                              std::to_string(min_exactness) + " above table limit " +
                              std::to_string(kMaxEdgeExactness));
    const int d = std::max(min_exactness, 1);
    const int m = (d + 2) / 2;
    EdgeQuadratureRule r;
    r.exactness_degree = 2 * m - 1;
    gauss_legendre_01(m, r.points, r.weights);
    return r;
}

}  // namespace ma2d
