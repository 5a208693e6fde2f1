#ifndef MA2D_QUADRATURE_HPP
#define MA2D_QUADRATURE_HPP

#include <array>
#include <vector>

namespace ma2d {

/// Barycentric coordinates (l0, l1, l2) with l0 + l1 + l2 = 1.
using Bary = std::array<double, 3>;

/// Quadrature rule on the reference triangle. Weights sum to 1, so
///   integral over K  ~=  |K| * sum_q w_q f(p_q).
struct QuadratureRule {
    std::vector<Bary> points;
    std::vector<double> weights;
    int exactness_degree = 0;
};

/// Gauss rule on the reference edge [0, 1]. Weights sum to 1.
struct EdgeQuadratureRule {
    std::vector<double> points;
    std::vector<double> weights;
    int exactness_degree = 0;
};

inline constexpr int kMaxTriangleExactness = 30;
inline constexpr int kMaxEdgeExactness = 60;

/// Smallest available rule with exactness_degree >= min_exactness.
/// Degrees up to 6 use tabulated symmetric (Dunavant-type) rules; higher
/// degrees use a conical-product Gauss rule. All weights are positive and
/// all points lie inside the triangle.
QuadratureRule triangle_quadrature(int min_exactness);

EdgeQuadratureRule edge_quadrature(int min_exactness);

/// Gauss-Legendre nodes/weights on [0, 1], exact for degree 2m - 1.
void gauss_legendre_01(int m, std::vector<double>& points, std::vector<double>& weights);

}  // namespace ma2d

#endif
