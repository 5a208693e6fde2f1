#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "core/quadrature.hpp"
#include "core/types.hpp"

using namespace ma2d;

namespace {

// integral of x^a y^b over the reference triangle = a! b! / (a + b + 2)!
double monomial_integral(int a, int b) {
    double v = 1.0;
    for (int r = 1; r <= a; ++r) v *= r;
    for (int r = 1; r <= b; ++r) v *= r;
    for (int r = 1; r <= a + b + 2; ++r) v /= r;
    return v;
}

double integrate_monomial(const QuadratureRule& rule, int a, int b) {
    double sum = 0.0;
    for (size_t q = 0; q < rule.points.size(); ++q) {
        const double x = rule.points[q][1];
        const double y = rule.points[q][2];
        sum += rule.weights[q] * std::pow(x, a) * std::pow(y, b);
    }
    return 0.5 * sum;  // weights are normalized to sum 1 on area 1/2
}

}  // namespace

TEST_CASE("weights sum to one and are positive, points inside") {
    for (int d = 1; d <= kMaxTriangleExactness; ++d) {
        const auto rule = triangle_quadrature(d);
        CHECK(rule.exactness_degree >= d);
        double sum = 0.0;
        for (size_t q = 0; q < rule.weights.size(); ++q) {
            CHECK(rule.weights[q] > 0.0);
            sum += rule.weights[q];
            for (int c = 0; c < 3; ++c) {
                CHECK(rule.points[q][static_cast<size_t>(c)] >= 0.0);
                CHECK(rule.points[q][static_cast<size_t>(c)] <= 1.0);
            }
            CHECK(std::abs(rule.points[q][0] + rule.points[q][1] + rule.points[q][2] - 1.0) <=
                  1e-14);
        }
        CHECK(std::abs(sum - 1.0) <= 1e-14);
    }
}

TEST_CASE("monomial exactness up to the advertised degree") {
    for (int d : {1, 2, 3, 4, 5, 6, 7, 8, 10, 12, 14, 20, 30}) {
        const auto rule = triangle_quadrature(d);
        for (int a = 0; a <= rule.exactness_degree; ++a)
            for (int b = 0; a + b <= rule.exactness_degree; ++b) {
                const double exact = monomial_integral(a, b);
                const double got = integrate_monomial(rule, a, b);
                CHECK(std::abs(got - exact) <= 1e-12 * exact);
            }
    }
}

TEST_CASE("centroid rule integrates x exactly") {
    const auto rule = triangle_quadrature(1);
    CHECK(rule.points.size() == 1);
    CHECK(integrate_monomial(rule, 1, 0) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
}

TEST_CASE("x^2 y^2 with the degree-6 rule") {
    const auto rule = triangle_quadrature(6);
    CHECK(std::abs(integrate_monomial(rule, 2, 2) - 1.0 / 180.0) <= 1e-15);
}

TEST_CASE("request above the table is rejected") {
    CHECK_THROWS_AS(triangle_quadrature(kMaxTriangleExactness + 1), InvalidArgument);
    CHECK_THROWS_AS(edge_quadrature(kMaxEdgeExactness + 1), InvalidArgument);
}

TEST_CASE("edge rules integrate t^d on [0,1]") {
    for (int d = 1; d <= 20; ++d) {
        const auto rule = edge_quadrature(d);
        CHECK(rule.exactness_degree >= d);
        double sum = 0.0;
        for (double w : rule.weights) sum += w;
        CHECK(std::abs(sum - 1.0) <= 1e-14);
        for (int p = 0; p <= rule.exactness_degree; ++p) {
            double got = 0.0;
            for (size_t q = 0; q < rule.points.size(); ++q)
                got += rule.weights[q] * std::pow(rule.points[q], p);
            CHECK(std::abs(got - 1.0 / (p + 1)) <= 1e-13);
        }
    }
}
