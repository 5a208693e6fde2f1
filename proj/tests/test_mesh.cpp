#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "core/mesh.hpp"

using namespace ma2d;

TEST_CASE("smallest structured mesh") {
    const Mesh m = build_structured_mesh(1);
    CHECK(m.n_vertices() == 4);
    CHECK(m.n_triangles() == 2);
    CHECK(m.boundary_edges.size() == 4);
    CHECK(m.h == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    check_mesh(m);
}

TEST_CASE("n=2 counts") {
    const Mesh m = build_structured_mesh(2);
    CHECK(m.n_vertices() == 9);
    CHECK(m.n_triangles() == 8);
    CHECK(m.boundary_edges.size() == 8);
    check_mesh(m);
}

TEST_CASE("n=4 covers the unit square") {
    const Mesh m = build_structured_mesh(4);
    CHECK(std::abs(m.total_area() - 1.0) <= 1e-12);
    check_mesh(m);
}

TEST_CASE("invalid input is rejected") {
    CHECK_THROWS_AS(build_structured_mesh(0), InvalidArgument);
    Polygon dart;
    dart.corners = {{0.0, 0.0}, {1.0, 0.0}, {0.25, 0.25}, {0.0, 1.0}};
    CHECK(!dart.is_convex());
    CHECK_THROWS_AS(build_structured_mesh(2, dart), InvalidArgument);
}

TEST_CASE("refinement splits into four congruent children") {
    const Mesh m = build_structured_mesh(1);
    const Mesh r = refine(m);
    CHECK(r.n_triangles() == 8);
    CHECK(r.h == doctest::Approx(m.h / 2.0).epsilon(1e-15));
    CHECK(std::abs(r.shape_regularity - m.shape_regularity) <= 1e-14);
    CHECK(std::abs(r.total_area() - 1.0) <= 1e-12);
    check_mesh(r);

    const Mesh rr = refine(r);
    CHECK(rr.n_triangles() == 32);
    CHECK(rr.h == doctest::Approx(m.h / 4.0).epsilon(1e-15));
    check_mesh(rr);
}

TEST_CASE("structured family is quasi-uniform") {
    Mesh m = build_structured_mesh(2);
    for (int level = 0; level < 3; ++level) {
        double dmin = 1e300, dmax = 0.0;
        for (const auto& t : m.triangles) {
            const Vec2 p0 = m.vertex_point(t.vertices[0]);
            const Vec2 p1 = m.vertex_point(t.vertices[1]);
            const Vec2 p2 = m.vertex_point(t.vertices[2]);
            const double d = std::max({(p1 - p0).norm(), (p2 - p1).norm(), (p0 - p2).norm()});
            dmin = std::min(dmin, d);
            dmax = std::max(dmax, d);
        }
        CHECK(dmax / dmin <= 4.0);
        m = refine(m);
    }
}

TEST_CASE("boundary normals are unit and outward") {
    const Mesh m = build_structured_mesh(3);
    for (const auto& be : m.boundary_edges) {
        CHECK(std::abs(be.normal.norm() - 1.0) <= 1e-14);
        const Vec2 mid = 0.5 * (m.vertex_point(be.endpoints[0]) + m.vertex_point(be.endpoints[1]));
        // on the unit square the outward normal is one of the four axis directions
        const bool axis = (std::abs(std::abs(be.normal.x) - 1.0) <= 1e-14 &&
                           std::abs(be.normal.y) <= 1e-14) ||
                          (std::abs(std::abs(be.normal.y) - 1.0) <= 1e-14 &&
                           std::abs(be.normal.x) <= 1e-14);
        CHECK(axis);
        const double s = be.normal.x * (mid.x - 0.5) + be.normal.y * (mid.y - 0.5);
        CHECK(s > 0.0);
    }
}

TEST_CASE("triangle areas match the cross product") {
    const Mesh m = build_structured_mesh(5);
    for (const auto& t : m.triangles) {
        const Vec2 p0 = m.vertex_point(t.vertices[0]);
        const Vec2 p1 = m.vertex_point(t.vertices[1]);
        const Vec2 p2 = m.vertex_point(t.vertices[2]);
        const double cross = 0.5 * (p1 - p0).cross(p2 - p0);
        CHECK(std::abs(t.area - cross) <= 1e-14 * cross);
        CHECK(t.area > 0.0);
    }
}
