#include "core/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace ma2d {

Polygon Polygon::unit_square() { return rectangle(0.0, 0.0, 1.0, 1.0); }

Polygon Polygon::rectangle(double x0, double y0, double x1, double y1) {
    Polygon p;
    p.corners = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
    return p;
}

bool Polygon::is_convex() const {
    const size_t n = corners.size();
    if (n < 3) return false;
    for (size_t i = 0; i < n; ++i) {
        const Vec2 a = corners[i];
        const Vec2 b = corners[(i + 1) % n];
        const Vec2 c = corners[(i + 2) % n];
        if ((b - a).cross(c - b) <= 0.0) return false;
    }
    return true;
}

double Polygon::area() const {
    double twice = 0.0;
    const size_t n = corners.size();
    for (size_t i = 0; i < n; ++i) twice += corners[i].cross(corners[(i + 1) % n]);
    return 0.5 * twice;
}

Vec2 Mesh::map_point(Index t, const std::array<double, 3>& bary) const {
    const auto& tri = triangles[static_cast<size_t>(t)];
    const Vec2 p0 = vertex_point(tri.vertices[0]);
    const Vec2 p1 = vertex_point(tri.vertices[1]);
    const Vec2 p2 = vertex_point(tri.vertices[2]);
    return bary[0] * p0 + bary[1] * p1 + bary[2] * p2;
}

double Mesh::total_area() const {
    double a = 0.0;
    for (const auto& t : triangles) a += t.area;
    return a;
}

namespace {

double signed_area(const Mesh& m, const Triangle& t) {
    const Vec2 p0 = m.vertex_point(t.vertices[0]);
    const Vec2 p1 = m.vertex_point(t.vertices[1]);
    const Vec2 p2 = m.vertex_point(t.vertices[2]);
    return 0.5 * (p1 - p0).cross(p2 - p0);
}

double diameter(const Mesh& m, const Triangle& t) {
    const Vec2 p0 = m.vertex_point(t.vertices[0]);
    const Vec2 p1 = m.vertex_point(t.vertices[1]);
    const Vec2 p2 = m.vertex_point(t.vertices[2]);
    return std::max({(p1 - p0).norm(), (p2 - p1).norm(), (p0 - p2).norm()});
}

double inradius(const Mesh& m, const Triangle& t) {
    const Vec2 p0 = m.vertex_point(t.vertices[0]);
    const Vec2 p1 = m.vertex_point(t.vertices[1]);
    const Vec2 p2 = m.vertex_point(t.vertices[2]);
    const double a = (p1 - p0).norm();
    const double b = (p2 - p1).norm();
    const double c = (p0 - p2).norm();
    return 2.0 * t.area / (a + b + c);
}

// Fills areas, edges, triangle_edges, boundary_edges, h, shape_regularity.
void finalize(Mesh& mesh) {
    for (auto& t : mesh.triangles) {
        t.area = signed_area(mesh, t);
        if (t.area <= 0.0)
            throw Error("triangle " + std::to_string(t.id) + " is not counterclockwise");
    }

    // Global edges keyed by sorted endpoint pair; ids in key order.
    std::map<std::pair<Index, Index>, Index> edge_ids;
    for (const auto& t : mesh.triangles)
        for (int e = 0; e < 3; ++e) {
            const Index a = t.vertices[static_cast<size_t>(e)];
            const Index b = t.vertices[static_cast<size_t>((e + 1) % 3)];
            edge_ids.insert({{std::min(a, b), std::max(a, b)}, -1});
        }
    Index next = 0;
    mesh.edges.clear();
    for (auto& [key, id] : edge_ids) {
        id = next++;
        mesh.edges.push_back({id, key.first, key.second});
    }

    mesh.triangle_edges.assign(mesh.triangles.size(), {-1, -1, -1});
    std::vector<int> adjacency(edge_ids.size(), 0);
    std::vector<std::pair<Index, int>> owner(edge_ids.size(), {-1, -1});
    for (const auto& t : mesh.triangles)
        for (int e = 0; e < 3; ++e) {
            const Index a = t.vertices[static_cast<size_t>(e)];
            const Index b = t.vertices[static_cast<size_t>((e + 1) % 3)];
            const Index id = edge_ids.at({std::min(a, b), std::max(a, b)});
            mesh.triangle_edges[static_cast<size_t>(t.id)][static_cast<size_t>(e)] = id;
            adjacency[static_cast<size_t>(id)] += 1;
            owner[static_cast<size_t>(id)] = {t.id, e};
        }

    mesh.boundary_edges.clear();
    for (size_t id = 0; id < adjacency.size(); ++id) {
        if (adjacency[id] != 1) continue;
        const auto [tid, e] = owner[id];
        const auto& t = mesh.triangles[static_cast<size_t>(tid)];
        const Index a = t.vertices[static_cast<size_t>(e)];
        const Index b = t.vertices[static_cast<size_t>((e + 1) % 3)];
        const Vec2 pa = mesh.vertex_point(a);
        const Vec2 pb = mesh.vertex_point(b);
        const Vec2 d = pb - pa;
        const double len = d.norm();
        BoundaryEdge be;
        be.triangle = tid;
        be.local_edge = e;
        be.edge = static_cast<Index>(id);
        be.endpoints = {a, b};
        be.normal = {d.y / len, -d.x / len};  // outward for a CCW triangle
        be.length = len;
        mesh.boundary_edges.push_back(be);
    }

    mesh.h = 0.0;
    mesh.shape_regularity = 1.0;
    for (const auto& t : mesh.triangles) {
        const double d = diameter(mesh, t);
        mesh.h = std::max(mesh.h, d);
        mesh.shape_regularity = std::min(mesh.shape_regularity, inradius(mesh, t) / d);
    }
}

}  // namespace

Mesh build_structured_mesh(Index n, const Polygon& polygon) {
    if (n < 1) throw InvalidArgument("build_structured_mesh: n must be >= 1");
    if (!polygon.is_convex())
        throw InvalidArgument("build_structured_mesh: polygon is not convex");
    if (polygon.corners.size() != 4)
        throw InvalidArgument("build_structured_mesh: only axis-aligned rectangles supported");
    const Vec2 c0 = polygon.corners[0];
    const Vec2 c2 = polygon.corners[2];
    for (size_t i = 0; i < 4; ++i) {
        const Vec2 d = polygon.corners[(i + 1) % 4] - polygon.corners[i];
        if (d.x != 0.0 && d.y != 0.0)
            throw InvalidArgument("build_structured_mesh: only axis-aligned rectangles supported");
    }

    Mesh mesh;
    mesh.polygon = polygon;
    const Index nv = n + 1;
    mesh.vertices.reserve(static_cast<size_t>(nv * nv));
    for (Index j = 0; j <= n; ++j)
        for (Index i = 0; i <= n; ++i) {
            const double x = c0.x + (c2.x - c0.x) * static_cast<double>(i) / static_cast<double>(n);
            const double y = c0.y + (c2.y - c0.y) * static_cast<double>(j) / static_cast<double>(n);
            mesh.vertices.push_back({j * nv + i, x, y});
        }

    mesh.triangles.reserve(static_cast<size_t>(2 * n * n));
    Index tid = 0;
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i) {
            const Index v00 = j * nv + i;
            const Index v10 = v00 + 1;
            const Index v01 = v00 + nv;
            const Index v11 = v01 + 1;
            // same diagonal (v00 -> v11) in every cell
            mesh.triangles.push_back({tid++, {v00, v10, v11}, 0.0});
            mesh.triangles.push_back({tid++, {v00, v11, v01}, 0.0});
        }

    finalize(mesh);
    return mesh;
}

Mesh refine(const Mesh& mesh) {
    Mesh out;
    out.polygon = mesh.polygon;
    out.vertices = mesh.vertices;
    const Index nv = mesh.n_vertices();
    // midpoint vertex per parent edge, appended in edge-id order
    for (const auto& e : mesh.edges) {
        const Vec2 pa = mesh.vertex_point(e.v0);
        const Vec2 pb = mesh.vertex_point(e.v1);
        out.vertices.push_back({nv + e.id, 0.5 * (pa.x + pb.x), 0.5 * (pa.y + pb.y)});
    }

    out.triangles.reserve(mesh.triangles.size() * 4);
    Index tid = 0;
    for (const auto& t : mesh.triangles) {
        const Index v0 = t.vertices[0];
        const Index v1 = t.vertices[1];
        const Index v2 = t.vertices[2];
        const auto& te = mesh.triangle_edges[static_cast<size_t>(t.id)];
        const Index m01 = nv + te[0];
        const Index m12 = nv + te[1];
        const Index m20 = nv + te[2];
        out.triangles.push_back({tid++, {v0, m01, m20}, 0.0});
        out.triangles.push_back({tid++, {v1, m12, m01}, 0.0});
        out.triangles.push_back({tid++, {v2, m20, m12}, 0.0});
        out.triangles.push_back({tid++, {m01, m12, m20}, 0.0});
    }

    finalize(out);
    return out;
}

void check_mesh(const Mesh& mesh) {
    const Index nv = mesh.n_vertices();
    for (const auto& v : mesh.vertices)
        if (v.id != static_cast<Index>(&v - mesh.vertices.data()))
            throw Error("vertex ids are not contiguous");
    for (const auto& t : mesh.triangles) {
        for (Index v : t.vertices)
            if (v < 0 || v >= nv) throw Error("triangle references invalid vertex");
        const double sa = signed_area(mesh, t);
        if (sa <= 0.0) throw Error("triangle " + std::to_string(t.id) + " not counterclockwise");
        if (std::abs(sa - t.area) > 1e-14 * std::max(1.0, std::abs(sa)))
            throw Error("stored area disagrees with cross-product area");
    }
    // conformity: every edge belongs to one or two triangles
    std::map<std::pair<Index, Index>, int> count;
    for (const auto& t : mesh.triangles)
        for (int e = 0; e < 3; ++e) {
            const Index a = t.vertices[static_cast<size_t>(e)];
            const Index b = t.vertices[static_cast<size_t>((e + 1) % 3)];
            count[{std::min(a, b), std::max(a, b)}] += 1;
        }
    for (const auto& [key, c] : count)
        if (c > 2) throw Error("edge shared by more than two triangles");
    const double cover = mesh.total_area();
    const double want = mesh.polygon.area();
    if (std::abs(cover - want) > 1e-12 * want)
        throw Error("triangles do not cover the polygon area");
    for (const auto& be : mesh.boundary_edges) {
        if (std::abs(be.normal.norm() - 1.0) > 1e-14) throw Error("boundary normal not unit");
        const auto& t = mesh.triangles[static_cast<size_t>(be.triangle)];
        const Vec2 centroid = (1.0 / 3.0) * (mesh.vertex_point(t.vertices[0]) +
                                             mesh.vertex_point(t.vertices[1]) +
                                             mesh.vertex_point(t.vertices[2]));
        const Vec2 mid = 0.5 * (mesh.vertex_point(be.endpoints[0]) +
                                mesh.vertex_point(be.endpoints[1]));
        if (be.normal.dot(mid - centroid) <= 0.0) throw Error("boundary normal not outward");
    }
}

}  // namespace ma2d
