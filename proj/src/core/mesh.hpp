#ifndef MA2D_MESH_HPP
#define MA2D_MESH_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "core/types.hpp"

namespace ma2d {

using Index = std::int64_t;

struct Vertex {
    Index id = -1;
    double x = 0.0;
    double y = 0.0;
    Vec2 point() const { return {x, y}; }
};

struct Triangle {
    Index id = -1;
    std::array<Index, 3> vertices{};  // counterclockwise
    double area = 0.0;
};

/// Undirected mesh edge keyed by (min vertex id, max vertex id).
struct Edge {
    Index id = -1;
    Index v0 = -1;  // v0 < v1
    Index v1 = -1;
};

struct BoundaryEdge {
    Index triangle = -1;
    int local_edge = -1;          // joins local vertices local_edge and (local_edge+1)%3
    Index edge = -1;              // global edge id
    std::array<Index, 2> endpoints{};
    Vec2 normal;                  // unit, outward
    double length = 0.0;
};

/// Convex polygon descriptor. Only axis-aligned rectangles are meshable by
/// build_structured_mesh; the default is the unit square.
struct Polygon {
    std::vector<Vec2> corners;  // counterclockwise

    static Polygon unit_square();
    static Polygon rectangle(double x0, double y0, double x1, double y1);
    bool is_convex() const;
    double area() const;
};

struct Mesh {
    std::vector<Vertex> vertices;
    std::vector<Triangle> triangles;
    std::vector<Edge> edges;
    /// Per-triangle global edge ids; entry e is the edge joining local
    /// vertices e and (e+1) % 3.
    std::vector<std::array<Index, 3>> triangle_edges;
    std::vector<BoundaryEdge> boundary_edges;
    Polygon polygon;
    double h = 0.0;                // max triangle diameter
    double shape_regularity = 0.0; // min over triangles of inradius / diameter

    Index n_vertices() const { return static_cast<Index>(vertices.size()); }
    Index n_triangles() const { return static_cast<Index>(triangles.size()); }
    Index n_edges() const { return static_cast<Index>(edges.size()); }

    Vec2 vertex_point(Index v) const { return vertices[static_cast<size_t>(v)].point(); }
    /// Physical point of barycentric coordinates within triangle t.
    Vec2 map_point(Index t, const std::array<double, 3>& bary) const;
    double total_area() const;
};

/// n-by-n grid of squares over the polygon (unit square by default), each
/// split along the same diagonal. h = sqrt(2)/n on the unit square.
Mesh build_structured_mesh(Index n, const Polygon& polygon = Polygon::unit_square());

/// Uniform refinement: every triangle split into 4 congruent children at
/// the edge midpoints. h halves exactly.
Mesh refine(const Mesh& mesh);

/// Conformity check (shared edges/vertices only, CCW orientation, area
/// cover). Throws Error with a description of the first violation.
void check_mesh(const Mesh& mesh);

}  // namespace ma2d

#endif
