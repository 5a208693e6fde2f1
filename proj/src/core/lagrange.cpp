#include "core/lagrange.hpp"

#include <algorithm>
#include <cmath>

namespace ma2d {

namespace {

// Value and first two derivatives of the univariate lattice factor
//   P(t) = prod_{r=0}^{m-1} (k t - r) / (m - r).
struct Factor {
    double p = 1.0, dp = 0.0, ddp = 0.0;
};

Factor lattice_factor(int k, int m, double t) {
    Factor f;
    for (int r = 0; r < m; ++r) {
        const double denom = static_cast<double>(m - r);
        const double l = (k * t - r) / denom;
        const double dl = static_cast<double>(k) / denom;
        f.ddp = f.ddp * l + 2.0 * f.dp * dl;
        f.dp = f.dp * l + f.p * dl;
        f.p = f.p * l;
    }
    return f;
}

}  // namespace

ReferenceBasis::ReferenceBasis(int degree) : degree_(degree) {
    if (degree < 1) throw InvalidArgument("ReferenceBasis: degree must be >= 1");
    const int k = degree;
    nodes_.push_back({k, 0, 0});
    nodes_.push_back({0, k, 0});
    nodes_.push_back({0, 0, k});
    // local edge e joins vertices e and (e+1)%3
    for (int e = 0; e < 3; ++e) {
        const int a = e;
        const int b = (e + 1) % 3;
        for (int s = 1; s < k; ++s) {
            std::array<int, 3> m{0, 0, 0};
            m[static_cast<size_t>(a)] = k - s;
            m[static_cast<size_t>(b)] = s;
            nodes_.push_back(m);
        }
    }
    for (int m1 = 1; m1 <= k - 2; ++m1)
        for (int m2 = 1; m2 <= k - 1 - m1; ++m2)
            nodes_.push_back({k - m1 - m2, m1, m2});
}

Bary ReferenceBasis::node_bary(int i) const {
    const auto& m = nodes_[static_cast<size_t>(i)];
    const double k = static_cast<double>(degree_);
    return {m[0] / k, m[1] / k, m[2] / k};
}

void ReferenceBasis::eval(const Bary& b, std::vector<double>* values, std::vector<Vec2>* grads,
                          std::vector<Sym2x2>* hessians) const {
    const int n = size();
    if (values) values->resize(static_cast<size_t>(n));
    if (grads) grads->resize(static_cast<size_t>(n));
    if (hessians) hessians->resize(static_cast<size_t>(n));

    // d lambda / d (xi, eta)
    static constexpr double gx[3] = {-1.0, 1.0, 0.0};
    static constexpr double gy[3] = {-1.0, 0.0, 1.0};

    for (int i = 0; i < n; ++i) {
        const auto& m = nodes_[static_cast<size_t>(i)];
        Factor f[3];
        for (int a = 0; a < 3; ++a)
            f[a] = lattice_factor(degree_, m[static_cast<size_t>(a)], b[static_cast<size_t>(a)]);

        const double value = f[0].p * f[1].p * f[2].p;
        if (values) (*values)[static_cast<size_t>(i)] = value;
        if (!grads && !hessians) continue;

        // dF/dlambda_a and d2F/dlambda_a dlambda_b
        double F1[3];
        for (int a = 0; a < 3; ++a)
            F1[a] = f[a].dp * f[(a + 1) % 3].p * f[(a + 2) % 3].p;

        if (grads) {
            double dxi = 0.0, deta = 0.0;
            for (int a = 0; a < 3; ++a) {
                dxi += F1[a] * gx[a];
                deta += F1[a] * gy[a];
            }
            (*grads)[static_cast<size_t>(i)] = {dxi, deta};
        }
        if (hessians) {
            double F2[3][3];
            for (int a = 0; a < 3; ++a)
                for (int c = 0; c < 3; ++c) {
                    if (a == c)
                        F2[a][c] = f[a].ddp * f[(a + 1) % 3].p * f[(a + 2) % 3].p;
                    else {
                        const int third = 3 - a - c;
                        F2[a][c] = f[a].dp * f[c].dp * f[third].p;
                    }
                }
            double hxx = 0.0, hxy = 0.0, hyy = 0.0;
            for (int a = 0; a < 3; ++a)
                for (int c = 0; c < 3; ++c) {
                    hxx += F2[a][c] * gx[a] * gx[c];
                    hxy += F2[a][c] * gx[a] * gy[c];
                    hyy += F2[a][c] * gy[a] * gy[c];
                }
            (*hessians)[static_cast<size_t>(i)] = {hxx, hxy, hyy};
        }
    }
}

TabulatedBasis tabulate(const ReferenceBasis& basis, const std::vector<Bary>& points,
                        bool with_gradients, bool with_hessians) {
    TabulatedBasis tab;
    tab.values.resize(points.size());
    if (with_gradients) tab.ref_grads.resize(points.size());
    if (with_hessians) tab.ref_hessians.resize(points.size());
    for (size_t q = 0; q < points.size(); ++q)
        basis.eval(points[q], &tab.values[q], with_gradients ? &tab.ref_grads[q] : nullptr,
                   with_hessians ? &tab.ref_hessians[q] : nullptr);
    return tab;
}

ElementMap::ElementMap(const Mesh& mesh, Index t) {
    const auto& tri = mesh.triangles[static_cast<size_t>(t)];
    p0 = mesh.vertex_point(tri.vertices[0]);
    const Vec2 p1 = mesh.vertex_point(tri.vertices[1]);
    const Vec2 p2 = mesh.vertex_point(tri.vertices[2]);
    j00 = p1.x - p0.x;
    j10 = p1.y - p0.y;
    j01 = p2.x - p0.x;
    j11 = p2.y - p0.y;
    det = j00 * j11 - j01 * j10;
}

Vec2 ElementMap::to_physical(const Bary& b) const {
    return {p0.x + j00 * b[1] + j01 * b[2], p0.y + j10 * b[1] + j11 * b[2]};
}

Vec2 ElementMap::grad(const Vec2& g) const {
    return {(j11 * g.x - j10 * g.y) / det, (-j01 * g.x + j00 * g.y) / det};
}

Sym2x2 ElementMap::hess(const Sym2x2& h) const {
    // J^{-T} H J^{-1} with J^{-1} = [[j11, -j01], [-j10, j00]] / det
    const double a00 = j11 / det, a01 = -j01 / det, a10 = -j10 / det, a11 = j00 / det;
    // rows of A^T H: t = A^T H
    const double t00 = a00 * h.a11 + a10 * h.a12;
    const double t01 = a00 * h.a12 + a10 * h.a22;
    const double t10 = a01 * h.a11 + a11 * h.a12;
    const double t11 = a01 * h.a12 + a11 * h.a22;
    return {t00 * a00 + t01 * a10, t00 * a01 + t01 * a11, t10 * a01 + t11 * a11};
}

LagrangeSpace::LagrangeSpace(const Mesh& mesh, int degree)
    : mesh_(&mesh), degree_(degree), basis_(degree) {
    if (degree < 2) throw InvalidArgument("LagrangeSpace: degree must be >= 2");
    const int k = degree;
    const Index nv = mesh.n_vertices();
    const Index ne = mesh.n_edges();
    const int per_edge = k - 1;
    const int per_cell_interior = (k - 1) * (k - 2) / 2;
    n_dofs_ = nv + ne * per_edge + mesh.n_triangles() * per_cell_interior;

    dof_coords_.assign(static_cast<size_t>(n_dofs_), Vec2{});
    for (const auto& v : mesh.vertices) dof_coords_[static_cast<size_t>(v.id)] = v.point();
    for (const auto& e : mesh.edges) {
        const Vec2 pa = mesh.vertex_point(e.v0);
        const Vec2 pb = mesh.vertex_point(e.v1);
        for (int s = 1; s < k; ++s) {
            const double t = static_cast<double>(s) / k;
            dof_coords_[static_cast<size_t>(nv + e.id * per_edge + (s - 1))] =
                pa + t * (pb - pa);
        }
    }

    cell_dofs_.resize(static_cast<size_t>(mesh.n_triangles()));
    const Index interior_base = nv + ne * per_edge;
    for (const auto& tri : mesh.triangles) {
        auto& dofs = cell_dofs_[static_cast<size_t>(tri.id)];
        dofs.resize(static_cast<size_t>(basis_.size()));
        for (int lv = 0; lv < 3; ++lv)
            dofs[static_cast<size_t>(lv)] = tri.vertices[static_cast<size_t>(lv)];
        for (int e = 0; e < 3; ++e) {
            const Index a = tri.vertices[static_cast<size_t>(e)];
            const Index b = tri.vertices[static_cast<size_t>((e + 1) % 3)];
            const Index ge = mesh.triangle_edges[static_cast<size_t>(tri.id)][static_cast<size_t>(e)];
            for (int s = 1; s < k; ++s) {
                // slot along the global edge, oriented min -> max vertex id
                const int slot = (a < b) ? (s - 1) : (k - 1 - s);
                dofs[static_cast<size_t>(3 + e * per_edge + (s - 1))] =
                    nv + ge * per_edge + slot;
            }
        }
        const int local = 3 + 3 * per_edge;
        const ElementMap map(mesh, tri.id);
        for (int i = local; i < basis_.size(); ++i) {
            const Index dof = interior_base + tri.id * per_cell_interior + (i - local);
            dofs[static_cast<size_t>(i)] = dof;
            dof_coords_[static_cast<size_t>(dof)] = map.to_physical(basis_.node_bary(i));
        }
    }

    on_boundary_.assign(static_cast<size_t>(n_dofs_), 0);
    for (const auto& be : mesh.boundary_edges) {
        on_boundary_[static_cast<size_t>(be.endpoints[0])] = 1;
        on_boundary_[static_cast<size_t>(be.endpoints[1])] = 1;
        for (int s = 0; s < per_edge; ++s)
            on_boundary_[static_cast<size_t>(nv + be.edge * per_edge + s)] = 1;
    }
    for (Index d = 0; d < n_dofs_; ++d)
        (on_boundary_[static_cast<size_t>(d)] ? boundary_dofs_ : interior_dofs_).push_back(d);
}

std::vector<Index> LagrangeSpace::boundary_edge_dofs(const BoundaryEdge& be) const {
    std::vector<Index> dofs = {be.endpoints[0], be.endpoints[1]};
    const Index nv = mesh_->n_vertices();
    const int per_edge = degree_ - 1;
    for (int s = 0; s < per_edge; ++s) dofs.push_back(nv + be.edge * per_edge + s);
    return dofs;
}

ScalarField interpolate(const ScalarFunc& f, const LagrangeSpace& space) {
    ScalarField out(space);
    for (Index d = 0; d < space.n_dofs(); ++d) {
        const double v = f(space.dof_coordinate(d));
        if (!std::isfinite(v))
            throw InvalidArgument("interpolate: function not evaluable at DOF " + std::to_string(d));
        out.coeffs[d] = v;
    }
    return out;
}

MatrixField interpolate_matrix(const MatrixFunc& S, const LagrangeSpace& space) {
    MatrixField out(space);
    for (Index d = 0; d < space.n_dofs(); ++d) {
        const Sym2x2 m = S(space.dof_coordinate(d));
        if (!std::isfinite(m.a11) || !std::isfinite(m.a12) || !std::isfinite(m.a22))
            throw InvalidArgument("interpolate_matrix: function not evaluable at DOF " +
                                  std::to_string(d));
        out.c11[d] = m.a11;
        out.c12[d] = m.a12;
        out.c22[d] = m.a22;
    }
    return out;
}

namespace {

void check_triangle(const LagrangeSpace& s, Index t) {
    if (t < 0 || t >= s.mesh().n_triangles())
        throw InvalidArgument("evaluate: triangle id out of range");
}

}  // namespace

double evaluate(const ScalarField& field, Index triangle, const Bary& b) {
    const auto& s = *field.space;
    check_triangle(s, triangle);
    std::vector<double> values;
    s.basis().eval(b, &values, nullptr, nullptr);
    double out = 0.0;
    for (int i = 0; i < s.dofs_per_cell(); ++i)
        out += field.coeffs[s.cell_dof(triangle, i)] * values[static_cast<size_t>(i)];
    return out;
}

Vec2 evaluate_gradient(const ScalarField& field, Index triangle, const Bary& b) {
    const auto& s = *field.space;
    check_triangle(s, triangle);
    std::vector<Vec2> grads;
    s.basis().eval(b, nullptr, &grads, nullptr);
    Vec2 ref{0.0, 0.0};
    for (int i = 0; i < s.dofs_per_cell(); ++i) {
        const double c = field.coeffs[s.cell_dof(triangle, i)];
        ref.x += c * grads[static_cast<size_t>(i)].x;
        ref.y += c * grads[static_cast<size_t>(i)].y;
    }
    return ElementMap(s.mesh(), triangle).grad(ref);
}

Sym2x2 evaluate_hessian(const ScalarField& field, Index triangle, const Bary& b) {
    const auto& s = *field.space;
    check_triangle(s, triangle);
    std::vector<Sym2x2> hess;
    s.basis().eval(b, nullptr, nullptr, &hess);
    Sym2x2 ref;
    for (int i = 0; i < s.dofs_per_cell(); ++i) {
        const double c = field.coeffs[s.cell_dof(triangle, i)];
        ref = ref + c * hess[static_cast<size_t>(i)];
    }
    return ElementMap(s.mesh(), triangle).hess(ref);
}

Sym2x2 evaluate(const MatrixField& field, Index triangle, const Bary& b) {
    const auto& s = *field.space;
    check_triangle(s, triangle);
    std::vector<double> values;
    s.basis().eval(b, &values, nullptr, nullptr);
    Sym2x2 out;
    for (int i = 0; i < s.dofs_per_cell(); ++i) {
        const Index d = s.cell_dof(triangle, i);
        const double v = values[static_cast<size_t>(i)];
        out.a11 += field.c11[d] * v;
        out.a12 += field.c12[d] * v;
        out.a22 += field.c22[d] * v;
    }
    return out;
}

}  // namespace ma2d
