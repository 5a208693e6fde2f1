#include "core/forms.hpp"

#include <unordered_map>

namespace ma2d {

namespace {

struct EdgeBasisData {
    std::vector<std::vector<double>> values;  // [point][local node]
    std::vector<std::vector<Vec2>> ref_grads;
};

// Basis data along local edge e at the edge-rule points. Edge e runs from
// local vertex e to (e+1)%3.
EdgeBasisData tabulate_edge(const ReferenceBasis& basis, int local_edge,
                            const EdgeQuadratureRule& rule) {
    EdgeBasisData out;
    out.values.resize(rule.points.size());
    out.ref_grads.resize(rule.points.size());
    for (size_t q = 0; q < rule.points.size(); ++q) {
        Bary b{0.0, 0.0, 0.0};
        b[static_cast<size_t>(local_edge)] = 1.0 - rule.points[q];
        b[static_cast<size_t>((local_edge + 1) % 3)] = rule.points[q];
        basis.eval(b, &out.values[q], &out.ref_grads[q], nullptr);
    }
    return out;
}

}  // namespace

MixedOperators assemble_mixed_operators(const LagrangeSpace& space) {
    const int k = space.degree();
    MixedOperators ops;
    ops.space = &space;
    ops.tri_rule = triangle_quadrature(3 * k);
    ops.edge_rule = edge_quadrature(2 * k);

    const Mesh& mesh = space.mesh();
    const Index n = space.n_dofs();
    const int nloc = space.dofs_per_cell();
    ops.M = SparseMatrix(n, n);
    ops.B11 = SparseMatrix(n, n);
    ops.B12 = SparseMatrix(n, n);
    ops.B22 = SparseMatrix(n, n);
    ops.G11 = SparseMatrix(n, n);
    ops.G12 = SparseMatrix(n, n);
    ops.G22 = SparseMatrix(n, n);
    ops.K = SparseMatrix(n, n);

    const TabulatedBasis tab = tabulate(space.basis(), ops.tri_rule.points);
    std::vector<Vec2> phys_grads(static_cast<size_t>(nloc));

    for (Index t = 0; t < mesh.n_triangles(); ++t) {
        const ElementMap map(mesh, t);
        const double area = mesh.triangles[static_cast<size_t>(t)].area;
        const auto& dofs = space.cell_dofs(t);
        for (size_t q = 0; q < ops.tri_rule.points.size(); ++q) {
            const double w = area * ops.tri_rule.weights[q];
            for (int i = 0; i < nloc; ++i)
                phys_grads[static_cast<size_t>(i)] = map.grad(tab.ref_grads[q][static_cast<size_t>(i)]);
            for (int i = 0; i < nloc; ++i) {
                const Index gi = dofs[static_cast<size_t>(i)];
                const double vi = tab.values[q][static_cast<size_t>(i)];
                const Vec2 di = phys_grads[static_cast<size_t>(i)];
                for (int j = 0; j < nloc; ++j) {
                    const Index gj = dofs[static_cast<size_t>(j)];
                    const double vj = tab.values[q][static_cast<size_t>(j)];
                    const Vec2 dj = phys_grads[static_cast<size_t>(j)];
                    ops.M.add(gi, gj, w * vi * vj);
                    ops.B11.add(gj, gi, w * dj.x * di.x);
                    ops.B12.add(gj, gi, w * (dj.y * di.x + dj.x * di.y));
                    ops.B22.add(gj, gi, w * dj.y * di.y);
                    ops.K.add(gi, gj, w * di.dot(dj));
                }
            }
        }
    }

    for (const auto& be : mesh.boundary_edges) {
        const EdgeBasisData tabe = tabulate_edge(space.basis(), be.local_edge, ops.edge_rule);
        const ElementMap map(mesh, be.triangle);
        const auto& dofs = space.cell_dofs(be.triangle);
        const Vec2 nrm = be.normal;
        for (size_t q = 0; q < ops.edge_rule.points.size(); ++q) {
            const double w = be.length * ops.edge_rule.weights[q];
            for (int i = 0; i < nloc; ++i)
                phys_grads[static_cast<size_t>(i)] = map.grad(tabe.ref_grads[q][static_cast<size_t>(i)]);
            for (int j = 0; j < nloc; ++j) {
                const Index gj = dofs[static_cast<size_t>(j)];
                const double vj = tabe.values[q][static_cast<size_t>(j)];
                for (int i = 0; i < nloc; ++i) {
                    const Index gi = dofs[static_cast<size_t>(i)];
                    const Vec2 di = phys_grads[static_cast<size_t>(i)];
                    ops.G11.add(gj, gi, w * vj * nrm.x * di.x);
                    ops.G12.add(gj, gi, w * vj * (nrm.y * di.x + nrm.x * di.y));
                    ops.G22.add(gj, gi, w * vj * nrm.y * di.y);
                }
            }
        }
    }

    ops.M.finalize();
    ops.B11.finalize();
    ops.B12.finalize();
    ops.B22.finalize();
    ops.G11.finalize();
    ops.G12.finalize();
    ops.G22.finalize();
    ops.K.finalize();
    ops.mass = std::make_shared<SpdFactorization>(ops.M);
    return ops;
}

Vector assemble_det_load(const MatrixField& eta, const MixedOperators& ops) {
    const LagrangeSpace& space = *ops.space;
    if (eta.space != &space)
        throw InvalidArgument("assemble_det_load: field belongs to another space");
    const Mesh& mesh = space.mesh();
    const int nloc = space.dofs_per_cell();
    Vector out = Vector::Zero(space.n_dofs());
    const TabulatedBasis tab = tabulate(space.basis(), ops.tri_rule.points, false);
    for (Index t = 0; t < mesh.n_triangles(); ++t) {
        const double area = mesh.triangles[static_cast<size_t>(t)].area;
        const auto& dofs = space.cell_dofs(t);
        for (size_t q = 0; q < ops.tri_rule.points.size(); ++q) {
            Sym2x2 e;
            for (int i = 0; i < nloc; ++i) {
                const Index d = dofs[static_cast<size_t>(i)];
                const double v = tab.values[q][static_cast<size_t>(i)];
                e.a11 += eta.c11[d] * v;
                e.a12 += eta.c12[d] * v;
                e.a22 += eta.c22[d] * v;
            }
            const double w = area * ops.tri_rule.weights[q] * det2(e);
            for (int i = 0; i < nloc; ++i)
                out[dofs[static_cast<size_t>(i)]] += w * tab.values[q][static_cast<size_t>(i)];
        }
    }
    return out;
}

MixedOperators::NewtonBlocks assemble_newton_jacobian_blocks(const MatrixField& eta,
                                                             const MixedOperators& ops) {
    const LagrangeSpace& space = *ops.space;
    if (eta.space != &space)
        throw InvalidArgument("assemble_newton_jacobian_blocks: field belongs to another space");
    const Mesh& mesh = space.mesh();
    const Index n = space.n_dofs();
    const int nloc = space.dofs_per_cell();
    MixedOperators::NewtonBlocks blocks;
    blocks.N11 = SparseMatrix(n, n);
    blocks.N12 = SparseMatrix(n, n);
    blocks.N22 = SparseMatrix(n, n);
    const TabulatedBasis tab = tabulate(space.basis(), ops.tri_rule.points, false);
    for (Index t = 0; t < mesh.n_triangles(); ++t) {
        const double area = mesh.triangles[static_cast<size_t>(t)].area;
        const auto& dofs = space.cell_dofs(t);
        for (size_t q = 0; q < ops.tri_rule.points.size(); ++q) {
            Sym2x2 e;
            for (int i = 0; i < nloc; ++i) {
                const Index d = dofs[static_cast<size_t>(i)];
                const double v = tab.values[q][static_cast<size_t>(i)];
                e.a11 += eta.c11[d] * v;
                e.a12 += eta.c12[d] * v;
                e.a22 += eta.c22[d] * v;
            }
            const double w = area * ops.tri_rule.weights[q];
            // cof(eta) : (phi_j e_c) = eta22, -2 eta12, eta11 per component
            for (int i = 0; i < nloc; ++i) {
                const Index gi = dofs[static_cast<size_t>(i)];
                const double vi = tab.values[q][static_cast<size_t>(i)];
                for (int j = 0; j < nloc; ++j) {
                    const Index gj = dofs[static_cast<size_t>(j)];
                    const double vij = w * vi * tab.values[q][static_cast<size_t>(j)];
                    blocks.N11.add(gi, gj, vij * e.a22);
                    blocks.N12.add(gi, gj, -2.0 * vij * e.a12);
                    blocks.N22.add(gi, gj, vij * e.a11);
                }
            }
        }
    }
    blocks.N11.finalize();
    blocks.N12.finalize();
    blocks.N22.finalize();
    return blocks;
}

Vector assemble_scalar_load(const ScalarFunc& f, const LagrangeSpace& space, int quad_exactness) {
    const Mesh& mesh = space.mesh();
    const QuadratureRule rule = triangle_quadrature(quad_exactness);
    const TabulatedBasis tab = tabulate(space.basis(), rule.points, false);
    const int nloc = space.dofs_per_cell();
    Vector out = Vector::Zero(space.n_dofs());
    for (Index t = 0; t < mesh.n_triangles(); ++t) {
        const ElementMap map(mesh, t);
        const double area = mesh.triangles[static_cast<size_t>(t)].area;
        const auto& dofs = space.cell_dofs(t);
        for (size_t q = 0; q < rule.points.size(); ++q) {
            const double w = area * rule.weights[q] * f(map.to_physical(rule.points[q]));
            for (int i = 0; i < nloc; ++i)
                out[dofs[static_cast<size_t>(i)]] += w * tab.values[q][static_cast<size_t>(i)];
        }
    }
    return out;
}

Vector DirichletSystem::expand(const Vector& x_interior, const Vector& g_full) const {
    Vector full = Vector::Zero(space->n_dofs());
    for (Index b : space->boundary_dofs()) full[b] = g_full[b];
    const auto& interior = space->interior_dofs();
    for (size_t i = 0; i < interior.size(); ++i)
        full[interior[i]] = x_interior[static_cast<Eigen::Index>(i)];
    return full;
}

DirichletSystem apply_dirichlet(const SparseMatrix& a, const Vector& b,
                                const LagrangeSpace& space, const Vector& boundary_values) {
    if (a.rows() != space.n_dofs() || a.cols() != space.n_dofs() || b.size() != space.n_dofs())
        throw InvalidArgument("apply_dirichlet: system does not match the space");
    if (boundary_values.size() != space.n_dofs())
        throw InvalidArgument("apply_dirichlet: boundary values must be a full-length vector");

    const auto& interior = space.interior_dofs();
    Vector g = Vector::Zero(space.n_dofs());
    for (Index d : space.boundary_dofs()) g[d] = boundary_values[d];
    const Vector lift = a.apply(g);

    DirichletSystem sys;
    sys.space = &space;
    sys.a_ii = submatrix(a, interior, interior);
    sys.rhs = Vector(static_cast<Eigen::Index>(interior.size()));
    for (size_t i = 0; i < interior.size(); ++i)
        sys.rhs[static_cast<Eigen::Index>(i)] = b[interior[i]] - lift[interior[i]];
    return sys;
}

SparseMatrix submatrix(const SparseMatrix& a, const std::vector<Index>& rows,
                       const std::vector<Index>& cols) {
    std::unordered_map<Index, Index> row_pos, col_pos;
    row_pos.reserve(rows.size());
    col_pos.reserve(cols.size());
    for (size_t i = 0; i < rows.size(); ++i) row_pos[rows[i]] = static_cast<Index>(i);
    for (size_t j = 0; j < cols.size(); ++j) col_pos[cols[j]] = static_cast<Index>(j);

    SparseMatrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    const auto& m = a.eigen();
    for (int k = 0; k < m.outerSize(); ++k)
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(m, k); it; ++it) {
            const auto r = row_pos.find(it.row());
            if (r == row_pos.end()) continue;
            const auto c = col_pos.find(it.col());
            if (c == col_pos.end()) continue;
            out.add(r->second, c->second, it.value());
        }
    out.finalize();
    return out;
}

Vector restrict_to(const Vector& full, const std::vector<Index>& dofs) {
    Vector out(static_cast<Eigen::Index>(dofs.size()));
    for (size_t i = 0; i < dofs.size(); ++i) out[static_cast<Eigen::Index>(i)] = full[dofs[i]];
    return out;
}

}  // namespace ma2d
