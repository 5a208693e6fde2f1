#ifndef MA2D_LAGRANGE_HPP
#define MA2D_LAGRANGE_HPP

#include <Eigen/Core>
#include <array>
#include <functional>
#include <vector>

#include "core/mesh.hpp"
#include "core/quadrature.hpp"
#include "core/types.hpp"

namespace ma2d {

using ScalarFunc = std::function<double(Vec2)>;
using VectorFunc = std::function<Vec2(Vec2)>;
using MatrixFunc = std::function<Sym2x2(Vec2)>;

/// Nodal basis of degree k on the reference triangle (principal lattice).
/// Local node order: 3 vertices, then k-1 nodes per local edge
/// (edge e runs from local vertex e to (e+1)%3), then interior nodes.
class ReferenceBasis {
public:
    explicit ReferenceBasis(int degree);

    int degree() const { return degree_; }
    int size() const { return static_cast<int>(nodes_.size()); }
    /// Lattice multi-index of local node i (sums to degree).
    const std::array<int, 3>& node(int i) const { return nodes_[static_cast<size_t>(i)]; }
    Bary node_bary(int i) const;

    /// Values and reference-coordinate derivatives of all basis functions
    /// at barycentric point b. grads/hessians may be null when not needed;
    /// grads are (d/dxi, d/deta), hessians (dxixi, dxieta, detaeta).
    void eval(const Bary& b, std::vector<double>* values, std::vector<Vec2>* grads,
              std::vector<Sym2x2>* hessians) const;

private:
    int degree_;
    std::vector<std::array<int, 3>> nodes_;
};

/// Basis data tabulated at the points of a quadrature rule.
struct TabulatedBasis {
    std::vector<std::vector<double>> values;    // [point][local node]
    std::vector<std::vector<Vec2>> ref_grads;
    std::vector<std::vector<Sym2x2>> ref_hessians;
};

TabulatedBasis tabulate(const ReferenceBasis& basis, const std::vector<Bary>& points,
                        bool with_gradients = true, bool with_hessians = false);

/// Affine map from the reference triangle onto a mesh triangle, with the
/// gradient and Hessian pushforwards.
struct ElementMap {
    Vec2 p0;
    double j00, j01, j10, j11;  // columns p1-p0, p2-p0
    double det;

    ElementMap(const Mesh& mesh, Index t);
    Vec2 to_physical(const Bary& b) const;
    Vec2 grad(const Vec2& ref_grad) const;
    Sym2x2 hess(const Sym2x2& ref_hess) const;
};

/// Degree-k scalar Lagrange space V_h on a mesh. DOF layout: vertex DOFs
/// first (by vertex id), then edge DOFs ordered by global edge index (and
/// within an edge from the lower to the higher vertex id), then per-cell
/// interior DOFs.
class LagrangeSpace {
public:
    LagrangeSpace(const Mesh& mesh, int degree);

    const Mesh& mesh() const { return *mesh_; }
    int degree() const { return degree_; }
    const ReferenceBasis& basis() const { return basis_; }
    Index n_dofs() const { return n_dofs_; }
    int dofs_per_cell() const { return basis_.size(); }

    Index cell_dof(Index t, int local) const {
        return cell_dofs_[static_cast<size_t>(t)][static_cast<size_t>(local)];
    }
    const std::vector<Index>& cell_dofs(Index t) const { return cell_dofs_[static_cast<size_t>(t)]; }
    Vec2 dof_coordinate(Index dof) const { return dof_coords_[static_cast<size_t>(dof)]; }

    const std::vector<Index>& boundary_dofs() const { return boundary_dofs_; }
    const std::vector<Index>& interior_dofs() const { return interior_dofs_; }
    bool is_boundary_dof(Index dof) const { return on_boundary_[static_cast<size_t>(dof)]; }

    /// DOFs of a boundary edge in mesh.boundary_edges order: the two
    /// endpoints followed by the edge-interior DOFs.
    std::vector<Index> boundary_edge_dofs(const BoundaryEdge& be) const;

private:
    const Mesh* mesh_;
    int degree_;
    ReferenceBasis basis_;
    Index n_dofs_;
    std::vector<std::vector<Index>> cell_dofs_;
    std::vector<Vec2> dof_coords_;
    std::vector<Index> boundary_dofs_;
    std::vector<Index> interior_dofs_;
    std::vector<char> on_boundary_;
};

/// Coefficient vector over V_h.
struct ScalarField {
    const LagrangeSpace* space = nullptr;
    Eigen::VectorXd coeffs;

    ScalarField() = default;
    explicit ScalarField(const LagrangeSpace& s)
        : space(&s), coeffs(Eigen::VectorXd::Zero(s.n_dofs())) {}
};

/// Symmetric-matrix field over Sigma_h: three coefficient vectors sharing
/// V_h's DOF map; the off-diagonal is stored once.
struct MatrixField {
    const LagrangeSpace* space = nullptr;
    Eigen::VectorXd c11, c12, c22;

    MatrixField() = default;
    explicit MatrixField(const LagrangeSpace& s)
        : space(&s),
          c11(Eigen::VectorXd::Zero(s.n_dofs())),
          c12(Eigen::VectorXd::Zero(s.n_dofs())),
          c22(Eigen::VectorXd::Zero(s.n_dofs())) {}
};

ScalarField interpolate(const ScalarFunc& f, const LagrangeSpace& space);
MatrixField interpolate_matrix(const MatrixFunc& S, const LagrangeSpace& space);

double evaluate(const ScalarField& field, Index triangle, const Bary& b);
Vec2 evaluate_gradient(const ScalarField& field, Index triangle, const Bary& b);
/// Per-element (broken) Hessian of the polynomial restriction.
Sym2x2 evaluate_hessian(const ScalarField& field, Index triangle, const Bary& b);
Sym2x2 evaluate(const MatrixField& field, Index triangle, const Bary& b);

}  // namespace ma2d

#endif
