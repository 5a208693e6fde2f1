#ifndef MA2D_FORMS_HPP
#define MA2D_FORMS_HPP

#include <memory>

#include "core/lagrange.hpp"
#include "core/sparse.hpp"

namespace ma2d {

/// Assembled operators of the mixed formulation over one scalar space.
/// All matrices are n_dofs x n_dofs; the Sigma_h structure is carried by
/// the component blocks (the off-diagonal component weighs twice in inner
/// products).
///
///   M            (phi_j, phi_i)
///   B11,B12,B22  (div(phi_j e_c), D phi_i)
///   G11,G12,G22  <D phi_i, (phi_j e_c) n>  over the domain boundary
///   K            (D phi_j, D phi_i) = B11 + B22
struct MixedOperators {
    const LagrangeSpace* space = nullptr;
    QuadratureRule tri_rule;       // exactness 3k: all m11h integrands exact
    EdgeQuadratureRule edge_rule;  // exactness 2k
    SparseMatrix M;
    SparseMatrix B11, B12, B22;
    SparseMatrix G11, G12, G22;
    SparseMatrix K;
    std::shared_ptr<const SpdFactorization> mass;  // reused by every H(v) application

    /// (cof sigma : delta, v) blocks at a frozen matrix field; N11 acts on
    /// the delta11 component and so on.
    struct NewtonBlocks {
        SparseMatrix N11, N12, N22;
    };
};

MixedOperators assemble_mixed_operators(const LagrangeSpace& space);

/// d_i = integral det(eta) phi_i dx over all DOFs (degree-3k integrand,
/// exact with the operators' triangle rule).
Vector assemble_det_load(const MatrixField& eta, const MixedOperators& ops);

MixedOperators::NewtonBlocks assemble_newton_jacobian_blocks(const MatrixField& eta,
                                                             const MixedOperators& ops);

/// l_i = integral f phi_i dx with a rule of the given exactness.
Vector assemble_scalar_load(const ScalarFunc& f, const LagrangeSpace& space, int quad_exactness);

/// Symmetric Dirichlet elimination: interior-only system plus the
/// boundary-lift correction of the right-hand side.
struct DirichletSystem {
    SparseMatrix a_ii;
    Vector rhs;
    const LagrangeSpace* space = nullptr;

    /// Scatter an interior solution into a full vector carrying the
    /// boundary values g.
    Vector expand(const Vector& x_interior, const Vector& g_full) const;
};

/// boundary_values must be full-length (only boundary entries are read).
DirichletSystem apply_dirichlet(const SparseMatrix& a, const Vector& b,
                                const LagrangeSpace& space, const Vector& boundary_values);

/// Rows/columns of a restricted to the given index sets (keeps order).
SparseMatrix submatrix(const SparseMatrix& a, const std::vector<Index>& rows,
                       const std::vector<Index>& cols);

Vector restrict_to(const Vector& full, const std::vector<Index>& dofs);

}  // namespace ma2d

#endif
