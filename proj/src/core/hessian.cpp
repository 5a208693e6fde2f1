#include "core/hessian.hpp"

namespace ma2d {

MatrixField discrete_hessian(const ScalarField& v, const MixedOperators& ops) {
    const LagrangeSpace& space = *ops.space;
    if (v.space != &space)
        throw InvalidArgument("discrete_hessian: field belongs to another space");
    MatrixField h(space);
    // (eta, phi_j e_12) carries the Frobenius factor 2, hence the halving.
    h.c11 = ops.mass->solve(ops.G11.apply(v.coeffs) - ops.B11.apply(v.coeffs));
    h.c12 = ops.mass->solve(0.5 * (ops.G12.apply(v.coeffs) - ops.B12.apply(v.coeffs)));
    h.c22 = ops.mass->solve(ops.G22.apply(v.coeffs) - ops.B22.apply(v.coeffs));
    return h;
}

double trace_identity_residual(const ScalarField& v, const MatrixField& eta,
                               const MixedOperators& ops) {
    const Vector res = ops.M.apply(eta.c11 + eta.c22) + ops.K.apply(v.coeffs);
    double worst = 0.0;
    for (Index i : ops.space->interior_dofs()) worst = std::max(worst, std::abs(res[i]));
    return worst;
}

}  // namespace ma2d
