#ifndef MA2D_HESSIAN_HPP
#define MA2D_HESSIAN_HPP

#include "core/forms.hpp"

namespace ma2d {

/// Discrete Hessian H(v): the unique Sigma_h field with
///   (H(v), tau) = -(div tau, Dv) + <Dv, tau n>   for all tau in Sigma_h.
/// Three mass solves against the operators' cached factorization.
MatrixField discrete_hessian(const ScalarField& v, const MixedOperators& ops);

/// Max over interior test DOFs of |(tr eta, phi_i) + (Dv, D phi_i)|.
/// Vanishes (to solver tolerance) exactly when eta = H(v).
double trace_identity_residual(const ScalarField& v, const MatrixField& eta,
                               const MixedOperators& ops);

}  // namespace ma2d

#endif
