#ifndef MA2D_PROBLEM_HPP
#define MA2D_PROBLEM_HPP

#include <string>

#include "core/lagrange.hpp"

namespace ma2d {

/// Data of det(D^2 u) = f in Omega, u = g on the boundary, optionally
/// carrying the manufactured exact solution for error studies.
struct Problem {
    std::string name;
    ScalarFunc f;
    ScalarFunc g;

    bool has_exact = false;
    ScalarFunc exact_u;
    VectorFunc exact_grad;
    MatrixFunc exact_hessian;  // = exact sigma
};

/// u = (x^2+y^2)/2, f = 1. The exact solution lies in V_h for k >= 2.
Problem quadratic_problem();

/// u = e^{(x^2+y^2)/2}, f = (1 + x^2 + y^2) e^{x^2+y^2}.
Problem exponential_problem();

/// Problem from f and g alone (no exact solution attached).
Problem expression_problem(const std::string& f_text, const std::string& g_text);

Problem problem_from_preset(const std::string& preset);

}  // namespace ma2d

#endif
