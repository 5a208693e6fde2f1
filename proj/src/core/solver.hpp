#ifndef MA2D_SOLVER_HPP
#define MA2D_SOLVER_HPP

#include <optional>
#include <string>
#include <vector>

#include "core/forms.hpp"
#include "core/hessian.hpp"
#include "core/log.hpp"
#include "core/problem.hpp"

namespace ma2d {

enum class Method { time_marching, newton };
enum class InitialGuessKind { interpolant_of_exact, poisson_sqrt_f };

struct SolverConfig {
    Method method = Method::newton;
    bool nu_auto = true;
    double nu = 0.0;  // used when nu_auto is false
    double tol_increment = 1e-10;
    double tol_residual = 1e-10;
    int max_iterations = 0;  // 0 = method default (500 marching, 25 newton)
    InitialGuessKind initial_guess = InitialGuessKind::poisson_sqrt_f;
    double damping = 1.0;

    int resolved_max_iterations() const {
        if (max_iterations > 0) return max_iterations;
        return method == Method::time_marching ? 500 : 25;
    }
    /// Throws InvalidArgument naming the offending field.
    void validate() const;
};

struct IterationRecord {
    int iteration = 0;
    double residual = 0.0;
    double increment = 0.0;
    double nu = 0.0;
};

struct SolveResult {
    ScalarField u;
    MatrixField sigma;  // = H(u) after every iteration
    int iterations = 0;
    std::vector<IterationRecord> history;
    bool converged = false;
    double nu = 0.0;  // last value used (time marching)
    std::string message;
};

/// Per-problem assembled data shared by the iteration operators.
struct SolverContext {
    const LagrangeSpace* space = nullptr;
    const MixedOperators* ops = nullptr;
    const Problem* problem = nullptr;
    Vector f_load;       // exactness 3k+4
    ScalarField g_h;     // I_h of the boundary data (interior entries unused)
    std::shared_ptr<const SpdFactorization> stiffness;  // K restricted to interior DOFs

    /// H^1 norm of a full-length coefficient vector.
    double h1_norm(const Vector& v) const;
};

/// Assembles loads and the interior stiffness factorization; rejects
/// problems with f <= 0 at any load quadrature point.
SolverContext make_context(const Problem& problem, const LagrangeSpace& space,
                           const MixedOperators& ops);

/// interpolant_of_exact: I_h u (requires an exact solution).
/// poisson_sqrt_f: solve (Du0, Dv) = -(2 sqrt(f), v) with u0 = g_h on the
/// boundary.
ScalarField initial_guess(const SolverConfig& config, const SolverContext& ctx);

struct NuEstimate {
    double nu = 0.0;
    double lambda_min = 0.0;  // over all quadrature points of cof(H(u0))
    double lambda_max = 0.0;
};

/// nu = (min + max)/2 of the eigenvalues of cof(H(u0)) over all assembly
/// quadrature points; fails if the minimum is not positive.
NuEstimate estimate_nu(const ScalarField& u0, const MixedOperators& ops);

struct StepResult {
    ScalarField u;
    MatrixField sigma;
    double increment_h1 = 0.0;
};

/// One relaxation step: nu (D u', Dv) = nu (D u, Dv) + (det sigma - f, v)
/// on interior test functions, boundary values preserved, then
/// sigma' = H(u').
StepResult time_marching_step(const ScalarField& u, const MatrixField& sigma, double nu,
                              const SolverContext& ctx);

/// One Newton step on the coupled system; the linearized determinant row
/// is (cof sigma : delta_sigma, v). Solved in the sparse coupled form,
/// which reduces to the scalar Jacobian (cof sigma : H(phi_j), phi_i)
/// because the first block forces delta_sigma = H(delta_u).
StepResult newton_step(const ScalarField& u, const MatrixField& sigma, const SolverContext& ctx,
                       double damping);

/// Interior-restricted nonlinear residual (det sigma - f, phi_i).
Vector residual_vector(const MatrixField& sigma, const SolverContext& ctx);

SolveResult solve(const Problem& problem, const LagrangeSpace& space, const MixedOperators& ops,
                  const SolverConfig& config, const Logger* logger = nullptr);

/// Same, starting from a caller-provided initial iterate (boundary values
/// are overwritten with g_h).
SolveResult solve_with_guess(const Problem& problem, const LagrangeSpace& space,
                             const MixedOperators& ops, const SolverConfig& config,
                             const ScalarField& guess, const Logger* logger = nullptr);

}  // namespace ma2d

#endif
