#include "core/solver.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace ma2d {

namespace {

std::string format_sci(double v) {
    std::ostringstream os;
    os.precision(6);
    os << std::scientific << v;
    return os.str();
}

}  // namespace

void SolverConfig::validate() const {
    if (!(tol_increment > 0.0)) throw InvalidArgument("tol_increment must be positive");
    if (!(tol_residual > 0.0)) throw InvalidArgument("tol_residual must be positive");
    if (!nu_auto && !(nu > 0.0)) throw InvalidArgument("nu must be positive or 'auto'");
    if (max_iterations < 0) throw InvalidArgument("max_iterations must be nonnegative");
    if (!(damping > 0.0) || damping > 1.0) throw InvalidArgument("damping must lie in (0, 1]");
}

double SolverContext::h1_norm(const Vector& v) const {
    const double sq = v.dot(ops->M.apply(v)) + v.dot(ops->K.apply(v));
    return std::sqrt(std::max(0.0, sq));
}

SolverContext make_context(const Problem& problem, const LagrangeSpace& space,
                           const MixedOperators& ops) {
    SolverContext ctx;
    ctx.space = &space;
    ctx.ops = &ops;
    ctx.problem = &problem;

    // f >= c0 > 0 at every load quadrature point
    const int load_exactness = 3 * space.degree() + 4;
    const QuadratureRule rule = triangle_quadrature(load_exactness);
    const Mesh& mesh = space.mesh();
    for (Index t = 0; t < mesh.n_triangles(); ++t) {
        const ElementMap map(mesh, t);
        for (const auto& b : rule.points) {
            const Vec2 p = map.to_physical(b);
            const double fv = problem.f(p);
            if (!(fv > 0.0) || !std::isfinite(fv))
                throw InvalidArgument("problem data: f must be strictly positive; got f = " +
                                      format_sci(fv) + " at (" + std::to_string(p.x) + ", " +
                                      std::to_string(p.y) + ")");
        }
    }

    ctx.f_load = assemble_scalar_load(problem.f, space, load_exactness);
    ctx.g_h = interpolate(problem.g, space);
    ctx.stiffness = std::make_shared<SpdFactorization>(
        submatrix(ops.K, space.interior_dofs(), space.interior_dofs()));
    return ctx;
}

ScalarField initial_guess(const SolverConfig& config, const SolverContext& ctx) {
    const LagrangeSpace& space = *ctx.space;
    if (config.initial_guess == InitialGuessKind::interpolant_of_exact) {
        if (!ctx.problem->has_exact)
            throw InvalidArgument(
                "initial_guess: interpolant_of_exact requires a problem with an exact solution");
        return interpolate(ctx.problem->exact_u, space);
    }
    // (D u0, D v) = -(2 sqrt(f), v) for interior v, u0 = g_h on the boundary
    const ScalarFunc& f = ctx.problem->f;
    const Vector rhs = assemble_scalar_load([&f](Vec2 p) { return -2.0 * std::sqrt(f(p)); },
                                            space, 3 * space.degree() + 4);
    const auto sys = apply_dirichlet(ctx.ops->K, rhs, space, ctx.g_h.coeffs);
    const Vector u_int = ctx.stiffness->solve(sys.rhs);
    ScalarField u0(space);
    u0.coeffs = sys.expand(u_int, ctx.g_h.coeffs);
    return u0;
}

NuEstimate estimate_nu(const ScalarField& u0, const MixedOperators& ops) {
    const LagrangeSpace& space = *ops.space;
    const MatrixField h = discrete_hessian(u0, ops);
    const Mesh& mesh = space.mesh();
    NuEstimate est;
    est.lambda_min = std::numeric_limits<double>::infinity();
    est.lambda_max = -std::numeric_limits<double>::infinity();
    Vec2 argmin{0.0, 0.0};
    for (Index t = 0; t < mesh.n_triangles(); ++t) {
        const ElementMap map(mesh, t);
        for (const auto& b : ops.tri_rule.points) {
            const EigPair e = eig2(cof2(evaluate(h, t, b)));
            if (e.lambda1 < est.lambda_min) {
                est.lambda_min = e.lambda1;
                argmin = map.to_physical(b);
            }
            est.lambda_max = std::max(est.lambda_max, e.lambda2);
        }
    }
    if (!(est.lambda_min > 0.0))
        throw SolveError("estimate_nu: cof(H(u0)) is not positive definite (lambda_min = " +
                         format_sci(est.lambda_min) + " at (" + std::to_string(argmin.x) + ", " +
                         std::to_string(argmin.y) + ")); the guess is not discretely convex");
    est.nu = 0.5 * (est.lambda_min + est.lambda_max);
    return est;
}

Vector residual_vector(const MatrixField& sigma, const SolverContext& ctx) {
    const Vector full = assemble_det_load(sigma, *ctx.ops) - ctx.f_load;
    return restrict_to(full, ctx.space->interior_dofs());
}

StepResult time_marching_step(const ScalarField& u, const MatrixField& sigma, double nu,
                              const SolverContext& ctx) {
    if (!(nu > 0.0)) throw InvalidArgument("time_marching_step: nu must be positive");
    const LagrangeSpace& space = *ctx.space;
    const Vector r = residual_vector(sigma, ctx);
    const Vector delta_int = ctx.stiffness->solve(r) / nu;

    StepResult out;
    out.u = u;
    Vector delta_full = Vector::Zero(space.n_dofs());
    const auto& interior = space.interior_dofs();
    for (size_t i = 0; i < interior.size(); ++i) {
        out.u.coeffs[interior[i]] += delta_int[static_cast<Eigen::Index>(i)];
        delta_full[interior[i]] = delta_int[static_cast<Eigen::Index>(i)];
    }
    out.sigma = discrete_hessian(out.u, *ctx.ops);
    out.increment_h1 = ctx.h1_norm(delta_full);
    return out;
}

namespace {

// Action of the reduced Newton matrix (cof sigma : H(phi_j), phi_i) on an
// interior coefficient vector: lift, apply H through the cached mass
// factorization, then the cofactor pairing blocks.
struct ReducedJacobian {
    const SolverContext* ctx;
    const MixedOperators::NewtonBlocks* blocks;

    Vector apply(const Vector& x_int) const {
        const LagrangeSpace& space = *ctx->space;
        const MixedOperators& ops = *ctx->ops;
        Vector x = Vector::Zero(space.n_dofs());
        const auto& interior = space.interior_dofs();
        for (size_t i = 0; i < interior.size(); ++i)
            x[interior[i]] = x_int[static_cast<Eigen::Index>(i)];
        const Vector h11 = ops.mass->solve(ops.G11.apply(x) - ops.B11.apply(x));
        const Vector h12 = ops.mass->solve(0.5 * (ops.G12.apply(x) - ops.B12.apply(x)));
        const Vector h22 = ops.mass->solve(ops.G22.apply(x) - ops.B22.apply(x));
        const Vector z = blocks->N11.apply(h11) + blocks->N12.apply(h12) + blocks->N22.apply(h22);
        return restrict_to(z, interior);
    }
};

// Stiffness weighted by cof(sigma): (cof(sigma) D phi_j, D phi_i). The
// reduced Jacobian equals its negative up to O(h), which makes it an
// effective preconditioner; it is SPD while cof(sigma) stays positive.
SparseMatrix assemble_weighted_stiffness(const MatrixField& sigma, const MixedOperators& ops) {
    const LagrangeSpace& space = *ops.space;
    const Mesh& mesh = space.mesh();
    const int nloc = space.dofs_per_cell();
    SparseMatrix w(space.n_dofs(), space.n_dofs());
    const TabulatedBasis tab = tabulate(space.basis(), ops.tri_rule.points);
    std::vector<Vec2> grads(static_cast<size_t>(nloc));
    for (Index t = 0; t < mesh.n_triangles(); ++t) {
        const ElementMap map(mesh, t);
        const double area = mesh.triangles[static_cast<size_t>(t)].area;
        const auto& dofs = space.cell_dofs(t);
        for (size_t q = 0; q < ops.tri_rule.points.size(); ++q) {
            Sym2x2 s;
            for (int i = 0; i < nloc; ++i) {
                const Index d = dofs[static_cast<size_t>(i)];
                const double v = tab.values[q][static_cast<size_t>(i)];
                s.a11 += sigma.c11[d] * v;
                s.a12 += sigma.c12[d] * v;
                s.a22 += sigma.c22[d] * v;
            }
            const Sym2x2 c = cof2(s);
            const double wq = area * ops.tri_rule.weights[q];
            for (int i = 0; i < nloc; ++i)
                grads[static_cast<size_t>(i)] = map.grad(tab.ref_grads[q][static_cast<size_t>(i)]);
            for (int i = 0; i < nloc; ++i)
                for (int j = 0; j < nloc; ++j)
                    w.add(dofs[static_cast<size_t>(i)], dofs[static_cast<size_t>(j)],
                          wq * c.apply(grads[static_cast<size_t>(j)]).dot(grads[static_cast<size_t>(i)]));
        }
    }
    w.finalize();
    return w;
}

struct KrylovOutcome {
    Vector x;
    bool converged = false;
};

// Preconditioned BiCGStab on J x = b with K ~ J.
KrylovOutcome bicgstab(const ReducedJacobian& jac, const SpdFactorization& neg_precond,
                       const Vector& b, double rel_tol, int max_iterations) {
    KrylovOutcome out;
    const Eigen::Index n = b.size();
    out.x = Vector::Zero(n);
    const double bnorm = b.norm();
    if (bnorm == 0.0) {
        out.converged = true;
        return out;
    }
    Vector r = b;
    const Vector rhat = r;
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    Vector v = Vector::Zero(n), p = Vector::Zero(n);
    for (int it = 0; it < max_iterations; ++it) {
        const double rho1 = rhat.dot(r);
        if (rho1 == 0.0) return out;
        if (it == 0) {
            p = r;
        } else {
            const double beta = (rho1 / rho) * (alpha / omega);
            p = r + beta * (p - omega * v);
        }
        rho = rho1;
        const Vector phat = -neg_precond.solve(p);
        v = jac.apply(phat);
        const double rv = rhat.dot(v);
        if (rv == 0.0) return out;
        alpha = rho1 / rv;
        const Vector s = r - alpha * v;
        if (s.norm() <= rel_tol * bnorm) {
            out.x += alpha * phat;
            out.converged = true;
            return out;
        }
        const Vector shat = -neg_precond.solve(s);
        const Vector t = jac.apply(shat);
        const double tt = t.dot(t);
        if (tt == 0.0) return out;
        omega = t.dot(s) / tt;
        out.x += alpha * phat + omega * shat;
        r = s - omega * t;
        if (r.norm() <= rel_tol * bnorm) {
            out.converged = true;
            return out;
        }
        if (omega == 0.0) return out;
    }
    return out;
}

}  // namespace

/// Fully assembled coupled step; fallback when the reduced Krylov path
/// cannot be used (cof(sigma) indefinite) or stalls.
static Vector newton_increment_saddle(const ScalarField& u, const MatrixField& sigma,
                                      const SolverContext& ctx,
                                      const MixedOperators::NewtonBlocks& blocks) {
    const LagrangeSpace& space = *ctx.space;
    const MixedOperators& ops = *ctx.ops;
    const Index n = space.n_dofs();
    const auto& interior = space.interior_dofs();
    const Index ni = static_cast<Index>(interior.size());

    // Unknowns [dsigma11, dsigma12, dsigma22, du_interior]; du = 0 on the
    // boundary. Row blocks: the linearized Hessian constraint for every
    // tau, then the linearized determinant equation for interior v.
    SparseMatrix saddle(3 * n + ni, 3 * n + ni);
    std::vector<Index> interior_pos(static_cast<size_t>(n), -1);
    for (Index i = 0; i < ni; ++i) interior_pos[static_cast<size_t>(interior[static_cast<size_t>(i)])] = i;

    const auto copy_block = [&saddle, &interior_pos](const SparseMatrix& m, Index row0, Index col0,
                                                     double scale, bool interior_cols,
                                                     bool interior_rows) {
        const auto& a = m.eigen();
        for (int k = 0; k < a.outerSize(); ++k)
            for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(a, k); it; ++it) {
                Index r = it.row();
                Index c = it.col();
                if (interior_rows) {
                    r = interior_pos[static_cast<size_t>(r)];
                    if (r < 0) continue;
                }
                if (interior_cols) {
                    c = interior_pos[static_cast<size_t>(c)];
                    if (c < 0) continue;
                }
                saddle.add(row0 + r, col0 + c, scale * it.value());
            }
    };

    copy_block(ops.M, 0, 0, 1.0, false, false);
    copy_block(ops.M, n, n, 2.0, false, false);
    copy_block(ops.M, 2 * n, 2 * n, 1.0, false, false);
    copy_block(ops.B11, 0, 3 * n, 1.0, true, false);
    copy_block(ops.G11, 0, 3 * n, -1.0, true, false);
    copy_block(ops.B12, n, 3 * n, 1.0, true, false);
    copy_block(ops.G12, n, 3 * n, -1.0, true, false);
    copy_block(ops.B22, 2 * n, 3 * n, 1.0, true, false);
    copy_block(ops.G22, 2 * n, 3 * n, -1.0, true, false);
    copy_block(blocks.N11, 3 * n, 0, 1.0, false, true);
    copy_block(blocks.N12, 3 * n, n, 1.0, false, true);
    copy_block(blocks.N22, 3 * n, 2 * n, 1.0, false, true);
    saddle.finalize();

    Vector rhs = Vector::Zero(3 * n + ni);
    // Hessian-constraint residual; vanishes when sigma = H(u).
    rhs.segment(0, n) = -(ops.M.apply(sigma.c11) + ops.B11.apply(u.coeffs) - ops.G11.apply(u.coeffs));
    rhs.segment(n, n) =
        -(2.0 * ops.M.apply(sigma.c12) + ops.B12.apply(u.coeffs) - ops.G12.apply(u.coeffs));
    rhs.segment(2 * n, n) =
        -(ops.M.apply(sigma.c22) + ops.B22.apply(u.coeffs) - ops.G22.apply(u.coeffs));
    rhs.segment(3 * n, ni) = -residual_vector(sigma, ctx);

    Vector delta;
    try {
        delta = solve_general(saddle, rhs);
    } catch (const SolveError& e) {
        throw SolveError(std::string("newton_step: singular reduced Jacobian (cof(sigma) may "
                                     "have lost definiteness): ") +
                         e.what());
    }

    StepResult out;
    out.u = u;
    Vector delta_full = Vector::Zero(n);
    for (Index i = 0; i < ni; ++i) {
        const double d = damping * delta[3 * n + i];
        out.u.coeffs[interior[static_cast<size_t>(i)]] += d;
        delta_full[interior[static_cast<size_t>(i)]] = d;
    }
    out.sigma = discrete_hessian(out.u, *ctx.ops);
    out.increment_h1 = ctx.h1_norm(delta_full);
    return out;
}

namespace {

SolveResult run_iteration(const SolverConfig& config, const SolverContext& ctx,
                          const ScalarField& start, const Logger* logger) {
    const bool marching = config.method == Method::time_marching;
    SolveResult out;
    out.u = start;
    out.sigma = discrete_hessian(out.u, *ctx.ops);

    double nu = 0.0;
    if (marching) {
        if (config.nu_auto) {
            const NuEstimate est = estimate_nu(out.u, *ctx.ops);
            nu = est.nu;
            if (logger)
                logger->info("nu=auto estimated " + format_sci(nu) + " (lambda range [" +
                             format_sci(est.lambda_min) + ", " + format_sci(est.lambda_max) + "])");
        } else {
            nu = config.nu;
        }
    }
    out.nu = nu;

    double residual = residual_vector(out.sigma, ctx).norm();
    double increment = std::numeric_limits<double>::infinity();
    out.history.push_back({0, residual, 0.0, nu});
    if (logger)
        logger->info("iter=0 residual=" + format_sci(residual) + " increment=n/a" +
                     (marching ? " nu=" + format_sci(nu) : ""));

    const int max_it = config.resolved_max_iterations();
    int grow_streak = 0;
    double prev_increment = increment;
    while (out.iterations < max_it &&
           !(residual <= config.tol_residual && increment <= config.tol_increment)) {
        StepResult step;
        try {
            step = marching ? time_marching_step(out.u, out.sigma, nu, ctx)
                            : newton_step(out.u, out.sigma, ctx, config.damping);
        } catch (const SolveError& e) {
            out.message = e.what();
            if (logger) logger->error(out.message);
            out.converged = false;
            return out;
        }
        out.u = std::move(step.u);
        out.sigma = std::move(step.sigma);
        prev_increment = increment;
        increment = step.increment_h1;
        out.iterations += 1;
        residual = residual_vector(out.sigma, ctx).norm();
        out.history.push_back({out.iterations, residual, increment, nu});
        if (logger)
            logger->info("iter=" + std::to_string(out.iterations) + " residual=" +
                         format_sci(residual) + " increment=" + format_sci(increment) +
                         (marching ? " nu=" + format_sci(nu) : ""));

        if (marching) {
            if (std::isfinite(prev_increment) && increment > 10.0 * prev_increment) {
                grow_streak += 1;
                if (grow_streak >= 5) {
                    out.message = "time marching diverging: increment grew more than 10x for 5 "
                                  "consecutive steps";
                    if (logger) logger->error(out.message);
                    out.converged = false;
                    return out;
                }
            } else {
                grow_streak = 0;
            }
            if (config.nu_auto && out.iterations % 25 == 0) {
                try {
                    nu = estimate_nu(out.u, *ctx.ops).nu;
                    out.nu = nu;
                    if (logger) logger->debug("nu refreshed to " + format_sci(nu));
                } catch (const SolveError& e) {
                    if (logger)
                        logger->warn(std::string("nu refresh failed, keeping previous value: ") +
                                     e.what());
                }
            }
        }
    }

    out.converged = residual <= config.tol_residual && increment <= config.tol_increment;
    if (!out.converged && out.message.empty())
        out.message = "no convergence within " + std::to_string(max_it) + " iterations";
    return out;
}

}  // namespace

SolveResult solve(const Problem& problem, const LagrangeSpace& space, const MixedOperators& ops,
                  const SolverConfig& config, const Logger* logger) {
    config.validate();
    const SolverContext ctx = make_context(problem, space, ops);
    const ScalarField u0 = initial_guess(config, ctx);
    return run_iteration(config, ctx, u0, logger);
}

SolveResult solve_with_guess(const Problem& problem, const LagrangeSpace& space,
                             const MixedOperators& ops, const SolverConfig& config,
                             const ScalarField& guess, const Logger* logger) {
    config.validate();
    const SolverContext ctx = make_context(problem, space, ops);
    ScalarField u0 = guess;
    for (Index b : space.boundary_dofs()) u0.coeffs[b] = ctx.g_h.coeffs[b];
    return run_iteration(config, ctx, u0, logger);
}

}  // namespace ma2d
