#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "core/forms.hpp"
#include "core/hessian.hpp"

using namespace ma2d;

namespace {

std::mt19937_64 rng(42);

ScalarField random_field(const LagrangeSpace& space, bool interior_only = false) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    ScalarField f(space);
    if (interior_only) {
        for (Index d : space.interior_dofs()) f.coeffs[d] = dist(rng);
    } else {
        for (Index d = 0; d < space.n_dofs(); ++d) f.coeffs[d] = dist(rng);
    }
    return f;
}

MatrixField random_matrix_field(const LagrangeSpace& space) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    MatrixField f(space);
    for (Index d = 0; d < space.n_dofs(); ++d) {
        f.c11[d] = dist(rng);
        f.c12[d] = dist(rng);
        f.c22[d] = dist(rng);
    }
    return f;
}

// (Dv, Dw) by direct element quadrature, independent of the assembled K.
double stiffness_energy_by_quadrature(const ScalarField& v, const ScalarField& w) {
    const LagrangeSpace& space = *v.space;
    const Mesh& mesh = space.mesh();
    const QuadratureRule rule = triangle_quadrature(2 * space.degree());
    double sum = 0.0;
    for (Index t = 0; t < mesh.n_triangles(); ++t) {
        const double area = mesh.triangles[static_cast<size_t>(t)].area;
        for (size_t q = 0; q < rule.points.size(); ++q)
            sum += area * rule.weights[q] *
                   evaluate_gradient(v, t, rule.points[q])
                       .dot(evaluate_gradient(w, t, rule.points[q]));
    }
    return sum;
}

}  // namespace

TEST_CASE("Sigma mass quadratic form of the identity field is 2|Omega|") {
    const Mesh mesh = build_structured_mesh(2);
    const LagrangeSpace space(mesh, 2);
    const MixedOperators ops = assemble_mixed_operators(space);
    const MatrixField ident = interpolate_matrix([](Vec2) { return Sym2x2::identity(); }, space);
    const double form = ident.c11.dot(ops.M.apply(ident.c11)) +
                        2.0 * ident.c12.dot(ops.M.apply(ident.c12)) +
                        ident.c22.dot(ops.M.apply(ident.c22));
    CHECK(std::abs(form - 2.0) <= 1e-13);
}

TEST_CASE("mass matrix is symmetric positive definite") {
    const Mesh mesh = build_structured_mesh(2);
    const LagrangeSpace space(mesh, 2);
    const MixedOperators ops = assemble_mixed_operators(space);
    CHECK(ops.M.symmetry_defect() <= 1e-12);
    Eigen::MatrixXd dense(ops.M.eigen());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
    CHECK(es.eigenvalues()(0) > 0.0);
}

TEST_CASE("stiffness is PSD with constants in the null space") {
    const Mesh mesh = build_structured_mesh(3);
    const LagrangeSpace space(mesh, 2);
    const MixedOperators ops = assemble_mixed_operators(space);
    CHECK(ops.K.symmetry_defect() <= 1e-12);
    const Vector ones = Vector::Ones(space.n_dofs());
    CHECK(ops.K.apply(ones).lpNorm<Eigen::Infinity>() <= 1e-13);
    Eigen::MatrixXd dense(ops.K.eigen());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
    CHECK(es.eigenvalues()(0) >= -1e-12);
    CHECK(es.eigenvalues()(1) > 1e-6);  // only constants in the null space
}

TEST_CASE("embedding identity div(vI) = Dv at the matrix level") {
    const Mesh mesh = build_structured_mesh(3);
    const LagrangeSpace space(mesh, 2);
    const MixedOperators ops = assemble_mixed_operators(space);
    for (int trial = 0; trial < 20; ++trial) {
        const ScalarField v = random_field(space, true);
        const ScalarField w = random_field(space);
        const double lhs = v.coeffs.dot(ops.B11.apply(w.coeffs) + ops.B22.apply(w.coeffs)) -
                           v.coeffs.dot(ops.G11.apply(w.coeffs) + ops.G22.apply(w.coeffs));
        const double rhs = v.coeffs.dot(ops.K.apply(w.coeffs));
        CHECK(std::abs(lhs - rhs) <= 1e-11);
        // independent quadrature oracle for (Dv, Dw)
        if (trial < 3) CHECK(std::abs(rhs - stiffness_energy_by_quadrature(v, w)) <= 1e-11);
        // boundary coupling vanishes for interior v: phi_j is identically
        // zero on every boundary edge
        const double g = v.coeffs.dot(ops.G11.apply(w.coeffs) + ops.G22.apply(w.coeffs));
        CHECK(std::abs(g) <= 1e-12);
    }
}

TEST_CASE("determinant load of the identity field equals the f=1 load") {
    const Mesh mesh = build_structured_mesh(3);
    const LagrangeSpace space(mesh, 2);
    const MixedOperators ops = assemble_mixed_operators(space);
    const MatrixField ident = interpolate_matrix([](Vec2) { return Sym2x2::identity(); }, space);
    const Vector det_load = assemble_det_load(ident, ops);
    const Vector one_load = assemble_scalar_load([](Vec2) { return 1.0; }, space,
                                                 3 * space.degree());
    CHECK((det_load - one_load).lpNorm<Eigen::Infinity>() <= 1e-14);

    const MatrixField zero(space);
    CHECK(assemble_det_load(zero, ops).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("f=1 load sums to the domain area") {
    const Mesh mesh = build_structured_mesh(4);
    const LagrangeSpace space(mesh, 2);
    const Vector load = assemble_scalar_load([](Vec2) { return 1.0; }, space, 6);
    CHECK(std::abs(load.sum() - 1.0) <= 1e-13);
}

TEST_CASE("determinant load is exactly quadratic in eta") {
    const Mesh mesh = build_structured_mesh(2);
    const LagrangeSpace space(mesh, 2);
    const MixedOperators ops = assemble_mixed_operators(space);
    const MatrixField eta = random_matrix_field(space);
    const Vector base = assemble_det_load(eta, ops);
    for (double alpha : {0.5, -2.0, 3.0}) {
        MatrixField scaled(space);
        scaled.c11 = alpha * eta.c11;
        scaled.c12 = alpha * eta.c12;
        scaled.c22 = alpha * eta.c22;
        const Vector got = assemble_det_load(scaled, ops);
        CHECK((got - alpha * alpha * base).lpNorm<Eigen::Infinity>() <=
              1e-12 * base.lpNorm<Eigen::Infinity>() * alpha * alpha);
    }
}

TEST_CASE("det load of the interpolated Hessian is consistent with the exact f") {
    // u = e^{(x^2+y^2)/2}, f = det D^2 u = (1 + x^2 + y^2) e^{x^2+y^2}
    const auto hess = [](Vec2 p) {
        const double e = std::exp(0.5 * (p.x * p.x + p.y * p.y));
        return Sym2x2{e * (1.0 + p.x * p.x), e * p.x * p.y, e * (1.0 + p.y * p.y)};
    };
    const auto f = [](Vec2 p) {
        return (1.0 + p.x * p.x + p.y * p.y) * std::exp(p.x * p.x + p.y * p.y);
    };
    double err_prev = 0.0;
    for (Index n : {8, 16}) {
        const Mesh mesh = build_structured_mesh(n);
        const LagrangeSpace space(mesh, 2);
        const MixedOperators ops = assemble_mixed_operators(space);
        const Vector dl = assemble_det_load(interpolate_matrix(hess, space), ops);
        const Vector fl = assemble_scalar_load(f, space, 3 * space.degree() + 4);
        const double err = (dl - fl).lpNorm<Eigen::Infinity>();
        if (n == 8) {
            err_prev = err;
            CHECK(err <= 0.05 * fl.lpNorm<Eigen::Infinity>());
        } else {
            // entries scale with h^2 and consistency adds h^{k-1}
            CHECK(err_prev / err >= 6.0);
        }
    }
}

TEST_CASE("Newton block at the identity field is the trace pairing") {
    const Mesh mesh = build_structured_mesh(2);
    const LagrangeSpace space(mesh, 2);
    const MixedOperators ops = assemble_mixed_operators(space);
    const MatrixField ident = interpolate_matrix([](Vec2) { return Sym2x2::identity(); }, space);
    const auto blocks = assemble_newton_jacobian_blocks(ident, ops);
    const MatrixField zero(space);
    const auto zero_blocks = assemble_newton_jacobian_blocks(zero, ops);
    for (Index i = 0; i < space.n_dofs(); ++i)
        for (Index j = 0; j < space.n_dofs(); ++j) {
            CHECK(std::abs(blocks.N11.coeff(i, j) - ops.M.coeff(i, j)) <= 1e-14);
            CHECK(std::abs(blocks.N22.coeff(i, j) - ops.M.coeff(i, j)) <= 1e-14);
            CHECK(std::abs(blocks.N12.coeff(i, j)) <= 1e-14);
            CHECK(zero_blocks.N11.coeff(i, j) == 0.0);
            CHECK(zero_blocks.N12.coeff(i, j) == 0.0);
            CHECK(zero_blocks.N22.coeff(i, j) == 0.0);
        }
}

TEST_CASE("Newton block matches finite differences of the det load") {
    const Mesh mesh = build_structured_mesh(4);
    const LagrangeSpace space(mesh, 2);
    const MixedOperators ops = assemble_mixed_operators(space);
    for (int trial = 0; trial < 5; ++trial) {
        const MatrixField eta = random_matrix_field(space);
        const MatrixField delta = random_matrix_field(space);
        const auto blocks = assemble_newton_jacobian_blocks(eta, ops);
        const Vector jd = blocks.N11.apply(delta.c11) + blocks.N12.apply(delta.c12) +
                          blocks.N22.apply(delta.c22);
        const Vector base = assemble_det_load(eta, ops);
        std::array<double, 2> errs{};
        const std::array<double, 2> eps{1e-5, 1e-6};
        for (size_t e = 0; e < eps.size(); ++e) {
            MatrixField pert(space);
            pert.c11 = eta.c11 + eps[e] * delta.c11;
            pert.c12 = eta.c12 + eps[e] * delta.c12;
            pert.c22 = eta.c22 + eps[e] * delta.c22;
            const Vector diff = assemble_det_load(pert, ops) - base;
            errs[e] = (diff - eps[e] * jd).lpNorm<Eigen::Infinity>();
        }
        const double order = std::log10(errs[0] / errs[1]);
        CHECK(order >= 1.9);
    }
}

TEST_CASE("Dirichlet elimination and the Poisson oracle") {
    const Mesh mesh = build_structured_mesh(4);
    const LagrangeSpace space(mesh, 2);
    const MixedOperators ops = assemble_mixed_operators(space);

    // homogeneous data leaves the right-hand side untouched
    const Vector b = assemble_scalar_load([](Vec2 p) { return p.x + 2.0; }, space, 6);
    const auto sys0 = apply_dirichlet(ops.K, b, space, Vector::Zero(space.n_dofs()));
    CHECK((sys0.rhs - restrict_to(b, space.interior_dofs())).lpNorm<Eigen::Infinity>() == 0.0);

    // -laplace u = -2 with u = (x^2+y^2)/2 on the boundary reproduces I_h u
    const auto exact = [](Vec2 p) { return 0.5 * (p.x * p.x + p.y * p.y); };
    const ScalarField ih = interpolate(exact, space);
    const Vector load = assemble_scalar_load([](Vec2) { return -2.0; }, space, 6);
    const auto sys = apply_dirichlet(ops.K, load, space, ih.coeffs);
    const Vector u_int = solve_spd(sys.a_ii, sys.rhs);
    const Vector u_full = sys.expand(u_int, ih.coeffs);
    CHECK((u_full - ih.coeffs).lpNorm<Eigen::Infinity>() <= 1e-12);

    CHECK_THROWS_AS(apply_dirichlet(ops.K, load, space, Vector::Zero(3)), InvalidArgument);
}
