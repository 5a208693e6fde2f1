#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "core/forms.hpp"
#include "core/hessian.hpp"

using namespace ma2d;

namespace {

std::mt19937_64 rng(20250101);

ScalarField random_field(const LagrangeSpace& space) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    ScalarField f(space);
    for (Index d = 0; d < space.n_dofs(); ++d) f.coeffs[d] = dist(rng);
    return f;
}

double matrix_l2_distance(const MatrixField& a, const MatrixField& b, const MixedOperators& ops) {
    const Vector e11 = a.c11 - b.c11;
    const Vector e12 = a.c12 - b.c12;
    const Vector e22 = a.c22 - b.c22;
    const double sq = e11.dot(ops.M.apply(e11)) + 2.0 * e12.dot(ops.M.apply(e12)) +
                      e22.dot(ops.M.apply(e22));
    return std::sqrt(std::max(0.0, sq));
}

}  // namespace

TEST_CASE("H reproduces the constant Hessian of a global quadratic") {
    const Mesh mesh = build_structured_mesh(4);
    const LagrangeSpace space(mesh, 2);
    const MixedOperators ops = assemble_mixed_operators(space);
    const ScalarField v = interpolate([](Vec2 p) { return 0.5 * p.x * p.x; }, space);
    const MatrixField h = discrete_hessian(v, ops);
    for (Index t = 0; t < mesh.n_triangles(); ++t)
        for (const auto& b : ops.tri_rule.points) {
            const Sym2x2 m = evaluate(h, t, b);
            CHECK(std::abs(m.a11 - 1.0) <= 1e-11);
            CHECK(std::abs(m.a12) <= 1e-11);
            CHECK(std::abs(m.a22) <= 1e-11);
        }
}

TEST_CASE("H is linear and homogeneous") {
    const Mesh mesh = build_structured_mesh(4);
    const LagrangeSpace space(mesh, 2);
    const MixedOperators ops = assemble_mixed_operators(space);
    for (int trial = 0; trial < 10; ++trial) {
        const ScalarField v = random_field(space);
        const ScalarField w = random_field(space);
        const MatrixField hv = discrete_hessian(v, ops);
        const MatrixField hw = discrete_hessian(w, ops);

        ScalarField sum(space);
        sum.coeffs = v.coeffs + w.coeffs;
        const MatrixField hsum = discrete_hessian(sum, ops);
        const double scale = std::max(1.0, hv.c11.lpNorm<Eigen::Infinity>());
        CHECK((hsum.c11 - hv.c11 - hw.c11).lpNorm<Eigen::Infinity>() <= 1e-12 * scale);
        CHECK((hsum.c12 - hv.c12 - hw.c12).lpNorm<Eigen::Infinity>() <= 1e-12 * scale);
        CHECK((hsum.c22 - hv.c22 - hw.c22).lpNorm<Eigen::Infinity>() <= 1e-12 * scale);

        for (double alpha : {0.0, 0.5, -2.0}) {
            ScalarField av(space);
            av.coeffs = alpha * v.coeffs;
            const MatrixField hav = discrete_hessian(av, ops);
            CHECK((hav.c11 - alpha * hv.c11).lpNorm<Eigen::Infinity>() <= 1e-12 * scale);
            CHECK((hav.c12 - alpha * hv.c12).lpNorm<Eigen::Infinity>() <= 1e-12 * scale);
            CHECK((hav.c22 - alpha * hv.c22).lpNorm<Eigen::Infinity>() <= 1e-12 * scale);
        }
    }
}

TEST_CASE("trace identity residual") {
    const Mesh mesh = build_structured_mesh(4);
    const LagrangeSpace space(mesh, 2);
    const MixedOperators ops = assemble_mixed_operators(space);

    const ScalarField zero(space);
    const MatrixField zerom(space);
    CHECK(trace_identity_residual(zero, zerom, ops) == 0.0);

    for (int trial = 0; trial < 10; ++trial) {
        const ScalarField v = random_field(space);
        const MatrixField h = discrete_hessian(v, ops);
        CHECK(trace_identity_residual(v, h, ops) <= 1e-11);
    }

    // identity-field perturbation: residual is the |(2, phi_i)| pattern
    const ScalarField v = random_field(space);
    MatrixField h = discrete_hessian(v, ops);
    h.c11.array() += 1.0;
    h.c22.array() += 1.0;
    const double res = trace_identity_residual(v, h, ops);
    CHECK(res > 1e-3);
    const Vector ones_load = assemble_scalar_load([](Vec2) { return 1.0; }, space, 6);
    double expected = 0.0;
    for (Index i : space.interior_dofs()) expected = std::max(expected, 2.0 * std::abs(ones_load[i]));
    CHECK(std::abs(res - expected) <= 1e-11);
}

TEST_CASE("H(I_h u) converges to I_h sigma at rate k-1") {
    const auto u = [](Vec2 p) { return std::exp(0.5 * (p.x * p.x + p.y * p.y)); };
    const auto sigma = [](Vec2 p) {
        const double e = std::exp(0.5 * (p.x * p.x + p.y * p.y));
        return Sym2x2{e * (1.0 + p.x * p.x), e * p.x * p.y, e * (1.0 + p.y * p.y)};
    };
    std::vector<double> errs, hs;
    for (Index n : {8, 16, 32}) {
        const Mesh mesh = build_structured_mesh(n);
        const LagrangeSpace space(mesh, 2);
        const MixedOperators ops = assemble_mixed_operators(space);
        const MatrixField h = discrete_hessian(interpolate(u, space), ops);
        const MatrixField ihs = interpolate_matrix(sigma, space);
        errs.push_back(matrix_l2_distance(h, ihs, ops));
        hs.push_back(mesh.h);
    }
    for (size_t i = 0; i + 1 < errs.size(); ++i) {
        const double rate = std::log(errs[i] / errs[i + 1]) / std::log(hs[i] / hs[i + 1]);
        CHECK(rate >= 0.8);  // theory: k - 1 = 1
    }
}
