#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>

#include "core/forms.hpp"
#include "core/sparse.hpp"
#include "core/types.hpp"

using namespace ma2d;

namespace {
std::mt19937_64 rng(20260810);
Sym2x2 random_sym() {
    std::uniform_real_distribution<double> d(-2.0, 2.0);
    return {d(rng), d(rng), d(rng)};
}
}  // namespace

TEST_CASE("det, cof, frobenius basics") {
    CHECK(det2(Sym2x2::identity()) == 1.0);
    const Sym2x2 ci = cof2(Sym2x2::identity());
    CHECK(ci.a11 == 1.0);
    CHECK(ci.a12 == 0.0);
    CHECK(ci.a22 == 1.0);

    // t = 1/2 mean-value identity for the quadratic 2D determinant
    const Sym2x2 a{2.0, 0.0, 3.0};
    const Sym2x2 b = Sym2x2::identity();
    CHECK(det2(a) - det2(b) == 5.0);
    CHECK(frobenius(cof2(0.5 * (a + b)), a - b) == 5.0);
}

TEST_CASE("cofactor is linear in 2D") {
    for (int trial = 0; trial < 50; ++trial) {
        const Sym2x2 a = random_sym();
        const Sym2x2 b = random_sym();
        const Sym2x2 lhs = cof2(a) - cof2(b);
        const Sym2x2 rhs = cof2(a - b);
        CHECK(std::abs(lhs.a11 - rhs.a11) <= 1e-13);
        CHECK(std::abs(lhs.a12 - rhs.a12) <= 1e-13);
        CHECK(std::abs(lhs.a22 - rhs.a22) <= 1e-13);
    }
}

TEST_CASE("Euler identity cof(A):A = 2 det A") {
    for (int trial = 0; trial < 50; ++trial) {
        const Sym2x2 a = random_sym();
        CHECK(std::abs(frobenius(cof2(a), a) - 2.0 * det2(a)) <= 1e-13);
    }
}

TEST_CASE("mean-value identity with t = 1/2 on random pairs") {
    for (int trial = 0; trial < 50; ++trial) {
        const Sym2x2 a = random_sym();
        const Sym2x2 b = random_sym();
        const double lhs = det2(a) - det2(b);
        const double rhs = frobenius(cof2(0.5 * (a + b)), a - b);
        CHECK(std::abs(lhs - rhs) <= 1e-13);
    }
}

TEST_CASE("eigenvalues of 2x2 symmetric matrices") {
    const EigPair i = eig2(Sym2x2::identity());
    CHECK(i.lambda1 == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(i.lambda2 == doctest::Approx(1.0).epsilon(1e-15));
    const EigPair d = eig2({2.0, 0.0, 3.0});
    CHECK(d.lambda1 == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(d.lambda2 == doctest::Approx(3.0).epsilon(1e-15));
    const EigPair o = eig2({0.0, 1.0, 0.0});
    CHECK(o.lambda1 == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(o.lambda2 == doctest::Approx(1.0).epsilon(1e-15));

    for (int trial = 0; trial < 50; ++trial) {
        const Sym2x2 a = random_sym();
        const EigPair e = eig2(a);
        CHECK(e.lambda1 <= e.lambda2);
        CHECK(std::abs(e.lambda1 + e.lambda2 - a.trace()) <= 1e-12);
        CHECK(std::abs(e.lambda1 * e.lambda2 - det2(a)) <= 1e-12);
    }
}

TEST_CASE("direct solves") {
    SparseMatrix eye(3, 3);
    for (int i = 0; i < 3; ++i) eye.add(i, i, 1.0);
    eye.finalize();
    Vector b(3);
    b << 1.0, -2.0, 0.5;
    CHECK((solve_spd(eye, b) - b).norm() == 0.0);

    SparseMatrix a(2, 2);
    a.add(0, 0, 2.0);
    a.add(0, 1, 1.0);
    a.add(1, 0, 1.0);
    a.add(1, 1, 2.0);
    a.finalize();
    Vector rhs(2);
    rhs << 3.0, 3.0;
    const Vector x = solve_spd(a, rhs);
    CHECK(std::abs(x[0] - 1.0) <= 1e-14);
    CHECK(std::abs(x[1] - 1.0) <= 1e-14);

    SparseMatrix indef(2, 2);
    indef.add(0, 0, 1.0);
    indef.add(1, 1, -1.0);
    indef.finalize();
    Vector c(2);
    c << 2.0, 3.0;
    CHECK_THROWS_AS(solve_spd(indef, c), SolveError);
    const Vector y = solve_symmetric(indef, c);
    CHECK(std::abs(y[0] - 2.0) <= 1e-14);
    CHECK(std::abs(y[1] + 3.0) <= 1e-14);

    SparseMatrix nonsym(2, 2);
    nonsym.add(0, 0, 1.0);
    nonsym.add(0, 1, 2.0);
    nonsym.add(1, 1, 1.0);
    nonsym.finalize();
    Vector d(2);
    d << 5.0, 1.0;
    const Vector z = solve_general(nonsym, d);
    CHECK(std::abs(z[0] - 3.0) <= 1e-14);
    CHECK(std::abs(z[1] - 1.0) <= 1e-14);

    CHECK_THROWS_AS(solve_spd(a, Vector::Zero(5)), InvalidArgument);
}

TEST_CASE("random SPD systems: solve then multiply returns b") {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 12;
        Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j <= i; ++j) l(i, j) = dist(rng);
        Eigen::MatrixXd dense = l * l.transpose() + Eigen::MatrixXd::Identity(n, n);
        SparseMatrix a(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) a.add(i, j, dense(i, j));
        a.finalize();
        Vector b(n);
        for (int i = 0; i < n; ++i) b[i] = dist(rng);
        const Vector x = solve_spd(a, b);
        CHECK(scaled_residual(a, x, b) <= 1e-12);

        const CgResult cg = solve_spd_cg(a, b);
        CHECK(cg.converged);
        CHECK((cg.x - x).norm() <= 1e-10 * (1.0 + x.norm()));
    }
}

TEST_CASE("Sigma_h mass solve residual on the n=4 mesh") {
    const Mesh mesh = build_structured_mesh(4);
    const LagrangeSpace space(mesh, 2);
    const MixedOperators ops = assemble_mixed_operators(space);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Vector b(space.n_dofs());
    for (Index i = 0; i < space.n_dofs(); ++i) b[i] = dist(rng);
    const Vector x = ops.mass->solve(b);
    CHECK(scaled_residual(ops.M, x, b) <= 1e-12);
    CHECK(ops.mass->last_residual() <= 1e-12);

    const CgResult cg = solve_spd_cg(ops.M, b);
    CHECK(cg.converged);
    CHECK(cg.relative_residual <= 1e-12);
}

TEST_CASE("matrix market export") {
    SparseMatrix a(2, 3);
    a.add(0, 0, 1.5);
    a.add(1, 2, -2.25);
    a.finalize();
    const std::string path = "mm_test.mtx";
    write_matrix_market(a, path);
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "%%MatrixMarket matrix coordinate real general");
    std::getline(in, line);
    CHECK(line == "2 3 2");
    std::getline(in, line);
    CHECK(line == "1 1 1.5");
    std::getline(in, line);
    CHECK(line == "2 3 -2.25");
}
