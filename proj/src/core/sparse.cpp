#include "core/sparse.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <charconv>
#include <cmath>
#include <fstream>

namespace ma2d {

namespace {
constexpr double kSolveTolerance = 1e-12;

void check_dims(const SparseMatrix& a, const Vector& b) {
    if (a.rows() != a.cols()) throw InvalidArgument("solve: matrix is not square");
    if (a.rows() != b.size()) throw InvalidArgument("solve: dimension mismatch");
}

void check_residual(const SparseMatrix& a, const Vector& x, const Vector& b, const char* what) {
    const double r = scaled_residual(a, x, b);
    if (!(r <= kSolveTolerance))
        throw SolveError(std::string(what) + ": residual " + std::to_string(r) +
                         " above tolerance");
}
}  // namespace

void SparseMatrix::finalize() {
    mat_.resize(rows_, cols_);
    mat_.setFromTriplets(triplets_.begin(), triplets_.end());
    mat_.makeCompressed();
    triplets_.clear();
    triplets_.shrink_to_fit();
    finalized_ = true;
}

double SparseMatrix::symmetry_defect() const {
    Eigen::SparseMatrix<double, Eigen::RowMajor> d = mat_ - Eigen::SparseMatrix<double, Eigen::RowMajor>(mat_.transpose());
    double worst = 0.0;
    for (int k = 0; k < d.outerSize(); ++k)
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(d, k); it; ++it)
            worst = std::max(worst, std::abs(it.value()));
    return worst;
}

double SparseMatrix::norm_inf() const {
    double worst = 0.0;
    for (int k = 0; k < mat_.outerSize(); ++k) {
        double row = 0.0;
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(mat_, k); it; ++it)
            row += std::abs(it.value());
        worst = std::max(worst, row);
    }
    return worst;
}

void write_matrix_market(const SparseMatrix& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path);
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << m.rows() << " " << m.cols() << " " << m.nonzeros() << "\n";
    const auto& a = m.eigen();
    char buf[64];
    for (int k = 0; k < a.outerSize(); ++k)
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(a, k); it; ++it) {
            const auto res = std::to_chars(buf, buf + sizeof(buf), it.value());
            out << (it.row() + 1) << " " << (it.col() + 1) << " "
                << std::string_view(buf, res.ptr) << "\n";
        }
    if (!out) throw IoError("write failed for " + path);
}

double scaled_residual(const SparseMatrix& a, const Vector& x, const Vector& b) {
    const double num = (a.apply(x) - b).norm();
    const double den = b.norm() + a.norm_inf() * x.norm();
    return den > 0.0 ? num / den : num;
}

struct SpdFactorization::Impl {
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt;
};

SpdFactorization::SpdFactorization(SparseMatrix a)
    : impl_(std::make_unique<Impl>()), matrix_(std::move(a)) {
    if (matrix_.rows() != matrix_.cols())
        throw InvalidArgument("SpdFactorization: matrix is not square");
    Eigen::SparseMatrix<double> col = matrix_.eigen();
    impl_->llt.compute(col);
    if (impl_->llt.info() != Eigen::Success)
        throw SolveError("SpdFactorization: matrix is not positive definite");
}

SpdFactorization::~SpdFactorization() = default;
SpdFactorization::SpdFactorization(SpdFactorization&&) noexcept = default;
SpdFactorization& SpdFactorization::operator=(SpdFactorization&&) noexcept = default;

Vector SpdFactorization::solve(const Vector& b) const {
    if (b.size() != matrix_.rows()) throw InvalidArgument("solve: dimension mismatch");
    Vector x = impl_->llt.solve(b);
    last_residual_ = scaled_residual(matrix_, x, b);
    if (!(last_residual_ <= kSolveTolerance))
        throw SolveError("spd solve: residual " + std::to_string(last_residual_) +
                         " above tolerance");
    return x;
}

struct LuFactorization::Impl {
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
};

LuFactorization::LuFactorization(SparseMatrix a)
    : impl_(std::make_unique<Impl>()), matrix_(std::move(a)) {
    if (matrix_.rows() != matrix_.cols())
        throw InvalidArgument("LuFactorization: matrix is not square");
    Eigen::SparseMatrix<double> col = matrix_.eigen();
    impl_->lu.compute(col);
    if (impl_->lu.info() != Eigen::Success)
        throw SolveError("LuFactorization: factorization failed (singular matrix?)");
}

LuFactorization::~LuFactorization() = default;
LuFactorization::LuFactorization(LuFactorization&&) noexcept = default;
LuFactorization& LuFactorization::operator=(LuFactorization&&) noexcept = default;

Vector LuFactorization::solve(const Vector& b) const {
    if (b.size() != matrix_.rows()) throw InvalidArgument("solve: dimension mismatch");
    Vector x = impl_->lu.solve(b);
    check_residual(matrix_, x, b, "lu solve");
    return x;
}

Vector solve_spd(const SparseMatrix& a, const Vector& b) {
    check_dims(a, b);
    return SpdFactorization(a).solve(b);
}

Vector solve_symmetric(const SparseMatrix& a, const Vector& b) {
    check_dims(a, b);
    Eigen::SparseMatrix<double> col = a.eigen();
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(col);
    if (ldlt.info() != Eigen::Success)
        throw SolveError("symmetric solve: factorization failed");
    Vector x = ldlt.solve(b);
    check_residual(a, x, b, "symmetric solve");
    return x;
}

Vector solve_general(const SparseMatrix& a, const Vector& b) {
    check_dims(a, b);
    return LuFactorization(a).solve(b);
}

CgResult solve_spd_cg(const SparseMatrix& a, const Vector& b, double rel_tol) {
    check_dims(a, b);
    const Eigen::Index n = a.rows();
    Vector diag(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double d = a.coeff(i, i);
        if (d <= 0.0) throw SolveError("cg: nonpositive diagonal entry (matrix not SPD?)");
        diag[i] = d;
    }
    CgResult res;
    res.x = Vector::Zero(n);
    Vector r = b;
    const double bnorm = b.norm();
    if (bnorm == 0.0) {
        res.converged = true;
        return res;
    }
    Vector z = r.cwiseQuotient(diag);
    Vector p = z;
    double rz = r.dot(z);
    const int max_iterations = static_cast<int>(10 * n);
    for (int it = 0; it < max_iterations; ++it) {
        const Vector ap = a.apply(p);
        const double pap = p.dot(ap);
        if (pap <= 0.0) throw SolveError("cg: breakdown, matrix not SPD");
        const double alpha = rz / pap;
        res.x += alpha * p;
        r -= alpha * ap;
        res.iterations = it + 1;
        res.relative_residual = r.norm() / bnorm;
        if (res.relative_residual <= rel_tol) {
            res.converged = true;
            return res;
        }
        z = r.cwiseQuotient(diag);
        const double rz_next = r.dot(z);
        p = z + (rz_next / rz) * p;
        rz = rz_next;
    }
    return res;
}

}  // namespace ma2d
