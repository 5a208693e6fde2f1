#ifndef MA2D_SPARSE_HPP
#define MA2D_SPARSE_HPP

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <memory>
#include <string>
#include <vector>

#include "core/types.hpp"

namespace ma2d {

using Vector = Eigen::VectorXd;

/// Compressed-row sparse matrix. Duplicate (row, col) contributions are
/// summed on finalize; entries are immutable afterwards.
class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(Eigen::Index rows, Eigen::Index cols) : rows_(rows), cols_(cols) {}

    void add(Eigen::Index row, Eigen::Index col, double value) {
        triplets_.emplace_back(row, col, value);
    }
    void finalize();
    bool finalized() const { return finalized_; }

    Eigen::Index rows() const { return rows_; }
    Eigen::Index cols() const { return cols_; }
    Eigen::Index nonzeros() const { return mat_.nonZeros(); }
    double coeff(Eigen::Index r, Eigen::Index c) const { return mat_.coeff(r, c); }

    Vector apply(const Vector& x) const { return mat_ * x; }
    Vector apply_transpose(const Vector& x) const { return mat_.transpose() * x; }

    /// Max |A - A^T| over stored entries.
    double symmetry_defect() const;
    /// Row-sum norm, used to scale solve residual checks.
    double norm_inf() const;

    const Eigen::SparseMatrix<double, Eigen::RowMajor>& eigen() const { return mat_; }

private:
    Eigen::Index rows_ = 0;
    Eigen::Index cols_ = 0;
    std::vector<Eigen::Triplet<double>> triplets_;
    Eigen::SparseMatrix<double, Eigen::RowMajor> mat_;
    bool finalized_ = false;
};

/// Matrix Market coordinate text export.
void write_matrix_market(const SparseMatrix& m, const std::string& path);

double scaled_residual(const SparseMatrix& a, const Vector& x, const Vector& b);

/// Reusable Cholesky factorization of an SPD matrix (keeps a copy for
/// residual checks). Construction throws SolveError if indefiniteness is
/// detected.
class SpdFactorization {
public:
    explicit SpdFactorization(SparseMatrix a);
    ~SpdFactorization();
    SpdFactorization(SpdFactorization&&) noexcept;
    SpdFactorization& operator=(SpdFactorization&&) noexcept;

    Vector solve(const Vector& b) const;
    /// Scaled residual of the last solve.
    double last_residual() const { return last_residual_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    SparseMatrix matrix_;
    mutable double last_residual_ = 0.0;
};

/// Reusable LU factorization for general (possibly nonsymmetric) systems.
class LuFactorization {
public:
    explicit LuFactorization(SparseMatrix a);
    ~LuFactorization();
    LuFactorization(LuFactorization&&) noexcept;
    LuFactorization& operator=(LuFactorization&&) noexcept;

    Vector solve(const Vector& b) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    SparseMatrix matrix_;
};

Vector solve_spd(const SparseMatrix& a, const Vector& b);
/// Symmetric indefinite path (sparse LDL^T).
Vector solve_symmetric(const SparseMatrix& a, const Vector& b);
Vector solve_general(const SparseMatrix& a, const Vector& b);

struct CgResult {
    Vector x;
    int iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
};

/// Jacobi-preconditioned conjugate gradients; converges at relative
/// residual 1e-12, capped at 10 * dimension iterations.
CgResult solve_spd_cg(const SparseMatrix& a, const Vector& b, double rel_tol = 1e-12);

}  // namespace ma2d

#endif
