#ifndef MA2D_ANALYSIS_HPP
#define MA2D_ANALYSIS_HPP

#include <string>
#include <vector>

#include "core/solver.hpp"

namespace ma2d {

enum class NormType { L2, H1semi, H1, Linf, BrokenHk };

NormType parse_norm(const std::string& name);

/// Exact comparison function with the derivatives the chosen norm needs.
struct ExactScalar {
    ScalarFunc value;
    VectorFunc gradient;  // H1semi, H1, BrokenHk
    MatrixFunc hessian;   // BrokenHk

    static ExactScalar zero();
};

/// ||field - exact|| in the requested norm. quad_exactness 0 selects the
/// default 2k+6 (above assembly exactness, so measured errors are not
/// polluted by integration error). BrokenHk is the element-wise Sobolev
/// norm of order k; implemented for k <= 2.
double error_norm(const ScalarField& field, const ExactScalar& exact, NormType norm,
                  int quad_exactness = 0);

double field_norm(const ScalarField& field, NormType norm, int quad_exactness = 0);

/// Frobenius-weighted L2 distance to an exact matrix function.
double matrix_error_l2(const MatrixField& field, const MatrixFunc& exact,
                       int quad_exactness = 0);

/// Component-wise broken H1 distance between two fields on one space.
double matrix_distance_broken_h1(const MatrixField& a, const MatrixField& b,
                                 int quad_exactness = 0);
double matrix_distance_l2(const MatrixField& a, const MatrixField& b, int quad_exactness = 0);
double scalar_distance(const ScalarField& a, const ScalarField& b, NormType norm,
                       int quad_exactness = 0);

/// Observed convergence rates. Errors at or below the 1e-14 floor are
/// excluded from rates and flagged.
struct RateInfo {
    std::vector<double> pair_rates;  // NaN where either level is at floor
    std::vector<bool> at_floor;      // one per level
    double fit = 0.0;                // least-squares slope in log-log
    int fit_points = 0;              // levels entering the fit (NaN fit if < 2)
};

RateInfo observed_rate(const std::vector<double>& errors, const std::vector<double>& hs);

struct LevelRecord {
    Index n = 0;
    double h = 0.0;
    Index dofs_u = 0;
    Index dofs_sigma = 0;
    int iterations = 0;
    double err_u_ihu_h1 = 0.0;        // ||u_h - I_h u||_{H1}
    double err_u_l2 = 0.0;            // ||u_h - u||_{L2}
    double err_sigma_ihsigma_l2 = 0.0;
    double err_sigma_l2 = 0.0;
    double err_sigma_ihsigma_broken_h1 = 0.0;
    double wall_time_s = 0.0;
    bool converged = false;
};

/// Fixed column order of the error entries in reports and CSV.
inline const std::vector<std::string>& report_error_names() {
    static const std::vector<std::string> names = {
        "err_u_vs_Ihu_H1", "err_u_L2", "err_sigma_vs_Ihsigma_L2", "err_sigma_L2",
        "err_sigma_vs_Ihsigma_brokenH1"};
    return names;
}

struct ConvergenceReport {
    std::string problem;
    int degree = 2;
    std::string method;
    std::vector<LevelRecord> levels;
    std::vector<RateInfo> rates;  // one per report_error_names() entry
    bool complete = false;
    std::string message;
};

struct StudyOptions {
    Index base_n = 8;
    int levels = 4;
    int degree = 2;
    int threads = 1;
};

/// One solve per level on the meshes n, 2n, 4n, ...; requires an exact
/// solution. A level that fails to converge truncates the study to a
/// partial report (complete = false).
ConvergenceReport run_convergence_study(const Problem& problem, const StudyOptions& options,
                                        const SolverConfig& config, const Logger* logger = nullptr);

/// Deterministic CSV: one row per level, rate columns between consecutive
/// levels. Wall time is reported in the JSON form only.
std::string report_to_csv(const ConvergenceReport& report);
std::string report_to_json(const ConvergenceReport& report);

/// Shortest round-trip decimal representation (used by all text artifacts).
std::string format_double(double v);

}  // namespace ma2d

#endif
