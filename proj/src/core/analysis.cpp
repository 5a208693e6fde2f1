#include "core/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

namespace ma2d {

namespace {

constexpr double kRateFloor = 1e-14;

int default_exactness(const LagrangeSpace& space, int requested) {
    return requested > 0 ? requested : 2 * space.degree() + 6;
}

struct ElementAccumulator {
    double l2 = 0.0;
    double h1semi = 0.0;
    double h2semi = 0.0;
    double linf = 0.0;
};

ElementAccumulator accumulate_scalar(const ScalarField& field, const ExactScalar& exact,
                                     int quad_exactness, bool need_grad, bool need_hess) {
    const LagrangeSpace& space = *field.space;
    const Mesh& mesh = space.mesh();
    const QuadratureRule rule = triangle_quadrature(quad_exactness);
    const TabulatedBasis tab = tabulate(space.basis(), rule.points, need_grad, need_hess);
    const int nloc = space.dofs_per_cell();

    ElementAccumulator acc;
    for (Index t = 0; t < mesh.n_triangles(); ++t) {
        const ElementMap map(mesh, t);
        const double area = mesh.triangles[static_cast<size_t>(t)].area;
        const auto& dofs = space.cell_dofs(t);
        for (size_t q = 0; q < rule.points.size(); ++q) {
            const double w = area * rule.weights[q];
            const Vec2 p = map.to_physical(rule.points[q]);
            double v = 0.0;
            Vec2 ref_grad{0.0, 0.0};
            Sym2x2 ref_hess;
            for (int i = 0; i < nloc; ++i) {
                const double c = field.coeffs[dofs[static_cast<size_t>(i)]];
                v += c * tab.values[q][static_cast<size_t>(i)];
                if (need_grad) {
                    ref_grad.x += c * tab.ref_grads[q][static_cast<size_t>(i)].x;
                    ref_grad.y += c * tab.ref_grads[q][static_cast<size_t>(i)].y;
                }
                if (need_hess) ref_hess = ref_hess + c * tab.ref_hessians[q][static_cast<size_t>(i)];
            }
            const double ev = v - exact.value(p);
            acc.l2 += w * ev * ev;
            acc.linf = std::max(acc.linf, std::abs(ev));
            if (need_grad) {
                const Vec2 eg = map.grad(ref_grad) - exact.gradient(p);
                acc.h1semi += w * eg.dot(eg);
            }
            if (need_hess) {
                const Sym2x2 eh = map.hess(ref_hess) - exact.hessian(p);
                acc.h2semi += w * frobenius(eh, eh);
            }
        }
    }
    if (!need_grad && !need_hess) {
        // refine the sup estimate with the nodal values
        for (Index d = 0; d < space.n_dofs(); ++d)
            acc.linf = std::max(acc.linf,
                                std::abs(field.coeffs[d] - exact.value(space.dof_coordinate(d))));
    }
    return acc;
}

}  // namespace

NormType parse_norm(const std::string& name) {
    if (name == "L2") return NormType::L2;
    if (name == "H1semi") return NormType::H1semi;
    if (name == "H1") return NormType::H1;
    if (name == "Linf") return NormType::Linf;
    if (name == "brokenHk") return NormType::BrokenHk;
    throw InvalidArgument("unknown norm tag '" + name +
                          "' (available: L2, H1semi, H1, Linf, brokenHk)");
}

ExactScalar ExactScalar::zero() {
    ExactScalar e;
    e.value = [](Vec2) { return 0.0; };
    e.gradient = [](Vec2) { return Vec2{0.0, 0.0}; };
    e.hessian = [](Vec2) { return Sym2x2{}; };
    return e;
}

double error_norm(const ScalarField& field, const ExactScalar& exact, NormType norm,
                  int quad_exactness) {
    if (!field.space) throw InvalidArgument("error_norm: empty field");
    const int exactness = default_exactness(*field.space, quad_exactness);
    switch (norm) {
        case NormType::L2: {
            const auto acc = accumulate_scalar(field, exact, exactness, false, false);
            return std::sqrt(acc.l2);
        }
        case NormType::H1semi: {
            const auto acc = accumulate_scalar(field, exact, exactness, true, false);
            return std::sqrt(acc.h1semi);
        }
        case NormType::H1: {
            const auto acc = accumulate_scalar(field, exact, exactness, true, false);
            return std::sqrt(acc.l2 + acc.h1semi);
        }
        case NormType::Linf: {
            const auto acc = accumulate_scalar(field, exact, exactness, false, false);
            return acc.linf;
        }
        case NormType::BrokenHk: {
            if (field.space->degree() > 2)
                throw InvalidArgument("brokenHk norm implemented for k <= 2");
            const auto acc = accumulate_scalar(field, exact, exactness, true, true);
            return std::sqrt(acc.l2 + acc.h1semi + acc.h2semi);
        }
    }
    throw InvalidArgument("error_norm: unknown norm");
}

double field_norm(const ScalarField& field, NormType norm, int quad_exactness) {
    return error_norm(field, ExactScalar::zero(), norm, quad_exactness);
}

double scalar_distance(const ScalarField& a, const ScalarField& b, NormType norm,
                       int quad_exactness) {
    if (a.space != b.space) throw InvalidArgument("scalar_distance: fields on different spaces");
    ScalarField diff(*a.space);
    diff.coeffs = a.coeffs - b.coeffs;
    return field_norm(diff, norm, quad_exactness);
}

double matrix_error_l2(const MatrixField& field, const MatrixFunc& exact, int quad_exactness) {
    const LagrangeSpace& space = *field.space;
    const Mesh& mesh = space.mesh();
    const QuadratureRule rule = triangle_quadrature(default_exactness(space, quad_exactness));
    const TabulatedBasis tab = tabulate(space.basis(), rule.points, false);
    const int nloc = space.dofs_per_cell();
    double sum = 0.0;
    for (Index t = 0; t < mesh.n_triangles(); ++t) {
        const ElementMap map(mesh, t);
        const double area = mesh.triangles[static_cast<size_t>(t)].area;
        const auto& dofs = space.cell_dofs(t);
        for (size_t q = 0; q < rule.points.size(); ++q) {
            Sym2x2 v;
            for (int i = 0; i < nloc; ++i) {
                const Index d = dofs[static_cast<size_t>(i)];
                const double c = tab.values[q][static_cast<size_t>(i)];
                v.a11 += field.c11[d] * c;
                v.a12 += field.c12[d] * c;
                v.a22 += field.c22[d] * c;
            }
            const Sym2x2 e = v - exact(map.to_physical(rule.points[q]));
            sum += area * rule.weights[q] * frobenius(e, e);
        }
    }
    return std::sqrt(sum);
}

double matrix_distance_l2(const MatrixField& a, const MatrixField& b, int quad_exactness) {
    if (a.space != b.space) throw InvalidArgument("matrix_distance: fields on different spaces");
    MatrixField diff(*a.space);
    diff.c11 = a.c11 - b.c11;
    diff.c12 = a.c12 - b.c12;
    diff.c22 = a.c22 - b.c22;
    return matrix_error_l2(diff, [](Vec2) { return Sym2x2{}; }, quad_exactness);
}

double matrix_distance_broken_h1(const MatrixField& a, const MatrixField& b, int quad_exactness) {
    if (a.space != b.space) throw InvalidArgument("matrix_distance: fields on different spaces");
    const LagrangeSpace& space = *a.space;
    double sum = 0.0;
    for (const Eigen::VectorXd* comp : {&a.c11, &a.c12, &a.c22}) {
        const Eigen::VectorXd* other = comp == &a.c11 ? &b.c11 : (comp == &a.c12 ? &b.c12 : &b.c22);
        ScalarField diff(space);
        diff.coeffs = *comp - *other;
        const double h1 = field_norm(diff, NormType::H1, quad_exactness);
        const double weight = comp == &a.c12 ? 2.0 : 1.0;  // Frobenius weighting
        sum += weight * h1 * h1;
    }
    return std::sqrt(sum);
}

RateInfo observed_rate(const std::vector<double>& errors, const std::vector<double>& hs) {
    if (errors.size() != hs.size() || errors.size() < 2)
        throw InvalidArgument("observed_rate: need matching error/h lists with >= 2 entries");
    for (size_t i = 0; i + 1 < hs.size(); ++i)
        if (!(hs[i] > hs[i + 1]))
            throw InvalidArgument("observed_rate: h values must be strictly decreasing");

    RateInfo info;
    info.at_floor.resize(errors.size());
    for (size_t i = 0; i < errors.size(); ++i) info.at_floor[i] = !(errors[i] > kRateFloor);

    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (size_t i = 0; i + 1 < errors.size(); ++i) {
        if (info.at_floor[i] || info.at_floor[i + 1])
            info.pair_rates.push_back(nan);
        else
            info.pair_rates.push_back(std::log(errors[i] / errors[i + 1]) /
                                      std::log(hs[i] / hs[i + 1]));
    }

    // least-squares slope in log-log over the usable levels
    double slh = 0.0, sle = 0.0;
    int m = 0;
    for (size_t i = 0; i < errors.size(); ++i) {
        if (info.at_floor[i]) continue;
        slh += std::log(hs[i]);
        sle += std::log(errors[i]);
        ++m;
    }
    info.fit_points = m;
    if (m >= 2) {
        const double mlh = slh / m, mle = sle / m;
        double num = 0.0, den = 0.0;
        for (size_t i = 0; i < errors.size(); ++i) {
            if (info.at_floor[i]) continue;
            num += (std::log(hs[i]) - mlh) * (std::log(errors[i]) - mle);
            den += (std::log(hs[i]) - mlh) * (std::log(hs[i]) - mlh);
        }
        info.fit = num / den;
    } else {
        info.fit = nan;
    }
    return info;
}

namespace {

LevelRecord run_level(const Problem& problem, Index n, int degree, const SolverConfig& config,
                      const Logger* logger) {
    const auto t0 = std::chrono::steady_clock::now();
    const Mesh mesh = build_structured_mesh(n);
    const LagrangeSpace space(mesh, degree);
    const MixedOperators ops = assemble_mixed_operators(space);
    const SolveResult result = solve(problem, space, ops, config, logger);

    LevelRecord rec;
    rec.n = n;
    rec.h = mesh.h;
    rec.dofs_u = space.n_dofs();
    rec.dofs_sigma = 3 * space.n_dofs();
    rec.iterations = result.iterations;
    rec.converged = result.converged;

    const ScalarField ihu = interpolate(problem.exact_u, space);
    const MatrixField ihs = interpolate_matrix(problem.exact_hessian, space);
    rec.err_u_ihu_h1 = scalar_distance(result.u, ihu, NormType::H1);
    ExactScalar exact;
    exact.value = problem.exact_u;
    exact.gradient = problem.exact_grad;
    exact.hessian = problem.exact_hessian;
    rec.err_u_l2 = error_norm(result.u, exact, NormType::L2);
    rec.err_sigma_ihsigma_l2 = matrix_distance_l2(result.sigma, ihs);
    rec.err_sigma_l2 = matrix_error_l2(result.sigma, problem.exact_hessian);
    rec.err_sigma_ihsigma_broken_h1 = matrix_distance_broken_h1(result.sigma, ihs);
    rec.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

std::vector<double> error_column(const ConvergenceReport& report, size_t which) {
    std::vector<double> out;
    for (const auto& rec : report.levels) {
        switch (which) {
            case 0: out.push_back(rec.err_u_ihu_h1); break;
            case 1: out.push_back(rec.err_u_l2); break;
            case 2: out.push_back(rec.err_sigma_ihsigma_l2); break;
            case 3: out.push_back(rec.err_sigma_l2); break;
            case 4: out.push_back(rec.err_sigma_ihsigma_broken_h1); break;
        }
    }
    return out;
}

}  // namespace

ConvergenceReport run_convergence_study(const Problem& problem, const StudyOptions& options,
                                        const SolverConfig& config, const Logger* logger) {
    if (!problem.has_exact)
        throw InvalidArgument("run_convergence_study: the problem must carry an exact solution");
    if (options.levels < 1) throw InvalidArgument("run_convergence_study: levels must be >= 1");
    if (options.base_n < 1) throw InvalidArgument("run_convergence_study: base n must be >= 1");
    config.validate();

    ConvergenceReport report;
    report.problem = problem.name;
    report.degree = options.degree;
    report.method = config.method == Method::time_marching ? "time_marching" : "newton";
    report.levels.resize(static_cast<size_t>(options.levels));

    std::vector<Index> ns(static_cast<size_t>(options.levels));
    for (int l = 0; l < options.levels; ++l) ns[static_cast<size_t>(l)] = options.base_n << l;

    const int threads = std::max(1, options.threads);
    if (threads == 1) {
        for (int l = 0; l < options.levels; ++l) {
            if (logger)
                logger->info("study level " + std::to_string(l) + ": n=" +
                             std::to_string(ns[static_cast<size_t>(l)]));
            report.levels[static_cast<size_t>(l)] =
                run_level(problem, ns[static_cast<size_t>(l)], options.degree, config, logger);
            if (!report.levels[static_cast<size_t>(l)].converged) break;
        }
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        std::exception_ptr first_error;
        std::mutex error_mutex;
        const int nthreads = std::min(threads, options.levels);
        for (int w = 0; w < nthreads; ++w)
            pool.emplace_back([&]() {
                while (true) {
                    const int l = next.fetch_add(1);
                    if (l >= options.levels) return;
                    try {
                        report.levels[static_cast<size_t>(l)] = run_level(
                            problem, ns[static_cast<size_t>(l)], options.degree, config, nullptr);
                    } catch (...) {
                        const std::lock_guard<std::mutex> lock(error_mutex);
                        if (!first_error) first_error = std::current_exception();
                    }
                }
            });
        for (auto& th : pool) th.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    // truncate at the first failing level; the failing record stays
    size_t kept = 0;
    bool failed = false;
    for (size_t l = 0; l < report.levels.size(); ++l) {
        if (report.levels[l].n == 0) break;  // never ran (sequential early stop)
        kept = l + 1;
        if (!report.levels[l].converged) {
            failed = true;
            break;
        }
    }
    report.levels.resize(kept);
    report.complete = !failed && kept == static_cast<size_t>(options.levels);
    if (failed)
        report.message = "level n=" + std::to_string(report.levels.back().n) +
                         " did not converge; study aborted";

    if (report.levels.size() >= 2) {
        std::vector<double> hs;
        for (const auto& rec : report.levels) hs.push_back(rec.h);
        for (size_t c = 0; c < report_error_names().size(); ++c)
            report.rates.push_back(observed_rate(error_column(report, c), hs));
    }
    return report;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string report_to_csv(const ConvergenceReport& report) {
    std::string out = "n,h,dofs_u,dofs_sigma,iterations";
    for (const auto& name : report_error_names()) out += "," + name;
    for (const auto& name : report_error_names()) {
        std::string rate_name = name;
        rate_name.replace(0, 3, "rate");
        out += "," + rate_name;
    }
    out += "\n";
    for (size_t l = 0; l < report.levels.size(); ++l) {
        const auto& rec = report.levels[l];
        out += std::to_string(rec.n) + "," + format_double(rec.h) + "," +
               std::to_string(rec.dofs_u) + "," + std::to_string(rec.dofs_sigma) + "," +
               std::to_string(rec.iterations);
        const double errs[5] = {rec.err_u_ihu_h1, rec.err_u_l2, rec.err_sigma_ihsigma_l2,
                                rec.err_sigma_l2, rec.err_sigma_ihsigma_broken_h1};
        for (double e : errs) out += "," + format_double(e);
        for (size_t c = 0; c < report_error_names().size(); ++c) {
            out += ",";
            if (l == 0 || report.rates.empty()) continue;
            if (report.rates[c].at_floor[l] || report.rates[c].at_floor[l - 1])
                out += "floor";
            else
                out += format_double(report.rates[c].pair_rates[l - 1]);
        }
        out += "\n";
    }
    return out;
}

std::string report_to_json(const ConvergenceReport& report) {
    nlohmann::json j;
    j["problem"] = report.problem;
    j["degree"] = report.degree;
    j["method"] = report.method;
    j["complete"] = report.complete;
    if (!report.message.empty()) j["message"] = report.message;
    j["levels"] = nlohmann::json::array();
    for (const auto& rec : report.levels) {
        nlohmann::json r;
        r["n"] = rec.n;
        r["h"] = rec.h;
        r["dofs_u"] = rec.dofs_u;
        r["dofs_sigma"] = rec.dofs_sigma;
        r["iterations"] = rec.iterations;
        r["converged"] = rec.converged;
        r["wall_time_s"] = rec.wall_time_s;
        r["errors"] = {{"err_u_vs_Ihu_H1", rec.err_u_ihu_h1},
                       {"err_u_L2", rec.err_u_l2},
                       {"err_sigma_vs_Ihsigma_L2", rec.err_sigma_ihsigma_l2},
                       {"err_sigma_L2", rec.err_sigma_l2},
                       {"err_sigma_vs_Ihsigma_brokenH1", rec.err_sigma_ihsigma_broken_h1}};
        j["levels"].push_back(r);
    }
    if (!report.rates.empty()) {
        nlohmann::json rates;
        for (size_t c = 0; c < report_error_names().size(); ++c) {
            nlohmann::json ri;
            ri["fit"] = std::isnan(report.rates[c].fit) ? nlohmann::json(nullptr)
                                                        : nlohmann::json(report.rates[c].fit);
            ri["fit_points"] = report.rates[c].fit_points;
            ri["pairs"] = nlohmann::json::array();
            for (double p : report.rates[c].pair_rates)
                ri["pairs"].push_back(std::isnan(p) ? nlohmann::json(nullptr) : nlohmann::json(p));
            rates[report_error_names()[c]] = ri;
        }
        j["fit_rates"] = rates;
    }
    return j.dump(2) + "\n";
}

}  // namespace ma2d
