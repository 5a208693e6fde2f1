#include "core/problem.hpp"

#include <cmath>

#include "core/expression.hpp"

namespace ma2d {

Problem quadratic_problem() {
    Problem p;
    p.name = "quadratic";
    p.f = [](Vec2) { return 1.0; };
    p.g = [](Vec2 q) { return 0.5 * (q.x * q.x + q.y * q.y); };
    p.has_exact = true;
    p.exact_u = p.g;
    p.exact_grad = [](Vec2 q) { return Vec2{q.x, q.y}; };
    p.exact_hessian = [](Vec2) { return Sym2x2::identity(); };
    return p;
}

Problem exponential_problem() {
    Problem p;
    p.name = "exponential";
    p.f = [](Vec2 q) {
        const double r2 = q.x * q.x + q.y * q.y;
        return (1.0 + r2) * std::exp(r2);
    };
    p.g = [](Vec2 q) { return std::exp(0.5 * (q.x * q.x + q.y * q.y)); };
    p.has_exact = true;
    p.exact_u = p.g;
    p.exact_grad = [](Vec2 q) {
        const double e = std::exp(0.5 * (q.x * q.x + q.y * q.y));
        return Vec2{e * q.x, e * q.y};
    };
    p.exact_hessian = [](Vec2 q) {
        const double e = std::exp(0.5 * (q.x * q.x + q.y * q.y));
        return Sym2x2{e * (1.0 + q.x * q.x), e * q.x * q.y, e * (1.0 + q.y * q.y)};
    };
    return p;
}

Problem expression_problem(const std::string& f_text, const std::string& g_text) {
    Problem p;
    p.name = "expression";
    const Expression f = Expression::parse(f_text);
    const Expression g = Expression::parse(g_text);
    p.f = [f](Vec2 q) { return f.eval(q); };
    p.g = [g](Vec2 q) { return g.eval(q); };
    return p;
}

Problem problem_from_preset(const std::string& preset) {
    if (preset == "quadratic") return quadratic_problem();
    if (preset == "exponential") return exponential_problem();
    throw InvalidArgument("unknown problem preset '" + preset +
                          "' (available: quadratic, exponential)");
}

}  // namespace ma2d
