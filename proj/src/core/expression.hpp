#ifndef MA2D_EXPRESSION_HPP
#define MA2D_EXPRESSION_HPP

#include <memory>
#include <string>

#include "core/types.hpp"

namespace ma2d {

/// Arithmetic expression in the variables x and y. Grammar:
/// +, -, *, /, ^ (right associative), exp(...), sqrt(...), parentheses,
/// numeric literals. Parse errors throw InvalidArgument naming the
/// offending position.
class Expression {
public:
    static Expression parse(const std::string& text);

    double eval(Vec2 p) const;
    const std::string& text() const { return text_; }

    Expression(Expression&&) noexcept;
    Expression& operator=(Expression&&) noexcept;
    Expression(const Expression&);
    Expression& operator=(const Expression&);
    ~Expression();

    struct Node;

private:
    Expression();
    std::unique_ptr<Node> root_;
    std::string text_;
};

}  // namespace ma2d

#endif
