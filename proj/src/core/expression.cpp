#include "core/expression.hpp"

#include <cctype>
#include <cmath>
#include <charconv>

namespace ma2d {

struct Expression::Node {
    enum class Kind { number, var_x, var_y, add, sub, mul, div, pow, neg, exp_fn, sqrt_fn };
    Kind kind;
    double value = 0.0;
    std::unique_ptr<Node> lhs, rhs;

    std::unique_ptr<Node> clone() const {
        auto n = std::make_unique<Node>();
        n->kind = kind;
        n->value = value;
        if (lhs) n->lhs = lhs->clone();
        if (rhs) n->rhs = rhs->clone();
        return n;
    }

    double eval(double x, double y) const {
        switch (kind) {
            case Kind::number: return value;
            case Kind::var_x: return x;
            case Kind::var_y: return y;
            case Kind::add: return lhs->eval(x, y) + rhs->eval(x, y);
            case Kind::sub: return lhs->eval(x, y) - rhs->eval(x, y);
            case Kind::mul: return lhs->eval(x, y) * rhs->eval(x, y);
            case Kind::div: return lhs->eval(x, y) / rhs->eval(x, y);
            case Kind::pow: return std::pow(lhs->eval(x, y), rhs->eval(x, y));
            case Kind::neg: return -lhs->eval(x, y);
            case Kind::exp_fn: return std::exp(lhs->eval(x, y));
            case Kind::sqrt_fn: return std::sqrt(lhs->eval(x, y));
        }
        return 0.0;
    }
};

namespace {

using Node = Expression::Node;
using NodePtr = std::unique_ptr<Node>;

class Parser {
public:
    explicit Parser(const std::string& text) : text_(text) {}

    NodePtr run() {
        NodePtr n = expr();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return n;
    }

private:
    const std::string& text_;
    size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw InvalidArgument("expression error at position " + std::to_string(pos_) + ": " +
                              what + " in '" + text_ + "'");
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool consume(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_space();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    static NodePtr make(Node::Kind k, NodePtr l = nullptr, NodePtr r = nullptr) {
        auto n = std::make_unique<Node>();
        n->kind = k;
        n->lhs = std::move(l);
        n->rhs = std::move(r);
        return n;
    }

    NodePtr expr() {
        NodePtr n = term();
        while (true) {
            if (consume('+'))
                n = make(Node::Kind::add, std::move(n), term());
            else if (consume('-'))
                n = make(Node::Kind::sub, std::move(n), term());
            else
                return n;
        }
    }

    NodePtr term() {
        NodePtr n = unary();
        while (true) {
            if (consume('*'))
                n = make(Node::Kind::mul, std::move(n), unary());
            else if (consume('/'))
                n = make(Node::Kind::div, std::move(n), unary());
            else
                return n;
        }
    }

    NodePtr unary() {
        if (consume('-')) return make(Node::Kind::neg, unary());
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        if (consume('^')) return make(Node::Kind::pow, std::move(base), unary());
        return base;
    }

    NodePtr primary() {
        skip_space();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr n = expr();
            if (!consume(')')) fail("missing ')'");
            return n;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
        fail("unexpected character");
    }

    NodePtr number() {
        double value = 0.0;
        const char* begin = text_.data() + pos_;
        const char* end = text_.data() + text_.size();
        const auto res = std::from_chars(begin, end, value);
        if (res.ec != std::errc{}) fail("malformed number");
        pos_ += static_cast<size_t>(res.ptr - begin);
        auto n = make(Node::Kind::number);
        n->value = value;
        return n;
    }

    NodePtr identifier() {
        const size_t start = pos_;
        while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        const std::string name = text_.substr(start, pos_ - start);
        if (name == "x") return make(Node::Kind::var_x);
        if (name == "y") return make(Node::Kind::var_y);
        if (name == "exp" || name == "sqrt") {
            if (!consume('(')) fail("expected '(' after " + name);
            NodePtr arg = expr();
            if (!consume(')')) fail("missing ')'");
            return make(name == "exp" ? Node::Kind::exp_fn : Node::Kind::sqrt_fn, std::move(arg));
        }
        pos_ = start;
        fail("unknown identifier '" + name + "'");
    }
};

}  // namespace

Expression::Expression() = default;
Expression::Expression(Expression&&) noexcept = default;
Expression& Expression::operator=(Expression&&) noexcept = default;
Expression::~Expression() = default;

Expression::Expression(const Expression& o) : text_(o.text_) {
    if (o.root_) root_ = o.root_->clone();
}

Expression& Expression::operator=(const Expression& o) {
    if (this != &o) {
        text_ = o.text_;
        root_ = o.root_ ? o.root_->clone() : nullptr;
    }
    return *this;
}

Expression Expression::parse(const std::string& text) {
    Expression e;
    e.text_ = text;
    e.root_ = Parser(text).run();
    return e;
}

double Expression::eval(Vec2 p) const { return root_->eval(p.x, p.y); }

}  // namespace ma2d
