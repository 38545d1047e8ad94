#include "fastreact/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <vector>

#include "fastreact/error.hpp"

namespace fastreact {

struct Expression::Node {
    enum class Kind { Number, VarX, VarY, Neg, Add, Sub, Mul, Div, Pow, Cos, Sin, Exp };
    Kind kind = Kind::Number;
    double value = 0.0;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Kind = Expression::Node::Kind;

NodePtr make(Kind kind, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
    auto n = std::make_shared<Expression::Node>();
    n->kind = kind;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
}

NodePtr number(double v) {
    auto n = std::make_shared<Expression::Node>();
    n->value = v;
    return n;
}

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    NodePtr parse() {
        auto e = expr();
        skip_ws();
        if (pos_ != src_.size()) fail("unexpected trailing input");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError("expression '" + std::string(src_) + "': " + what + " at column " +
                          std::to_string(pos_ + 1));
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expr() {
        auto lhs = term();
        for (;;) {
            if (accept('+')) lhs = make(Kind::Add, lhs, term());
            else if (accept('-')) lhs = make(Kind::Sub, lhs, term());
            else return lhs;
        }
    }

    NodePtr term() {
        auto lhs = unary();
        for (;;) {
            if (accept('*')) lhs = make(Kind::Mul, lhs, unary());
            else if (accept('/')) lhs = make(Kind::Div, lhs, unary());
            else return lhs;
        }
    }

    NodePtr unary() {
        if (accept('-')) return make(Kind::Neg, unary());
        if (accept('+')) return unary();
        return power();
    }

    NodePtr power() {
        auto base = primary();
        if (accept('^')) return make(Kind::Pow, base, unary());
        return base;
    }

    NodePtr primary() {
        skip_ws();
        if (pos_ >= src_.size()) fail("unexpected end of input");
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            auto e = expr();
            if (!accept(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return literal();
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            const std::string_view name = src_.substr(start, pos_ - start);
            if (name == "x") return make(Kind::VarX);
            if (name == "y") return make(Kind::VarY);
            if (name == "pi") return number(std::numbers::pi);
            Kind fn;
            if (name == "cos") fn = Kind::Cos;
            else if (name == "sin") fn = Kind::Sin;
            else if (name == "exp") fn = Kind::Exp;
            else {
                pos_ = start;
                fail("unknown identifier '" + std::string(name) + "'");
            }
            if (!accept('(')) fail("expected '(' after function name");
            auto arg = expr();
            if (!accept(')')) fail("expected ')'");
            return make(fn, arg);
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    NodePtr literal() {
        double v = 0.0;
        const char* first = src_.data() + pos_;
        const char* last = src_.data() + src_.size();
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc{}) fail("malformed number");
        pos_ += static_cast<std::size_t>(ptr - first);
        return number(v);
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

double eval(const Expression::Node& n, double x, double y) {
    switch (n.kind) {
        case Kind::Number: return n.value;
        case Kind::VarX: return x;
        case Kind::VarY: return y;
        case Kind::Neg: return -eval(*n.lhs, x, y);
        case Kind::Add: return eval(*n.lhs, x, y) + eval(*n.rhs, x, y);
        case Kind::Sub: return eval(*n.lhs, x, y) - eval(*n.rhs, x, y);
        case Kind::Mul: return eval(*n.lhs, x, y) * eval(*n.rhs, x, y);
        case Kind::Div: return eval(*n.lhs, x, y) / eval(*n.rhs, x, y);
        case Kind::Pow: return std::pow(eval(*n.lhs, x, y), eval(*n.rhs, x, y));
        case Kind::Cos: return std::cos(eval(*n.lhs, x, y));
        case Kind::Sin: return std::sin(eval(*n.lhs, x, y));
        case Kind::Exp: return std::exp(eval(*n.lhs, x, y));
    }
    return 0.0;
}

bool constant_tree(const Expression::Node& n) {
    if (n.kind == Kind::VarX || n.kind == Kind::VarY) return false;
    if (n.lhs && !constant_tree(*n.lhs)) return false;
    if (n.rhs && !constant_tree(*n.rhs)) return false;
    return true;
}

std::string format_constant(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

Expression::Expression() : source_("0"), root_(number(0.0)) {}

Expression Expression::parse(std::string_view source) {
    Expression e;
    e.root_ = Parser(source).parse();
    e.source_ = std::string(source);
    return e;
}

Expression Expression::constant(double value) { return parse(format_constant(value)); }

double Expression::operator()(double x, double y) const { return eval(*root_, x, y); }

bool Expression::is_constant() const { return constant_tree(*root_); }

}  // namespace fastreact
