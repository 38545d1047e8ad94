#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace fastreact {

/// Closed-form scalar expression in x (and y).
///
/// Grammar: numeric literals, the variables `x` and `y`, the constant `pi`,
/// binary `+ - * / ^` (with `^` right-associative and binding tighter than
/// unary minus), parentheses and the functions `cos`, `sin`, `exp`.
/// Parsing errors raise ConfigError with the offending column.
class Expression {
public:
    Expression();  // the constant 0
    static Expression parse(std::string_view source);
    static Expression constant(double value);

    double operator()(double x, double y = 0.0) const;

    const std::string& source() const { return source_; }
    bool is_constant() const;

    friend bool operator==(const Expression& a, const Expression& b) { return a.source_ == b.source_; }

    struct Node;

private:
    std::string source_;
    std::shared_ptr<const Node> root_;
};

}  // namespace fastreact
