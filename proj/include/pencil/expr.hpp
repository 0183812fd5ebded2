#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

namespace pencil {

// Error from Expr::parse; offset is the byte position in the input text.
struct ExprError : std::runtime_error {
    ExprError(const std::string& msg, std::size_t offset)
        : std::runtime_error(msg + " (at offset " + std::to_string(offset) + ")"),
          offset(offset) {}
    std::size_t offset;
};

// Immutable arithmetic expression in one variable x.
//
// Grammar: literals, x, + - * /, ^ (right-associative), unary -, the functions
// sin cos exp sinh cosh sqrt abs, and the constants pi, e.  Unknown
// identifiers are hard errors.
class Expr {
public:
    Expr() = default;

    static Expr parse(const std::string& text);  // throws ExprError

    double eval(double x) const;

    // Canonical fully parenthesized rendering (parse(print()) == same AST).
    std::string print() const;

    // Value if the expression folds to a constant (no dependence on x).
    std::optional<double> constant_value() const;

    bool valid() const { return root_ != nullptr; }

    struct Node;

private:
    std::shared_ptr<const Node> root_;
};

}  // namespace pencil
