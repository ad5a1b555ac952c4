#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace perihyp {

/// Parsed coefficient expression over a declared variable list.
///
/// Grammar (lowest to highest precedence):
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := ('-' | '+') unary | power
///   power   := primary ('^' unary)?        right-associative
///   primary := number | name | func '(' expr ')' | '(' expr ')'
/// Functions: sin cos exp ln tanh abs. `pi` is a constant unless declared.
class Expr {
public:
    static constexpr int kMaxPartials = 4;

    struct Partials {
        double value = 0.0;
        std::array<double, kMaxPartials> d{};
    };

    /// Throws ParseError (with character position) on syntax errors and on
    /// references to undeclared variables.
    static Expr parse(std::string_view src, std::vector<std::string> variables);

    /// Constant expression.
    static Expr constant(double value, std::vector<std::string> variables = {});

    const std::vector<std::string>& variables() const noexcept;
    const std::string& source() const noexcept;

    /// Index in the declared variable list, or -1.
    int variable_index(std::string_view name) const noexcept;

    /// True if the expression tree references the variable.
    bool uses(std::string_view name) const noexcept;

    /// `values` binds every declared variable in declaration order.
    /// Throws DomainError naming the offending subexpression.
    double eval(std::span<const double> values) const;

    /// Value and first partials with respect to the variables at indices `wrt`
    /// (at most kMaxPartials), by forward-mode dual numbers.
    Partials eval_partials(std::span<const double> values, std::span<const int> wrt) const;

    /// Fully parenthesized form that parses back to an equivalent expression.
    std::string to_string() const;

    struct Program;

private:
    std::shared_ptr<const Program> program_;
};

}  // namespace perihyp
