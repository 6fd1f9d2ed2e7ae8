#pragma once

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "degenwarp/jet.hpp"

namespace degenwarp {

enum class Func { Sin, Cos, Sinh, Cosh, Exp };

struct ExprNode;

/// Immutable closed-form scalar function of chart coordinates.
///
/// Variables are stored by position in the owning chart's coordinate list,
/// together with their name so that an expression can be rebound onto a
/// different chart (e.g. the product chart of a warped product). Copies are
/// cheap; the tree is shared.
class Expression {
public:
    Expression() : Expression(constant(0.0)) {}

    static Expression constant(double value);
    static Expression variable(std::size_t index, std::string name);

    friend Expression operator-(const Expression& a);
    friend Expression operator+(const Expression& a, const Expression& b);
    friend Expression operator-(const Expression& a, const Expression& b);
    friend Expression operator*(const Expression& a, const Expression& b);
    friend Expression operator/(const Expression& a, const Expression& b);
    friend Expression pow(const Expression& a, unsigned k);
    friend Expression call(Func f, const Expression& a);

    double eval(std::span<const double> point) const;
    Jet2 eval_jet2(std::span<const double> point) const;

    /// Fully parenthesized source text that re-parses to an equivalent tree.
    std::string to_string() const;

    /// True when the tree is a literal (after parsing or construction).
    bool is_constant() const;
    /// Literal value; meaningful only when is_constant().
    double constant_value() const;

    /// Highest variable index used plus one (0 for constants).
    std::size_t arity() const;

    /// Rebinds variables by name onto `coords`. Throws UnknownIdentifier when
    /// a name is missing.
    Expression rebind(std::span<const std::string> coords) const;

    /// Replaces variable i by replacements[i].
    Expression substitute(std::span<const Expression> replacements) const;

    /// Rewrites every occurrence of variable `var` raised to an even power
    /// 2k as `square`^k. Returns nullopt when `var` occurs in any other way.
    std::optional<Expression> replace_even_powers(std::size_t var, const Expression& square) const;

private:
    explicit Expression(std::shared_ptr<const ExprNode> n) : node_(std::move(n)) {}
    std::shared_ptr<const ExprNode> node_;

    friend struct ExprBuilder;
};

Expression operator-(const Expression& a);
Expression operator+(const Expression& a, const Expression& b);
Expression operator-(const Expression& a, const Expression& b);
Expression operator*(const Expression& a, const Expression& b);
Expression operator/(const Expression& a, const Expression& b);
Expression pow(const Expression& a, unsigned k);
Expression call(Func f, const Expression& a);

inline Expression operator*(double s, const Expression& e) { return Expression::constant(s) * e; }

/// Parses `source` under the grammar
///
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := '-' factor | atom ('^' integer)?
///   atom   := number | ident | ident '(' expr ')' | '(' expr ')'
///
/// with functions sin, cos, sinh, cosh, exp. Throws ParseError (with byte
/// offset) or UnknownIdentifier.
Expression parse(std::string_view source, std::span<const std::string> coords);

inline Expression parse(std::string_view source, std::initializer_list<std::string> coords) {
    std::vector<std::string> v(coords);
    return parse(source, std::span<const std::string>(v));
}

/// Convenience: value, gradient and hessian at `point`.
inline Jet2 eval_jet2(const Expression& e, std::span<const double> point) { return e.eval_jet2(point); }

} // namespace degenwarp
