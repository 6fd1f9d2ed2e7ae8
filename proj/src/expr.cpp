#include "degenwarp/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "degenwarp/errors.hpp"

namespace degenwarp {

enum class NodeKind { Literal, Variable, Neg, Add, Sub, Mul, Div, Pow, Call };

struct ExprNode {
    NodeKind kind;
    double literal = 0.0;
    std::size_t var = 0;
    std::string name;
    unsigned exponent = 0;
    Func func = Func::Sin;
    std::shared_ptr<const ExprNode> lhs;
    std::shared_ptr<const ExprNode> rhs;
};

using NodePtr = std::shared_ptr<const ExprNode>;

struct ExprBuilder {
    static Expression wrap(NodePtr n) { return Expression(std::move(n)); }
    static const NodePtr& ptr(const Expression& e) { return e.node_; }

    static NodePtr make(NodeKind kind, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
        auto n = std::make_shared<ExprNode>();
        n->kind = kind;
        n->lhs = std::move(lhs);
        n->rhs = std::move(rhs);
        return n;
    }
};

namespace {

const char* func_name(Func f) {
    switch (f) {
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Sinh: return "sinh";
    case Func::Cosh: return "cosh";
    case Func::Exp: return "exp";
    }
    return "?";
}

bool func_from_name(std::string_view s, Func& out) {
    static constexpr std::pair<std::string_view, Func> table[] = {
        {"sin", Func::Sin}, {"cos", Func::Cos}, {"sinh", Func::Sinh}, {"cosh", Func::Cosh}, {"exp", Func::Exp}};
    for (const auto& [name, f] : table)
        if (name == s) {
            out = f;
            return true;
        }
    return false;
}

double apply_func(Func f, double v) {
    switch (f) {
    case Func::Sin: return std::sin(v);
    case Func::Cos: return std::cos(v);
    case Func::Sinh: return std::sinh(v);
    case Func::Cosh: return std::cosh(v);
    case Func::Exp: return std::exp(v);
    }
    return 0.0;
}

Jet2 apply_func(Func f, const Jet2& v) {
    switch (f) {
    case Func::Sin: return sin(v);
    case Func::Cos: return cos(v);
    case Func::Sinh: return sinh(v);
    case Func::Cosh: return cosh(v);
    case Func::Exp: return exp(v);
    }
    return v;
}

double eval_node(const ExprNode& n, std::span<const double> p) {
    switch (n.kind) {
    case NodeKind::Literal: return n.literal;
    case NodeKind::Variable: return p[n.var];
    case NodeKind::Neg: return -eval_node(*n.lhs, p);
    case NodeKind::Add: return eval_node(*n.lhs, p) + eval_node(*n.rhs, p);
    case NodeKind::Sub: return eval_node(*n.lhs, p) - eval_node(*n.rhs, p);
    case NodeKind::Mul: return eval_node(*n.lhs, p) * eval_node(*n.rhs, p);
    case NodeKind::Div: {
        const double d = eval_node(*n.rhs, p);
        if (d == 0.0) throw DomainError("division by zero");
        return eval_node(*n.lhs, p) / d;
    }
    case NodeKind::Pow: return Jet2::ipow(eval_node(*n.lhs, p), n.exponent);
    case NodeKind::Call: return apply_func(n.func, eval_node(*n.lhs, p));
    }
    return 0.0;
}

Jet2 jet_node(const ExprNode& n, std::span<const double> p) {
    const std::size_t dim = p.size();
    switch (n.kind) {
    case NodeKind::Literal: return Jet2(n.literal, dim);
    case NodeKind::Variable: return Jet2::variable(p[n.var], n.var, dim);
    case NodeKind::Neg: return -jet_node(*n.lhs, p);
    case NodeKind::Add: return jet_node(*n.lhs, p) + jet_node(*n.rhs, p);
    case NodeKind::Sub: return jet_node(*n.lhs, p) - jet_node(*n.rhs, p);
    case NodeKind::Mul: return jet_node(*n.lhs, p) * jet_node(*n.rhs, p);
    case NodeKind::Div: {
        const Jet2 d = jet_node(*n.rhs, p);
        if (d.value() == 0.0) throw DomainError("division by zero");
        return jet_node(*n.lhs, p) * d.reciprocal();
    }
    case NodeKind::Pow: return jet_node(*n.lhs, p).pow(n.exponent);
    case NodeKind::Call: return apply_func(n.func, jet_node(*n.lhs, p));
    }
    return Jet2(0.0, dim);
}

std::string format_literal(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s(buf);
    if (v < 0) return "(" + s + ")";
    return s;
}

void print_node(const ExprNode& n, std::string& out) {
    switch (n.kind) {
    case NodeKind::Literal: out += format_literal(n.literal); return;
    case NodeKind::Variable: out += n.name; return;
    case NodeKind::Neg:
        out += "(-";
        print_node(*n.lhs, out);
        out += ")";
        return;
    case NodeKind::Add:
    case NodeKind::Sub:
    case NodeKind::Mul:
    case NodeKind::Div: {
        static constexpr char ops[] = {'+', '-', '*', '/'};
        out += "(";
        print_node(*n.lhs, out);
        out += ops[int(n.kind) - int(NodeKind::Add)];
        print_node(*n.rhs, out);
        out += ")";
        return;
    }
    case NodeKind::Pow:
        out += "(";
        print_node(*n.lhs, out);
        out += ")^" + std::to_string(n.exponent);
        return;
    case NodeKind::Call:
        out += func_name(n.func);
        out += "(";
        print_node(*n.lhs, out);
        out += ")";
        return;
    }
}

std::size_t arity_node(const ExprNode& n) {
    std::size_t a = 0;
    if (n.kind == NodeKind::Variable) a = n.var + 1;
    if (n.lhs) a = std::max(a, arity_node(*n.lhs));
    if (n.rhs) a = std::max(a, arity_node(*n.rhs));
    return a;
}

template <class Leaf>
NodePtr transform(const NodePtr& n, const Leaf& on_variable) {
    if (n->kind == NodeKind::Variable) return on_variable(*n);
    if (!n->lhs) return n;
    auto copy = std::make_shared<ExprNode>(*n);
    copy->lhs = transform(n->lhs, on_variable);
    if (n->rhs) copy->rhs = transform(n->rhs, on_variable);
    return copy;
}

// Recursive-descent parser over the byte string.
class Parser {
public:
    Parser(std::string_view src, std::span<const std::string> coords) : src_(src), coords_(coords) {}

    NodePtr parse_all() {
        skip_ws();
        if (pos_ >= src_.size()) throw ParseError("empty expression", pos_);
        NodePtr e = parse_expr();
        skip_ws();
        if (pos_ < src_.size()) throw ParseError(std::string("unexpected '") + src_[pos_] + "'", pos_);
        return e;
    }

private:
    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool peek(char c) {
        skip_ws();
        return pos_ < src_.size() && src_[pos_] == c;
    }

    [[noreturn]] void fail_here(const std::string& what) {
        if (pos_ >= src_.size()) throw ParseError(what + ", found end of input", pos_);
        throw ParseError(what + ", found '" + std::string(1, src_[pos_]) + "'", pos_);
    }

    NodePtr parse_expr() {
        NodePtr lhs = parse_term();
        while (peek('+') || peek('-')) {
            const NodeKind k = src_[pos_] == '+' ? NodeKind::Add : NodeKind::Sub;
            ++pos_;
            lhs = ExprBuilder::make(k, lhs, parse_term());
        }
        return lhs;
    }

    NodePtr parse_term() {
        NodePtr lhs = parse_factor();
        while (peek('*') || peek('/')) {
            const NodeKind k = src_[pos_] == '*' ? NodeKind::Mul : NodeKind::Div;
            ++pos_;
            lhs = ExprBuilder::make(k, lhs, parse_factor());
        }
        return lhs;
    }

    NodePtr parse_factor() {
        if (peek('-')) {
            ++pos_;
            return ExprBuilder::make(NodeKind::Neg, parse_factor());
        }
        NodePtr base = parse_atom();
        if (peek('^')) {
            ++pos_;
            skip_ws();
            const std::size_t start = pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            if (pos_ == start) fail_here("expected non-negative integer exponent");
            const std::string digits(src_.substr(start, pos_ - start));
            if (digits.size() > 9) throw ParseError("exponent too large", start);
            auto n = ExprBuilder::make(NodeKind::Pow, base);
            std::const_pointer_cast<ExprNode>(n)->exponent = static_cast<unsigned>(std::stoul(digits));
            return n;
        }
        return base;
    }

    NodePtr parse_number() {
        const std::size_t start = pos_;
        auto digit = [&](std::size_t i) {
            return i < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i]));
        };
        while (digit(pos_)) ++pos_;
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            while (digit(pos_)) ++pos_;
        }
        if (pos_ == start + 1 && src_[start] == '.') throw ParseError("malformed number", start);
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t q = pos_ + 1;
            if (q < src_.size() && (src_[q] == '+' || src_[q] == '-')) ++q;
            if (!digit(q)) throw ParseError("malformed exponent in number", pos_);
            pos_ = q;
            while (digit(pos_)) ++pos_;
        }
        const std::string text(src_.substr(start, pos_ - start));
        auto n = ExprBuilder::make(NodeKind::Literal);
        std::const_pointer_cast<ExprNode>(n)->literal = std::strtod(text.c_str(), nullptr);
        return n;
    }

    NodePtr parse_atom() {
        skip_ws();
        if (pos_ >= src_.size()) fail_here("expected operand");
        const char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (c == '(') {
            ++pos_;
            NodePtr e = parse_expr();
            if (!peek(')')) fail_here("expected ')'");
            ++pos_;
            return e;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                ++pos_;
            const std::string_view ident = src_.substr(start, pos_ - start);
            if (peek('(')) {
                Func f;
                if (!func_from_name(ident, f)) throw UnknownIdentifier(std::string(ident), start);
                ++pos_;
                NodePtr arg = parse_expr();
                if (!peek(')')) fail_here("expected ')'");
                ++pos_;
                auto n = ExprBuilder::make(NodeKind::Call, arg);
                std::const_pointer_cast<ExprNode>(n)->func = f;
                return n;
            }
            for (std::size_t i = 0; i < coords_.size(); ++i)
                if (coords_[i] == ident) {
                    auto n = ExprBuilder::make(NodeKind::Variable);
                    auto m = std::const_pointer_cast<ExprNode>(n);
                    m->var = i;
                    m->name = std::string(ident);
                    return n;
                }
            throw UnknownIdentifier(std::string(ident), start);
        }
        fail_here("expected operand");
    }

    std::string_view src_;
    std::span<const std::string> coords_;
    std::size_t pos_ = 0;
};

} // namespace

Expression Expression::constant(double value) {
    auto n = ExprBuilder::make(NodeKind::Literal);
    std::const_pointer_cast<ExprNode>(n)->literal = value;
    return Expression(n);
}

Expression Expression::variable(std::size_t index, std::string name) {
    auto n = ExprBuilder::make(NodeKind::Variable);
    auto m = std::const_pointer_cast<ExprNode>(n);
    m->var = index;
    m->name = std::move(name);
    return Expression(n);
}

Expression operator-(const Expression& a) {
    return ExprBuilder::wrap(ExprBuilder::make(NodeKind::Neg, ExprBuilder::ptr(a)));
}
Expression operator+(const Expression& a, const Expression& b) {
    return ExprBuilder::wrap(ExprBuilder::make(NodeKind::Add, ExprBuilder::ptr(a), ExprBuilder::ptr(b)));
}
Expression operator-(const Expression& a, const Expression& b) {
    return ExprBuilder::wrap(ExprBuilder::make(NodeKind::Sub, ExprBuilder::ptr(a), ExprBuilder::ptr(b)));
}
Expression operator*(const Expression& a, const Expression& b) {
    return ExprBuilder::wrap(ExprBuilder::make(NodeKind::Mul, ExprBuilder::ptr(a), ExprBuilder::ptr(b)));
}
Expression operator/(const Expression& a, const Expression& b) {
    return ExprBuilder::wrap(ExprBuilder::make(NodeKind::Div, ExprBuilder::ptr(a), ExprBuilder::ptr(b)));
}
Expression pow(const Expression& a, unsigned k) {
    auto n = ExprBuilder::make(NodeKind::Pow, ExprBuilder::ptr(a));
    std::const_pointer_cast<ExprNode>(n)->exponent = k;
    return ExprBuilder::wrap(n);
}
Expression call(Func f, const Expression& a) {
    auto n = ExprBuilder::make(NodeKind::Call, ExprBuilder::ptr(a));
    std::const_pointer_cast<ExprNode>(n)->func = f;
    return ExprBuilder::wrap(n);
}

double Expression::eval(std::span<const double> point) const { return eval_node(*node_, point); }

Jet2 Expression::eval_jet2(std::span<const double> point) const { return jet_node(*node_, point); }

std::string Expression::to_string() const {
    std::string out;
    print_node(*node_, out);
    return out;
}

bool Expression::is_constant() const { return node_->kind == NodeKind::Literal; }

double Expression::constant_value() const { return node_->literal; }

std::size_t Expression::arity() const { return arity_node(*node_); }

Expression Expression::rebind(std::span<const std::string> coords) const {
    return Expression(transform(node_, [&](const ExprNode& v) -> NodePtr {
        for (std::size_t i = 0; i < coords.size(); ++i)
            if (coords[i] == v.name) {
                auto n = std::make_shared<ExprNode>(v);
                n->var = i;
                return n;
            }
        throw UnknownIdentifier(v.name, 0);
    }));
}

Expression Expression::substitute(std::span<const Expression> replacements) const {
    return Expression(transform(node_, [&](const ExprNode& v) -> NodePtr {
        return ExprBuilder::ptr(replacements[v.var]);
    }));
}

std::optional<Expression> Expression::replace_even_powers(std::size_t var, const Expression& square) const {
    bool ok = true;
    auto rec = [&](auto&& self, const NodePtr& n) -> NodePtr {
        if (n->kind == NodeKind::Pow && n->lhs->kind == NodeKind::Variable && n->lhs->var == var) {
            if (n->exponent % 2 != 0) {
                ok = false;
                return n;
            }
            return ExprBuilder::ptr(pow(square, n->exponent / 2));
        }
        if (n->kind == NodeKind::Variable) {
            if (n->var == var) ok = false;
            return n;
        }
        if (!n->lhs) return n;
        auto copy = std::make_shared<ExprNode>(*n);
        copy->lhs = self(self, n->lhs);
        if (n->rhs) copy->rhs = self(self, n->rhs);
        return copy;
    };
    NodePtr out = rec(rec, node_);
    if (!ok) return std::nullopt;
    return Expression(out);
}

Expression parse(std::string_view source, std::span<const std::string> coords) {
    Parser p(source, coords);
    return ExprBuilder::wrap(p.parse_all());
}

} // namespace degenwarp
