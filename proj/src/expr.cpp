#include "perihyp/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "perihyp/error.hpp"

namespace perihyp {

namespace {

enum class Op { Number, Variable, Neg, Add, Sub, Mul, Div, Pow, Call };
enum class Func { Sin, Cos, Exp, Ln, Tanh, Abs };

struct Node {
    Op op = Op::Number;
    double value = 0.0;
    int var = -1;
    Func func = Func::Sin;
    int lhs = -1;
    int rhs = -1;
    std::size_t begin = 0;
    std::size_t end = 0;
};

const char* func_name(Func f) {
    switch (f) {
        case Func::Sin: return "sin";
        case Func::Cos: return "cos";
        case Func::Exp: return "exp";
        case Func::Ln: return "ln";
        case Func::Tanh: return "tanh";
        case Func::Abs: return "abs";
    }
    return "?";
}

bool lookup_func(std::string_view name, Func& out) {
    static constexpr std::pair<std::string_view, Func> table[] = {
        {"sin", Func::Sin}, {"cos", Func::Cos},   {"exp", Func::Exp},
        {"ln", Func::Ln},   {"tanh", Func::Tanh}, {"abs", Func::Abs},
    };
    for (auto [n, f] : table) {
        if (n == name) {
            out = f;
            return true;
        }
    }
    return false;
}

class Parser {
public:
    Parser(std::string_view src, const std::vector<std::string>& vars, std::vector<Node>& nodes)
        : src_(src), vars_(vars), nodes_(nodes) {}

    int parse() {
        skip_ws();
        if (pos_ >= src_.size()) throw ParseError("empty expression", pos_);
        const int root = expr();
        skip_ws();
        if (pos_ < src_.size()) throw ParseError(std::string("unexpected '") + src_[pos_] + "'", pos_);
        return root;
    }

private:
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

    int add(Node n) {
        nodes_.push_back(n);
        return static_cast<int>(nodes_.size()) - 1;
    }

    int binary(Op op, int l, int r) {
        Node n;
        n.op = op;
        n.lhs = l;
        n.rhs = r;
        n.begin = nodes_[l].begin;
        n.end = nodes_[r].end;
        return add(n);
    }

    int expr() {
        int lhs = term();
        for (;;) {
            if (accept('+')) {
                lhs = binary(Op::Add, lhs, term());
            } else if (accept('-')) {
                lhs = binary(Op::Sub, lhs, term());
            } else {
                return lhs;
            }
        }
    }

    int term() {
        int lhs = unary();
        for (;;) {
            if (accept('*')) {
                lhs = binary(Op::Mul, lhs, unary());
            } else if (accept('/')) {
                lhs = binary(Op::Div, lhs, unary());
            } else {
                return lhs;
            }
        }
    }

    int unary() {
        skip_ws();
        const std::size_t start = pos_;
        if (accept('-')) {
            const int operand = unary();
            Node n;
            n.op = Op::Neg;
            n.lhs = operand;
            n.begin = start;
            n.end = nodes_[operand].end;
            return add(n);
        }
        if (accept('+')) return unary();
        return power();
    }

    int power() {
        const int base = primary();
        if (accept('^')) return binary(Op::Pow, base, unary());
        return base;
    }

    int primary() {
        skip_ws();
        if (pos_ >= src_.size()) throw ParseError("unexpected end of expression", pos_);
        const std::size_t start = pos_;
        const char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
                ++pos_;
            }
            const std::string_view name = src_.substr(start, pos_ - start);
            skip_ws();
            Func f;
            if (pos_ < src_.size() && src_[pos_] == '(' && lookup_func(name, f)) {
                ++pos_;
                const int arg = expr();
                if (!accept(')')) throw ParseError("expected ')'", pos_);
                Node n;
                n.op = Op::Call;
                n.func = f;
                n.lhs = arg;
                n.begin = start;
                n.end = pos_;
                return add(n);
            }
            auto it = std::find(vars_.begin(), vars_.end(), name);
            Node n;
            n.begin = start;
            n.end = start + name.size();
            if (it != vars_.end()) {
                n.op = Op::Variable;
                n.var = static_cast<int>(it - vars_.begin());
                return add(n);
            }
            if (name == "pi") {
                n.op = Op::Number;
                n.value = std::numbers::pi;
                return add(n);
            }
            if (lookup_func(name, f)) throw ParseError("function '" + std::string(name) + "' needs '('", pos_);
            throw ParseError("undeclared variable '" + std::string(name) + "'", start);
        }
        if (c == '(') {
            ++pos_;
            const int inner = expr();
            if (!accept(')')) throw ParseError("expected ')'", pos_);
            nodes_[inner].begin = start;
            nodes_[inner].end = pos_;
            return inner;
        }
        throw ParseError(std::string("unexpected '") + c + "'", pos_);
    }

    int number() {
        const std::size_t start = pos_;
        auto digits = [&] {
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        };
        digits();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            digits();
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t save = pos_;
            ++pos_;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                digits();
            } else {
                pos_ = save;
            }
        }
        const std::string text(src_.substr(start, pos_ - start));
        if (text == ".") throw ParseError("malformed number", start);
        Node n;
        n.op = Op::Number;
        n.value = std::stod(text);
        n.begin = start;
        n.end = pos_;
        return add(n);
    }

    std::string_view src_;
    const std::vector<std::string>& vars_;
    std::vector<Node>& nodes_;
    std::size_t pos_ = 0;
};

struct Dual {
    double v = 0.0;
    std::array<double, Expr::kMaxPartials> d{};
};

}  // namespace

struct Expr::Program {
    std::string source;
    std::vector<std::string> variables;
    std::vector<Node> nodes;
    int root = -1;
    std::vector<int> postfix;  // node indices in evaluation order
    std::vector<bool> used;    // per variable

    std::string text(const Node& n) const {
        if (n.end <= source.size() && n.begin < n.end) return source.substr(n.begin, n.end - n.begin);
        return "<expr>";
    }

    [[noreturn]] void fail(const Node& n, const std::string& what) const {
        throw DomainError(what + " in '" + text(n) + "'");
    }

    template <class T>
    T run(std::span<const double> values, const std::array<int, kMaxPartials>* seed, int nseed) const;
};

namespace {

inline double value_of(double x) { return x; }
inline double value_of(const Dual& x) { return x.v; }

inline bool has_derivative(double) { return false; }
inline bool has_derivative(const Dual& x) {
    return std::any_of(x.d.begin(), x.d.end(), [](double v) { return v != 0.0; });
}

// Chain rule helper: result value f, derivative factor df applied to x.d.
inline double apply1(double, double f, double) { return f; }
inline Dual apply1(const Dual& x, double f, double df) {
    Dual r;
    r.v = f;
    for (int j = 0; j < Expr::kMaxPartials; ++j) r.d[j] = x.d[j] == 0.0 ? 0.0 : df * x.d[j];
    return r;
}

inline double add(double a, double b) { return a + b; }
inline Dual add(const Dual& a, const Dual& b) {
    Dual r;
    r.v = a.v + b.v;
    for (int j = 0; j < Expr::kMaxPartials; ++j) r.d[j] = a.d[j] + b.d[j];
    return r;
}
inline double sub(double a, double b) { return a - b; }
inline Dual sub(const Dual& a, const Dual& b) {
    Dual r;
    r.v = a.v - b.v;
    for (int j = 0; j < Expr::kMaxPartials; ++j) r.d[j] = a.d[j] - b.d[j];
    return r;
}
inline double mul(double a, double b) { return a * b; }
inline Dual mul(const Dual& a, const Dual& b) {
    Dual r;
    r.v = a.v * b.v;
    for (int j = 0; j < Expr::kMaxPartials; ++j) r.d[j] = a.d[j] * b.v + a.v * b.d[j];
    return r;
}
inline double div(double a, double b) { return a / b; }
inline Dual div(const Dual& a, const Dual& b) {
    Dual r;
    r.v = a.v / b.v;
    for (int j = 0; j < Expr::kMaxPartials; ++j) r.d[j] = (a.d[j] - r.v * b.d[j]) / b.v;
    return r;
}

inline double make_const(double v, double) { return v; }
inline Dual make_const(double v, const Dual&) {
    Dual r;
    r.v = v;
    return r;
}

}  // namespace

template <class T>
T Expr::Program::run(std::span<const double> values, const std::array<int, kMaxPartials>* seed, int nseed) const {
    thread_local std::vector<T> stack;
    stack.clear();
    const T proto{};
    for (int idx : postfix) {
        const Node& n = nodes[idx];
        switch (n.op) {
            case Op::Number: stack.push_back(make_const(n.value, proto)); break;
            case Op::Variable: {
                T v = make_const(values[n.var], proto);
                if constexpr (std::is_same_v<T, Dual>) {
                    for (int j = 0; j < nseed; ++j) {
                        if ((*seed)[j] == n.var) v.d[j] = 1.0;
                    }
                }
                stack.push_back(v);
                break;
            }
            case Op::Neg: stack.back() = apply1(stack.back(), -value_of(stack.back()), -1.0); break;
            case Op::Call: {
                T& x = stack.back();
                const double a = value_of(x);
                switch (n.func) {
                    case Func::Sin: x = apply1(x, std::sin(a), std::cos(a)); break;
                    case Func::Cos: x = apply1(x, std::cos(a), -std::sin(a)); break;
                    case Func::Exp: {
                        const double e = std::exp(a);
                        if (!std::isfinite(e)) fail(n, "exp overflow");
                        x = apply1(x, e, e);
                        break;
                    }
                    case Func::Ln:
                        if (!(a > 0.0)) fail(n, "ln of non-positive argument");
                        x = apply1(x, std::log(a), 1.0 / a);
                        break;
                    case Func::Tanh: {
                        const double th = std::tanh(a);
                        x = apply1(x, th, 1.0 - th * th);
                        break;
                    }
                    case Func::Abs: x = apply1(x, std::abs(a), a > 0.0 ? 1.0 : (a < 0.0 ? -1.0 : 0.0)); break;
                }
                break;
            }
            default: {
                const T b = stack.back();
                stack.pop_back();
                T& a = stack.back();
                switch (n.op) {
                    case Op::Add: a = add(a, b); break;
                    case Op::Sub: a = sub(a, b); break;
                    case Op::Mul: a = mul(a, b); break;
                    case Op::Div:
                        if (value_of(b) == 0.0) fail(n, "division by zero");
                        a = div(a, b);
                        break;
                    case Op::Pow: {
                        const double x = value_of(a);
                        const double y = value_of(b);
                        const bool integral = std::floor(y) == y;
                        if (x < 0.0 && !integral) fail(n, "negative base with non-integer exponent");
                        if (x == 0.0 && y < 0.0) fail(n, "division by zero");
                        const double p = std::pow(x, y);
                        if constexpr (std::is_same_v<T, Dual>) {
                            Dual r;
                            r.v = p;
                            const bool exp_varies = has_derivative(b);
                            if (exp_varies && x < 0.0) fail(n, "negative base with variable exponent");
                            const double dbase = y == 0.0 ? 0.0 : y * std::pow(x, y - 1.0);
                            const double dexp = (exp_varies && p != 0.0) ? p * std::log(x) : 0.0;
                            for (int j = 0; j < kMaxPartials; ++j) {
                                double d = 0.0;
                                if (a.d[j] != 0.0) d += dbase * a.d[j];
                                if (b.d[j] != 0.0) d += dexp * b.d[j];
                                r.d[j] = d;
                            }
                            a = r;
                        } else {
                            a = p;
                        }
                        break;
                    }
                    default: break;
                }
            }
        }
        if (!std::isfinite(value_of(stack.back()))) fail(n, "non-finite value");
    }
    return stack.back();
}

namespace {

void build_postfix(const std::vector<Node>& nodes, int idx, std::vector<int>& out, std::vector<bool>& used) {
    const Node& n = nodes[idx];
    if (n.lhs >= 0) build_postfix(nodes, n.lhs, out, used);
    if (n.rhs >= 0) build_postfix(nodes, n.rhs, out, used);
    if (n.op == Op::Variable) used[n.var] = true;
    out.push_back(idx);
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s = buf;
    if (v < 0) s = "(" + s + ")";
    return s;
}

std::string render(const Expr::Program& p, int idx) {
    const Node& n = p.nodes[idx];
    switch (n.op) {
        case Op::Number: return format_number(n.value);
        case Op::Variable: return p.variables[n.var];
        case Op::Neg: return "(-" + render(p, n.lhs) + ")";
        case Op::Call: return std::string(func_name(n.func)) + "(" + render(p, n.lhs) + ")";
        case Op::Add: return "(" + render(p, n.lhs) + " + " + render(p, n.rhs) + ")";
        case Op::Sub: return "(" + render(p, n.lhs) + " - " + render(p, n.rhs) + ")";
        case Op::Mul: return "(" + render(p, n.lhs) + " * " + render(p, n.rhs) + ")";
        case Op::Div: return "(" + render(p, n.lhs) + " / " + render(p, n.rhs) + ")";
        case Op::Pow: return "(" + render(p, n.lhs) + " ^ " + render(p, n.rhs) + ")";
    }
    return "";
}

}  // namespace

Expr Expr::parse(std::string_view src, std::vector<std::string> variables) {
    auto prog = std::make_shared<Program>();
    prog->source = std::string(src);
    prog->variables = std::move(variables);
    Parser parser(prog->source, prog->variables, prog->nodes);
    prog->root = parser.parse();
    prog->used.assign(prog->variables.size(), false);
    build_postfix(prog->nodes, prog->root, prog->postfix, prog->used);
    Expr e;
    e.program_ = std::move(prog);
    return e;
}

Expr Expr::constant(double value, std::vector<std::string> variables) {
    return parse(format_number(value), std::move(variables));
}

const std::vector<std::string>& Expr::variables() const noexcept { return program_->variables; }

const std::string& Expr::source() const noexcept { return program_->source; }

int Expr::variable_index(std::string_view name) const noexcept {
    const auto& v = program_->variables;
    auto it = std::find(v.begin(), v.end(), name);
    return it == v.end() ? -1 : static_cast<int>(it - v.begin());
}

bool Expr::uses(std::string_view name) const noexcept {
    const int i = variable_index(name);
    return i >= 0 && program_->used[i];
}

double Expr::eval(std::span<const double> values) const {
    if (values.size() < program_->variables.size()) throw DomainError("not every declared variable is bound");
    return program_->run<double>(values, nullptr, 0);
}

Expr::Partials Expr::eval_partials(std::span<const double> values, std::span<const int> wrt) const {
    if (values.size() < program_->variables.size()) throw DomainError("not every declared variable is bound");
    if (wrt.size() > kMaxPartials) throw DomainError("too many partial derivatives requested");
    std::array<int, kMaxPartials> seed{};
    seed.fill(-1);
    std::copy(wrt.begin(), wrt.end(), seed.begin());
    const Dual r = program_->run<Dual>(values, &seed, static_cast<int>(wrt.size()));
    Partials out;
    out.value = r.v;
    for (std::size_t j = 0; j < wrt.size(); ++j) {
        if (!std::isfinite(r.d[j])) throw DomainError("non-finite derivative in '" + program_->source + "'");
        out.d[j] = r.d[j];
    }
    return out;
}

std::string Expr::to_string() const { return render(*program_, program_->root); }

}  // namespace perihyp
