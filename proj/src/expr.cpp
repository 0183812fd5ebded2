#include "pencil/expr.hpp"

#include <cctype>
#include <cmath>
#include <vector>

namespace pencil {

namespace {

enum class Fn { Sin, Cos, Exp, Sinh, Cosh, Sqrt, Abs };

const char* fn_name(Fn f) {
    switch (f) {
        case Fn::Sin: return "sin";
        case Fn::Cos: return "cos";
        case Fn::Exp: return "exp";
        case Fn::Sinh: return "sinh";
        case Fn::Cosh: return "cosh";
        case Fn::Sqrt: return "sqrt";
        case Fn::Abs: return "abs";
    }
    return "?";
}

double fn_apply(Fn f, double v) {
    switch (f) {
        case Fn::Sin: return std::sin(v);
        case Fn::Cos: return std::cos(v);
        case Fn::Exp: return std::exp(v);
        case Fn::Sinh: return std::sinh(v);
        case Fn::Cosh: return std::cosh(v);
        case Fn::Sqrt: return std::sqrt(v);
        case Fn::Abs: return std::fabs(v);
    }
    return NAN;
}

}  // namespace

struct Expr::Node {
    enum class Kind { Num, Var, Neg, Add, Sub, Mul, Div, Pow, Call } kind;
    double num = 0.0;
    Fn fn = Fn::Sin;
    std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;
using Kind = Expr::Node::Kind;

NodePtr make_num(double v) {
    auto n = std::make_shared<Expr::Node>();
    n->kind = Kind::Num;
    n->num = v;
    return n;
}

NodePtr make_node(Kind k, NodePtr a, NodePtr b = nullptr) {
    auto n = std::make_shared<Expr::Node>();
    n->kind = k;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

class Parser {
public:
    explicit Parser(const std::string& text) : s_(text) {}

    NodePtr run() {
        NodePtr e = sum();
        skip_ws();
        if (pos_ != s_.size())
            throw ExprError("unexpected trailing input", pos_);
        return e;
    }

private:
    const std::string& s_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr sum() {
        NodePtr e = term();
        for (;;) {
            if (eat('+')) e = make_node(Kind::Add, e, term());
            else if (eat('-')) e = make_node(Kind::Sub, e, term());
            else return e;
        }
    }

    NodePtr term() {
        NodePtr e = unary();
        for (;;) {
            if (eat('*')) e = make_node(Kind::Mul, e, unary());
            else if (eat('/')) e = make_node(Kind::Div, e, unary());
            else return e;
        }
    }

    NodePtr unary() {
        if (eat('-')) return make_node(Kind::Neg, unary());
        return power();
    }

    NodePtr power() {
        NodePtr base = atom();
        // right-associative; exponent may carry its own unary minus
        if (eat('^')) return make_node(Kind::Pow, base, unary());
        return base;
    }

    NodePtr atom() {
        skip_ws();
        if (pos_ >= s_.size()) throw ExprError("unexpected end of input", pos_);
        char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = sum();
            if (!eat(')')) throw ExprError("expected ')'", pos_);
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
        throw ExprError(std::string("unexpected character '") + c + "'", pos_);
    }

    NodePtr number() {
        std::size_t start = pos_;
        const char* begin = s_.c_str() + pos_;
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin) throw ExprError("malformed number", start);
        pos_ += static_cast<std::size_t>(end - begin);
        return make_num(v);
    }

    NodePtr identifier() {
        std::size_t start = pos_;
        while (pos_ < s_.size() &&
               (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
            ++pos_;
        std::string name = s_.substr(start, pos_ - start);
        if (name == "x") {
            auto n = std::make_shared<Expr::Node>();
            n->kind = Kind::Var;
            return n;
        }
        if (name == "pi") return make_num(M_PI);
        if (name == "e") return make_num(M_E);
        static const std::pair<const char*, Fn> fns[] = {
            {"sin", Fn::Sin},   {"cos", Fn::Cos},   {"exp", Fn::Exp}, {"sinh", Fn::Sinh},
            {"cosh", Fn::Cosh}, {"sqrt", Fn::Sqrt}, {"abs", Fn::Abs},
        };
        for (const auto& [fname, f] : fns) {
            if (name == fname) {
                if (!eat('(')) throw ExprError("expected '(' after function name", pos_);
                NodePtr arg = sum();
                if (!eat(')')) throw ExprError("expected ')'", pos_);
                auto n = std::make_shared<Expr::Node>();
                n->kind = Kind::Call;
                n->fn = f;
                n->a = arg;
                return n;
            }
        }
        throw ExprError("unknown identifier '" + name + "'", start);
    }
};

double eval_node(const Expr::Node& n, double x) {
    switch (n.kind) {
        case Kind::Num: return n.num;
        case Kind::Var: return x;
        case Kind::Neg: return -eval_node(*n.a, x);
        case Kind::Add: return eval_node(*n.a, x) + eval_node(*n.b, x);
        case Kind::Sub: return eval_node(*n.a, x) - eval_node(*n.b, x);
        case Kind::Mul: return eval_node(*n.a, x) * eval_node(*n.b, x);
        case Kind::Div: return eval_node(*n.a, x) / eval_node(*n.b, x);
        case Kind::Pow: return std::pow(eval_node(*n.a, x), eval_node(*n.b, x));
        case Kind::Call: return fn_apply(n.fn, eval_node(*n.a, x));
    }
    return NAN;
}

void print_node(const Expr::Node& n, std::string& out) {
    switch (n.kind) {
        case Kind::Num: {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", n.num);
            out += buf;
            return;
        }
        case Kind::Var: out += 'x'; return;
        case Kind::Neg:
            out += "(-";
            print_node(*n.a, out);
            out += ')';
            return;
        case Kind::Call:
            out += fn_name(n.fn);
            out += '(';
            print_node(*n.a, out);
            out += ')';
            return;
        default: break;
    }
    const char* op = n.kind == Kind::Add   ? "+"
                     : n.kind == Kind::Sub ? "-"
                     : n.kind == Kind::Mul ? "*"
                     : n.kind == Kind::Div ? "/"
                                           : "^";
    out += '(';
    print_node(*n.a, out);
    out += op;
    print_node(*n.b, out);
    out += ')';
}

bool depends_on_x(const Expr::Node& n) {
    switch (n.kind) {
        case Kind::Num: return false;
        case Kind::Var: return true;
        case Kind::Neg:
        case Kind::Call: return depends_on_x(*n.a);
        default: return depends_on_x(*n.a) || depends_on_x(*n.b);
    }
}

}  // namespace

Expr Expr::parse(const std::string& text) {
    Parser p(text);
    Expr e;
    e.root_ = p.run();
    return e;
}

double Expr::eval(double x) const { return eval_node(*root_, x); }

std::string Expr::print() const {
    std::string out;
    print_node(*root_, out);
    return out;
}

std::optional<double> Expr::constant_value() const {
    if (!root_ || depends_on_x(*root_)) return std::nullopt;
    return eval_node(*root_, 0.0);
}

}  // namespace pencil
