#include "anaflow/expression.hpp"

#include "anaflow/jet_calculus.hpp"
#include "anaflow/numfmt.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace anaflow {

namespace {

ExprPtr node_const(double c) {
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::Constant;
    n->value = (c == 0.0) ? 0.0 : c;  // normalize -0.0 so printing round-trips
    return n;
}

ExprPtr node_var(int axis) {
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::StateVar;
    n->var = axis;
    return n;
}

ExprPtr node_time() {
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::TimeVar;
    return n;
}

bool is_const(const ExprPtr& e, double v) {
    return e->kind == NodeKind::Constant && e->value == v;
}

ExprPtr node_binary(NodeKind k, ExprPtr a, ExprPtr b) {
    // constant folding and unit/zero elimination
    bool ac = a->kind == NodeKind::Constant;
    bool bc = b->kind == NodeKind::Constant;
    switch (k) {
        case NodeKind::Add:
            if (ac && bc) return node_const(a->value + b->value);
            if (is_const(a, 0.0)) return b;
            if (is_const(b, 0.0)) return a;
            break;
        case NodeKind::Sub:
            if (ac && bc) return node_const(a->value - b->value);
            if (is_const(b, 0.0)) return a;
            break;
        case NodeKind::Mul:
            if (ac && bc) return node_const(a->value * b->value);
            if (is_const(a, 0.0) || is_const(b, 0.0)) return node_const(0.0);
            if (is_const(a, 1.0)) return b;
            if (is_const(b, 1.0)) return a;
            break;
        case NodeKind::Div:
            if (is_const(a, 0.0) && !(bc && b->value == 0.0)) return node_const(0.0);
            if (is_const(b, 1.0)) return a;
            if (ac && bc && b->value != 0.0) return node_const(a->value / b->value);
            break;
        default:
            break;
    }
    auto n = std::make_shared<ExprNode>();
    n->kind = k;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

ExprPtr node_pow(ExprPtr a, int exponent) {
    if (exponent < 0) throw std::invalid_argument("integer power must be >= 0");
    if (exponent == 0) return node_const(1.0);
    if (exponent == 1) return a;
    if (a->kind == NodeKind::Constant) {
        double v = 1.0, base = a->value;
        int e = exponent;
        while (e > 0) {
            if (e & 1) v *= base;
            e >>= 1;
            if (e) base *= base;
        }
        return node_const(v);
    }
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::Pow;
    n->exponent = exponent;
    n->a = std::move(a);
    return n;
}

ExprPtr node_func(NodeKind k, ExprPtr a) {
    if (a->kind == NodeKind::Constant) {
        double v = a->value;
        switch (k) {
            case NodeKind::Exp: return node_const(std::exp(v));
            case NodeKind::Sin: return node_const(std::sin(v));
            case NodeKind::Cos: return node_const(std::cos(v));
            case NodeKind::Log:
                if (v > 0.0) return node_const(std::log(v));
                break;  // keep the node; evaluation reports the domain error
            default: break;
        }
    }
    auto n = std::make_shared<ExprNode>();
    n->kind = k;
    n->a = std::move(a);
    return n;
}

// printing ----------------------------------------------------------------

// precedence levels: 1 add/sub, 2 mul/div, 3 pow, 4 atom
int print_level(const ExprNode* n) {
    switch (n->kind) {
        case NodeKind::Add:
        case NodeKind::Sub: return 1;
        case NodeKind::Mul:
        case NodeKind::Div: return 2;
        case NodeKind::Pow: return 3;
        default: return 4;  // constants print self-contained, vars, calls
    }
}

std::string print_node(const ExprNode* n);

std::string print_child(const ExprNode* n, int min_level) {
    std::string s = print_node(n);
    if (print_level(n) < min_level) return "(" + s + ")";
    return s;
}

std::string print_node(const ExprNode* n) {
    switch (n->kind) {
        case NodeKind::Constant:
            if (n->value < 0.0) return "(0-" + fmt17(-n->value) + ")";
            return fmt17(n->value);
        case NodeKind::StateVar: return "x" + std::to_string(n->var + 1);
        case NodeKind::TimeVar: return "t";
        case NodeKind::Add: return print_child(n->a.get(), 1) + "+" + print_child(n->b.get(), 2);
        case NodeKind::Sub: return print_child(n->a.get(), 1) + "-" + print_child(n->b.get(), 2);
        case NodeKind::Mul: return print_child(n->a.get(), 2) + "*" + print_child(n->b.get(), 3);
        case NodeKind::Div: return print_child(n->a.get(), 2) + "/" + print_child(n->b.get(), 3);
        case NodeKind::Pow:
            return print_child(n->a.get(), 4) + "^" + std::to_string(n->exponent);
        case NodeKind::Exp: return "exp(" + print_node(n->a.get()) + ")";
        case NodeKind::Log: return "log(" + print_node(n->a.get()) + ")";
        case NodeKind::Sin: return "sin(" + print_node(n->a.get()) + ")";
        case NodeKind::Cos: return "cos(" + print_node(n->a.get()) + ")";
    }
    return "?";
}

// evaluation ----------------------------------------------------------------

template <class T>
T pow_int(T base, int e) {
    T acc(1.0);
    while (e > 0) {
        if (e & 1) acc *= base;
        e >>= 1;
        if (e) base *= base;
    }
    return acc;
}

template <class T>
T eval_node(const ExprNode* n, const std::vector<T>& x, double t) {
    switch (n->kind) {
        case NodeKind::Constant: return T(n->value);
        case NodeKind::StateVar:
            if (n->var >= static_cast<int>(x.size()))
                throw std::invalid_argument("evaluation point has too few coordinates");
            return x[n->var];
        case NodeKind::TimeVar: return T(t);
        case NodeKind::Add: return eval_node(n->a.get(), x, t) + eval_node(n->b.get(), x, t);
        case NodeKind::Sub: return eval_node(n->a.get(), x, t) - eval_node(n->b.get(), x, t);
        case NodeKind::Mul: return eval_node(n->a.get(), x, t) * eval_node(n->b.get(), x, t);
        case NodeKind::Div: {
            T den = eval_node(n->b.get(), x, t);
            if (detail::abs_of(den) <= detail::kPivotFloor)
                throw DomainError("division by ~0", print_node(n));
            return eval_node(n->a.get(), x, t) / den;
        }
        case NodeKind::Pow: return pow_int(eval_node(n->a.get(), x, t), n->exponent);
        case NodeKind::Exp: return detail::exp_of(eval_node(n->a.get(), x, t));
        case NodeKind::Log: {
            T arg = eval_node(n->a.get(), x, t);
            if (!detail::log_domain_ok(arg))
                throw DomainError("log outside the real-positive domain", print_node(n));
            return detail::log_of(arg);
        }
        case NodeKind::Sin: return detail::sin_of(eval_node(n->a.get(), x, t));
        case NodeKind::Cos: return detail::cos_of(eval_node(n->a.get(), x, t));
    }
    throw std::logic_error("unreachable expression node");
}

template <class T>
Jet<T> jet_node(const ExprNode* n, const std::vector<T>& x0, double t, int D) {
    int dim = static_cast<int>(x0.size());
    switch (n->kind) {
        case NodeKind::Constant: return Jet<T>::constant(dim, D, x0, T(n->value));
        case NodeKind::StateVar:
            if (n->var >= dim)
                throw std::invalid_argument("jet base point has too few coordinates");
            return Jet<T>::variable(dim, D, x0, n->var);
        case NodeKind::TimeVar: return Jet<T>::constant(dim, D, x0, T(t));
        case NodeKind::Add: return jet_node(n->a.get(), x0, t, D) + jet_node(n->b.get(), x0, t, D);
        case NodeKind::Sub: return jet_node(n->a.get(), x0, t, D) - jet_node(n->b.get(), x0, t, D);
        case NodeKind::Mul: return jet_node(n->a.get(), x0, t, D) * jet_node(n->b.get(), x0, t, D);
        case NodeKind::Div: {
            Jet<T> den = jet_node(n->b.get(), x0, t, D);
            return jet_node(n->a.get(), x0, t, D) * jet_inverse(den, print_node(n));
        }
        case NodeKind::Pow: return jet_pow(jet_node(n->a.get(), x0, t, D), n->exponent);
        case NodeKind::Exp: return jet_exp(jet_node(n->a.get(), x0, t, D));
        case NodeKind::Log: return jet_log(jet_node(n->a.get(), x0, t, D), print_node(n));
        case NodeKind::Sin:
        case NodeKind::Cos: {
            Jet<T> s(dim, D, x0), c(dim, D, x0);
            jet_sin_cos(jet_node(n->a.get(), x0, t, D), s, c);
            return n->kind == NodeKind::Sin ? s : c;
        }
    }
    throw std::logic_error("unreachable expression node");
}

// parsing ----------------------------------------------------------------

struct Parser {
    const std::string& s;
    std::size_t pos = 0;
    int dim;

    void skip_ws() {
        while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
    }
    char peek() {
        skip_ws();
        return pos < s.size() ? s[pos] : '\0';
    }
    bool consume(char c) {
        if (peek() == c) {
            ++pos;
            return true;
        }
        return false;
    }

    ExprPtr parse_expr() {
        ExprPtr e = parse_term();
        while (true) {
            char c = peek();
            if (c == '+' || c == '-') {
                ++pos;
                e = node_binary(c == '+' ? NodeKind::Add : NodeKind::Sub, e, parse_term());
            } else {
                return e;
            }
        }
    }

    ExprPtr parse_term() {
        ExprPtr e = parse_factor();
        while (true) {
            char c = peek();
            if (c == '*' || c == '/') {
                ++pos;
                e = node_binary(c == '*' ? NodeKind::Mul : NodeKind::Div, e, parse_factor());
            } else {
                return e;
            }
        }
    }

    ExprPtr parse_factor() {
        ExprPtr e = parse_atom();
        if (peek() == '^') {
            ++pos;
            e = node_pow(e, parse_uint());
        }
        return e;
    }

    int parse_uint() {
        skip_ws();
        std::size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos == start) throw ParseError("expected unsigned integer", start);
        return std::stoi(s.substr(start, pos - start));
    }

    ExprPtr parse_atom() {
        char c = peek();
        std::size_t start = pos;
        if (c == '(') {
            ++pos;
            ExprPtr e = parse_expr();
            if (!consume(')')) throw ParseError("expected ')'", pos);
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::string name;
            while (pos < s.size() && std::isalpha(static_cast<unsigned char>(s[pos])))
                name += s[pos++];
            if (name == "t") return node_time();
            if (name == "x") {
                if (pos >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos])))
                    throw ParseError("unknown identifier 'x' (state variables are x1..xN)",
                                     start);
                int idx = parse_uint();
                if (idx < 1 || idx > dim)
                    throw ParseError("state variable x" + std::to_string(idx) +
                                         " outside dimension " + std::to_string(dim),
                                     start);
                return node_var(idx - 1);
            }
            NodeKind fk;
            if (name == "exp") fk = NodeKind::Exp;
            else if (name == "log") fk = NodeKind::Log;
            else if (name == "sin") fk = NodeKind::Sin;
            else if (name == "cos") fk = NodeKind::Cos;
            else throw ParseError("unknown identifier '" + name + "'", start);
            if (!consume('(')) throw ParseError("expected '(' after " + name, pos);
            ExprPtr arg = parse_expr();
            if (!consume(')')) throw ParseError("expected ')'", pos);
            return node_func(fk, arg);
        }
        throw ParseError("unexpected character", pos);
    }

    ExprPtr parse_number() {
        skip_ws();
        std::size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos < s.size() && s[pos] == '.') {
            ++pos;
            std::size_t frac = pos;
            while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
            if (pos == frac) throw ParseError("expected digits after decimal point", pos);
        }
        if (pos < s.size() && (s[pos] == 'e' || s[pos] == 'E')) {
            std::size_t mark = pos;
            ++pos;
            if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) ++pos;
            std::size_t digs = pos;
            while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
            if (pos == digs) {
                pos = mark;  // not an exponent; leave for the caller ('e' can't
                             // start an identifier mid-number, so this errors later)
                throw ParseError("expected digits in exponent", digs);
            }
        }
        return node_const(std::stod(s.substr(start, pos - start)));
    }
};

// structural recursions -----------------------------------------------------

bool node_depends_on_time(const ExprNode* n) {
    switch (n->kind) {
        case NodeKind::TimeVar: return true;
        case NodeKind::Constant:
        case NodeKind::StateVar: return false;
        default:
            if (n->a && node_depends_on_time(n->a.get())) return true;
            if (n->b && node_depends_on_time(n->b.get())) return true;
            return false;
    }
}

int node_max_var(const ExprNode* n) {
    switch (n->kind) {
        case NodeKind::StateVar: return n->var + 1;
        case NodeKind::Constant:
        case NodeKind::TimeVar: return 0;
        default: {
            int m = 0;
            if (n->a) m = std::max(m, node_max_var(n->a.get()));
            if (n->b) m = std::max(m, node_max_var(n->b.get()));
            return m;
        }
    }
}

int node_count_rec(const ExprNode* n) {
    int c = 1;
    if (n->a) c += node_count_rec(n->a.get());
    if (n->b) c += node_count_rec(n->b.get());
    return c;
}

ExprPtr freeze_time(const ExprNode* n, double t) {
    switch (n->kind) {
        case NodeKind::Constant: return node_const(n->value);
        case NodeKind::StateVar: return node_var(n->var);
        case NodeKind::TimeVar: return node_const(t);
        case NodeKind::Add:
        case NodeKind::Sub:
        case NodeKind::Mul:
        case NodeKind::Div:
            return node_binary(n->kind, freeze_time(n->a.get(), t), freeze_time(n->b.get(), t));
        case NodeKind::Pow: return node_pow(freeze_time(n->a.get(), t), n->exponent);
        default: return node_func(n->kind, freeze_time(n->a.get(), t));
    }
}

ExprPtr diff_node(const ExprNode* n, int axis) {
    switch (n->kind) {
        case NodeKind::Constant:
        case NodeKind::TimeVar: return node_const(0.0);
        case NodeKind::StateVar: return node_const(n->var == axis ? 1.0 : 0.0);
        case NodeKind::Add:
        case NodeKind::Sub:
            return node_binary(n->kind, diff_node(n->a.get(), axis), diff_node(n->b.get(), axis));
        case NodeKind::Mul:
            return node_binary(
                NodeKind::Add,
                node_binary(NodeKind::Mul, diff_node(n->a.get(), axis), n->b),
                node_binary(NodeKind::Mul, n->a, diff_node(n->b.get(), axis)));
        case NodeKind::Div:
            return node_binary(
                NodeKind::Div,
                node_binary(NodeKind::Sub,
                            node_binary(NodeKind::Mul, diff_node(n->a.get(), axis), n->b),
                            node_binary(NodeKind::Mul, n->a, diff_node(n->b.get(), axis))),
                node_pow(n->b, 2));
        case NodeKind::Pow:
            return node_binary(
                NodeKind::Mul,
                node_binary(NodeKind::Mul, node_const(n->exponent),
                            node_pow(n->a, n->exponent - 1)),
                diff_node(n->a.get(), axis));
        case NodeKind::Exp:
            return node_binary(NodeKind::Mul, node_func(NodeKind::Exp, n->a),
                               diff_node(n->a.get(), axis));
        case NodeKind::Log:
            return node_binary(NodeKind::Div, diff_node(n->a.get(), axis), n->a);
        case NodeKind::Sin:
            return node_binary(NodeKind::Mul, node_func(NodeKind::Cos, n->a),
                               diff_node(n->a.get(), axis));
        case NodeKind::Cos:
            return node_binary(NodeKind::Mul,
                               node_binary(NodeKind::Sub, node_const(0.0),
                                           node_func(NodeKind::Sin, n->a)),
                               diff_node(n->a.get(), axis));
    }
    throw std::logic_error("unreachable expression node");
}

std::optional<int> poly_degree_node(const ExprNode* n) {
    switch (n->kind) {
        case NodeKind::Constant: return 0;
        case NodeKind::StateVar: return 1;
        case NodeKind::TimeVar: return std::nullopt;
        case NodeKind::Add:
        case NodeKind::Sub: {
            auto a = poly_degree_node(n->a.get()), b = poly_degree_node(n->b.get());
            if (!a || !b) return std::nullopt;
            return std::max(*a, *b);
        }
        case NodeKind::Mul: {
            auto a = poly_degree_node(n->a.get()), b = poly_degree_node(n->b.get());
            if (!a || !b) return std::nullopt;
            return *a + *b;
        }
        case NodeKind::Div: {
            auto a = poly_degree_node(n->a.get());
            if (!a || n->b->kind != NodeKind::Constant) return std::nullopt;
            return a;
        }
        case NodeKind::Pow: {
            auto a = poly_degree_node(n->a.get());
            if (!a) return std::nullopt;
            return *a * n->exponent;
        }
        default: return std::nullopt;
    }
}

void poly_insert(PolyMap& p, std::vector<int> mono, double c) {
    if (c == 0.0) return;
    auto [it, fresh] = p.emplace(std::move(mono), c);
    if (!fresh) {
        it->second += c;
        if (it->second == 0.0) p.erase(it);
    }
}

std::optional<PolyMap> poly_node(const ExprNode* n, int dim) {
    switch (n->kind) {
        case NodeKind::Constant: {
            PolyMap p;
            poly_insert(p, std::vector<int>(dim, 0), n->value);
            return p;
        }
        case NodeKind::StateVar: {
            if (n->var >= dim) return std::nullopt;
            PolyMap p;
            std::vector<int> m(dim, 0);
            m[n->var] = 1;
            poly_insert(p, std::move(m), 1.0);
            return p;
        }
        case NodeKind::Add:
        case NodeKind::Sub: {
            auto a = poly_node(n->a.get(), dim), b = poly_node(n->b.get(), dim);
            if (!a || !b) return std::nullopt;
            double sign = n->kind == NodeKind::Add ? 1.0 : -1.0;
            for (const auto& [m, c] : *b) poly_insert(*a, m, sign * c);
            return a;
        }
        case NodeKind::Mul: {
            auto a = poly_node(n->a.get(), dim), b = poly_node(n->b.get(), dim);
            if (!a || !b) return std::nullopt;
            return poly_mul(*a, *b, dim);
        }
        case NodeKind::Div: {
            if (n->b->kind != NodeKind::Constant || n->b->value == 0.0) return std::nullopt;
            auto a = poly_node(n->a.get(), dim);
            if (!a) return std::nullopt;
            PolyMap r;
            for (const auto& [m, c] : *a) poly_insert(r, m, c / n->b->value);
            return r;
        }
        case NodeKind::Pow: {
            auto a = poly_node(n->a.get(), dim);
            if (!a) return std::nullopt;
            PolyMap acc;
            poly_insert(acc, std::vector<int>(dim, 0), 1.0);
            for (int k = 0; k < n->exponent; ++k) acc = poly_mul(acc, *a, dim);
            return acc;
        }
        default: return std::nullopt;
    }
}

}  // namespace

// Expression ------------------------------------------------------------

Expression::Expression() : node_(node_const(0.0)) {}
Expression Expression::constant(double c) { return Expression(node_const(c)); }
Expression Expression::state_var(int axis) {
    if (axis < 0) throw std::invalid_argument("state variable axis must be >= 0");
    return Expression(node_var(axis));
}
Expression Expression::time_var() { return Expression(node_time()); }

Expression Expression::operator+(const Expression& o) const {
    return Expression(node_binary(NodeKind::Add, node_, o.node_));
}
Expression Expression::operator-(const Expression& o) const {
    return Expression(node_binary(NodeKind::Sub, node_, o.node_));
}
Expression Expression::operator*(const Expression& o) const {
    return Expression(node_binary(NodeKind::Mul, node_, o.node_));
}
Expression Expression::operator/(const Expression& o) const {
    return Expression(node_binary(NodeKind::Div, node_, o.node_));
}
Expression Expression::pow(int exponent) const { return Expression(node_pow(node_, exponent)); }

Expression exp_of(const Expression& e) { return Expression(node_func(NodeKind::Exp, e.node_)); }
Expression log_of(const Expression& e) { return Expression(node_func(NodeKind::Log, e.node_)); }
Expression sin_of(const Expression& e) { return Expression(node_func(NodeKind::Sin, e.node_)); }
Expression cos_of(const Expression& e) { return Expression(node_func(NodeKind::Cos, e.node_)); }

std::string Expression::str() const { return print_node(node_.get()); }

double Expression::eval_real(const std::vector<double>& x, double t) const {
    return eval_node<double>(node_.get(), x, t);
}

std::complex<double> Expression::eval_complex(const std::vector<std::complex<double>>& z,
                                              double t) const {
    return eval_node<std::complex<double>>(node_.get(), z, t);
}

Jet<double> Expression::jet_at(const std::vector<double>& x0, double t, int degree) const {
    if (degree < 0) throw std::invalid_argument("jet degree must be >= 0");
    return jet_node<double>(node_.get(), x0, t, degree);
}

Jet<std::complex<double>> Expression::jet_at_complex(
    const std::vector<std::complex<double>>& z0, double t, int degree) const {
    if (degree < 0) throw std::invalid_argument("jet degree must be >= 0");
    return jet_node<std::complex<double>>(node_.get(), z0, t, degree);
}

Expression Expression::diff(int axis) const { return Expression(diff_node(node_.get(), axis)); }

Expression Expression::with_time_frozen(double t) const {
    return Expression(freeze_time(node_.get(), t));
}

bool Expression::depends_on_time() const { return node_depends_on_time(node_.get()); }
int Expression::max_state_var() const { return node_max_var(node_.get()); }
int Expression::node_count() const { return node_count_rec(node_.get()); }

std::optional<int> Expression::polynomial_degree() const {
    return poly_degree_node(node_.get());
}

std::optional<PolyMap> Expression::to_polynomial(int dim) const {
    return poly_node(node_.get(), dim);
}

Expression parse_expression(const std::string& text, int dim) {
    if (dim < 1) throw std::invalid_argument("dimension must be >= 1");
    Parser p{text, 0, dim};
    ExprPtr e = p.parse_expr();
    p.skip_ws();
    if (p.pos != text.size()) throw ParseError("unexpected trailing input", p.pos);
    return Expression(std::move(e));
}

Expression poly_to_expression(const PolyMap& p, int dim) {
    Expression acc = Expression::constant(0.0);
    for (const auto& [mono, c] : p) {
        Expression term = Expression::constant(c);
        for (int i = 0; i < dim; ++i)
            if (mono[i] > 0) term = term * Expression::state_var(i).pow(mono[i]);
        acc = acc + term;
    }
    return acc;
}

PolyMap poly_mul(const PolyMap& a, const PolyMap& b, int dim) {
    PolyMap r;
    for (const auto& [ma, ca] : a)
        for (const auto& [mb, cb] : b) {
            std::vector<int> m(dim);
            for (int i = 0; i < dim; ++i) m[i] = ma[i] + mb[i];
            poly_insert(r, std::move(m), ca * cb);
        }
    return r;
}

PolyMap poly_diff(const PolyMap& p, int axis) {
    PolyMap r;
    for (const auto& [m, c] : p) {
        if (m[axis] == 0) continue;
        std::vector<int> d = m;
        d[axis] -= 1;
        poly_insert(r, std::move(d), c * m[axis]);
    }
    return r;
}

void poly_axpy(PolyMap& acc, const PolyMap& p, double scale) {
    for (const auto& [m, c] : p) poly_insert(acc, m, c * scale);
}

double poly_eval(const PolyMap& p, const std::vector<double>& x) {
    double acc = 0.0;
    for (const auto& [m, c] : p) {
        double term = c;
        for (std::size_t i = 0; i < m.size(); ++i)
            for (int k = 0; k < m[i]; ++k) term *= x[i];
        acc += term;
    }
    return acc;
}

double poly_max_abs_coeff(const PolyMap& p) {
    double mx = 0.0;
    for (const auto& [m, c] : p) mx = std::max(mx, std::fabs(c));
    return mx;
}

// VectorField ------------------------------------------------------------

VectorField::VectorField(int n, std::vector<Expression> comps, std::string name)
    : dim(n), components(std::move(comps)), label(std::move(name)) {
    if (dim < 1) throw std::invalid_argument("vector field dimension must be >= 1");
    if (static_cast<int>(components.size()) != dim)
        throw std::invalid_argument("vector field component count must equal dimension");
    for (const auto& c : components)
        if (c.max_state_var() > dim)
            throw std::invalid_argument("component references a variable beyond the dimension");
}

bool VectorField::depends_on_time() const {
    for (const auto& c : components)
        if (c.depends_on_time()) return true;
    return false;
}

VectorField VectorField::with_time_frozen(double t) const {
    std::vector<Expression> comps;
    comps.reserve(components.size());
    for (const auto& c : components) comps.push_back(c.with_time_frozen(t));
    return VectorField(dim, std::move(comps), label);
}

Expression apply_derivation(const VectorField& X, const Expression& f) {
    if (f.max_state_var() > X.dim)
        throw std::invalid_argument("observable references a variable beyond the field dimension");
    Expression acc = Expression::constant(0.0);
    for (int i = 0; i < X.dim; ++i) acc = acc + X.components[i] * f.diff(i);
    return acc;
}

Jet<double> apply_derivation(const VectorField& X, const Jet<double>& f, double t) {
    if (f.degree() < 1)
        throw std::invalid_argument("degree budget exhausted: derivation needs jet degree >= 1");
    if (f.dim() != X.dim) throw std::invalid_argument("jet/field dimension mismatch");
    int d = f.degree() - 1;
    Jet<double> acc(f.dim(), d, f.base_point());
    for (int i = 0; i < X.dim; ++i) {
        Jet<double> xi = X.components[i].jet_at(f.base_point(), t, d);
        acc = acc + xi * f.diff(i);
    }
    return acc;
}

}  // namespace anaflow
