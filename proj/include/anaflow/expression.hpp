#pragma once

#include "anaflow/errors.hpp"
#include "anaflow/jet.hpp"

#include <complex>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace anaflow {

enum class NodeKind { Constant, StateVar, TimeVar, Add, Sub, Mul, Div, Pow, Exp, Log, Sin, Cos };

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
    NodeKind kind;
    double value = 0.0;  // Constant
    int var = 0;         // StateVar axis, 0-based
    int exponent = 0;    // Pow
    ExprPtr a, b;
};

/// Monomial map of a polynomial in the state variables; exponent vector ->
/// coefficient, ordered, so arithmetic is deterministic.
using PolyMap = std::map<std::vector<int>, double>;

/// Immutable closed-form expression in x1..xN and t. Built by the parser or
/// the operator algebra; light constant folding keeps iterated derivations
/// from ballooning.
class Expression {
public:
    Expression();  // constant 0
    static Expression constant(double c);
    static Expression state_var(int axis);  // x_{axis+1}
    static Expression time_var();

    const ExprPtr& node() const { return node_; }

    Expression operator+(const Expression& o) const;
    Expression operator-(const Expression& o) const;
    Expression operator*(const Expression& o) const;
    Expression operator/(const Expression& o) const;
    Expression pow(int exponent) const;

    friend Expression exp_of(const Expression& e);
    friend Expression log_of(const Expression& e);
    friend Expression sin_of(const Expression& e);
    friend Expression cos_of(const Expression& e);

    /// Canonical printer; parses back to the same tree.
    std::string str() const;
    bool same_as(const Expression& o) const { return str() == o.str(); }

    double eval_real(const std::vector<double>& x, double t = 0.0) const;
    std::complex<double> eval_complex(const std::vector<std::complex<double>>& z,
                                      double t = 0.0) const;

    /// Taylor coefficients at x0 through total degree D (time frozen at t).
    Jet<double> jet_at(const std::vector<double>& x0, double t, int degree) const;
    Jet<std::complex<double>> jet_at_complex(const std::vector<std::complex<double>>& z0,
                                             double t, int degree) const;

    /// Symbolic d/dx_axis.
    Expression diff(int axis) const;
    /// Substitute t by a constant.
    Expression with_time_frozen(double t) const;

    bool depends_on_time() const;
    int max_state_var() const;  // highest axis referenced + 1 (0 if none)
    int node_count() const;

    /// Total degree when polynomial in the state variables (no t, no
    /// elementary functions, division only by constants); nullopt otherwise.
    std::optional<int> polynomial_degree() const;
    /// Monomial expansion under the same conditions.
    std::optional<PolyMap> to_polynomial(int dim) const;

private:
    explicit Expression(ExprPtr node) : node_(std::move(node)) {}
    friend Expression parse_expression(const std::string& text, int dim);
    ExprPtr node_;
};

Expression exp_of(const Expression& e);
Expression log_of(const Expression& e);
Expression sin_of(const Expression& e);
Expression cos_of(const Expression& e);

/// Parse against the published grammar:
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := atom ('^' uint)?
///   atom   := number | 'x'uint | 't' | func '(' expr ')' | '(' expr ')'
///   func   := exp|log|sin|cos
/// State variables x1..x`dim`; anything else is an unknown identifier.
Expression parse_expression(const std::string& text, int dim);

Expression poly_to_expression(const PolyMap& p, int dim);

PolyMap poly_mul(const PolyMap& a, const PolyMap& b, int dim);
PolyMap poly_diff(const PolyMap& p, int axis);
void poly_axpy(PolyMap& acc, const PolyMap& p, double scale);
double poly_eval(const PolyMap& p, const std::vector<double>& x);
double poly_max_abs_coeff(const PolyMap& p);

/// Vector field with one component expression per state axis.
struct VectorField {
    int dim = 0;
    std::vector<Expression> components;
    std::string label;

    VectorField() = default;
    VectorField(int n, std::vector<Expression> comps, std::string name = "");
    bool depends_on_time() const;
    VectorField with_time_frozen(double t) const;
};

/// X̂(f) = sum_i X^i * df/dx_i, exact symbolic form.
Expression apply_derivation(const VectorField& X, const Expression& f);

/// Jet-level derivation at fixed time; result degree is one lower.
Jet<double> apply_derivation(const VectorField& X, const Jet<double>& f, double t);

}  // namespace anaflow
