#pragma once

#include "anaflow/expression.hpp"
#include "anaflow/weights.hpp"

#include <optional>
#include <string>
#include <vector>

namespace anaflow {

/// Compact axis-aligned box K with a uniform sample grid.
struct CompactBox {
    std::vector<double> lo, hi;
    int grid = 33;  // sample points per axis

    CompactBox() = default;
    CompactBox(std::vector<double> lo_, std::vector<double> hi_, int grid_ = 33);
    static CompactBox interval(double a, double b, int grid = 33);

    int dim() const { return static_cast<int>(lo.size()); }
    std::vector<double> axis_points(int axis) const;
    /// Full tensor grid, row-major over axes.
    std::vector<std::vector<double>> grid_points() const;
    bool contains(const std::vector<double>& x, double slack = 0.0) const;
};

/// Product of complex discs of radius `radius` centered along the box:
/// { z : |z_j - x_j| <= radius for some x in K }.
struct Polydisc {
    CompactBox center;
    double radius = 0.5;
    int boundary_samples = 0;  // angles per axis; 0 = dimension-based default

    Polydisc() = default;
    Polydisc(CompactBox K, double d, int angles = 0);
    int angles() const;
};

struct SeminormValue {
    double computed_sup = 0.0;
    int achieved_order = 0;
    std::vector<double> achieved_at;
    std::optional<double> tail_bound;  // Cauchy-tail certificate past the horizon
    bool rigorous = false;             // true iff tail_bound present and added
    /// Last-order trend: max term at the truncation horizon, kept so
    /// divergence with growing R stays visible in reports.
    double last_order_term = 0.0;

    double value() const { return computed_sup + tail_bound.value_or(0.0); }
};

enum class FieldNorm { MaxComponent, Euclidean };

struct SeminormOptions {
    /// When set, adds the geometric Cauchy tail certificate computed from the
    /// holomorphic sup-norm on this polydisc.
    std::optional<Polydisc> majorant;
    FieldNorm field_norm = FieldNorm::MaxComponent;
    double supnorm_safety = 1.05;
};

/// sup over the K-grid and derivative orders <= R of
/// (a_0...a_{|r|}/|r|!) * |D^{(r)} f(x)|. Exact (tail 0, rigorous) for
/// polynomials whose degree fits the horizon.
SeminormValue seminorm_function(const Expression& f, const CompactBox& K,
                                const WeightSequence& a, double t = 0.0,
                                const SeminormOptions& opts = {});

/// Componentwise seminorm combined by max over i (or by the Euclidean norm
/// of the per-component derivative vector when selected).
SeminormValue seminorm_field(const VectorField& X, const CompactBox& K,
                             const WeightSequence& a, double t = 0.0,
                             const SeminormOptions& opts = {});

/// sup |f| over the polydisc, sampled on the distinguished boundary
/// (max-modulus principle), times a sampling-safety factor. Throws
/// DomainError when f is not boundedly extendable on V.
double holo_supnorm(const Expression& f, const Polydisc& V, double t = 0.0,
                    double safety = 1.05);

struct DerivationBoundReport {
    double lhs = 0.0;  // p_{K,a_n}(X̂ f)
    double rhs = 0.0;  // 4N(n+1) max_i p_{K,b_n}(X^i) * p_{K,a_{n+1}}(f)
    bool holds = false;
};

/// Checks the derivation seminorm estimate with lifted weight sequences.
DerivationBoundReport check_derivation_bound(const VectorField& X, const Expression& f,
                                             const CompactBox& K, const WeightSequence& a,
                                             int n, double t = 0.0);

namespace detail {
/// Least-squares slope of log|c_k| vs k over the window [R/2, R]; returns
/// the implied singularity distance exp(-slope), the entire sentinel (+inf)
/// when the decay is superlinear in log or the window degenerates.
double radius_from_coeffs(const std::vector<double>& abs_coeffs);
double radius_from_jet_axis(const Jet<double>& jet, int axis);
}  // namespace detail

}  // namespace anaflow
