#pragma once

#include "anaflow/seminorms.hpp"
#include "anaflow/timevarying.hpp"

#include <optional>
#include <string>
#include <vector>

namespace anaflow {

/// One term scale * (t - t_lo)^tpow * expr(x) of a truncated series.
struct SeriesTerm {
    double scale = 0.0;
    int tpow = 0;
    Expression expr;
};

/// Truncated series on one time piece, anchored at t_lo.
struct TimeSeries {
    double t_lo = 0.0;
    std::vector<SeriesTerm> terms;

    double eval(double t, const std::vector<double>& x) const;
    int max_tpow() const;
};

/// Per-piece series aligned with a step field's breakpoints.
struct PiecewiseSeries {
    std::vector<double> breakpoints;
    std::vector<TimeSeries> pieces;

    double eval(double t, const std::vector<double>& x) const;
};

/// Terms (1/k!) * X̂^k f, k = 0..order, of the autonomous Lie series. The
/// scale recurrence divides by k stepwise so iterated-integral bookkeeping
/// reproduces it bit-exactly.
TimeSeries lie_series_terms(const VectorField& X, const Expression& f, int order,
                            int node_guard = 1 << 20);

/// Σ_{k<=order} dt^k/k! X̂^k f as a closed-form expression (symbolic backend;
/// guards on coefficient overflow and expression size).
Expression lie_series_apply(const VectorField& X, double dt, const Expression& f, int order);

/// Jet backend: the same series evaluated through truncated jets at x0; the
/// result keeps out_degree derivative orders and consumes a budget of
/// out_degree + order.
Jet<double> lie_series_apply_jet(const VectorField& X, double dt, const Expression& f,
                                 const std::vector<double>& x0, int order, int out_degree);

/// Picard iterates phi_k(t)(f) over the step structure: iterated time
/// integrals computed exactly as piecewise polynomials in t.
PiecewiseSeries picard_iterate(const StepField& X, const TimeInterval& T, const Expression& f,
                               int iterations, int node_guard = 1 << 20);

struct SubintervalCertificate {
    double t_lo = 0.0, t_hi = 0.0;
    int piece = 0;
    double m_bound = 0.0;      // 4N max_i p_V(X^i) on the recentered polydisc
    double M = 0.0;            // m_bound * width, kept <= 1/2
    int order = 0;             // series order n
    double M_f = 0.0;          // p_V of the observable
    double Mtil_f = 0.0;       // p_V of the derivation image X̂ f
    double M_coord = 0.0;      // max_j p_V of the coordinate observables
    double tail_bound = 0.0;   // M^{n+1}/(1-M) * M_f
    double coord_tail = 0.0;   // M^{n+1}/(1-M) * M_coord
    double lipschitz = 0.0;    // max_i sum_j p_V(dX^i/dx_j): Jacobian row bound
    CompactBox box;            // recentered K at t_lo
    double disc_radius = 0.0;
};

struct FlowCertificate {
    std::string field_digest;
    TimeInterval span;
    CompactBox initial_box;
    double polydisc_radius = 0.0;
    std::string observable;
    double target_tail = 0.0;
    std::vector<SubintervalCertificate> subintervals;

    double total_tail() const;
    double total_coord_tail() const;
    /// Point-flow residual: per-subinterval coordinate tails propagated
    /// through exp(lipschitz * width) of the remaining subintervals, with
    /// the Lipschitz constant sampled as the Jacobian sup-norm on the
    /// recentered polydisc.
    double residual_bound() const;
};

struct CertifyOptions {
    double target_tail = 1e-9;
    int max_order = 64;
    int max_subintervals = 4096;
    double supnorm_safety = 1.05;
    int box_track_grid = 9;    // sample resolution used to flow the box
    double value_guard = 1e12;
};

/// Subdivides T until each subinterval has M <= 1/2, picks the series order
/// meeting target_tail, and records majorants on per-subinterval recentered
/// polydiscs. Throws CertifyError when a piece is not boundedly extendable
/// over the tracked box (shrink K or the radius) or at blow-up proximity.
FlowCertificate certify(const StepField& X, const TimeInterval& T, const CompactBox& K,
                        const Polydisc& V, const Expression& f,
                        const CertifyOptions& opts = {});

struct FlowResult {
    std::vector<double> point;
    double residual_bound = 0.0;
};

/// Composes per-subinterval Lie-series pullbacks of the coordinate
/// observables, feeding the point forward. The certificate must match the
/// field and cover [t0, t].
FlowResult flow_eval(const StepField& X, double t0, double t, const std::vector<double>& x0,
                     const FlowCertificate& cert);

/// The certified truncated flow operator; identity when no subintervals are
/// included (t = t0).
class FlowOperator {
public:
    FlowOperator(StepField field, FlowCertificate cert);

    const FlowCertificate& certificate() const { return cert_; }
    const StepField& field() const { return field_; }

    FlowResult flow_point(const std::vector<double>& x0, double t) const;

    /// ζ(t_end)(f) for polynomial field pieces and polynomial f: the exact
    /// composition of truncated series, right-to-left.
    std::optional<PolyMap> pullback_polynomial(const Expression& f) const;
    /// Pointwise ζ(t_end)(f)(x0); polynomial path when possible, else the
    /// jet path with a degree budget of the summed subinterval orders.
    double pullback_value(const Expression& f, const std::vector<double>& x0) const;

    /// Σ over subintervals of M^{n+1}/(1-M) * p_V(h): the truncation tail of
    /// the composed series for an arbitrary observable h.
    double observable_tail(const Expression& h) const;

private:
    StepField field_;
    FlowCertificate cert_;
};

/// One autonomous Taylor/Lie step of the point flow (shared by flow_eval and
/// box tracking inside certify).
std::vector<double> lie_step_point(const VectorField& X, const std::vector<double>& x,
                                   double dt, int order);

/// Per-term values dt^k/k! (X̂^k f)(x) for k = 0..order.
std::vector<double> lie_term_values(const VectorField& X, double dt, const Expression& f,
                                    const std::vector<double>& x, int order);

}  // namespace anaflow
