#include "anaflow/flowseries.hpp"

#include "anaflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

namespace anaflow {

namespace {
constexpr double kOverflowGuard = 1e300;

double pow_int(double base, int e) {
    double acc = 1.0;
    while (e > 0) {
        if (e & 1) acc *= base;
        e >>= 1;
        if (e) base *= base;
    }
    return acc;
}

// Iterated derivations are the series engine; polynomial observables are
// rewritten to monomial normal form at every step so their trees stay flat.
// Both the Lie and the Picard route go through this one function, which is
// what makes their outputs comparable term by term.
Expression derive_observable(const VectorField& X, const Expression& f) {
    Expression g = apply_derivation(X, f);
    if (auto p = g.to_polynomial(X.dim)) return poly_to_expression(*p, X.dim);
    return g;
}
}  // namespace

// TimeSeries ---------------------------------------------------------------

double TimeSeries::eval(double t, const std::vector<double>& x) const {
    double dt = t - t_lo;
    double acc = 0.0;
    for (const auto& term : terms)
        acc += term.scale * pow_int(dt, term.tpow) * term.expr.eval_real(x);
    return acc;
}

int TimeSeries::max_tpow() const {
    int m = 0;
    for (const auto& term : terms) m = std::max(m, term.tpow);
    return m;
}

double PiecewiseSeries::eval(double t, const std::vector<double>& x) const {
    if (pieces.empty()) throw std::invalid_argument("empty piecewise series");
    if (t < breakpoints.front() - 1e-12 || t > breakpoints.back() + 1e-12)
        throw std::invalid_argument("time outside the series span");
    auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t);
    int idx = std::clamp(static_cast<int>(it - breakpoints.begin()) - 1, 0,
                         static_cast<int>(pieces.size()) - 1);
    return pieces[idx].eval(t, x);
}

// Lie series ---------------------------------------------------------------

TimeSeries lie_series_terms(const VectorField& X, const Expression& f, int order,
                            int node_guard) {
    if (order < 0) throw std::invalid_argument("series order must be >= 0");
    if (X.depends_on_time())
        throw std::invalid_argument("lie series needs an autonomous field");
    TimeSeries out;
    out.terms.push_back({1.0, 0, f});
    Expression term = f;
    double scale = 1.0;
    long nodes = f.node_count();
    for (int k = 1; k <= order; ++k) {
        term = derive_observable(X, term);
        scale = scale / k;
        nodes += term.node_count();
        if (nodes > node_guard)
            throw std::overflow_error("expression-size guard exceeded in series terms");
        out.terms.push_back({scale, k, term});
    }
    return out;
}

Expression lie_series_apply(const VectorField& X, double dt, const Expression& f, int order) {
    TimeSeries ts = lie_series_terms(X, f, order);
    Expression acc = Expression::constant(0.0);
    for (const auto& term : ts.terms) {
        double c = term.scale * pow_int(dt, term.tpow);
        if (!std::isfinite(c) || std::fabs(c) > kOverflowGuard)
            throw std::overflow_error("series term coefficient overflow");
        acc = acc + term.expr * Expression::constant(c);
    }
    return acc;
}

Jet<double> lie_series_apply_jet(const VectorField& X, double dt, const Expression& f,
                                 const std::vector<double>& x0, int order, int out_degree) {
    if (order < 0 || out_degree < 0)
        throw std::invalid_argument("series order and output degree must be >= 0");
    int budget = out_degree + order;
    Jet<double> g = f.jet_at(x0, 0.0, budget);
    // pre-extract component jets once; truncation happens inside products
    std::vector<Jet<double>> xi;
    xi.reserve(X.components.size());
    for (const auto& c : X.components)
        xi.push_back(c.jet_at(x0, 0.0, budget > 0 ? budget - 1 : 0));

    Jet<double> acc = g.truncated(out_degree);
    double c = 1.0;
    for (int k = 1; k <= order; ++k) {
        Jet<double> next(g.dim(), g.degree() - 1, x0);
        for (int i = 0; i < X.dim; ++i)
            next = next + xi[i].truncated(g.degree() - 1) * g.diff(i);
        g = next;
        c = c * dt / k;
        acc = acc + g.truncated(out_degree).scaled(c);
    }
    return acc;
}

std::vector<double> lie_step_point(const VectorField& X, const std::vector<double>& x,
                                   double dt, int order) {
    std::vector<double> out(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        Jet<double> r = lie_series_apply_jet(X, dt, Expression::state_var(static_cast<int>(j)),
                                             x, order, 0);
        out[j] = r.value();
    }
    return out;
}

std::vector<double> lie_term_values(const VectorField& X, double dt, const Expression& f,
                                    const std::vector<double>& x, int order) {
    Jet<double> g = f.jet_at(x, 0.0, order);
    std::vector<Jet<double>> xi;
    for (const auto& c : X.components)
        xi.push_back(c.jet_at(x, 0.0, std::max(0, order - 1)));
    std::vector<double> out;
    out.reserve(order + 1);
    out.push_back(g.value());
    double c = 1.0;
    for (int k = 1; k <= order; ++k) {
        Jet<double> next(g.dim(), g.degree() - 1, x);
        for (int i = 0; i < X.dim; ++i)
            next = next + xi[i].truncated(g.degree() - 1) * g.diff(i);
        g = next;
        c = c * dt / k;
        out.push_back(c * g.value());
    }
    return out;
}

// Picard iteration -----------------------------------------------------------

namespace {

StepField restrict_field(const StepField& X, const TimeInterval& T) {
    if (!(X.span().contains(T.t_start) && X.span().contains(T.t_end)))
        throw std::invalid_argument("step field does not cover the requested interval");
    if (!(T.length() > 0.0))
        throw std::invalid_argument("picard interval must be nondegenerate");
    std::vector<double> breaks{T.t_start};
    std::vector<VectorField> pieces;
    for (int p = 0; p < X.piece_count(); ++p) {
        double lo = std::max(X.breakpoints[p], T.t_start);
        double hi = std::min(X.breakpoints[p + 1], T.t_end);
        if (hi - lo <= 1e-15) continue;
        breaks.push_back(hi);
        pieces.push_back(X.pieces[p]);
    }
    return StepField(X.dim, std::move(breaks), std::move(pieces));
}

PiecewiseSeries picard_rec(const StepField& X, const Expression& f, int k, int node_guard,
                           long& nodes) {
    PiecewiseSeries out;
    out.breakpoints = X.breakpoints;
    if (k == 0) {
        for (int p = 0; p < X.piece_count(); ++p) {
            TimeSeries ts;
            ts.t_lo = X.breakpoints[p];
            ts.terms.push_back({1.0, 0, f});
            out.pieces.push_back(std::move(ts));
        }
        return out;
    }
    // phi_k(t)(f) = f + int_{t0}^{t} phi_{k-1}(tau)(X̂_{p(tau)} f) dtau
    std::vector<PiecewiseSeries> inner;
    inner.reserve(X.piece_count());
    for (int p = 0; p < X.piece_count(); ++p) {
        Expression g = derive_observable(X.pieces[p], f);
        nodes += g.node_count();
        if (nodes > node_guard)
            throw std::overflow_error("expression-size guard exceeded in picard iteration");
        inner.push_back(picard_rec(X, g, k - 1, node_guard, nodes));
    }

    // carry = integral over the full earlier pieces, accumulated left to right
    std::vector<SeriesTerm> carry;
    for (int p = 0; p < X.piece_count(); ++p) {
        TimeSeries ts;
        ts.t_lo = X.breakpoints[p];
        ts.terms.push_back({1.0, 0, f});
        for (const auto& c : carry) ts.terms.push_back(c);
        // in-piece integral of inner[p] restricted to piece p
        const TimeSeries& src = inner[p].pieces[p];
        for (const auto& term : src.terms)
            ts.terms.push_back({term.scale / (term.tpow + 1), term.tpow + 1, term.expr});
        out.pieces.push_back(ts);

        // extend the carry with this piece's full-width integral
        double w = X.breakpoints[p + 1] - X.breakpoints[p];
        for (const auto& term : src.terms) {
            double c = term.scale / (term.tpow + 1) * pow_int(w, term.tpow + 1);
            carry.push_back({c, 0, term.expr});
        }
    }
    return out;
}

}  // namespace

PiecewiseSeries picard_iterate(const StepField& X, const TimeInterval& T, const Expression& f,
                               int iterations, int node_guard) {
    if (iterations < 0) throw std::invalid_argument("iteration count must be >= 0");
    StepField clipped = restrict_field(X, T);
    long nodes = 0;
    return picard_rec(clipped, f, iterations, node_guard, nodes);
}

// Certification ---------------------------------------------------------------

double FlowCertificate::total_tail() const {
    double acc = 0.0;
    for (const auto& s : subintervals) acc += s.tail_bound;
    return acc;
}

double FlowCertificate::total_coord_tail() const {
    double acc = 0.0;
    for (const auto& s : subintervals) acc += s.coord_tail;
    return acc;
}

double FlowCertificate::residual_bound() const {
    double e = 0.0;
    for (const auto& s : subintervals)
        e = e * std::exp(s.lipschitz * (s.t_hi - s.t_lo)) + s.coord_tail;
    return e;
}

namespace {

double series_tail(double M, int order, double majorant) {
    if (M <= 0.0) return 0.0;
    return std::pow(M, order + 1) / (1.0 - M) * majorant;
}

int pick_order(double M, double target, double m1, double m2, int max_order) {
    if (M <= 0.0) return 0;
    for (int n = 0; n <= max_order; ++n)
        if (series_tail(M, n, m1) <= target && series_tail(M, n, m2) <= target) return n;
    return -1;
}

}  // namespace

FlowCertificate certify(const StepField& X, const TimeInterval& T, const CompactBox& K,
                        const Polydisc& V, const Expression& f, const CertifyOptions& opts) {
    if (K.dim() != X.dim) throw std::invalid_argument("box/field dimension mismatch");
    if (!(X.span().contains(T.t_start) && X.span().contains(T.t_end)))
        throw CertifyError("step field does not cover the certification interval");
    if (f.max_state_var() > X.dim)
        throw CertifyError("observable references a variable beyond the field dimension");

    FlowCertificate cert;
    cert.field_digest = X.digest();
    cert.span = T;
    cert.initial_box = K;
    cert.polydisc_radius = V.radius;
    cert.observable = f.str();
    cert.target_tail = opts.target_tail;

    // tracked box: K at coarse resolution, flowed forward subinterval by
    // subinterval and inflated by the coordinate tail
    CompactBox box = K;
    box.grid = opts.box_track_grid;

    // piece-aligned segments, processed left to right; halves pushed on a
    // front stack when M exceeds 1/2
    std::deque<std::pair<double, double>> work;
    {
        double lo = T.t_start;
        while (lo < T.t_end - 1e-15) {
            int p = X.piece_index(lo);
            double hi = std::min(X.breakpoints[p + 1], T.t_end);
            work.emplace_back(lo, std::max(hi, lo));
            lo = std::max(hi, lo + 1e-15);
        }
    }
    if (work.empty()) return cert;  // zero-length interval: identity operator

    while (!work.empty()) {
        auto [lo, hi] = work.front();
        work.pop_front();
        if (static_cast<int>(cert.subintervals.size()) >= opts.max_subintervals)
            throw CertifyError(
                "blow-up proximity: subdivision budget exhausted before covering the interval");

        int piece = X.piece_index(0.5 * (lo + hi));
        const VectorField& field = X.pieces[piece];
        Polydisc disc(box, V.radius);

        double m = 0.0;
        try {
            for (const auto& c : field.components)
                m = std::max(m, holo_supnorm(c, disc, 0.0, opts.supnorm_safety));
        } catch (const DomainError& e) {
            throw CertifyError(std::string("piece not boundedly extendable on the polydisc; "
                                           "shrink K or the radius: ") +
                               e.what());
        }
        m *= 4.0 * X.dim;

        double width = hi - lo;
        double M = m * width;
        if (M > 0.5) {
            double mid = 0.5 * (lo + hi);
            work.emplace_front(mid, hi);
            work.emplace_front(lo, mid);
            continue;
        }

        double M_f, Mtil_f, M_coord = 0.0, lip = 0.0;
        try {
            M_f = holo_supnorm(f, disc, 0.0, opts.supnorm_safety);
            Mtil_f = holo_supnorm(apply_derivation(field, f), disc, 0.0, opts.supnorm_safety);
            for (int j = 0; j < X.dim; ++j)
                M_coord = std::max(M_coord, holo_supnorm(Expression::state_var(j), disc, 0.0,
                                                         opts.supnorm_safety));
            for (int i = 0; i < X.dim; ++i) {
                double row = 0.0;
                for (int j = 0; j < X.dim; ++j)
                    row += holo_supnorm(field.components[i].diff(j), disc, 0.0,
                                        opts.supnorm_safety);
                lip = std::max(lip, row);
            }
        } catch (const DomainError& e) {
            throw CertifyError(std::string("observable not boundedly extendable on the "
                                           "recentered polydisc: ") +
                               e.what());
        }

        int n = pick_order(M, opts.target_tail, M_f, M_coord, opts.max_order);
        if (n < 0)
            throw CertifyError("target_tail unreachable within max order " +
                               std::to_string(opts.max_order));

        SubintervalCertificate sub;
        sub.t_lo = lo;
        sub.t_hi = hi;
        sub.piece = piece;
        sub.m_bound = m;
        sub.M = M;
        sub.order = n;
        sub.M_f = M_f;
        sub.Mtil_f = Mtil_f;
        sub.M_coord = M_coord;
        sub.tail_bound = series_tail(M, n, M_f);
        sub.coord_tail = series_tail(M, n, M_coord);
        sub.lipschitz = lip;
        sub.box = box;
        sub.disc_radius = V.radius;
        cert.subintervals.push_back(sub);

        // flow the tracked box through this subinterval
        std::vector<double> lo_new(X.dim, std::numeric_limits<double>::infinity());
        std::vector<double> hi_new(X.dim, -std::numeric_limits<double>::infinity());
        for (const auto& p : box.grid_points()) {
            std::vector<double> q = lie_step_point(field, p, width, n);
            for (int j = 0; j < X.dim; ++j) {
                if (!std::isfinite(q[j]) || std::fabs(q[j]) > opts.value_guard)
                    throw CertifyError("blow-up proximity: trajectory escape while tracking K");
                lo_new[j] = std::min(lo_new[j], q[j]);
                hi_new[j] = std::max(hi_new[j], q[j]);
            }
        }
        double margin = sub.coord_tail;
        for (int j = 0; j < X.dim; ++j) {
            lo_new[j] -= margin;
            hi_new[j] += margin;
        }
        box = CompactBox(std::move(lo_new), std::move(hi_new), opts.box_track_grid);
    }
    return cert;
}

// Flow evaluation ---------------------------------------------------------

FlowOperator::FlowOperator(StepField field, FlowCertificate cert)
    : field_(std::move(field)), cert_(std::move(cert)) {
    if (field_.digest() != cert_.field_digest)
        throw std::invalid_argument("certificate mismatch: field digest differs");
}

FlowResult FlowOperator::flow_point(const std::vector<double>& x0, double t) const {
    if (static_cast<int>(x0.size()) != field_.dim)
        throw std::invalid_argument("point dimension mismatch");
    if (!cert_.initial_box.contains(x0, 1e-9))
        throw std::invalid_argument("certificate mismatch: point outside the certified box");
    if (t < cert_.span.t_start - 1e-12 || t > cert_.span.t_end + 1e-12)
        throw std::invalid_argument("certificate mismatch: time outside the certified span");

    std::vector<double> x = x0;
    double residual = 0.0;
    for (const auto& sub : cert_.subintervals) {
        if (sub.t_lo >= t - 1e-15) break;
        double dt = std::min(sub.t_hi, t) - sub.t_lo;
        x = lie_step_point(field_.pieces[sub.piece], x, dt, sub.order);
        for (double v : x)
            if (!std::isfinite(v) || std::fabs(v) > 1e12)
                throw CertifyError("trajectory escape during certified evaluation");
        residual = residual * std::exp(sub.lipschitz * (sub.t_hi - sub.t_lo)) +
                   sub.coord_tail;
    }
    return {std::move(x), residual};
}

std::optional<PolyMap> FlowOperator::pullback_polynomial(const Expression& f) const {
    int N = field_.dim;
    auto obs = f.to_polynomial(N);
    if (!obs) return std::nullopt;
    std::vector<std::optional<std::vector<PolyMap>>> piece_polys(field_.piece_count());
    for (auto it = cert_.subintervals.rbegin(); it != cert_.subintervals.rend(); ++it) {
        const auto& sub = *it;
        auto& pp = piece_polys[sub.piece];
        if (!pp) {
            std::vector<PolyMap> comps;
            for (const auto& c : field_.pieces[sub.piece].components) {
                auto cp = c.to_polynomial(N);
                if (!cp) return std::nullopt;
                comps.push_back(std::move(*cp));
            }
            pp = std::move(comps);
        }
        double dt = sub.t_hi - sub.t_lo;
        PolyMap acc = *obs;
        PolyMap term = *obs;
        double c = 1.0;
        for (int k = 1; k <= sub.order; ++k) {
            PolyMap next;
            for (int i = 0; i < N; ++i)
                poly_axpy(next, poly_mul((*pp)[i], poly_diff(term, i), N), 1.0);
            term = std::move(next);
            if (term.empty()) break;  // derivation annihilated the observable
            c = c * dt / k;
            if (poly_max_abs_coeff(term) * std::fabs(c) > kOverflowGuard)
                throw std::overflow_error("series term coefficient overflow");
            poly_axpy(acc, term, c);
        }
        obs = std::move(acc);
    }
    return obs;
}

double FlowOperator::pullback_value(const Expression& f, const std::vector<double>& x0) const {
    if (auto p = pullback_polynomial(f)) return poly_eval(*p, x0);

    int budget = 0;
    for (const auto& sub : cert_.subintervals) budget += sub.order;
    int limit = field_.dim == 1 ? 128 : (field_.dim == 2 ? 64 : 32);
    if (budget > limit)
        throw std::overflow_error(
            "degree budget exhausted: operator composition needs degree " +
            std::to_string(budget));

    Jet<double> g = f.jet_at(x0, 0.0, budget);
    for (auto it = cert_.subintervals.rbegin(); it != cert_.subintervals.rend(); ++it) {
        const auto& sub = *it;
        const VectorField& field = field_.pieces[sub.piece];
        double dt = sub.t_hi - sub.t_lo;
        int out_deg = g.degree() - sub.order;
        Jet<double> acc = g.truncated(out_deg);
        Jet<double> term = g;
        double c = 1.0;
        std::vector<Jet<double>> xi;
        for (const auto& comp : field.components)
            xi.push_back(comp.jet_at(x0, 0.0, std::max(0, g.degree() - 1)));
        for (int k = 1; k <= sub.order; ++k) {
            Jet<double> next(term.dim(), term.degree() - 1, x0);
            for (int i = 0; i < field_.dim; ++i)
                next = next + xi[i].truncated(term.degree() - 1) * term.diff(i);
            term = next;
            c = c * dt / k;
            acc = acc + term.truncated(out_deg).scaled(c);
        }
        g = std::move(acc);
    }
    return g.value();
}

double FlowOperator::observable_tail(const Expression& h) const {
    double acc = 0.0;
    for (const auto& sub : cert_.subintervals) {
        Polydisc disc(sub.box, sub.disc_radius);
        double mh = holo_supnorm(h, disc);
        acc += series_tail(sub.M, sub.order, mh);
    }
    return acc;
}

FlowResult flow_eval(const StepField& X, double t0, double t, const std::vector<double>& x0,
                     const FlowCertificate& cert) {
    if (std::fabs(t0 - cert.span.t_start) > 1e-12)
        throw std::invalid_argument("certificate mismatch: t0 differs from the certified start");
    FlowOperator op(X, cert);
    return op.flow_point(x0, t);
}

}  // namespace anaflow
