#include "anaflow/oracle.hpp"

#include "anaflow/errors.hpp"
#include "anaflow/extension.hpp"
#include "anaflow/numfmt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace anaflow {

void ExperimentReport::finish() {
    pass = true;
    for (const auto& c : cases) pass = pass && c.pass;
}

double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw std::invalid_argument("slope fit needs matching samples, at least two");
    double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) continue;
        double lx = std::log(xs[i]), ly = std::log(ys[i]);
        n += 1;
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    if (n < 2) throw std::invalid_argument("slope fit needs at least two positive samples");
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<double> rk4_flow(const StepField& X, double t0, double t,
                             const std::vector<double>& x0, int steps) {
    if (steps < 1) throw std::invalid_argument("rk4 needs at least one step");
    if (!(X.span().contains(t0) && X.span().contains(t)))
        throw std::invalid_argument("rk4 times outside the step field span");
    if (t < t0) throw std::invalid_argument("rk4 integrates forward only");

    auto deriv = [&X](const VectorField& f, const std::vector<double>& x) {
        std::vector<double> d(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) d[i] = f.components[i].eval_real(x);
        return d;
    };

    // align segments with breakpoints, then distribute steps by width
    std::vector<std::pair<double, double>> segs;
    double lo = t0;
    while (lo < t - 1e-15) {
        int p = X.piece_index(lo);
        double hi = std::min(X.breakpoints[p + 1], t);
        segs.emplace_back(lo, std::max(hi, lo));
        lo = std::max(hi, lo + 1e-15);
    }

    std::vector<double> x = x0;
    double total = t - t0;
    for (const auto& [a, b] : segs) {
        const VectorField& f = X.piece_at(0.5 * (a + b));
        int n = std::max(1, static_cast<int>(std::llround(steps * (b - a) / total)));
        double h = (b - a) / n;
        for (int s = 0; s < n; ++s) {
            std::vector<double> k1 = deriv(f, x);
            std::vector<double> tmp(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
            std::vector<double> k2 = deriv(f, tmp);
            for (std::size_t i = 0; i < x.size(); ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
            std::vector<double> k3 = deriv(f, tmp);
            for (std::size_t i = 0; i < x.size(); ++i) tmp[i] = x[i] + h * k3[i];
            std::vector<double> k4 = deriv(f, tmp);
            for (std::size_t i = 0; i < x.size(); ++i) {
                x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
                if (!std::isfinite(x[i]) || std::fabs(x[i]) > 1e12)
                    throw std::runtime_error("rk4 blow-up guard tripped at t=" +
                                             fmt17(a + (s + 1) * h));
            }
        }
    }
    return x;
}

StepField step_linear_combination(const StepField& X, double a, const StepField& Y, double b) {
    if (X.dim != Y.dim) throw std::invalid_argument("field dimension mismatch");
    std::set<double> breakset(X.breakpoints.begin(), X.breakpoints.end());
    breakset.insert(Y.breakpoints.begin(), Y.breakpoints.end());
    std::vector<double> breaks(breakset.begin(), breakset.end());
    double lo = std::max(X.span().t_start, Y.span().t_start);
    double hi = std::min(X.span().t_end, Y.span().t_end);
    if (!(lo < hi)) throw std::invalid_argument("field spans do not overlap");
    std::erase_if(breaks, [&](double v) { return v < lo - 1e-15 || v > hi + 1e-15; });

    std::vector<VectorField> pieces;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        double mid = 0.5 * (breaks[i] + breaks[i + 1]);
        const VectorField& xf = X.piece_at(mid);
        const VectorField& yf = Y.piece_at(mid);
        std::vector<Expression> comps;
        for (int j = 0; j < X.dim; ++j)
            comps.push_back(xf.components[j] * Expression::constant(a) +
                            yf.components[j] * Expression::constant(b));
        pieces.emplace_back(X.dim, std::move(comps));
    }
    return StepField(X.dim, std::move(breaks), std::move(pieces));
}

ExperimentReport exp_continuity_experiment(const StepField& X, const StepField& Y,
                                           const std::vector<double>& epsilons,
                                           const Expression& f, const CompactBox& K,
                                           const TimeInterval& T) {
    ExperimentReport rep;
    rep.name = "exp-continuity";
    {
        std::ostringstream os;
        os << X.digest() << "|" << Y.digest() << "|" << f.str();
        rep.inputs_digest = os.str();
    }

    std::vector<StepField> family{X};
    for (double eps : epsilons) family.push_back(step_linear_combination(X, 1.0, Y, eps));
    CommonMajorant cm = common_majorant(family, K, {0.125, 0.25, 0.5, 0.75, 1.0});
    if (!cm.found)
        throw CertifyError("continuity experiment: no common polydisc for the family: " +
                           cm.failure);
    Polydisc V(K, cm.d_star);

    CertifyOptions copts;
    copts.target_tail = 1e-12;
    FlowCertificate cert_x = certify(X, T, K, V, f, copts);
    FlowOperator op_x(X, cert_x);

    // h_max = sum (r+1) m_tilde^r * p(f) from the certificate majorants
    double m_tilde = 0.0, pf = 0.0;
    for (const auto& s : cert_x.subintervals) {
        m_tilde += s.M;
        pf = std::max(pf, s.M_f);
    }
    double h_max = m_tilde < 1.0 ? pf / ((1.0 - m_tilde) * (1.0 - m_tilde))
                                 : std::numeric_limits<double>::infinity();
    rep.fitted["m_tilde"] = m_tilde;
    rep.fitted["h_max"] = h_max;

    auto grid = K.grid_points();
    std::vector<double> deltas, integrals;
    for (double eps : epsilons) {
        StepField Xe = step_linear_combination(X, 1.0, Y, eps);
        FlowCertificate cert_e = certify(Xe, T, K, V, f, copts);
        FlowOperator op_e(Xe, cert_e);
        double delta = 0.0;
        for (const auto& p : grid)
            delta = std::max(delta,
                             std::fabs(op_e.pullback_value(f, p) - op_x.pullback_value(f, p)));
        double integral = 0.0;
        for (int pi = 0; pi < Y.piece_count(); ++pi) {
            double width = Y.breakpoints[pi + 1] - Y.breakpoints[pi];
            double sup = 0.0;
            for (const auto& c : Y.pieces[pi].components)
                sup = std::max(sup, holo_supnorm(c, V, 0.0, 1.0));
            integral += sup * width;
        }
        integral *= std::fabs(eps);

        ExperimentCase ec;
        ec.input = "eps=" + fmt17(eps);
        ec.series_value = delta;
        ec.oracle_value = integral;
        ec.diff = delta;
        ec.bound = h_max * integral;
        ec.pass = delta <= ec.bound;
        rep.cases.push_back(ec);
        deltas.push_back(delta);
        integrals.push_back(integral);
    }

    bool degenerate = std::all_of(integrals.begin(), integrals.end(),
                                  [](double v) { return v == 0.0; });
    if (degenerate) {
        // zero perturbation: Delta must vanish and the fit is vacuous
        rep.fitted["slope"] = 1.0;
        rep.finish();
        rep.pass = rep.pass && std::all_of(deltas.begin(), deltas.end(),
                                           [](double v) { return v == 0.0; });
        return rep;
    }
    double slope = loglog_slope(integrals, deltas);
    rep.fitted["slope"] = slope;
    rep.finish();
    rep.pass = rep.pass && slope >= 0.9 && slope <= 1.1;
    return rep;
}

namespace {

ExperimentReport example1_report() {
    ExperimentReport rep;
    rep.name = "example-1-radius-family";
    rep.inputs_digest = "1/(1+n^2 x^2), n=1..8";
    double prev = std::numeric_limits<double>::infinity();
    for (int n = 1; n <= 8; ++n) {
        Expression f = parse_expression("1/(1+" + std::to_string(n * n) + "*x1^2)", 1);
        double r = radius_at(f, {0.0}, 0.0);
        double expect = 1.0 / n;
        ExperimentCase ec;
        ec.input = "n=" + std::to_string(n);
        ec.series_value = r;
        ec.oracle_value = expect;
        ec.diff = std::fabs(r - expect);
        ec.bound = 0.10 * expect;
        ec.pass = ec.diff <= ec.bound && r < prev;
        prev = r;
        rep.cases.push_back(ec);
    }
    rep.finish();
    return rep;
}

ExperimentReport example2_report() {
    ExperimentReport rep;
    rep.name = "example-2-non-extendability";
    rep.inputs_digest = "t^2/(t^2+x^2) near t=0";
    Expression comp = parse_expression("t^2/(t^2+x1^2)", 1);
    VectorField X(1, {comp});
    CompactBox K = CompactBox::interval(-0.1, 0.1, 17);

    std::vector<double> times{0.1, 0.05, 0.02, 0.01, 0.005, 0.002, 0.001};
    DomainEstimate est = domain_estimate(X, K, times);
    {
        ExperimentCase ec;
        ec.input = "domain_estimate verdict";
        ec.series_value = est.verdict == ExtensionVerdict::RadiusToZero ? 1.0 : 0.0;
        ec.oracle_value = 1.0;
        ec.diff = std::fabs(ec.series_value - 1.0);
        ec.bound = 0.0;
        ec.pass = est.verdict == ExtensionVerdict::RadiusToZero;
        rep.cases.push_back(ec);
    }
    {
        WeightSequence a = WeightSequence::geometric(0.25, 0.5, 12);
        Polydisc V(K, 0.05);
        IntegrabilityReport ir =
            integrability_report(X, TimeInterval(-0.1, 0.1), K, a, V, 33);
        ExperimentCase ec;
        ec.input = "seminorm_integral_diverges";
        ec.series_value = ir.seminorm_integral_diverges ? 1.0 : 0.0;
        ec.oracle_value = 1.0;
        ec.diff = std::fabs(ec.series_value - 1.0);
        ec.bound = 0.0;
        ec.pass = ir.seminorm_integral_diverges && !ir.locally_integrally_bounded;
        rep.cases.push_back(ec);
    }
    rep.finish();
    return rep;
}

ExperimentReport example3_report() {
    ExperimentReport rep;
    rep.name = "example-3-quadratic-family";
    rep.inputs_digest = "x/(1-nxt) flows and certified intervals";

    // closed-form flow checks
    struct Case {
        int n;
        double x0, t;
    };
    for (const Case& c : {Case{1, 0.5, 0.1}, Case{3, 0.2, 0.5}}) {
        VectorField X(1, {Expression::constant(c.n) * parse_expression("x1^2", 1)});
        StepField sf = StepField::autonomous(X, {0.0, c.t});
        CompactBox K({c.x0 - 0.05}, {c.x0 + 0.1}, 9);
        Polydisc V(K, 0.1);
        CertifyOptions opts;
        opts.target_tail = 1e-12;
        FlowCertificate cert = certify(sf, {0.0, c.t}, K, V, parse_expression("x1", 1), opts);
        FlowResult fr = flow_eval(sf, 0.0, c.t, {c.x0}, cert);
        double expect = c.x0 / (1.0 - c.n * c.x0 * c.t);
        ExperimentCase ec;
        ec.input = "n=" + std::to_string(c.n) + " x0=" + fmt17(c.x0) + " t=" + fmt17(c.t);
        ec.series_value = fr.point[0];
        ec.oracle_value = expect;
        ec.diff = std::fabs(fr.point[0] - expect);
        ec.bound = std::max(fr.residual_bound, 1e-8);
        ec.pass = ec.diff <= ec.bound;
        rep.cases.push_back(ec);
    }

    // certified half-width shrinks ~ 1/n
    std::vector<double> ns, widths;
    for (int n = 1; n <= 6; ++n) {
        VectorField X(1, {Expression::constant(n) * parse_expression("x1^2", 1)});
        auto certifiable = [&](double w) {
            try {
                StepField sf = StepField::autonomous(X, {0.0, 1.0});
                CompactBox K({-w}, {w}, 5);
                Polydisc V(K, w / 2.0);
                CertifyOptions opts;
                opts.target_tail = 1e-9;
                opts.max_subintervals = 256;
                certify(sf, {0.0, 1.0}, K, V, parse_expression("x1", 1), opts);
                return true;
            } catch (const CertifyError&) {
                return false;
            } catch (const std::overflow_error&) {
                return false;
            }
        };
        double lo = 0.0, hi = 2.0 / n;
        for (int it = 0; it < 22; ++it) {
            double mid = 0.5 * (lo + hi);
            (certifiable(mid) ? lo : hi) = mid;
        }
        ns.push_back(n);
        widths.push_back(lo);
        ExperimentCase ec;
        ec.input = "certified half-width, n=" + std::to_string(n);
        ec.series_value = lo;
        ec.oracle_value = widths.front() / n;
        ec.diff = std::fabs(lo - ec.oracle_value);
        ec.bound = 0.5 * ec.oracle_value;  // the rate is what matters; the fit is below
        ec.pass = lo > 0.0 && ec.diff <= ec.bound;
        rep.cases.push_back(ec);
    }
    double rate = loglog_slope(ns, widths);
    rep.fitted["interval_rate"] = rate;

    // blow-up proximity flag on the long interval
    {
        VectorField X(1, {parse_expression("x1^2", 1)});
        StepField sf = StepField::autonomous(X, {0.0, 3.0});
        CompactBox K({0.8}, {1.2}, 5);
        Polydisc V(K, 0.2);
        CertifyOptions opts;
        opts.max_subintervals = 256;
        bool flagged = false;
        std::string reason;
        try {
            certify(sf, {0.0, 3.0}, K, V, parse_expression("x1", 1), opts);
        } catch (const CertifyError& e) {
            flagged = true;
            reason = e.what();
        }
        ExperimentCase ec;
        ec.input = "blow-up flag on T=[0,3], K around 1";
        ec.series_value = flagged ? 1.0 : 0.0;
        ec.oracle_value = 1.0;
        ec.diff = flagged ? 0.0 : 1.0;
        ec.bound = 0.0;
        ec.pass = flagged;
        rep.cases.push_back(ec);
    }

    rep.finish();
    rep.pass = rep.pass && rate >= -1.2 && rate <= -0.8;
    return rep;
}

}  // namespace

std::vector<ExperimentReport> run_paper_examples() {
    return {example1_report(), example2_report(), example3_report()};
}

ExperimentReport series_vs_rk4_suite() {
    ExperimentReport rep;
    rep.name = "series-vs-rk4";

    struct Case {
        std::string label;
        StepField field;
        CompactBox box;
        double radius;
        std::vector<double> x0;
        double t_end;
    };
    auto fld1 = [](const std::string& e) {
        return VectorField(1, {parse_expression(e, 1)});
    };
    auto fld2 = [](const std::string& e1, const std::string& e2) {
        return VectorField(2, {parse_expression(e1, 2), parse_expression(e2, 2)});
    };

    std::vector<Case> cases;
    cases.push_back({"linear e-test", StepField::autonomous(fld1("x1"), {0.0, 1.0}),
                     CompactBox({0.8}, {3.0}, 9), 0.3, {1.0}, 1.0});
    cases.push_back({"linear decay", StepField::autonomous(fld1("0-x1"), {0.0, 1.0}),
                     CompactBox({0.2}, {1.2}, 9), 0.3, {1.0}, 1.0});
    cases.push_back({"quadratic", StepField::autonomous(fld1("x1^2"), {0.0, 0.1}),
                     CompactBox({0.3}, {0.6}, 9), 0.15, {0.5}, 0.1});
    cases.push_back({"sine field", StepField::autonomous(fld1("sin(x1)"), {0.0, 0.5}),
                     CompactBox({0.5}, {1.8}, 9), 0.4, {1.0}, 0.5});
    cases.push_back({"cubic pullback", StepField::autonomous(fld1("x1^3"), {0.0, 0.2}),
                     CompactBox({0.2}, {0.8}, 9), 0.2, {0.5}, 0.2});
    cases.push_back({"rotation", StepField::autonomous(fld2("x2", "0-x1"), {0.0, 1.0}),
                     CompactBox({-1.2, -1.2}, {1.2, 1.2}, 5), 0.3, {1.0, 0.0}, 1.0});
    cases.push_back({"pendulum", StepField::autonomous(fld2("x2", "0-sin(x1)"), {0.0, 0.5}),
                     CompactBox({-0.8, -0.8}, {0.8, 0.8}, 5), 0.3, {0.5, 0.0}, 0.5});
    {
        VectorField a = fld1("x1");
        std::vector<Expression> two{parse_expression("2*x1", 1)};
        StepField steps(1, {0.0, 0.5, 1.0}, {a, VectorField(1, std::move(two))});
        cases.push_back({"two-piece linear", std::move(steps),
                         CompactBox({0.5}, {5.0}, 9), 0.3, {1.0}, 1.0});
    }
    cases.push_back({"rational drift",
                     StepField::autonomous(fld1("1/(1+x1^2)"), {0.0, 1.0}),
                     CompactBox({-0.1}, {0.9}, 9), 0.25, {0.0}, 1.0});
    {
        VectorField tv(1, {parse_expression("t*x1", 1)});
        StepField approx = simple_approximate(tv, {0.0, 1.0}, 64);
        cases.push_back({"midpoint-frozen t*x", std::move(approx),
                         CompactBox({0.8}, {1.9}, 9), 0.3, {1.0}, 1.0});
    }

    std::ostringstream digest;
    CertifyOptions opts;
    opts.target_tail = 1e-12;
    for (const auto& c : cases) {
        digest << c.label << ";";
        FlowCertificate cert = certify(c.field, {c.field.span().t_start, c.t_end}, c.box,
                                       Polydisc(c.box, c.radius),
                                       parse_expression("x1", c.field.dim), opts);
        FlowResult fr = flow_eval(c.field, c.field.span().t_start, c.t_end, c.x0, cert);
        std::vector<double> oracle =
            rk4_flow(c.field, c.field.span().t_start, c.t_end, c.x0, 100000);
        double diff = 0.0;
        for (std::size_t i = 0; i < oracle.size(); ++i)
            diff = std::max(diff, std::fabs(fr.point[i] - oracle[i]));
        ExperimentCase ec;
        ec.input = c.label;
        ec.series_value = fr.point[0];
        ec.oracle_value = oracle[0];
        ec.diff = diff;
        ec.bound = fr.residual_bound + 1e-7;
        ec.pass = diff <= ec.bound;
        rep.cases.push_back(ec);
    }
    rep.inputs_digest = digest.str();
    rep.finish();
    return rep;
}

std::vector<ExperimentReport> continuity_suite() {
    Expression f = parse_expression("x1", 1);
    CompactBox K = CompactBox::interval(-1.0, 1.0, 9);
    TimeInterval T(0.0, 0.05);
    std::vector<double> eps{1e-1, 1e-2, 1e-3};

    auto fld = [](const std::string& e) {
        return StepField::autonomous(VectorField(1, {parse_expression(e, 1)}), {0.0, 0.05});
    };
    std::vector<ExperimentReport> reports;
    reports.push_back(exp_continuity_experiment(fld("x1"), fld("x1"), eps, f, K, T));
    reports.push_back(exp_continuity_experiment(fld("x1"), fld("1"), eps, f, K, T));
    reports.push_back(exp_continuity_experiment(fld("0.5*x1"), fld("x1^2"), eps, f, K, T));
    for (std::size_t i = 0; i < reports.size(); ++i)
        reports[i].name = "exp-continuity-pair" + std::to_string(i + 1);
    return reports;
}

}  // namespace anaflow
