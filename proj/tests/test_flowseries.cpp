#include "anaflow/flowseries.hpp"

#include "anaflow/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace anaflow;

namespace {
const double kE01 = 1.1051709180756476248;  // e^0.1

Expression random_poly(std::mt19937_64& rng, int dim, int maxdeg) {
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    PolyMap p;
    for (const auto& m : enumerate_multiindices(dim, maxdeg))
        if (rng() % 2) p[m.entries()] = coeff(rng);
    if (p.empty()) p[std::vector<int>(dim, 0)] = coeff(rng);
    return poly_to_expression(p, dim);
}
}  // namespace

TEST_CASE("lie series on the linear and quadratic benchmark fields") {
    VectorField euler(1, {parse_expression("x1", 1)});
    Expression x = parse_expression("x1", 1);

    Expression s = lie_series_apply(euler, 0.1, x, 12);
    CHECK(std::fabs(s.eval_real({1.0}) - kE01) < 1e-12);

    Expression id0 = lie_series_apply(euler, 0.0, x, 5);
    CHECK(id0.same_as(x));

    // X = x^2 d/dx has X̂^k x = k! x^{k+1}
    VectorField quad(1, {parse_expression("x1^2", 1)});
    TimeSeries terms = lie_series_terms(quad, x, 6);
    for (int k = 0; k <= 6; ++k) {
        auto p = terms.terms[k].expr.to_polynomial(1);
        REQUIRE(p);
        double fac = 1.0;
        for (int j = 2; j <= k; ++j) fac *= j;
        CHECK(p->size() == 1);
        CHECK(p->at({k + 1}) == doctest::Approx(fac).epsilon(1e-12));
        CHECK(terms.terms[k].scale * fac == doctest::Approx(1.0).epsilon(1e-12));
    }

    // jet backend agrees with the symbolic backend
    Jet<double> jv = lie_series_apply_jet(quad, 0.05, x, {0.5}, 8, 0);
    Expression sym = lie_series_apply(quad, 0.05, x, 8);
    CHECK(jv.value() == doctest::Approx(sym.eval_real({0.5})).epsilon(1e-13));
}

TEST_CASE("certification subdivides until M <= 1/2") {
    VectorField euler(1, {parse_expression("x1", 1)});
    StepField sf = StepField::autonomous(euler, {0.0, 1.0});
    CompactBox K = CompactBox::interval(-1.0, 1.0, 9);
    FlowCertificate cert = certify(sf, {0.0, 1.0}, K, Polydisc(K, 0.5),
                                   parse_expression("x1", 1));
    CHECK(!cert.subintervals.empty());
    double t = 0.0;
    for (const auto& s : cert.subintervals) {
        CHECK(s.M <= 0.5);
        CHECK(s.t_lo == doctest::Approx(t).epsilon(1e-12));
        CHECK(s.t_hi - s.t_lo <= 1.0 / 12.0 + 1e-12);  // m >= 6 on this polydisc
        t = s.t_hi;
    }
    CHECK(t == doctest::Approx(1.0));

    VectorField zero(1, {Expression::constant(0.0)});
    StepField zf = StepField::autonomous(zero, {0.0, 1.0});
    FlowCertificate zc = certify(zf, {0.0, 1.0}, K, Polydisc(K, 0.5),
                                 parse_expression("x1", 1));
    REQUIRE(zc.subintervals.size() == 1);
    CHECK(zc.subintervals[0].M == 0.0);
    CHECK(zc.subintervals[0].order == 0);
    CHECK(zc.subintervals[0].tail_bound == 0.0);
    CHECK(zc.residual_bound() == 0.0);
}

TEST_CASE("certified flows hit closed forms inside the residual bound") {
    CertifyOptions opts;
    opts.target_tail = 1e-12;

    VectorField euler(1, {parse_expression("x1", 1)});
    StepField sf = StepField::autonomous(euler, {0.0, 1.0});
    CompactBox K = CompactBox::interval(0.8, 3.0, 9);
    FlowCertificate cert =
        certify(sf, {0.0, 1.0}, K, Polydisc(K, 0.3), parse_expression("x1", 1), opts);
    FlowResult fr = flow_eval(sf, 0.0, 1.0, {1.0}, cert);
    CHECK(fr.residual_bound < 1e-9);
    CHECK(std::fabs(fr.point[0] - std::exp(1.0)) <= fr.residual_bound + 1e-12);

    // identity at t0
    FlowResult id = flow_eval(sf, 0.0, 0.0, {1.5}, cert);
    CHECK(id.point[0] == 1.5);
    CHECK(id.residual_bound == 0.0);

    // the quadratic example flow x/(1-xt)
    VectorField quad(1, {parse_expression("x1^2", 1)});
    StepField qf = StepField::autonomous(quad, {0.0, 0.1});
    CompactBox Kq = CompactBox::interval(0.3, 0.6, 9);
    FlowCertificate qc =
        certify(qf, {0.0, 0.1}, Kq, Polydisc(Kq, 0.15), parse_expression("x1", 1), opts);
    FlowResult qr = flow_eval(qf, 0.0, 0.1, {0.5}, qc);
    CHECK(std::fabs(qr.point[0] - 0.5 / 0.95) <= 1e-9);
}

TEST_CASE("certificates reject mismatched requests") {
    VectorField euler(1, {parse_expression("x1", 1)});
    StepField sf = StepField::autonomous(euler, {0.0, 1.0});
    CompactBox K = CompactBox::interval(0.8, 1.5, 9);
    FlowCertificate cert =
        certify(sf, {0.0, 1.0}, K, Polydisc(K, 0.3), parse_expression("x1", 1));

    VectorField other(1, {parse_expression("2*x1", 1)});
    StepField of = StepField::autonomous(other, {0.0, 1.0});
    CHECK_THROWS_AS(flow_eval(of, 0.0, 1.0, {1.0}, cert), std::invalid_argument);
    CHECK_THROWS_AS(flow_eval(sf, 0.0, 1.0, {7.0}, cert), std::invalid_argument);
    CHECK_THROWS_AS(flow_eval(sf, 0.0, 2.0, {1.0}, cert), std::invalid_argument);
    CHECK_THROWS_AS(flow_eval(sf, 0.5, 1.0, {1.0}, cert), std::invalid_argument);
}

TEST_CASE("blow-up proximity is flagged on the quadratic field") {
    VectorField quad(1, {parse_expression("x1^2", 1)});
    StepField qf = StepField::autonomous(quad, {0.0, 3.0});
    CompactBox K = CompactBox::interval(0.8, 1.2, 5);
    CertifyOptions opts;
    opts.max_subintervals = 200;
    CHECK_THROWS_AS(certify(qf, {0.0, 3.0}, K, Polydisc(K, 0.2),
                            parse_expression("x1", 1), opts),
                    CertifyError);
}

TEST_CASE("picard iterates match hand calculations") {
    VectorField euler(1, {parse_expression("x1", 1)});
    StepField sf = StepField::autonomous(euler, {0.0, 1.0});
    Expression x = parse_expression("x1", 1);

    PiecewiseSeries p1 = picard_iterate(sf, {0.0, 1.0}, x, 1);
    REQUIRE(p1.pieces.size() == 1);
    CHECK(p1.eval(0.3, {2.0}) == doctest::Approx((1.0 + 0.3) * 2.0).epsilon(1e-15));

    PiecewiseSeries p3 = picard_iterate(sf, {0.0, 1.0}, x, 3);
    double expect = 1.0 + 0.1 + 0.01 / 2 + 0.001 / 6;
    CHECK(p3.eval(0.1, {1.0}) == doctest::Approx(expect).epsilon(1e-15));

    // two commuting linear pieces: the series approaches e^{a1 h} e^{a2 h}
    double h = 0.1;
    VectorField a1(1, {parse_expression("x1", 1)});
    VectorField a2(1, {parse_expression("2*x1", 1)});
    StepField two(1, {0.0, h, 2 * h}, {a1, a2});
    PiecewiseSeries p12 = picard_iterate(two, {0.0, 2 * h}, x, 12);
    CHECK(p12.eval(2 * h, {1.0}) == doctest::Approx(std::exp(0.3)).epsilon(1e-12));
}

TEST_CASE("picard equals the lie truncation on single pieces, exactly") {
    std::mt19937_64 rng(777);
    for (int trial = 0; trial < 10; ++trial) {
        int dim = 1 + static_cast<int>(rng() % 2);
        std::vector<Expression> comps;
        for (int i = 0; i < dim; ++i) comps.push_back(random_poly(rng, dim, 3));
        VectorField X(dim, std::move(comps));
        Expression f = random_poly(rng, dim, 3);
        StepField sf = StepField::autonomous(X, {0.0, 1.0});
        for (int k : {1, 3, 6}) {
            PiecewiseSeries pic = picard_iterate(sf, {0.0, 1.0}, f, k);
            TimeSeries lie = lie_series_terms(X, f, k);
            REQUIRE(pic.pieces.size() == 1);
            const TimeSeries& ps = pic.pieces[0];
            REQUIRE(ps.terms.size() == lie.terms.size());
            for (std::size_t i = 0; i < lie.terms.size(); ++i) {
                CHECK(ps.terms[i].tpow == lie.terms[i].tpow);
                CHECK(ps.terms[i].scale == lie.terms[i].scale);  // bitwise
                auto pp = ps.terms[i].expr.to_polynomial(dim);
                auto lp = lie.terms[i].expr.to_polynomial(dim);
                REQUIRE(pp);
                REQUIRE(lp);
                CHECK(*pp == *lp);  // exact monomial maps
            }
        }
    }
}

TEST_CASE("flow composition matches a single certificate within bounds") {
    CertifyOptions opts;
    opts.target_tail = 1e-12;
    VectorField euler(1, {parse_expression("x1", 1)});
    CompactBox K = CompactBox::interval(0.8, 3.0, 9);
    Expression x = parse_expression("x1", 1);

    StepField whole = StepField::autonomous(euler, {0.0, 1.0});
    FlowCertificate cw = certify(whole, {0.0, 1.0}, K, Polydisc(K, 0.3), x, opts);
    FlowResult full = flow_eval(whole, 0.0, 1.0, {1.0}, cw);

    StepField first = StepField::autonomous(euler, {0.0, 0.5});
    FlowCertificate c1 = certify(first, {0.0, 0.5}, K, Polydisc(K, 0.3), x, opts);
    FlowResult half = flow_eval(first, 0.0, 0.5, {1.0}, c1);

    StepField second = StepField::autonomous(euler, {0.5, 1.0});
    CompactBox K2 = CompactBox::interval(half.point[0] - 0.1, 2.9, 9);
    FlowCertificate c2 = certify(second, {0.5, 1.0}, K2, Polydisc(K2, 0.3), x, opts);
    FlowResult rest = flow_eval(second, 0.5, 1.0, half.point, c2);

    double combined = 2.0 * (full.residual_bound + half.residual_bound +
                             rest.residual_bound) + 1e-13;
    CHECK(std::fabs(rest.point[0] - full.point[0]) <= combined);
}

TEST_CASE("series terms respect the certificate majorants") {
    CertifyOptions opts;
    opts.target_tail = 1e-12;
    VectorField euler(1, {parse_expression("x1", 1)});
    StepField sf = StepField::autonomous(euler, {0.0, 1.0});
    CompactBox K = CompactBox::interval(0.8, 3.0, 9);
    Expression x = parse_expression("x1", 1);
    FlowCertificate cert = certify(sf, {0.0, 1.0}, K, Polydisc(K, 0.3), x, opts);

    for (const auto& sub : cert.subintervals) {
        double width = sub.t_hi - sub.t_lo;
        for (const auto& p : sub.box.grid_points()) {
            auto terms = lie_term_values(euler, width, x, p, sub.order);
            double mk = 1.0;
            for (int k = 1; k <= sub.order; ++k) {
                mk *= sub.M;
                CHECK(std::fabs(terms[k]) <= mk * sub.M_f * (1.0 + 1e-9));
            }
        }
    }
}

TEST_CASE("multiplicativity defect stays within the scaled tails") {
    CertifyOptions opts;
    opts.target_tail = 1e-12;
    VectorField field(1, {parse_expression("0.4*x1^2", 1)});
    StepField sf = StepField::autonomous(field, {0.0, 0.2});
    CompactBox K = CompactBox::interval(-0.5, 0.5, 9);
    Expression f = parse_expression("x1+1", 1);
    Expression g = parse_expression("x1^2", 1);
    FlowCertificate cert = certify(sf, {0.0, 0.2}, K, Polydisc(K, 0.25), f, opts);
    FlowOperator op(sf, cert);

    double tail_f = op.observable_tail(f);
    double tail_g = op.observable_tail(g);
    double tail_fg = op.observable_tail(f * g);
    double sup_f = 0.0, sup_g = 0.0, defect = 0.0;
    for (const auto& p : K.grid_points()) {
        double vf = op.pullback_value(f, p);
        double vg = op.pullback_value(g, p);
        double vfg = op.pullback_value(f * g, p);
        sup_f = std::max(sup_f, std::fabs(vf));
        sup_g = std::max(sup_g, std::fabs(vg));
        defect = std::max(defect, std::fabs(vfg - vf * vg));
    }
    double bound = 3.0 * (tail_fg + tail_f * (sup_g + tail_g) + tail_g * (sup_f + tail_f));
    CHECK(defect <= bound);
}

TEST_CASE("flow residuals control the ODE defect under central differences") {
    CertifyOptions opts;
    opts.target_tail = 1e-12;
    VectorField euler(1, {parse_expression("x1", 1)});
    StepField sf = StepField::autonomous(euler, {0.0, 1.0});
    CompactBox K = CompactBox::interval(0.8, 3.0, 9);
    FlowCertificate cert =
        certify(sf, {0.0, 1.0}, K, Polydisc(K, 0.3), parse_expression("x1", 1), opts);

    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> ut(0.05, 0.95), ux(0.9, 1.1);
    const double dt_fd = 1e-3;
    for (int trial = 0; trial < 20; ++trial) {
        double t = ut(rng), x0 = ux(rng);
        double xm = flow_eval(sf, 0.0, t - dt_fd, {x0}, cert).point[0];
        double xp = flow_eval(sf, 0.0, t + dt_fd, {x0}, cert).point[0];
        double xc = flow_eval(sf, 0.0, t, {x0}, cert).point[0];
        double lhs = (xp - xm) / (2.0 * dt_fd) - xc;  // field is x
        double bound = 10.0 * std::max(cert.residual_bound(), 1e-9) / dt_fd;
        CHECK(std::fabs(lhs) <= bound);
    }
}
