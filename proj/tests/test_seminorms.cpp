#include "anaflow/seminorms.hpp"

#include "anaflow/errors.hpp"
#include "anaflow/runtime.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace anaflow;

namespace {
Expression random_poly(std::mt19937_64& rng, int dim, int maxdeg) {
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    PolyMap p;
    for (const auto& m : enumerate_multiindices(dim, maxdeg))
        if (rng() % 2) p[m.entries()] = coeff(rng);
    if (p.empty()) p[std::vector<int>(dim, 0)] = coeff(rng);
    return poly_to_expression(p, dim);
}
}  // namespace

TEST_CASE("seminorm of the identity on [0,1] with halving weights") {
    Expression f = parse_expression("x1", 1);
    CompactBox K = CompactBox::interval(0.0, 1.0, 33);
    auto a = WeightSequence::geometric(1.0, 0.5, 4);
    SeminormValue v = seminorm_function(f, K, a);
    CHECK(v.value() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(v.achieved_order == 0);
    CHECK(v.achieved_at[0] == doctest::Approx(1.0));
    CHECK(v.rigorous);  // polynomial: truncation is exact

    Expression zero = Expression::constant(0.0);
    CHECK(seminorm_function(zero, K, a).value() == 0.0);
}

TEST_CASE("holomorphic sup-norms on polydiscs") {
    CompactBox origin = CompactBox::interval(0.0, 0.0, 2);
    Expression z = parse_expression("x1", 1);
    CHECK(holo_supnorm(z, Polydisc(origin, 2.0), 0.0, 1.0) ==
          doctest::Approx(2.0).epsilon(0.01));

    Expression rat = parse_expression("1/(1+x1^2)", 1);
    CHECK(holo_supnorm(rat, Polydisc(origin, 0.5), 0.0, 1.0) < 3.0);
    CHECK_THROWS_AS(holo_supnorm(rat, Polydisc(origin, 1.5), 0.0, 1.0), DomainError);

    Expression ex = parse_expression("exp(x1)", 1);
    for (double r : {0.5, 1.0, 2.0})
        CHECK(holo_supnorm(ex, Polydisc(origin, r, 256), 0.0, 1.0) ==
              doctest::Approx(std::exp(r)).epsilon(0.01));
}

TEST_CASE("cauchy estimate: seminorm below the polydisc sup-norm") {
    CompactBox K = CompactBox::interval(-0.5, 0.5, 17);
    Expression f = parse_expression("1/(1+x1^2)", 1);
    double d = 0.25;
    auto a = WeightSequence::geometric(d, 0.5, 16);
    SeminormOptions opts;
    opts.majorant = Polydisc(K, d);
    SeminormValue v = seminorm_function(f, K, a, 0.0, opts);
    CHECK(v.rigorous);
    CHECK(v.value() <= 1.05 * holo_supnorm(f, Polydisc(K, d)));
}

TEST_CASE("field seminorms combine components by max") {
    CompactBox K = CompactBox::interval(-1.0, 1.0, 33);
    auto a = WeightSequence::geometric(1.0, 0.5, 8);

    VectorField zero(2, {Expression::constant(0.0), Expression::constant(0.0)});
    CompactBox K2({-1.0, -1.0}, {1.0, 1.0}, 9);
    CHECK(seminorm_field(zero, K2, a).value() == 0.0);

    VectorField euler(1, {parse_expression("x1", 1)});
    CHECK(seminorm_field(euler, K, a).value() >= 1.0);

    // Euclidean option dominates the max option
    VectorField two(2, {parse_expression("x1", 2), parse_expression("x2", 2)});
    SeminormOptions eopts;
    eopts.field_norm = FieldNorm::Euclidean;
    CHECK(seminorm_field(two, K2, a, 0.0, eopts).value() >=
          seminorm_field(two, K2, a, 0.0).value() * (1.0 - 1e-12));
}

TEST_CASE("the frozen ex-2 field has exploding derivative sups") {
    Expression comp = parse_expression("t^2/(t^2+x1^2)", 1);
    VectorField X(1, {comp});
    CompactBox K = CompactBox::interval(-0.1, 0.1, 9);
    double t = 0.01;
    auto lo = WeightSequence::geometric(1.0, 0.9, 6);
    auto hi = WeightSequence::geometric(1.0, 0.9, 12);
    SeminormValue v6 = seminorm_field(X.with_time_frozen(t), K, lo, t);
    SeminormValue v12 = seminorm_field(X.with_time_frozen(t), K, hi, t);
    CHECK_FALSE(v12.rigorous);
    CHECK(v12.computed_sup > 2.0 * v6.computed_sup);  // growing with the horizon
    CHECK(v12.last_order_term > v6.last_order_term);
}

TEST_CASE("derivation bound: examples and the randomized suite") {
    CompactBox K = CompactBox::interval(0.0, 1.0, 17);
    auto a = WeightSequence::geometric(1.0, 0.5, 8);
    VectorField euler(1, {parse_expression("x1", 1)});
    auto rep = check_derivation_bound(euler, parse_expression("x1^2", 1), K, a, 0);
    CHECK(rep.holds);
    CHECK(rep.lhs > 0.0);

    VectorField zero(1, {Expression::constant(0.0)});
    auto zrep = check_derivation_bound(zero, parse_expression("x1^2", 1), K, a, 0);
    CHECK(zrep.lhs == 0.0);
    CHECK(zrep.holds);

    std::mt19937_64 rng(2718);
    for (int trial = 0; trial < 30; ++trial) {
        int dim = 1 + static_cast<int>(rng() % 3);
        std::vector<Expression> comps;
        for (int i = 0; i < dim; ++i) comps.push_back(random_poly(rng, dim, 3));
        VectorField X(dim, std::move(comps));
        Expression f = random_poly(rng, dim, 3);
        CompactBox box(std::vector<double>(dim, -1.0), std::vector<double>(dim, 1.0),
                       dim == 1 ? 17 : (dim == 2 ? 9 : 5));
        auto r = check_derivation_bound(X, f, box, a, static_cast<int>(rng() % 3));
        CHECK(r.holds);
    }
}

TEST_CASE("seminorm axioms and monotonicity") {
    std::mt19937_64 rng(99);
    CompactBox K = CompactBox::interval(-1.0, 1.0, 17);
    auto a = WeightSequence::geometric(1.0, 0.5, 8);
    for (int trial = 0; trial < 25; ++trial) {
        Expression f = random_poly(rng, 1, 4);
        Expression g = random_poly(rng, 1, 4);
        double c = std::uniform_real_distribution<double>(-3.0, 3.0)(rng);

        double pf = seminorm_function(f, K, a).value();
        double pg = seminorm_function(g, K, a).value();
        double pcf = seminorm_function(f * Expression::constant(c), K, a).value();
        double pfg = seminorm_function(f + g, K, a).value();
        CHECK(pcf == doctest::Approx(std::fabs(c) * pf).epsilon(1e-10));
        CHECK(pfg <= (pf + pg) * (1.0 + 1e-10));

        // monotonicity: nested grids, pointwise-larger weights
        CompactBox K2 = CompactBox::interval(-2.0, 2.0, 33);
        auto a2 = WeightSequence::geometric(1.0, 0.75, 8);
        CHECK(seminorm_function(f, K2, a).value() >= pf * (1.0 - 1e-12));
        CHECK(seminorm_function(f, K, a2).value() >= pf * (1.0 - 1e-12));
    }
}

TEST_CASE("radius fit on synthetic coefficient patterns") {
    std::vector<double> geo(25);
    for (int k = 0; k <= 24; ++k) geo[k] = (k % 2 == 0) ? std::pow(2.0, k) : 0.0;
    CHECK(detail::radius_from_coeffs(geo) == doctest::Approx(0.5).epsilon(0.02));

    std::vector<double> entire(25);
    double f = 1.0;
    for (int k = 0; k <= 24; ++k) {
        entire[k] = 1.0 / f;
        f *= (k + 1);
    }
    CHECK(std::isinf(detail::radius_from_coeffs(entire)));

    std::vector<double> degen(25, 0.0);
    degen[0] = 3.0;
    CHECK(std::isinf(detail::radius_from_coeffs(degen)));
}

TEST_CASE("grid sweeps are thread-count independent") {
    Expression f = parse_expression("sin(x1)*exp(x1)+x1^4", 1);
    CompactBox K = CompactBox::interval(-1.0, 1.0, 33);
    auto a = WeightSequence::geometric(1.0, 0.5, 10);
    SeminormValue serial = seminorm_function(f, K, a);
    set_thread_count(4);
    SeminormValue parallel = seminorm_function(f, K, a);
    set_thread_count(1);
    CHECK(serial.computed_sup == parallel.computed_sup);
    CHECK(serial.achieved_order == parallel.achieved_order);
    CHECK(serial.achieved_at == parallel.achieved_at);
}
