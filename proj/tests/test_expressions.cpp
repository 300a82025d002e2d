#include "anaflow/expression.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

using namespace anaflow;

namespace {

Expression random_poly(std::mt19937_64& rng, int dim, int maxdeg) {
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    auto monos = enumerate_multiindices(dim, maxdeg);
    PolyMap p;
    for (const auto& m : monos)
        if (rng() % 2) p[m.entries()] = coeff(rng);
    if (p.empty()) p[std::vector<int>(dim, 0)] = coeff(rng);
    return poly_to_expression(p, dim);
}

}  // namespace

TEST_CASE("parser follows the published grammar") {
    auto e = parse_expression("x1^2 + sin(x2)", 2);
    CHECK(e.str() == "x1^2+sin(x2)");
    CHECK(parse_expression("1/(1+4*x1^2)", 1).eval_real({0.5}) ==
          doctest::Approx(0.5).epsilon(1e-15));
    auto ex2 = parse_expression("t^2/(t^2+x1^2)", 1);
    CHECK(ex2.depends_on_time());
    CHECK(ex2.eval_real({0.1}, 0.1) == doctest::Approx(0.5).epsilon(1e-15));

    CHECK_THROWS_AS(parse_expression("x1 +", 1), ParseError);
    CHECK_THROWS_AS(parse_expression("y1", 1), ParseError);
    CHECK_THROWS_AS(parse_expression("x3", 2), ParseError);
    CHECK_THROWS_AS(parse_expression("x1) ", 1), ParseError);
    CHECK_THROWS_AS(parse_expression("x", 1), ParseError);
    CHECK_THROWS_AS(parse_expression("exp x1", 1), ParseError);
    CHECK_THROWS_AS(parse_expression("x1^-2", 1), ParseError);
    try {
        parse_expression("x1 + y2", 1);
        CHECK(false);
    } catch (const ParseError& pe) {
        CHECK(pe.position() == 5);
    }
}

TEST_CASE("printer round-trips") {
    const char* samples[] = {
        "x1^2+sin(x2)",
        "1/(1+4*x1^2)",
        "t^2/(t^2+x1^2)",
        "x1-x2-x1*x2",
        "x1/(x2/(1+x1))",
        "(x1+x2)^3*exp(x1*x2)",
        "cos(log(2+x1))-t",
        "2e-3*x1+1.5",
    };
    for (const char* s : samples) {
        Expression e = parse_expression(s, 2);
        Expression back = parse_expression(e.str(), 2);
        CHECK(back.same_as(e));
    }
    // programmatic negative constants stay parseable
    Expression neg = Expression::constant(-2.5) * Expression::state_var(0);
    CHECK(parse_expression(neg.str(), 1).same_as(neg));
}

TEST_CASE("evaluation over reals and complexes") {
    auto sq = parse_expression("x1^2", 1);
    CHECK(sq.eval_real({3.0}) == 9.0);

    auto pole = parse_expression("1/(1+x1^2)", 1);
    std::complex<double> v = pole.eval_complex({{0.0, 0.999}});
    CHECK(std::abs(v) > 450.0);
    CHECK(std::abs(v) < 550.0);

    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        Expression e = random_poly(rng, 2, 4);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        std::vector<double> x{u(rng), u(rng)};
        std::complex<double> cz =
            e.eval_complex({{x[0], 0.0}, {x[1], 0.0}});
        CHECK(std::fabs(cz.real() - e.eval_real(x)) <= 1e-14 * (1.0 + std::fabs(cz.real())));
        CHECK(cz.imag() == 0.0);

        // conjugate symmetry for real coefficients
        std::vector<std::complex<double>> z{{u(rng), u(rng)}, {u(rng), u(rng)}};
        std::vector<std::complex<double>> zc{std::conj(z[0]), std::conj(z[1])};
        std::complex<double> a = e.eval_complex(z);
        std::complex<double> b = e.eval_complex(zc);
        CHECK(std::abs(b - std::conj(a)) <= 1e-12 * (1.0 + std::abs(a)));
    }

    CHECK_THROWS_AS(parse_expression("1/x1", 1).eval_real({0.0}), DomainError);
    CHECK_THROWS_AS(parse_expression("log(x1)", 1).eval_real({-1.0}), DomainError);
    CHECK_THROWS_AS(parse_expression("log(x1)", 1).eval_complex({{-1.0, 0.0}}), DomainError);
}

TEST_CASE("taylor jets match closed forms") {
    auto e = parse_expression("exp(x1)", 1);
    Jet<double> j = e.jet_at({0.0}, 0.0, 3);
    CHECK(j.coeff(MultiIndex({0})) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(j.coeff(MultiIndex({1})) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(j.coeff(MultiIndex({2})) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(j.coeff(MultiIndex({3})) == doctest::Approx(1.0 / 6).epsilon(1e-15));

    auto rat = parse_expression("1/(1+x1^2)", 1);
    Jet<double> jr = rat.jet_at({0.0}, 0.0, 4);
    double expect[] = {1.0, 0.0, -1.0, 0.0, 1.0};
    for (int k = 0; k <= 4; ++k)
        CHECK(jr.coeff(MultiIndex({k})) == doctest::Approx(expect[k]).epsilon(1e-13));

    // exact shifted coefficients for polynomials
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        Expression p = random_poly(rng, 1, 4);
        Jet<double> jp = p.jet_at({0.7}, 0.0, 4);
        // derivative reconstruction against symbolic differentiation
        Expression d = p;
        double fac = 1.0;
        for (int k = 0; k <= 4; ++k) {
            CHECK(jp.coeff(MultiIndex({k})) * fac ==
                  doctest::Approx(d.eval_real({0.7})).epsilon(1e-11));
            d = d.diff(0);
            fac *= (k + 1);
        }
    }
}

TEST_CASE("taylor consistency: remainder scales past the truncation degree") {
    const char* funcs[] = {"exp(x1)*sin(x1)", "1/(2+x1)", "cos(x1)+x1^3"};
    for (const char* s : funcs) {
        Expression e = parse_expression(s, 1);
        const int D = 6;
        Jet<double> j = e.jet_at({0.1}, 0.0, D);
        std::vector<double> hs, errs;
        for (int k = 2; k <= 6; ++k) {
            double h = std::pow(2.0, -k);
            double err = std::fabs(e.eval_real({0.1 + h}) - j.eval({h}));
            if (err > 0) {
                hs.push_back(h);
                errs.push_back(err);
            }
        }
        REQUIRE(hs.size() >= 3);
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < hs.size(); ++i) {
            double lx = std::log(hs[i]), ly = std::log(errs[i]);
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
        }
        double n = static_cast<double>(hs.size());
        double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        CHECK(slope >= D + 0.5);
    }
}

TEST_CASE("derivation operator: examples and the Leibniz property") {
    VectorField euler(1, {parse_expression("x1", 1)});
    Expression x = parse_expression("x1", 1);
    CHECK(apply_derivation(euler, x).same_as(x));

    VectorField quad(1, {parse_expression("x1^2", 1)});
    Expression Xf = apply_derivation(quad, x);
    Expression XXf = apply_derivation(quad, Xf);
    CHECK(Xf.eval_real({1.5}) == doctest::Approx(2.25).epsilon(1e-15));
    CHECK(XXf.eval_real({1.5}) == doctest::Approx(2 * std::pow(1.5, 3)).epsilon(1e-14));

    std::mt19937_64 rng(123);
    for (int trial = 0; trial < 200; ++trial) {
        int dim = 1 + static_cast<int>(rng() % 2);
        std::vector<Expression> comps;
        for (int i = 0; i < dim; ++i) comps.push_back(random_poly(rng, dim, 2));
        VectorField X(dim, std::move(comps));
        Expression f = random_poly(rng, dim, 3);
        Expression g = random_poly(rng, dim, 3);

        // exact comparison through the monomial expansion
        auto lhs = apply_derivation(X, f * g).to_polynomial(dim);
        PolyMap rhs;
        auto t1 = (apply_derivation(X, f) * g).to_polynomial(dim);
        auto t2 = (f * apply_derivation(X, g)).to_polynomial(dim);
        REQUIRE(lhs);
        REQUIRE(t1);
        REQUIRE(t2);
        poly_axpy(rhs, *t1, 1.0);
        poly_axpy(rhs, *t2, 1.0);
        for (const auto& [m, c] : *lhs)
            CHECK(c == doctest::Approx(rhs.count(m) ? rhs.at(m) : 0.0).epsilon(1e-12));
        for (const auto& [m, c] : rhs)
            CHECK(c == doctest::Approx(lhs->count(m) ? lhs->at(m) : 0.0).epsilon(1e-12));
    }

    // jet backend agrees to 1e-10 relative and drops one degree
    std::vector<double> x0{0.3};
    Expression f = parse_expression("sin(x1)*exp(x1)", 1);
    VectorField X(1, {parse_expression("cos(x1)", 1)});
    Jet<double> fj = f.jet_at(x0, 0.0, 5);
    Jet<double> dj = apply_derivation(X, fj, 0.0);
    CHECK(dj.degree() == 4);
    Expression sym = apply_derivation(X, f);
    Jet<double> sj = sym.jet_at(x0, 0.0, 4);
    for (int i = 0; i < dj.size(); ++i)
        CHECK(dj.coeff(i) ==
              doctest::Approx(sj.coeff(i)).epsilon(1e-10).scale(1.0 + std::fabs(sj.coeff(i))));

    Jet<double> f0 = f.jet_at(x0, 0.0, 0);
    CHECK_THROWS_AS(apply_derivation(X, f0, 0.0), std::invalid_argument);
}

TEST_CASE("time handling and polynomial detection") {
    Expression tf = parse_expression("t^2/(t^2+x1^2)", 1);
    Expression fz = tf.with_time_frozen(0.5);
    CHECK_FALSE(fz.depends_on_time());
    CHECK(fz.eval_real({0.5}) == doctest::Approx(0.5).epsilon(1e-15));

    CHECK(parse_expression("x1^2*x2+1", 2).polynomial_degree() == 3);
    CHECK(parse_expression("x1/2", 1).polynomial_degree() == 1);
    CHECK_FALSE(parse_expression("x1/x2", 2).polynomial_degree().has_value());
    CHECK_FALSE(parse_expression("sin(x1)", 1).polynomial_degree().has_value());
    CHECK_FALSE(parse_expression("t*x1", 1).polynomial_degree().has_value());

    auto p = parse_expression("(x1+x2)^2", 2).to_polynomial(2);
    REQUIRE(p);
    CHECK(p->at({2, 0}) == 1.0);
    CHECK(p->at({1, 1}) == 2.0);
    CHECK(p->at({0, 2}) == 1.0);
}

TEST_CASE("division by a tiny series pivot is a domain error") {
    Expression e = parse_expression("1/x1", 1);
    CHECK_THROWS_AS(e.jet_at({0.0}, 0.0, 3), DomainError);
    Expression lg = parse_expression("log(x1)", 1);
    CHECK_THROWS_AS(lg.jet_at({-0.5}, 0.0, 3), DomainError);
}
