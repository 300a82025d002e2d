#include "anaflow/jet.hpp"
#include "anaflow/jet_calculus.hpp"
#include "anaflow/multiindex.hpp"
#include "anaflow/weights.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace anaflow;

namespace {
constexpr double kE = 2.718281828459045235360287471352662498;

Jet<double> random_poly_jet(std::mt19937_64& rng, int dim, int degree,
                            const std::vector<double>& x0) {
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    Jet<double> j(dim, degree, x0);
    for (int i = 0; i < j.size(); ++i) j.coeff(i) = coeff(rng);
    return j;
}
}  // namespace

TEST_CASE("multi-index enumeration is graded and complete") {
    auto l1 = enumerate_multiindices(1, 2);
    REQUIRE(l1.size() == 3);
    CHECK(l1[0].str() == "(0)");
    CHECK(l1[1].str() == "(1)");
    CHECK(l1[2].str() == "(2)");

    auto l2 = enumerate_multiindices(2, 1);
    REQUIRE(l2.size() == 3);
    CHECK(l2[0].str() == "(0,0)");
    CHECK(l2[1].str() == "(1,0)");
    CHECK(l2[2].str() == "(0,1)");

    // brute-force count for N=3, D=4
    int count = 0;
    for (int a = 0; a <= 4; ++a)
        for (int b = 0; b <= 4; ++b)
            for (int c = 0; c <= 4; ++c)
                if (a + b + c <= 4) ++count;
    auto l3 = enumerate_multiindices(3, 4);
    CHECK(static_cast<int>(l3.size()) == count);
    CHECK(l3.size() == 35);
    for (std::size_t i = 0; i < l3.size(); ++i)
        for (std::size_t j = i + 1; j < l3.size(); ++j)
            CHECK_FALSE(l3[i] == l3[j]);
    for (std::size_t i = 1; i < l3.size(); ++i)
        CHECK(l3[i - 1].order() <= l3[i].order());
}

TEST_CASE("multi-index order, factorial, comparison, binomials") {
    MultiIndex r({2, 1, 0});
    CHECK(r.order() == 3);
    CHECK(r.factorial() == 2.0);
    CHECK(MultiIndex({1, 1, 0}).leq(r));
    CHECK_FALSE(MultiIndex({0, 2, 0}).leq(r));
    CHECK(multi_binom(r, MultiIndex({1, 1, 0})) == 2.0);
    CHECK(multi_binom(r, MultiIndex({0, 2, 0})) == 0.0);
    CHECK(binom(7, 4) == 35.0);
}

TEST_CASE("weight products match the hand examples") {
    auto a = WeightSequence::geometric(1.0, 0.5, 16);
    CHECK(a.weight(0) == 1.0);
    CHECK(a.weight(1) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(a.weight(2) == doctest::Approx(0.0625).epsilon(1e-15));
    CHECK_THROWS_AS(a.weight(17), std::out_of_range);

    auto a1 = a.lift_a(1);
    CHECK(a1.at(1) == doctest::Approx(1.0).epsilon(1e-15));  // (2/1)^1 * 1/2
    CHECK(a.lift_a(0).at(0) == a.at(0));
    auto b1 = a.lift_b(1);
    CHECK(b1.at(2) == doctest::Approx(2.25).epsilon(1e-15));  // 6 * (3/2) * (1/4)
    CHECK(b1.at(2) <= 6.0 * kE * a.at(2));
    CHECK(b1.bound() == doctest::Approx(6.0 * kE).epsilon(1e-15));
    CHECK(a1.bound() == doctest::Approx(kE).epsilon(1e-15));
}

TEST_CASE("lifted-sequence inequalities hold across the horizon") {
    const int R = 50;
    auto a = WeightSequence::geometric(1.0, 0.9, R + 2);
    for (int n = 0; n <= R; ++n) {
        auto an = a.lift_a(n);
        auto bn = a.lift_b(n);
        for (int m = 0; m <= R; ++m) {
            CHECK(an.at(m) <= kE * a.at(m) * (1.0 + 1e-12));
            CHECK(bn.at(m) <= 6.0 * kE * a.at(m) * (1.0 + 1e-12));
        }
    }
    // ratio bound (m+1)/(n+1) <= prod a_{n+1,j} / prod a_{n,j}, j <= m+1
    for (int n = 0; n <= 20; ++n) {
        auto an = a.lift_a(n);
        auto an1 = a.lift_a(n + 1);
        for (int m = 0; m <= 20; ++m) {
            double num = 0.0, den = 0.0;
            for (int j = 0; j <= m + 1; ++j) {
                num += std::log(an1.at(j));
                den += std::log(an.at(j));
            }
            CHECK(std::log((m + 1.0) / (n + 1.0)) <= num - den + 1e-12);
        }
    }
    // product relation: prod a_{n,j}/(m-2)! <= prod b_{n,j}/m! for m > 1
    for (int n = 0; n <= 20; ++n) {
        auto an = a.lift_a(n);
        auto bn = a.lift_b(n);
        for (int m = 2; m <= R; ++m) {
            double la = 0.0, lb = 0.0;
            for (int j = 0; j <= m; ++j) {
                la += std::log(an.at(j));
                lb += std::log(bn.at(j));
            }
            double lhs = la - std::lgamma(m - 1.0);
            double rhs = lb - std::lgamma(m + 1.0);
            CHECK(lhs <= rhs + 1e-12);
        }
    }
}

TEST_CASE("weight sequence validation") {
    CHECK_THROWS_AS(WeightSequence::geometric(-1.0, 0.5, 4), std::invalid_argument);
    CHECK_THROWS_AS(WeightSequence::geometric(1.0, 1.5, 4), std::invalid_argument);
    CHECK_THROWS_AS(WeightSequence::from_values(1.0, {0.5, 0.7}), std::invalid_argument);
    CHECK_THROWS_AS(WeightSequence::from_values(1.0, {2.0}), std::invalid_argument);
}

TEST_CASE("jet product and differentiation basics") {
    std::vector<double> x0{0.0};
    Jet<double> one_plus = Jet<double>::constant(1, 2, x0, 1.0);
    one_plus.set_coeff(MultiIndex({1}), 1.0);
    Jet<double> one_minus = Jet<double>::constant(1, 2, x0, 1.0);
    one_minus.set_coeff(MultiIndex({1}), -1.0);
    Jet<double> prod = one_plus * one_minus;
    CHECK(prod.coeff(MultiIndex({0})) == 1.0);
    CHECK(prod.coeff(MultiIndex({1})) == 0.0);
    CHECK(prod.coeff(MultiIndex({2})) == -1.0);

    Jet<double> xsq(1, 2, x0);
    xsq.set_coeff(MultiIndex({2}), 1.0);
    Jet<double> d = xsq.diff(0);
    CHECK(d.degree() == 1);
    CHECK(d.coeff(MultiIndex({1})) == 2.0);

    // differentiate then integrate recovers the monomials with r_i >= 1
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        Jet<double> f = random_poly_jet(rng, 2, 5, {0.0, 0.0});
        Jet<double> g = f.diff(0).integrate(0);
        for (int i = 0; i < f.size(); ++i) {
            const MultiIndex& r = f.layout().index(i);
            if (r[0] >= 1)
                CHECK(g.coeff(r) == doctest::Approx(f.coeff(i)).epsilon(1e-14));
            else
                CHECK(g.coeff(r) == 0.0);
        }
    }
}

TEST_CASE("jet of exp evaluates through the certified remainder") {
    std::vector<double> x0{0.0};
    Jet<double> x = Jet<double>::variable(1, 10, x0, 0);
    Jet<double> e = jet_exp(x);
    double v = e.eval({0.1});
    CHECK(std::fabs(v - std::exp(0.1)) < 1e-12);
}

TEST_CASE("jet ring axioms on random polynomials") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 30; ++trial) {
        int dim = 1 + static_cast<int>(rng() % 2);
        std::vector<double> x0(dim, 0.25);
        Jet<double> a = random_poly_jet(rng, dim, 10, x0);
        Jet<double> b = random_poly_jet(rng, dim, 10, x0);
        Jet<double> c = random_poly_jet(rng, dim, 10, x0);

        Jet<double> ab = a * b;
        Jet<double> ba = b * a;
        Jet<double> lhs = (a * b) * c;
        Jet<double> rhs = a * (b * c);
        Jet<double> dist_l = a * (b + c);
        Jet<double> dist_r = a * b + a * c;
        for (int i = 0; i < ab.size(); ++i) {
            CHECK(ab.coeff(i) == doctest::Approx(ba.coeff(i)).epsilon(1e-12));
            CHECK(lhs.coeff(i) == doctest::Approx(rhs.coeff(i)).epsilon(1e-12));
            CHECK(dist_l.coeff(i) == doctest::Approx(dist_r.coeff(i)).epsilon(1e-12));
        }

        // Leibniz at jet level
        for (int axis = 0; axis < dim; ++axis) {
            Jet<double> dprod = (a * b).diff(axis);
            Jet<double> leib = a.diff(axis) * b.truncated(9) + a.truncated(9) * b.diff(axis);
            for (int i = 0; i < dprod.size(); ++i)
                CHECK(dprod.coeff(i) == doctest::Approx(leib.coeff(i)).epsilon(1e-12));
        }
    }
}

TEST_CASE("jet shape mismatches are rejected") {
    Jet<double> a(1, 3, {0.0});
    Jet<double> b(1, 3, {1.0});
    CHECK_THROWS_AS(a * b, std::invalid_argument);
    Jet<double> c(2, 3, {0.0, 0.0});
    CHECK_THROWS_AS(a + c, std::invalid_argument);
    Jet<double> d(1, 0, {0.0});
    CHECK_THROWS_AS(d.diff(0), std::invalid_argument);
}
