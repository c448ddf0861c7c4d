#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qcylab/exact_scalar.hpp"

#include <cmath>
#include <random>

using namespace qcylab;

namespace {

ExactScalar random_monomial(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> coef(1, 40);
    std::uniform_int_distribution<int> den(1, 12);
    std::uniform_int_distribution<int> pi_num(-3, 3);
    std::uniform_int_distribution<int> sgn(0, 1);
    ExactScalar v = ExactScalar::from_rational(Rational(coef(rng), den(rng)));
    v = v * ExactScalar::pi_pow(Rational(pi_num(rng), 2));
    return sgn(rng) ? v : -v;
}

ExactScalar random_value(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> nterms(1, 3);
    ExactScalar v;
    int k = nterms(rng);
    for (int i = 0; i < k; ++i) v = v + random_monomial(rng);
    return v;
}

} // namespace

TEST_CASE("products of pi powers add exponents") {
    ExactScalar pi2 = ExactScalar::pi_pow(Rational(2));
    CHECK(pi2 * pi2 == ExactScalar::pi_pow(Rational(4)));
}

TEST_CASE("rational coefficients fold into prime exponents") {
    // (1/2 * pi^(4/5)) * 2 = pi^(4/5)
    ExactScalar half_pi = ExactScalar::from_rational(Rational(1, 2)) *
                          ExactScalar::pi_pow(Rational(4, 5));
    CHECK(half_pi * ExactScalar::from_long(2) == ExactScalar::pi_pow(Rational(4, 5)));

    // 2^(1/5) * 3^(-1/5) has the canonical exponent map {2: 1/5, 3: -1/5}
    ExactScalar v = ExactScalar::from_long(2).pow(Rational(1, 5)) *
                    ExactScalar::from_long(3).pow(Rational(-1, 5));
    REQUIRE(v.is_single_monomial());
    const auto& m = v.terms().front();
    REQUIRE(m.powers.size() == 2);
    CHECK(m.powers[0] == std::pair<long long, Rational>(2, Rational(1, 5)));
    CHECK(m.powers[1] == std::pair<long long, Rational>(3, Rational(-1, 5)));
}

TEST_CASE("pow scales exponent maps exactly") {
    // pi^(2n+2) at n=1 raised to (2n+2)/(2n+3) = 4/5 -> pi^(16/5)
    CHECK(ExactScalar::pi_pow(Rational(4)).pow(Rational(4, 5)) ==
          ExactScalar::pi_pow(Rational(16, 5)));
    CHECK(ExactScalar::from_long(16).pow(Rational(1, 2)) == ExactScalar::from_long(4));

    // 2*4^4*3 = 2^9*3 raised to -4/5 -> {2: -36/5, 3: -4/5}
    ExactScalar base = ExactScalar::from_long(2) * ExactScalar::from_long(4).pow(Rational(4)) *
                       ExactScalar::from_long(3);
    ExactScalar v = base.pow(Rational(-4, 5));
    REQUIRE(v.is_single_monomial());
    const auto& m = v.terms().front();
    REQUIRE(m.powers.size() == 2);
    CHECK(m.powers[0] == std::pair<long long, Rational>(2, Rational(-36, 5)));
    CHECK(m.powers[1] == std::pair<long long, Rational>(3, Rational(-4, 5)));
}

TEST_CASE("pow rejects sums and negative monomials") {
    ExactScalar two_terms = ExactScalar::pi() + ExactScalar::one();
    CHECK_THROWS_AS(two_terms.pow(Rational(1, 2)), MultiTermPower);
    CHECK_THROWS_AS((-ExactScalar::one()).pow(Rational(1, 2)), MultiTermPower);
}

TEST_CASE("addition merges like terms and keeps unlike terms") {
    ExactScalar pi2 = ExactScalar::pi_pow(Rational(2));
    CHECK(pi2 + pi2 == ExactScalar::from_long(2) * pi2);

    ExactScalar v = ExactScalar::pi() + pi2;
    CHECK(v.term_count() == 2);
    CHECK(v.to_float() == doctest::Approx(M_PI + M_PI * M_PI).epsilon(1e-14));

    // merging with unequal denominators: 1/2 + 1/3 = 5/6
    ExactScalar sum = ExactScalar::from_rational(Rational(1, 2)) +
                      ExactScalar::from_rational(Rational(1, 3));
    CHECK(sum == ExactScalar::from_rational(Rational(5, 6)));

    // fractional exponents: 2^(1/2) + 2^(3/2) = 3 * 2^(1/2)
    ExactScalar r2 = ExactScalar::from_long(2).pow(Rational(1, 2));
    ExactScalar r8 = ExactScalar::from_long(2).pow(Rational(3, 2));
    CHECK(r2 + r8 == ExactScalar::from_long(3) * r2);

    // cancellation
    CHECK((ExactScalar::pi() - ExactScalar::pi()).is_zero());
}

TEST_CASE("gamma at integers and half-integers") {
    CHECK(ExactScalar::gamma(Rational(1, 2)) == ExactScalar::pi_pow(Rational(1, 2)));
    CHECK(ExactScalar::gamma(Rational(4)) == ExactScalar::from_long(6));
    // Gamma(5/2) = 3/4 sqrt(pi)
    CHECK(ExactScalar::gamma(Rational(5, 2)) ==
          ExactScalar::from_rational(Rational(3, 4)) * ExactScalar::pi_pow(Rational(1, 2)));
    CHECK_THROWS_AS(ExactScalar::gamma(Rational(1, 3)), UnsupportedArgument);
    CHECK_THROWS_AS(ExactScalar::gamma(Rational(-1, 2)), UnsupportedArgument);
}

TEST_CASE("ring laws on randomized values, exact equality") {
    std::mt19937_64 rng(12345);
    for (int it = 0; it < 50; ++it) {
        ExactScalar a = random_value(rng), b = random_value(rng), c = random_value(rng);
        CHECK(a + b == b + a);
        CHECK(a * b == b * a);
        CHECK((a + b) + c == a + (b + c));
        CHECK((a * b) * c == a * (b * c));
        CHECK(a * (b + c) == a * b + a * c);
    }
}

TEST_CASE("pow composition law on single monomials") {
    std::mt19937_64 rng(777);
    std::uniform_int_distribution<int> num(-6, 6);
    std::uniform_int_distribution<int> den(1, 5);
    for (int it = 0; it < 50; ++it) {
        ExactScalar a = random_monomial(rng);
        if (a.terms().front().sign < 0) a = -a;
        Rational e1(num(rng), den(rng)), e2(num(rng), den(rng));
        CHECK(a.pow(e1).pow(e2) == a.pow(e1 * e2));
    }
}

TEST_CASE("to_float is a homomorphism within 1e-12 relative") {
    std::mt19937_64 rng(99);
    for (int it = 0; it < 100; ++it) {
        ExactScalar a = random_value(rng), b = random_value(rng);
        double lhs = (a * b).to_float();
        double rhs = a.to_float() * b.to_float();
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1e-300, std::abs(lhs)));
    }
}

TEST_CASE("to_float matches independent double evaluation within 1e-14") {
    std::mt19937_64 rng(4242);
    for (int it = 0; it < 100; ++it) {
        ExactScalar a = random_value(rng);
        double direct = 0;
        for (const auto& m : a.terms()) {
            double logv = 0;
            for (auto& [p, e] : m.powers) logv += to_double(e) * std::log(double(p));
            logv += to_double(m.pi_exp) * std::log(M_PI);
            direct += m.sign * std::exp(logv);
        }
        CHECK(a.to_float() == doctest::Approx(direct).epsilon(1e-13));
    }
    // pure rationals agree with mpq evaluation
    Rational q(356, 1024);
    CHECK(ExactScalar::from_rational(q).to_float() == doctest::Approx(to_double(q)).epsilon(1e-15));
}

TEST_CASE("canonicalization is idempotent and equality is canonical") {
    std::mt19937_64 rng(5150);
    for (int it = 0; it < 50; ++it) {
        ExactScalar a = random_value(rng);
        ExactScalar again = a + ExactScalar();  // re-runs canonicalization
        CHECK(a == again);
    }
}

TEST_CASE("string round-trip is exact") {
    ExactScalar v = ExactScalar::parse("-11/2880 * pi^4 * 3^(-2)");
    CHECK(v.to_float() == doctest::Approx(-11.0 / 2880 * std::pow(M_PI, 4) / 9).epsilon(1e-14));
    CHECK(ExactScalar::parse(v.str()) == v);

    std::mt19937_64 rng(31337);
    for (int it = 0; it < 100; ++it) {
        ExactScalar a = random_value(rng);
        CAPTURE(a.str());
        CHECK(ExactScalar::parse(a.str()) == a);
    }

    CHECK(ExactScalar::parse("0").is_zero());
    CHECK(ExactScalar::parse("pi + pi^2").term_count() == 2);
    CHECK(ExactScalar::parse("2^(1/5) * 3^(-1/5)") ==
          ExactScalar::from_long(2).pow(Rational(1, 5)) *
              ExactScalar::from_long(3).pow(Rational(-1, 5)));
    CHECK_THROWS_AS(ExactScalar::parse("pi^"), ParseError);
    CHECK_THROWS_AS(ExactScalar::parse("1/0"), ParseError);
}

TEST_CASE("rational_value and PiResidue") {
    CHECK(ExactScalar::from_rational(Rational(-7, 12)).rational_value() == Rational(-7, 12));
    CHECK_THROWS_AS(ExactScalar::pi().rational_value(), PiResidue);
    CHECK_THROWS_AS(ExactScalar::from_long(2).pow(Rational(1, 2)).rational_value(), PiResidue);
}

TEST_CASE("factorials stay exact at sizes used by the constant pipeline") {
    // (4n+2)! at n=10 and a representative big power
    ExactScalar f42 = factorial_exact(42);
    ExactScalar p = ExactScalar::from_long(4).pow(Rational(25));
    CHECK((f42 * p * f42.inverse() * p.inverse()) == ExactScalar::one());
}
