#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qcylab/exact_integration.hpp"
#include "qcylab/quadrature.hpp"

#include <cmath>
#include <random>

using namespace qcylab;

TEST_CASE("jl_integral special cases against antiderivative oracles") {
    // gamma=0, alpha=2: arctan antiderivative gives pi/2 * a^{-1}
    JlIntegral j = jl_integral(Rational(0), Rational(2));
    CHECK(j.coeff == ExactScalar::from_rational(Rational(1, 2)) * ExactScalar::pi());
    CHECK(j.a_exponent == Rational(-1));

    // gamma=1, alpha=4: substitution u = a^2+b^2 gives 1/2 * a^{-2}
    j = jl_integral(Rational(1), Rational(4));
    CHECK(j.coeff == ExactScalar::from_rational(Rational(1, 2)));
    CHECK(j.a_exponent == Rational(-2));
}

TEST_CASE("jl_integral matches adaptive quadrature at the S1-pipeline exponents") {
    // gamma = 4n+1, alpha = 2(2n+3) at n=1, a = 2
    double a = 2.0;
    ExactScalar exact = jl_integral(ExactScalar::from_long(2), Rational(5), Rational(10));
    auto f = [a](double b) { return std::pow(b, 5) * std::pow(a * a + b * b, -5.0); };
    double quad = integrate(f, 0.0, 2e4, {1e-14, 1e-13});
    CHECK(std::abs(exact.to_float() - quad) <= 1e-9 * std::abs(quad));
}

TEST_CASE("jl_integral scaling law in a") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> ks(1, 9);
    for (int it = 0; it < 20; ++it) {
        Rational g(ks(rng)), al(g + 2 * ks(rng));
        ExactScalar k = ExactScalar::from_long(ks(rng));
        ExactScalar a = ExactScalar::from_long(ks(rng));
        JlIntegral j = jl_integral(g, al);
        CHECK(jl_integral(k * a, g, al) == jl_integral(a, g, al) * k.pow(j.a_exponent));
    }
}

TEST_CASE("jl_integral rejects divergent parameter ranges") {
    CHECK_THROWS_AS(jl_integral(Rational(-1), Rational(4)), DivergentIntegral);
    CHECK_THROWS_AS(jl_integral(Rational(3), Rational(4)), DivergentIntegral);
}

TEST_CASE("sphere monomial closed form: base cases") {
    // alpha = 0 at n=1: area of S^3 = 2 pi^2
    CHECK(sphere_monomial(1, {}) == ExactScalar::from_long(2) * ExactScalar::pi_pow(Rational(2)));
    // alpha = (2,0,0,0) at n=1: area/4 = pi^2/2 by symmetry
    CHECK(sphere_monomial(1, {2, 0, 0, 0}) ==
          ExactScalar::from_rational(Rational(1, 2)) * ExactScalar::pi_pow(Rational(2)));
    // any odd entry kills the integral
    CHECK(sphere_monomial(1, {1, 2, 0, 0}).is_zero());
    CHECK(sphere_monomial(2, {0, 3, 0, 0, 2, 0, 0, 0}).is_zero());
}

TEST_CASE("sphere monomial: sum over a quadratic form recovers the area") {
    // sum_s int (zeta^s)^2 = area since |zeta| = 1
    for (int n : {1, 2}) {
        ExactScalar total;
        for (int s = 0; s < 4 * n; ++s) {
            std::vector<long> a(static_cast<std::size_t>(4 * n), 0);
            a[static_cast<std::size_t>(s)] = 2;
            total = total + sphere_monomial(n, a);
        }
        CHECK(total == sphere_monomial(n, {}));
    }
}

TEST_CASE("gamma-duplication consistency for 200 random exponent vectors") {
    // Re-derive through 2 Gamma(beta_1)...Gamma(beta_4n) / Gamma(sum beta)
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> expo(0, 4);
    for (int n : {1, 2}) {
        for (int it = 0; it < 100; ++it) {
            std::vector<long> a(static_cast<std::size_t>(4 * n));
            for (auto& e : a) e = 2 * expo(rng);
            ExactScalar viaGamma = ExactScalar::from_long(2);
            Rational beta_sum(0);
            for (long e : a) {
                Rational beta = Rational(e + 1) / 2;
                viaGamma = viaGamma * ExactScalar::gamma(beta);
                beta_sum += beta;
            }
            viaGamma = viaGamma * ExactScalar::gamma(beta_sum).inverse();
            CHECK(viaGamma == sphere_monomial(n, a));
        }
    }
}

TEST_CASE("sphere monomial is invariant under permuting exponents") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> expo(0, 3);
    for (int it = 0; it < 40; ++it) {
        std::vector<long> a(8);
        for (auto& e : a) e = 2 * expo(rng);
        std::vector<long> b = a;
        std::shuffle(b.begin(), b.end(), rng);
        CHECK(sphere_monomial(2, a) == sphere_monomial(2, b));
    }
}

TEST_CASE("Monte Carlo oracle agrees with the exact formula within 4 sigma") {
    McEstimate mc = sphere_monomial_mc(1, {}, 20000, 17);
    double exact = sphere_monomial(1, {}).to_float();
    CHECK(std::abs(mc.value - exact) <= 1e-9);  // constant integrand: zero variance
    CHECK(mc.std_error <= 1e-9);

    mc = sphere_monomial_mc(1, {2, 2, 0, 0}, 200000, 99);
    exact = sphere_monomial(1, {2, 2, 0, 0}).to_float();
    CHECK(std::abs(mc.value - exact) <= 4 * mc.std_error);

    // odd entry: estimate consistent with 0
    mc = sphere_monomial_mc(1, {1, 0, 0, 0}, 200000, 7);
    CHECK(std::abs(mc.value) <= 4 * mc.std_error);

    CHECK_THROWS_AS(sphere_monomial_mc(1, {}, 10, 0), UnsupportedArgument);
}

TEST_CASE("radial model integral reproduces the flat-model radial constants") {
    // A = 4n+1, B = 2n+3 at n=1, with the S1 prefactor 8(n+1)(n+2)(2n)! * area(S^3),
    // reproduces S1(1) = pi^4/8.
    ExactScalar s1 = ExactScalar::from_long(8 * 2 * 3 * 2) * sphere_monomial(1, {}) *
                     radial_model_integral(5, 5);
    CHECK(s1 == ExactScalar::from_rational(Rational(1, 8)) * ExactScalar::pi_pow(Rational(4)));

    // A = 4n-1, B = 2n+3 at n=1, with prefactor (2n)!/8 * area(S^3),
    // reproduces S~1(1) = pi^4 / (2*4^4*3) = pi^4/1536.
    ExactScalar ts1 = ExactScalar::from_rational(Rational(2, 8)) * sphere_monomial(1, {}) *
                      radial_model_integral(3, 5);
    CHECK(ts1 == ExactScalar::from_rational(Rational(1, 1536)) * ExactScalar::pi_pow(Rational(4)));
}

TEST_CASE("radial model integral matches the quadrature oracle to 1e-8 relative") {
    struct Case {
        long A, B;
        std::array<long, 3> w;
    };
    for (const Case& c : {Case{5, 5, {0, 0, 0}}, Case{3, 5, {0, 0, 0}}, Case{9, 5, {0, 0, 0}},
                          Case{9, 6, {2, 0, 0}}, Case{7, 6, {0, 2, 0}}}) {
        CAPTURE(c.A);
        CAPTURE(c.B);
        ExactScalar exact = radial_model_integral(c.A, c.B, c.w);
        // reduce the t-integral to spherical coordinates: for w = (0,0,0) the
        // weight is 4 pi s^2; for a single t_i^2 it is (4 pi / 3) s^4.
        bool has_t2 = c.w[0] + c.w[1] + c.w[2] > 0;
        auto inner = [&](double r) {
            double a2 = (1 + r * r) * (1 + r * r);
            auto g = [&](double s) {
                double w = has_t2 ? 4 * M_PI / 3 * std::pow(s, 4) : 4 * M_PI * s * s;
                return w * std::pow(a2 + s * s, -static_cast<double>(c.B));
            };
            double smax = 3000.0 * std::max(1.0, std::sqrt(a2));
            return integrate(g, 0.0, smax, {1e-13, 1e-12}) * std::pow(r, c.A);
        };
        double quad = integrate(inner, 0.0, 600.0, {1e-12, 1e-11});
        CHECK(std::abs(exact.to_float() - quad) <= 1e-8 * std::abs(quad));
    }
}

TEST_CASE("radial model integral validates its preconditions") {
    CHECK_THROWS_AS(radial_model_integral(3, 5, {1, 0, 0}), UnsupportedArgument);
    CHECK_THROWS_AS(radial_model_integral(3, 1), DivergentIntegral);
}

TEST_CASE("quadrature reports non-convergence instead of returning garbage") {
    QuadratureConfig tiny;
    tiny.abs_tol = 1e-300;
    tiny.rel_tol = 1e-300;
    tiny.max_cells = 40;
    auto rough = [](double x) { return std::sqrt(std::abs(std::sin(50.0 * x))); };
    CHECK_THROWS_AS(integrate(rough, 0.0, 10.0, tiny), QuadratureNonConvergent);
}
