#include "qcylab/exact_integration.hpp"

#include "qcylab/errors.hpp"

#include <cmath>
#include <map>
#include <random>

namespace qcylab {

JlIntegral jl_integral(const Rational& gamma, const Rational& alpha) {
    Rational g = gamma, a = alpha;
    g.canonicalize();
    a.canonicalize();
    if (!(g + 1 > 0) || !(a - g - 1 > 0))
        throw DivergentIntegral("jl_integral requires gamma+1 > 0 and alpha-gamma-1 > 0");
    ExactScalar num = ExactScalar::gamma(Rational(g + 1) / 2) *
                      ExactScalar::gamma(Rational(a - g - 1) / 2);
    ExactScalar den = ExactScalar::from_long(2) * ExactScalar::gamma(Rational(a) / 2);
    JlIntegral r;
    r.coeff = num * den.inverse();
    r.a_exponent = g - a + 1;
    return r;
}

ExactScalar jl_integral(const ExactScalar& a, const Rational& gamma, const Rational& alpha) {
    JlIntegral j = jl_integral(gamma, alpha);
    return j.coeff * a.pow(j.a_exponent);
}

ExactScalar sphere_monomial(int n, const std::vector<long>& alpha) {
    // Memoized by the sorted exponent multiset; the integral is invariant
    // under permuting the exponents.
    static std::map<std::pair<int, std::vector<long>>, ExactScalar> cache;
    long total = 0;
    std::vector<long> key = alpha;
    key.resize(static_cast<std::size_t>(4 * n), 0);
    for (long a : key) {
        if (a < 0) throw UnsupportedArgument("sphere_monomial exponents must be >= 0");
        if (a % 2 == 1) return ExactScalar();
        total += a;
    }
    std::sort(key.begin(), key.end());
    auto it = cache.find({n, key});
    if (it != cache.end()) return it->second;

    ExactScalar v = ExactScalar::pi_pow(Rational(2 * n));
    for (long a : key) v = v * factorial_exact(a) * factorial_exact(a / 2).inverse();
    v = v * ExactScalar::from_long(2).pow(Rational(1 - total));
    v = v * factorial_exact((total + 4L * n - 2) / 2).inverse();
    cache[{n, key}] = v;
    return v;
}

std::vector<McEstimate> sphere_monomial_mc_batch(int n,
                                                 const std::vector<std::vector<long>>& alphas,
                                                 long samples, std::uint64_t seed) {
    if (samples < 1000) throw UnsupportedArgument("sphere_monomial_mc needs samples >= 1000");
    int d = 4 * n;
    // Exact area of S^{4n-1} = 2 pi^{2n} / (2n-1)!
    double area = sphere_monomial(n, {}).to_float();

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> z(static_cast<std::size_t>(d));
    std::size_t k = alphas.size();
    std::vector<double> mean(k, 0.0), m2(k, 0.0);
    for (long s = 0; s < samples; ++s) {
        double norm2 = 0;
        for (int i = 0; i < d; ++i) {
            z[static_cast<std::size_t>(i)] = gauss(rng);
            norm2 += z[static_cast<std::size_t>(i)] * z[static_cast<std::size_t>(i)];
        }
        double inv = 1.0 / std::sqrt(norm2);
        for (int i = 0; i < d; ++i) z[static_cast<std::size_t>(i)] *= inv;
        for (std::size_t j = 0; j < k; ++j) {
            double v = 1.0;
            for (std::size_t i = 0; i < alphas[j].size(); ++i)
                for (long e = 0; e < alphas[j][i]; ++e) v *= z[i];
            // streaming mean / variance (Welford)
            double delta = v - mean[j];
            mean[j] += delta / static_cast<double>(s + 1);
            m2[j] += delta * (v - mean[j]);
        }
    }
    std::vector<McEstimate> out(k);
    for (std::size_t j = 0; j < k; ++j) {
        double var = m2[j] / static_cast<double>(samples - 1);
        out[j].value = area * mean[j];
        out[j].std_error = area * std::sqrt(var / static_cast<double>(samples));
    }
    return out;
}

McEstimate sphere_monomial_mc(int n, const std::vector<long>& alpha, long samples,
                              std::uint64_t seed) {
    return sphere_monomial_mc_batch(n, {alpha}, samples, seed)[0];
}

ExactScalar radial_model_integral(long A, long B, std::array<long, 3> wpow) {
    for (long w : wpow)
        if (w < 0 || w % 2 != 0)
            throw UnsupportedArgument("radial_model_integral t-powers must be even and >= 0");
    // Integrate t1, then t2, then t3; each axis runs over all of R, so each
    // half-line formula is doubled.  The running exponent "alpha" tracks the
    // power of the remaining quadratic.
    ExactScalar coeff = ExactScalar::one();
    Rational alpha(2 * B);
    for (int axis = 0; axis < 3; ++axis) {
        JlIntegral j = jl_integral(Rational(wpow[static_cast<std::size_t>(axis)]), alpha);
        coeff = coeff * ExactScalar::from_long(2) * j.coeff;
        alpha = alpha - Rational(wpow[static_cast<std::size_t>(axis)]) - 1;
    }
    // Remaining integrand: r^A (1+r^2)^(-alpha) over [0, inf).
    JlIntegral j = jl_integral(Rational(A), Rational(2) * alpha);
    return coeff * j.coeff;
}

} // namespace qcylab
