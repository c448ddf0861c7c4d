#pragma once

#include "qcylab/exact_scalar.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace qcylab {

/// int_0^inf b^gamma (a^2+b^2)^(-alpha/2) db
///   = Gamma((gamma+1)/2) Gamma((alpha-gamma-1)/2) / (2 Gamma(alpha/2)) * a^(gamma-alpha+1).
/// Returned as the exact coefficient plus the exponent of a.  Preconditions
/// gamma+1 > 0 and alpha-gamma-1 > 0, else DivergentIntegral.
struct JlIntegral {
    ExactScalar coeff;
    Rational a_exponent;  // gamma - alpha + 1
};
JlIntegral jl_integral(const Rational& gamma, const Rational& alpha);

/// Same integral with a supplied as a single positive monomial.
ExactScalar jl_integral(const ExactScalar& a, const Rational& gamma, const Rational& alpha);

/// Exact integral of zeta^alpha over S^{4n-1}: zero when some exponent is
/// odd, otherwise the factorial/pi closed form.
ExactScalar sphere_monomial(int n, const std::vector<long>& alpha);

/// Monte Carlo estimate of the same integral via normalized Gaussian samples.
struct McEstimate {
    double value = 0;
    double std_error = 0;
};
McEstimate sphere_monomial_mc(int n, const std::vector<long>& alpha, long samples,
                              std::uint64_t seed);

/// Batched variant: one Gaussian stream evaluates many exponent vectors.
std::vector<McEstimate> sphere_monomial_mc_batch(int n,
                                                 const std::vector<std::vector<long>>& alphas,
                                                 long samples, std::uint64_t seed);

/// int_0^inf int_{R^3} r^A |t1|^{w1}|t2|^{w2}|t3|^{w3}
///       [(1+r^2)^2 + |w|^2]^(-B) dt dr,  exact, by chained applications of
/// jl_integral in the order t1, t2, t3, r.  The w_k must be even and >= 0.
ExactScalar radial_model_integral(long A, long B, std::array<long, 3> wpow = {0, 0, 0});

} // namespace qcylab
