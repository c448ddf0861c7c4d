#pragma once

#include "qcylab/errors.hpp"
#include "qcylab/rational.hpp"

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qcylab {

/// Exact number of the form  sum of  (+/-) prod p_k^(e_k) * pi^q,  with prime
/// bases p_k and rational exponents.  All integer content is kept fully
/// factored, so products, rational powers and Gamma values at half-integers
/// are closed operations and equality is decidable by comparing canonical
/// forms.  Values are immutable once built.
class ExactScalar {
public:
    struct Monomial {
        int sign = 1;                                        // +1 or -1
        std::vector<std::pair<long long, Rational>> powers;  // sorted by prime base, exponent != 0
        Rational pi_exp = Rational(0);
    };

    ExactScalar() = default;  // zero

    static ExactScalar from_integer(const Integer& v);
    static ExactScalar from_long(long v) { return from_integer(Integer(v)); }
    static ExactScalar from_rational(const Rational& q);
    static ExactScalar pi_pow(const Rational& e);
    static ExactScalar pi() { return pi_pow(Rational(1)); }
    static ExactScalar one() { return from_long(1); }

    bool is_zero() const { return terms_.empty(); }
    bool is_single_monomial() const { return terms_.size() == 1; }
    std::size_t term_count() const { return terms_.size(); }
    const std::vector<Monomial>& terms() const { return terms_; }

    /// True iff the value is a plain rational (single monomial or zero, no pi,
    /// integer exponents only).
    bool is_rational() const;
    /// The value as a Rational; throws PiResidue if is_rational() is false.
    Rational rational_value() const;

    ExactScalar operator-() const;
    friend ExactScalar operator+(const ExactScalar& a, const ExactScalar& b);
    friend ExactScalar operator-(const ExactScalar& a, const ExactScalar& b);
    friend ExactScalar operator*(const ExactScalar& a, const ExactScalar& b);

    /// Exact rational power.  Requires a single positive monomial; throws
    /// MultiTermPower otherwise.
    ExactScalar pow(const Rational& e) const;

    /// Multiplicative inverse, same restriction as pow.
    ExactScalar inverse() const { return pow(Rational(-1)); }

    /// Gamma at positive integer or half-integer t; throws UnsupportedArgument
    /// for any other argument.
    static ExactScalar gamma(const Rational& t);

    double to_float() const;

    /// Rendering like "-11/2880 * pi^4 * 3^(-1/2)"; terms joined by " + " /
    /// " - ".  parse() accepts the same grammar and canonicalizes.
    std::string str() const;
    static ExactScalar parse(std::string_view text);

    bool operator==(const ExactScalar& o) const { return terms_ == o.terms_; }
    bool operator!=(const ExactScalar& o) const { return !(*this == o); }

private:
    static ExactScalar from_terms(std::vector<Monomial> raw);

    std::vector<Monomial> terms_;  // canonical: merged, sorted, no zero terms
};

inline bool operator==(const ExactScalar::Monomial& a, const ExactScalar::Monomial& b) {
    return a.sign == b.sign && a.pi_exp == b.pi_exp && a.powers == b.powers;
}

/// Prime factorization of |v|, v != 0, as sorted (prime, multiplicity) pairs.
std::vector<std::pair<long long, long>> factor_integer(const Integer& v);

/// n! as an ExactScalar (factored), n >= 0.
ExactScalar factorial_exact(long n);

} // namespace qcylab
