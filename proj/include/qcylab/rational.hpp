#pragma once

#include <gmpxx.h>

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

namespace qcylab {

using Integer = mpz_class;
using Rational = mpq_class;

inline Rational rat(long num, long den = 1) {
    Rational q(num, den);
    q.canonicalize();
    return q;
}

inline double to_double(const Rational& q) { return q.get_d(); }

inline std::string to_string(const Rational& q) { return q.get_str(); }

inline Rational rational_from_string(const std::string& s) {
    Rational q(s);
    q.canonicalize();
    return q;
}

/// True iff q is an integer.
inline bool is_integer(const Rational& q) { return q.get_den() == 1; }

inline Integer floor_div(const Integer& a, const Integer& b) {
    Integer q;
    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

/// Largest integer <= q.
inline Integer rational_floor(const Rational& q) {
    return floor_div(q.get_num(), q.get_den());
}

using RatMat = Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic>;
using RatVec = Eigen::Matrix<Rational, Eigen::Dynamic, 1>;

} // namespace qcylab

namespace Eigen {

template <>
struct NumTraits<qcylab::Rational> : GenericNumTraits<qcylab::Rational> {
    using Real = qcylab::Rational;
    using NonInteger = qcylab::Rational;
    using Literal = qcylab::Rational;
    using Nested = qcylab::Rational;

    static inline Real epsilon() { return Real(0); }
    static inline Real dummy_precision() { return Real(0); }
    static inline int digits10() { return 0; }

    enum {
        IsComplex = 0,
        IsInteger = 0,
        IsSigned = 1,
        RequireInitialization = 1,
        ReadCost = 6,
        AddCost = 150,
        MulCost = 100,
    };
};

} // namespace Eigen
