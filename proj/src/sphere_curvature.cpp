#include "qcylab/sphere_curvature.hpp"

#include "qcylab/errors.hpp"
#include "qcylab/exact_integration.hpp"

#include <map>

namespace qcylab {

namespace {

// Accumulates rational coefficients per sorted sphere-exponent multiset, so
// the hot loops stay in plain rational arithmetic.
class SphereAccumulator {
public:
    explicit SphereAccumulator(int n) : n_(n) {}

    void add(std::initializer_list<int> indices, const Rational& value) {
        if (value == 0) return;
        std::vector<long> expo(static_cast<std::size_t>(4 * n_), 0);
        for (int i : indices) expo[static_cast<std::size_t>(i)] += 1;
        for (long e : expo)
            if (e % 2 == 1) return;  // odd monomials integrate to zero
        std::sort(expo.begin(), expo.end());
        acc_[expo] += value;
    }

    ExactScalar total() const {
        ExactScalar v;
        for (const auto& [expo, coef] : acc_)
            v = v + ExactScalar::from_rational(coef) * sphere_monomial(n_, expo);
        return v;
    }

private:
    int n_;
    std::map<std::vector<long>, Rational> acc_;
};

} // namespace

ExactScalar brute_force_lhs(int case_id, const QuaternionStructure& Q, const CurvatureTensor& R,
                            int i_fixed) {
    int d = Q.dim();
    SphereAccumulator acc(Q.n);
    // I-contractions are resolved through the one-nonzero-per-row supports;
    // everything else is a dumb sum over all index tuples.
    switch (case_id) {
        case 1:
            for (int g = 0; g < d; ++g)
                for (int de = 0; de < d; ++de)
                    for (int xi = 0; xi < d; ++xi)
                        for (int et = 0; et < d; ++et) {
                            Rational s(0);
                            for (int al = 0; al < d; ++al)
                                for (int be = 0; be < d; ++be)
                                    s += R.at(de, al, g, be) * R.at(et, be, xi, al);
                            acc.add({g, de, xi, et}, s);
                        }
            break;
        case 2:
            for (int g = 0; g < d; ++g)
                for (int de = 0; de < d; ++de)
                    for (int xi = 0; xi < d; ++xi)
                        for (int et = 0; et < d; ++et) {
                            auto [io, sx] = Q.row_support(0, xi);  // I1(xi, io)
                            Rational s(0);
                            for (int al = 0; al < d; ++al) {
                                auto [th, sa] = Q.row_support(0, al);  // I1(al, th)
                                Rational inner(0);
                                for (int be = 0; be < d; ++be)
                                    inner += R.at(de, th, g, be) * R.at(et, be, al, io);
                                s += inner * (sa * sx);
                            }
                            acc.add({g, de, xi, et}, s);
                        }
            break;
        case 3:
            for (int g = 0; g < d; ++g)
                for (int de = 0; de < d; ++de)
                    for (int xi = 0; xi < d; ++xi)
                        for (int et = 0; et < d; ++et) {
                            auto [io, se] = Q.row_support(0, et);  // I1(et, io)
                            Rational s(0);
                            for (int al = 0; al < d; ++al) {
                                auto [th, sa] = Q.row_support(0, al);
                                Rational inner(0);
                                for (int be = 0; be < d; ++be)
                                    inner += R.at(de, th, g, be) * R.at(al, be, xi, io);
                                s += inner * (sa * se);
                            }
                            acc.add({g, de, xi, et}, s);
                        }
            break;
        case 4:
            for (int g = 0; g < d; ++g)
                for (int de = 0; de < d; ++de)
                    for (int xi = 0; xi < d; ++xi)
                        for (int et = 0; et < d; ++et) {
                            auto [be, sg] = Q.row_support(0, g);   // I1(g, be)
                            auto [io, sx] = Q.row_support(0, xi);  // I1(xi, io)
                            Rational s(0);
                            for (int al = 0; al < d; ++al) {
                                auto [ka, sa] = Q.row_support(0, al);  // I1(al, ka)
                                for (int la = 0; la < d; ++la) {
                                    auto [th, sl] = Q.row_support(0, la);  // I1(la, th)
                                    s += R.at(de, th, al, be) * R.at(et, ka, la, io) *
                                         (sa * sl * sg * sx);
                                }
                            }
                            acc.add({g, de, xi, et}, s);
                        }
            break;
        case 5:
            for (int g = 0; g < d; ++g)
                for (int de = 0; de < d; ++de)
                    for (int xi = 0; xi < d; ++xi)
                        for (int et = 0; et < d; ++et) {
                            auto [be, sd] = Q.row_support(0, de);  // I1(de, be)
                            auto [io, se] = Q.row_support(0, et);  // I1(et, io)
                            Rational s(0);
                            for (int al = 0; al < d; ++al) {
                                auto [ka, sa] = Q.row_support(0, al);
                                for (int la = 0; la < d; ++la) {
                                    auto [th, sl] = Q.row_support(0, la);
                                    s += R.at(al, th, g, be) * R.at(la, ka, xi, io) *
                                         (sa * sl * sd * se);
                                }
                            }
                            acc.add({g, de, xi, et}, s);
                        }
            break;
        case 6:
            for (int g = 0; g < d; ++g)
                for (int de = 0; de < d; ++de)
                    for (int xi = 0; xi < d; ++xi)
                        for (int et = 0; et < d; ++et) {
                            auto [be, sg] = Q.row_support(0, g);
                            auto [io, se] = Q.row_support(0, et);
                            Rational s(0);
                            for (int al = 0; al < d; ++al) {
                                auto [ka, sa] = Q.row_support(0, al);
                                for (int la = 0; la < d; ++la) {
                                    auto [th, sl] = Q.row_support(0, la);
                                    s += R.at(de, th, al, be) * R.at(la, ka, xi, io) *
                                         (sa * sl * sg * se);
                                }
                            }
                            acc.add({g, de, xi, et}, s);
                        }
            break;
        case 7: {
            int i = i_fixed;
            for (int be = 0; be < d; ++be) {
                auto [al, sb] = Q.row_support(i, be);  // I_i(be, al)
                for (int ka = 0; ka < d; ++ka) {
                    auto [th, sk] = Q.row_support(i, ka);  // I_i(ka, th)
                    for (int de = 0; de < d; ++de)
                        for (int xi = 0; xi < d; ++xi)
                            for (int et = 0; et < d; ++et)
                                for (int io = 0; io < d; ++io) {
                                    Rational s(0);
                                    for (int g = 0; g < d; ++g)
                                        s += R.at(de, al, io, g) * R.at(et, g, xi, th);
                                    acc.add({be, de, xi, et, io, ka}, s * (sb * sk));
                                }
                }
            }
            break;
        }
        default:
            throw UnsupportedArgument("curvature integral case_id must be 1..7");
    }
    return acc.total();
}

ExactScalar closed_form_rhs(int case_id, int n, const Rational& wqc_norm_sq) {
    Rational coef;
    long fact = 2 * n + 1;
    switch (case_id) {
        case 1: coef = Rational(3, 4); break;
        case 2: coef = Rational(3, 4); break;
        case 3: coef = Rational(1, 2); break;
        case 4: coef = Rational(3, 4); break;
        case 5: coef = Rational(1); break;
        case 6: coef = Rational(1, 2); break;
        case 7:
            coef = Rational(1);
            fact = 2 * n + 2;
            break;
        default:
            throw UnsupportedArgument("curvature integral case_id must be 1..7");
    }
    return ExactScalar::from_rational(coef * wqc_norm_sq) * ExactScalar::pi_pow(Rational(2 * n)) *
           factorial_exact(fact).inverse();
}

ExactScalar chi_sphere_integral(const QuaternionStructure& Q, const CurvatureTensor& R) {
    static const Rational weights[6] = {Rational(-1, 2880), Rational(-1, 480), Rational(-1, 480),
                                        Rational(-1, 576),  Rational(-1, 576), Rational(-1, 288)};
    ExactScalar v;
    for (int c = 1; c <= 6; ++c)
        v = v + ExactScalar::from_rational(weights[c - 1]) * brute_force_lhs(c, Q, R);
    return v;
}

} // namespace qcylab
