#include "qcylab/expansion.hpp"

#include "qcylab/exact_integration.hpp"
#include "qcylab/graded.hpp"
#include "qcylab/sphere_curvature.hpp"

namespace qcylab {

namespace {

ExactScalar numerator_prefactor(int n) {
    // 8 (n+1)(n+2) (2n)!
    return ExactScalar::from_long(8L * (n + 1) * (n + 2)) * factorial_exact(2 * n);
}

ExactScalar denominator_prefactor(int n) {
    // (2n)! / 8
    return factorial_exact(2 * n) * ExactScalar::from_rational(Rational(1, 8));
}

} // namespace

namespace {

ExpansionBundle base_bundle(int n);

Rational c_from_bundle(const ExpansionBundle& b) {
    ExactScalar ratio1 = (b.s2 + b.s3) * b.s1.inverse();
    ExactScalar ratio2 = b.ts2 * b.ts1.inverse() *
                         ExactScalar::from_rational(Rational(2L * b.n + 2, 2L * b.n + 3));
    return (-(ratio1 - ratio2)).rational_value();
}

ExpansionBundle base_bundle(int n) {
    ExpansionBundle b;
    b.n = n;
    ExactScalar area = sphere_monomial(n, {});
    b.s1 = numerator_prefactor(n) * area * radial_model_integral(4L * n + 1, 2L * n + 3);
    b.ts1 = denominator_prefactor(n) * area * radial_model_integral(4L * n - 1, 2L * n + 3);

    // epsilon^4 coefficients per unit ||W^qc||^2
    b.s2 = ExactScalar::from_rational(Rational(-11L * (n + 1) * (n + 2),
                                               45L * n * (2 * n + 1) * (2 * n + 1))) *
           ExactScalar::from_long(4).pow(Rational(-(2L * n + 3))) *
           ExactScalar::pi_pow(Rational(2 * n + 2));
    b.s3 = ExactScalar::from_rational(
               Rational(17L * (n + 2), 30L * n * (2 * n + 1) * (2 * n + 1) * (2 * n + 3))) *
           ExactScalar::from_long(4).pow(Rational(-(2L * n + 3))) *
           ExactScalar::pi_pow(Rational(2 * n + 2));
    b.ts2 = ExactScalar::from_rational(
                Rational(-11, 90L * (2 * n + 1) * (2 * n + 1) * (2 * n + 2))) *
            ExactScalar::from_long(4).pow(Rational(-(2L * n + 5))) *
            ExactScalar::pi_pow(Rational(2 * n + 2));

    Rational exponent(-(2L * n + 2), 2L * n + 3);
    b.lambda = b.s1 * b.ts1.pow(exponent);
    return b;
}

} // namespace

ExpansionBundle derive_constants(int n) {
    ExpansionBundle b = base_bundle(n);
    b.c = c_from_bundle(b);
    return b;
}

PipelineS derive_s_values_from_sample(const QuaternionStructure& Q, const CurvatureTensor& R) {
    int n = Q.n;
    Rational w2 = wqc_norm_sq(R);
    ExactScalar inv_w2 = ExactScalar::from_rational(Rational(1) / w2);
    ExactScalar chi_int = chi_sphere_integral(Q, R);

    PipelineS out;
    out.s2 = numerator_prefactor(n) * chi_int * radial_model_integral(4L * n + 5, 2L * n + 3) *
             inv_w2;
    // the 17/720 gradient correction: one (t^i)^2-weighted radial factor per i
    ExactScalar s3;
    for (int i = 0; i < 3; ++i) {
        std::array<long, 3> w = {0, 0, 0};
        w[static_cast<std::size_t>(i)] = 2;
        s3 = s3 + brute_force_lhs(7, Q, R, i) * radial_model_integral(4L * n + 5, 2L * n + 4, w);
    }
    out.s3 = ExactScalar::from_rational(Rational(17L * (n + 1) * (n + 2), 90)) *
             factorial_exact(2 * n) * s3 * inv_w2;
    out.ts2 = denominator_prefactor(n) * chi_int * radial_model_integral(4L * n + 3, 2L * n + 3) *
              inv_w2;
    return out;
}

ExactScalar lambda_closed_form(int n) {
    Rational inv(1, 2L * n + 3);
    return ExactScalar::from_long(16L * n * (n + 2)) * ExactScalar::from_long(2).pow(inv) *
           ExactScalar::from_long(2L * n + 1).pow(-inv) *
           ExactScalar::pi_pow(Rational(2L * n + 2, 2L * n + 3));
}

bool lambda_consistency(int n) {
    ExpansionBundle b = derive_constants(n);
    return b.lambda == lambda_closed_form(n);
}

Rational series_c(int n) { return c_from_bundle(base_bundle(n)); }

Rational measured_chi_unit(const QuaternionStructure& Q, const CurvatureTensor& R) {
    auto [chi_ref, chi_asm] = chi_two_ways(Q, R);
    ExactScalar integral;
    for (auto& [k, c] : chi_asm.terms()) {
        std::vector<long> expo(static_cast<std::size_t>(Q.dim()), 0);
        for (int a = 0; a < Q.dim(); ++a)
            expo[static_cast<std::size_t>(a)] = GradedPoly::exponent(k, a);
        integral = integral + ExactScalar::from_rational(c) * sphere_monomial(Q.n, expo);
    }
    ExactScalar unit = ExactScalar::pi_pow(Rational(2 * Q.n)) *
                       factorial_exact(2 * Q.n + 1).inverse() *
                       ExactScalar::from_rational(wqc_norm_sq(R));
    return (integral * unit.inverse()).rational_value();
}

ExpansionBundle derive_constants_with_chi_unit(int n, const Rational& chi_unit) {
    ExpansionBundle b = base_bundle(n);
    ExactScalar chi_integral = ExactScalar::from_rational(chi_unit) *
                               ExactScalar::pi_pow(Rational(2 * n)) *
                               factorial_exact(2 * n + 1).inverse();
    b.s2 = numerator_prefactor(n) * chi_integral * radial_model_integral(4L * n + 5, 2L * n + 3);
    b.ts2 = denominator_prefactor(n) * chi_integral * radial_model_integral(4L * n + 3, 2L * n + 3);
    b.c = c_from_bundle(b);
    return b;
}

Rational series_c_closed_form(long n) {
    return Rational(22 * n + 3) /
           Rational(Integer(2304) * n * n * (2 * n + 1) * (2 * n + 3));
}

std::array<ExactScalar, 5> assemble_expansion(int n, const ExactScalar& wqc_norm_sq) {
    ExpansionBundle b = derive_constants(n);
    std::array<ExactScalar, 5> coeffs;
    coeffs[0] = b.lambda;
    coeffs[4] = -(b.lambda * ExactScalar::from_rational(b.c) * wqc_norm_sq);
    return coeffs;
}

} // namespace qcylab
