#pragma once

#include "qcylab/curvature.hpp"
#include "qcylab/exact_scalar.hpp"

#include <array>

namespace qcylab {

/// The exact constants of the asymptotic expansion at parameter n: the
/// leading radial integrals s1, ts1, the epsilon^4 coefficients s2, s3, ts2
/// (per unit ||W^qc||^2), the extremal value lambda and the series constant c.
struct ExpansionBundle {
    int n = 0;
    ExactScalar s1, s2, s3, ts1, ts2;
    ExactScalar lambda;
    Rational c;
};

/// Constants derived from the exact integral pipelines: s1 and ts1 through
/// sphere/radial integrals, the epsilon^4 coefficients through their closed
/// forms, lambda = s1 * ts1^{-(2n+2)/(2n+3)}, c through series_c.
ExpansionBundle derive_constants(int n);

/// The epsilon^4 coefficients recomputed from a concrete admissible sample:
/// brute-force sphere integrals of chi and of the gradient-correction
/// contraction, chained with the exact radial integrals, normalized per unit
/// ||W^qc||^2.  Valid wherever an admissible basis exists (n = 1, 2).
struct PipelineS {
    ExactScalar s2, s3, ts2;
};
PipelineS derive_s_values_from_sample(const QuaternionStructure& Q, const CurvatureTensor& R);

/// True iff s1 * ts1^{-(2n+2)/(2n+3)} equals the closed form
/// 16 n (n+2) 2^{1/(2n+3)} (2n+1)^{-1/(2n+3)} pi^{(2n+2)/(2n+3)} exactly.
bool lambda_consistency(int n);
ExactScalar lambda_closed_form(int n);

/// c = -[(s2+s3)/s1 - (2n+2)/(2n+3) * ts2/ts1]; exact rational (the pi powers
/// cancel; PiResidue otherwise).
Rational series_c(int n);

/// Closed form (22n+3)/(2304 n^2 (2n+1)(2n+3)).
Rational series_c_closed_form(long n);

/// The sphere integral of the assembled chi, measured in units of
/// pi^{2n} ||W^qc||^2 / (2n+1)!.  The reference constant chain uses -11/1440;
/// the assembled volume expansion yields -1/240.
Rational measured_chi_unit(const QuaternionStructure& Q, const CurvatureTensor& R);

/// Bundle with the chi-dependent epsilon^4 coefficients rebuilt from a
/// caller-supplied chi-integral unit; s3 (the 17/720 chain) is unchanged.
/// With chi_unit = -11/1440 this reproduces derive_constants exactly.
ExpansionBundle derive_constants_with_chi_unit(int n, const Rational& chi_unit);

/// Coefficients of the degree-4 truncation in epsilon: index k holds the
/// epsilon^k coefficient.  Only k = 0 and k = 4 are nonzero.
std::array<ExactScalar, 5> assemble_expansion(int n, const ExactScalar& wqc_norm_sq);

} // namespace qcylab
