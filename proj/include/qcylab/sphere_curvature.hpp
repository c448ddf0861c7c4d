#pragma once

#include "qcylab/curvature.hpp"
#include "qcylab/exact_scalar.hpp"

namespace qcylab {

/// The seven sphere integrals of curvature contractions.  The left-hand
/// sides are evaluated by brute-force index enumeration against exact sphere
/// monomials; the right-hand sides are the closed-form multiples of
/// ||W^qc||^2.  case_id runs 1..7; case 7 carries the fixed almost complex
/// index i in {0,1,2}.
ExactScalar brute_force_lhs(int case_id, const QuaternionStructure& Q, const CurvatureTensor& R,
                            int i_fixed = 0);

ExactScalar closed_form_rhs(int case_id, int n, const Rational& wqc_norm_sq);

/// Exact integral of the chi profile over S^{4n-1}: the defchi-weighted
/// combination of the first six brute-force integrals.
ExactScalar chi_sphere_integral(const QuaternionStructure& Q, const CurvatureTensor& R);

} // namespace qcylab
