#pragma once

#include "qcylab/quaternion.hpp"
#include "qcylab/rational.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace qcylab {

/// Rank-4 tensor over R^{4n} with exact rational entries, indexed
/// R(a, b, c, d) = R_{abcd}.
class CurvatureTensor {
public:
    CurvatureTensor() = default;
    explicit CurvatureTensor(int n)
        : n_(n), d_(4 * n), a_(static_cast<std::size_t>(d_ * d_ * d_ * d_), Rational(0)) {}

    int n() const { return n_; }
    int dim() const { return d_; }

    Rational& at(int a, int b, int c, int d) {
        return a_[static_cast<std::size_t>(((a * d_ + b) * d_ + c) * d_ + d)];
    }
    const Rational& at(int a, int b, int c, int d) const {
        return a_[static_cast<std::size_t>(((a * d_ + b) * d_ + c) * d_ + d)];
    }

    bool is_zero() const;

    CurvatureTensor& operator+=(const CurvatureTensor& o);
    CurvatureTensor& operator*=(const Rational& s);
    friend CurvatureTensor operator+(CurvatureTensor a, const CurvatureTensor& b) {
        return a += b;
    }
    friend CurvatureTensor operator*(CurvatureTensor a, const Rational& s) { return a *= s; }
    bool operator==(const CurvatureTensor& o) const { return n_ == o.n_ && a_ == o.a_; }

private:
    int n_ = 0, d_ = 0;
    std::vector<Rational> a_;
};

/// tau: symmetric traceless (-1)-eigentensor, mu: symmetric traceless
/// 3-eigentensor, S: the scalar curvature.
struct TorsionState {
    RatMat tau;
    RatMat mu;
    Rational S;
};

struct RicciContractions {
    RatMat ric;
    Rational scalar;
    std::array<RatMat, 3> rho, zeta, sigma;
};

/// Skew-symmetric integer matrices commuting with all three almost complex
/// structures; the building blocks of the admissible curvature space.
std::vector<RatMat> commutant_skew_basis(const QuaternionStructure& Q);

/// Exact rational basis of the space of curvature tensors at the normalized
/// point: all pair symmetries, first Bianchi, commutation with I_i in the
/// second pair, and every Ricci-type trace zero.  Throws EmptySpace if the
/// computed null space is zero-dimensional.
std::vector<CurvatureTensor> admissible_basis(const QuaternionStructure& Q);

/// Linear combination of basis elements.
CurvatureTensor combine(const std::vector<CurvatureTensor>& basis,
                        const std::vector<Rational>& coeffs);

/// Random small-integer combination, reproducible from the seed.
CurvatureTensor sample_admissible(const std::vector<CurvatureTensor>& basis, std::uint64_t seed);

RicciContractions ricci_contractions(const QuaternionStructure& Q, const CurvatureTensor& R);

/// L = tau/2 + mu + S g / (32 n (n+2)).
RatMat tensor_L(const QuaternionStructure& Q, const TorsionState& ts);

/// The qc conformal curvature built from the horizontal curvature and L.
CurvatureTensor wqc(const QuaternionStructure& Q, const CurvatureTensor& R, const RatMat& L);

/// ||W^qc||^2 at the normalized point, where W^qc = R: sum of squared entries.
Rational wqc_norm_sq(const CurvatureTensor& R);

/// Conformal change of the torsion state for a conformal factor e^{2u}.
/// u_first is (X_alpha u), u_second is (X_beta X_alpha u) indexed (alpha,
/// beta); only their symmetric part enters the tensor transforms.  The scalar
/// is returned as S~ e^{2u}, which stays rational for rational inputs.
struct ConformalChange {
    RatMat tau_t;
    RatMat mu_t;
    Rational S_t_times_e2u;
};
ConformalChange conformal_change(const QuaternionStructure& Q, const TorsionState& ts,
                                 const RatVec& u_first, const RatMat& u_second);

/// CSV dump/load with rows "a,b,c,d,value" (1-based indices, exact fractions).
void dump_csv(const CurvatureTensor& R, std::ostream& os);
CurvatureTensor load_csv(int n, std::istream& is);

} // namespace qcylab
