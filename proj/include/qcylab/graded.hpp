#pragma once

#include "qcylab/curvature.hpp"
#include "qcylab/heisenberg.hpp"
#include "qcylab/quaternion.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <vector>

namespace qcylab {

/// Sparse polynomial in (x^1..x^{4n}, t^1..t^3) with exact rational
/// coefficients, graded by the parabolic weight (x -> 1, t -> 2).  Monomial
/// keys pack one 5-bit exponent per variable.
class GradedPoly {
public:
    GradedPoly() = default;
    explicit GradedPoly(int nx) : nx_(nx) {}
    static GradedPoly constant(int nx, const Rational& c);
    static GradedPoly variable(int nx, int var);  // var < nx: x, nx+i: t^i

    int nx() const { return nx_; }
    int nvars() const { return nx_ + 3; }
    bool is_zero() const { return terms_.empty(); }
    const std::map<std::uint64_t, Rational>& terms() const { return terms_; }

    void add_term(std::uint64_t key, const Rational& c);

    GradedPoly& operator+=(const GradedPoly& o);
    GradedPoly& operator-=(const GradedPoly& o);
    friend GradedPoly operator+(GradedPoly a, const GradedPoly& b) { return a += b; }
    friend GradedPoly operator-(GradedPoly a, const GradedPoly& b) { return a -= b; }
    GradedPoly operator*(const GradedPoly& o) const;
    GradedPoly operator*(const Rational& s) const;
    bool operator==(const GradedPoly& o) const { return nx_ == o.nx_ && terms_ == o.terms_; }

    GradedPoly derivative(int var) const;
    GradedPoly homogeneous_part(int w) const;
    int max_weight() const;

    /// Drops every monomial in which some t^i carries an odd exponent.
    GradedPoly t_even_filter() const;

    Rational eval(const RatVec& x, const std::array<Rational, 3>& t) const;

    static int exponent(std::uint64_t key, int var) { return int((key >> (5 * var)) & 31u); }
    int monomial_weight(std::uint64_t key) const;

private:
    int nx_ = 0;
    std::map<std::uint64_t, Rational> terms_;
};

/// Exterior-algebra element over {dx^alpha, dt^i} with GradedPoly
/// coefficients; component keys are bitmasks over nx+3 differential slots.
/// The parabolic weight of a term is the monomial weight of the coefficient
/// plus 1 per dx factor and 2 per dt factor.
class GradedForm {
public:
    GradedForm() = default;
    explicit GradedForm(int nx) : nx_(nx) {}
    static GradedForm from_poly(const GradedPoly& p);
    static GradedForm dx(int nx, int alpha);
    static GradedForm dt(int nx, int i);

    int nx() const { return nx_; }
    bool is_zero() const;
    const std::map<std::uint16_t, GradedPoly>& comps() const { return comps_; }

    void add_component(std::uint16_t mask, const GradedPoly& p);

    GradedForm& operator+=(const GradedForm& o);
    GradedForm& operator-=(const GradedForm& o);
    friend GradedForm operator+(GradedForm a, const GradedForm& b) { return a += b; }
    friend GradedForm operator-(GradedForm a, const GradedForm& b) { return a -= b; }
    GradedForm operator*(const Rational& s) const;
    GradedForm wedge(const GradedForm& o) const;
    bool operator==(const GradedForm& o) const;

    GradedForm d() const;
    GradedForm homogeneous_part(int w) const;
    int mask_weight(std::uint16_t mask) const;

    /// Interior product with a vector field given by per-variable GradedPoly
    /// coefficients.
    GradedForm interior(const std::vector<GradedPoly>& field) const;

    /// Lie derivative along the dilation generator P = x d/dx + 2 t d/dt,
    /// computed by the Cartan formula.
    GradedForm lie_P() const;

private:
    int nx_ = 0;
    std::map<std::uint16_t, GradedPoly> comps_;
};

/// Coefficient fields of the left-invariant frame as GradedPolys: X_alpha
/// and T_i expressed in the coordinate basis (d/dx, d/dt).
std::vector<GradedPoly> frame_field_polys(const QuaternionStructure& Q, int a);

/// Homogeneous parts of the special coframe and connection in normalized
/// coordinates, computed by the recursion with only R(q) retained (torsion,
/// curvature derivatives and vertical-index curvature components are zero).
struct CoframeParts {
    int nx = 0, wmax = 0;
    std::array<std::vector<GradedForm>, 3> eta;        // eta[i][m], m <= wmax
    std::vector<std::vector<GradedForm>> theta;        // theta[alpha][m]
    std::vector<std::vector<std::vector<GradedForm>>> omega;  // omega[a][b][m], horizontal a,b
};
CoframeParts recurse_coframe(const QuaternionStructure& Q, const CurvatureTensor& R, int wmax = 6);

/// Homogeneous parts of the frame coefficients s_a^b restricted to
/// horizontal a, from the coframe recursion.
struct FrameParts {
    int wmax = 0;
    // s_h[alpha][beta][m] and s_v[alpha][i][m] with vertical target t^i
    std::vector<std::vector<std::vector<GradedPoly>>> s_h;
    std::vector<std::vector<std::vector<GradedPoly>>> s_v;
};
FrameParts frame_coefficients(const QuaternionStructure& Q, const CoframeParts& cf, int wmax = 5);

/// Closed forms of the low coframe and frame-coefficient parts.
GradedForm eta4_closed(const QuaternionStructure& Q, const CurvatureTensor& R, int i);
GradedForm eta6_closed(const QuaternionStructure& Q, const CurvatureTensor& R, int i);
GradedForm theta3_closed(const QuaternionStructure& Q, const CurvatureTensor& R, int alpha);
GradedPoly s2_closed(const QuaternionStructure& Q, const CurvatureTensor& R, int alpha, int beta);
GradedPoly s3v_closed(const QuaternionStructure& Q, const CurvatureTensor& R, int alpha, int i);
GradedPoly s4_closed(const QuaternionStructure& Q, const CurvatureTensor& R, int alpha, int beta);
GradedPoly s5v_closed(const QuaternionStructure& Q, const CurvatureTensor& R, int alpha, int i);

/// Both wedge trace identities evaluated by full exterior algebra for an
/// antisymmetric coefficient matrix omega; returns (linear holds, quadratic
/// holds).
std::pair<bool, bool> wedge_lemma_check(const QuaternionStructure& Q, const RatMat& omega);

/// Homogeneous parts of eta^1 ^ eta^2 ^ eta^3 ^ (d eta^1)^{2n} of orders
/// 4n+6 .. 4n+10; parts[k] holds order 4n+6+k.
std::array<GradedForm, 5> volume_expansion(const QuaternionStructure& Q,
                                           const CurvatureTensor& R);

/// chi as the reference closed-form polynomial in x, and re-assembled from
/// the volume expansion (order-(4n+10) top coefficient over the flat top
/// coefficient).  The two disagree: the reference closed form corresponds to
/// the quadratic trace lemma evaluated on the raw, non-antisymmetrized
/// coefficient array of (d eta^1)_(4); the assembled value is the correct
/// one (see chi_from_trace_lemmas for the fixed closed form).
GradedPoly chi_closed(const QuaternionStructure& Q, const CurvatureTensor& R);
std::pair<GradedPoly, GradedPoly> chi_two_ways(const QuaternionStructure& Q,
                                               const CurvatureTensor& R);

/// chi recomputed through the two trace lemmas with properly antisymmetrized
/// 2-form coefficients; agrees with the assembled volume expansion exactly.
GradedPoly chi_from_trace_lemmas(const QuaternionStructure& Q, const CurvatureTensor& R);

/// The quadratic trace-lemma form applied to an arbitrary coefficient array:
/// (I^1_{ab} I^1_{gd} + 2 I^1_{ad} I^1_{bg}) w_{ab} w_{gd}.
GradedPoly quadratic_trace_form(const QuaternionStructure& Q,
                                const std::vector<std::vector<GradedPoly>>& w);

/// Pointwise comparison of the dilated gradient-squared volume density
/// assembled from the frame-coefficient recursion against the closed form,
/// order by order in epsilon after dropping t-odd monomials.
struct GradientExpansionCheck {
    Rational worst_e0;   // max |lhs - rhs| at the sample points, eps^0
    Rational worst_e4;   // eps^4 deviation against the reference closed chi
    Rational worst_e4_assembled;  // eps^4 deviation with the assembled chi
    bool e4_assembled_identity = false;  // polynomial identity with assembled chi
    bool e1_zero = false;                // eps^1 part vanishes identically
    bool e3_zero = false;                // eps^3 part vanishes identically
    Rational eps2_pointwise_max;    // worst |eps^2 part| at the sample points
    bool eps2_sphere_zero = false;  // exact sphere integral of every t-slice
};
GradientExpansionCheck gradient_expansion_check(const QuaternionStructure& Q,
                                                const CurvatureTensor& R,
                                                const std::vector<HeisenbergPointQ>& points);

} // namespace qcylab
