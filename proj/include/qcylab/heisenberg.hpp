#pragma once

#include "qcylab/curvature.hpp"
#include "qcylab/quadrature.hpp"
#include "qcylab/quaternion.hpp"

#include <array>
#include <cstdint>

namespace qcylab {

/// A point of the flat model in real coordinates (x^1..x^{4n}, t^1..t^3).
struct HeisenbergPoint {
    Eigen::VectorXd x;
    Eigen::Vector3d t;
};

/// Exact-rational twin of HeisenbergPoint for zero-tolerance identities.
struct HeisenbergPointQ {
    RatVec x;
    std::array<Rational, 3> t;
};

double norm_p_sq(const HeisenbergPoint& p);
double norm_w_sq(const HeisenbergPoint& p);

/// The gauge rho = (|p|^4 + |w|^2)^{1/4} and its exact fourth power.
double rho(const HeisenbergPoint& p);
Rational rho4(const HeisenbergPointQ& p);

HeisenbergPoint dilate(double s, const HeisenbergPoint& p);
HeisenbergPointQ dilate(const Rational& s, const HeisenbergPointQ& p);

/// Coefficient arrays of the left-invariant frame at a point: X_alpha has a
/// unit in its own x-slot plus 2 I^i_{beta alpha} x^beta in the t^i slots;
/// T_i = 2 d/dt^i.
struct FrameCoefficients {
    // horizontal[alpha] = (4n+3)-vector of coefficients in (d/dx, d/dt)
    std::vector<Eigen::VectorXd> horizontal;
    std::array<Eigen::VectorXd, 3> vertical;
};
FrameCoefficients frame_fields(const QuaternionStructure& Q, const HeisenbergPoint& p);

/// Contact form Theta^i = (1/2) dt^i - I^i_{ab} x^a dx^b evaluated on a
/// tangent vector given by its (4n+3) coefficients.
double contact_form_eval(const QuaternionStructure& Q, int i, const HeisenbergPoint& p,
                         const Eigen::VectorXd& tangent);

/// The extremal profile F^eps = eps^{2(n+1)} [(eps^2+|p|^2)^2 + |w|^2]^{-(n+1)}.
struct ExtremalProfile {
    int n = 1;
    double eps = 1.0;

    double quadratic(const HeisenbergPoint& p) const;  // (eps^2+|p|^2)^2 + |w|^2
    double operator()(const HeisenbergPoint& p) const;
};

/// Closed-form horizontal and vertical derivatives of F^eps:
/// X_alpha F^eps and T_i F^eps.
struct ProfileGradient {
    Eigen::VectorXd horizontal;
    Eigen::Vector3d vertical;
};
ProfileGradient grad_F_eps(const QuaternionStructure& Q, const ExtremalProfile& f,
                           const HeisenbergPoint& p);

/// |grad F^eps|^2 in closed form (horizontal part only).
double grad_F_eps_norm_sq(const ExtremalProfile& f, const HeisenbergPoint& p);

/// Reduced 2-D integrals over the flat model of radially reducible
/// integrands g(|p|, |w|), with the volume normalization
/// Vol = (2n)!/8 dt dx:  value = (2n)!/8 * area(S^{4n-1}) * 4 pi *
///        int_0^inf int_0^inf g(r, s) r^{4n-1} s^2 ds dr.
double reduced_integral(int n, const std::function<double(double, double)>& g, double scale,
                        const QuadratureConfig& cfg = {});

/// int F^{2*} Vol and the Yamabe numerator 4 (n+2)/(n+1) int |grad F|^2 Vol.
double integral_F_2star(int n, double eps, const QuadratureConfig& cfg = {});
double yamabe_numerator(int n, double eps, const QuadratureConfig& cfg = {});

/// The Yamabe quotient of the extremal profile (S = 0 on the flat model).
double yamabe_functional(int n, double eps, const QuadratureConfig& cfg = {});

/// Derivative arrays of u = -(1/2) log[(1+|p|^2)^2 + |w|^2], the conformal
/// factor of the extremal, at an exact rational point: u_alpha = X_alpha u
/// and u_{alpha beta} = X_beta X_alpha u.
struct ExtremalLogDerivatives {
    RatVec first;
    RatMat second;
    Rational G;  // (1+|p|^2)^2 + |w|^2 = e^{-2u}
};
ExtremalLogDerivatives extremal_log_derivatives(const QuaternionStructure& Q,
                                                const HeisenbergPointQ& p);

} // namespace qcylab
