#include "qcylab/heisenberg.hpp"

#include "qcylab/exact_integration.hpp"

#include <cmath>

namespace qcylab {

double norm_p_sq(const HeisenbergPoint& p) { return p.x.squaredNorm(); }
double norm_w_sq(const HeisenbergPoint& p) { return p.t.squaredNorm(); }

double rho(const HeisenbergPoint& p) {
    double p2 = norm_p_sq(p);
    return std::pow(p2 * p2 + norm_w_sq(p), 0.25);
}

Rational rho4(const HeisenbergPointQ& p) {
    Rational p2(0);
    for (int a = 0; a < p.x.rows(); ++a) p2 += p.x(a) * p.x(a);
    Rational w2(0);
    for (const Rational& t : p.t) w2 += t * t;
    return p2 * p2 + w2;
}

HeisenbergPoint dilate(double s, const HeisenbergPoint& p) {
    return {p.x * s, p.t * (s * s)};
}

HeisenbergPointQ dilate(const Rational& s, const HeisenbergPointQ& p) {
    HeisenbergPointQ q;
    q.x = p.x * s;
    for (std::size_t i = 0; i < 3; ++i) q.t[i] = p.t[i] * s * s;
    return q;
}

FrameCoefficients frame_fields(const QuaternionStructure& Q, const HeisenbergPoint& p) {
    int d = Q.dim();
    FrameCoefficients fc;
    fc.horizontal.resize(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(d + 3);
        v(a) = 1.0;
        for (int i = 0; i < 3; ++i) {
            double c = 0;
            for (int b = 0; b < d; ++b) c += Q.ii(i, b, a) * p.x(b);
            v(d + i) = 2.0 * c;
        }
        fc.horizontal[static_cast<std::size_t>(a)] = v;
    }
    for (int i = 0; i < 3; ++i) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(d + 3);
        v(d + i) = 2.0;
        fc.vertical[static_cast<std::size_t>(i)] = v;
    }
    return fc;
}

double contact_form_eval(const QuaternionStructure& Q, int i, const HeisenbergPoint& p,
                         const Eigen::VectorXd& tangent) {
    int d = Q.dim();
    double v = 0.5 * tangent(d + i);
    for (int b = 0; b < d; ++b) {
        auto [a, s] = Q.column_support(i, b);  // I_i(a, b) = s
        v -= s * p.x(a) * tangent(b);
    }
    return v;
}

double ExtremalProfile::quadratic(const HeisenbergPoint& p) const {
    double q = eps * eps + norm_p_sq(p);
    return q * q + norm_w_sq(p);
}

double ExtremalProfile::operator()(const HeisenbergPoint& p) const {
    return std::pow(eps, 2 * (n + 1)) * std::pow(quadratic(p), -(n + 1));
}

ProfileGradient grad_F_eps(const QuaternionStructure& Q, const ExtremalProfile& f,
                           const HeisenbergPoint& p) {
    int d = Q.dim();
    double G = f.quadratic(p);
    double common = -4.0 * (f.n + 1) * std::pow(f.eps, 2 * (f.n + 1)) * std::pow(G, -(f.n + 2));
    double q = f.eps * f.eps + norm_p_sq(p);
    ProfileGradient g;
    g.horizontal = Eigen::VectorXd::Zero(d);
    for (int a = 0; a < d; ++a) {
        double gamma = q * p.x(a);
        for (int i = 0; i < 3; ++i) {
            auto [b, s] = Q.column_support(i, a);  // I_i(b, a) = s -> I^i_{beta alpha} x^beta = s x_b
            gamma += s * p.x(b) * p.t(i);
        }
        g.horizontal(a) = common * gamma;
    }
    for (int i = 0; i < 3; ++i) g.vertical(i) = common * p.t(i);
    return g;
}

double grad_F_eps_norm_sq(const ExtremalProfile& f, const HeisenbergPoint& p) {
    double G = f.quadratic(p);
    return 16.0 * (f.n + 1) * (f.n + 1) * std::pow(f.eps, 4 * (f.n + 1)) *
           std::pow(G, -(2 * f.n + 3)) * norm_p_sq(p);
}

double reduced_integral(int n, const std::function<double(double, double)>& g, double scale,
                        const QuadratureConfig& cfg) {
    // (2n)!/8 * area(S^{4n-1}) * 4 pi, with area = 2 pi^{2n} / (2n-1)!
    double prefactor = (2.0 * n / 8.0) * 2.0 * std::pow(M_PI, 2 * n) * 4.0 * M_PI;

    double rmax = 500.0 * std::max(1.0, scale);
    QuadratureConfig inner_cfg = cfg;
    inner_cfg.abs_tol = std::min(cfg.abs_tol, 1e-13);
    inner_cfg.rel_tol = std::min(cfg.rel_tol, 1e-12);
    auto outer = [&](double r) {
        double smax = 4000.0 * (scale * scale + r * r + 1.0);
        auto h = [&](double s) { return g(r, s) * s * s; };
        return integrate(h, 0.0, smax, inner_cfg) * std::pow(r, 4 * n - 1);
    };
    return prefactor * integrate(outer, 0.0, rmax, cfg);
}

double integral_F_2star(int n, double eps, const QuadratureConfig& cfg) {
    double pw = std::pow(eps, 4 * n + 6);
    auto g = [&](double r, double s) {
        double q = eps * eps + r * r;
        return pw * std::pow(q * q + s * s, -(2 * n + 3));
    };
    return reduced_integral(n, g, std::max(1.0, eps), cfg);
}

double yamabe_numerator(int n, double eps, const QuadratureConfig& cfg) {
    double pw = std::pow(eps, 4 * n + 4);
    auto g = [&](double r, double s) {
        double q = eps * eps + r * r;
        return pw * std::pow(q * q + s * s, -(2 * n + 3)) * r * r;
    };
    return 64.0 * (n + 1) * (n + 2) * reduced_integral(n, g, std::max(1.0, eps), cfg);
}

double yamabe_functional(int n, double eps, const QuadratureConfig& cfg) {
    double num = yamabe_numerator(n, eps, cfg);
    double den = integral_F_2star(n, eps, cfg);
    return num / std::pow(den, (2.0 * n + 2) / (2.0 * n + 3));
}

ExtremalLogDerivatives extremal_log_derivatives(const QuaternionStructure& Q,
                                                const HeisenbergPointQ& p) {
    int d = Q.dim();
    Rational p2(0);
    for (int a = 0; a < d; ++a) p2 += p.x(a) * p.x(a);
    Rational w2(0);
    for (const Rational& t : p.t) w2 += t * t;
    Rational q = Rational(1) + p2;
    Rational G = q * q + w2;

    // gamma_a = (1+|p|^2) x_a + sum_i (I_i^T x)_a t^i, with v_i = I_i^T x
    std::array<RatVec, 3> v;
    for (std::size_t i = 0; i < 3; ++i) {
        v[i] = RatVec::Constant(d, Rational(0));
        for (int a = 0; a < d; ++a) {
            auto [b, s] = Q.column_support(static_cast<int>(i), a);  // I_i(b, a) = s
            v[i](a) = Rational(s) * p.x(b);
        }
    }
    RatVec gamma = p.x * q;
    for (std::size_t i = 0; i < 3; ++i) gamma += v[i] * p.t[i];

    // X_b gamma_a = (1+|p|^2) delta_ab + 2 x_a x_b + I^i_{ba} t^i + 2 sum_i v_i_a v_i_b
    RatMat Xg = RatMat::Constant(d, d, Rational(0));
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
            Rational s = p.x(a) * p.x(b) * 2;
            if (a == b) s += q;
            for (std::size_t i = 0; i < 3; ++i) {
                s += Rational(Q.ii(static_cast<int>(i), b, a)) * p.t[i];
                s += Rational(2) * v[i](a) * v[i](b);
            }
            Xg(a, b) = s;
        }

    ExtremalLogDerivatives out;
    out.G = G;
    out.first = gamma * (Rational(-2) / G);
    out.second = RatMat(d, d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            out.second(a, b) =
                Xg(a, b) * (Rational(-2) / G) + gamma(a) * gamma(b) * (Rational(8) / (G * G));
    return out;
}

} // namespace qcylab
