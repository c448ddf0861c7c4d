#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qcylab/expansion.hpp"
#include "qcylab/heisenberg.hpp"

#include <cmath>
#include <random>

using namespace qcylab;

namespace {

HeisenbergPoint random_point(int n, std::mt19937_64& rng, double spread = 2.0) {
    std::uniform_real_distribution<double> u(-spread, spread);
    HeisenbergPoint p;
    p.x = Eigen::VectorXd::Zero(4 * n);
    for (int a = 0; a < 4 * n; ++a) p.x(a) = u(rng);
    for (int i = 0; i < 3; ++i) p.t(i) = u(rng);
    return p;
}

HeisenbergPointQ random_point_q(int n, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> num(-8, 8);
    std::uniform_int_distribution<int> den(1, 5);
    HeisenbergPointQ p;
    p.x = RatVec::Constant(4 * n, Rational(0));
    for (int a = 0; a < 4 * n; ++a) p.x(a) = rat(num(rng), den(rng));
    for (auto& t : p.t) t = rat(num(rng), den(rng));
    return p;
}

double u_of(const QuaternionStructure& Q, const HeisenbergPoint& p) {
    (void)Q;
    double q = 1.0 + norm_p_sq(p);
    return -0.5 * std::log(q * q + norm_w_sq(p));
}

// directional derivative along X_a via central differences
double x_derivative_fd(const QuaternionStructure& Q, int a,
                       const std::function<double(const HeisenbergPoint&)>& f,
                       const HeisenbergPoint& p, double h) {
    HeisenbergPoint hi = p, lo = p;
    hi.x(a) += h;
    lo.x(a) -= h;
    for (int i = 0; i < 3; ++i) {
        double c = 0;
        for (int b = 0; b < Q.dim(); ++b) c += Q.ii(i, b, a) * p.x(b);
        hi.t(i) += 2.0 * c * h;
        lo.t(i) -= 2.0 * c * h;
    }
    return (f(hi) - f(lo)) / (2 * h);
}

} // namespace

TEST_CASE("gauge: rho^4 = |p|^4 + |w|^2 and exact dilation homogeneity") {
    QuaternionStructure Q = build_structure(1);
    std::mt19937_64 rng(1);
    for (int it = 0; it < 30; ++it) {
        HeisenbergPointQ p = random_point_q(1, rng);
        Rational r4 = rho4(p);
        Rational p2(0), w2(0);
        for (int a = 0; a < 4; ++a) p2 += p.x(a) * p.x(a);
        for (auto& t : p.t) w2 += t * t;
        CHECK(r4 == p2 * p2 + w2);

        Rational s = rat(3, 2);
        CHECK(rho4(dilate(s, p)) == s * s * s * s * r4);
    }
    // identity dilation fixes points
    std::mt19937_64 rng2(2);
    HeisenbergPoint p = random_point(1, rng2);
    HeisenbergPoint q = dilate(1.0, p);
    CHECK(p.x == q.x);
    CHECK(p.t == q.t);
}

TEST_CASE("contact forms annihilate the horizontal frame and pair with the Reeb fields") {
    for (int n : {1, 2}) {
        QuaternionStructure Q = build_structure(n);
        std::mt19937_64 rng(static_cast<std::uint64_t>(n));
        for (int it = 0; it < 50; ++it) {
            HeisenbergPoint p = random_point(n, rng);
            FrameCoefficients fc = frame_fields(Q, p);
            for (int i = 0; i < 3; ++i) {
                for (int a = 0; a < Q.dim(); ++a)
                    CHECK(std::abs(contact_form_eval(
                              Q, i, p, fc.horizontal[static_cast<std::size_t>(a)])) < 1e-12);
                for (int j = 0; j < 3; ++j)
                    CHECK(contact_form_eval(Q, i, p, fc.vertical[static_cast<std::size_t>(j)]) ==
                          doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-14));
            }
        }
    }
}

TEST_CASE("frame at the origin reduces to coordinate fields") {
    QuaternionStructure Q = build_structure(1);
    HeisenbergPoint o{Eigen::VectorXd::Zero(4), Eigen::Vector3d::Zero()};
    FrameCoefficients fc = frame_fields(Q, o);
    for (int a = 0; a < 4; ++a)
        for (int k = 0; k < 7; ++k)
            CHECK(fc.horizontal[static_cast<std::size_t>(a)](k) == (k == a ? 1.0 : 0.0));
}

TEST_CASE("profile scaling F^eps = eps^{-2(n+1)} F(dilate(1/eps, .))") {
    std::mt19937_64 rng(3);
    for (int n : {1, 2}) {
        ExtremalProfile F1{n, 1.0};
        for (double eps : {0.5, 2.0}) {
            ExtremalProfile Fe{n, eps};
            for (int it = 0; it < 20; ++it) {
                HeisenbergPoint p = random_point(n, rng);
                double lhs = Fe(p);
                double rhs = std::pow(eps, -2.0 * (n + 1)) * F1(dilate(1.0 / eps, p));
                CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));
            }
        }
    }
}

TEST_CASE("closed-form gradient: zero at the origin, FD oracle, norm identity") {
    QuaternionStructure Q = build_structure(1);
    ExtremalProfile F{1, 1.0};
    HeisenbergPoint o{Eigen::VectorXd::Zero(4), Eigen::Vector3d::Zero()};
    ProfileGradient g0 = grad_F_eps(Q, F, o);
    for (int a = 0; a < 4; ++a) CHECK(g0.horizontal(a) == 0.0);

    std::mt19937_64 rng(4);
    for (double eps : {1.0, 0.5}) {
        ExtremalProfile Fe{1, eps};
        auto f = [&](const HeisenbergPoint& q) { return Fe(q); };
        for (int it = 0; it < 25; ++it) {
            HeisenbergPoint p = random_point(1, rng);
            ProfileGradient g = grad_F_eps(Q, Fe, p);
            for (int a = 0; a < 4; ++a) {
                double fd = x_derivative_fd(Q, a, f, p, 1e-5);
                CHECK(std::abs(g.horizontal(a) - fd) <=
                      1e-7 * std::max(1e-6, std::abs(g.horizontal(a))));
            }
            // vertical: T_i = 2 d/dt^i
            for (int i = 0; i < 3; ++i) {
                HeisenbergPoint hi = p, lo = p;
                hi.t(i) += 1e-5;
                lo.t(i) -= 1e-5;
                double fd = 2.0 * (Fe(hi) - Fe(lo)) / 2e-5;
                CHECK(std::abs(g.vertical(i) - fd) <=
                      1e-7 * std::max(1e-6, std::abs(g.vertical(i))));
            }
            // |grad F|^2 closed form vs the summed squares
            double direct = g.horizontal.squaredNorm();
            CHECK(grad_F_eps_norm_sq(Fe, p) == doctest::Approx(direct).epsilon(1e-11));
        }
    }
}

TEST_CASE("decay bound: F (1+rho)^{4(n+1)} is bounded over 10^6 random points") {
    ExtremalProfile F{1, 1.0};
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(-40.0, 40.0);
    double worst = 0;
    HeisenbergPoint p{Eigen::VectorXd::Zero(4), Eigen::Vector3d::Zero()};
    for (long it = 0; it < 1000000; ++it) {
        for (int a = 0; a < 4; ++a) p.x(a) = u(rng);
        for (int i = 0; i < 3; ++i) p.t(i) = u(rng) * 40.0;
        worst = std::max(worst, F(p) * std::pow(1.0 + rho(p), 4.0 * (F.n + 1)));
    }
    CHECK(worst <= std::pow(16.0, F.n + 1));
}

TEST_CASE("quadrature reproduces the exact S1 and S~1 at n=1 to 1e-8 relative") {
    double s1 = yamabe_numerator(1, 1.0);
    double s1_exact = std::pow(M_PI, 4) / 8.0;
    CHECK(std::abs(s1 - s1_exact) <= 1e-8 * s1_exact);

    double ts1 = integral_F_2star(1, 1.0);
    double ts1_exact = std::pow(M_PI, 4) / 1536.0;
    CHECK(std::abs(ts1 - ts1_exact) <= 1e-8 * ts1_exact);
}

TEST_CASE("Yamabe functional of the extremal equals Lambda(1) to 1e-6 relative") {
    double lam = derive_constants(1).lambda.to_float();
    double y = yamabe_functional(1, 1.0);
    CHECK(std::abs(y - lam) <= 1e-6 * lam);
}

TEST_CASE("dilation invariance of the Yamabe functional over eps in {1/4..4}") {
    double y1 = yamabe_functional(1, 1.0);
    for (double eps : {0.25, 0.5, 2.0, 4.0}) {
        CAPTURE(eps);
        double y = yamabe_functional(1, eps);
        CHECK(std::abs(y - y1) <= 1e-6 * std::abs(y1));
    }
}

TEST_CASE("polar factorization: 7-dim Monte Carlo vs reduced quadrature, 3 sigma") {
    // Two compactly supported radial profiles; the ratio of their integrals is
    // measured by plain box Monte Carlo in full dimension and by the reduced
    // (r, s) quadrature with the rho^{4n+5} weight implied by Vol_Theta.
    auto phi1 = [](double rho4v) { return std::max(0.0, 1.0 - rho4v / 4.0); };
    auto phi2 = [](double rho4v) { double v = std::max(0.0, 1.0 - rho4v / 4.0); return v * v; };

    double xb = std::sqrt(std::sqrt(4.0)), tb = 2.0;  // support: rho^4 <= 4
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> ux(-xb, xb), ut(-tb, tb);
    long N = 400000;
    double s1 = 0, s2 = 0, q1 = 0, q2 = 0;
    for (long it = 0; it < N; ++it) {
        double p2 = 0;
        double xs[4];
        for (double& x : xs) {
            x = ux(rng);
            p2 += x * x;
        }
        double w2 = 0;
        for (int i = 0; i < 3; ++i) {
            double t = ut(rng);
            w2 += t * t;
        }
        double r4 = p2 * p2 + w2;
        double v1 = phi1(r4), v2 = phi2(r4);
        s1 += v1;
        s2 += v2;
        q1 += v1 * v1;
        q2 += v2 * v2;
    }
    double m1 = s1 / N, m2 = s2 / N;
    double sd1 = std::sqrt((q1 / N - m1 * m1) / N), sd2 = std::sqrt((q2 / N - m2 * m2) / N);
    double mc_ratio = m1 / m2;
    double mc_err = mc_ratio * std::sqrt(std::pow(sd1 / m1, 2) + std::pow(sd2 / m2, 2));

    auto g1 = [&](double r, double s) { return phi1(r * r * r * r + s * s); };
    auto g2 = [&](double r, double s) { return phi2(r * r * r * r + s * s); };
    double quad_ratio = reduced_integral(1, g1, 1.0, {1e-9, 1e-8}) /
                        reduced_integral(1, g2, 1.0, {1e-9, 1e-8});
    CHECK(std::abs(mc_ratio - quad_ratio) <= 3.0 * mc_err);
}

TEST_CASE("extremal log-derivative arrays match finite differences") {
    QuaternionStructure Q = build_structure(1);
    std::mt19937_64 rng(8);
    auto uf = [&](const HeisenbergPoint& p) { return u_of(Q, p); };
    for (int it = 0; it < 10; ++it) {
        HeisenbergPointQ pq = random_point_q(1, rng);
        HeisenbergPoint p{Eigen::VectorXd::Zero(4), Eigen::Vector3d::Zero()};
        for (int a = 0; a < 4; ++a) p.x(a) = to_double(pq.x(a));
        for (int i = 0; i < 3; ++i) p.t(i) = to_double(pq.t[static_cast<std::size_t>(i)]);

        ExtremalLogDerivatives du = extremal_log_derivatives(Q, pq);
        for (int a = 0; a < 4; ++a) {
            double fd = x_derivative_fd(Q, a, uf, p, 1e-6);
            CHECK(std::abs(to_double(du.first(a)) - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
            for (int b = 0; b < 4; ++b) {
                auto ua = [&](const HeisenbergPoint& q) {
                    HeisenbergPointQ qq;
                    qq.x = RatVec::Constant(4, Rational(0));
                    // second derivative via FD of the exact first derivative
                    for (int c = 0; c < 4; ++c) qq.x(c) = Rational(q.x(c));
                    for (int i = 0; i < 3; ++i) qq.t[static_cast<std::size_t>(i)] = Rational(q.t(i));
                    return to_double(extremal_log_derivatives(Q, qq).first(a));
                };
                double fd2 = x_derivative_fd(Q, b, ua, p, 1e-6);
                CHECK(std::abs(to_double(du.second(a, b)) - fd2) <=
                      2e-5 * std::max(1.0, std::abs(fd2)));
            }
        }
    }
}

TEST_CASE("extremal conformal factor: S~ is the same positive constant at all points") {
    QuaternionStructure Q = build_structure(1);
    int d = Q.dim();
    TorsionState flat{RatMat::Constant(d, d, Rational(0)), RatMat::Constant(d, d, Rational(0)),
                      Rational(0)};
    std::mt19937_64 rng(9);
    Rational first_value;
    Rational max_tau(0), max_mu(0);
    for (int it = 0; it < 100; ++it) {
        HeisenbergPointQ p = random_point_q(1, rng);
        ExtremalLogDerivatives du = extremal_log_derivatives(Q, p);
        ConformalChange cc = conformal_change(Q, flat, du.first, du.second);
        // e^{2u} = 1/G, so S~ = (S~ e^{2u}) * G
        Rational S_t = cc.S_t_times_e2u * du.G;
        if (it == 0) first_value = S_t;
        CHECK(S_t == first_value);
        CHECK(S_t > 0);
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) {
                Rational ta = cc.tau_t(a, b) < 0 ? Rational(-cc.tau_t(a, b)) : cc.tau_t(a, b);
                Rational mb = cc.mu_t(a, b) < 0 ? Rational(-cc.mu_t(a, b)) : cc.mu_t(a, b);
                if (ta > max_tau) max_tau = ta;
                if (mb > max_mu) max_mu = mb;
            }
    }
    MESSAGE("extremal conformal change: S~ = ", to_string(first_value),
            ", max |tau~| = ", to_string(max_tau), ", max |mu~| = ", to_string(max_mu));
    CHECK(first_value == Rational(64 * 1 * 3));  // 64 n (n+2) at n = 1
}
