#include "qcylab/graded.hpp"

#include "qcylab/errors.hpp"
#include "qcylab/exact_integration.hpp"

#include <bit>

namespace qcylab {

// ---------------------------------------------------------------------------
// GradedPoly

GradedPoly GradedPoly::constant(int nx, const Rational& c) {
    GradedPoly p(nx);
    p.add_term(0, c);
    return p;
}

GradedPoly GradedPoly::variable(int nx, int var) {
    GradedPoly p(nx);
    p.add_term(std::uint64_t(1) << (5 * var), Rational(1));
    return p;
}

void GradedPoly::add_term(std::uint64_t key, const Rational& c_in) {
    Rational c = c_in;
    c.canonicalize();
    if (c == 0) return;
    auto [it, inserted] = terms_.emplace(key, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

GradedPoly& GradedPoly::operator+=(const GradedPoly& o) {
    for (auto& [k, c] : o.terms_) add_term(k, c);
    return *this;
}

GradedPoly& GradedPoly::operator-=(const GradedPoly& o) {
    for (auto& [k, c] : o.terms_) add_term(k, -c);
    return *this;
}

GradedPoly GradedPoly::operator*(const GradedPoly& o) const {
    GradedPoly r(nx_);
    for (auto& [ka, ca] : terms_)
        for (auto& [kb, cb] : o.terms_) r.add_term(ka + kb, ca * cb);
    return r;
}

GradedPoly GradedPoly::operator*(const Rational& s_in) const {
    Rational s = s_in;
    s.canonicalize();
    GradedPoly r(nx_);
    if (s == 0) return r;
    for (auto& [k, c] : terms_) r.terms_.emplace(k, c * s);
    return r;
}

GradedPoly GradedPoly::derivative(int var) const {
    GradedPoly r(nx_);
    for (auto& [k, c] : terms_) {
        int e = exponent(k, var);
        if (e == 0) continue;
        r.add_term(k - (std::uint64_t(1) << (5 * var)), c * e);
    }
    return r;
}

int GradedPoly::monomial_weight(std::uint64_t key) const {
    int w = 0;
    for (int v = 0; v < nx_; ++v) w += exponent(key, v);
    for (int v = nx_; v < nx_ + 3; ++v) w += 2 * exponent(key, v);
    return w;
}

GradedPoly GradedPoly::homogeneous_part(int w) const {
    GradedPoly r(nx_);
    for (auto& [k, c] : terms_)
        if (monomial_weight(k) == w) r.terms_.emplace(k, c);
    return r;
}

int GradedPoly::max_weight() const {
    int w = 0;
    for (auto& [k, c] : terms_) w = std::max(w, monomial_weight(k));
    return w;
}

GradedPoly GradedPoly::t_even_filter() const {
    GradedPoly r(nx_);
    for (auto& [k, c] : terms_) {
        bool even = true;
        for (int v = nx_; v < nx_ + 3; ++v)
            if (exponent(k, v) % 2 == 1) { even = false; break; }
        if (even) r.terms_.emplace(k, c);
    }
    return r;
}

Rational GradedPoly::eval(const RatVec& x, const std::array<Rational, 3>& t) const {
    Rational total(0);
    for (auto& [k, c] : terms_) {
        Rational v = c;
        for (int a = 0; a < nx_; ++a)
            for (int e = exponent(k, a); e > 0; --e) v *= x(a);
        for (int i = 0; i < 3; ++i)
            for (int e = exponent(k, nx_ + i); e > 0; --e) v *= t[static_cast<std::size_t>(i)];
        total += v;
    }
    return total;
}

// ---------------------------------------------------------------------------
// GradedForm

GradedForm GradedForm::from_poly(const GradedPoly& p) {
    GradedForm f(p.nx());
    f.add_component(0, p);
    return f;
}

GradedForm GradedForm::dx(int nx, int alpha) {
    GradedForm f(nx);
    f.add_component(static_cast<std::uint16_t>(1u << alpha), GradedPoly::constant(nx, Rational(1)));
    return f;
}

GradedForm GradedForm::dt(int nx, int i) {
    GradedForm f(nx);
    f.add_component(static_cast<std::uint16_t>(1u << (nx + i)),
                    GradedPoly::constant(nx, Rational(1)));
    return f;
}

bool GradedForm::is_zero() const {
    for (auto& [m, p] : comps_)
        if (!p.is_zero()) return false;
    return true;
}

void GradedForm::add_component(std::uint16_t mask, const GradedPoly& p) {
    if (p.is_zero()) return;
    auto [it, inserted] = comps_.emplace(mask, p);
    if (!inserted) {
        it->second += p;
        if (it->second.is_zero()) comps_.erase(it);
    }
}

GradedForm& GradedForm::operator+=(const GradedForm& o) {
    for (auto& [m, p] : o.comps_) add_component(m, p);
    return *this;
}

GradedForm& GradedForm::operator-=(const GradedForm& o) {
    for (auto& [m, p] : o.comps_) add_component(m, p * Rational(-1));
    return *this;
}

GradedForm GradedForm::operator*(const Rational& s_in) const {
    Rational s = s_in;
    s.canonicalize();
    GradedForm r(nx_);
    if (s == 0) return r;
    for (auto& [m, p] : comps_) r.add_component(m, p * s);
    return r;
}

namespace {

// Sign of merging ordered slot sets A and B: (-1)^{inversions}.
int merge_sign(std::uint16_t a, std::uint16_t b) {
    int inv = 0;
    while (b) {
        int bit = std::countr_zero(b);
        inv += std::popcount(static_cast<unsigned>(a >> (bit + 1)));
        b = static_cast<std::uint16_t>(b & (b - 1));
    }
    return inv % 2 == 0 ? 1 : -1;
}

} // namespace

GradedForm GradedForm::wedge(const GradedForm& o) const {
    GradedForm r(nx_);
    for (auto& [ma, pa] : comps_)
        for (auto& [mb, pb] : o.comps_) {
            if (ma & mb) continue;
            int s = merge_sign(ma, mb);
            GradedPoly prod = pa * pb;
            r.add_component(static_cast<std::uint16_t>(ma | mb),
                            s == 1 ? prod : prod * Rational(-1));
        }
    return r;
}

bool GradedForm::operator==(const GradedForm& o) const {
    return nx_ == o.nx_ && comps_ == o.comps_;
}

GradedForm GradedForm::d() const {
    GradedForm r(nx_);
    for (auto& [m, p] : comps_)
        for (int v = 0; v < nx_ + 3; ++v) {
            if (m & (1u << v)) continue;
            GradedPoly dp = p.derivative(v);
            if (dp.is_zero()) continue;
            // sign of inserting dv in front: count slots below v already in m
            int below = std::popcount(static_cast<unsigned>(m & ((1u << v) - 1)));
            if (below % 2 == 1) dp = dp * Rational(-1);
            r.add_component(static_cast<std::uint16_t>(m | (1u << v)), dp);
        }
    return r;
}

int GradedForm::mask_weight(std::uint16_t mask) const {
    int w = std::popcount(static_cast<unsigned>(mask & ((1u << nx_) - 1)));
    w += 2 * std::popcount(static_cast<unsigned>(mask >> nx_));
    return w;
}

GradedForm GradedForm::homogeneous_part(int w) const {
    GradedForm r(nx_);
    for (auto& [m, p] : comps_) {
        GradedPoly part = p.homogeneous_part(w - mask_weight(m));
        if (!part.is_zero()) r.add_component(m, part);
    }
    return r;
}

GradedForm GradedForm::interior(const std::vector<GradedPoly>& field) const {
    GradedForm r(nx_);
    for (auto& [m, p] : comps_) {
        std::uint16_t rest = m;
        while (rest) {
            int v = std::countr_zero(rest);
            rest = static_cast<std::uint16_t>(rest & (rest - 1));
            const GradedPoly& coeff = field[static_cast<std::size_t>(v)];
            if (coeff.is_zero()) continue;
            int below = std::popcount(static_cast<unsigned>(m & ((1u << v) - 1)));
            GradedPoly contrib = p * coeff;
            if (below % 2 == 1) contrib = contrib * Rational(-1);
            r.add_component(static_cast<std::uint16_t>(m & ~(1u << v)), contrib);
        }
    }
    return r;
}

GradedForm GradedForm::lie_P() const {
    std::vector<GradedPoly> P;
    P.reserve(static_cast<std::size_t>(nx_ + 3));
    for (int v = 0; v < nx_; ++v) P.push_back(GradedPoly::variable(nx_, v));
    for (int i = 0; i < 3; ++i) P.push_back(GradedPoly::variable(nx_, nx_ + i) * Rational(2));
    return d().interior(P) + interior(P).d();
}

std::vector<GradedPoly> frame_field_polys(const QuaternionStructure& Q, int a) {
    int nx = Q.dim();
    std::vector<GradedPoly> field(static_cast<std::size_t>(nx + 3), GradedPoly(nx));
    if (a < nx) {
        field[static_cast<std::size_t>(a)] = GradedPoly::constant(nx, Rational(1));
        for (int i = 0; i < 3; ++i) {
            // 2 I^i_{beta a} x^beta
            auto [b, s] = Q.column_support(i, a);
            field[static_cast<std::size_t>(nx + i)] =
                GradedPoly::variable(nx, b) * Rational(2 * s);
        }
    } else {
        field[static_cast<std::size_t>(a)] = GradedPoly::constant(nx, Rational(2));
    }
    return field;
}

// ---------------------------------------------------------------------------
// Coframe recursion

namespace {

GradedForm contact_graded_form(const QuaternionStructure& Q, int i) {
    int nx = Q.dim();
    GradedForm th = GradedForm::dt(nx, i) * Rational(1, 2);
    for (int b = 0; b < nx; ++b) {
        auto [a, s] = Q.column_support(i, b);  // I_i(a, b) = s
        th.add_component(static_cast<std::uint16_t>(1u << b),
                         GradedPoly::variable(nx, a) * Rational(-s));
    }
    return th;
}

} // namespace

CoframeParts recurse_coframe(const QuaternionStructure& Q, const CurvatureTensor& R, int wmax) {
    int nx = Q.dim();
    CoframeParts cf;
    cf.nx = nx;
    cf.wmax = wmax;
    auto zero_form = GradedForm(nx);
    cf.theta.assign(static_cast<std::size_t>(nx),
                    std::vector<GradedForm>(static_cast<std::size_t>(wmax + 1), zero_form));
    for (auto& e : cf.eta)
        e.assign(static_cast<std::size_t>(wmax + 1), zero_form);
    cf.omega.assign(
        static_cast<std::size_t>(nx),
        std::vector<std::vector<GradedForm>>(
            static_cast<std::size_t>(nx),
            std::vector<GradedForm>(static_cast<std::size_t>(wmax + 1), zero_form)));

    // base: theta^alpha_(1) = dx^alpha; eta^i_(2) = Theta^i
    for (int a = 0; a < nx; ++a) cf.theta[static_cast<std::size_t>(a)][1] = GradedForm::dx(nx, a);
    for (int i = 0; i < 3; ++i) cf.eta[static_cast<std::size_t>(i)][2] = contact_graded_form(Q, i);

    // ascending weight recursion
    for (int m = 2; m <= wmax; ++m) {
        // omega_{alpha (m)}^beta = (1/m) sum_{g,d} R(g,d,alpha,beta) x^g theta^d_(m-1)
        for (int al = 0; al < nx; ++al)
            for (int be = 0; be < nx; ++be) {
                GradedForm acc(nx);
                for (int g = 0; g < nx; ++g) {
                    GradedPoly xg = GradedPoly::variable(nx, g);
                    for (int dd = 0; dd < nx; ++dd) {
                        const Rational& rv = R.at(g, dd, al, be);
                        if (rv == 0) continue;
                        const GradedForm& th = cf.theta[static_cast<std::size_t>(dd)]
                                                       [static_cast<std::size_t>(m - 1)];
                        if (th.is_zero()) continue;
                        for (auto& [mask, p] : th.comps())
                            acc.add_component(mask, p * xg * rv);
                    }
                }
                cf.omega[static_cast<std::size_t>(al)][static_cast<std::size_t>(be)]
                        [static_cast<std::size_t>(m)] = acc * rat(1, m);
            }
        // theta^alpha_(m) = (1/m) sum_b x^b omega_{b (m-1)}^alpha, for m >= 3
        if (m >= 3) {
            for (int al = 0; al < nx; ++al) {
                GradedForm acc(nx);
                for (int b = 0; b < nx; ++b) {
                    const GradedForm& om = cf.omega[static_cast<std::size_t>(b)]
                                                   [static_cast<std::size_t>(al)]
                                                   [static_cast<std::size_t>(m - 1)];
                    if (om.is_zero()) continue;
                    GradedPoly xb = GradedPoly::variable(nx, b);
                    for (auto& [mask, p] : om.comps()) acc.add_component(mask, p * xb);
                }
                cf.theta[static_cast<std::size_t>(al)][static_cast<std::size_t>(m)] =
                    acc * rat(1, m);
            }
            // eta^i_(m) = -(2/m) sum_{a,b} I^i_{ab} x^a theta^b_(m-1)
            for (int i = 0; i < 3; ++i) {
                GradedForm acc(nx);
                for (int b = 0; b < nx; ++b) {
                    auto [a, s] = Q.column_support(i, b);
                    const GradedForm& th = cf.theta[static_cast<std::size_t>(b)]
                                                   [static_cast<std::size_t>(m - 1)];
                    if (th.is_zero()) continue;
                    GradedPoly xa = GradedPoly::variable(nx, a) * Rational(s);
                    for (auto& [mask, p] : th.comps()) acc.add_component(mask, p * xa);
                }
                cf.eta[static_cast<std::size_t>(i)][static_cast<std::size_t>(m)] =
                    acc * rat(-2, m);
            }
        }
    }
    return cf;
}

// ---------------------------------------------------------------------------
// Frame coefficients

namespace {

GradedPoly eval_on_field(const GradedForm& one_form, const std::vector<GradedPoly>& field) {
    GradedForm contracted = one_form.interior(field);
    GradedPoly out(one_form.nx());
    for (auto& [m, p] : contracted.comps()) {
        if (m == 0) out += p;
    }
    return out;
}

} // namespace

FrameParts frame_coefficients(const QuaternionStructure& Q, const CoframeParts& cf, int wmax) {
    int nx = cf.nx;
    FrameParts fp;
    fp.wmax = wmax;
    GradedPoly zero(nx);
    fp.s_h.assign(static_cast<std::size_t>(nx),
                  std::vector<std::vector<GradedPoly>>(
                      static_cast<std::size_t>(nx),
                      std::vector<GradedPoly>(static_cast<std::size_t>(wmax + 1), zero)));
    fp.s_v.assign(static_cast<std::size_t>(nx),
                  std::vector<std::vector<GradedPoly>>(
                      3, std::vector<GradedPoly>(static_cast<std::size_t>(wmax + 1), zero)));

    // precompute theta^b_(k)(X_c) for all needed pieces
    std::vector<std::vector<GradedPoly>> field_cache;
    field_cache.reserve(static_cast<std::size_t>(nx + 3));
    for (int c = 0; c < nx + 3; ++c) field_cache.push_back(frame_field_polys(Q, c));

    // base cases: s_{alpha(0)}^beta = delta
    for (int a = 0; a < nx; ++a)
        fp.s_h[static_cast<std::size_t>(a)][static_cast<std::size_t>(a)][0] =
            GradedPoly::constant(nx, Rational(1));

    // For horizontal a = alpha:
    //   s_{alpha(w)}^b = - sum_{i>=2} sum_c s_{alpha(w - o(b) + o(c) - i)}^c
    //                      theta^b_{(o(b)+i)}(X_c)
    for (int w = 1; w <= wmax; ++w) {
        for (int al = 0; al < nx; ++al) {
            // horizontal targets b = beta (o(b) = 1)
            for (int be = 0; be < nx; ++be) {
                GradedPoly acc(nx);
                for (int i = 2; i <= cf.wmax - 1; ++i) {
                    // horizontal c: weight w + 1 - 1 - i = w - i
                    if (w - i >= 0 && 1 + i <= cf.wmax) {
                        for (int c = 0; c < nx; ++c) {
                            const GradedPoly& s = fp.s_h[static_cast<std::size_t>(al)]
                                                        [static_cast<std::size_t>(c)]
                                                        [static_cast<std::size_t>(w - i)];
                            if (s.is_zero()) continue;
                            GradedPoly th = eval_on_field(
                                cf.theta[static_cast<std::size_t>(be)][static_cast<std::size_t>(
                                    1 + i)],
                                field_cache[static_cast<std::size_t>(c)]);
                            acc -= s * th;
                        }
                    }
                    // vertical c: weight w + 1 - 1 + 2 - i... i.e. w - i + 1
                    if (w - i + 1 >= 0 && w - i + 1 <= wmax && 1 + i <= cf.wmax) {
                        for (int j = 0; j < 3; ++j) {
                            const GradedPoly& s = fp.s_v[static_cast<std::size_t>(al)]
                                                        [static_cast<std::size_t>(j)]
                                                        [static_cast<std::size_t>(w - i + 1)];
                            if (s.is_zero()) continue;
                            GradedPoly th = eval_on_field(
                                cf.theta[static_cast<std::size_t>(be)][static_cast<std::size_t>(
                                    1 + i)],
                                field_cache[static_cast<std::size_t>(nx + j)]);
                            acc -= s * th;
                        }
                    }
                }
                fp.s_h[static_cast<std::size_t>(al)][static_cast<std::size_t>(be)]
                      [static_cast<std::size_t>(w)] = acc;
            }
            // vertical targets b = 4n + j (o(b) = 2)
            for (int j = 0; j < 3; ++j) {
                GradedPoly acc(nx);
                for (int i = 2; i <= cf.wmax - 2; ++i) {
                    // horizontal c: s-weight w - 1 - i + ... m + o(c) - o(a) - i
                    // with m = w - o(b) + o(a) = w - 1: horizontal gives w - 1 - i
                    if (w - 1 - i >= 0 && 2 + i <= cf.wmax) {
                        for (int c = 0; c < nx; ++c) {
                            const GradedPoly& s = fp.s_h[static_cast<std::size_t>(al)]
                                                        [static_cast<std::size_t>(c)]
                                                        [static_cast<std::size_t>(w - 1 - i)];
                            if (s.is_zero()) continue;
                            GradedPoly th = eval_on_field(
                                cf.eta[static_cast<std::size_t>(j)][static_cast<std::size_t>(
                                    2 + i)],
                                field_cache[static_cast<std::size_t>(c)]);
                            acc -= s * th;
                        }
                    }
                    // vertical c: w - 1 - i + 1 = w - i
                    if (w - i >= 0 && w - i <= wmax && 2 + i <= cf.wmax) {
                        for (int jj = 0; jj < 3; ++jj) {
                            const GradedPoly& s = fp.s_v[static_cast<std::size_t>(al)]
                                                        [static_cast<std::size_t>(jj)]
                                                        [static_cast<std::size_t>(w - i)];
                            if (s.is_zero()) continue;
                            GradedPoly th = eval_on_field(
                                cf.eta[static_cast<std::size_t>(j)][static_cast<std::size_t>(
                                    2 + i)],
                                field_cache[static_cast<std::size_t>(nx + jj)]);
                            acc -= s * th;
                        }
                    }
                }
                fp.s_v[static_cast<std::size_t>(al)][static_cast<std::size_t>(j)]
                      [static_cast<std::size_t>(w)] = acc;
            }
        }
    }
    return fp;
}

// ---------------------------------------------------------------------------
// Closed forms

GradedForm eta4_closed(const QuaternionStructure& Q, const CurvatureTensor& R, int i) {
    int nx = Q.dim();
    GradedForm out(nx);
    // -(1/12) I^i_{ab} R_{de z g}^b x^a x^g x^d dx^z
    for (int b = 0; b < nx; ++b) {
        auto [a, s] = Q.column_support(i, b);  // I^i_{ab} = s at row a
        for (int g = 0; g < nx; ++g)
            for (int de = 0; de < nx; ++de)
                for (int z = 0; z < nx; ++z) {
                    const Rational& rv = R.at(de, z, g, b);
                    if (rv == 0) continue;
                    GradedPoly mono = GradedPoly::variable(nx, a) * GradedPoly::variable(nx, g) *
                                      GradedPoly::variable(nx, de);
                    out.add_component(static_cast<std::uint16_t>(1u << z),
                                      mono * (rv * rat(-s, 12)));
                }
    }
    return out;
}

GradedForm eta6_closed(const QuaternionStructure& Q, const CurvatureTensor& R, int i) {
    int nx = Q.dim();
    GradedForm out(nx);
    // -(1/360) I^i_{ab} R_{d th g}^b R_{e io z}^th x^a x^g x^d x^z x^e dx^io
    for (int b = 0; b < nx; ++b) {
        auto [a, s] = Q.column_support(i, b);
        for (int th = 0; th < nx; ++th)
            for (int g = 0; g < nx; ++g)
                for (int de = 0; de < nx; ++de) {
                    const Rational& r1 = R.at(de, th, g, b);
                    if (r1 == 0) continue;
                    GradedPoly mono3 = GradedPoly::variable(nx, a) *
                                       GradedPoly::variable(nx, g) * GradedPoly::variable(nx, de);
                    for (int e = 0; e < nx; ++e)
                        for (int z = 0; z < nx; ++z)
                            for (int io = 0; io < nx; ++io) {
                                const Rational& r2 = R.at(e, io, z, th);
                                if (r2 == 0) continue;
                                GradedPoly mono = mono3 * GradedPoly::variable(nx, z) *
                                                  GradedPoly::variable(nx, e);
                                out.add_component(static_cast<std::uint16_t>(1u << io),
                                                  mono * (r1 * r2 * rat(-s, 360)));
                            }
                }
    }
    return out;
}

GradedForm theta3_closed(const QuaternionStructure& Q, const CurvatureTensor& R, int alpha) {
    int nx = Q.dim();
    GradedForm out(nx);
    // (1/6) R_{g d b}^alpha x^b x^g dx^d
    for (int b = 0; b < nx; ++b)
        for (int g = 0; g < nx; ++g)
            for (int de = 0; de < nx; ++de) {
                const Rational& rv = R.at(g, de, b, alpha);
                if (rv == 0) continue;
                GradedPoly mono = GradedPoly::variable(nx, b) * GradedPoly::variable(nx, g);
                out.add_component(static_cast<std::uint16_t>(1u << de), mono * (rv * Rational(1, 6)));
            }
    return out;
}

GradedPoly s2_closed(const QuaternionStructure& Q, const CurvatureTensor& R, int alpha, int beta) {
    int nx = Q.dim();
    GradedPoly out(nx);
    // -(1/6) R_{d alpha g}^beta x^g x^d
    for (int g = 0; g < nx; ++g)
        for (int de = 0; de < nx; ++de) {
            const Rational& rv = R.at(de, alpha, g, beta);
            if (rv == 0) continue;
            out += GradedPoly::variable(nx, g) * GradedPoly::variable(nx, de) *
                   (rv * Rational(-1, 6));
        }
    return out;
}

GradedPoly s3v_closed(const QuaternionStructure& Q, const CurvatureTensor& R, int alpha, int i) {
    int nx = Q.dim();
    GradedPoly out(nx);
    // (1/12) I^i_{b g} R_{th alpha d}^g x^b x^d x^th
    for (int g = 0; g < nx; ++g) {
        auto [b, s] = Q.column_support(i, g);  // I^i_{bg} = s
        for (int de = 0; de < nx; ++de)
            for (int th = 0; th < nx; ++th) {
                const Rational& rv = R.at(th, alpha, de, g);
                if (rv == 0) continue;
                out += GradedPoly::variable(nx, b) * GradedPoly::variable(nx, de) *
                       GradedPoly::variable(nx, th) * (rv * rat(s, 12));
            }
    }
    return out;
}

GradedPoly s4_closed(const QuaternionStructure& Q, const CurvatureTensor& R, int alpha, int beta) {
    int nx = Q.dim();
    (void)Q;
    GradedPoly out(nx);
    // (7/360) R_{d alpha th}^g R_{e g z}^beta x^d x^z x^e x^th
    for (int g = 0; g < nx; ++g)
        for (int de = 0; de < nx; ++de)
            for (int th = 0; th < nx; ++th) {
                const Rational& r1 = R.at(de, alpha, th, g);
                if (r1 == 0) continue;
                for (int e = 0; e < nx; ++e)
                    for (int z = 0; z < nx; ++z) {
                        const Rational& r2 = R.at(e, g, z, beta);
                        if (r2 == 0) continue;
                        out += GradedPoly::variable(nx, de) * GradedPoly::variable(nx, z) *
                               GradedPoly::variable(nx, e) * GradedPoly::variable(nx, th) *
                               (r1 * r2 * Rational(7, 360));
                    }
            }
    return out;
}

GradedPoly s5v_closed(const QuaternionStructure& Q, const CurvatureTensor& R, int alpha, int i) {
    int nx = Q.dim();
    GradedPoly out(nx);
    // -(1/90) I^i_{th z} R_{d alpha g}^b R_{xi b e}^z x^g x^d x^e x^th x^xi
    for (int z = 0; z < nx; ++z) {
        auto [th, s] = Q.column_support(i, z);  // I^i_{th z} = s
        for (int b = 0; b < nx; ++b)
            for (int g = 0; g < nx; ++g)
                for (int de = 0; de < nx; ++de) {
                    const Rational& r1 = R.at(de, alpha, g, b);
                    if (r1 == 0) continue;
                    for (int e = 0; e < nx; ++e)
                        for (int xi = 0; xi < nx; ++xi) {
                            const Rational& r2 = R.at(xi, b, e, z);
                            if (r2 == 0) continue;
                            out += GradedPoly::variable(nx, g) * GradedPoly::variable(nx, de) *
                                   GradedPoly::variable(nx, e) * GradedPoly::variable(nx, th) *
                                   GradedPoly::variable(nx, xi) * (r1 * r2 * rat(-s, 90));
                        }
                }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Wedge lemmas

namespace {

GradedForm wedge_power(const GradedForm& f, int k) {
    GradedForm acc = GradedForm::from_poly(GradedPoly::constant(f.nx(), Rational(1)));
    for (int i = 0; i < k; ++i) acc = acc.wedge(f);
    return acc;
}

} // namespace

std::pair<bool, bool> wedge_lemma_check(const QuaternionStructure& Q, const RatMat& omega) {
    int nx = Q.dim();
    int n = Q.n;
    GradedForm th1 = contact_graded_form(Q, 0), th2 = contact_graded_form(Q, 1),
               th3 = contact_graded_form(Q, 2);
    GradedForm dth1 = th1.d();
    GradedForm triple = th1.wedge(th2).wedge(th3);

    GradedForm omega_form(nx);
    for (int a = 0; a < nx; ++a)
        for (int b = 0; b < nx; ++b) {
            if (omega(a, b) == 0) continue;
            if (a < b)
                omega_form.add_component(static_cast<std::uint16_t>((1u << a) | (1u << b)),
                                         GradedPoly::constant(nx, omega(a, b)));
            else if (b < a)
                omega_form.add_component(static_cast<std::uint16_t>((1u << a) | (1u << b)),
                                         GradedPoly::constant(nx, -omega(a, b)));
        }

    Rational tr(0);
    for (int a = 0; a < nx; ++a)
        for (int b = 0; b < nx; ++b) tr += Rational(Q.ii(0, a, b)) * omega(a, b);
    tr = -tr / 2;

    GradedForm lhs_a = triple.wedge(omega_form).wedge(wedge_power(dth1, 2 * n - 1)) *
                       Rational(2 * n);
    GradedForm rhs_a = triple.wedge(wedge_power(dth1, 2 * n)) * tr;
    bool ok_a = lhs_a == rhs_a;

    Rational quad(0);
    for (int a = 0; a < nx; ++a)
        for (int b = 0; b < nx; ++b)
            for (int g = 0; g < nx; ++g)
                for (int de = 0; de < nx; ++de) {
                    int i1 = Q.ii(0, a, b) * Q.ii(0, g, de);
                    int i2 = Q.ii(0, a, de) * Q.ii(0, b, g);
                    if (i1 == 0 && i2 == 0) continue;
                    quad += Rational(i1 + 2 * i2) * omega(a, b) * omega(g, de);
                }
    GradedForm lhs_b = triple.wedge(omega_form).wedge(omega_form)
                           .wedge(wedge_power(dth1, 2 * n - 2)) *
                       Rational(8L * n * (2 * n - 1));
    GradedForm rhs_b = triple.wedge(wedge_power(dth1, 2 * n)) * quad;
    bool ok_b = lhs_b == rhs_b;
    return {ok_a, ok_b};
}

// ---------------------------------------------------------------------------
// Volume expansion and chi

namespace {

// A form stored by homogeneous order, with order-truncated wedge products.
struct WeightedForm {
    int nx = 0;
    std::map<int, GradedForm> parts;

    static WeightedForm from_parts(int nx, const std::vector<std::pair<int, GradedForm>>& ps) {
        WeightedForm w;
        w.nx = nx;
        for (auto& [o, f] : ps)
            if (!f.is_zero()) w.parts.emplace(o, f);
        return w;
    }

    WeightedForm wedge(const WeightedForm& o, int max_order) const {
        WeightedForm r;
        r.nx = nx;
        for (auto& [oa, fa] : parts)
            for (auto& [ob, fb] : o.parts) {
                if (oa + ob > max_order) continue;
                GradedForm w = fa.wedge(fb);
                if (w.is_zero()) continue;
                auto [it, inserted] = r.parts.emplace(oa + ob, w);
                if (!inserted) it->second += w;
            }
        return r;
    }
};

} // namespace

std::array<GradedForm, 5> volume_expansion(const QuaternionStructure& Q,
                                           const CurvatureTensor& R) {
    int nx = Q.dim();
    int n = Q.n;
    int base = 4 * n + 6;
    int max_order = base + 4;
    CoframeParts cf = recurse_coframe(Q, R, 6);

    std::array<WeightedForm, 3> eta;
    for (int i = 0; i < 3; ++i) {
        std::vector<std::pair<int, GradedForm>> ps;
        for (int m = 2; m <= cf.wmax; ++m)
            ps.emplace_back(m, cf.eta[static_cast<std::size_t>(i)][static_cast<std::size_t>(m)]);
        eta[static_cast<std::size_t>(i)] = WeightedForm::from_parts(nx, ps);
    }
    // d eta^1 by homogeneous parts (d preserves the parabolic weight)
    std::vector<std::pair<int, GradedForm>> dps;
    for (auto& [o, f] : eta[0].parts) dps.emplace_back(o, f.d());
    WeightedForm deta1 = WeightedForm::from_parts(nx, dps);

    WeightedForm acc = eta[0].wedge(eta[1], max_order).wedge(eta[2], max_order);
    for (int k = 0; k < 2 * n; ++k) acc = acc.wedge(deta1, max_order);

    std::array<GradedForm, 5> out;
    for (int k = 0; k <= 4; ++k) {
        auto it = acc.parts.find(base + k);
        out[static_cast<std::size_t>(k)] = it == acc.parts.end() ? GradedForm(nx) : it->second;
    }
    return out;
}

GradedPoly chi_closed(const QuaternionStructure& Q, const CurvatureTensor& R) {
    int nx = Q.dim();
    GradedPoly out(nx);
    // six contraction patterns with weights (-1/2880, -1/480, -1/480, -1/576,
    // -1/576, -1/288), each contracted with x^g x^d x^z x^e
    for (int g = 0; g < nx; ++g)
        for (int de = 0; de < nx; ++de)
            for (int z = 0; z < nx; ++z)
                for (int e = 0; e < nx; ++e) {
                    Rational coef(0);
                    // 1: R_{d a g}^b R_{e b z}^a
                    {
                        Rational s(0);
                        for (int a = 0; a < nx; ++a)
                            for (int b = 0; b < nx; ++b)
                                s += R.at(de, a, g, b) * R.at(e, b, z, a);
                        coef += s * Rational(-1, 2880);
                    }
                    // 2: I1^{a th} I1_{z io} R_{d th g}^b R_{e b a}^io
                    {
                        Rational s(0);
                        auto [io, sz] = Q.row_support(0, z);
                        for (int a = 0; a < nx; ++a) {
                            auto [th, sa] = Q.row_support(0, a);
                            for (int b = 0; b < nx; ++b)
                                s += R.at(de, th, g, b) * R.at(e, b, a, io) * (sa * sz);
                        }
                        coef += s * Rational(-1, 480);
                    }
                    // 3: I1^{a th} I1_{e io} R_{d th g}^b R_{a b z}^io
                    {
                        Rational s(0);
                        auto [io, se] = Q.row_support(0, e);
                        for (int a = 0; a < nx; ++a) {
                            auto [th, sa] = Q.row_support(0, a);
                            for (int b = 0; b < nx; ++b)
                                s += R.at(de, th, g, b) * R.at(a, b, z, io) * (sa * se);
                        }
                        coef += s * Rational(-1, 480);
                    }
                    // 4: I1^{a k} I1^{l th} I1_{g b} I1_{z io} R_{d th a}^b R_{e k l}^io
                    {
                        Rational s(0);
                        auto [b, sg] = Q.row_support(0, g);
                        auto [io, sz] = Q.row_support(0, z);
                        for (int a = 0; a < nx; ++a) {
                            auto [k, sa] = Q.row_support(0, a);
                            for (int l = 0; l < nx; ++l) {
                                auto [th, sl] = Q.row_support(0, l);
                                s += R.at(de, th, a, b) * R.at(e, k, l, io) * (sa * sl * sg * sz);
                            }
                        }
                        coef += s * Rational(-1, 576);
                    }
                    // 5: I1^{a k} I1^{l th} I1_{d b} I1_{e io} R_{a th g}^b R_{l k z}^io
                    {
                        Rational s(0);
                        auto [b, sd] = Q.row_support(0, de);
                        auto [io, se] = Q.row_support(0, e);
                        for (int a = 0; a < nx; ++a) {
                            auto [k, sa] = Q.row_support(0, a);
                            for (int l = 0; l < nx; ++l) {
                                auto [th, sl] = Q.row_support(0, l);
                                s += R.at(a, th, g, b) * R.at(l, k, z, io) * (sa * sl * sd * se);
                            }
                        }
                        coef += s * Rational(-1, 576);
                    }
                    // 6: I1^{a k} I1^{l th} I1_{g b} I1_{e io} R_{d th a}^b R_{l k z}^io
                    {
                        Rational s(0);
                        auto [b, sg] = Q.row_support(0, g);
                        auto [io, se] = Q.row_support(0, e);
                        for (int a = 0; a < nx; ++a) {
                            auto [k, sa] = Q.row_support(0, a);
                            for (int l = 0; l < nx; ++l) {
                                auto [th, sl] = Q.row_support(0, l);
                                s += R.at(de, th, a, b) * R.at(l, k, z, io) * (sa * sl * sg * se);
                            }
                        }
                        coef += s * Rational(-1, 288);
                    }
                    if (coef == 0) continue;
                    out += GradedPoly::variable(nx, g) * GradedPoly::variable(nx, de) *
                           GradedPoly::variable(nx, z) * GradedPoly::variable(nx, e) * coef;
                }
    return out;
}

GradedPoly quadratic_trace_form(const QuaternionStructure& Q,
                                const std::vector<std::vector<GradedPoly>>& w) {
    int nx = Q.dim();
    GradedPoly acc(nx);
    for (int a = 0; a < nx; ++a)
        for (int b = 0; b < nx; ++b)
            for (int g = 0; g < nx; ++g)
                for (int de = 0; de < nx; ++de) {
                    int i1 = Q.ii(0, a, b) * Q.ii(0, g, de);
                    int i2 = Q.ii(0, a, de) * Q.ii(0, b, g);
                    if (i1 == 0 && i2 == 0) continue;
                    acc += w[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] *
                           w[static_cast<std::size_t>(g)][static_cast<std::size_t>(de)] *
                           Rational(i1 + 2 * i2);
                }
    return acc;
}

GradedPoly chi_from_trace_lemmas(const QuaternionStructure& Q, const CurvatureTensor& R) {
    int nx = Q.dim();
    int n = Q.n;
    CoframeParts cf = recurse_coframe(Q, R, 6);

    // trace part: 2n Theta^3 ^ (d eta)_(6) ^ (dTheta)^{2n-1} via the linear
    // trace lemma, tr w = -(1/2) I^1_{ab} w_{ab}
    GradedForm de6 = cf.eta[0][6].d();
    std::vector<std::vector<GradedPoly>> w6(
        static_cast<std::size_t>(nx), std::vector<GradedPoly>(static_cast<std::size_t>(nx), GradedPoly(nx)));
    for (auto& [mask, p] : de6.comps()) {
        int b1 = -1, b2 = -1;
        for (int k = 0; k < nx + 3; ++k)
            if (mask & (1u << k)) {
                if (b1 < 0)
                    b1 = k;
                else
                    b2 = k;
            }
        w6[static_cast<std::size_t>(b1)][static_cast<std::size_t>(b2)] += p * rat(1, 2);
        w6[static_cast<std::size_t>(b2)][static_cast<std::size_t>(b1)] -= p * rat(1, 2);
    }
    GradedPoly trace6(nx);
    for (int a = 0; a < nx; ++a)
        for (int b = 0; b < nx; ++b)
            if (Q.ii(0, a, b) != 0)
                trace6 -= w6[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] *
                          rat(Q.ii(0, a, b), 2);

    // quadratic part: n(2n-1) Theta^3 ^ ((d eta)_(4))^2 ^ (dTheta)^{2n-2} via
    // the quadratic trace lemma on the antisymmetrized coefficients
    GradedForm de4 = cf.eta[0][4].d();
    std::vector<std::vector<GradedPoly>> w4(
        static_cast<std::size_t>(nx), std::vector<GradedPoly>(static_cast<std::size_t>(nx), GradedPoly(nx)));
    for (auto& [mask, p] : de4.comps()) {
        int b1 = -1, b2 = -1;
        for (int k = 0; k < nx + 3; ++k)
            if (mask & (1u << k)) {
                if (b1 < 0)
                    b1 = k;
                else
                    b2 = k;
            }
        w4[static_cast<std::size_t>(b1)][static_cast<std::size_t>(b2)] += p * rat(1, 2);
        w4[static_cast<std::size_t>(b2)][static_cast<std::size_t>(b1)] -= p * rat(1, 2);
    }
    (void)n;
    return trace6 + quadratic_trace_form(Q, w4) * rat(1, 8);
}

std::pair<GradedPoly, GradedPoly> chi_two_ways(const QuaternionStructure& Q,
                                               const CurvatureTensor& R) {
    int nx = Q.dim();
    std::array<GradedForm, 5> vol = volume_expansion(Q, R);
    std::uint16_t top = static_cast<std::uint16_t>((1u << (nx + 3)) - 1);

    // flat top coefficient from the order-(4n+6) part
    GradedPoly flat(nx);
    auto it0 = vol[0].comps().find(top);
    if (it0 != vol[0].comps().end()) flat = it0->second;
    Rational c_top(0);
    for (auto& [k, c] : flat.terms())
        if (k == 0) c_top = c;
    if (c_top == 0) throw EmptySpace("flat volume top coefficient vanished");

    GradedPoly assembled(nx);
    auto it4 = vol[4].comps().find(top);
    if (it4 != vol[4].comps().end()) assembled = it4->second * (Rational(1) / c_top);
    return {chi_closed(Q, R), assembled};
}

// ---------------------------------------------------------------------------
// Gradient expansion check

GradientExpansionCheck gradient_expansion_check(const QuaternionStructure& Q,
                                                const CurvatureTensor& R,
                                                const std::vector<HeisenbergPointQ>& points) {
    int nx = Q.dim();
    int n = Q.n;
    CoframeParts cf = recurse_coframe(Q, R, 6);
    FrameParts fp = frame_coefficients(Q, cf, 5);

    // gamma_b = (1+|p|^2) x^b + sum_i (I_i^T x)_b t^i
    GradedPoly p2(nx);
    for (int a = 0; a < nx; ++a)
        p2 += GradedPoly::variable(nx, a) * GradedPoly::variable(nx, a);
    GradedPoly one_p2 = GradedPoly::constant(nx, Rational(1)) + p2;
    std::vector<GradedPoly> gamma(static_cast<std::size_t>(nx), GradedPoly(nx));
    for (int b = 0; b < nx; ++b) {
        GradedPoly g = one_p2 * GradedPoly::variable(nx, b);
        for (int i = 0; i < 3; ++i) {
            auto [a, s] = Q.column_support(i, b);  // (I_i^T x)_b = s x_a
            g += GradedPoly::variable(nx, a) * GradedPoly::variable(nx, nx + i) * Rational(s);
        }
        gamma[static_cast<std::size_t>(b)] = g;
    }

    // Psi_alpha[k]: the eps^k part of the dilated xi_alpha f per common factor
    std::vector<std::array<GradedPoly, 5>> psi(static_cast<std::size_t>(nx));
    for (int al = 0; al < nx; ++al) {
        for (int k = 0; k <= 4; ++k) {
            GradedPoly acc(nx);
            for (int be = 0; be < nx; ++be) {
                const GradedPoly& s = fp.s_h[static_cast<std::size_t>(al)]
                                            [static_cast<std::size_t>(be)]
                                            [static_cast<std::size_t>(k)];
                if (!s.is_zero()) acc += s * gamma[static_cast<std::size_t>(be)];
            }
            if (k + 1 <= fp.wmax)
                for (int i = 0; i < 3; ++i) {
                    const GradedPoly& s = fp.s_v[static_cast<std::size_t>(al)]
                                                [static_cast<std::size_t>(i)]
                                                [static_cast<std::size_t>(k + 1)];
                    if (!s.is_zero()) acc += s * GradedPoly::variable(nx, nx + i);
                }
            psi[static_cast<std::size_t>(al)][static_cast<std::size_t>(k)] = acc;
        }
    }

    // E[m] = sum_alpha sum_{k1+k2=m} Psi[k1] Psi[k2]
    std::array<GradedPoly, 5> E;
    for (auto& e : E) e = GradedPoly(nx);
    for (int m = 0; m <= 4; ++m)
        for (int k1 = 0; k1 <= m; ++k1) {
            int k2 = m - k1;
            for (int al = 0; al < nx; ++al)
                E[static_cast<std::size_t>(m)] +=
                    psi[static_cast<std::size_t>(al)][static_cast<std::size_t>(k1)] *
                    psi[static_cast<std::size_t>(al)][static_cast<std::size_t>(k2)];
        }

    // volume factors: V[k] = top coefficient of order 4n+6+k over the flat one
    std::array<GradedForm, 5> vol = volume_expansion(Q, R);
    std::uint16_t top = static_cast<std::uint16_t>((1u << (nx + 3)) - 1);
    Rational c_top(0);
    {
        auto it = vol[0].comps().find(top);
        if (it != vol[0].comps().end())
            for (auto& [k, c] : it->second.terms())
                if (k == 0) c_top = c;
    }
    std::array<GradedPoly, 5> V;
    for (int k = 0; k <= 4; ++k) {
        V[static_cast<std::size_t>(k)] = GradedPoly(nx);
        auto it = vol[static_cast<std::size_t>(k)].comps().find(top);
        if (it != vol[static_cast<std::size_t>(k)].comps().end())
            V[static_cast<std::size_t>(k)] = it->second * (Rational(1) / c_top);
    }

    // assembled lhs by eps order, t-odd monomials dropped
    std::array<GradedPoly, 5> lhs;
    for (int m = 0; m <= 4; ++m) {
        GradedPoly acc(nx);
        for (int k = 0; k <= m; ++k) acc += E[static_cast<std::size_t>(k)] *
                                            V[static_cast<std::size_t>(m - k)];
        lhs[static_cast<std::size_t>(m)] = acc.t_even_filter();
    }

    // closed-form rhs: eps^0 -> G |p|^2, eps^4 -> (17/720) chi~ + G |p|^2 chi
    GradedPoly w2(nx);
    for (int i = 0; i < 3; ++i)
        w2 += GradedPoly::variable(nx, nx + i) * GradedPoly::variable(nx, nx + i);
    GradedPoly G = one_p2 * one_p2 + w2;
    GradedPoly rhs0 = G * p2;

    GradedPoly chi_t(nx);  // sum_i I^i_{ba} I^i_{xi th} R_{d a io}^g R_{e g z}^th x^6 (t^i)^2
    for (int i = 0; i < 3; ++i) {
        GradedPoly xpart(nx);
        for (int b = 0; b < nx; ++b) {
            auto [a, sb] = Q.row_support(i, b);  // I_i(b, a) = sb
            for (int ka = 0; ka < nx; ++ka) {
                auto [th, sk] = Q.row_support(i, ka);
                for (int de = 0; de < nx; ++de)
                    for (int io = 0; io < nx; ++io)
                        for (int z = 0; z < nx; ++z)
                            for (int e = 0; e < nx; ++e) {
                                Rational s(0);
                                for (int g = 0; g < nx; ++g)
                                    s += R.at(de, a, io, g) * R.at(e, g, z, th);
                                if (s == 0) continue;
                                xpart += GradedPoly::variable(nx, b) *
                                         GradedPoly::variable(nx, de) *
                                         GradedPoly::variable(nx, z) *
                                         GradedPoly::variable(nx, e) *
                                         GradedPoly::variable(nx, io) *
                                         GradedPoly::variable(nx, ka) * (s * Rational(sb * sk));
                            }
            }
        }
        chi_t += xpart * GradedPoly::variable(nx, nx + i) * GradedPoly::variable(nx, nx + i);
    }
    GradedPoly chi = chi_closed(Q, R);
    GradedPoly rhs4 = chi_t * Rational(17, 720) + rhs0 * chi;
    GradedPoly rhs4_assembled = chi_t * Rational(17, 720) + rhs0 * V[4];

    GradientExpansionCheck out;
    out.worst_e0 = Rational(0);
    out.worst_e4 = Rational(0);
    out.worst_e4_assembled = Rational(0);
    out.eps2_pointwise_max = Rational(0);
    out.e1_zero = lhs[1].is_zero();
    out.e3_zero = lhs[3].is_zero();

    GradedPoly diff0 = lhs[0] - rhs0;
    GradedPoly diff4 = lhs[4] - rhs4;
    GradedPoly diff4a = lhs[4] - rhs4_assembled;
    out.e4_assembled_identity = diff4a.is_zero();
    for (const HeisenbergPointQ& p : points) {
        Rational d0 = diff0.eval(p.x, p.t);
        Rational d4 = diff4.eval(p.x, p.t);
        Rational d4a = diff4a.eval(p.x, p.t);
        Rational d2 = lhs[2].eval(p.x, p.t);
        if (d0 < 0) d0 = -d0;
        if (d4 < 0) d4 = -d4;
        if (d4a < 0) d4a = -d4a;
        if (d2 < 0) d2 = -d2;
        if (d0 > out.worst_e0) out.worst_e0 = d0;
        if (d4 > out.worst_e4) out.worst_e4 = d4;
        if (d4a > out.worst_e4_assembled) out.worst_e4_assembled = d4a;
        if (d2 > out.eps2_pointwise_max) out.eps2_pointwise_max = d2;
    }

    // The eps^2 layer is a weight-2 invariant: it need not vanish pointwise,
    // but the sphere integral of every t-slice must be exactly zero.
    out.eps2_sphere_zero = true;
    std::map<std::uint64_t, GradedPoly> slices;  // t-monomial -> x-polynomial
    for (auto& [k, c] : lhs[2].terms()) {
        std::uint64_t tkey = 0;
        std::uint64_t xkey = k;
        for (int i = 0; i < 3; ++i) {
            std::uint64_t mask = std::uint64_t(31) << (5 * (nx + i));
            tkey |= k & mask;
            xkey &= ~mask;
        }
        auto [it, inserted] = slices.emplace(tkey, GradedPoly(nx));
        it->second.add_term(xkey, c);
    }
    for (auto& [tkey, xpoly] : slices) {
        ExactScalar integral;
        for (auto& [k, c] : xpoly.terms()) {
            std::vector<long> expo(static_cast<std::size_t>(nx), 0);
            for (int a = 0; a < nx; ++a) expo[static_cast<std::size_t>(a)] = GradedPoly::exponent(k, a);
            integral = integral + ExactScalar::from_rational(c) * sphere_monomial(n, expo);
        }
        if (!integral.is_zero()) out.eps2_sphere_zero = false;
    }
    return out;
}

} // namespace qcylab
