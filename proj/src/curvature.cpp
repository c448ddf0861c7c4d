#include "qcylab/curvature.hpp"

#include "qcylab/errors.hpp"

#include <Eigen/LU>

#include <istream>
#include <ostream>
#include <random>
#include <sstream>

namespace qcylab {

bool CurvatureTensor::is_zero() const {
    for (const auto& v : a_)
        if (v != 0) return false;
    return true;
}

CurvatureTensor& CurvatureTensor::operator+=(const CurvatureTensor& o) {
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
    return *this;
}

CurvatureTensor& CurvatureTensor::operator*=(const Rational& s) {
    for (auto& v : a_) v *= s;
    return *this;
}

namespace {

// Rescale a rational kernel vector to coprime integers.
void normalize_kernel_column(RatVec& v) {
    Integer lcm(1), gcd(0);
    for (int i = 0; i < v.rows(); ++i) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(),
                                               v(i).get_den().get_mpz_t());
    for (int i = 0; i < v.rows(); ++i) {
        v(i) *= Rational(lcm);
        v(i).canonicalize();
        mpz_gcd(gcd.get_mpz_t(), gcd.get_mpz_t(), v(i).get_num().get_mpz_t());
    }
    if (gcd > 1)
        for (int i = 0; i < v.rows(); ++i) {
            v(i) /= Rational(gcd);
            v(i).canonicalize();
        }
    // fix the sign of the first nonzero entry
    for (int i = 0; i < v.rows(); ++i)
        if (v(i) != 0) {
            if (v(i) < 0)
                for (int j = 0; j < v.rows(); ++j) v(j) = -v(j);
            break;
        }
}

} // namespace

std::vector<RatMat> commutant_skew_basis(const QuaternionStructure& Q) {
    int d = Q.dim();
    // Variables: entries M(a,b) for a < b of a skew matrix.  Constraints:
    // M I_i = I_i M for i = 1, 2 (the third follows from I_3 = I_1 I_2).
    int nvars = d * (d - 1) / 2;
    auto var = [d](int a, int b) { return a * (2 * d - a - 1) / 2 + (b - a - 1); };
    auto entry_sign = [&](int a, int b) {
        if (a == b) return std::pair<int, int>{-1, 0};
        return a < b ? std::pair<int, int>{var(a, b), 1} : std::pair<int, int>{var(b, a), -1};
    };
    std::vector<RatVec> rows;
    for (int i = 0; i < 2; ++i)
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) {
                RatVec row = RatVec::Constant(nvars, Rational(0));
                // (M I_i - I_i M)(a,b) = sum_c M(a,c) I_i(c,b) - I_i(a,c) M(c,b)
                auto [c1, s1] = Q.column_support(i, b);
                auto [v1, e1] = entry_sign(a, c1);
                if (v1 >= 0) row(v1) += Rational(s1 * e1);
                auto [c2, s2] = Q.row_support(i, a);
                auto [v2, e2] = entry_sign(c2, b);
                if (v2 >= 0) row(v2) -= Rational(s2 * e2);
                bool nonzero = false;
                for (int k = 0; k < nvars; ++k)
                    if (row(k) != 0) { nonzero = true; break; }
                if (nonzero) rows.push_back(std::move(row));
            }
    RatMat A = RatMat::Constant(static_cast<int>(rows.size()), nvars, Rational(0));
    for (int r = 0; r < static_cast<int>(rows.size()); ++r) A.row(r) = rows[static_cast<std::size_t>(r)].transpose();

    Eigen::FullPivLU<RatMat> lu(A);
    RatMat K = lu.kernel();
    std::vector<RatMat> basis;
    for (int c = 0; c < K.cols(); ++c) {
        RatVec col = K.col(c);
        normalize_kernel_column(col);
        RatMat M = RatMat::Constant(d, d, Rational(0));
        for (int a = 0; a < d; ++a)
            for (int b = a + 1; b < d; ++b) {
                M(a, b) = col(var(a, b));
                M(b, a) = -col(var(a, b));
            }
        basis.push_back(std::move(M));
    }
    return basis;
}

namespace {

CurvatureTensor symmetric_pair_tensor(int n, const RatMat& bm, const RatMat& bn) {
    int d = 4 * n;
    CurvatureTensor T(n);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
            if (bm(a, b) == 0 && bn(a, b) == 0) continue;
            for (int c = 0; c < d; ++c)
                for (int e = 0; e < d; ++e)
                    T.at(a, b, c, e) = bm(a, b) * bn(c, e) + bn(a, b) * bm(c, e);
        }
    return T;
}

} // namespace

std::vector<CurvatureTensor> admissible_basis(const QuaternionStructure& Q) {
    int n = Q.n, d = Q.dim();
    std::vector<RatMat> sp = commutant_skew_basis(Q);
    int N = static_cast<int>(sp.size());

    // Candidate space: symmetric combinations b_m (x) b_n; pair symmetries and
    // second-pair commutation hold by construction.  The stacked linear system
    // imposes first Bianchi and all nine Ricci-type trace conditions on the
    // coefficient space.
    std::vector<CurvatureTensor> gens;
    std::vector<std::pair<int, int>> pair_of;
    for (int m = 0; m < N; ++m)
        for (int k = m; k < N; ++k) {
            gens.push_back(symmetric_pair_tensor(n, sp[static_cast<std::size_t>(m)],
                                                 sp[static_cast<std::size_t>(k)]));
            pair_of.emplace_back(m, k);
        }
    int nvars = static_cast<int>(gens.size());

    std::vector<RatVec> rows;
    auto add_row = [&](const std::vector<Rational>& vals) {
        RatVec row = RatVec::Constant(nvars, Rational(0));
        bool nonzero = false;
        for (int j = 0; j < nvars; ++j) {
            row(j) = vals[static_cast<std::size_t>(j)];
            if (row(j) != 0) nonzero = true;
        }
        if (nonzero) rows.push_back(std::move(row));
    };

    // First Bianchi on strictly increasing index quadruples (the Bianchi sum
    // of a pair-symmetric tensor is totally antisymmetric).
    for (int a = 0; a < d; ++a)
        for (int b = a + 1; b < d; ++b)
            for (int c = b + 1; c < d; ++c)
                for (int e = c + 1; e < d; ++e) {
                    std::vector<Rational> vals(static_cast<std::size_t>(nvars));
                    for (int j = 0; j < nvars; ++j) {
                        const CurvatureTensor& T = gens[static_cast<std::size_t>(j)];
                        vals[static_cast<std::size_t>(j)] =
                            T.at(a, b, c, e) + T.at(b, c, a, e) + T.at(c, a, b, e);
                    }
                    add_row(vals);
                }

    // Ricci trace and the three families of almost-complex contractions.
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
            std::vector<Rational> vals(static_cast<std::size_t>(nvars));
            for (int j = 0; j < nvars; ++j) {
                const CurvatureTensor& T = gens[static_cast<std::size_t>(j)];
                Rational s(0);
                for (int g = 0; g < d; ++g) s += T.at(g, a, b, g);
                vals[static_cast<std::size_t>(j)] = s;
            }
            add_row(vals);
        }
    for (int i = 0; i < 3; ++i)
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) {
                std::vector<Rational> rho_v(static_cast<std::size_t>(nvars)),
                    zeta_v(static_cast<std::size_t>(nvars)), sigma_v(static_cast<std::size_t>(nvars));
                for (int j = 0; j < nvars; ++j) {
                    const CurvatureTensor& T = gens[static_cast<std::size_t>(j)];
                    Rational r(0), z(0), s(0);
                    for (int be = 0; be < d; ++be) {
                        auto [al, sg] = Q.row_support(i, be);  // I_i(be, al) = sg
                        r += T.at(a, b, al, be) * sg;
                        z += T.at(al, a, b, be) * sg;
                        s += T.at(al, be, a, b) * sg;
                    }
                    rho_v[static_cast<std::size_t>(j)] = r;
                    zeta_v[static_cast<std::size_t>(j)] = z;
                    sigma_v[static_cast<std::size_t>(j)] = s;
                }
                add_row(rho_v);
                add_row(zeta_v);
                add_row(sigma_v);
            }

    RatMat A = RatMat::Constant(std::max<int>(1, static_cast<int>(rows.size())), nvars,
                                Rational(0));
    for (int r = 0; r < static_cast<int>(rows.size()); ++r)
        A.row(r) = rows[static_cast<std::size_t>(r)].transpose();
    Eigen::FullPivLU<RatMat> lu(A);
    RatMat K = lu.kernel();

    // FullPivLU::kernel returns one zero column for a trivial kernel.
    std::vector<CurvatureTensor> basis;
    for (int c = 0; c < K.cols(); ++c) {
        RatVec col = K.col(c);
        bool nonzero = false;
        for (int j = 0; j < nvars; ++j)
            if (col(j) != 0) { nonzero = true; break; }
        if (!nonzero) continue;
        normalize_kernel_column(col);
        CurvatureTensor T(n);
        for (int j = 0; j < nvars; ++j)
            if (col(j) != 0) T += gens[static_cast<std::size_t>(j)] * col(j);
        // normalize the tensor itself to coprime integer entries
        Integer lcm(1), gcd(0);
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b)
                for (int cc = 0; cc < d; ++cc)
                    for (int e = 0; e < d; ++e)
                        mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(),
                                T.at(a, b, cc, e).get_den().get_mpz_t());
        T *= Rational(lcm);
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b)
                for (int cc = 0; cc < d; ++cc)
                    for (int e = 0; e < d; ++e) {
                        T.at(a, b, cc, e).canonicalize();
                        mpz_gcd(gcd.get_mpz_t(), gcd.get_mpz_t(),
                                T.at(a, b, cc, e).get_num().get_mpz_t());
                    }
        if (gcd > 1) T *= Rational(Rational(1) / Rational(gcd));
        basis.push_back(std::move(T));
    }
    if (basis.empty()) throw EmptySpace("admissible curvature space came out zero-dimensional");
    return basis;
}

CurvatureTensor combine(const std::vector<CurvatureTensor>& basis,
                        const std::vector<Rational>& coeffs) {
    CurvatureTensor T(basis.front().n());
    for (std::size_t i = 0; i < basis.size(); ++i) {
        if (coeffs[i] == 0) continue;
        T += basis[i] * coeffs[i];
    }
    return T;
}

CurvatureTensor sample_admissible(const std::vector<CurvatureTensor>& basis, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> coef(-3, 3);
    std::vector<Rational> c(basis.size());
    for (;;) {
        bool nonzero = false;
        for (auto& v : c) {
            v = Rational(coef(rng));
            if (v != 0) nonzero = true;
        }
        if (nonzero) break;
    }
    return combine(basis, c);
}

RicciContractions ricci_contractions(const QuaternionStructure& Q, const CurvatureTensor& R) {
    int d = Q.dim();
    RicciContractions out;
    out.ric = RatMat::Constant(d, d, Rational(0));
    out.scalar = Rational(0);
    Rational inv4n(1, 4 * Q.n);
    for (int i = 0; i < 3; ++i) {
        out.rho[static_cast<std::size_t>(i)] = RatMat::Constant(d, d, Rational(0));
        out.zeta[static_cast<std::size_t>(i)] = RatMat::Constant(d, d, Rational(0));
        out.sigma[static_cast<std::size_t>(i)] = RatMat::Constant(d, d, Rational(0));
    }
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
            Rational s(0);
            for (int g = 0; g < d; ++g) s += R.at(g, a, b, g);
            out.ric(a, b) = s;
            for (int i = 0; i < 3; ++i) {
                Rational r(0), z(0), sg(0);
                for (int be = 0; be < d; ++be) {
                    auto [al, sign] = Q.row_support(i, be);  // I_i(be, al) = sign
                    r += R.at(a, b, al, be) * sign;
                    z += R.at(al, a, b, be) * sign;
                    sg += R.at(al, be, a, b) * sign;
                }
                out.rho[static_cast<std::size_t>(i)](a, b) = r * inv4n;
                out.zeta[static_cast<std::size_t>(i)](a, b) = z * inv4n;
                out.sigma[static_cast<std::size_t>(i)](a, b) = sg * inv4n;
            }
        }
    for (int a = 0; a < d; ++a) out.scalar += out.ric(a, a);
    return out;
}

RatMat tensor_L(const QuaternionStructure& Q, const TorsionState& ts) {
    int d = Q.dim();
    RatMat g = RatMat::Identity(d, d);
    return ts.tau / Rational(2) + ts.mu + g * (ts.S / Rational(32 * Q.n * (Q.n + 2)));
}

CurvatureTensor wqc(const QuaternionStructure& Q, const CurvatureTensor& R, const RatMat& L) {
    int d = Q.dim();
    Rational trL(0);
    for (int a = 0; a < d; ++a) trL += L(a, a);

    // Precompute L I_i, I_i^T L, and the epsilon-contracted I_j^T L I_k.
    std::array<RatMat, 3> LI, ItL, E;
    for (int i = 0; i < 3; ++i) {
        LI[static_cast<std::size_t>(i)] = L * Q.I[static_cast<std::size_t>(i)];
        ItL[static_cast<std::size_t>(i)] =
            RatMat(Q.I[static_cast<std::size_t>(i)].transpose()) * L;
    }
    for (int i = 0; i < 3; ++i) {
        E[static_cast<std::size_t>(i)] = RatMat::Constant(d, d, Rational(0));
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) {
                int e = QuaternionStructure::eps(i, j, k);
                if (e == 0) continue;
                E[static_cast<std::size_t>(i)] +=
                    RatMat(ItL[static_cast<std::size_t>(j)] * Q.I[static_cast<std::size_t>(k)]) *
                    Rational(e);
            }
    }

    CurvatureTensor W(Q.n);
    Rational half(1, 2), inv2n(1, 2 * Q.n);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            for (int c = 0; c < d; ++c)
                for (int e = 0; e < d; ++e) {
                    Rational v = R.at(a, b, c, e);
                    if (a == c) v += L(b, e);
                    if (a == e) v -= L(b, c);
                    if (b == e) v += L(a, c);
                    if (b == c) v -= L(a, e);
                    for (int i = 0; i < 3; ++i) {
                        const RatMat& Ii = Q.I[static_cast<std::size_t>(i)];
                        const RatMat& li = LI[static_cast<std::size_t>(i)];
                        const RatMat& itl = ItL[static_cast<std::size_t>(i)];
                        v += Ii(a, c) * li(b, e) - Ii(a, e) * li(b, c) + Ii(b, e) * li(a, c) -
                             Ii(b, c) * li(a, e);
                        v += half * (Ii(a, b) * li(c, e) - Ii(a, b) * itl(c, e));
                        v += half * Ii(a, b) * E[static_cast<std::size_t>(i)](c, e);
                        v += Ii(c, e) * li(a, b) - Ii(c, e) * itl(a, b);
                        v += inv2n * trL * Ii(a, b) * Ii(c, e);
                    }
                    W.at(a, b, c, e) = v;
                }
    return W;
}

Rational wqc_norm_sq(const CurvatureTensor& R) {
    int d = R.dim();
    Rational s(0);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            for (int c = 0; c < d; ++c)
                for (int e = 0; e < d; ++e) s += R.at(a, b, c, e) * R.at(a, b, c, e);
    return s;
}

ConformalChange conformal_change(const QuaternionStructure& Q, const TorsionState& ts,
                                 const RatVec& u_first, const RatMat& u_second) {
    int n = Q.n, d = Q.dim();
    RatMat uu = u_first * u_first.transpose();
    RatMat usym = (u_second + RatMat(u_second.transpose())) / Rational(2);

    ConformalChange out;
    out.tau_t = ts.tau + project_minus(Q, uu * Rational(4) - usym * Rational(2));
    RatMat mu_raw = project_three(Q, RatMat(uu * Rational(-2) - usym));
    Rational tr(0);
    for (int a = 0; a < d; ++a) tr += mu_raw(a, a);
    out.mu_t = ts.mu + mu_raw - RatMat::Identity(d, d) * (tr / Rational(d));

    Rational grad2(0), lap(0);
    for (int a = 0; a < d; ++a) {
        grad2 += u_first(a) * u_first(a);
        lap += u_second(a, a);
    }
    out.S_t_times_e2u =
        ts.S - Rational(16 * (n + 1) * (n + 2)) * grad2 - Rational(8 * (n + 2)) * lap;
    return out;
}

void dump_csv(const CurvatureTensor& R, std::ostream& os) {
    int d = R.dim();
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            for (int c = 0; c < d; ++c)
                for (int e = 0; e < d; ++e)
                    if (R.at(a, b, c, e) != 0)
                        os << a + 1 << ',' << b + 1 << ',' << c + 1 << ',' << e + 1 << ','
                           << to_string(R.at(a, b, c, e)) << '\n';
}

CurvatureTensor load_csv(int n, std::istream& is) {
    CurvatureTensor R(n);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tok;
        int idx[4];
        for (int k = 0; k < 4; ++k) {
            if (!std::getline(ls, tok, ',')) throw ParseError("bad tensor CSV row: " + line);
            idx[k] = std::stoi(tok) - 1;
        }
        if (!std::getline(ls, tok)) throw ParseError("bad tensor CSV row: " + line);
        R.at(idx[0], idx[1], idx[2], idx[3]) = rational_from_string(tok);
    }
    return R;
}

} // namespace qcylab
