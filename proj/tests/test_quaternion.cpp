#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qcylab/quaternion.hpp"

#include <random>

using namespace qcylab;

namespace {

bool is_zero(const RatMat& m) {
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            if (m(i, j) != 0) return false;
    return true;
}

RatMat random_2tensor(int d, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> num(-9, 9);
    std::uniform_int_distribution<int> den(1, 4);
    RatMat T(d, d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) T(a, b) = rat(num(rng), den(rng));
    return T;
}

} // namespace

TEST_CASE("quaternion relations hold for n = 1, 2, 3") {
    for (int n : {1, 2, 3}) {
        CAPTURE(n);
        QuaternionStructure Q = build_structure(n);
        int d = Q.dim();
        RatMat id = RatMat::Identity(d, d);
        CHECK(RatMat(Q.I[0] * Q.I[1]) == Q.I[2]);
        CHECK(is_zero(Q.I[0] * Q.I[1] + Q.I[1] * Q.I[0]));
        CHECK(RatMat(Q.I[0] * Q.I[1] * Q.I[2]) == RatMat(-id));
        for (int i = 0; i < 3; ++i) {
            CHECK(RatMat(Q.I[i].transpose()) == RatMat(-Q.I[i]));
            CHECK(RatMat(Q.I[i].transpose() * Q.I[i]) == id);
            Rational tr(0);
            for (int a = 0; a < d; ++a) tr += Q.I[i](a, a);
            CHECK(tr == 0);
        }
    }
}

TEST_CASE("composition law I_i I_j = -delta_ij Id + eps_ijk I_k") {
    QuaternionStructure Q = build_structure(2);
    int d = Q.dim();
    RatMat id = RatMat::Identity(d, d);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            RatMat expect = RatMat::Constant(d, d, Rational(0));
            if (i == j) expect = -id;
            for (int k = 0; k < 3; ++k) {
                int e = QuaternionStructure::eps(i, j, k);
                if (e != 0) expect += Q.I[k] * Rational(e);
            }
            CHECK(RatMat(Q.I[i] * Q.I[j]) == expect);
        }
}

TEST_CASE("frame convention I_i e_{4k+1} = e_{4k+i+1}") {
    QuaternionStructure Q = build_structure(2);
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 3; ++i)
            for (int a = 0; a < Q.dim(); ++a)
                CHECK(Q.I[i](a, 4 * k) == (a == 4 * k + i + 1 ? 1 : 0));
}

TEST_CASE("sparse row/column supports match the dense matrices") {
    QuaternionStructure Q = build_structure(2);
    for (int i = 0; i < 3; ++i)
        for (int b = 0; b < Q.dim(); ++b) {
            auto [a, s] = Q.column_support(i, b);
            CHECK(Q.I[i](a, b) == s);
            auto [c, s2] = Q.row_support(i, b);
            CHECK(Q.I[i](b, c) == s2);
        }
}

TEST_CASE("Levi-Civita contraction identities, exhaustive") {
    auto eps = QuaternionStructure::eps;
    CHECK(eps(0, 1, 2) == 1);
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
            for (int l = 0; l < 3; ++l)
                for (int m = 0; m < 3; ++m) {
                    int lhs = 0;
                    for (int i = 0; i < 3; ++i) lhs += eps(i, j, k) * eps(i, l, m);
                    int rhs =
                        (j == l ? 1 : 0) * (k == m ? 1 : 0) - (j == m ? 1 : 0) * (k == l ? 1 : 0);
                    CHECK(lhs == rhs);
                }
    for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
            int lhs = 0;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) lhs += eps(i, j, k) * eps(i, j, l);
            CHECK(lhs == (k == l ? 2 : 0));
        }
}

TEST_CASE("Casimir operator satisfies C^2 = 2C + 3 exactly") {
    for (int n : {1, 2}) {
        CAPTURE(n);
        QuaternionStructure Q = build_structure(n);
        CasimirProjector P = casimir_projectors(Q);
        int N = Q.dim() * Q.dim();
        RatMat id = RatMat::Identity(N, N);
        CHECK(RatMat(P.C * P.C) == RatMat(P.C * Rational(2) + id * Rational(3)));
        CHECK(RatMat(P.P_minus * P.P_minus) == P.P_minus);
        CHECK(RatMat(P.P_three * P.P_three) == P.P_three);
        CHECK(is_zero(P.P_minus * P.P_three));
        CHECK(RatMat(P.P_minus + P.P_three) == id);
        CHECK(RatMat(P.C * P.P_minus) == RatMat(-P.P_minus));
        CHECK(RatMat(P.C * P.P_three) == RatMat(P.P_three * Rational(3)));
    }
}

TEST_CASE("matrix projectors and direct application agree") {
    QuaternionStructure Q = build_structure(1);
    CasimirProjector P = casimir_projectors(Q);
    std::mt19937_64 rng(7);
    for (int it = 0; it < 5; ++it) {
        RatMat T = random_2tensor(Q.dim(), rng);
        RatVec v = flatten_2tensor(T);
        CHECK(unflatten_2tensor(RatVec(P.C * v), Q.dim()) == casimir_apply(Q, T));
        CHECK(unflatten_2tensor(RatVec(P.P_minus * v), Q.dim()) == project_minus(Q, T));
        CHECK(unflatten_2tensor(RatVec(P.P_three * v), Q.dim()) == project_three(Q, T));
    }
}

TEST_CASE("the metric 2-tensor lies in the 3-eigenspace") {
    for (int n : {1, 2}) {
        QuaternionStructure Q = build_structure(n);
        RatMat g = RatMat::Identity(Q.dim(), Q.dim());
        CHECK(casimir_apply(Q, g) == RatMat(g * Rational(3)));
        CHECK(is_zero(project_minus(Q, g)));
    }
}

TEST_CASE("eigenprojection identities on random 2-tensors") {
    for (int n : {1, 2}) {
        CAPTURE(n);
        QuaternionStructure Q = build_structure(n);
        std::mt19937_64 rng(42 + static_cast<std::uint64_t>(n));
        for (int it = 0; it < 20; ++it) {
            RatMat T = random_2tensor(Q.dim(), rng);
            RatMat Tm = project_minus(Q, T);
            RatMat T3 = project_three(Q, T);
            CHECK(casimir_apply(Q, Tm) == RatMat(-Tm));
            CHECK(casimir_apply(Q, T3) == RatMat(T3 * Rational(3)));
            CHECK(is_zero(project_three(Q, Tm)));
            CHECK(RatMat(Tm + T3) == T);
        }
    }
}
