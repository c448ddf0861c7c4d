#include "qcylab/quaternion.hpp"

namespace qcylab {

int QuaternionStructure::eps(int i, int j, int k) {
    if (i == j || j == k || i == k) return 0;
    // even permutations of (0,1,2)
    if ((i == 0 && j == 1 && k == 2) || (i == 1 && j == 2 && k == 0) ||
        (i == 2 && j == 0 && k == 1))
        return 1;
    return -1;
}

QuaternionStructure build_structure(int n) {
    QuaternionStructure Q;
    Q.n = n;
    int d = 4 * n;

    // Left multiplication by i, j, k on H = span{1, i, j, k}: column c of the
    // block is the coordinate vector of q * e_c.
    // i: 1->i, i->-1, j->k, k->-j
    // j: 1->j, i->-k, j->-1, k->i
    // k: 1->k, i->j, j->-i, k->-1
    static const int row_of[3][4] = {{1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}};
    static const int sign_of[3][4] = {{1, -1, 1, -1}, {1, -1, -1, 1}, {1, 1, -1, -1}};

    for (int i = 0; i < 3; ++i) {
        Q.Iint[static_cast<std::size_t>(i)] = Eigen::MatrixXi::Zero(d, d);
        Q.I[static_cast<std::size_t>(i)] = RatMat::Constant(d, d, Rational(0));
        for (int blk = 0; blk < n; ++blk)
            for (int off = 0; off < 4; ++off) {
                int c = 4 * blk + off;
                int r = 4 * blk + row_of[i][off];
                Q.Iint[static_cast<std::size_t>(i)](r, c) = sign_of[i][off];
                Q.I[static_cast<std::size_t>(i)](r, c) = Rational(sign_of[i][off]);
            }
        for (int off = 0; off < 4; ++off) {
            Q.col_row_[static_cast<std::size_t>(i)][static_cast<std::size_t>(off)] =
                row_of[i][off];
            Q.col_sign_[static_cast<std::size_t>(i)][static_cast<std::size_t>(off)] =
                sign_of[i][off];
        }
        // row support: transpose relation
        for (int off = 0; off < 4; ++off) {
            int r = row_of[i][off];
            Q.row_col_[static_cast<std::size_t>(i)][static_cast<std::size_t>(r)] = off;
            Q.row_sign_[static_cast<std::size_t>(i)][static_cast<std::size_t>(r)] = sign_of[i][off];
        }
    }
    return Q;
}

RatVec flatten_2tensor(const RatMat& T) {
    int d = static_cast<int>(T.rows());
    RatVec v(d * d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) v(a * d + b) = T(a, b);
    return v;
}

RatMat unflatten_2tensor(const RatVec& v, int dim) {
    RatMat T(dim, dim);
    for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b) T(a, b) = v(a * dim + b);
    return T;
}

RatMat casimir_apply(const QuaternionStructure& Q, const RatMat& T) {
    int d = Q.dim();
    RatMat out = RatMat::Constant(d, d, Rational(0));
    // (C T)_{ab} = sum_i I_i(a,c) I_i(b,d) T_{cd}; use one-nonzero-per-row sparsity.
    for (int i = 0; i < 3; ++i)
        for (int a = 0; a < d; ++a) {
            auto [c, sa] = Q.row_support(i, a);
            for (int b = 0; b < d; ++b) {
                auto [dd, sb] = Q.row_support(i, b);
                if (sa * sb == 1)
                    out(a, b) += T(c, dd);
                else
                    out(a, b) -= T(c, dd);
            }
        }
    return out;
}

RatMat project_minus(const QuaternionStructure& Q, const RatMat& T) {
    return (T * Rational(3) - casimir_apply(Q, T)) / Rational(4);
}

RatMat project_three(const QuaternionStructure& Q, const RatMat& T) {
    return (T + casimir_apply(Q, T)) / Rational(4);
}

CasimirProjector casimir_projectors(const QuaternionStructure& Q) {
    int d = Q.dim();
    int N = d * d;
    CasimirProjector P;
    P.C = RatMat::Constant(N, N, Rational(0));
    for (int i = 0; i < 3; ++i)
        for (int a = 0; a < d; ++a) {
            auto [c, sa] = Q.row_support(i, a);
            for (int b = 0; b < d; ++b) {
                auto [dd, sb] = Q.row_support(i, b);
                P.C(a * d + b, c * d + dd) += Rational(sa * sb);
            }
        }
    RatMat id = RatMat::Identity(N, N);
    P.P_minus = (id * Rational(3) - P.C) / Rational(4);
    P.P_three = (id + P.C) / Rational(4);
    return P;
}

} // namespace qcylab
