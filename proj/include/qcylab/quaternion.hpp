#pragma once

#include "qcylab/rational.hpp"

#include <array>

namespace qcylab {

/// The three almost complex structures I1, I2, I3 on R^{4n}, realized
/// block-diagonally as left multiplication by i, j, k on each quaternion
/// coordinate block, together with the Levi-Civita symbol on three indices.
/// Entries are integers in {-1, 0, 1}; the frame convention is
/// I_i e_{4k+1} = e_{4k+i+1}.
struct QuaternionStructure {
    int n = 0;
    std::array<RatMat, 3> I;
    std::array<Eigen::MatrixXi, 3> Iint;  // same matrices, plain int entries

    int dim() const { return 4 * n; }

    /// Entry (a, b) of I_i as an int, i in {0,1,2}.
    int ii(int i, int a, int b) const { return Iint[static_cast<std::size_t>(i)](a, b); }

    /// For column b of I_i, the unique row a with nonzero entry, and its sign.
    std::pair<int, int> column_support(int i, int b) const {
        int blk = b / 4, off = b % 4;
        int a = 4 * blk + col_row_[static_cast<std::size_t>(i)][static_cast<std::size_t>(off)];
        return {a, col_sign_[static_cast<std::size_t>(i)][static_cast<std::size_t>(off)]};
    }
    /// For row a of I_i, the unique column b with nonzero entry, and its sign.
    std::pair<int, int> row_support(int i, int a) const {
        int blk = a / 4, off = a % 4;
        return {4 * blk + row_col_[static_cast<std::size_t>(i)][static_cast<std::size_t>(off)],
                row_sign_[static_cast<std::size_t>(i)][static_cast<std::size_t>(off)]};
    }

    static int eps(int i, int j, int k);  // Levi-Civita, indices 0..2, eps(0,1,2) = +1

    std::array<std::array<int, 4>, 3> col_row_, col_sign_, row_col_, row_sign_;
};

QuaternionStructure build_structure(int n);

/// Casimir operator C = sum_i I_i (x) I_i on 2-tensors over R^{4n}, as a
/// 16n^2 x 16n^2 rational matrix (tensor index (a,b) flattened to a*4n+b),
/// with its eigenprojections P_{-1} = (3 Id - C)/4 and P_3 = (Id + C)/4.
struct CasimirProjector {
    RatMat C;
    RatMat P_minus;
    RatMat P_three;
};

CasimirProjector casimir_projectors(const QuaternionStructure& Q);

/// C applied directly to a 2-tensor: (C T)_{ab} = sum_i I_i(a,c) I_i(b,d) T_{cd}.
RatMat casimir_apply(const QuaternionStructure& Q, const RatMat& T);

/// P_{-1} and P_3 applied to a 2-tensor without forming the big matrix.
RatMat project_minus(const QuaternionStructure& Q, const RatMat& T);
RatMat project_three(const QuaternionStructure& Q, const RatMat& T);

/// Flatten / unflatten between 2-tensors and 16n^2 vectors.
RatVec flatten_2tensor(const RatMat& T);
RatMat unflatten_2tensor(const RatVec& v, int dim);

} // namespace qcylab
