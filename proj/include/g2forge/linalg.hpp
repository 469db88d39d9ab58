#pragma once
#include <Eigen/Dense>
#include <Eigen/SVD>

#include "config.hpp"
#include "exterior.hpp"

namespace g2forge {

struct NullspaceResult {
    Matrix basis;  // columns: orthonormal basis of the kernel
    int rank = 0;
    double gap = 0.0;  // smallest retained singular value (relative)
};

// Kernel of M by full SVD; singular values below tol * max(1, s_max) count as zero.
inline NullspaceResult nullspace(const Matrix& M, double tol = tolerances().eps) {
    NullspaceResult r;
    const Eigen::Index cols = M.cols();
    if (M.rows() == 0 || M.cwiseAbs().maxCoeff() == 0.0) {
        r.basis = Matrix::Identity(cols, cols);
        r.rank = 0;
        return r;
    }
    Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    double scale = std::max(1.0, sv(0));
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > tol * scale) ++rank;
    r.rank = rank;
    r.gap = rank > 0 ? sv(rank - 1) / scale : 0.0;
    r.basis = svd.matrixV().rightCols(cols - rank);
    return r;
}

inline int matrix_rank(const Matrix& M, double tol = tolerances().eps) { return nullspace(M, tol).rank; }

}  // namespace g2forge
