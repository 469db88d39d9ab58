#pragma once
#include <gtest/gtest.h>

#include <random>

#include "g2forge/g2forge.hpp"

namespace g2forge::testing {

inline Form random_form(std::mt19937_64& rng, int n, int p) {
    std::normal_distribution<double> nd;
    Vector v(grade_basis(n, p).size());
    for (int i = 0; i < v.size(); ++i) v(i) = nd(rng);
    return Form::from_vector(n, p, v);
}

inline Matrix random_matrix(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> nd;
    Matrix M(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) M(i, j) = nd(rng);
    return M;
}

inline Matrix random_spd(std::mt19937_64& rng, int n) {
    Matrix P = random_matrix(rng, n);
    return P * P.transpose() / n + Matrix::Identity(n, n);
}

// well-conditioned element of GL(n), det > 0
inline Matrix random_gl(std::mt19937_64& rng, int n, double spread = 0.4) {
    Matrix P = Matrix::Identity(n, n) + spread * random_matrix(rng, n) / std::sqrt(double(n));
    if (P.determinant() < 0) P.col(0) *= -1.0;
    return P;
}

inline Matrix random_rotation(std::mt19937_64& rng, int n) {
    Eigen::HouseholderQR<Matrix> qr(random_matrix(rng, n));
    Matrix Q = qr.householderQ();
    if (Q.determinant() < 0) Q.col(0) *= -1.0;
    return Q;
}

// positive G2 form P^* phi0
inline Form random_g2_form(std::mt19937_64& rng) { return pullback(phi0(), random_gl(rng, 7)); }

inline std::vector<LieAlgebra> catalog_algebras(int dim = 0) {
    std::vector<LieAlgebra> out;
    for (auto& e : default_catalog().entries())
        if (dim == 0 || e.dim == dim) out.push_back(instantiate(e));
    return out;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace g2forge::testing
