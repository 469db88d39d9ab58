#pragma once
#include <random>
#include <string>
#include <vector>

#include "curvature.hpp"
#include "g2.hpp"

namespace g2forge {

struct SU3Data {
    Form F, psi_plus, psi_minus;
    Matrix frame;    // columns: g-orthonormal basis of the complement of A, positively oriented
    Matrix h6;       // restriction of g in that frame
    Matrix ambient;  // metric of the surrounding space
    Vector A;        // unit normal (empty for a bare 6-dimensional model)

    std::vector<Vector> frame_vectors() const {
        std::vector<Vector> v;
        for (int i = 0; i < frame.cols(); ++i) v.push_back(frame.col(i));
        return v;
    }
};

struct SU3Check {
    bool pass = false;
    double F_cubed = 0.0;     // max |F^3|
    double F_wedge_psi = 0.0; // max |F ^ psi_plus|
};

// alpha^3 != 0 and alpha ^ beta = 0
inline SU3Check su3_necessary_checks(const Form& F, const Form& psi_plus) {
    SU3Check c;
    c.F_cubed = wedge({F, F, F}).max_abs();
    c.F_wedge_psi = wedge(F, psi_plus).max_abs();
    c.pass = c.F_cubed > tolerances().eps && c.F_wedge_psi < tolerances().eps;
    return c;
}

namespace detail {
// g-orthonormal basis of the g-orthogonal complement of span(V) inside span(W) (columns)
inline Matrix orthonormal_complement(const Matrix& W, const Matrix& V, const Matrix& g) {
    Matrix cons = V.transpose() * g * W;
    Matrix coeffs = cons.rows() ? nullspace(cons).basis : Matrix::Identity(W.cols(), W.cols());
    Matrix B = W * coeffs;
    // Gram-Schmidt in g
    for (int i = 0; i < B.cols(); ++i) {
        for (int j = 0; j < i; ++j) B.col(i) -= (B.col(j).dot(g * B.col(i))) * B.col(j);
        B.col(i) /= std::sqrt(B.col(i).dot(g * B.col(i)));
    }
    return B;
}

// value of a top-degree-in-the-frame form on the frame vectors
inline double evaluate_on(const Form& w, const Matrix& frame) {
    Form x = w;
    for (int k = 0; k < frame.cols(); ++k) x = contract(Vector(frame.col(k)), x);
    return x.coeff(0);
}

inline double su3_residual(const SU3Data& s) {
    Form F3 = wedge({s.F, s.F, s.F});
    double a = wedge(s.F, s.psi_plus).max_abs();
    double b = (wedge(s.psi_plus, s.psi_minus) - F3 * (2.0 / 3.0)).max_abs();
    return std::max(a, b);
}
}  // namespace detail

// F = i_A phi, psi+ = phi - F ^ A^flat, psi- = *_6 psi+ with the induced orientation i_A vol
inline SU3Data su3_from_g2(const G2Structure& s, const Vector& A_in) {
    const Matrix& g = s.metric;
    double gAA = A_in.dot(g * A_in);
    if (gAA <= tolerances().eps) throw Error("su3_from_g2: g(A,A) must be positive");
    SU3Data d;
    d.ambient = g;
    d.A = A_in / std::sqrt(gAA);
    d.F = contract(d.A, s.phi);
    Form Aflat = musical_flat(d.A, g);
    d.psi_plus = s.phi - wedge(d.F, Aflat);
    d.frame = detail::orthonormal_complement(Matrix::Identity(7, 7), d.A, g);
    Matrix M(7, 7);
    M.col(0) = d.A;
    M.rightCols(6) = d.frame;
    if (s.orientation * M.determinant() < 0) d.frame.col(0) *= -1.0;
    d.h6 = d.frame.transpose() * g * d.frame;
    d.psi_minus = hodge_in_frame(d.psi_plus, d.frame_vectors(), g);
    double res = detail::su3_residual(d);
    if (res > 1e-8 * std::max(1.0, s.phi.max_abs() * s.phi.max_abs()))
        throw InternalError("su3_from_g2: SU(3) invariants fail by " + std::to_string(res));
    if (wedge({d.F, d.F, d.F}).is_zero()) throw InternalError("su3_from_g2: F^3 vanishes");
    return d;
}

// the standard model on R^6 with the identity metric
inline SU3Data su3_flat_model() {
    SU3Data d;
    d.F = parse_form("e12 + e34 + e56", 6, 2);
    d.psi_plus = parse_form("e135 - e146 - e236 - e245", 6, 3);
    d.psi_minus = parse_form("e136 + e145 + e235 - e246", 6, 3);
    d.frame = Matrix::Identity(6, 6);
    d.h6 = Matrix::Identity(6, 6);
    d.ambient = Matrix::Identity(6, 6);
    return d;
}

struct SU2Data {
    Form eta, omega1, omega2, omega3, v;
    Matrix frame;  // g-orthonormal basis of n = complement of e6 in the SU(3) frame
    Matrix h5;
    Matrix ambient;
};

inline double su2_invariant_residual(const SU2Data& s) {
    const Form* w[3] = {&s.omega1, &s.omega2, &s.omega3};
    double r = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
            Form p = wedge(*w[i], *w[j]);
            if (i == j) p -= s.v;
            r = std::max(r, p.max_abs());
        }
    return r;
}

// eta = -i_{e6} F, omega1 = F - eta ^ e6^flat, omega2 = i_{e6} psi-, omega3 = -i_{e6} psi+
inline SU2Data su2_from_su3(const SU3Data& su3, const Vector& e6_in) {
    const Matrix& g = su3.ambient;
    int n = static_cast<int>(g.rows());
    if (e6_in.size() != n) throw DimensionError("su2_from_su3: vector dimension mismatch");
    Vector coeffs = su3.frame.transpose() * g * e6_in;
    if ((su3.frame * coeffs - e6_in).cwiseAbs().maxCoeff() > 1e-9) throw Error("su2_from_su3: e6 is not in the SU(3) frame span");
    double nrm = std::sqrt(e6_in.dot(g * e6_in));
    if (std::abs(nrm - 1.0) > 1e-9) throw Error("su2_from_su3: e6 must be a unit vector");
    Vector e6 = e6_in;
    SU2Data d;
    d.ambient = g;
    d.eta = -contract(e6, su3.F);
    d.omega1 = su3.F - wedge(d.eta, musical_flat(e6, g));
    d.omega2 = contract(e6, su3.psi_minus);
    d.omega3 = -contract(e6, su3.psi_plus);
    d.v = wedge(d.omega1, d.omega1);
    d.frame = detail::orthonormal_complement(su3.frame, e6, g);
    d.h5 = d.frame.transpose() * g * d.frame;
    double res = su2_invariant_residual(d);
    if (res > 1e-8) throw Error("su2_from_su3: SU(2) invariants fail by " + std::to_string(res));
    if (wedge(d.v, d.eta).is_zero()) throw Error("su2_from_su3: v ^ eta vanishes");
    return d;
}

struct SU2Obstruction {
    bool obstructed = false;
    std::vector<std::string> failed;  // "omega-squares", "hodge-duality", "volume", "positivity"
    double squares_residual = 0.0;
    double hodge_residual = 0.0;
    double min_positivity = 0.0;  // min of omega2(X,Y) over the samples
    int samples = 0;
};

inline SU2Obstruction su2_obstruction(const SU2Data& s, int samples = 100, std::uint64_t seed = 1) {
    SU2Obstruction r;
    const Form* w[3] = {&s.omega1, &s.omega2, &s.omega3};
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            r.squares_residual = std::max(
                r.squares_residual, wedge(wedge(*w[i], *w[i]) - wedge(*w[j], *w[j]), s.eta).max_abs());
    if (r.squares_residual > tolerances().eps) r.failed.push_back("omega-squares");

    Form top = wedge({s.omega1, s.omega1, s.eta});
    double orient = detail::evaluate_on(top, s.frame);
    if (std::abs(orient) <= tolerances().eps) r.failed.push_back("volume");
    Matrix frame = s.frame;
    if (orient < 0) frame.col(0) *= -1.0;
    std::vector<Vector> fv;
    for (int i = 0; i < frame.cols(); ++i) fv.push_back(frame.col(i));
    for (int i = 0; i < 3; ++i)
        r.hodge_residual =
            std::max(r.hodge_residual, (wedge(*w[i], s.eta) - hodge_in_frame(*w[i], fv, s.ambient)).max_abs());
    if (r.hodge_residual > tolerances().eps) r.failed.push_back("hodge-duality");

    // i_X omega3 = i_Y omega1 on n implies omega2(X,Y) >= 0, sampled
    int m = static_cast<int>(frame.cols());
    auto twoform = [&](const Form& a) {
        Matrix M(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                M(i, j) = contract(Vector(frame.col(j)), contract(Vector(frame.col(i)), a)).coeff(0);
        return M;
    };
    Matrix W1 = twoform(s.omega1), W2 = twoform(s.omega2), W3 = twoform(s.omega3);
    // (i_X w)(f_k) = sum_i X_i W(i,k): unknowns (X, Y) in frame coordinates
    Matrix L(m, 2 * m);
    L.leftCols(m) = W3.transpose();
    L.rightCols(m) = -W1.transpose();
    Matrix S = nullspace(L).basis;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    r.min_positivity = std::numeric_limits<double>::infinity();
    for (int k = 0; k < samples && S.cols() > 0; ++k) {
        Vector c(S.cols());
        for (int i = 0; i < c.size(); ++i) c(i) = nd(rng);
        Vector xy = S * c;
        xy /= xy.norm();
        double val = xy.head(m).dot(W2 * xy.tail(m));
        r.min_positivity = std::min(r.min_positivity, val);
        ++r.samples;
    }
    if (r.samples == 0) r.min_positivity = 0.0;
    if (r.min_positivity < -tolerances().eps) r.failed.push_back("positivity");
    r.obstructed = !r.failed.empty();
    return r;
}

struct NijenhuisTensor {
    int n = 0;
    std::vector<std::pair<std::pair<int, int>, Vector>> values;  // (i, j) one-based, i < j
    double max_abs = 0.0;
    Vector at(int i, int j) const {
        for (auto& [k, v] : values)
            if (k.first == i && k.second == j) return v;
        if (i > j) return -at(j, i);
        return Vector::Zero(n);
    }
};

inline void check_complex_structure(const Matrix& J) {
    int n = static_cast<int>(J.rows());
    if (J.cols() != n || (J * J + Matrix::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-9)
        throw Error("J^2 != -I");
}

inline Vector nijenhuis_value(const LieAlgebra& alg, const Matrix& J, const Vector& X, const Vector& Y) {
    Vector JX = J * X, JY = J * Y;
    return alg.bracket(JX, JY) - J * alg.bracket(JX, Y) - J * alg.bracket(X, JY) - alg.bracket(X, Y);
}

// N(X,Y) = [JX,JY] - J[JX,Y] - J[X,JY] - [X,Y]
inline NijenhuisTensor nijenhuis(const LieAlgebra& alg, const Matrix& J) {
    check_complex_structure(J);
    int n = alg.dim();
    NijenhuisTensor N;
    N.n = n;
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) {
            Vector v = nijenhuis_value(alg, J, unit_vector(n, i), unit_vector(n, j));
            v = v.unaryExpr([](double x) { return std::abs(x) < 1e-14 ? 0.0 : x; });
            N.max_abs = std::max(N.max_abs, v.cwiseAbs().maxCoeff());
            N.values.push_back({{i, j}, v});
        }
    return N;
}

struct AlmostHermitian {
    Matrix J;  // J e_j = sum_i J(i,j) e_i
    Form F;
    InnerProduct g;
};

// F(e_i, e_k) as a matrix
inline Matrix two_form_matrix(const Form& F) {
    int n = F.dim();
    Matrix M = Matrix::Zero(n, n);
    for (auto& [m, c] : F.terms()) {
        auto ij = indices_of(m);
        M(ij[0] - 1, ij[1] - 1) += c;
        M(ij[1] - 1, ij[0] - 1) -= c;
    }
    return M;
}

struct KahlerReport {
    bool symplectic = false, compatible = false, integrable = false, einstein = false;
    double dF = 0.0;
    double top_power = 0.0;       // |F^{n/2}|
    double compat_residual = 0.0; // max |g - F(., J.)|
    double nijenhuis_max = 0.0;
    double einstein_residual = 0.0;
    double lambda = 0.0;
};

inline KahlerReport kahler_check(const LieAlgebra& alg, const AlmostHermitian& ah) {
    check_complex_structure(ah.J);
    KahlerReport r;
    int n = alg.dim();
    r.dF = alg.d(ah.F).max_abs();
    Form p = Form::scalar(n, 1.0);
    for (int k = 0; k < n / 2; ++k) p = wedge(p, ah.F);
    r.top_power = p.max_abs();
    r.symplectic = r.dF < tolerances().eps && r.top_power > tolerances().eps;
    Matrix FJ = two_form_matrix(ah.F) * ah.J;
    r.compat_residual = (ah.g - FJ).cwiseAbs().maxCoeff();
    r.compatible = r.compat_residual < tolerances().eps && is_positive_definite(ah.g);
    r.nijenhuis_max = nijenhuis(alg, ah.J).max_abs;
    r.integrable = r.nijenhuis_max < tolerances().eps;
    EinsteinResult e = einstein_check(alg, ah.g);
    r.einstein = e.einstein;
    r.einstein_residual = e.residual;
    r.lambda = e.lambda;
    return r;
}

// no symplectic form: F^{n/2} vanishes identically on Z^2 (n = 6: exact cubic tensor test)
inline ObstructionResult no_symplectic_test(const LieAlgebra& alg) {
    if (alg.dim() != 6) throw DimensionError("no_symplectic_test is implemented for 6-dimensional algebras");
    FormSpace Z = closed_forms(alg, 2);
    std::vector<Vector> alphas;
    for (int a = 0; a < Z.dim(); ++a) alphas.push_back(Z.basis.col(a));
    return cubic_vanishing_test(alphas, 6);
}

}  // namespace g2forge
