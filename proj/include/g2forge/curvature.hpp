#pragma once
#include <Eigen/Eigenvalues>
#include <numeric>
#include <optional>
#include <vector>

#include "liealg.hpp"

namespace g2forge {

// Structure constants rewritten in a g-orthonormal frame f = e * P, P = L^{-T}, g = L L^T.
struct OrthonormalFrame {
    int n = 0;
    Matrix L;                // Cholesky factor of g
    Matrix P;                // columns: frame vectors in e-coordinates
    std::vector<double> Cf;  // [f_a, f_b] = sum_c Cf(a,b,c) f_c
    double C(int a, int b, int c) const { return Cf[(a * n + b) * n + c]; }
};

inline OrthonormalFrame orthonormal_frame(const LieAlgebra& alg, const InnerProduct& g) {
    int n = alg.dim();
    if (g.rows() != n || !is_positive_definite(g)) throw Error("metric is not positive-definite");
    OrthonormalFrame fr;
    fr.n = n;
    Eigen::LLT<Matrix> llt(g);
    fr.L = llt.matrixL();
    fr.P = fr.L.transpose().inverse();
    Matrix Pinv = fr.L.transpose();
    fr.Cf.assign(n * n * n, 0.0);
    // brackets of frame vectors, expressed back in the frame
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            Vector br = alg.bracket(fr.P.col(a), fr.P.col(b));
            Vector inf = Pinv * br;
            for (int c = 0; c < n; ++c) {
                fr.Cf[(a * n + b) * n + c] = inf(c);
                fr.Cf[(b * n + a) * n + c] = -inf(c);
            }
        }
    return fr;
}

struct Connection {
    int n = 0;
    std::vector<double> gamma;  // Gamma(i,j,k) = <nabla_{f_i} f_j, f_k>
    double operator()(int i, int j, int k) const { return gamma[(i * n + j) * n + k]; }
    // nabla_{f_i} as a matrix acting on frame coordinates: (k, j) entry
    Matrix nabla(int i) const {
        Matrix M(n, n);
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) M(k, j) = (*this)(i, j, k);
        return M;
    }
};

// Koszul: 2<nabla_X Y, Z> = <[X,Y],Z> - <[Y,Z],X> + <[Z,X],Y>
inline Connection levi_civita(const OrthonormalFrame& fr) {
    int n = fr.n;
    Connection c;
    c.n = n;
    c.gamma.assign(n * n * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                c.gamma[(i * n + j) * n + k] = 0.5 * (fr.C(i, j, k) - fr.C(j, k, i) + fr.C(k, i, j));
    return c;
}

inline Connection levi_civita(const LieAlgebra& alg, const InnerProduct& g) {
    return levi_civita(orthonormal_frame(alg, g));
}

// Rm(i,j,k,l) = <R(f_i,f_j) f_k, f_l>, R(X,Y) = [nabla_X, nabla_Y] - nabla_[X,Y]
struct RiemannTensor {
    int n = 0;
    std::vector<double> r;
    double operator()(int i, int j, int k, int l) const { return r[((i * n + j) * n + k) * n + l]; }
    double max_abs() const {
        double m = 0;
        for (double x : r) m = std::max(m, std::abs(x));
        return m;
    }
};

inline RiemannTensor riemann(const OrthonormalFrame& fr, const Connection& con) {
    int n = fr.n;
    std::vector<Matrix> nab(n);
    for (int i = 0; i < n; ++i) nab[i] = con.nabla(i);
    RiemannTensor R;
    R.n = n;
    R.r.assign(n * n * n * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Matrix op = nab[i] * nab[j] - nab[j] * nab[i];
            for (int k = 0; k < n; ++k)
                if (fr.C(i, j, k) != 0.0) op -= fr.C(i, j, k) * nab[k];
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) R.r[((i * n + j) * n + k) * n + l] = op(l, k);
        }
    return R;
}

// method A: contraction of the Riemann tensor, frame coordinates
inline Matrix ricci_from_riemann(const RiemannTensor& R) {
    int n = R.n;
    Matrix ric = Matrix::Zero(n, n);
    for (int y = 0; y < n; ++y)
        for (int z = 0; z < n; ++z) {
            double s = 0;
            for (int i = 0; i < n; ++i) s += R(i, y, z, i);
            ric(y, z) = s;
        }
    return ric;
}

// method B: Ric = M - B/2 - S(ad_H), frame coordinates
inline Matrix ricci_structure_formula(const OrthonormalFrame& fr) {
    int n = fr.n;
    std::vector<Matrix> ad(n, Matrix::Zero(n, n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) ad[i](k, j) = fr.C(i, j, k);
    Matrix M = Matrix::Zero(n, n), B(n, n);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            double s1 = 0, s2 = 0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    s1 += fr.C(x, i, j) * fr.C(y, i, j);
                    s2 += fr.C(i, j, x) * fr.C(i, j, y);
                }
            M(x, y) = -0.5 * s1 + 0.25 * s2;
            B(x, y) = (ad[x] * ad[y]).trace();
        }
    Matrix adH = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) adH += ad[i].trace() * ad[i];
    return M - 0.5 * B - 0.5 * (adH + adH.transpose());
}

struct CurvatureReport {
    Matrix ricci;    // in the e-basis: Ric(e_i, e_j)
    Matrix ricci_b;  // method B, e-basis
    double method_gap = 0.0;
    double scalar = 0.0;
    std::optional<double> einstein_lambda;
    double lambda = 0.0;  // scalar / n, always filled
    double einstein_residual = 0.0;
    double riemann_max = 0.0;
    bool flat = false;
};

inline CurvatureReport ricci(const LieAlgebra& alg, const InnerProduct& g) {
    OrthonormalFrame fr = orthonormal_frame(alg, g);
    Connection con = levi_civita(fr);
    RiemannTensor R = riemann(fr, con);
    Matrix ra = ricci_from_riemann(R);
    Matrix rb = ricci_structure_formula(fr);
    CurvatureReport rep;
    rep.ricci = fr.L * ra * fr.L.transpose();
    rep.ricci_b = fr.L * rb * fr.L.transpose();
    rep.method_gap = (rep.ricci - rep.ricci_b).cwiseAbs().maxCoeff();
    double scale = std::max(1.0, rep.ricci.cwiseAbs().maxCoeff());
    if (rep.method_gap > tolerances().ricci_agree * scale)
        throw InternalError("Ricci formulas disagree on " + alg.name() + " by " + std::to_string(rep.method_gap));
    int n = alg.dim();
    rep.scalar = (g.inverse() * rep.ricci).trace();
    rep.lambda = rep.scalar / n;
    rep.einstein_residual = (rep.ricci - rep.lambda * g).cwiseAbs().maxCoeff();
    if (rep.einstein_residual < tolerances().einstein) rep.einstein_lambda = rep.lambda;
    rep.riemann_max = R.max_abs();
    rep.flat = rep.riemann_max < tolerances().einstein;
    return rep;
}

inline CurvatureReport ricci(const LieAlgebra& alg) { return ricci(alg, alg.metric()); }

struct EinsteinResult {
    bool einstein = false;
    double lambda = 0.0;
    double residual = 0.0;
    double method_gap = 0.0;
};

inline EinsteinResult einstein_check(const LieAlgebra& alg, const InnerProduct& g) {
    CurvatureReport r = ricci(alg, g);
    return {r.einstein_residual < tolerances().einstein, r.lambda, r.einstein_residual, r.method_gap};
}
inline EinsteinResult einstein_check(const LieAlgebra& alg) { return einstein_check(alg, alg.metric()); }

struct FlatnessResult {
    bool flat = false;
    double max_riemann = 0.0;
};

inline FlatnessResult flatness_check(const LieAlgebra& alg, const InnerProduct& g) {
    OrthonormalFrame fr = orthonormal_frame(alg, g);
    RiemannTensor R = riemann(fr, levi_civita(fr));
    double m = R.max_abs();
    return {m < tolerances().einstein, m};
}
inline FlatnessResult flatness_check(const LieAlgebra& alg) { return flatness_check(alg, alg.metric()); }

struct SolitonCertificate {
    bool found = false;
    double lambda = 0.0;
    Matrix D;  // endomorphism, D e_j = sum_i D(i,j) e_i
    double residual = 0.0;
    double derivation_residual = 0.0;
};

// Ric = lambda I + D as endomorphisms (Ricci operator g^{-1} Ric), D a derivation
inline SolitonCertificate solvsoliton_solve(const LieAlgebra& alg, const InnerProduct& g) {
    int n = alg.dim();
    Matrix op = g.inverse() * ricci(alg, g).ricci;
    DerivationSpace ds = derivation_space(alg);
    int m = ds.dim();
    Matrix A(n * n, m + 1);
    Vector b(n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            int r = i * n + j;
            b(r) = op(i, j);
            A(r, 0) = (i == j) ? 1.0 : 0.0;
            for (int c = 0; c < m; ++c) A(r, c + 1) = ds.basis[c](i, j);
        }
    Vector x = A.completeOrthogonalDecomposition().solve(b);
    SolitonCertificate cert;
    cert.lambda = x(0);
    cert.D = Matrix::Zero(n, n);
    for (int c = 0; c < m; ++c) cert.D += x(c + 1) * ds.basis[c];
    cert.D = cert.D.unaryExpr([](double v) { return std::abs(v) < 1e-12 ? 0.0 : v; });
    cert.residual = (op - cert.lambda * Matrix::Identity(n, n) - cert.D).cwiseAbs().maxCoeff();
    cert.derivation_residual = derivation_residual(alg, cert.D);
    cert.found = cert.residual < tolerances().soliton && cert.derivation_residual < tolerances().eps * 10;
    return cert;
}
inline SolitonCertificate solvsoliton_solve(const LieAlgebra& alg) { return solvsoliton_solve(alg, alg.metric()); }

struct EigenvalueType {
    std::vector<long> k;  // strictly increasing, coprime
    std::vector<int> d;   // multiplicities
};

struct StandardDecomposition {
    Matrix n_basis;  // columns, e-coordinates
    Matrix a_basis;  // columns, g-orthogonal complement
    bool a_abelian = false;
    bool degenerate = false;  // n = 0
    Vector H;
    EigenvalueType eigenvalue_type;
};

namespace detail {
// orthonormal (euclidean) basis of the column space
inline Matrix column_space(const Matrix& M, double tol = 1e-9) {
    if (M.cols() == 0 || M.cwiseAbs().maxCoeff() < tol) return Matrix(M.rows(), 0);
    Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullU);
    const auto& sv = svd.singularValues();
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > tol * std::max(1.0, sv(0))) ++r;
    return svd.matrixU().leftCols(r);
}

inline Matrix bracket_span(const LieAlgebra& alg, const Matrix& A, const Matrix& B) {
    Matrix cols(alg.dim(), A.cols() * B.cols());
    int c = 0;
    for (int i = 0; i < A.cols(); ++i)
        for (int j = 0; j < B.cols(); ++j) cols.col(c++) = alg.bracket(A.col(i), B.col(j));
    return column_space(cols);
}
}  // namespace detail

inline bool is_solvable(const LieAlgebra& alg) {
    Matrix cur = Matrix::Identity(alg.dim(), alg.dim());
    for (int step = 0; step <= alg.dim(); ++step) {
        if (cur.cols() == 0) return true;
        Matrix next = detail::bracket_span(alg, cur, cur);
        if (next.cols() == cur.cols()) return false;
        cur = next;
    }
    return cur.cols() == 0;
}

inline EigenvalueType eigenvalue_type_from(const std::vector<double>& ev, int max_den = 100) {
    if (ev.empty()) return {};
    double lo = *std::min_element(ev.begin(), ev.end());
    if (lo <= 1e-9) throw Error("eigenvalue type: non-positive ad_H spectrum");
    std::vector<double> r;
    for (double x : ev) r.push_back(x / lo);
    int q = 0;
    for (int den = 1; den <= max_den; ++den) {
        bool ok = true;
        for (double x : r)
            if (std::abs(den * x - std::round(den * x)) > 1e-6 * den) ok = false;
        if (ok) {
            q = den;
            break;
        }
    }
    if (q == 0) throw Error("eigenvalue type: spectrum is not rational with denominator <= " + std::to_string(max_den));
    std::vector<long> ints;
    for (double x : r) ints.push_back(std::lround(q * x));
    long g = 0;
    for (long v : ints) g = std::gcd(g, v);
    std::map<long, int> mult;
    for (long v : ints) mult[v / g]++;
    EigenvalueType t;
    for (auto& [k, d] : mult) {
        t.k.push_back(k);
        t.d.push_back(d);
    }
    return t;
}

inline StandardDecomposition standard_decomposition(const LieAlgebra& alg, const InnerProduct& g) {
    if (!is_solvable(alg)) throw Error(alg.name() + " is not solvable");
    int n = alg.dim();
    StandardDecomposition sd;
    Matrix I = Matrix::Identity(n, n);
    sd.n_basis = detail::bracket_span(alg, I, I);
    if (sd.n_basis.cols() == 0) {
        sd.degenerate = true;
        sd.a_basis = I;
        sd.a_abelian = true;
        sd.H = Vector::Zero(n);
        return sd;
    }
    sd.a_basis = nullspace(sd.n_basis.transpose() * g).basis;
    sd.a_abelian = detail::bracket_span(alg, sd.a_basis, sd.a_basis).cols() == 0;
    int k = static_cast<int>(sd.a_basis.cols());
    Matrix Gaa = sd.a_basis.transpose() * g * sd.a_basis;
    Vector tr(k);
    for (int b = 0; b < k; ++b) tr(b) = alg.ad(Vector(sd.a_basis.col(b))).trace();
    Vector h = Gaa.ldlt().solve(tr);
    sd.H = sd.a_basis * h;
    // ad_H restricted to n (n is an ideal)
    Matrix adH = alg.ad(sd.H);
    Matrix restricted = sd.n_basis.transpose() * adH * sd.n_basis;
    Eigen::EigenSolver<Matrix> es(restricted);
    std::vector<double> ev;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        auto z = es.eigenvalues()(i);
        if (std::abs(z.imag()) > 1e-7) throw Error("eigenvalue type: non-real ad_H spectrum");
        ev.push_back(z.real());
    }
    sd.eigenvalue_type = eigenvalue_type_from(ev);
    return sd;
}
inline StandardDecomposition standard_decomposition(const LieAlgebra& alg) {
    return standard_decomposition(alg, alg.metric());
}

}  // namespace g2forge
