#pragma once
#include <string>
#include <vector>

#include "exterior.hpp"
#include "linalg.hpp"

namespace g2forge {

// Lie algebra given by de^k; brackets follow d alpha(X,Y) = -alpha([X,Y]).
class LieAlgebra {
public:
    LieAlgebra() = default;
    LieAlgebra(std::string name, std::vector<Form> de, Matrix metric = Matrix())
        : name_(std::move(name)), de_(std::move(de)) {
        n_ = static_cast<int>(de_.size());
        if (n_ < 1 || n_ > kMaxDim) throw DimensionError("Lie algebra dimension must be in 1..7");
        for (const Form& f : de_)
            if (f.dim() != n_ || f.grade() != 2) throw DimensionError("each de^k must be a 2-form in dimension n");
        metric_ = metric.size() == 0 ? Matrix::Identity(n_, n_) : metric;
        if (metric_.rows() != n_ || metric_.cols() != n_) throw DimensionError("metric size mismatch");
        C_.assign(n_ * n_ * n_, 0.0);
        for (int k = 0; k < n_; ++k)
            for (auto& [m, c] : de_[k].terms()) {
                auto ij = indices_of(m);
                int i = ij[0] - 1, j = ij[1] - 1;
                C_[idx(i, j, k)] -= c;
                C_[idx(j, i, k)] += c;
            }
        ad_.assign(n_, Matrix::Zero(n_, n_));
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j)
                for (int k = 0; k < n_; ++k) ad_[i](k, j) = C(i, j, k);
        build_dmats();
    }

    static LieAlgebra abelian(int n, std::string name = "") {
        std::vector<Form> de(n, Form(n, 2));
        return LieAlgebra(name.empty() ? "abelian" + std::to_string(n) : name, de);
    }

    const std::string& name() const { return name_; }
    int dim() const { return n_; }
    const std::vector<Form>& differentials() const { return de_; }
    const Matrix& metric() const { return metric_; }
    LieAlgebra with_metric(const Matrix& g) const { return LieAlgebra(name_, de_, g); }

    // [e_i, e_j] = sum_k C(i,j,k) e_k, zero-based
    double C(int i, int j, int k) const { return C_[idx(i, j, k)]; }
    // ad(i)(k, j) = C(i, j, k)
    const Matrix& ad(int i) const { return ad_[i]; }
    Matrix ad(const Vector& X) const {
        Matrix r = Matrix::Zero(n_, n_);
        for (int i = 0; i < n_; ++i)
            if (X(i) != 0.0) r += X(i) * ad_[i];
        return r;
    }

    Vector bracket(const Vector& X, const Vector& Y) const {
        if (X.size() != n_ || Y.size() != n_) throw DimensionError("bracket: dimension mismatch");
        Vector r = Vector::Zero(n_);
        for (int i = 0; i < n_; ++i) {
            if (X(i) == 0.0) continue;
            r += X(i) * (ad_[i] * Y);
        }
        return r;
    }

    // Chevalley-Eilenberg differential Lambda^p -> Lambda^{p+1}
    const Matrix& dmat(int p) const {
        if (p < 0 || p > n_) throw DimensionError("dmat: grade out of range");
        return dmats_[p];
    }
    Form d(const Form& a) const {
        if (a.dim() != n_) throw DimensionError("d: dimension mismatch");
        if (a.grade() > n_) throw DimensionError("d: grade exceeds dimension");
        return Form::from_vector(n_, a.grade() + 1, dmats_[a.grade()] * a.to_vector());
    }

private:
    int idx(int i, int j, int k) const { return (i * n_ + j) * n_ + k; }

    void build_dmats() {
        dmats_.resize(n_ + 1);
        for (int p = 0; p <= n_; ++p) {
            const GradeBasis& src = grade_basis(n_, p);
            const GradeBasis& dst = grade_basis(n_, p + 1);
            Matrix M = Matrix::Zero(dst.size(), src.size());
            if (p < n_) {
                for (int c = 0; c < src.size(); ++c) {
                    auto ii = indices_of(src.masks[c]);
                    Form acc(n_, p + 1);
                    for (int k = 0; k < p; ++k) {
                        Form left = Form::scalar(n_, (k & 1) ? -1.0 : 1.0);
                        for (int t = 0; t < k; ++t) left = wedge(left, Form::basis(n_, {ii[t]}));
                        Form term = wedge(left, de_[ii[k] - 1]);
                        for (int t = k + 1; t < p; ++t) term = wedge(term, Form::basis(n_, {ii[t]}));
                        acc += term;
                    }
                    for (auto& [m, v] : acc.terms()) M(dst.pos[m], c) = v;
                }
            }
            dmats_[p] = M;
        }
    }

    std::string name_;
    int n_ = 0;
    std::vector<Form> de_;
    Matrix metric_;
    std::vector<double> C_;
    std::vector<Matrix> ad_;
    std::vector<Matrix> dmats_;
};

struct JacobiResult {
    bool pass = false;
    double residual = 0.0;
};

inline JacobiResult jacobi_check(const LieAlgebra& g, double tol = tolerances().eps) {
    JacobiResult r;
    for (const Form& f : g.differentials()) r.residual = std::max(r.residual, g.d(f).max_abs());
    r.pass = r.residual < tol;
    return r;
}

struct FormSpace {
    int n = 0, p = 0;
    Matrix basis;  // columns are coefficient vectors in the grade basis
    int dim() const { return static_cast<int>(basis.cols()); }
    Form form(int i) const { return Form::from_vector(n, p, basis.col(i)); }
    std::vector<Form> forms() const {
        std::vector<Form> out;
        for (int i = 0; i < dim(); ++i) out.push_back(form(i));
        return out;
    }
    Form combine(const Vector& rho) const { return Form::from_vector(n, p, basis * rho); }
};

inline FormSpace closed_forms(const LieAlgebra& g, int p) {
    FormSpace s;
    s.n = g.dim();
    s.p = p;
    s.basis = nullspace(g.dmat(p)).basis;
    return s;
}

// {a : d(*_g a) = 0}
inline FormSpace coclosed_forms(const LieAlgebra& g, int p, const InnerProduct& metric, int orientation = 1) {
    int n = g.dim();
    Matrix H = hodge_matrix(n, p, metric, orientation);
    FormSpace s;
    s.n = n;
    s.p = p;
    s.basis = nullspace(g.dmat(n - p) * H).basis;
    return s;
}

inline FormSpace coclosed_forms(const LieAlgebra& g, int p) { return coclosed_forms(g, p, g.metric(), 1); }

struct DerivationSpace {
    std::vector<Matrix> basis;
    int dim() const { return static_cast<int>(basis.size()); }
};

// D[X,Y] = [DX,Y] + [X,DY]; D e_j = sum_i D(i,j) e_i
inline Matrix derivation_system(const LieAlgebra& g) {
    int n = g.dim();
    int pairs = n * (n - 1) / 2;
    Matrix A = Matrix::Zero(std::max(1, pairs * n), n * n);
    int row = 0;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            for (int k = 0; k < n; ++k, ++row) {
                for (int m = 0; m < n; ++m) A(row, k * n + m) += g.C(a, b, m);
                for (int i = 0; i < n; ++i) {
                    A(row, i * n + a) -= g.C(i, b, k);
                    A(row, i * n + b) -= g.C(a, i, k);
                }
            }
    return A;
}

inline DerivationSpace derivation_space(const LieAlgebra& g) {
    int n = g.dim();
    Matrix A = derivation_system(g);
    Matrix N = nullspace(A).basis;
    DerivationSpace ds;
    for (int c = 0; c < N.cols(); ++c) {
        Matrix D(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) D(i, j) = N(i * n + j, c);
        ds.basis.push_back(D);
    }
    return ds;
}

inline double derivation_residual(const LieAlgebra& g, const Matrix& D) {
    int n = g.dim();
    Vector v(n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) v(i * n + j) = D(i, j);
    return (derivation_system(g) * v).cwiseAbs().maxCoeff();
}

}  // namespace g2forge
