#pragma once
#include <Eigen/Dense>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "config.hpp"

namespace g2forge {

using Mask = std::uint32_t;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using InnerProduct = Eigen::MatrixXd;

constexpr int kMaxDim = 7;

inline int popcount(Mask m) { return std::popcount(m); }

// sign of sorting the concatenation (a, b) of two disjoint index sets
inline int wedge_sign(Mask a, Mask b) {
    int inv = 0;
    while (b) {
        int j = std::countr_zero(b);
        b &= b - 1;
        inv += std::popcount(a >> (j + 1));
    }
    return (inv & 1) ? -1 : 1;
}

inline Mask full_mask(int n) { return (Mask(1) << n) - 1; }

// 1-based sorted indices
inline std::vector<int> indices_of(Mask m) {
    std::vector<int> out;
    while (m) {
        out.push_back(std::countr_zero(m) + 1);
        m &= m - 1;
    }
    return out;
}

inline Mask mask_of(const std::vector<int>& idx) {
    Mask m = 0;
    for (int i : idx) m |= Mask(1) << (i - 1);
    return m;
}

inline Vector unit_vector(int n, int i) {
    Vector v = Vector::Zero(n);
    v(i - 1) = 1.0;
    return v;
}

// Lexicographically ordered basis of Lambda^p R^n with a mask -> position table.
struct GradeBasis {
    int n = 0, p = 0;
    std::vector<Mask> masks;
    std::array<int, 1 << kMaxDim> pos{};
    int size() const { return static_cast<int>(masks.size()); }
};

inline const GradeBasis& grade_basis(int n, int p) {
    static std::array<std::array<GradeBasis, kMaxDim + 2>, kMaxDim + 1> cache;
    static std::once_flag once;
    std::call_once(once, [] {
        for (int nn = 0; nn <= kMaxDim; ++nn) {
            for (int pp = 0; pp <= nn + 1; ++pp) {
                GradeBasis& b = cache[nn][pp];
                b.n = nn;
                b.p = pp;
                b.pos.fill(-1);
                if (pp > nn) continue;
                std::vector<int> cur;
                auto rec = [&](auto&& self, int start) -> void {
                    if (static_cast<int>(cur.size()) == pp) {
                        b.pos[mask_of(cur)] = static_cast<int>(b.masks.size());
                        b.masks.push_back(mask_of(cur));
                        return;
                    }
                    for (int i = start; i <= nn; ++i) {
                        cur.push_back(i);
                        self(self, i + 1);
                        cur.pop_back();
                    }
                };
                rec(rec, 1);
            }
        }
    });
    if (n < 0 || n > kMaxDim || p < 0) throw DimensionError("grade_basis: dimension out of range");
    if (p > n) return cache[n][n + 1];
    return cache[n][p];
}

class Form {
public:
    Form() = default;
    Form(int n, int p) : n_(n), p_(p) {
        if (n < 0 || n > kMaxDim) throw DimensionError("form dimension must be in 0..7");
        if (p < 0) throw DimensionError("negative grade");
    }

    static Form scalar(int n, double c) {
        Form f(n, 0);
        f.add(0, c);
        return f;
    }
    static Form basis(int n, const std::vector<int>& idx, double c = 1.0) {
        for (std::size_t k = 0; k < idx.size(); ++k) {
            if (idx[k] < 1 || idx[k] > n) throw DimensionError("basis index out of range");
        }
        Form f(n, static_cast<int>(idx.size()));
        // unsorted input allowed: sign of the sorting permutation, zero on repeats
        int inv = 0;
        for (std::size_t i = 0; i < idx.size(); ++i)
            for (std::size_t j = i + 1; j < idx.size(); ++j) {
                if (idx[i] == idx[j]) return f;
                if (idx[i] > idx[j]) ++inv;
            }
        f.add(mask_of(idx), (inv & 1) ? -c : c);
        return f;
    }
    static Form from_vector(int n, int p, const Vector& v) {
        const GradeBasis& b = grade_basis(n, p);
        if (v.size() != b.size()) throw DimensionError("from_vector: size mismatch");
        Form f(n, p);
        for (int i = 0; i < b.size(); ++i)
            if (v(i) != 0.0) f.t_[b.masks[i]] = v(i);
        return f;
    }

    int dim() const { return n_; }
    int grade() const { return p_; }
    const std::map<Mask, double>& terms() const { return t_; }

    double coeff(Mask m) const {
        auto it = t_.find(m);
        return it == t_.end() ? 0.0 : it->second;
    }
    double coeff(const std::vector<int>& idx) const { return coeff(mask_of(idx)); }

    void add(Mask m, double c) {
        if (popcount(m) != p_) throw DimensionError("term grade mismatch");
        if (c == 0.0) return;
        double& slot = t_[m];
        slot += c;
        if (slot == 0.0) t_.erase(m);
    }

    Vector to_vector() const {
        const GradeBasis& b = grade_basis(n_, p_);
        Vector v = Vector::Zero(b.size());
        for (auto& [m, c] : t_) v(b.pos[m]) = c;
        return v;
    }

    double max_abs() const {
        double r = 0;
        for (auto& kv : t_) r = std::max(r, std::abs(kv.second));
        return r;
    }
    double norm2() const {
        double r = 0;
        for (auto& kv : t_) r += kv.second * kv.second;
        return r;
    }
    bool is_zero(double tol = tolerances().eps) const { return max_abs() <= tol; }

    Form pruned(double tol = tolerances().eps) const {
        Form f(n_, p_);
        for (auto& [m, c] : t_)
            if (std::abs(c) > tol) f.t_[m] = c;
        return f;
    }

    Form& operator+=(const Form& o) {
        check_same(o);
        for (auto& [m, c] : o.t_) add(m, c);
        return *this;
    }
    Form& operator-=(const Form& o) {
        check_same(o);
        for (auto& [m, c] : o.t_) add(m, -c);
        return *this;
    }
    Form& operator*=(double s) {
        if (s == 0.0) {
            t_.clear();
            return *this;
        }
        for (auto& kv : t_) kv.second *= s;
        return *this;
    }
    friend Form operator+(Form a, const Form& b) { return a += b; }
    friend Form operator-(Form a, const Form& b) { return a -= b; }
    friend Form operator*(Form a, double s) { return a *= s; }
    friend Form operator*(double s, Form a) { return a *= s; }
    friend Form operator/(Form a, double s) { return a *= 1.0 / s; }
    Form operator-() const { return Form(*this) *= -1.0; }

    // literal syntax: c*e{i,j,k} + ...
    std::string str(int precision = 12) const {
        if (t_.empty()) return "0";
        const GradeBasis& b = grade_basis(n_, p_);
        std::ostringstream os;
        os.precision(precision);
        bool first = true;
        for (Mask m : b.masks) {
            auto it = t_.find(m);
            if (it == t_.end()) continue;
            double c = it->second;
            if (!first) os << (c < 0 ? " - " : " + ");
            else if (c < 0) os << "-";
            first = false;
            double a = std::abs(c);
            if (p_ == 0) {
                os << a;
                continue;
            }
            if (a != 1.0) os << a << "*";
            os << "e{";
            auto idx = indices_of(m);
            for (std::size_t k = 0; k < idx.size(); ++k) os << (k ? "," : "") << idx[k];
            os << "}";
        }
        return os.str();
    }

private:
    void check_same(const Form& o) const {
        if (o.n_ != n_ || o.p_ != p_) throw DimensionError("form dimension/grade mismatch");
    }
    int n_ = 0, p_ = 0;
    std::map<Mask, double> t_;
};

inline Form wedge(const Form& a, const Form& b) {
    if (a.dim() != b.dim()) throw DimensionError("wedge: dimension mismatch");
    int n = a.dim();
    Form r(n, a.grade() + b.grade());
    if (a.grade() + b.grade() > n) return r;
    for (auto& [ma, ca] : a.terms())
        for (auto& [mb, cb] : b.terms()) {
            if (ma & mb) continue;
            r.add(ma | mb, wedge_sign(ma, mb) * ca * cb);
        }
    return r;
}

inline Form wedge(std::initializer_list<Form> fs) {
    auto it = fs.begin();
    Form r = *it++;
    for (; it != fs.end(); ++it) r = wedge(r, *it);
    return r;
}

// interior product i_X a
inline Form contract(const Vector& X, const Form& a) {
    if (X.size() != a.dim()) throw DimensionError("contract: dimension mismatch");
    if (a.grade() == 0) throw DimensionError("contract: grade-0 input");
    Form r(a.dim(), a.grade() - 1);
    for (auto& [m, c] : a.terms()) {
        int pos = 0;
        Mask rest = m;
        while (rest) {
            int i = std::countr_zero(rest);
            rest &= rest - 1;
            double xi = X(i);
            if (xi != 0.0) r.add(m & ~(Mask(1) << i), ((pos & 1) ? -1.0 : 1.0) * xi * c);
            ++pos;
        }
    }
    return r;
}

inline Form contract(int i, const Form& a) { return contract(unit_vector(a.dim(), i), a); }

inline bool is_positive_definite(const InnerProduct& g) {
    if (g.rows() != g.cols()) return false;
    if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, g.cwiseAbs().maxCoeff())) return false;
    Eigen::LLT<Matrix> llt(g);
    return llt.info() == Eigen::Success;
}

// Dense matrix of * : Lambda^p -> Lambda^{n-p}.
// alpha ^ *beta = <alpha, beta> vol, vol = o sqrt(det g) e^{1..n}
inline Matrix hodge_matrix(int n, int p, const InnerProduct& g, int orientation) {
    if (g.rows() != n || g.cols() != n) throw DimensionError("hodge: metric size mismatch");
    if (!is_positive_definite(g)) throw Error("hodge: metric is not positive-definite");
    if (orientation != 1 && orientation != -1) throw Error("orientation must be +1 or -1");
    const GradeBasis& bp = grade_basis(n, p);
    const GradeBasis& bq = grade_basis(n, n - p);
    Matrix ginv = g.inverse();
    double vol = orientation * std::sqrt(g.determinant());
    Matrix H = Matrix::Zero(bq.size(), bp.size());
    Mask full = full_mask(n);
    bool diag = (g - Matrix(g.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0;
    for (int a = 0; a < bp.size(); ++a) {
        Mask I = bp.masks[a];
        Mask Ic = full & ~I;
        double s = wedge_sign(I, Ic) * vol;
        auto ii = indices_of(I);
        for (int b = 0; b < bp.size(); ++b) {
            Mask K = bp.masks[b];
            double inner;
            if (diag) {
                if (K != I) continue;
                inner = 1.0;
                for (int i : ii) inner *= ginv(i - 1, i - 1);
            } else {
                auto kk = indices_of(K);
                if (p == 0) {
                    inner = 1.0;
                } else {
                    Matrix sub(p, p);
                    for (int r = 0; r < p; ++r)
                        for (int c = 0; c < p; ++c) sub(r, c) = ginv(ii[r] - 1, kk[c] - 1);
                    inner = sub.determinant();
                }
            }
            H(bq.pos[Ic], b) += s * inner;
        }
    }
    return H;
}

// identity metric, cached
inline const Matrix& hodge_matrix_identity(int n, int p, int orientation) {
    static std::map<std::tuple<int, int, int>, Matrix> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(n, p, orientation);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    return cache[key] = hodge_matrix(n, p, Matrix::Identity(n, n), orientation);
}

inline Form hodge(const Form& a, const InnerProduct& g, int orientation) {
    Matrix H = hodge_matrix(a.dim(), a.grade(), g, orientation);
    return Form::from_vector(a.dim(), a.dim() - a.grade(), H * a.to_vector());
}

inline Form hodge(const Form& a, int orientation = 1) {
    const Matrix& H = hodge_matrix_identity(a.dim(), a.grade(), orientation);
    return Form::from_vector(a.dim(), a.dim() - a.grade(), H * a.to_vector());
}

inline Form volume_form(int n, double c = 1.0) {
    Form f(n, n);
    f.add(full_mask(n), c);
    return f;
}

inline Form musical_flat(const Vector& X, const InnerProduct& g) {
    if (!is_positive_definite(g)) throw Error("musical_flat: metric is not positive-definite");
    return Form::from_vector(static_cast<int>(X.size()), 1, g * X);
}

inline Vector musical_sharp(const Form& a, const InnerProduct& g) {
    if (a.grade() != 1) throw DimensionError("musical_sharp: expects a 1-form");
    if (!is_positive_definite(g)) throw Error("musical_sharp: metric is not positive-definite");
    return g.ldlt().solve(a.to_vector());
}

// Hodge star inside a subspace W spanned by a g-orthonormal frame f_1..f_m (positively
// oriented by construction); beta must annihilate the g-orthogonal complement of W.
inline Form hodge_in_frame(const Form& beta, const std::vector<Vector>& frame, const InnerProduct& g) {
    int n = beta.dim();
    int m = static_cast<int>(frame.size());
    int p = beta.grade();
    // coefficients in the coframe theta^a = g(f_a, .)
    Form local(m, p);
    for (Mask M : grade_basis(m, p).masks) {
        auto idx = indices_of(M);
        Form x = beta;
        // beta(f_i1, ..., f_ip) = i_{f_ip} ... i_{f_i1} beta
        for (int k = 0; k < p; ++k) x = contract(frame[idx[k] - 1], x);
        local.add(M, x.coeff(0));
    }
    Form star_local = hodge(local, 1);
    std::vector<Form> theta;
    for (int a = 0; a < m; ++a) theta.push_back(Form::from_vector(n, 1, g * frame[a]));
    Form out(n, m - p);
    for (auto& [M, c] : star_local.terms()) {
        Form t = Form::scalar(n, c);
        for (int i : indices_of(M)) t = wedge(t, theta[i - 1]);
        out += t;
    }
    return out;
}

// Dense bilinear wedge Lambda^p x Lambda^q -> Lambda^{p+q} on coefficient vectors.
struct WedgeTable {
    struct Entry {
        int a, b, out;
        double sign;
    };
    int n = 0, p = 0, q = 0;
    std::vector<Entry> entries;

    Vector apply(const Vector& u, const Vector& v) const {
        Vector r = Vector::Zero(grade_basis(n, p + q).size());
        for (const Entry& e : entries) r(e.out) += e.sign * u(e.a) * v(e.b);
        return r;
    }
};

inline const WedgeTable& wedge_table(int n, int p, int q) {
    static std::map<std::tuple<int, int, int>, WedgeTable> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(n, p, q);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    WedgeTable t;
    t.n = n;
    t.p = p;
    t.q = q;
    if (p + q <= n) {
        const GradeBasis& bp = grade_basis(n, p);
        const GradeBasis& bq = grade_basis(n, q);
        const GradeBasis& br = grade_basis(n, p + q);
        for (int a = 0; a < bp.size(); ++a)
            for (int b = 0; b < bq.size(); ++b) {
                Mask ma = bp.masks[a], mb = bq.masks[b];
                if (ma & mb) continue;
                t.entries.push_back({a, b, br.pos[ma | mb], double(wedge_sign(ma, mb))});
            }
    }
    return cache[key] = t;
}

// (P^* a)(X_1..X_p) = a(P X_1, .., P X_p)
inline Form pullback(const Form& a, const Matrix& P) {
    int n = a.dim();
    if (P.rows() != n || P.cols() != n) throw DimensionError("pullback: matrix size mismatch");
    std::vector<Form> theta;
    for (int k = 0; k < n; ++k) theta.push_back(Form::from_vector(n, 1, P.row(k).transpose()));
    Form out(n, a.grade());
    for (auto& [m, c] : a.terms()) {
        Form t = Form::scalar(n, c);
        for (int k : indices_of(m)) t = wedge(t, theta[k - 1]);
        out += t;
    }
    return out;
}

}  // namespace g2forge
