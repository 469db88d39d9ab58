#pragma once
#include <array>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "expr.hpp"
#include "liealg.hpp"
#include "optimize.hpp"

namespace g2forge {

// Btilde_ij = coefficient of e^{1..7} in (1/6) i_{e_i}phi ^ i_{e_j}phi ^ phi, as a cubic
// in the 35 coefficients of phi.
struct BtildeTable {
    struct Entry {
        int i, j, A, B, C;
        double coef;
    };
    std::vector<Entry> entries;

    Matrix eval(const Vector& phi) const {
        Matrix M = Matrix::Zero(7, 7);
        for (const Entry& e : entries) M(e.i, e.j) += e.coef * phi(e.A) * phi(e.B) * phi(e.C);
        return M;
    }
    // rows i*7+j, columns the 35 coefficients
    Matrix jacobian(const Vector& phi) const {
        Matrix Jm = Matrix::Zero(49, 35);
        for (const Entry& e : entries) {
            int r = e.i * 7 + e.j;
            Jm(r, e.A) += e.coef * phi(e.B) * phi(e.C);
            Jm(r, e.B) += e.coef * phi(e.A) * phi(e.C);
            Jm(r, e.C) += e.coef * phi(e.A) * phi(e.B);
        }
        return Jm;
    }
};

inline const BtildeTable& btilde_table() {
    static const BtildeTable table = [] {
        BtildeTable t;
        const GradeBasis& b3 = grade_basis(7, 3);
        Mask full = full_mask(7);
        for (int A = 0; A < b3.size(); ++A) {
            Mask mA = b3.masks[A];
            auto ia = indices_of(mA);
            for (int pa = 0; pa < 3; ++pa) {
                Mask P = mA & ~(Mask(1) << (ia[pa] - 1));
                for (int B = 0; B < b3.size(); ++B) {
                    Mask mB = b3.masks[B];
                    auto ib = indices_of(mB);
                    for (int pb = 0; pb < 3; ++pb) {
                        Mask Q = mB & ~(Mask(1) << (ib[pb] - 1));
                        if (P & Q) continue;
                        Mask R = full & ~(P | Q);
                        double s = ((pa & 1) ? -1.0 : 1.0) * ((pb & 1) ? -1.0 : 1.0) * wedge_sign(P, Q) *
                                   wedge_sign(P | Q, R);
                        t.entries.push_back({ia[pa] - 1, ib[pb] - 1, A, B, b3.pos[R], s / 6.0});
                    }
                }
            }
        }
        return t;
    }();
    return table;
}

inline Matrix btilde(const Form& phi) {
    if (phi.dim() != 7 || phi.grade() != 3) throw DimensionError("G2 forms are 3-forms in dimension 7");
    return btilde_table().eval(phi.to_vector());
}

struct G2Structure {
    Form phi;
    Matrix metric;        // g = Btilde / det(Btilde)^{1/9}
    Matrix gram;          // orientation * Btilde, equals g * sqrt(det g)
    Matrix btilde;
    int orientation = 1;  // relative to e^{1..7}
    double volume_scale = 1.0;  // sqrt(det g)
    Form star_phi;

    Form hodge(const Form& a) const { return g2forge::hodge(a, metric, orientation); }
    Form volume() const { return volume_form(7, orientation * volume_scale); }
};

enum class G2Status { Ok, Degenerate, NotPositive };

inline const char* to_string(G2Status s) {
    switch (s) {
        case G2Status::Ok: return "ok";
        case G2Status::Degenerate: return "degenerate";
        case G2Status::NotPositive: return "not-positive";
    }
    return "?";
}

struct G2MetricResult {
    G2Status status = G2Status::Degenerate;
    double det_btilde = 0.0;
    G2Structure structure;
    bool ok() const { return status == G2Status::Ok; }
};

inline G2MetricResult metric_from_3form(const Form& phi) {
    G2MetricResult res;
    Matrix B = btilde(phi);
    double s = B.determinant();
    res.det_btilde = s;
    G2Structure& g2 = res.structure;
    g2.phi = phi;
    g2.btilde = B;
    // relative spectral test; a det threshold is meaningless for badly scaled forms
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (B + B.transpose()), Eigen::EigenvaluesOnly);
    Vector ev = es.eigenvalues().cwiseAbs();
    if (ev.maxCoeff() == 0.0 || ev.minCoeff() <= tolerances().eps * ev.maxCoeff()) {
        res.status = G2Status::Degenerate;
        return res;
    }
    double root = std::cbrt(std::cbrt(s));  // sign-preserving ninth root
    g2.metric = B / root;
    g2.orientation = s > 0 ? 1 : -1;
    g2.gram = g2.orientation * B;
    if (!is_positive_definite(g2.metric)) {
        res.status = G2Status::NotPositive;
        return res;
    }
    g2.volume_scale = std::sqrt(g2.metric.determinant());
    double gap = (g2.metric * g2.volume_scale - g2.gram).cwiseAbs().maxCoeff();
    if (gap > 1e-8 * std::max(1.0, B.cwiseAbs().maxCoeff()))
        throw InternalError("metric_from_3form: g sqrt(det g) != Btilde (gap " + std::to_string(gap) + ")");
    g2.star_phi = g2.hodge(phi);
    res.status = G2Status::Ok;
    return res;
}

// throws unless phi defines a positive G2-structure
inline G2Structure g2_structure(const Form& phi) {
    G2MetricResult r = metric_from_3form(phi);
    if (!r.ok()) throw ConstraintError(std::string("3-form is not a G2 form: ") + to_string(r.status));
    return r.structure;
}

// standard form on R^7
inline Form phi0() {
    return parse_form("e124 + e235 + e346 + e457 + e156 + e267 + e137", 7, 3);
}

inline bool is_calibrated(const LieAlgebra& alg, const Form& phi) {
    g2_structure(phi);
    return alg.d(phi).is_zero();
}

inline bool is_cocalibrated(const LieAlgebra& alg, const Form& phi) {
    G2Structure s = g2_structure(phi);
    return alg.d(s.star_phi).is_zero();
}

enum class TypeSpace { L2_14, L3_27, L4_27 };

namespace detail {
inline Matrix wedge_operator(const Form& w, int p) {
    // a -> a ^ w as a dense matrix on Lambda^p
    int n = w.dim();
    const WedgeTable& t = wedge_table(n, p, w.grade());
    Matrix M = Matrix::Zero(grade_basis(n, p + w.grade()).size(), grade_basis(n, p).size());
    Vector wv = w.to_vector();
    for (const auto& e : t.entries) M(e.out, e.a) += e.sign * wv(e.b);
    return M;
}
}  // namespace detail

inline FormSpace type_subspace_basis(const G2Structure& s, TypeSpace which) {
    FormSpace out;
    out.n = 7;
    if (which == TypeSpace::L2_14) {
        out.p = 2;
        out.basis = nullspace(detail::wedge_operator(s.star_phi, 2)).basis;
        return out;
    }
    Matrix A = detail::wedge_operator(s.phi, 3);
    Matrix B = detail::wedge_operator(s.star_phi, 3);
    Matrix M(A.rows() + B.rows(), 35);
    M << A, B;
    Matrix L3 = nullspace(M).basis;
    if (which == TypeSpace::L3_27) {
        out.p = 3;
        out.basis = L3;
        return out;
    }
    // a 4-form wedge *phi is an 8-form, so Lambda^4_27 is taken as * Lambda^3_27
    out.p = 4;
    out.basis = hodge_matrix(7, 3, s.metric, s.orientation) * L3;
    return out;
}

struct TorsionClasses {
    double tau0 = 0.0;
    Form tau1{7, 1};
    Form tau2{7, 2};
    Form tau3{7, 3};
    Form tau1_prime{7, 1};  // from the d*phi system
    double tau1_gap = 0.0;
    double residual_dphi = 0.0;
    double residual_dstarphi = 0.0;
};

// d phi = tau0 *phi + 3 tau1 ^ phi + *tau3,  d*phi = 4 tau1 ^ *phi + tau2 ^ phi
inline TorsionClasses torsion_classes(const LieAlgebra& alg, const G2Structure& s) {
    if (alg.dim() != 7) throw DimensionError("torsion classes need a 7-dimensional algebra");
    TorsionClasses tc;
    Form dphi = alg.d(s.phi);
    Form dstar = alg.d(s.star_phi);
    FormSpace L3 = type_subspace_basis(s, TypeSpace::L3_27);
    FormSpace L2 = type_subspace_basis(s, TypeSpace::L2_14);
    Matrix H3 = hodge_matrix(7, 3, s.metric, s.orientation);
    if (L3.dim() != 27 || L2.dim() != 14) throw InternalError("type decomposition has wrong dimensions");

    Matrix A1(35, 35);
    A1.col(0) = s.star_phi.to_vector();
    Matrix Wphi = detail::wedge_operator(s.phi, 1);
    A1.middleCols(1, 7) = 3.0 * Wphi;
    A1.rightCols(27) = H3 * L3.basis;
    Vector b1 = dphi.to_vector();
    Eigen::ColPivHouseholderQR<Matrix> qr1(A1);
    if (qr1.rank() < 35) throw InternalError("torsion system for d phi is singular");
    Vector x1 = qr1.solve(b1);
    tc.residual_dphi = (A1 * x1 - b1).cwiseAbs().maxCoeff();

    Matrix A2(21, 21);
    A2.leftCols(7) = 4.0 * detail::wedge_operator(s.star_phi, 1);
    A2.rightCols(14) = detail::wedge_operator(s.phi, 2) * L2.basis;
    Vector b2 = dstar.to_vector();
    Eigen::ColPivHouseholderQR<Matrix> qr2(A2);
    if (qr2.rank() < 21) throw InternalError("torsion system for d*phi is singular");
    Vector x2 = qr2.solve(b2);
    tc.residual_dstarphi = (A2 * x2 - b2).cwiseAbs().maxCoeff();

    tc.tau0 = x1(0);
    tc.tau1 = Form::from_vector(7, 1, x1.segment(1, 7)).pruned(1e-13);
    tc.tau3 = Form::from_vector(7, 3, L3.basis * x1.tail(27)).pruned(1e-13);
    tc.tau1_prime = Form::from_vector(7, 1, x2.head(7)).pruned(1e-13);
    tc.tau2 = Form::from_vector(7, 2, L2.basis * x2.tail(14)).pruned(1e-13);
    tc.tau1_gap = (x1.segment(1, 7) - x2.head(7)).cwiseAbs().maxCoeff();
    double scale = std::max({1.0, dphi.max_abs(), dstar.max_abs()});
    if (tc.tau1_gap > 1e-8 * scale)
        throw InternalError("torsion: tau1 from d phi and d*phi disagree by " + std::to_string(tc.tau1_gap));
    return tc;
}

struct ObstructionResult {
    bool obstructed = false;
    std::optional<Vector> witness_vector;
    double max_tensor_norm = 0.0;
    int basis_dim = 0;
    std::array<int, 3> worst_triple{-1, -1, -1};
};

// Decides whether (sum rho_a alpha_a)^3 vanishes identically, alpha_a 2-forms: the
// symmetric trilinear tensor alpha_a ^ alpha_b ^ alpha_c must vanish on every multiset.
inline ObstructionResult cubic_vanishing_test(const std::vector<Vector>& alphas, int n, int jobs = 1) {
    ObstructionResult r;
    int m = static_cast<int>(alphas.size());
    r.basis_dim = m;
    if (m == 0 || n < 6) {
        r.obstructed = true;
        return r;
    }
    const WedgeTable& w22 = wedge_table(n, 2, 2);
    const WedgeTable& w42 = wedge_table(n, 4, 2);
    std::vector<double> row_max(m, 0.0);
    std::vector<std::array<int, 3>> row_arg(m, {-1, -1, -1});
    parallel_for(m, jobs, [&](std::size_t ai) {
        int a = static_cast<int>(ai);
        for (int b = a; b < m; ++b) {
            Vector ab = w22.apply(alphas[a], alphas[b]);
            if (ab.cwiseAbs().maxCoeff() == 0.0) continue;
            for (int c = b; c < m; ++c) {
                double v = w42.apply(ab, alphas[c]).cwiseAbs().maxCoeff();
                if (v > row_max[a]) {
                    row_max[a] = v;
                    row_arg[a] = {a, b, c};
                }
            }
        }
    });
    for (int a = 0; a < m; ++a)
        if (row_max[a] > r.max_tensor_norm) {
            r.max_tensor_norm = row_max[a];
            r.worst_triple = row_arg[a];
        }
    r.obstructed = r.max_tensor_norm < tolerances().eps;
    return r;
}

// (i_X phi)^3 = 0 for every closed 3-form phi
inline ObstructionResult obstruction_closed(const LieAlgebra& alg, const Vector& X, int jobs = 1) {
    FormSpace Z = closed_forms(alg, 3);
    std::vector<Vector> alphas;
    for (int a = 0; a < Z.dim(); ++a) alphas.push_back(contract(X, Z.form(a)).to_vector());
    ObstructionResult r = cubic_vanishing_test(alphas, alg.dim(), jobs);
    if (r.obstructed) r.witness_vector = X;
    return r;
}

// (i_X *Psi)^3 = 0 for every closed 4-form Psi
inline ObstructionResult obstruction_coclosed(const LieAlgebra& alg, const InnerProduct& g, const Vector& X,
                                              int jobs = 1) {
    FormSpace Z = closed_forms(alg, 4);
    Matrix H = hodge_matrix(alg.dim(), 4, g, 1);
    std::vector<Vector> alphas;
    for (int a = 0; a < Z.dim(); ++a)
        alphas.push_back(contract(X, Form::from_vector(alg.dim(), 3, H * Z.basis.col(a))).to_vector());
    ObstructionResult r = cubic_vanishing_test(alphas, alg.dim(), jobs);
    if (r.obstructed) r.witness_vector = X;
    return r;
}

// diagnostic only: basis vectors X with (i_X *Psi)^3 = 0 for one given closed 4-form
inline std::vector<int> coclosed_witnesses_for(const Form& psi, const InnerProduct& g) {
    std::vector<int> out;
    Form s = hodge(psi, g, 1);
    for (int i = 1; i <= psi.dim(); ++i) {
        Form a = contract(i, s);
        if (wedge({a, a, a}).is_zero()) out.push_back(i);
    }
    return out;
}

struct Tau3Config {
    int starts = 12;
    std::uint64_t seed = 1;
    int max_iters = 300;
    int seed_iters = 60;
    double threshold = 1e-6;  // on the G2-domain minimum
};

struct Tau3Report {
    bool obstructed = false;
    std::string reason;  // "no-g2-forms", "bounded-below", "root-found"
    int basis_dim = 0;
    // literal reading: min of ||N tau3 ^ phi|| / |rho|^4 over all coclosed rho
    double sphere_min = 0.0;
    double sphere_min_det = 0.0;  // det Btilde at that minimizer, |rho| = 1
    // G2 domain: min of ||N tau3 ^ phi|| / |det Btilde|^{4/21} over definite coclosed forms
    int definite_starts = 0;
    double g2_min = 0.0;
    std::vector<double> per_start;  // G2-domain value per definite start
    Vector best_rho;
    double tau3_starphi_max = 0.0;  // identically zero for the surrogate, reported at best_rho
};

namespace detail {
// F(rho) = t3 ^ phi with t3 = N tau3 = -*(N d phi - c *phi), N = |phi|^2, c = (d phi ^ phi)/vol
struct Tau3System {
    Matrix B, D, H3, H4;
    double s = 1.0;
    const WedgeTable* w34;
    const WedgeTable* w33;

    Tau3System(const LieAlgebra& alg, const InnerProduct& g, const Matrix& basis)
        : B(basis), D(alg.dmat(3)), H3(hodge_matrix(7, 3, g, 1)), H4(hodge_matrix(7, 4, g, 1)),
          s(std::sqrt(g.determinant())), w34(&wedge_table(7, 3, 4)), w33(&wedge_table(7, 3, 3)) {}

    double top(const Vector& u3, const Vector& v4) const { return w34->apply(u3, v4)(0) / s; }

    Vector t3(const Vector& phi) const {
        Vector dphi = D * phi, sphi = H3 * phi;
        double N = top(phi, sphi), c = top(phi, dphi);
        return -H4 * (N * dphi - c * sphi);
    }

    // G(u) = F(u) / |u|^4, homogeneous of degree 0
    void eval(const Vector& u, Vector& r, Matrix* J) const {
        int m = static_cast<int>(u.size());
        double nu2 = u.squaredNorm();
        double inv4 = 1.0 / (nu2 * nu2);
        Vector phi = B * u;
        Vector dphi = D * phi, sphi = H3 * phi;
        double N = top(phi, sphi), c = top(phi, dphi);
        Vector u4 = N * dphi - c * sphi;
        Vector t = -H4 * u4;
        Vector F = w33->apply(t, phi);
        r = F * inv4;
        if (!J) return;
        J->resize(7, m);
        for (int a = 0; a < m; ++a) {
            Vector del = B.col(a);
            Vector ddel = D * del;
            double dN = 2.0 * top(del, sphi);
            double dc = top(del, dphi) + top(phi, ddel);
            Vector du = dN * dphi + N * ddel - dc * sphi - c * (H3 * del);
            Vector dt = -H4 * du;
            Vector dF = w33->apply(dt, phi) + w33->apply(t, del);
            J->col(a) = (dF - 4.0 * F * (u(a) / nu2)) * inv4;
        }
    }
};
}  // namespace detail

inline bool is_definite(const Matrix& S) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(S, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    return ev.minCoeff() > 0.0 || ev.maxCoeff() < 0.0;
}

// Surrogate tau3 = -*(d phi - tau0 *phi) on the generic coclosed 3-form (Hodge star of g).
// A cocalibrated G2 form with metric g has tau3 ^ phi = 0 automatically, so a definite
// coclosed form with tau3 ^ phi = 0 must exist unless the algebra is obstructed.
inline Tau3Report tau3_obstruction(const LieAlgebra& alg, const InnerProduct& g, const Tau3Config& cfg = {},
                                   int jobs = 1) {
    if (alg.dim() != 7) throw DimensionError("tau3 obstruction needs a 7-dimensional algebra");
    Tau3Report rep;
    FormSpace C = coclosed_forms(alg, 3, g, 1);
    int m = C.dim();
    rep.basis_dim = m;
    if (m == 0) {
        rep.obstructed = true;
        rep.reason = "no-g2-forms";
        return rep;
    }
    detail::Tau3System sys(alg, g, C.basis);
    const BtildeTable& bt = btilde_table();

    // literal reading on the unit sphere
    ResidualFn sphere = [&](const Vector& x, Vector& r, Matrix* J) { sys.eval(x, r, J); };
    // G2 domain: divide by |det Btilde|^{4/21}, which blows up on degenerate forms
    ResidualFn ratio = [&](const Vector& u, Vector& r, Matrix* J) {
        Vector F;
        Matrix JF;
        sys.eval(u, F, J ? &JF : nullptr);
        Vector phi = C.basis * u;
        Matrix Bt = bt.eval(phi);
        double det = Bt.determinant();
        double nu2 = u.squaredNorm();
        double q = std::pow(std::abs(det) / std::pow(nu2, 10.5), 4.0 / 21.0);
        r = F / q;
        if (!J) return;
        Matrix Binv = Bt.inverse();
        Matrix JB = bt.jacobian(phi) * C.basis;
        J->resize(7, m);
        for (int a = 0; a < m; ++a) {
            double tr = 0;
            for (int i = 0; i < 7; ++i)
                for (int j = 0; j < 7; ++j) tr += Binv(j, i) * JB(i * 7 + j, a);
            double dlogq = (4.0 / 21.0) * (tr - 21.0 * u(a) / nu2);
            J->col(a) = JF.col(a) / q - r * dlogq;
        }
    };

    struct Run {
        double sphere = std::numeric_limits<double>::infinity();
        Vector sphere_x;
        bool definite = false;
        double g2 = std::numeric_limits<double>::infinity();
        Vector g2_x;
    };
    std::vector<Run> runs(cfg.starts);
    parallel_for(cfg.starts, jobs, [&](std::size_t k) {
        std::mt19937_64 rng(cfg.seed + k);
        std::normal_distribution<double> nd;
        Run& run = runs[k];
        Vector x(m);
        for (int i = 0; i < m; ++i) x(i) = nd(rng);
        x.normalize();
        LMOptions opt;
        opt.max_iters = cfg.max_iters;
        opt.tol = 1e-14;
        run.sphere_x = levenberg_marquardt(sphere, x, opt).x.normalized();
        Vector r;
        sys.eval(run.sphere_x, r, nullptr);
        run.sphere = r.norm();

        // seed a definite form: pull Btilde toward a random positive matrix
        Matrix P(7, 7);
        for (int a = 0; a < 7; ++a)
            for (int b = 0; b < 7; ++b) P(a, b) = nd(rng);
        Matrix T = P * P.transpose() / 7.0 + Matrix::Identity(7, 7);
        ResidualFn seedfn = [&](const Vector& v, Vector& res, Matrix* J) {
            Vector phi = C.basis * v;
            Matrix Bt = bt.eval(phi) - T;
            res.resize(28);
            int q = 0;
            for (int a = 0; a < 7; ++a)
                for (int b = a; b < 7; ++b) res(q++) = Bt(a, b);
            if (!J) return;
            Matrix JB = bt.jacobian(phi) * C.basis;
            J->resize(28, v.size());
            q = 0;
            for (int a = 0; a < 7; ++a)
                for (int b = a; b < 7; ++b) J->row(q++) = JB.row(a * 7 + b);
        };
        LMOptions so;
        so.max_iters = cfg.seed_iters;
        Vector y = levenberg_marquardt(seedfn, x, so).x;
        if (!is_definite(bt.eval(C.basis * y))) return;
        run.definite = true;
        y.normalize();
        LMResult res = levenberg_marquardt(ratio, y, opt);
        run.g2_x = res.x.normalized();
        run.g2 = res.residual;
    });

    rep.sphere_min = std::numeric_limits<double>::infinity();
    rep.g2_min = std::numeric_limits<double>::infinity();
    Vector sphere_best;
    for (auto& run : runs) {
        if (run.sphere < rep.sphere_min) {
            rep.sphere_min = run.sphere;
            sphere_best = run.sphere_x;
        }
        if (!run.definite) continue;
        ++rep.definite_starts;
        rep.per_start.push_back(run.g2);
        if (run.g2 < rep.g2_min) {
            rep.g2_min = run.g2;
            rep.best_rho = run.g2_x;
        }
    }
    rep.sphere_min_det = bt.eval(C.basis * sphere_best).determinant();
    if (rep.definite_starts == 0) {
        rep.obstructed = true;
        rep.reason = "no-g2-forms";
        rep.g2_min = 0.0;
        return rep;
    }
    Vector phi = C.basis * rep.best_rho;
    rep.tau3_starphi_max = wedge_table(7, 3, 4).apply(sys.t3(phi), sys.H3 * phi).cwiseAbs().maxCoeff();
    rep.obstructed = rep.g2_min > cfg.threshold;
    rep.reason = rep.obstructed ? "bounded-below" : "root-found";
    return rep;
}

}  // namespace g2forge
