// One line per acceptance criterion; exit status 1 if any criterion fails.
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "g2forge/g2forge.hpp"

using namespace g2forge;

namespace {

struct Outcome {
    bool pass = true;
    std::string summary;
    std::vector<std::string> notes;  // printed under a failing line

    void check(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            notes.push_back(what);
        }
    }
};

Outcome from_suites(const std::vector<std::string>& names, const SuiteContext& ctx) {
    Outcome o;
    int total = 0, pass = 0, info = 0;
    for (auto& n : names) {
        Report rep = run_suite(n, ctx);
        for (auto& r : rep.records) {
            ++total;
            if (r.verdict == Verdict::Pass) ++pass;
            if (r.verdict == Verdict::Info) ++info;
            o.check(r.verdict != Verdict::Fail, r.name + ": expected " + r.expected + ", observed " + r.observed);
        }
    }
    o.summary = std::to_string(pass) + "/" + std::to_string(total - info) + " records pass";
    if (info) o.summary += ", " + std::to_string(info) + " informational";
    return o;
}

bool is_table(const CatalogEntry& e) { return e.source.rfind("Table 1", 0) == 0 || e.source.rfind("Table 2", 0) == 0; }

Outcome jacobi_all() {
    Outcome o;
    double worst = 0;
    int tables = 0, samples = 0;
    for (auto& e : default_catalog().entries()) {
        if (is_table(e)) ++tables;
        for (auto& s : e.samples) {
            JacobiResult j = jacobi_check(instantiate(e, s.bindings, false));
            worst = std::max(worst, j.residual);
            o.check(j.residual < 1e-9, e.name + "/" + s.name + " d^2 residual " + num(j.residual));
            ++samples;
        }
    }
    for (auto& name : rank23_entries())
        o.check(default_catalog().get(name).samples.size() >= 3, name + " has fewer than 3 samples");
    o.check(tables == 41, "expected 41 listed entries, found " + std::to_string(tables));
    o.summary = std::to_string(samples) + " samples, max d^2 residual " + num(worst);
    return o;
}

Outcome einstein_all() {
    Outcome o;
    double worst = 0, gap = 0;
    int n = 0;
    for (auto& e : default_catalog().entries()) {
        if (!is_table(e)) continue;
        CurvatureReport r = ricci(instantiate(e));
        worst = std::max(worst, r.einstein_residual);
        gap = std::max(gap, r.method_gap);
        o.check(r.einstein_lambda && r.einstein_residual < 1e-8 && r.lambda < 0,
                e.name + " residual " + num(r.einstein_residual) + " lambda " + num(r.lambda));
        o.check(r.method_gap < 1e-7, e.name + " Ricci methods differ by " + num(r.method_gap));
        ++n;
    }
    o.summary = std::to_string(n) + " entries, max residual " + num(worst) + ", max method gap " + num(gap);
    return o;
}

Outcome identities() {
    Outcome o;
    double worst = 0;
    for (int i = 1; i <= 7; ++i) {
        double g = e7_identity_gap(i);
        worst = std::max(worst, g);
        o.check(g < 1e-12, "i = " + std::to_string(i) + " gap " + num(g));
    }
    o.summary = "max gap " + num(worst);
    return o;
}

Form random_g2(std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    Matrix P = Matrix::Identity(7, 7);
    for (int i = 0; i < 7; ++i)
        for (int j = 0; j < 7; ++j) P(i, j) += 0.15 * nd(rng);
    if (P.determinant() < 0) P.col(0) *= -1.0;
    return pullback(phi0(), P);
}

Form random_form(std::mt19937_64& rng, int n, int p) {
    std::normal_distribution<double> nd;
    Vector v(grade_basis(n, p).size());
    for (int i = 0; i < v.size(); ++i) v(i) = nd(rng);
    return Form::from_vector(n, p, v);
}

Outcome properties() {
    Outcome o;
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> nd;
    const int N = 50;

    // exterior algebra laws
    double ext = 0;
    for (int t = 0; t < N; ++t) {
        int n = 7, p = 1 + t % 3, q = 1 + (t / 3) % 3;
        Form a = random_form(rng, n, p), b = random_form(rng, n, q);
        ext = std::max(ext, (wedge(a, b) - ((p * q) % 2 ? -1.0 : 1.0) * wedge(b, a)).max_abs());
        Vector X(n);
        for (int i = 0; i < n; ++i) X(i) = nd(rng);
        Form lhs = contract(X, wedge(a, b));
        Form rhs = wedge(contract(X, a), b) + (p % 2 ? -1.0 : 1.0) * wedge(a, contract(X, b));
        ext = std::max(ext, (lhs - rhs).max_abs());
        double sign = (p * (n - p)) % 2 ? -1.0 : 1.0;
        ext = std::max(ext, (hodge(hodge(a)) - sign * a).max_abs());
    }
    for (auto& e : default_catalog().entries()) {
        LieAlgebra g = instantiate(e);
        Form a = random_form(rng, g.dim(), 1), b = random_form(rng, g.dim(), 2);
        ext = std::max(ext, (g.d(wedge(a, b)) - wedge(g.d(a), b) + wedge(a, g.d(b))).max_abs());
    }
    o.check(ext < 1e-10, "exterior laws off by " + num(ext));

    // torsion round trip
    std::vector<LieAlgebra> algs;
    for (auto& e : default_catalog().entries())
        if (e.dim == 7) algs.push_back(instantiate(e));
    double rt = 0, t1 = 0;
    for (int t = 0; t < N; ++t) {
        const LieAlgebra& alg = algs[(t * 5) % algs.size()];
        G2Structure s = g2_structure(random_g2(rng));
        TorsionClasses tc = torsion_classes(alg, s);
        Form dphi = alg.d(s.phi), dstar = alg.d(s.star_phi);
        double scale = std::max({1.0, dphi.max_abs(), dstar.max_abs()});
        Form rec1 = tc.tau0 * s.star_phi + 3.0 * wedge(tc.tau1, s.phi) + s.hodge(tc.tau3);
        Form rec2 = 4.0 * wedge(tc.tau1, s.star_phi) + wedge(tc.tau2, s.phi);
        rt = std::max(rt, std::max((rec1 - dphi).max_abs(), (rec2 - dstar).max_abs()) / scale);
        t1 = std::max(t1, tc.tau1_gap / scale);
    }
    o.check(rt < 1e-8, "torsion reconstruction error " + num(rt));
    o.check(t1 < 1e-8, "tau1 disagreement " + num(t1));

    // equivariance and scaling of the induced metric
    double eq = 0, sc = 0;
    for (int t = 0; t < N; ++t) {
        Form phi = random_g2(rng);
        G2Structure s = g2_structure(phi);
        Eigen::HouseholderQR<Matrix> qr(Matrix::NullaryExpr(7, 7, [&]() { return nd(rng); }));
        Matrix R = qr.householderQ();
        if (R.determinant() < 0) R.col(0) *= -1.0;
        G2Structure r = g2_structure(pullback(phi, R));
        eq = std::max(eq, (r.metric - R.transpose() * s.metric * R).cwiseAbs().maxCoeff());
        o.check(r.orientation == s.orientation, "rotation changed the orientation");
        double c = 0.1 + 9.9 * std::uniform_real_distribution<double>()(rng);
        G2Structure cs = g2_structure(c * phi);
        sc = std::max(sc, (cs.metric - std::pow(c, 2.0 / 3.0) * s.metric).cwiseAbs().maxCoeff() /
                              cs.metric.cwiseAbs().maxCoeff());
    }
    o.check(eq < 1e-9, "SO(7) equivariance error " + num(eq));
    o.check(sc < 1e-9, "c^(2/3) scaling error " + num(sc));

    // SU(2) invariants: flat model and rank-two 7-dimensional entries
    double su2 = su2_invariant_residual(su2_from_su3(su3_flat_model(), unit_vector(6, 6)));
    int rank2 = 0;
    for (auto& name : rank23_entries()) {
        const CatalogEntry& e = default_catalog().get(name);
        if (e.dim != 7 || standard_decomposition(instantiate(e)).a_basis.cols() != 2) continue;
        ++rank2;
        for (int t = 0; t < 5; ++t) {
            G2Structure s = g2_structure(random_g2(rng));
            SU3Data d3 = su3_from_g2(s, unit_vector(7, 7));
            Vector X = unit_vector(7, 6);
            X -= d3.A * d3.A.dot(s.metric * X);
            X /= std::sqrt(X.dot(s.metric * X));
            SU2Data d2 = su2_from_su3(d3, X);
            su2 = std::max(su2, su2_invariant_residual(d2));
            o.check(!su2_obstruction(d2, 30, t).obstructed, name + ": SU(2) structure flagged");
        }
    }
    o.check(su2 < 1e-8, "SU(2) invariant residual " + num(su2));
    o.check(rank2 > 0, "no rank-two 7-dimensional entries found");

    o.summary = "exterior " + num(ext) + ", torsion " + num(rt) + ", equivariance " + num(eq) + ", scaling " + num(sc) +
                ", SU(2) " + num(su2) + " on flat model + " + std::to_string(rank2) + " rank-two entries";
    return o;
}

}  // namespace

int main() {
    SuiteContext ctx;
    ctx.config.starts = 100;
    ctx.config.seed = 7;

    std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"Jacobi identity on every catalog sample", jacobi_all},
        {"Einstein metrics with negative constant, Ricci methods agree", einstein_all},
        {"e6 contraction sweep", [&] { return from_suites({"lemma41-sweep"}, ctx); }},
        {"stored calibrated forms", [&] { return from_suites({"table3"}, ctx); }},
        {"g28 worked example", [&] { return from_suites({"g28-worked"}, ctx); }},
        {"example soliton", [&] { return from_suites({"example-soliton"}, ctx); }},
        {"e7 contraction identities for phi0", identities},
        {"cocalibrated sweep", [&] { return from_suites({"lemma51-sweep", "tau3-sweep"}, ctx); }},
        {"almost-Hermitian structures and symplectic obstructions", [&] { return from_suites({"section3"}, ctx); }},
        {"property suites", properties},
    };

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& ex) {
            o.pass = false;
            o.summary = "exception";
            o.notes.push_back(ex.what());
        }
        std::printf("criterion %2zu: %s  %s (%s)\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                    o.summary.c_str());
        for (auto& n : o.notes) std::printf("    %s\n", n.c_str());
        std::fflush(stdout);
        if (!o.pass) ++failed;
    }
    std::printf("%d of %zu criteria pass\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed ? 1 : 0;
}
