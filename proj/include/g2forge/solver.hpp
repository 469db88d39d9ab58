#pragma once
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "g2.hpp"

namespace g2forge {

struct ParametrizedForm {
    int n = 7, p = 3;
    Matrix basis;  // coefficient vectors as columns
    std::vector<std::string> coeff_names;

    int size() const { return static_cast<int>(basis.cols()); }
    Form instantiate(const Vector& rho) const {
        if (rho.size() != basis.cols()) throw DimensionError("ParametrizedForm: wrong number of coefficients");
        return Form::from_vector(n, p, basis * rho);
    }
    // least-squares coefficients of a form; second = distance to the span
    std::pair<Vector, double> fit(const Form& f) const {
        Vector v = f.to_vector();
        Vector rho = basis.transpose() * v;  // columns are orthonormal
        return {rho, (basis * rho - v).cwiseAbs().maxCoeff()};
    }
};

inline ParametrizedForm make_parametrized(const FormSpace& s) {
    ParametrizedForm pf;
    pf.n = s.n;
    pf.p = s.p;
    pf.basis = s.basis;
    for (int i = 0; i < s.dim(); ++i) pf.coeff_names.push_back("rho" + std::to_string(i + 1));
    return pf;
}

inline ParametrizedForm generic_closed_3form(const LieAlgebra& alg) { return make_parametrized(closed_forms(alg, 3)); }

inline ParametrizedForm generic_coclosed_3form(const LieAlgebra& alg, const InnerProduct& g) {
    return make_parametrized(coclosed_forms(alg, 3, g, 1));
}

// Btilde(rho) - kappa I on the active entries (i <= j, zero-based)
class MetricSystem {
public:
    MetricSystem(ParametrizedForm pf, std::vector<std::pair<int, int>> drop = {}) : pf_(std::move(pf)) {
        if (pf_.n != 7 || pf_.p != 3) throw DimensionError("MetricSystem needs 3-forms in dimension 7");
        for (int i = 0; i < 7; ++i)
            for (int j = i; j < 7; ++j) {
                bool dropped = false;
                for (auto [a, b] : drop)
                    if ((a == i && b == j) || (a == j && b == i)) dropped = true;
                if (!dropped) active_.push_back({i, j});
            }
    }

    const ParametrizedForm& form() const { return pf_; }
    const std::vector<std::pair<int, int>>& active() const { return active_; }
    int equations() const { return static_cast<int>(active_.size()); }
    bool is_active(int i, int j) const {
        if (i > j) std::swap(i, j);
        for (auto& e : active_)
            if (e.first == i && e.second == j) return true;
        return false;
    }

    Vector residual(const Vector& rho, double kappa = 1.0) const {
        Matrix B = btilde_table().eval(pf_.basis * rho);
        Vector r(equations());
        for (int q = 0; q < equations(); ++q) {
            auto [i, j] = active_[q];
            r(q) = B(i, j) - (i == j ? kappa : 0.0);
        }
        return r;
    }

    Matrix jacobian(const Vector& rho) const {
        Matrix JB = btilde_table().jacobian(pf_.basis * rho) * pf_.basis;
        Matrix J(equations(), pf_.size());
        for (int q = 0; q < equations(); ++q) {
            auto [i, j] = active_[q];
            J.row(q) = JB.row(i * 7 + j);
        }
        return J;
    }

private:
    ParametrizedForm pf_;
    std::vector<std::pair<int, int>> active_;
};

inline MetricSystem assemble_einstein_system(const ParametrizedForm& pf, std::vector<std::pair<int, int>> drop = {}) {
    return MetricSystem(pf, std::move(drop));
}

struct SearchConfig {
    int starts = 100;
    std::uint64_t seed = 0;
    double tol = 1e-10;
    int max_iters = 200;
    int jobs = 1;
};

struct StartLog {
    int index = 0;
    std::uint64_t seed = 0;
    double initial_residual = 0.0;
    double final_residual = 0.0;
    int iterations = 0;
    std::vector<double> trace;
};

enum class SearchStatus { Found, NotFound };

struct SearchOutcome {
    SearchStatus status = SearchStatus::NotFound;
    double best_residual = 0.0;
    int best_start = -1;
    Vector rho;          // best point (solution when Found)
    double kappa = 1.0;  // Btilde = kappa I on the active entries
    double k = 0.0;      // induced metric = k I on the active entries
    Matrix metric;       // induced metric at rho, when it exists
    std::string rejection;  // why a small residual was not accepted
    std::vector<StartLog> starts;
    bool found() const { return status == SearchStatus::Found; }
};

// metric from phi positive-definite and proportional to I on the active entries
inline bool accept_solution(const MetricSystem& sys, const Form& phi, double& k, Matrix& metric, std::string& why) {
    G2MetricResult m = metric_from_3form(phi);
    if (!m.ok()) {
        why = std::string("metric_from_3form: ") + to_string(m.status);
        return false;
    }
    metric = m.structure.metric;
    double sum = 0;
    int cnt = 0;
    for (auto [i, j] : sys.active())
        if (i == j) {
            sum += metric(i, i);
            ++cnt;
        }
    k = cnt ? sum / cnt : 0.0;
    for (auto [i, j] : sys.active()) {
        double target = (i == j) ? k : 0.0;
        if (std::abs(metric(i, j) - target) > tolerances().proportional * std::max(1.0, k)) {
            why = "induced metric not proportional to I on the active entries";
            return false;
        }
    }
    return true;
}

// Btilde is an odd homogeneous cubic, so kappa is fixed to 1 (any kappa != 0 rescales to +-1
// and the sign is absorbed by rho -> -rho).
inline SearchOutcome least_squares_search(const MetricSystem& sys, const SearchConfig& cfg = {}) {
    SearchOutcome out;
    int m = sys.form().size();
    out.starts.resize(cfg.starts);
    std::vector<Vector> finals(cfg.starts);
    if (m == 0) {
        out.best_residual = sys.residual(Vector::Zero(0)).norm();
        out.starts.clear();
        return out;
    }
    ResidualFn fn = [&](const Vector& x, Vector& r, Matrix* J) {
        r = sys.residual(x);
        if (J) *J = sys.jacobian(x);
    };
    parallel_for(cfg.starts, cfg.jobs, [&](std::size_t idx) {
        StartLog& log = out.starts[idx];
        log.index = static_cast<int>(idx);
        log.seed = cfg.seed + idx;
        std::mt19937_64 rng(log.seed);
        std::normal_distribution<double> nd;
        Vector x(m);
        for (int i = 0; i < m; ++i) x(i) = nd(rng);
        x.normalize();
        // scale so the median diagonal of Btilde is 1 in magnitude
        Matrix B = btilde_table().eval(sys.form().basis * x);
        std::vector<double> diag(7);
        for (int i = 0; i < 7; ++i) diag[i] = B(i, i);
        std::nth_element(diag.begin(), diag.begin() + 3, diag.end());
        double med = diag[3];
        if (std::abs(med) > 1e-12) x *= 1.0 / std::cbrt(med);
        log.initial_residual = sys.residual(x).norm();
        LMOptions opt;
        opt.max_iters = cfg.max_iters;
        opt.tol = cfg.tol;
        LMResult res = levenberg_marquardt(fn, x, opt);
        log.final_residual = res.residual;
        log.iterations = res.iterations;
        log.trace = std::move(res.trace);
        finals[idx] = res.x;
    });
    out.best_residual = std::numeric_limits<double>::infinity();
    for (int i = 0; i < cfg.starts; ++i)
        if (out.starts[i].final_residual < out.best_residual) {
            out.best_residual = out.starts[i].final_residual;
            out.best_start = i;
        }
    out.rho = finals[out.best_start];
    // accept the first start (by index) that converges and passes the end-to-end checks
    for (int i = 0; i < cfg.starts; ++i) {
        if (out.starts[i].final_residual >= cfg.tol) continue;
        double k;
        Matrix g;
        std::string why;
        if (accept_solution(sys, sys.form().instantiate(finals[i]), k, g, why)) {
            out.status = SearchStatus::Found;
            out.best_start = i;
            out.best_residual = out.starts[i].final_residual;
            out.rho = finals[i];
            out.k = k;
            out.metric = g;
            return out;
        }
        if (out.rejection.empty()) out.rejection = why;
    }
    G2MetricResult mr = metric_from_3form(sys.form().instantiate(out.rho));
    if (mr.ok()) out.metric = mr.structure.metric;
    return out;
}

enum class SweepMode { Calibrated, Cocalibrated };

inline const char* to_string(SweepMode m) { return m == SweepMode::Calibrated ? "calibrated" : "cocalibrated"; }

struct SweepRecord {
    std::string name;
    std::string verdict;     // "obstructed" | "not-found" | "found"
    std::string decided_by;  // "lemma-e<k>" | "tau3" | "su3" | "search"
    std::vector<int> lemma_vectors;  // basis X for which the lemma fires
    std::optional<Tau3Report> tau3;
    bool su3_degenerate = false;
    std::optional<SearchOutcome> search;
    int space_dim = 0;
};

struct SweepOptions {
    SearchConfig search;
    Tau3Config tau3;
    bool run_search_always = false;  // run the search even when an earlier stage decides
};

inline SweepRecord sweep_algebra(const LieAlgebra& alg, SweepMode mode, const SweepOptions& opt = {}) {
    if (alg.dim() != 7) throw DimensionError("sweep: algebra must be 7-dimensional");
    SweepRecord rec;
    rec.name = alg.name();
    const InnerProduct& g = alg.metric();
    for (int k = 1; k <= 7; ++k) {
        Vector X = unit_vector(7, k);
        ObstructionResult r = mode == SweepMode::Calibrated ? obstruction_closed(alg, X) : obstruction_coclosed(alg, g, X);
        if (r.obstructed) rec.lemma_vectors.push_back(k);
    }
    if (!rec.lemma_vectors.empty()) {
        rec.verdict = "obstructed";
        rec.decided_by = "lemma-e" + std::to_string(rec.lemma_vectors.front());
    }
    if (mode == SweepMode::Cocalibrated && rec.verdict.empty()) {
        rec.tau3 = tau3_obstruction(alg, g, opt.tau3);
        if (rec.tau3->obstructed) {
            rec.verdict = "obstructed";
            rec.decided_by = "tau3";
        }
    }
    ParametrizedForm pf = mode == SweepMode::Calibrated ? generic_closed_3form(alg) : generic_coclosed_3form(alg, g);
    rec.space_dim = pf.size();
    if (rec.verdict.empty()) {
        // SU(3) necessary condition along e7: (i_{e7} phi)^3 must not vanish identically
        std::vector<Vector> alphas;
        for (int a = 0; a < pf.size(); ++a)
            alphas.push_back(contract(unit_vector(7, 7), pf.instantiate(unit_vector(pf.size(), a + 1))).to_vector());
        rec.su3_degenerate = cubic_vanishing_test(alphas, 7).obstructed;
        if (rec.su3_degenerate) {
            rec.verdict = "obstructed";
            rec.decided_by = "su3";
        }
    }
    if (rec.verdict.empty() || opt.run_search_always) {
        rec.search = least_squares_search(assemble_einstein_system(pf), opt.search);
        if (rec.verdict.empty()) {
            rec.verdict = rec.search->found() ? "found" : "not-found";
            rec.decided_by = "search";
        }
    }
    return rec;
}

}  // namespace g2forge
