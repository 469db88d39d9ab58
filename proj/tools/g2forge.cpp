#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "g2forge/g2forge.hpp"

using namespace g2forge;
using nlohmann::json;

namespace {

struct Globals {
    std::vector<std::string> tol;
    std::uint64_t seed = 7;
    int jobs = 1;
    std::string format = "json";
    std::string catalog_path;
    std::string out;
    bool no_timing = false;
};

Globals G;

void apply_tolerances(RunConfig& cfg) {
    Tolerances& t = tolerances();
    for (auto& spec : G.tol) {
        auto pos = spec.find('=');
        std::string key = pos == std::string::npos ? "eps" : spec.substr(0, pos);
        double v;
        try {
            v = std::stod(pos == std::string::npos ? spec : spec.substr(pos + 1));
        } catch (const std::exception&) {
            throw ConstraintError("--tol: bad value in '" + spec + "'");
        }
        if (!(v > 0)) throw ConstraintError("--tol: tolerance must be positive");
        if (key == "eps") t.eps = v;
        else if (key == "einstein") t.einstein = v;
        else if (key == "ricci_agree") t.ricci_agree = v;
        else if (key == "soliton") t.soliton = v;
        else if (key == "search") t.search = v;
        else if (key == "proportional") t.proportional = v;
        else throw ConstraintError("--tol: unknown tolerance " + key);
    }
    cfg.tol = t;
    cfg.seed = G.seed;
    cfg.jobs = G.jobs;
    cfg.output = G.out;
}

const Catalog& catalog() {
    static Catalog c = load_catalog(G.catalog_path.empty() ? default_catalog_path() : G.catalog_path);
    return c;
}

Vars parse_bindings(const std::vector<std::string>& binds) {
    Vars v;
    for (auto& b : binds) {
        auto [k, val] = detail::split_eq(b);
        v[k] = eval_scalar(val);
    }
    return v;
}

LieAlgebra load_algebra(const std::string& name, const std::vector<std::string>& binds, const std::string& sample) {
    const CatalogEntry& e = catalog().get(name);
    Vars v = parse_bindings(binds);
    if (!sample.empty()) {
        bool found = false;
        for (auto& s : e.samples)
            if (s.name == sample) {
                for (auto& [k, x] : s.bindings) v.emplace(k, x);
                found = true;
            }
        if (!found) throw ConstraintError(name + ": no sample " + sample);
    }
    return instantiate(e, v);
}

Form load_form(const std::string& path, int n = 7) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const Error& ex) {
        throw ParseError(ex.what());
    }
    return parse_form(text, n, 3);
}

Vector load_vector(const std::string& text, int n) { return parse_vector(text, n); }

Report new_report(const std::string& suite) {
    Report rep;
    rep.suite = suite;
    apply_tolerances(rep.config);
    rep.catalog_hash = catalog().hash();
    return rep;
}

Record record(const std::string& name, const std::string& ref, const std::string& algebra) {
    Record r;
    r.name = name;
    r.ref = ref;
    if (!algebra.empty() && catalog().contains(algebra)) r.source = catalog().get(algebra).source;
    return r;
}

int emit(Report& rep, bool query = false) {
    rep.sort();
    std::string text = G.format == "md" ? to_markdown(rep) : to_json(rep, !G.no_timing).dump(1) + "\n";
    if (!G.out.empty()) {
        std::ofstream f(G.out);
        if (!f) throw Error("cannot write " + G.out);
        f << text;
    } else {
        std::cout << text;
    }
    return (query || rep.all_pass()) ? 0 : 1;
}

json form_json(const Form& f) { return f.pruned(1e-12).str(12); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"g2forge: left-invariant Einstein metrics and G2-structures on solvable Lie algebras"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--tol", G.tol, "tolerance override, VALUE (eps) or NAME=VALUE")->take_all();
    app.add_option("--seed", G.seed, "random seed");
    app.add_option("--jobs", G.jobs, "worker threads");
    app.add_option("--format", G.format, "output format")->check(CLI::IsMember({"json", "md"}));
    app.add_option("--catalog", G.catalog_path, "catalog path (default $G2FORGE_CATALOG or the bundled one)");
    app.add_option("--out", G.out, "write the report to a file");
    app.add_flag("--no-timing", G.no_timing, "omit runtimes from JSON output");
    int rc = 0;

    // catalog
    auto* cat = app.add_subcommand("catalog", "catalog access");
    cat->require_subcommand(1);
    auto* cat_list = cat->add_subcommand("list", "list catalog entries");
    cat_list->callback([&] {
        Report rep = new_report("catalog-list");
        for (auto& e : catalog().entries()) {
            Record r = record(e.name, "catalog", e.name);
            json samples = json::array();
            for (auto& s : e.samples) samples.push_back(s.name);
            json params = json::array();
            for (auto& p : e.params) params.push_back(p.name);
            r.details = {{"dim", e.dim}, {"params", params}, {"samples", samples}};
            if (!e.paper_typo.empty()) r.details["paper_typo"] = e.paper_typo;
            rep.records.push_back(r);
        }
        rc = emit(rep, true);
    });

    // check
    std::string check_name, structure_name, sample;
    std::vector<std::string> binds;
    auto* check = app.add_subcommand("check", "verify a property of a catalog algebra");
    check->require_subcommand(1);
    auto add_alg_opts = [&](CLI::App* c) {
        c->add_option("--bind", binds, "parameter binding NAME=VALUE")->take_all();
        c->add_option("--sample", sample, "named sample binding");
    };
    for (std::string what : {"jacobi", "einstein", "soliton", "flat"}) {
        auto* sc = check->add_subcommand(what, "check " + what);
        sc->add_option("name", check_name, "algebra")->required();
        add_alg_opts(sc);
        sc->callback([&, what] {
            Report rep = new_report("check-" + what);
            LieAlgebra alg = load_algebra(check_name, binds, sample);
            Record r = record(check_name + "/" + what, "check " + what, check_name);
            if (what == "jacobi") {
                JacobiResult j = jacobi_check(alg);
                r.expected = "d^2 = 0";
                r.verdict = detail::pass_if(j.pass);
                r.observed = j.pass ? "Jacobi holds" : "Jacobi fails";
                r.residuals = {{"jacobi", j.residual}};
            } else if (what == "einstein") {
                CurvatureReport c = ricci(alg);
                r.expected = "Ric = lambda g";
                r.verdict = detail::pass_if(c.einstein_lambda.has_value());
                r.observed = (c.einstein_lambda ? "Einstein, lambda=" : "not Einstein, scalar/n=") + num(c.lambda);
                r.residuals = {{"einstein", c.einstein_residual}, {"ricci_method_gap", c.method_gap}};
                r.details = {{"lambda", c.lambda}, {"scalar", c.scalar}, {"ricci", matrix_json(c.ricci)}};
            } else if (what == "soliton") {
                SolitonCertificate s = solvsoliton_solve(alg);
                r.expected = "Ric = lambda I + D, D a derivation";
                r.verdict = detail::pass_if(s.found);
                r.observed = s.found ? "solvsoliton, lambda=" + num(s.lambda) : "no certificate";
                r.residuals = {{"soliton", s.residual}, {"derivation", s.derivation_residual}};
                r.details = {{"lambda", s.lambda}, {"D", matrix_json(s.D)}};
            } else {
                FlatnessResult f = flatness_check(alg);
                r.expected = "Riemann = 0";
                r.verdict = detail::pass_if(f.flat);
                r.observed = f.flat ? "flat" : "not flat";
                r.residuals = {{"riemann_max", f.max_riemann}};
            }
            rep.records.push_back(r);
            rc = emit(rep);
        });
    }
    auto* kahler = check->add_subcommand("kahler", "almost-Hermitian structure flags");
    kahler->add_option("--structure", structure_name, "structure name in structures.json")->required();
    kahler->callback([&] {
        Report rep = new_report("check-kahler");
        for (auto& s : load_structures(catalog())) {
            if (s.name != structure_name) continue;
            Record r = record(s.name, "check kahler", s.algebra);
            KahlerReport k = kahler_check(s.alg, s.ah);
            std::map<std::string, bool> got{{"symplectic", k.symplectic}, {"compatible", k.compatible},
                                            {"integrable", k.integrable}, {"einstein", k.einstein}};
            bool ok = true;
            for (auto& [flag, want] : s.expect) ok = ok && got[flag] == want;
            r.verdict = detail::pass_if(ok);
            r.expected = json(s.expect).dump();
            r.observed = json(got).dump();
            r.residuals = {{"dF", k.dF}, {"compat", k.compat_residual}, {"nijenhuis_max", k.nijenhuis_max},
                           {"einstein", k.einstein_residual}};
            rep.records.push_back(r);
        }
        if (rep.records.empty()) throw ConstraintError("unknown structure " + structure_name);
        rc = emit(rep);
    });

    // obstruct
    std::string alg_name, vector_text = "e6", vector2_text = "e6", form_path;
    auto* obs = app.add_subcommand("obstruct", "cubic-vanishing obstruction tests");
    obs->require_subcommand(1);
    for (std::string what : {"closed", "coclosed"}) {
        auto* sc = obs->add_subcommand(what, "no " + what + " G2 form can have the vector in its SU(3) reduction");
        sc->add_option("--algebra", alg_name)->required();
        sc->add_option("--vector", vector_text, "vector X, e.g. e6");
        add_alg_opts(sc);
        sc->callback([&, what] {
            Report rep = new_report("obstruct-" + what);
            LieAlgebra alg = load_algebra(alg_name, binds, sample);
            if (alg.dim() != 7) throw DimensionError("obstruct: algebra must be 7-dimensional");
            Vector X = load_vector(vector_text, 7);
            ObstructionResult o = what == "closed" ? obstruction_closed(alg, X, G.jobs)
                                                   : obstruction_coclosed(alg, alg.metric(), X, G.jobs);
            Record r = record(alg_name + "/" + what + "/" + vector_text, "obstruct " + what, alg_name);
            r.verdict = Verdict::Info;
            r.observed = o.obstructed ? "obstructed" : "not obstructed";
            r.residuals = {{"max_tensor_norm", o.max_tensor_norm}};
            r.details = {{"obstructed", o.obstructed}, {"space_dim", o.basis_dim}};
            if (o.worst_triple[0] >= 0) r.details["worst_triple"] = o.worst_triple;
            rep.records.push_back(r);
            rc = emit(rep, true);
        });
    }

    // g2
    auto* g2 = app.add_subcommand("g2", "G2-structure of a 3-form");
    g2->require_subcommand(1);
    auto* g2m = g2->add_subcommand("metric", "induced metric");
    g2m->add_option("--form", form_path)->required();
    g2m->callback([&] {
        Report rep = new_report("g2-metric");
        Form phi = load_form(form_path);
        G2MetricResult m = metric_from_3form(phi);
        Record r = record("g2-metric", "g2 metric", "");
        r.source = form_path;
        r.verdict = Verdict::Info;
        r.observed = to_string(m.status);
        r.details = {{"status", to_string(m.status)}, {"det_btilde", m.det_btilde}, {"btilde", matrix_json(btilde(phi))}};
        if (m.ok()) {
            r.details["metric"] = matrix_json(m.structure.metric);
            r.details["gram"] = matrix_json(m.structure.gram);
            r.details["orientation"] = m.structure.orientation;
            r.details["volume_scale"] = m.structure.volume_scale;
            r.details["star_phi"] = form_json(m.structure.star_phi);
        }
        rep.records.push_back(r);
        rc = emit(rep, true);
    });
    auto* g2t = g2->add_subcommand("torsion", "torsion classes on a Lie algebra");
    g2t->add_option("--form", form_path)->required();
    g2t->add_option("--algebra", alg_name)->required();
    add_alg_opts(g2t);
    g2t->callback([&] {
        Report rep = new_report("g2-torsion");
        LieAlgebra alg = load_algebra(alg_name, binds, sample);
        G2Structure s = g2_structure(load_form(form_path));
        TorsionClasses tc = torsion_classes(alg, s);
        Record r = record(alg_name + "/torsion", "g2 torsion", alg_name);
        r.verdict = Verdict::Info;
        bool cal = alg.d(s.phi).is_zero(), cocal = alg.d(s.star_phi).is_zero();
        r.observed = std::string(cal ? "calibrated" : "not calibrated") + ", " + (cocal ? "cocalibrated" : "not cocalibrated");
        r.residuals = {{"dphi_fit", tc.residual_dphi}, {"dstarphi_fit", tc.residual_dstarphi}, {"tau1_gap", tc.tau1_gap}};
        r.details = {{"tau0", tc.tau0},
                     {"tau1", form_json(tc.tau1)},
                     {"tau2", form_json(tc.tau2)},
                     {"tau3", form_json(tc.tau3)},
                     {"calibrated", cal},
                     {"cocalibrated", cocal},
                     {"metric", matrix_json(s.metric)}};
        rep.records.push_back(r);
        rc = emit(rep, true);
    });

    // reduce
    auto* red = app.add_subcommand("reduce", "SU(3) / SU(2) reductions of a G2 form");
    red->require_subcommand(1);
    for (std::string what : {"su3", "su2"}) {
        auto* sc = red->add_subcommand(what, what + " reduction");
        sc->add_option("--algebra", alg_name)->required();
        sc->add_option("--form", form_path)->required();
        sc->add_option("--vector", vector_text, "unit direction A (normalized if needed)");
        if (what == "su2") sc->add_option("--vector2", vector2_text, "second direction, projected to A-perp and normalized");
        add_alg_opts(sc);
        sc->callback([&, what] {
            Report rep = new_report("reduce-" + what);
            LieAlgebra alg = load_algebra(alg_name, binds, sample);
            G2Structure s = g2_structure(load_form(form_path));
            Vector A = load_vector(vector_text, 7);
            A /= std::sqrt(A.dot(s.metric * A));
            SU3Data su3 = su3_from_g2(s, A);
            Record r = record(alg_name + "/" + what, "reduce " + what, alg_name);
            SU3Check c3 = su3_necessary_checks(su3.F, su3.psi_plus);
            r.details = {{"F", form_json(su3.F)},
                         {"psi_plus", form_json(su3.psi_plus)},
                         {"psi_minus", form_json(su3.psi_minus)},
                         {"frame", matrix_json(su3.frame)},
                         {"dF_in_algebra", alg.d(contract(A, s.phi)).max_abs()}};
            r.residuals = {{"su3_invariants", detail::su3_residual(su3)}};
            r.verdict = detail::pass_if(c3.pass);
            r.expected = "SU(3) invariants hold";
            r.observed = c3.pass ? "SU(3) structure" : "SU(3) checks fail";
            if (what == "su2") {
                Vector X = load_vector(vector2_text, 7);
                X -= A * A.dot(s.metric * X);
                double nx = std::sqrt(X.dot(s.metric * X));
                if (nx < 1e-9) throw ConstraintError("reduce su2: --vector2 is parallel to --vector");
                X /= nx;
                SU2Data s2 = su2_from_su3(su3, X);
                SU2Obstruction ob = su2_obstruction(s2, 100, G.seed);
                r.details["eta"] = form_json(s2.eta);
                r.details["omega1"] = form_json(s2.omega1);
                r.details["omega2"] = form_json(s2.omega2);
                r.details["omega3"] = form_json(s2.omega3);
                r.details["failed"] = ob.failed;
                r.residuals["su2_invariants"] = su2_invariant_residual(s2);
                r.expected += "; SU(2) invariants hold";
                r.verdict = detail::pass_if(c3.pass && !ob.obstructed);
                r.observed += ob.obstructed ? ", SU(2) checks fail" : ", SU(2) structure";
            }
            rep.records.push_back(r);
            rc = emit(rep);
        });
    }

    // search
    int starts = 100;
    std::vector<std::string> drops;
    auto* search = app.add_subcommand("search", "multistart least squares for Btilde = kappa I");
    search->require_subcommand(1);
    for (std::string what : {"einstein-calibrated", "einstein-cocalibrated"}) {
        auto* sc = search->add_subcommand(what, what);
        sc->add_option("--algebra", alg_name)->required();
        sc->add_option("--starts", starts)->check(CLI::PositiveNumber);
        sc->add_option("--drop", drops, "drop equation I,J (one-based), repeatable")->take_all();
        add_alg_opts(sc);
        sc->callback([&, what] {
            Report rep = new_report("search-" + what);
            LieAlgebra alg = load_algebra(alg_name, binds, sample);
            if (alg.dim() != 7) throw DimensionError("search: algebra must be 7-dimensional");
            std::vector<std::pair<int, int>> dp;
            for (auto& d : drops) {
                auto comma = d.find(',');
                if (comma == std::string::npos) throw ConstraintError("--drop expects I,J");
                int i = std::stoi(d.substr(0, comma)), j = std::stoi(d.substr(comma + 1));
                if (i < 1 || i > 7 || j < 1 || j > 7) throw ConstraintError("--drop indices must be in 1..7");
                dp.push_back({i - 1, j - 1});
            }
            ParametrizedForm pf = what == "einstein-calibrated" ? generic_closed_3form(alg)
                                                                : generic_coclosed_3form(alg, alg.metric());
            SearchConfig cfg;
            cfg.starts = starts;
            cfg.seed = G.seed;
            cfg.tol = tolerances().search;
            cfg.jobs = G.jobs;
            SearchOutcome s = least_squares_search(assemble_einstein_system(pf, dp), cfg);
            Record r = record(alg_name + "/" + what, "search " + what, alg_name);
            r.verdict = Verdict::Info;
            r.observed = s.found() ? "found" : "not-found";
            r.residuals = {{"best_residual", s.best_residual}};
            r.details = search_json(s);
            r.details["space_dim"] = pf.size();
            if (s.found()) r.details["phi"] = form_json(pf.instantiate(s.rho));
            rep.config.starts = starts;
            rep.records.push_back(r);
            rc = emit(rep, true);
        });
    }

    // verify-paper
    std::string suite = "all";
    int vstarts = 100;
    auto* verify = app.add_subcommand("verify-paper", "run the verification suites");
    verify->add_option("--suite", suite, "suite name or 'all'");
    verify->add_option("--starts", vstarts, "multistart count for searches")->check(CLI::PositiveNumber);
    verify->callback([&] {
        SuiteContext ctx;
        ctx.catalog = &catalog();
        apply_tolerances(ctx.config);
        ctx.config.starts = vstarts;
        Report rep = run_suite(suite, ctx);
        rc = emit(rep);
    });

    // constants
    std::string constants_out;
    auto* constants = app.add_subcommand("constants", "regenerate Einstein constants of every catalog entry");
    constants->add_option("--write", constants_out, "output file (default: stdout)");
    constants->callback([&] {
        json j = einstein_constants(catalog());
        if (constants_out.empty()) {
            std::cout << j.dump(1) << "\n";
        } else {
            std::ofstream f(constants_out);
            if (!f) throw Error("cannot write " + constants_out);
            f << j.dump(1) << "\n";
        }
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const UnknownAlgebra& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const ConstraintError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const DimensionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return rc;
}
