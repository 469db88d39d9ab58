#pragma once
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "expr.hpp"
#include "json.hpp"
#include "liealg.hpp"

namespace g2forge {

struct ParamSpec {
    std::string name;
    double default_value = 0.0;
};

struct SampleBinding {
    std::string name;
    Vars bindings;
};

struct DTerm {
    int k = 0, i = 0, j = 0;
    std::string coeff;
};

struct CatalogEntry {
    std::string name;
    int dim = 0;
    std::vector<ParamSpec> params;
    std::vector<std::string> constraints;  // "x = expr": x is solved for unless bound
    std::vector<std::string> conditions;   // "lhs = rhs": checked only
    std::vector<DTerm> d;
    std::string source;
    std::vector<SampleBinding> samples;
    std::string paper_typo;
    std::string note;

    bool has_param(const std::string& p) const {
        for (auto& s : params)
            if (s.name == p) return true;
        return false;
    }
};

inline CatalogEntry entry_from_json(const nlohmann::json& j) {
    CatalogEntry e;
    try {
        e.name = j.at("name").get<std::string>();
        e.dim = j.at("dim").get<int>();
        for (auto& p : j.at("params")) e.params.push_back({p.at("name").get<std::string>(), p.at("default").get<double>()});
        for (auto& c : j.value("constraints", nlohmann::json::array())) e.constraints.push_back(c.get<std::string>());
        for (auto& c : j.value("conditions", nlohmann::json::array())) e.conditions.push_back(c.get<std::string>());
        for (auto& t : j.at("d")) e.d.push_back({t.at(0).get<int>(), t.at(1).get<int>(), t.at(2).get<int>(), t.at(3).get<std::string>()});
        e.source = j.value("source", "");
        e.paper_typo = j.value("paper_typo", "");
        e.note = j.value("note", "");
        for (auto& s : j.value("samples", nlohmann::json::array())) {
            SampleBinding sb;
            sb.name = s.at("name").get<std::string>();
            for (auto& [k, v] : s.at("bindings").items()) sb.bindings[k] = v.get<double>();
            e.samples.push_back(sb);
        }
    } catch (const nlohmann::json::exception& ex) {
        throw ParseError(std::string("catalog entry: ") + ex.what());
    }
    if (e.dim < 1 || e.dim > kMaxDim) throw ParseError("catalog entry " + e.name + ": bad dimension");
    for (auto& t : e.d)
        if (t.k < 1 || t.k > e.dim || t.i < 1 || t.j <= t.i || t.j > e.dim)
            throw ParseError("catalog entry " + e.name + ": bad differential term");
    return e;
}

inline nlohmann::json entry_to_json(const CatalogEntry& e) {
    nlohmann::json j;
    j["name"] = e.name;
    j["dim"] = e.dim;
    j["params"] = nlohmann::json::array();
    for (auto& p : e.params) j["params"].push_back({{"name", p.name}, {"default", p.default_value}});
    j["constraints"] = e.constraints;
    if (!e.conditions.empty()) j["conditions"] = e.conditions;
    j["d"] = nlohmann::json::array();
    for (auto& t : e.d) j["d"].push_back({t.k, t.i, t.j, t.coeff});
    j["source"] = e.source;
    if (!e.samples.empty()) {
        j["samples"] = nlohmann::json::array();
        for (auto& s : e.samples) j["samples"].push_back({{"name", s.name}, {"bindings", s.bindings}});
    }
    if (!e.paper_typo.empty()) j["paper_typo"] = e.paper_typo;
    if (!e.note.empty()) j["note"] = e.note;
    return j;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

#ifndef G2FORGE_DATA_DIR
#define G2FORGE_DATA_DIR "data"
#endif

inline std::string data_dir() {
    if (const char* env = std::getenv("G2FORGE_DATA")) return env;
    return G2FORGE_DATA_DIR;
}

inline std::string default_catalog_path() {
    if (const char* env = std::getenv("G2FORGE_CATALOG")) return env;
    return data_dir() + "/catalog.json";
}

class Catalog {
public:
    Catalog() = default;
    explicit Catalog(std::vector<CatalogEntry> entries, std::string raw = "")
        : entries_(std::move(entries)), raw_(std::move(raw)) {}

    const std::vector<CatalogEntry>& entries() const { return entries_; }
    const std::string& raw() const { return raw_; }

    const CatalogEntry& get(const std::string& name) const {
        for (auto& e : entries_)
            if (e.name == name) return e;
        throw UnknownAlgebra("unknown algebra: " + name);
    }
    bool contains(const std::string& name) const {
        for (auto& e : entries_)
            if (e.name == name) return true;
        return false;
    }

    // FNV-1a over the file bytes
    std::string hash() const {
        std::uint64_t h = 1469598103934665603ull;
        for (unsigned char c : raw_) {
            h ^= c;
            h *= 1099511628211ull;
        }
        std::ostringstream os;
        os << std::hex << h;
        return os.str();
    }

private:
    std::vector<CatalogEntry> entries_;
    std::string raw_;
};

inline Catalog load_catalog(const std::string& path) {
    std::string raw = read_file(path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(raw);
    } catch (const nlohmann::json::exception& ex) {
        throw ParseError("catalog " + path + ": " + ex.what());
    }
    std::vector<CatalogEntry> out;
    for (auto& x : j) out.push_back(entry_from_json(x));
    return Catalog(std::move(out), raw);
}

inline const Catalog& default_catalog() {
    static Catalog c = load_catalog(default_catalog_path());
    return c;
}

namespace detail {
inline std::pair<std::string, std::string> split_eq(const std::string& s) {
    auto pos = s.find('=');
    if (pos == std::string::npos) throw ParseError("constraint without '=': " + s);
    auto trim = [](std::string x) {
        auto a = x.find_first_not_of(" \t");
        auto b = x.find_last_not_of(" \t");
        return a == std::string::npos ? std::string() : x.substr(a, b - a + 1);
    };
    return {trim(s.substr(0, pos)), trim(s.substr(pos + 1))};
}
inline bool close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }
}  // namespace detail

// Defaults overlaid by the given bindings, dependent parameters solved, conditions checked.
inline Vars resolve_bindings(const CatalogEntry& e, const Vars& bindings, double tol = 1e-9) {
    Vars v;
    for (auto& p : e.params) v[p.name] = p.default_value;
    for (auto& [k, val] : bindings) {
        if (!e.has_param(k)) throw ConstraintError(e.name + ": unknown parameter " + k);
        v[k] = val;
    }
    for (auto& c : e.constraints) {
        auto [lhs, rhs] = detail::split_eq(c);
        double val;
        try {
            val = eval_scalar(rhs, v);
        } catch (const ParseError& ex) {
            throw ConstraintError(e.name + ": constraint '" + c + "': " + ex.what());
        }
        if (!std::isfinite(val)) throw ConstraintError(e.name + ": constraint '" + c + "' has no real solution");
        if (bindings.count(lhs)) {
            if (!detail::close(bindings.at(lhs), val, tol))
                throw ConstraintError(e.name + ": binding " + lhs + " violates '" + c + "'");
        }
        v[lhs] = val;
    }
    for (auto& c : e.conditions) {
        auto [lhs, rhs] = detail::split_eq(c);
        double a = eval_scalar(lhs, v), b = eval_scalar(rhs, v);
        if (!detail::close(a, b, tol)) throw ConstraintError(e.name + ": condition '" + c + "' fails");
    }
    return v;
}

inline LieAlgebra instantiate(const CatalogEntry& e, const Vars& bindings = {}, bool check_jacobi = true) {
    Vars v = resolve_bindings(e, bindings);
    std::vector<Form> de(e.dim, Form(e.dim, 2));
    for (auto& t : e.d) de[t.k - 1].add(mask_of({t.i, t.j}), eval_scalar(t.coeff, v));
    LieAlgebra g(e.name, de);
    if (check_jacobi) {
        auto jr = jacobi_check(g);
        if (!jr.pass) throw InternalError(e.name + ": Jacobi identity fails (residual " + std::to_string(jr.residual) + ")");
    }
    return g;
}

inline LieAlgebra instantiate(const CatalogEntry& e, const SampleBinding& s) { return instantiate(e, s.bindings); }

}  // namespace g2forge
