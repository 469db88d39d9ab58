#pragma once
#include <algorithm>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "catalog.hpp"
#include "json.hpp"

namespace g2forge {

inline constexpr const char* kVersion = "0.3.0";

enum class Verdict { Pass, Fail, Info };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        case Verdict::Info: return "info";
    }
    return "?";
}

inline Verdict verdict_from_string(const std::string& s) {
    if (s == "pass") return Verdict::Pass;
    if (s == "fail") return Verdict::Fail;
    if (s == "info") return Verdict::Info;
    throw ParseError("unknown verdict " + s);
}

inline std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

struct Record {
    std::string name;
    std::string ref;     // suite / statement this record replays
    std::string source;  // catalog source annotation of the entry involved
    Verdict verdict = Verdict::Info;
    std::string expected, observed;
    nlohmann::json residuals = nlohmann::json::object();
    nlohmann::json details = nlohmann::json::object();
    double runtime_ms = 0.0;
};

struct RunConfig {
    Tolerances tol;
    std::uint64_t seed = 7;
    int jobs = 1;
    int starts = 100;
    std::string output;
};

struct Report {
    std::string tool = "g2forge";
    std::string version = kVersion;
    std::string catalog_hash;
    std::string suite;
    RunConfig config;
    std::vector<Record> records;

    bool all_pass() const {
        return std::none_of(records.begin(), records.end(), [](const Record& r) { return r.verdict == Verdict::Fail; });
    }
    void sort() {
        std::stable_sort(records.begin(), records.end(), [](const Record& a, const Record& b) { return a.name < b.name; });
    }
};

inline nlohmann::json to_json(const Record& r, bool timing = true) {
    nlohmann::json j{{"name", r.name},         {"ref", r.ref},           {"source", r.source},
                     {"verdict", to_string(r.verdict)}, {"expected", r.expected}, {"observed", r.observed},
                     {"residuals", r.residuals}, {"details", r.details}};
    if (timing) j["runtime_ms"] = r.runtime_ms;
    return j;
}

inline nlohmann::json to_json(const RunConfig& c) {
    return {{"tolerances",
             {{"eps", c.tol.eps},
              {"einstein", c.tol.einstein},
              {"ricci_agree", c.tol.ricci_agree},
              {"soliton", c.tol.soliton},
              {"search", c.tol.search},
              {"proportional", c.tol.proportional}}},
            {"seed", c.seed},
            {"jobs", c.jobs},
            {"starts", c.starts},
            {"output", c.output}};
}

inline nlohmann::json to_json(const Report& rep, bool timing = true) {
    nlohmann::json j{{"tool", rep.tool},   {"version", rep.version}, {"catalog_hash", rep.catalog_hash},
                     {"suite", rep.suite}, {"config", to_json(rep.config)}, {"all_pass", rep.all_pass()}};
    j["records"] = nlohmann::json::array();
    for (auto& r : rep.records) j["records"].push_back(to_json(r, timing));
    return j;
}

inline Report report_from_json(const nlohmann::json& j) {
    Report rep;
    try {
        rep.tool = j.at("tool");
        rep.version = j.at("version");
        rep.catalog_hash = j.at("catalog_hash");
        rep.suite = j.at("suite");
        const auto& c = j.at("config");
        const auto& t = c.at("tolerances");
        rep.config.tol = {t.at("eps"), t.at("einstein"), t.at("ricci_agree"), t.at("soliton"), t.at("search"),
                          t.at("proportional")};
        rep.config.seed = c.at("seed");
        rep.config.jobs = c.at("jobs");
        rep.config.starts = c.at("starts");
        rep.config.output = c.at("output");
        for (auto& r : j.at("records")) {
            Record rec;
            rec.name = r.at("name");
            rec.ref = r.at("ref");
            rec.source = r.at("source");
            rec.verdict = verdict_from_string(r.at("verdict"));
            rec.expected = r.at("expected");
            rec.observed = r.at("observed");
            rec.residuals = r.at("residuals");
            rec.details = r.at("details");
            rec.runtime_ms = r.value("runtime_ms", 0.0);
            rep.records.push_back(rec);
        }
    } catch (const nlohmann::json::exception& ex) {
        throw ParseError(std::string("report: ") + ex.what());
    }
    return rep;
}

inline std::string to_markdown(const Report& rep) {
    std::ostringstream os;
    os << "# " << rep.tool << " " << rep.version << " report";
    if (!rep.suite.empty()) os << ": " << rep.suite;
    os << "\n\ncatalog hash `" << rep.catalog_hash << "`, seed " << rep.config.seed << ", jobs " << rep.config.jobs
       << "\n\n| name | verdict | expected | observed | source |\n|---|---|---|---|---|\n";
    for (auto& r : rep.records)
        os << "| " << r.name << " | " << to_string(r.verdict) << " | " << r.expected << " | " << r.observed << " | "
           << r.source << " |\n";
    os << "\n" << (rep.all_pass() ? "all checks pass" : "some checks FAIL") << "\n";
    return os.str();
}

}  // namespace g2forge
