#include "spikedlr/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace spikedlr::serialize {

using nlohmann::json;

namespace {

std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

json spec_to_json(const CaseSpec& spec) {
    return json{{"case", to_string(spec.case_id)},
                {"p", spec.p},
                {"n1", spec.n1},
                {"n2", spec.n2}};
}

CaseSpec spec_from_json(const json& j) {
    CaseSpec spec;
    spec.case_id = case_from_string(j.at("case").get<std::string>());
    spec.p = j.at("p").get<int>();
    spec.n1 = j.value("n1", 0);
    spec.n2 = j.value("n2", 0);
    if (!spec.uses_n1() && spec.n1 == 0) spec.n1 = spec.p + 1;
    spec.validate();
    return spec;
}

}  // namespace

std::string eigensample_to_json(const ensembles::EigenSample& s) {
    json j = spec_to_json(s.spec);
    j["version"] = kVersion;
    j["theta"] = s.theta_true;
    j["seed"] = s.seed;
    j["values"] = s.values;
    return j.dump(2) + "\n";
}

ensembles::EigenSample eigensample_from_json(const std::string& text) {
    json j = json::parse(text);
    ensembles::EigenSample s;
    s.spec = spec_from_json(j);
    s.theta_true = j.at("theta").get<double>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.values = j.at("values").get<std::vector<double>>();
    if (static_cast<int>(s.values.size()) != s.spec.p)
        throw ValidationError("eigensample: values length differs from p");
    for (std::size_t i = 1; i < s.values.size(); ++i)
        if (s.values[i] > s.values[i - 1])
            throw ValidationError("eigensample: values must be descending");
    return s;
}

std::string eigensample_to_csv(const ensembles::EigenSample& s) {
    std::ostringstream os;
    os << "# " << kVersion << " eigensample case=" << to_string(s.spec.case_id)
       << " p=" << s.spec.p << " n1=" << s.spec.n1 << " n2=" << s.spec.n2
       << " theta=" << fmt17(s.theta_true) << " seed=" << s.seed << "\n";
    os << "lambda\n";
    for (double v : s.values) os << fmt17(v) << "\n";
    return os.str();
}

std::string mc_summary_to_json(const inference::MCSummary& s) {
    json j;
    j["version"] = kVersion;
    json cfg = spec_to_json(s.config.spec);
    cfg["theta_grid"] = s.config.theta_grid;
    cfg["theta_true"] = s.config.theta_true;
    cfg["replicates"] = s.config.replicates;
    cfg["seed"] = s.config.seed;
    cfg["workers"] = s.config.workers;
    cfg["alpha"] = s.config.alpha;
    cfg["also_laplace"] = s.config.also_laplace;
    j["config"] = cfg;
    json rows = json::array();
    for (const auto& t : s.per_theta) {
        json row{{"theta", t.theta},
                 {"delta_p", t.delta_p},
                 {"pred_mean", t.pred_mean},
                 {"pred_variance", t.pred_variance},
                 {"mean_lnL", t.mean_lnL},
                 {"var_lnL", t.var_lnL},
                 {"ks_to_normal", t.ks_to_normal},
                 {"mean_L", t.mean_L},
                 {"reject_rate", t.reject_rate},
                 {"flagged", t.flagged}};
        if (s.config.also_laplace) row["mean_lnL_laplace"] = t.mean_lnL_laplace;
        rows.push_back(row);
    }
    j["per_theta"] = rows;
    j["lnL_cov"] = s.lnL_cov;
    return j.dump(2) + "\n";
}

std::string mc_replicates_to_csv(const inference::MCSummary& s) {
    std::ostringstream os;
    os << "# " << kVersion << " lnL replicates case=" << to_string(s.config.spec.case_id)
       << " seed=" << s.config.seed << "\n";
    os << "replicate";
    for (double th : s.config.theta_grid) os << ",lnL_theta=" << fmt17(th);
    os << "\n";
    for (std::size_t r = 0; r < s.lnL.size(); ++r) {
        os << r;
        for (double v : s.lnL[r]) os << "," << fmt17(v);
        os << "\n";
    }
    return os.str();
}

inference::MCConfig mc_config_from_json(const std::string& text) {
    json j = json::parse(text);
    static const std::set<std::string> known = {
        "case", "p",   "n1",         "n2",   "theta_grid", "theta_true",
        "replicates",  "seed", "workers",    "alpha", "also_laplace", "output",
        "replicates_csv"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key()))
            throw ValidationError("mc config: unknown key '" + it.key() + "'");
    inference::MCConfig cfg;
    cfg.spec = spec_from_json(j);
    if (j.contains("theta_grid")) cfg.theta_grid = j["theta_grid"].get<std::vector<double>>();
    cfg.theta_true = j.value("theta_true", 0.0);
    cfg.replicates = j.value("replicates", 100);
    cfg.seed = j.value("seed", std::uint64_t{0});
    cfg.workers = j.value("workers", 0);
    cfg.alpha = j.value("alpha", 0.05);
    cfg.also_laplace = j.value("also_laplace", false);
    return cfg;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot read file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write file: " + path);
    out << content;
}

}  // namespace spikedlr::serialize
