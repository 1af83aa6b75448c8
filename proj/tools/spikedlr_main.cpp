// Command-line front end: sampling, spectral tables, likelihood-ratio
// evaluation, power envelopes, Monte Carlo runs and a self-check suite.

#include <CLI11.hpp>
#include <json.hpp>

#include <complex>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "spikedlr/ensembles.hpp"
#include "spikedlr/inference.hpp"
#include "spikedlr/lrengine.hpp"
#include "spikedlr/rng.hpp"
#include "spikedlr/serialize.hpp"
#include "spikedlr/specfun.hpp"
#include "spikedlr/spectra.hpp"
#include "spikedlr/stats.hpp"

using namespace spikedlr;
using nlohmann::json;

namespace {

std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void emit(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-")
        std::cout << content;
    else
        serialize::write_file(path, content);
}

std::uint64_t resolve_seed(std::uint64_t seed) {
    if (const char* env = std::getenv("SPIKEDLR_SEED")) return std::strtoull(env, nullptr, 10);
    return seed;
}

CaseSpec build_spec(const std::string& cs, int p, int n1, int n2) {
    CaseSpec spec;
    spec.case_id = case_from_string(cs);
    spec.p = p;
    spec.n1 = n1;
    spec.n2 = n2;
    if (!spec.uses_n1() && spec.n1 == 0) spec.n1 = p + 1;
    spec.validate();
    return spec;
}

int cmd_sample(const std::string& cs, int p, int n1, int n2, double theta,
               std::uint64_t seed, const std::string& out, const std::string& csv) {
    const CaseSpec spec = build_spec(cs, p, n1, n2);
    ensembles::SpikeParam spike;
    spike.theta = theta;
    const auto sample = ensembles::sample_case(spec, spike, resolve_seed(seed));
    if (!csv.empty()) emit(csv, serialize::eigensample_to_csv(sample));
    if (csv.empty() || !out.empty()) emit(out, serialize::eigensample_to_json(sample));
    return 0;
}

int cmd_spectrum(const std::string& law_name, double c1, double c2, int grid,
                 const std::string& out) {
    spectra::LimitLaw law;
    if (law_name == "sc")
        law = spectra::LimitLaw::semicircle();
    else if (law_name == "mp")
        law = spectra::LimitLaw::marchenko_pastur(c1);
    else if (law_name == "w")
        law = spectra::LimitLaw::wachter(c1, c2);
    else
        throw ValidationError("spectrum law must be one of sc, mp, w");
    const auto [lo, hi] = spectra::support(law);
    std::ostringstream os;
    os << "# " << kVersion << " spectrum law=" << law_name << " c1=" << fmt17(c1)
       << " c2=" << fmt17(c2) << " support=[" << fmt17(lo) << "," << fmt17(hi) << "]"
       << " threshold=" << fmt17(spectra::threshold(law)) << "\n";
    os << "lambda,density\n";
    for (int i = 0; i < grid; ++i) {
        const double lam = lo + (hi - lo) * i / (grid - 1);
        os << fmt17(lam) << "," << fmt17(spectra::density(law, lam)) << "\n";
    }
    emit(out, os.str());
    return 0;
}

int cmd_lr(const std::string& cs, int p, int n1, int n2, double theta, double theta_true,
           std::uint64_t seed, const std::string& method, const std::string& eigs_file,
           const std::string& out) {
    ensembles::EigenSample sample;
    if (!eigs_file.empty()) {
        sample = serialize::eigensample_from_json(serialize::read_file(eigs_file));
    } else {
        const CaseSpec spec = build_spec(cs, p, n1, n2);
        ensembles::SpikeParam spike;
        spike.theta = theta_true;
        sample = ensembles::sample_case(spec, spike, resolve_seed(seed));
    }
    const CaseSpec& spec = sample.spec;

    json j;
    j["version"] = kVersion;
    j["config"] = {{"case", to_string(spec.case_id)},
                   {"p", spec.p},
                   {"n1", spec.n1},
                   {"n2", spec.n2},
                   {"theta", theta},
                   {"theta_true", sample.theta_true},
                   {"seed", sample.seed},
                   {"method", method}};
    j["z0"] = lrengine::saddle_z0(spec, theta);
    const auto dp = lrengine::delta_p(spec, theta, sample);
    j["delta_p"] = dp.value;
    j["flags"] = json::object();
    j["flags"]["gII_unity"] = dp.flagged;

    const bool all = method == "all";
    if (all || method == "laplace")
        j["logL_laplace"] = lrengine::lr_laplace(spec, theta, sample).log_value;
    if (all || method == "asymptotic")
        j["logL_asymptotic"] = lrengine::lr_asymptotic(spec, theta, sample).log_value;
    if (all || method == "quadrature") {
        const auto r = lrengine::lr_quadrature(spec, theta, sample);
        j["flags"]["enclosure_ok"] = r.enclosure_ok;
        if (r.enclosure_ok) j["logL_quadrature"] = r.log_value;
    }
    emit(out, j.dump(2) + "\n");
    return 0;
}

int cmd_envelope(const std::string& cs, double alpha, double g1, double g2, int grid,
                 const std::string& out) {
    const CaseId id = case_from_string(cs);
    double tbar;
    switch (id) {
        case CaseId::SMD: tbar = 1.0; break;
        case CaseId::PCA:
        case CaseId::REG0: tbar = std::sqrt(g1); break;
        default: tbar = (g2 + std::sqrt(g1 + g2 - g1 * g2)) / (1.0 - g2);
    }
    std::ostringstream os;
    os << "# " << kVersion << " envelope case=" << to_string(id) << " alpha=" << fmt17(alpha)
       << " gamma1=" << fmt17(g1) << " gamma2=" << fmt17(g2) << " threshold=" << fmt17(tbar)
       << "\n";
    os << "theta,power_envelope\n";
    for (int i = 0; i < grid; ++i) {
        const double th = tbar * i / (grid - 1);
        os << fmt17(th) << "," << fmt17(inference::power_envelope(id, th, alpha, g1, g2))
           << "\n";
    }
    emit(out, os.str());
    return 0;
}

int cmd_mc(const std::string& config_path, const std::string& out_flag) {
    const std::string text = serialize::read_file(config_path);
    inference::MCConfig cfg = serialize::mc_config_from_json(text);
    cfg.seed = resolve_seed(cfg.seed);
    const json raw = json::parse(text);
    const auto summary = inference::monte_carlo(cfg);
    std::string out = out_flag;
    if (out.empty()) out = raw.value("output", std::string{});
    emit(out, serialize::mc_summary_to_json(summary));
    if (raw.contains("replicates_csv"))
        serialize::write_file(raw["replicates_csv"].get<std::string>(),
                              serialize::mc_replicates_to_csv(summary));
    return 0;
}

// ---------------------------------------------------------------------------
// verify: condensed invariant suite, one PASS/FAIL line per block
// ---------------------------------------------------------------------------

struct Verifier {
    int failures = 0;
    void check(const std::string& name, bool ok, const std::string& detail = "") {
        std::cout << (ok ? "[PASS] " : "[FAIL] ") << name;
        if (!detail.empty()) std::cout << " (" << detail << ")";
        std::cout << "\n";
        if (!ok) ++failures;
    }
};

CaseSpec default_spec(CaseId id, int p) {
    CaseSpec spec;
    spec.case_id = id;
    spec.p = p;
    spec.n1 = 2 * p;
    spec.n2 = 2 * p;
    return spec;
}

const CaseId kCases[] = {CaseId::SMD,  CaseId::PCA, CaseId::SigD,
                         CaseId::REG0, CaseId::REG, CaseId::CCA};

void verify_quick(Verifier& v) {
    {
        bool ok = true;
        for (double c2 : {0.1, 0.5, 0.9, 1.0}) {
            const auto law = spectra::LimitLaw::wachter(0.5, c2);
            ok = ok && std::fabs(spectra::lss_expectation(law, [](double) { return 1.0; }) -
                                 1.0) < 1e-8;
        }
        v.check("density normalization over c-grid", ok);
    }
    {
        const double th = spectra::threshold(spectra::LimitLaw::wachter(0.9, 0.9));
        v.check("W threshold at gamma1=gamma2=0.9 ~= 18.9499",
                std::fabs(th - 18.9499) < 0.01, fmt17(th));
    }
    {
        const double pe0 = inference::power_envelope(CaseId::SigD, 0.0, 0.05, 0.9, 0.9);
        v.check("PE(0) = alpha", pe0 == 0.05);
        bool mono = true;
        double prev = 0.0;
        for (int i = 0; i <= 100; ++i) {
            const double pe =
                inference::power_envelope(CaseId::SigD, 18.9 * i / 100.0, 0.05, 0.9, 0.9);
            mono = mono && pe >= prev;
            prev = pe;
        }
        v.check("PE monotone on [0, theta_bar)", mono);
    }
    for (CaseId id : kCases) {
        const CaseSpec spec = default_spec(id, 24);
        const double tbar = lrengine::theta_bar_p(spec);
        bool f0 = true, saddle = true, steep = true, d2ok = true;
        for (double frac : {0.3, 0.6, 0.9}) {
            const double th = frac * tbar;
            const lrengine::LaplaceForm lf(spec, th);
            f0 = f0 && std::abs(lf.f(lf.z0())) < 1e-7;
            const double mc =
                spectra::stieltjes(spectra::limit_law_for(spec), lf.z0()).real();
            saddle = saddle && std::fabs(mc - lf.fIII_deriv2(lf.z0())) <
                                   1e-8 * std::max(1.0, std::fabs(mc));
            const auto path = lrengine::contour(spec, th);
            double prev = lf.re_f(path.k1(0.0));
            for (int i = 1; i <= 20; ++i) {
                const double cur = lf.re_f(path.k1(i / 20.0));
                steep = steep && cur > prev;
                prev = cur;
            }
            const double h = 1e-4 * std::max(1.0, lf.z0());
            const double fd =
                (lf.f(lf.z0() + h) + lf.f(lf.z0() - h) - 2.0 * lf.f(lf.z0())).real() /
                (h * h);
            d2ok = d2ok && std::fabs(fd + th * th / (2.0 * lrengine::d2(spec, th))) <
                               2e-4 * std::fabs(fd) + 1e-9;
        }
        const std::string tag = to_string(id);
        v.check(tag + ": f(z0) = 0", f0);
        v.check(tag + ": m_c(z0) = 2 f_III'(z0)", saddle);
        v.check(tag + ": steep descent along K1", steep);
        v.check(tag + ": Table 5 second derivative", d2ok);
    }
    {
        const auto e0 = specfun::hyp_log_0f1(201.0, 200.0 * 200.0 * 0.5);
        const double r0 =
            std::abs(std::exp(specfun::approx_0F1_log(200.0, 0.5) - e0.log_value) - 1.0);
        const auto e1 = specfun::hyp_log_1f1(401.0, 201.0, 200.0 * 0.8);
        const double r1 = std::abs(
            std::exp(specfun::approx_Fj_log(1, 200.0, 2.0, 0.8) - e1.log_value) - 1.0);
        const auto e2 = specfun::hyp_log_2f1(401.0, 401.0, 201.0, 0.3);
        const double r2 = std::abs(
            std::exp(specfun::approx_Fj_log(2, 200.0, 2.0, 0.3) - e2.log_value) - 1.0);
        v.check("Lemma 2/3 approximations at m=200 within 1e-2",
                r0 <= 1e-2 && r1 <= 1e-2 && r2 <= 1e-2);
    }
}

void verify_full(Verifier& v) {
    for (CaseId id : kCases) {
        const CaseSpec spec = default_spec(id, 16);
        const double th = 0.5 * lrengine::theta_bar_p(spec);
        std::vector<double> gaps;
        for (int r = 0; r < 6; ++r) {
            const auto sample =
                ensembles::sample_case(spec, ensembles::SpikeParam{}, derive_seed(2222, r));
            try {
                const auto q = lrengine::lr_quadrature(spec, th, sample);
                if (!q.enclosure_ok) continue;
                const auto l = lrengine::lr_laplace(spec, th, sample);
                gaps.push_back(std::fabs(std::exp(l.log_value - q.log_value) - 1.0));
            } catch (const DomainError&) {
            }
        }
        v.check(std::string(to_string(id)) + ": laplace vs quadrature at p=16",
                gaps.size() >= 4 && median_of(gaps) <= 0.2,
                gaps.empty() ? "no usable replicates" : fmt17(median_of(gaps)));
    }
    {
        inference::MCConfig cfg;
        cfg.spec = default_spec(CaseId::PCA, 400);
        cfg.theta_grid = {0.5};
        cfg.replicates = 1000;
        cfg.seed = 909;
        const auto s = inference::monte_carlo(cfg);
        const auto& t = s.per_theta[0];
        v.check("PCA p=400 null mean lnL within pred +- 0.04",
                std::fabs(t.mean_lnL - t.pred_mean) < 0.04, fmt17(t.mean_lnL));
        v.check("PCA p=400 null var lnL within pred +- 0.06",
                std::fabs(t.var_lnL - t.pred_variance) < 0.06, fmt17(t.var_lnL));
        v.check("PCA p=400 martingale mean L in [0.9, 1.1]",
                t.mean_L > 0.9 && t.mean_L < 1.1, fmt17(t.mean_L));
    }
}

int cmd_verify(const std::string& level, const std::string& specfun_csv) {
    if (!specfun_csv.empty()) {
        std::ostringstream os;
        os << "m,kind,eta_re,eta_im,series_log_re,approx_log_re,relerr\n";
        for (double m : {50.0, 100.0, 200.0, 400.0}) {
            for (double eta : {0.1, 0.3, 0.5, 1.0}) {
                const auto s0 = specfun::hyp_log_0f1(m + 1.0, m * m * eta);
                const auto a0 = specfun::approx_0F1_log(m, eta);
                os << m << ",0F1," << eta << ",0," << fmt17(s0.log_value.real()) << ","
                   << fmt17(a0.real()) << ","
                   << fmt17(std::abs(std::exp(a0 - s0.log_value) - 1.0)) << "\n";
                const auto s1 = specfun::hyp_log_1f1(2.0 * m + 1.0, m + 1.0, m * eta);
                const auto a1 = specfun::approx_Fj_log(1, m, 2.0, eta);
                os << m << ",1F1," << eta << ",0," << fmt17(s1.log_value.real()) << ","
                   << fmt17(a1.real()) << ","
                   << fmt17(std::abs(std::exp(a1 - s1.log_value) - 1.0)) << "\n";
                const double e2 = 0.5 * eta;
                const auto s2 =
                    specfun::hyp_log_2f1(2.0 * m + 1.0, 2.0 * m + 1.0, m + 1.0, e2);
                const auto a2 = specfun::approx_Fj_log(2, m, 2.0, e2);
                os << m << ",2F1," << e2 << ",0," << fmt17(s2.log_value.real()) << ","
                   << fmt17(a2.real()) << ","
                   << fmt17(std::abs(std::exp(a2 - s2.log_value) - 1.0)) << "\n";
            }
        }
        serialize::write_file(specfun_csv, os.str());
    }
    Verifier v;
    verify_quick(v);
    if (level == "full") verify_full(v);
    if (v.failures == 0)
        std::cout << "ALL CHECKS PASSED\n";
    else
        std::cout << "FAILURES: " << v.failures << "\n";
    return v.failures == 0 ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spikedlr: likelihood ratios for rank-one spiked eigenvalue models"};
    app.require_subcommand(1);

    auto* sample = app.add_subcommand("sample", "draw an eigenvalue sample");
    std::string s_case = "pca", s_out, s_csv;
    int s_p = 100, s_n1 = 0, s_n2 = 0;
    double s_theta = 0.0;
    std::uint64_t s_seed = 0;
    sample->add_option("--case", s_case, "case id")->required();
    sample->add_option("--p", s_p, "dimension")->required();
    sample->add_option("--n1", s_n1, "first degrees of freedom");
    sample->add_option("--n2", s_n2, "second degrees of freedom");
    sample->add_option("--theta", s_theta, "true spike");
    sample->add_option("--seed", s_seed, "rng seed");
    sample->add_option("--out", s_out, "JSON output path (default stdout)");
    sample->add_option("--csv", s_csv, "CSV output path");

    auto* spectrum = app.add_subcommand("spectrum", "limiting density table");
    std::string sp_law = "mp", sp_out;
    double sp_c1 = 0.5, sp_c2 = 0.5;
    int sp_grid = 200;
    spectrum->add_option("--law", sp_law, "sc, mp or w")->required();
    spectrum->add_option("--c1", sp_c1, "ratio p/n1");
    spectrum->add_option("--c2", sp_c2, "ratio p/n2");
    spectrum->add_option("--grid", sp_grid, "number of rows");
    spectrum->add_option("--out", sp_out, "CSV output path (default stdout)");

    auto* lr = app.add_subcommand("lr", "evaluate the likelihood ratio");
    std::string l_case = "smd", l_method = "all", l_eigs, l_out;
    int l_p = 40, l_n1 = 0, l_n2 = 0;
    double l_theta = 0.5, l_theta_true = 0.0;
    std::uint64_t l_seed = 0;
    lr->add_option("--case", l_case, "case id");
    lr->add_option("--p", l_p, "dimension");
    lr->add_option("--n1", l_n1, "first degrees of freedom");
    lr->add_option("--n2", l_n2, "second degrees of freedom");
    lr->add_option("--theta", l_theta, "test point")->required();
    lr->add_option("--theta-true", l_theta_true, "true spike for sampling");
    lr->add_option("--seed", l_seed, "rng seed");
    lr->add_option("--method", l_method, "laplace|quadrature|asymptotic|all")
        ->check(CLI::IsMember({"laplace", "quadrature", "asymptotic", "all"}));
    lr->add_option("--eigs", l_eigs, "read the EigenSample from a JSON file");
    lr->add_option("--out", l_out, "JSON output path (default stdout)");

    auto* envelope = app.add_subcommand("envelope", "asymptotic power envelope");
    std::string e_case = "pca", e_out;
    double e_alpha = 0.05, e_g1 = 0.5, e_g2 = 0.5;
    int e_grid = 200;
    envelope->add_option("--case", e_case, "case id")->required();
    envelope->add_option("--alpha", e_alpha, "asymptotic size");
    envelope->add_option("--gamma1", e_g1, "limit of p/n1");
    envelope->add_option("--gamma2", e_g2, "limit of p/n2");
    envelope->add_option("--grid", e_grid, "number of rows");
    envelope->add_option("--out", e_out, "CSV output path (default stdout)");

    auto* mc = app.add_subcommand("mc", "Monte Carlo verification run");
    std::string m_config, m_out;
    mc->add_option("--config", m_config, "JSON config path")->required();
    mc->add_option("--out", m_out, "summary output path (overrides config)");

    auto* verify = app.add_subcommand("verify", "run the invariant suite");
    std::string v_level = "quick", v_specfun_csv;
    verify->add_option("--level", v_level, "quick or full")
        ->check(CLI::IsMember({"quick", "full"}));
    verify->add_option("--specfun-csv", v_specfun_csv,
                       "dump (m, eta, series, approx, relerr) sweeps to a CSV file");

    try {
        app.parse(argc, argv);
        if (*sample)
            return cmd_sample(s_case, s_p, s_n1, s_n2, s_theta, s_seed, s_out, s_csv);
        if (*spectrum) return cmd_spectrum(sp_law, sp_c1, sp_c2, sp_grid, sp_out);
        if (*lr)
            return cmd_lr(l_case, l_p, l_n1, l_n2, l_theta, l_theta_true, l_seed, l_method,
                          l_eigs, l_out);
        if (*envelope) return cmd_envelope(e_case, e_alpha, e_g1, e_g2, e_grid, e_out);
        if (*mc) return cmd_mc(m_config, m_out);
        if (*verify) return cmd_verify(v_level, v_specfun_csv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return 0;  // --help
        std::cerr << "ERR 2: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "ERR 2: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "ERR 3: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "ERR 3: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
