#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "spikedlr/inference.hpp"
#include "spikedlr/lrengine.hpp"
#include "spikedlr/serialize.hpp"
#include "spikedlr/stats.hpp"

using namespace spikedlr;
using namespace spikedlr::inference;

namespace {

CaseSpec make_spec(CaseId id, int p, int n1 = 0, int n2 = 0) {
    CaseSpec spec;
    spec.case_id = id;
    spec.p = p;
    spec.n1 = n1 ? n1 : 2 * p;
    spec.n2 = n2 ? n2 : 2 * p;
    return spec;
}

}  // namespace

TEST_CASE("normal cdf/quantile helpers") {
    CHECK(norm_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(norm_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
    CHECK(norm_quantile(0.05) == doctest::Approx(-1.6448536269514722).epsilon(1e-12));
    for (double p : {1e-9, 0.01, 0.3, 0.5, 0.77, 0.999, 1.0 - 1e-9})
        CHECK(norm_cdf(norm_quantile(p)) == doctest::Approx(p).epsilon(1e-11));
}

TEST_CASE("delta_limit values") {
    CHECK(delta_limit(CaseId::SMD, 0.0, 0.0, 0.0) == 0.0);
    CHECK(delta_limit(CaseId::PCA, 0.5, 0.5, 0.0) ==
          doctest::Approx(0.7071067811865476).epsilon(1e-14));
    // W family: delta(theta_bar) = 1 identity, 20 (g1, g2) pairs
    for (double g1 : {0.1, 0.3, 0.5, 0.7, 0.95}) {
        for (double g2 : {0.2, 0.4, 0.6, 0.8}) {
            const double rho = std::sqrt(g1 + g2 - g1 * g2);
            const double tbar = (g2 + rho) / (1.0 - g2);
            const double d =
                tbar * rho / (g1 + g2 + tbar * g2);  // delta at the threshold
            CHECK(d == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS((void)delta_limit(CaseId::PCA, 0.8, 0.5, 0.0), DomainError);
}

TEST_CASE("limit_law mean/variance and the sign flip") {
    // delta^2 = 0.5
    const double th = std::sqrt(0.5) * std::sqrt(0.5);  // delta = theta/sqrt(g1) => 0.7071
    const GaussianLimit null_law = limit_law(CaseId::PCA, th, 0.5, 0.0, Hypothesis::Null);
    CHECK(null_law.delta == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
    CHECK(null_law.mean == doctest::Approx(0.25 * std::log(0.5)).epsilon(1e-12));
    CHECK(null_law.mean == doctest::Approx(-0.17329).epsilon(1e-4));
    CHECK(null_law.variance == doctest::Approx(-0.5 * std::log(0.5)).epsilon(1e-12));
    CHECK(null_law.variance == doctest::Approx(0.34657).epsilon(1e-4));
    CHECK(null_law.mean == doctest::Approx(-0.5 * null_law.variance).epsilon(1e-12));

    const GaussianLimit alt = limit_law(CaseId::PCA, th, 0.5, 0.0, Hypothesis::Alternative);
    CHECK(alt.mean == doctest::Approx(+0.17329).epsilon(1e-4));
    CHECK(alt.variance == doctest::Approx(null_law.variance).epsilon(1e-15));

    const GaussianLimit degenerate = limit_law(CaseId::SMD, 0.0, 0.0, 0.0);
    CHECK(degenerate.mean == 0.0);
    CHECK(degenerate.variance == 0.0);
}

TEST_CASE("limit_cov") {
    const double th = 0.5;
    CHECK(limit_cov(CaseId::SMD, th, th, 0.0, 0.0) ==
          doctest::Approx(limit_law(CaseId::SMD, th, 0.0, 0.0).variance).epsilon(1e-14));
    // delta1 = delta2 = 0.5
    CHECK(limit_cov(CaseId::SMD, 0.5, 0.5, 0.0, 0.0) ==
          doctest::Approx(-0.5 * std::log(0.75)).epsilon(1e-14));
    CHECK(limit_cov(CaseId::SMD, 0.5, 0.5, 0.0, 0.0) ==
          doctest::Approx(0.14384).epsilon(1e-4));
    CHECK(limit_cov(CaseId::SMD, 0.5, 0.0, 0.0, 0.0) == 0.0);
}

TEST_CASE("power envelope") {
    CHECK(power_envelope(CaseId::PCA, 0.0, 0.05, 0.5, 0.0) ==
          doctest::Approx(0.05).epsilon(1e-12));
    // delta^2 = 0.5, alpha = 0.05: 1 - Phi(1.6449 - 0.58871)
    const double pe = power_envelope(CaseId::SMD, std::sqrt(0.5), 0.05, 0.0, 0.0);
    CHECK(pe == doctest::Approx(1.0 - norm_cdf(norm_quantile(0.95) -
                                               std::sqrt(-0.5 * std::log(0.5))))
                    .epsilon(1e-12));
    CHECK(pe == doctest::Approx(0.1454).epsilon(2e-3));
    // hits one at the threshold
    CHECK(power_envelope(CaseId::SigD, 18.951, 0.05, 0.9, 0.9) == 1.0);
    // monotone below the threshold, 1 at and above it; the approach to 1 is
    // logarithmically slow in delta
    double prev = 0.05;
    for (int i = 1; i <= 40; ++i) {
        const double th = 0.999 * i / 40.0;
        const double v = power_envelope(CaseId::SMD, th, 0.05, 0.0, 0.0);
        CHECK(v >= prev);
        prev = v;
    }
    CHECK(power_envelope(CaseId::SMD, 1.0 - 1e-30, 0.05, 0.0, 0.0) > 0.999);
    CHECK(power_envelope(CaseId::SMD, 1.0, 0.05, 0.0, 0.0) == 1.0);
}

TEST_CASE("envelope confluences") {
    // PE^MP(sqrt(g1) theta) = PE^SC(theta) exactly (delta identity)
    for (double th : {0.1, 0.4, 0.8, 0.99}) {
        CHECK(power_envelope(CaseId::PCA, std::sqrt(0.9) * th, 0.05, 0.9, 0.0) ==
              doctest::Approx(power_envelope(CaseId::SMD, th, 0.05, 0.0, 0.0))
                  .epsilon(1e-12));
    }
    // PE^W -> PE^MP as g2 -> 0
    for (double th : {0.1, 0.3, 0.5, 0.8}) {
        const double w = power_envelope(CaseId::SigD, th, 0.05, 0.9, 1e-3);
        const double mp = power_envelope(CaseId::PCA, th, 0.05, 0.9, 0.0);
        CHECK(std::fabs(w - mp) < 2e-3);
    }
}

TEST_CASE("np_reject basics") {
    const double g1 = 0.5;
    const GaussianLimit law = limit_law(CaseId::PCA, 0.5, g1, 0.0);
    CHECK(!np_reject(law.mean, CaseId::PCA, 0.5, 0.05, g1, 0.0));
    CHECK(np_reject(law.mean + 3.0 * std::sqrt(law.variance), CaseId::PCA, 0.5, 0.05, g1,
                    0.0));
}

TEST_CASE("monte_carlo determinism across worker counts") {
    MCConfig cfg;
    cfg.spec = make_spec(CaseId::PCA, 40, 80);
    cfg.theta_grid = {0.2, 0.4};
    cfg.replicates = 24;
    cfg.seed = 31337;
    cfg.workers = 1;
    const MCSummary one = monte_carlo(cfg);
    cfg.workers = 8;
    MCSummary eight = monte_carlo(cfg);
    CHECK(one.lnL == eight.lnL);
    // byte-identical up to the worker count echoed in the config
    eight.config.workers = 1;
    CHECK(serialize::mc_summary_to_json(one) == serialize::mc_summary_to_json(eight));
}

TEST_CASE("monte_carlo null behavior at moderate size") {
    // milder version of the acceptance criterion: PCA p=150, 400 reps
    MCConfig cfg;
    cfg.spec = make_spec(CaseId::PCA, 150, 300);
    cfg.theta_grid = {0.5};
    cfg.theta_true = 0.0;
    cfg.replicates = 400;
    cfg.seed = 2024;
    const MCSummary s = monte_carlo(cfg);
    const ThetaSummary& t = s.per_theta[0];
    CHECK(std::fabs(t.mean_lnL - t.pred_mean) < 0.06);
    CHECK(std::fabs(t.var_lnL - t.pred_variance) < 0.12);
    CHECK(t.ks_to_normal < 0.09);
    CHECK(t.mean_L == doctest::Approx(1.0).epsilon(0.12));
    CHECK(t.reject_rate < 0.05 + 0.035);
    // z0 <= lambda_1 happens with vanishing but nonzero probability at p=150
    CHECK(t.flagged <= 12);
}

TEST_CASE("monte_carlo alternative sign flip at moderate size") {
    MCConfig cfg;
    cfg.spec = make_spec(CaseId::PCA, 150, 300);
    cfg.theta_grid = {0.5};
    cfg.theta_true = 0.5;
    cfg.replicates = 400;
    cfg.seed = 2025;
    const MCSummary s = monte_carlo(cfg);
    const GaussianLimit alt = limit_law(CaseId::PCA, 0.5, 0.5, 0.0, Hypothesis::Alternative);
    CHECK(std::fabs(s.per_theta[0].mean_lnL - alt.mean) < 0.07);
}

TEST_CASE("monte_carlo covariance structure at moderate size") {
    MCConfig cfg;
    cfg.spec = make_spec(CaseId::SMD, 150);
    cfg.theta_grid = {0.3, 0.6};
    cfg.replicates = 400;
    cfg.seed = 77;
    const MCSummary s = monte_carlo(cfg);
    const double pred = limit_cov(CaseId::SMD, 0.3, 0.6, 0.0, 0.0);
    CHECK(std::fabs(s.lnL_cov[0][1] - pred) < 0.08);
    CHECK(s.lnL_cov[0][1] == doctest::Approx(s.lnL_cov[1][0]).epsilon(1e-15));
    CHECK(s.lnL_cov[0][0] == doctest::Approx(s.per_theta[0].var_lnL).epsilon(1e-12));
}

TEST_CASE("monte_carlo validation") {
    MCConfig cfg;
    cfg.spec = make_spec(CaseId::PCA, 20, 40);
    cfg.replicates = 0;
    CHECK_THROWS_AS((void)monte_carlo(cfg), ValidationError);
    cfg.replicates = 2;
    cfg.theta_grid = {10.0};  // beyond the threshold
    CHECK_THROWS_AS((void)monte_carlo(cfg), ValidationError);
}
