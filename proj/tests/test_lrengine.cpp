#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "spikedlr/ensembles.hpp"
#include "spikedlr/lrengine.hpp"
#include "spikedlr/quadrature.hpp"
#include "spikedlr/spectra.hpp"

using namespace spikedlr;
using namespace spikedlr::lrengine;
using ensembles::EigenSample;
using ensembles::SpikeParam;

namespace {

CaseSpec make_spec(CaseId id, int p, int n1 = 0, int n2 = 0) {
    CaseSpec spec;
    spec.case_id = id;
    spec.p = p;
    spec.n1 = n1 ? n1 : 2 * p;
    spec.n2 = n2 ? n2 : 2 * p;
    return spec;
}

const std::vector<CaseId> kAllCases = {CaseId::SMD,  CaseId::PCA, CaseId::SigD,
                                       CaseId::REG0, CaseId::REG, CaseId::CCA};

// z0 formula without the subcriticality guard, for the minimization scan
double z0_formula(const CaseSpec& spec, double th) {
    switch (spec.case_id) {
        case CaseId::SMD: return th + 1.0 / th;
        case CaseId::PCA:
        case CaseId::REG0: return (1.0 + th) * (th + spec.c1()) / th;
        default: {
            const double c1 = spec.c1(), c2 = spec.c2();
            const double l = 1.0 + (1.0 + th) * c2 / c1;
            return (1.0 + th) * (th + c1) / (th * l);
        }
    }
}

// f on a fixed composite quadrature grid: identical nodes for every z, so
// quadrature error cancels in finite differences of f.
double f_fixed_grid(const LaplaceForm& lf, double z) {
    const auto [lo, hi] = spectra::support(lf.law());
    const double alpha = 0.5 * (hi + lo), beta = 0.5 * (hi - lo);
    const int panels = 256;
    double acc = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double a = 3.14159265358979323846 * p / panels;
        const double b = 3.14159265358979323846 * (p + 1) / panels;
        const double h = 0.5 * (b - a), c = 0.5 * (a + b);
        auto g = [&](double phi) {
            const double lam = alpha - beta * std::cos(phi);
            const double dens = spectra::density(lf.law(), lam);
            const double jac = beta * std::sin(phi);
            return std::log(z - lam) * dens * jac;
        };
        double s = gk::kw[7] * g(c);
        for (int i = 0; i < 7; ++i)
            s += gk::kw[i] * (g(c - h * gk::kx[i]) + g(c + h * gk::kx[i]));
        acc += s * h;
    }
    return lf.f_I() + 0.5 * acc + lf.f_III(z).real();
}

EigenSample quantile_sample(const CaseSpec& spec) {
    const spectra::LawCdf cdf(spectra::limit_law_for(spec));
    EigenSample s;
    s.spec = spec;
    s.theta_true = 0.0;
    s.seed = 0;
    for (int j = 0; j < spec.p; ++j)
        s.values.push_back(cdf.quantile((spec.p - j - 0.5) / spec.p));
    return s;
}

}  // namespace

TEST_CASE("lr_params matches Table 2") {
    const CaseSpec smd = make_spec(CaseId::SMD, 20);
    const LRParams a = lr_params(smd, 0.5);
    CHECK(a.psi11 == doctest::Approx(0.5 * 20 / 2.0).epsilon(1e-15));
    CHECK(a.log_alpha == doctest::Approx(-20 * 0.25 / 4.0 * 1.0).epsilon(1e-15));
    CHECK(a.s == doctest::Approx(9.0));
    CHECK(a.pbar == 0);

    const CaseSpec pca = make_spec(CaseId::PCA, 10, 30);
    const LRParams b = lr_params(pca, 0.4);
    CHECK(b.psi11 == doctest::Approx(0.4 * 30 / (2.0 * 1.4)).epsilon(1e-15));
    CHECK(b.log_alpha == doctest::Approx(-15.0 * std::log(1.4)).epsilon(1e-15));

    const LRParams c = lr_params(pca, 0.0);
    CHECK(c.psi11 == 0.0);
    CHECK(c.log_alpha == 0.0);

    const CaseSpec cca = make_spec(CaseId::CCA, 8, 16, 24);
    const LRParams d = lr_params(cca, 0.7);
    CHECK(d.psi11 ==
          doctest::Approx(0.7 * 256.0 / (576.0 + 24.0 * 16.0 * 1.7)).epsilon(1e-15));
    CHECK(d.a.size() == 2);
    CHECK(d.b.size() == 1);
}

TEST_CASE("saddle_z0 values and domain") {
    CHECK(saddle_z0(make_spec(CaseId::SMD, 20), 0.5) == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(saddle_z0(make_spec(CaseId::PCA, 20), 0.5) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(saddle_z0(make_spec(CaseId::SigD, 20), 0.5) == doctest::Approx(1.2).epsilon(1e-15));
    CHECK_THROWS_AS((void)saddle_z0(make_spec(CaseId::SMD, 20), 1.0), DomainError);
    CHECK_THROWS_AS((void)saddle_z0(make_spec(CaseId::SMD, 20), 0.0), DomainError);

    for (CaseId id : kAllCases) {
        const CaseSpec spec = make_spec(id, 24);
        const double tbar = theta_bar_p(spec);
        const auto [lo, hi] = spectra::support(spectra::limit_law_for(spec));
        for (double f : {0.2, 0.5, 0.9}) CHECK(saddle_z0(spec, f * tbar) > hi);
    }
}

TEST_CASE("Table 5: D2 values and the finite-difference second derivative") {
    CHECK(d2(make_spec(CaseId::SMD, 20), 0.5) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(d2(make_spec(CaseId::PCA, 20), 0.5) == doctest::Approx(0.28125).epsilon(1e-15));

    for (CaseId id : kAllCases) {
        const CaseSpec spec = make_spec(id, 24);
        const double tbar = theta_bar_p(spec);
        const auto [lo, hi] = spectra::support(spectra::limit_law_for(spec));
        for (int k = 1; k <= 10; ++k) {
            const double th = 0.08 * k * tbar;
            const LaplaceForm lf(spec, th);
            const double z0 = lf.z0();
            auto stencil = [&](double h) {
                return (f_fixed_grid(lf, z0 + h) + f_fixed_grid(lf, z0 - h) -
                        2.0 * f_fixed_grid(lf, z0)) /
                       (h * h);
            };
            // Richardson-extrapolated stencil with the step proportional to
            // the edge distance: truncation scales as (h/d)^4 while the
            // noise floor of the fixed-grid f divides by h^2
            const double h = 0.02 * (z0 - hi);
            const double f2 = (4.0 * stencil(0.5 * h) - stencil(h)) / 3.0;
            const double expect = -th * th / (2.0 * d2(spec, th));
            CAPTURE(to_string(id));
            CAPTURE(k);
            CHECK(f2 == doctest::Approx(expect).epsilon(1e-6));
        }
    }
}

TEST_CASE("f(z0) = 0 with the limit-law f_II") {
    for (CaseId id : kAllCases) {
        const CaseSpec spec = make_spec(id, 24);
        const double tbar = theta_bar_p(spec);
        for (double f : {0.3, 0.6, 0.9}) {
            const LaplaceForm lf(spec, f * tbar);
            CAPTURE(to_string(id));
            CAPTURE(f);
            CHECK(std::abs(lf.f(lf.z0())) < 1e-7);
        }
    }
}

TEST_CASE("saddle equation m_c(z0) = 2 f_III'(z0)") {
    for (CaseId id : kAllCases) {
        const CaseSpec spec = make_spec(id, 24);
        const double tbar = theta_bar_p(spec);
        const auto law = spectra::limit_law_for(spec);
        for (double f : {0.3, 0.6, 0.9}) {
            const LaplaceForm lf(spec, f * tbar);
            const double m = spectra::stieltjes(law, lf.z0()).real();
            CAPTURE(to_string(id));
            CHECK(std::fabs(m - lf.fIII_deriv2(lf.z0())) < 1e-8 * std::max(1.0, std::fabs(m)));
        }
    }
}

TEST_CASE("deterministic factor identity g_I g_III sqrt(D2)/theta = sqrt(1-delta_p^2)") {
    // Table 2a arithmetic at SMD theta=0.5: 0.5*sqrt(3)*g_II with g_II = 1
    {
        const CaseSpec spec = make_spec(CaseId::SMD, 30);
        const LaplaceForm lf(spec, 0.5);
        const double v =
            std::exp(lf.log_gI_table() + lf.log_gIII_z0()) * std::sqrt(lf.d2()) / 0.5;
        CHECK(v == doctest::Approx(std::sqrt(0.75)).epsilon(1e-12));
        CHECK(v == doctest::Approx(0.86603).epsilon(1e-5));
    }
    for (CaseId id : kAllCases) {
        const CaseSpec spec = make_spec(id, 30);
        const double tbar = theta_bar_p(spec);
        for (double f : {0.25, 0.5, 0.75}) {
            const double th = f * tbar;
            const LaplaceForm lf(spec, th);
            const double v = std::exp(lf.log_gI_table() + lf.log_gIII_z0_stirling()) *
                             std::sqrt(lf.d2()) / th;
            const double dp = delta_p_coef(spec, th);
            CAPTURE(to_string(id));
            CAPTURE(f);
            CHECK(v == doctest::Approx(std::sqrt(1.0 - dp * dp)).epsilon(1e-10));
        }
    }
    // the exact-C_m g_III differs from the Stirling form by 1 + O(1/m)
    for (CaseId id : {CaseId::REG, CaseId::CCA}) {
        double prev = 1.0;
        for (int p : {30, 120}) {
            const CaseSpec spec = make_spec(id, p);
            const LaplaceForm lf(spec, 0.4 * theta_bar_p(spec));
            const double ratio = std::exp(lf.log_gIII_z0() - lf.log_gIII_z0_stirling());
            CHECK(std::fabs(ratio - 1.0) < prev);
            prev = std::fabs(ratio - 1.0);
        }
        CHECK(prev < 2.5e-3);
    }
}

TEST_CASE("threshold geometry: min over theta of z0 is beta_+ at theta_bar_p") {
    for (CaseId id : kAllCases) {
        const CaseSpec spec = make_spec(id, 24);
        const double tbar = theta_bar_p(spec);
        const auto [lo, hi] = spectra::support(spectra::limit_law_for(spec));
        // golden-section on theta in (0.2, 3) * theta_bar
        double a = 0.2 * tbar, b = 3.0 * tbar;
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double c = b - gr * (b - a), d = a + gr * (b - a);
        for (int it = 0; it < 200; ++it) {
            if (z0_formula(spec, c) < z0_formula(spec, d)) b = d; else a = c;
            c = b - gr * (b - a);
            d = a + gr * (b - a);
        }
        const double argmin = 0.5 * (a + b);
        CAPTURE(to_string(id));
        CHECK(std::fabs(argmin - tbar) < 1e-6 * tbar);
        CHECK(std::fabs(z0_formula(spec, argmin) - hi) < 1e-6);
    }
}

TEST_CASE("contours pass through z0 and match the stated shapes") {
    // SMD theta = 0.5: K1 is the vertical segment [2.5, 2.5 + 5i]
    {
        const ContourSpec path = contour(make_spec(CaseId::SMD, 20), 0.5);
        CHECK(path.k1(0.0).z == cplx(2.5, 0.0));
        CHECK(path.k1(1.0).z == cplx(2.5, 5.0));
    }
    // REG0 theta=0.5, c1=0.5: z1 = -0.125, radius z0 - z1 = 3.125
    {
        const ContourSpec path = contour(make_spec(CaseId::REG0, 20), 0.5);
        CHECK(path.center == doctest::Approx(-0.125).epsilon(1e-14));
        CHECK(path.radius == doctest::Approx(3.125).epsilon(1e-14));
        CHECK(path.k1(0.0).z.real() == doctest::Approx(3.0).epsilon(1e-14));
        CHECK(path.k1(1.0).z.real() == doctest::Approx(-0.125).epsilon(1e-12));
    }
    // REG theta=0.5, c1=0.5: tau0 = 2.0 maps to z0
    {
        const CaseSpec spec = make_spec(CaseId::REG, 20);
        const ContourSpec path = contour(spec, 0.5);
        const double tau0 = (0.5 + 0.5) / 0.5;
        CHECK(path.radius == doctest::Approx(tau0 + path.eps).epsilon(1e-14));
        CHECK(std::abs(path.k1(0.0).z - saddle_z0(spec, 0.5)) < 1e-10);
    }
    // all cases: k1(0).z = z0 and Im z >= 0 along both arcs
    for (CaseId id : kAllCases) {
        const CaseSpec spec = make_spec(id, 16);
        const double th = 0.5 * theta_bar_p(spec);
        const ContourSpec path = contour(spec, th);
        CHECK(std::abs(path.k1(0.0).z - saddle_z0(spec, th)) < 1e-10);
        for (int i = 0; i <= 20; ++i) {
            CHECK(path.k1(i / 20.0).z.imag() >= -1e-12);
            CHECK(path.k2(i * 0.7).z.imag() >= -1e-12);
        }
    }
}

TEST_CASE("steep descent: Re f increases away from z0 along K1") {
    for (CaseId id : kAllCases) {
        const CaseSpec spec = make_spec(id, 24);
        const double tbar = theta_bar_p(spec);
        for (double frac : {0.3, 0.6, 0.9}) {
            const double th = frac * tbar;
            const LaplaceForm lf(spec, th);
            const ContourSpec path = contour(spec, th);
            double prev = lf.re_f(path.k1(0.0));
            for (int i = 1; i <= 40; ++i) {
                const double cur = lf.re_f(path.k1(i / 40.0));
                CAPTURE(to_string(id));
                CAPTURE(frac);
                CAPTURE(i);
                CHECK(cur > prev);
                prev = cur;
            }
        }
    }
}

TEST_CASE("delta_p: definition, flag, quantile pseudo-sample") {
    const CaseSpec spec = make_spec(CaseId::PCA, 400, 800);
    const EigenSample qs = quantile_sample(spec);
    const auto dp = delta_p(spec, 0.5 * theta_bar_p(spec), qs);
    CHECK(!dp.flagged);
    CHECK(std::fabs(dp.value) <= 0.1);

    // forced z0 <= lambda_1
    EigenSample high = qs;
    high.values.front() = 100.0;
    const auto flagged = delta_p(spec, 0.5 * theta_bar_p(spec), high);
    CHECK(flagged.flagged);
    CHECK(flagged.value == 0.0);
}

TEST_CASE("lr_laplace on a quantile pseudo-sample is sqrt(1 - delta_p^2)") {
    for (CaseId id : kAllCases) {
        const CaseSpec spec = make_spec(id, 400);
        const double th = 0.5 * theta_bar_p(spec);
        const EigenSample qs = quantile_sample(spec);
        const auto res = lr_laplace(spec, th, qs);
        const double dp = delta_p_coef(spec, th);
        CAPTURE(to_string(id));
        CHECK(std::fabs(res.log_value - 0.5 * std::log1p(-dp * dp)) < 0.05);
    }
}

TEST_CASE("lr_asymptotic formula and domain") {
    const CaseSpec spec = make_spec(CaseId::PCA, 60, 120);
    CHECK(delta_p_coef(spec, 0.5) == doctest::Approx(0.5 / std::sqrt(0.5)).epsilon(1e-14));
    SpikeParam null_spike;
    const auto sample = ensembles::sample_case(spec, null_spike, 99);
    const auto res = lr_asymptotic(spec, 0.3, sample);
    const auto dp = delta_p(spec, 0.3, sample);
    const double dcoef = delta_p_coef(spec, 0.3);
    CHECK(res.log_value ==
          doctest::Approx(-0.5 * dp.value + 0.5 * std::log1p(-dcoef * dcoef)).epsilon(1e-12));

    // the theta_bar_p boundary itself is out of domain (delta_p = 1 there)
    CHECK_THROWS_AS((void)lr_asymptotic(spec, theta_bar_p(spec), sample), DomainError);
    // delta identity at the threshold for the W family
    for (double c1 : {0.3, 0.5, 0.8}) {
        for (double c2 : {0.2, 0.5, 0.9}) {
            CaseSpec w = make_spec(CaseId::SigD, 30);
            w.n1 = static_cast<int>(30 / c1);
            w.n2 = static_cast<int>(30 / c2);
            const double tb = theta_bar_p(w);
            CHECK(delta_p_coef(w, tb) == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("theta -> 0 continuity of laplace and asymptotic") {
    const CaseSpec spec = make_spec(CaseId::PCA, 200, 400);
    const auto sample = ensembles::sample_case(spec, SpikeParam{}, 5);
    CHECK(std::fabs(lr_asymptotic(spec, 1e-4, sample).log_value) < 1e-3);
    CHECK(std::fabs(lr_laplace(spec, 1e-4, sample).log_value) < 1e-3);
}

TEST_CASE("lr_quadrature: theta -> 0 limit at p = 2") {
    const CaseSpec spec = make_spec(CaseId::SMD, 2);
    const auto sample = ensembles::sample_case(spec, SpikeParam{}, 12);
    const auto res = lr_quadrature(spec, 1e-8, sample);
    CHECK(res.enclosure_ok);
    CHECK(std::fabs(res.log_value) < 1e-6);
}

TEST_CASE("lr_quadrature: univariate PCA chi-square oracle") {
    // p = 1: L = (1+theta)^{-n1/2} exp(n1 lambda theta / (2(1+theta)))
    CaseSpec spec;
    spec.case_id = CaseId::PCA;
    spec.p = 1;
    spec.n1 = 6;
    const double theta = 0.3;
    for (std::uint64_t seed : {3u, 4u, 5u}) {
        const auto sample = ensembles::sample_case(spec, SpikeParam{}, seed);
        const double lam = sample.values[0];
        if (lam >= saddle_z0(spec, theta)) continue;
        const double oracle =
            -3.0 * std::log1p(theta) + 6.0 * lam * theta / (2.0 * (1.0 + theta));
        const auto res = lr_quadrature(spec, theta, sample);
        CHECK(res.log_value == doctest::Approx(oracle).epsilon(1e-8));
    }
}

TEST_CASE("lr_quadrature vs lr_laplace at p = 40 (SMD)") {
    const CaseSpec spec = make_spec(CaseId::SMD, 40);
    const auto sample = ensembles::sample_case(spec, SpikeParam{}, 7);
    const auto quad = lr_quadrature(spec, 0.5, sample);
    const auto lap = lr_laplace(spec, 0.5, sample);
    REQUIRE(quad.enclosure_ok);
    CHECK(std::fabs(std::exp(lap.log_value - quad.log_value) - 1.0) < 0.05);
    CHECK_THROWS_AS((void)lr_quadrature(make_spec(CaseId::SMD, 80), 0.5,
                                        ensembles::sample_case(make_spec(CaseId::SMD, 80),
                                                               SpikeParam{}, 1)),
                    ValidationError);
}

TEST_CASE("delta_p equals -2 ln g_II by construction (flag consistency)") {
    const CaseSpec spec = make_spec(CaseId::SigD, 32);
    const double th = 0.4 * theta_bar_p(spec);
    const auto sample = ensembles::sample_case(spec, SpikeParam{}, 21);
    const auto dp = delta_p(spec, th, sample);
    // recompute from the definition
    double lhs = 0.0;
    for (double lam : sample.values) lhs += std::log(saddle_z0(spec, th) - lam);
    const double centering = spectra::lss_expectation(
        spectra::limit_law_for(spec),
        [&](double lam) { return std::log(saddle_z0(spec, th) - lam); });
    CHECK(dp.value == doctest::Approx(lhs - spec.p * centering).epsilon(1e-12));
}
