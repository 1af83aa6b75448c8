#include "spikedlr/lrengine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spikedlr/quadrature.hpp"
#include "spikedlr/specfun.hpp"

namespace spikedlr::lrengine {

namespace {

constexpr double kPi = 3.14159265358979323846;

double l_of(double c1, double c2, double theta) { return 1.0 + (1.0 + theta) * c2 / c1; }

void require_subcritical(const CaseSpec& spec, double theta) {
    const double tb = theta_bar_p(spec);
    if (!(theta > 0.0 && theta < tb))
        throw DomainError("theta must lie in (0, theta_bar_p)");
}

}  // namespace

LRParams lr_params(const CaseSpec& spec, double theta) {
    spec.validate();
    if (theta < 0.0) throw ValidationError("theta must be nonnegative");
    const double p = spec.p;
    const double n1 = spec.n1, n2 = spec.n2, n = spec.n();
    LRParams out;
    out.s = 0.5 * p - 1.0;
    switch (spec.case_id) {
        case CaseId::SMD:
            out.pbar = 0; out.qbar = 0;
            out.psi11 = 0.5 * theta * p;
            out.log_alpha = -0.25 * p * theta * theta;
            break;
        case CaseId::PCA:
            out.pbar = 0; out.qbar = 0;
            out.psi11 = 0.5 * theta * n1 / (1.0 + theta);
            out.log_alpha = -0.5 * n1 * std::log1p(theta);
            break;
        case CaseId::SigD:
            out.pbar = 1; out.qbar = 0;
            out.a = {0.5 * n};
            out.psi11 = theta * n1 / (n2 * (1.0 + theta));
            out.log_alpha = -0.5 * n1 * std::log1p(theta);
            break;
        case CaseId::REG0:
            out.pbar = 0; out.qbar = 1;
            out.b = {0.5 * n1};
            out.psi11 = 0.25 * theta * n1 * n1;
            out.log_alpha = -0.5 * n1 * theta;
            break;
        case CaseId::REG:
            out.pbar = 1; out.qbar = 1;
            out.a = {0.5 * n};
            out.b = {0.5 * n1};
            out.psi11 = 0.5 * theta * n1 * n1 / n2;
            out.log_alpha = -0.5 * n1 * theta;
            break;
        case CaseId::CCA:
            out.pbar = 2; out.qbar = 1;
            out.a = {0.5 * n, 0.5 * n};
            out.b = {0.5 * n1};
            out.psi11 = theta * n1 * n1 / (n2 * n2 + n2 * n1 * (1.0 + theta));
            out.log_alpha = -0.5 * n * std::log1p(n1 * theta / n);
            break;
    }
    out.log_qs = 0.0;
    for (double aj : out.a) out.log_qs += std::lgamma(aj - out.s) - std::lgamma(aj);
    for (double bi : out.b) out.log_qs += std::lgamma(bi) - std::lgamma(bi - out.s);
    return out;
}

double theta_bar_p(const CaseSpec& spec) {
    return spectra::threshold(spectra::limit_law_for(spec));
}

double saddle_z0(const CaseSpec& spec, double theta) {
    require_subcritical(spec, theta);
    switch (spec.case_id) {
        case CaseId::SMD:
            return theta + 1.0 / theta;
        case CaseId::PCA:
        case CaseId::REG0:
            return (1.0 + theta) * (theta + spec.c1()) / theta;
        default: {
            const double c1 = spec.c1(), c2 = spec.c2();
            return (1.0 + theta) * (theta + c1) / (theta * l_of(c1, c2, theta));
        }
    }
}

double d2(const CaseSpec& spec, double theta) {
    require_subcritical(spec, theta);
    const double c1 = spec.uses_n1() ? spec.c1() : 0.0;
    const double c2 = spec.two_wishart() ? spec.c2() : 0.0;
    const double l = spec.two_wishart() ? l_of(c1, c2, theta) : 0.0;
    const double h = c1 + c2 * (1.0 + theta) * (1.0 + theta) - theta * theta;
    switch (spec.case_id) {
        case CaseId::SMD:
            return 1.0 - theta * theta;
        case CaseId::PCA:
            return c1 * (c1 - theta * theta) * (1.0 + theta) * (1.0 + theta);
        case CaseId::SigD: {
            const double r2 = c1 + c2 - c1 * c2;
            return r2 * h * (1.0 + theta) * (1.0 + theta) / (l * l * l * l);
        }
        case CaseId::REG0:
            return c1 * (1.0 + c1 + 2.0 * theta) * (c1 - theta * theta);
        case CaseId::REG:
            return c1 * h * (c1 + theta + (1.0 + theta) * l) / (l * l * l * l);
        case CaseId::CCA:
            return c1 * c1 * h * (2.0 * (c1 + theta) + l * (1.0 - c1)) /
                   (l * l * l * (c1 + c2));
    }
    return 0.0;
}

double delta_p_coef(const CaseSpec& spec, double theta) {
    switch (spec.case_id) {
        case CaseId::SMD:
            return theta;
        case CaseId::PCA:
        case CaseId::REG0:
            return theta / std::sqrt(spec.c1());
        default: {
            const double c1 = spec.c1(), c2 = spec.c2();
            return theta * std::sqrt(c1 + c2 - c1 * c2) / (c1 * l_of(c1, c2, theta));
        }
    }
}

// ---------------------------------------------------------------------------
// Contours
// ---------------------------------------------------------------------------

ContourPoint ContourSpec::k1(double t) const {
    ContourPoint pt;
    switch (case_id) {
        case CaseId::SMD:
        case CaseId::PCA:
        case CaseId::SigD:
            pt.z = cplx(z0, radius * t);
            pt.dz = cplx(0.0, radius);
            break;
        case CaseId::REG0:
        case CaseId::CCA: {
            const cplx e = std::polar(1.0, 0.5 * kPi * t);
            pt.z = center + radius * e;
            pt.dz = cplx(0.0, 0.5 * kPi * radius) * e;
            break;
        }
        case CaseId::REG: {
            const cplx e = std::polar(1.0, 0.5 * kPi * t);
            pt.tau = center + radius * e;
            const cplx dtau = cplx(0.0, 0.5 * kPi * radius) * e;
            const cplx den = pt.tau + eps;
            pt.z = map_scale * pt.tau * (pt.tau + 1.0) / den;
            pt.dz = map_scale * (pt.tau * pt.tau + 2.0 * eps * pt.tau + eps) / (den * den) *
                    dtau;
            break;
        }
    }
    return pt;
}

ContourPoint ContourSpec::k2(double x) const {
    ContourPoint pt;
    switch (case_id) {
        case CaseId::SMD:
        case CaseId::PCA:
        case CaseId::SigD:
            pt.z = cplx(z0 - x, radius);
            pt.dz = -1.0;
            break;
        case CaseId::REG0:
        case CaseId::CCA:
            pt.z = cplx(center - x, radius);
            pt.dz = -1.0;
            break;
        case CaseId::REG: {
            pt.tau = cplx(center - x, radius);
            const cplx den = pt.tau + eps;
            pt.z = map_scale * pt.tau * (pt.tau + 1.0) / den;
            pt.dz = -map_scale * (pt.tau * pt.tau + 2.0 * eps * pt.tau + eps) / (den * den);
            break;
        }
    }
    return pt;
}

ContourSpec contour(const CaseSpec& spec, double theta) {
    const double z0 = saddle_z0(spec, theta);
    const double c1 = spec.uses_n1() ? spec.c1() : 0.0;
    ContourSpec out;
    out.case_id = spec.case_id;
    out.z0 = z0;
    switch (spec.case_id) {
        case CaseId::SMD:
        case CaseId::PCA:
            out.radius = 2.0 * z0;
            break;
        case CaseId::SigD: {
            out.radius = 2.0 * z0;
            const double sing = c1 * (1.0 + theta) / (theta * spec.c2());
            if (sing - z0 < 1e-6)
                throw DomainError("SigD contour too close to the integrand singularity");
            break;
        }
        case CaseId::REG0:
            out.center = -(1.0 - c1) * (1.0 - c1) / (4.0 * theta);
            out.radius = z0 - out.center;
            break;
        case CaseId::CCA: {
            const double c2 = spec.c2();
            const double r2 = c1 + c2 - c1 * c2;
            const double l = l_of(c1, c2, theta);
            // Lemma 1 needs K to avoid [Psi11^{-1}, inf); eta2(z0) = Psi11 z0
            if (z0 * theta * c2 * c2 / (c1 * c1 * l) >= 1.0 - 1e-12)
                throw DomainError("CCA contour would touch the 2F1 branch cut");
            out.center = -c1 * (1.0 - c1) * (1.0 - c1) * l / (4.0 * theta * r2);
            out.radius = z0 - out.center;
            break;
        }
        case CaseId::REG: {
            const double c2 = spec.c2();
            const double r2 = c1 + c2 - c1 * c2;
            out.eps = r2 / (c2 * (1.0 - c1));
            out.center = -out.eps;
            const double tau0 = (theta + c1) / (1.0 - c1);
            out.radius = tau0 + out.eps;
            out.map_scale = c1 * (1.0 - c1) / (theta * c2);
            break;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Laplace decomposition
// ---------------------------------------------------------------------------

LaplaceForm::LaplaceForm(const CaseSpec& spec, double theta)
    : spec_(spec), theta_(theta), law_(spectra::limit_law_for(spec)) {
    require_subcritical(spec, theta);
    z0_ = saddle_z0(spec, theta);
    if (spec.uses_n1()) {
        c1_ = spec.c1();
        m_ = 0.5 * (spec.n1 - spec.p);
    }
    if (spec.two_wishart()) {
        c2_ = spec.c2();
        r2_ = c1_ + c2_ - c1_ * c2_;
        l_ = l_of(c1_, c2_, theta);
        eps_ = (spec.n() - spec.p) / (spec.n1 - spec.p);
    }

    const double th = theta_;
    auto fI_pca = [&] {
        return 0.5 * (1.0 + (1.0 - c1_) / c1_ * std::log1p(th) + std::log(th / c1_));
    };
    auto fI_reg0 = [&] {
        return 0.5 * (1.0 + (th + c1_) / c1_ + std::log(th / c1_) +
                      (1.0 - c1_) / c1_ * std::log1p(-c1_));
    };
    auto wishart_shift = [&] {
        return 0.5 * (-1.0 + std::log((c1_ + c2_) / c1_) -
                      r2_ / (c1_ * c2_) * std::log(r2_ / (c1_ + c2_)));
    };
    switch (spec.case_id) {
        case CaseId::SMD:
            fI_ = 0.5 * (1.0 + 0.5 * th * th + std::log(th));
            break;
        case CaseId::PCA:
            fI_ = fI_pca();
            break;
        case CaseId::SigD:
            fI_ = fI_pca() + wishart_shift();
            break;
        case CaseId::REG0:
            fI_ = fI_reg0();
            break;
        case CaseId::REG:
            fI_ = fI_reg0() + wishart_shift();
            break;
        case CaseId::CCA:
            fI_ = fI_reg0() + wishart_shift() +
                  0.5 * (-1.0 - th / c1_ - r2_ / (c1_ * c2_) * std::log(r2_ / (c1_ * l_)));
            break;
    }
}

double LaplaceForm::d2() const { return lrengine::d2(spec_, theta_); }

double LaplaceForm::log_gI_table() const {
    const double th = theta_;
    switch (spec_.case_id) {
        case CaseId::SMD:
            return std::log(th);
        case CaseId::PCA:
            return std::log(th / (c1_ * (1.0 + th)));
        case CaseId::SigD:
            return std::log(th) - 2.0 * std::log(c1_) - std::log1p(th) +
                   0.5 * std::log(r2_ * (c1_ + c2_));
        case CaseId::REG0:
            return std::log(th / c1_) - 0.5 * std::log1p(-c1_);
        case CaseId::REG:
            return std::log(th) - 2.0 * std::log(c1_) - 0.5 * std::log1p(-c1_) +
                   0.5 * std::log(r2_ * (c1_ + c2_));
        case CaseId::CCA:
            return std::log(th) - 3.0 * std::log(c1_) - 0.5 * std::log1p(-c1_) +
                   std::log(r2_) + std::log(c1_ + c2_) - std::log(l_);
    }
    return 0.0;
}

double LaplaceForm::log_gI_exact() const {
    const LRParams lp = lr_params(spec_, theta_);
    const double p = spec_.p;
    return std::lgamma(lp.s + 1.0) + lp.log_alpha + lp.log_qs - lp.s * std::log(lp.psi11) -
           0.5 * std::log(kPi * p) + p * fI_;
}

cplx LaplaceForm::f_II(cplx z) const {
    return 0.5 * spectra::lss_expectation_c(
                     law_, [&](double lam) { return std::log(z - lam); });
}

double LaplaceForm::re_f_II(cplx z) const {
    return 0.5 * spectra::lss_expectation(
                     law_, [&](double lam) { return std::log(std::abs(z - lam)); });
}

cplx LaplaceForm::eta0(cplx z) const { return z * theta_ / ((1.0 - c1_) * (1.0 - c1_)); }
cplx LaplaceForm::eta1(cplx z) const { return z * theta_ * c2_ / (c1_ * (1.0 - c1_)); }
cplx LaplaceForm::eta2(cplx z) const {
    return z * theta_ * c2_ * c2_ / (c1_ * c1_ * l_);
}

cplx LaplaceForm::f_III(cplx z) const {
    const double th = theta_;
    switch (spec_.case_id) {
        case CaseId::SMD:
            return -0.5 * z * th;
        case CaseId::PCA:
            return -0.5 * z * th / (c1_ * (1.0 + th));
        case CaseId::SigD:
            return 0.5 * r2_ / (c1_ * c2_) *
                   std::log(1.0 - c2_ * z * th / (c1_ * (1.0 + th)));
        case CaseId::REG0: {
            const auto s = specfun::saddle_phi0(eta0(z));
            return 0.5 * (1.0 - c1_) / c1_ * s.phi0;
        }
        case CaseId::REG: {
            const auto s = specfun::saddle_j(1, eps_, eta1(z));
            return 0.5 * (1.0 - c1_) / c1_ *
                   (s.phi + eps_ * std::log(eps_) - (eps_ - 1.0) * std::log(eps_ - 1.0));
        }
        case CaseId::CCA: {
            const auto s = specfun::saddle_j(2, eps_, eta2(z));
            return 0.5 * (1.0 - c1_) / c1_ *
                   (s.phi + eps_ * std::log(eps_) - (eps_ - 1.0) * std::log(eps_ - 1.0));
        }
    }
    return 0.0;
}

cplx LaplaceForm::f_III_tau(cplx tau) const {
    if (spec_.case_id != CaseId::REG) throw ValidationError("f_III_tau is REG-only");
    return 0.5 * (1.0 - c1_) / c1_ *
           (-tau + std::log(tau + 1.0) - eps_ * std::log(tau + eps_) +
            eps_ * std::log(eps_));
}

double LaplaceForm::re_f(const ContourPoint& pt) const {
    double fIII_re;
    if (spec_.case_id == CaseId::REG) {
        const double s = 0.5 * (1.0 - c1_) / c1_;
        fIII_re = s * (-pt.tau.real() + std::log(std::abs(pt.tau + 1.0)) -
                       eps_ * std::log(std::abs(pt.tau + eps_)) + eps_ * std::log(eps_));
    } else {
        fIII_re = f_III(pt.z).real();
    }
    return fI_ + re_f_II(pt.z) + fIII_re;
}

double LaplaceForm::fIII_deriv2(double z) const {
    const double th = theta_;
    switch (spec_.case_id) {
        case CaseId::SMD:
            return -th;
        case CaseId::PCA:
            return -th / (c1_ * (1.0 + th));
        case CaseId::SigD:
            return -th * r2_ / (c1_ * c1_ * (1.0 + th) - c1_ * c2_ * th * z);
        case CaseId::REG0: {
            const auto s = specfun::saddle_phi0(eta0(z));
            return -th / (c1_ * (1.0 - c1_) * s.t0.real());
        }
        case CaseId::REG: {
            const auto s = specfun::saddle_j(1, eps_, eta1(z));
            return -th * c2_ * s.t.real() / (c1_ * c1_);
        }
        case CaseId::CCA: {
            const auto s = specfun::saddle_j(2, eps_, eta2(z));
            const double t = s.t.real();
            const double e2 = eta2(z).real();
            return (1.0 - c1_) / c1_ * (-eps_ * t / (1.0 - e2 * t)) * th * c2_ * c2_ /
                   (c1_ * c1_ * l_);
        }
    }
    return 0.0;
}

double LaplaceForm::log_gIII_z0() const {
    switch (spec_.case_id) {
        case CaseId::SMD:
        case CaseId::PCA:
            return 0.0;
        case CaseId::SigD:
            return -std::log(1.0 - c2_ * z0_ * theta_ / (c1_ * (1.0 + theta_)));
        case CaseId::REG0:
            return -0.25 * std::log((1.0 + 4.0 * eta0(z0_)).real());
        case CaseId::REG:
        case CaseId::CCA: {
            const int j = spec_.case_id == CaseId::REG ? 1 : 2;
            const cplx eta = j == 1 ? eta1(z0_) : eta2(z0_);
            const auto s = specfun::saddle_j(j, eps_, eta);
            if (std::fabs(s.omega) > 1e-8)
                throw DomainError("g_III at z0: unexpected nonzero omega branch");
            const double xlx = (eps_ - 1.0) * std::log(eps_ - 1.0);
            return specfun::log_Cm_exact(m_, eps_) + m_ * (eps_ * std::log(eps_) - xlx) +
                   std::log(s.psi.real()) -
                   0.5 * std::log(2.0 * kPi * m_ * std::abs(s.phi2));
        }
    }
    return 0.0;
}

double LaplaceForm::log_gIII_z0_stirling() const {
    if (spec_.case_id != CaseId::REG && spec_.case_id != CaseId::CCA)
        return log_gIII_z0();
    // the literal sqrt(c1/r^2) |phi''|^{-1/2} psi form, i.e. C_m replaced by
    // its Stirling approximation
    const int j = spec_.case_id == CaseId::REG ? 1 : 2;
    const cplx eta = j == 1 ? eta1(z0_) : eta2(z0_);
    const auto s = specfun::saddle_j(j, eps_, eta);
    return 0.5 * std::log(c1_ / r2_) + std::log(s.psi.real()) -
           0.5 * std::log(std::abs(s.phi2));
}

// ---------------------------------------------------------------------------
// Delta_p and the three LR evaluations
// ---------------------------------------------------------------------------

DeltaP delta_p(const CaseSpec& spec, double theta, const EigenSample& sample) {
    const double z0 = saddle_z0(spec, theta);
    DeltaP out;
    const double lam1 = sample.values.front();
    if (z0 <= lam1) {
        out.flagged = true;
        return out;
    }
    double lss = 0.0;
    for (double lam : sample.values) lss += std::log(z0 - lam);
    const auto law = spectra::limit_law_for(spec);
    const double centering =
        spectra::lss_expectation(law, [&](double lam) { return std::log(z0 - lam); });
    out.value = lss - spec.p * centering;
    return out;
}

double LRResult::value() const { return std::exp(log_value); }

LRResult lr_laplace(const CaseSpec& spec, double theta, const EigenSample& sample) {
    LaplaceForm lf(spec, theta);
    const DeltaP dp = delta_p(spec, theta, sample);
    LRResult out;
    out.z0 = lf.z0();
    out.delta_p = dp.value;
    out.gII_unity = dp.flagged;
    const double log_gII = -0.5 * dp.value;  // zero when flagged
    out.log_value = lf.log_gI_exact() + log_gII + lf.log_gIII_z0() +
                    0.5 * std::log(lf.d2()) - std::log(theta);
    return out;
}

LRResult lr_asymptotic(const CaseSpec& spec, double theta, const EigenSample& sample) {
    const double dcoef = delta_p_coef(spec, theta);
    if (dcoef >= 1.0)
        throw DomainError("delta_p >= 1: theta at or above the finite-p threshold");
    const DeltaP dp = delta_p(spec, theta, sample);
    LRResult out;
    out.z0 = saddle_z0(spec, theta);
    out.delta_p = dp.value;
    out.gII_unity = dp.flagged;
    out.log_value = -0.5 * dp.value + 0.5 * std::log1p(-dcoef * dcoef);
    return out;
}

namespace {

// log of the scalar hypergeometric pFq(a - s, b - s; Psi11 z) along the
// contour. Series wherever its cancellation noise stays below 1e-9 relative;
// Lemma 2/3 uniform approximations take over on the far tails.
class HypEvaluator {
public:
    HypEvaluator(const CaseSpec& spec, const LRParams& lp, const LaplaceForm& lf)
        : case_(spec.case_id), psi11_(lp.psi11), lf_(lf) {
        if (spec.two_wishart()) nu_ = 0.5 * (spec.n() - spec.p) + 1.0;  // a - s
        m_ = lf.m();
        eps_ = lf.eps();
    }

    cplx log_at(cplx z) const {
        switch (case_) {
            case CaseId::SMD:
            case CaseId::PCA:
                return psi11_ * z;
            case CaseId::SigD:
                return -nu_ * std::log(1.0 - psi11_ * z);
            case CaseId::REG0: {
                const cplx e0 = lf_.eta0(z);
                return guarded(
                    [&] { return specfun::hyp_log_0f1(m_ + 1.0, m_ * m_ * e0); },
                    [&] { return specfun::approx_0F1_log(m_, e0); });
            }
            case CaseId::REG: {
                const cplx e1 = lf_.eta1(z);
                return guarded(
                    [&] {
                        return specfun::hyp_log_1f1(m_ * eps_ + 1.0, m_ + 1.0, m_ * e1);
                    },
                    [&] { return specfun::approx_Fj_log(1, m_, eps_, e1); });
            }
            case CaseId::CCA: {
                const cplx e2 = lf_.eta2(z);
                return guarded(
                    [&] {
                        return specfun::hyp_log_2f1(m_ * eps_ + 1.0, m_ * eps_ + 1.0,
                                                    m_ + 1.0, e2);
                    },
                    [&] { return specfun::approx_Fj_log(2, m_, eps_, e2); });
            }
        }
        return 0.0;
    }

private:
    template <class Series, class Approx>
    cplx guarded(const Series& series, const Approx& approx) const {
        try {
            const specfun::SeriesEval e = series();
            if (e.rel_noise_log() < -20.7)  // noise below 1e-9 of the value
                return e.log_value;
        } catch (const DomainError&) {
        }
        return approx();
    }

    CaseId case_;
    double psi11_;
    double nu_ = 0.0;
    double m_ = 0.0, eps_ = 0.0;
    const LaplaceForm& lf_;
};

}  // namespace

LRResult lr_quadrature(const CaseSpec& spec, double theta, const EigenSample& sample) {
    spec.validate();
    if (!(theta > 0.0)) throw DomainError("lr_quadrature requires theta > 0");
    if (spec.p > 64)
        throw ValidationError("lr_quadrature is oracle-scale only (p <= 64)");
    const LRParams lp = lr_params(spec, theta);
    LaplaceForm lf(spec, theta);
    const ContourSpec path = contour(spec, theta);
    const HypEvaluator hyp(spec, lp, lf);

    LRResult out;
    out.z0 = path.z0;
    out.delta_p = delta_p(spec, theta, sample).value;
    if (path.z0 <= sample.values.front()) {
        out.enclosure_ok = false;
        out.log_value = std::numeric_limits<double>::quiet_NaN();
        return out;
    }

    const double log_pref = std::lgamma(lp.s + 1.0) + lp.log_alpha + lp.log_qs -
                            lp.s * std::log(lp.psi11);

    auto log_integrand = [&](cplx z) -> cplx {
        cplx sum_logs = 0.0;
        for (double lam : sample.values) sum_logs += std::log(z - lam);
        return hyp.log_at(z) - 0.5 * sum_logs;
    };

    // scale so the integrand is O(1) at the saddle
    const double shift = log_pref + log_integrand(cplx(path.z0, 0.0)).real();

    auto f_k1 = [&](double t) -> cplx {
        const ContourPoint pt = path.k1(t);
        return std::exp(log_pref + log_integrand(pt.z) - shift) * pt.dz;
    };
    cplx total = integrate_gk(f_k1, 0.0, 1.0, 1e-13, 5e-11, 6000);

    // K2: march leftward in geometrically growing blocks until the tail is
    // negligible; Lemma 5's monotone decay bounds the truncation error.
    double x = 0.0;
    double width = std::max(path.radius, 1.0);
    bool converged = false;
    for (int block = 0; block < 200; ++block) {
        auto f_k2 = [&](double u) -> cplx {
            const ContourPoint pt = path.k2(u);
            return std::exp(log_pref + log_integrand(pt.z) - shift) * pt.dz;
        };
        const cplx part = integrate_gk(f_k2, x, x + width, 1e-13, 5e-11, 6000);
        total += part;
        x += width;
        width *= 1.6;
        const double end_mag =
            (log_pref + log_integrand(path.k2(x).z).real() - shift);
        if (std::abs(part) < 1e-14 * std::abs(total) && end_mag < -41.5) {
            converged = true;
            break;
        }
    }
    if (!converged) throw ToleranceError("lr_quadrature: contour tail did not converge");

    // L = e^{shift} Im(I_+)/pi by conjugate symmetry of the integrand
    const double im = total.imag() / kPi;
    if (!(im > 0.0)) {
        if (std::abs(im) < 1e-12 * std::abs(total))
            throw ToleranceError("lr_quadrature: cancellation below noise floor");
        throw DomainError("lr_quadrature: nonpositive likelihood ratio");
    }
    out.log_value = shift + std::log(im);
    return out;
}

}  // namespace spikedlr::lrengine
