#pragma once

#include <complex>
#include <vector>

#include "spikedlr/ensembles.hpp"
#include "spikedlr/spectra.hpp"
#include "spikedlr/types.hpp"

namespace spikedlr::lrengine {

using cplx = std::complex<double>;
using ensembles::EigenSample;

// Parameters of L(theta) = alpha(theta) pFq(a, b; Psi, Lambda) and of the
// contour representation prefactor Gamma(s+1) alpha q_s / Psi11^s.
struct LRParams {
    double psi11 = 0.0;
    double log_alpha = 0.0;
    double log_qs = 0.0;
    double s = 0.0;  // p/2 - 1
    int pbar = 0;
    int qbar = 0;
    std::vector<double> a;
    std::vector<double> b;
};
LRParams lr_params(const CaseSpec& spec, double theta);

// Finite-p phase transition threshold (Table 3 thresholds at c1, c2).
double theta_bar_p(const CaseSpec& spec);

// Saddle point z0 > beta_+ of f; theta must lie in (0, theta_bar_p).
double saddle_z0(const CaseSpec& spec, double theta);

// D2 = theta^2 / (-2 f''(z0)).
double d2(const CaseSpec& spec, double theta);

// delta_p(theta): theta (SMD), theta/sqrt(c1) (PCA/REG0),
// theta r/(c1 l(theta)) (SigD/REG/CCA).
double delta_p_coef(const CaseSpec& spec, double theta);

// A point of the deformed contour; tau carries the tau-plane preimage for
// REG (zero otherwise).
struct ContourPoint {
    cplx z;
    cplx dz;  // dz/dparam
    cplx tau;
};

struct ContourSpec {
    CaseId case_id = CaseId::SMD;
    double z0 = 0.0;
    double center = 0.0;     // circle center (REG0/CCA z-plane, REG tau-plane)
    double radius = 0.0;     // circle radius, or K1 length for the vertical case
    double eps = 0.0;        // REG
    double map_scale = 0.0;  // REG: c1(1-c1)/(theta c2)

    ContourPoint k1(double t) const;  // t in [0,1], from z0 outward
    ContourPoint k2(double x) const;  // x >= 0, leftward from the K1 end
};
ContourSpec contour(const CaseSpec& spec, double theta);

// The Laplace decomposition f = f_I + f_II + f_III, g = g_I g_II g_III bound
// to (spec, theta), with f_II taken against the limit law at (c1, c2).
class LaplaceForm {
public:
    LaplaceForm(const CaseSpec& spec, double theta);

    double z0() const { return z0_; }
    double d2() const;
    const spectra::LimitLaw& law() const { return law_; }

    double f_I() const { return fI_; }
    double log_gI_table() const;  // Table 2a g_I
    double log_gI_exact() const;  // Gamma(s+1) alpha q_s/(sqrt(pi p) Psi11^s) e^{p f_I}

    cplx f_II(cplx z) const;      // (1/2) \int ln(z - lambda) dF_c
    double re_f_II(cplx z) const; // (1/2) \int ln|z - lambda| dF_c
    cplx f_III(cplx z) const;
    cplx f_III_tau(cplx tau) const;  // REG only
    cplx f(cplx z) const { return fI_ + f_II(z) + f_III(z); }
    double re_f(const ContourPoint& pt) const;

    // 2 d/dz f_III at real z > support; the saddle equation reads
    // m_c(z0) = 2 f_III'(z0).
    double fIII_deriv2(double z) const;

    double log_gIII_z0() const;           // exact log-Gamma C_m (REG/CCA)
    double log_gIII_z0_stirling() const;  // the Stirling-C_m form of Eq. (g2)

    // eta arguments of the scalar hypergeometrics (REG0/REG/CCA).
    cplx eta0(cplx z) const;
    cplx eta1(cplx z) const;
    cplx eta2(cplx z) const;
    double m() const { return m_; }
    double eps() const { return eps_; }

private:
    CaseSpec spec_;
    double theta_;
    double c1_ = 0.0, c2_ = 0.0, r2_ = 0.0, l_ = 0.0;
    double z0_ = 0.0;
    double m_ = 0.0, eps_ = 0.0;
    double fI_ = 0.0;
    spectra::LimitLaw law_;
};

struct DeltaP {
    double value = 0.0;
    bool flagged = false;  // z0 <= lambda_1: defined as zero
};
DeltaP delta_p(const CaseSpec& spec, double theta, const EigenSample& sample);

struct LRResult {
    double log_value = 0.0;
    double z0 = 0.0;
    double delta_p = 0.0;
    bool gII_unity = false;      // z0 <= lambda_1 event (Laplace/asymptotic)
    bool enclosure_ok = true;    // contour encloses all eigenvalues (quadrature)
    double value() const;
};

// Laplace leading term g(z0)/sqrt(-2 f''(z0)); theta in (0, theta_bar_p).
LRResult lr_laplace(const CaseSpec& spec, double theta, const EigenSample& sample);

// Direct numerical integration of the contour representation with the series
// hypergeometric; oracle-scale only (p <= 64).
LRResult lr_quadrature(const CaseSpec& spec, double theta, const EigenSample& sample);

// exp{-Delta_p/2 + ln(1 - delta_p^2)/2}.
LRResult lr_asymptotic(const CaseSpec& spec, double theta, const EigenSample& sample);

}  // namespace spikedlr::lrengine
