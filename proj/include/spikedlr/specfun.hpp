#pragma once

#include <complex>
#include <vector>

#include "spikedlr/types.hpp"

namespace spikedlr::specfun {

using cplx = std::complex<double>;

enum class HypKind { F0_1, F1_1, F2_1 };

// Log-domain series evaluation with internal rescaling. log_noise estimates
// the absolute rounding error log(eps * max|term| * sqrt(#terms)); when
// log_noise is close to log|value| the result is cancellation-dominated.
struct SeriesEval {
    cplx log_value;
    double log_noise;
    int terms;

    double rel_noise_log() const { return log_noise - log_value.real(); }
};

// Stabilized log-domain evaluators: Kummer's transformation for 1F1 with
// Re z < 0, Pfaff's z -> z/(z-1) for 2F1 outside the disk.
SeriesEval hyp_log_0f1(double b, cplx z, int max_terms = 1000000);
SeriesEval hyp_log_1f1(double a, double b, cplx z, int max_terms = 1000000);
SeriesEval hyp_log_2f1(double a, double b, double c, cplx z, int max_terms = 1000000);

// Series oracle with relative truncation error <= 1e-13; a holds the upper
// parameters (size 0, 1 or 2 by kind), b the single lower parameter.
// Throws ToleranceError after the term cap, DomainError for 2F1 arguments on
// the branch cut [1, inf).
cplx hyp_series(HypKind kind, const std::vector<cplx>& a, cplx b, cplx z);

// Saddle machinery for 0F1(m+1; m^2 eta0): t0 = (1+sqrt(1+4 eta0))/2 and
// phi0(t) = ln t - t - eta0/t + 1. eta0 on the cut (-inf, -1/4] throws.
struct Phi0 {
    cplx t0;
    cplx phi0;
};
Phi0 saddle_phi0(cplx eta0);

// Uniform approximation (1+4 eta0)^{-1/4} exp{-m phi0(t0)} of
// 0F1(m+1; m^2 eta0); valid up to o(1) uniformly on |arg eta0| <= pi - delta.
cplx approx_0F1(double m, cplx eta0);
cplx approx_0F1_log(double m, cplx eta0);

// Saddle data for F1 = 1F1(m eps+1, m+1; m eta1) (j=1) and
// F2 = 2F1(m eps+1, m eps+1; m+1; eta2) (j=2).
struct SaddleJ {
    cplx t;      // t_j
    cplx phi;    // phi_j(t_j)
    cplx psi;    // psi_j(t_j)
    cplx phi2;   // phi_j''(t_j)
    double omega;  // branch satisfying |omega + 2 arg(t_j - 1)| <= pi/2
};
SaddleJ saddle_j(int j, double eps, cplx eta);

// phi_j and derivative at arbitrary t (used by finite-difference checks).
cplx phi_j(int j, double eps, cplx eta, cplx t);

// C_m psi_j(t_j) e^{-i omega_j/2} |2 pi m phi_j''(t_j)|^{-1/2} e^{-m phi_j(t_j)}
// with C_m by exact log-Gamma.
cplx approx_Fj(int j, double m, double eps, cplx eta);
cplx approx_Fj_log(int j, double m, double eps, cplx eta);

// ln C_m, C_m = Gamma(m+1) Gamma(m(eps-1)+1) / Gamma(m eps + 1).
double log_Cm_exact(double m, double eps);

// Stirling form sqrt(pi p (1-c1))/r * exp{m(eps-1)ln(eps-1) - m eps ln eps},
// with p, c2, r implied by (m, eps, c1).
double stirling_Cm(double m, double eps, double c1);

}  // namespace spikedlr::specfun
