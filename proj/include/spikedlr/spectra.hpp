#pragma once

#include <complex>
#include <functional>
#include <utility>
#include <vector>

#include "spikedlr/types.hpp"

namespace spikedlr::spectra {

enum class LawFamily { SC, MP, W };

// Limiting spectral law of the null eigenvalues: semicircle (SMD),
// Marchenko-Pastur (PCA, REG0) or scaled Wachter (SigD, REG, CCA), at the
// finite-sample ratios c1 = p/n1, c2 = p/n2. c2 = 0 inside the W path is an
// alias for MP, which supports the confluence checks.
struct LimitLaw {
    LawFamily family = LawFamily::SC;
    double c1 = 0.0;
    double c2 = 0.0;

    static LimitLaw semicircle() { return {LawFamily::SC, 0.0, 0.0}; }
    static LimitLaw marchenko_pastur(double c1);
    static LimitLaw wachter(double c1, double c2);

    double r2() const { return c1 + c2 - c1 * c2; }
    double r() const;

    // MP formulas apply when family == MP, or family == W with c2 == 0.
    bool mp_like() const { return family == LawFamily::MP || (family == LawFamily::W && c2 <= 0.0); }
};

LimitLaw limit_law_for(const CaseSpec& spec);

// Support endpoints (beta_-, beta_+).
std::pair<double, double> support(const LimitLaw& law);

// Density; zero outside the support.
double density(const LimitLaw& law, double lambda);

// Phase-transition threshold theta_bar. W family with c2 == 1 has an
// infinite threshold; returns +inf.
double threshold(const LimitLaw& law);

// Stieltjes transform m(z) = \int (lambda - z)^{-1} dF(lambda), branch with
// m(z) -> 0 as |z| -> inf and Im m > 0 for Im z > 0. z must lie off the
// support.
std::complex<double> stieltjes(const LimitLaw& law, std::complex<double> z);
std::complex<double> stieltjes_deriv(const LimitLaw& law, std::complex<double> z);

// \int g dF by adaptive quadrature after the substitution
// lambda = alpha - beta*cos(phi), which removes the edge square roots.
double lss_expectation(const LimitLaw& law, const std::function<double(double)>& g);
std::complex<double> lss_expectation_c(const LimitLaw& law,
                                       const std::function<std::complex<double>(double)>& g);

// Closed forms for 2 f_II(z0) = \int ln(z0 - lambda) dF(lambda):
// the contour-integral reduction for the W family and its c2 -> 0 and
// (c1 -> 0, theta -> sqrt(c1) theta) limits. theta must lie in (0, theta_bar).
double f2_closed(CaseId case_id, double c1, double c2, double theta);

// Tabulated CDF with quantile lookup (monotone interpolation on a phi-grid).
class LawCdf {
public:
    explicit LawCdf(const LimitLaw& law, int grid = 4001);
    double cdf(double lambda) const;
    double quantile(double q) const;

private:
    double alpha_ = 0.0, beta_ = 0.0;
    std::vector<double> phi_;   // grid on [0, pi]
    std::vector<double> cum_;   // CDF values at lambda(phi)
};

}  // namespace spikedlr::spectra
