#include "spikedlr/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spikedlr/quadrature.hpp"

namespace spikedlr::spectra {

namespace {

constexpr double kPi = 3.14159265358979323846;

double l_of_theta(double c1, double c2, double theta) {
    return 1.0 + (1.0 + theta) * c2 / c1;
}

// Quadratic coefficients of A m^2 + B m + C = 0 satisfied by the Stieltjes
// transform; m is evaluated as -2C/(B + S) with S^2 = B^2 - 4AC, which stays
// finite at the removable points (z = 0 for MP, z = c1/c2 for W) and picks
// the decaying branch with principal square roots.
struct StieltjesParts {
    std::complex<double> B;
    std::complex<double> S;
    double C;
};

StieltjesParts stieltjes_parts(const LimitLaw& law, std::complex<double> z) {
    const auto [lo, hi] = support(law);
    StieltjesParts out;
    const std::complex<double> edge = std::sqrt(z - lo) * std::sqrt(z - hi);
    if (law.family == LawFamily::SC) {
        out.B = z;
        out.S = edge;
        out.C = 1.0;
    } else if (law.mp_like()) {
        out.B = z + law.c1 - 1.0;
        out.S = edge;
        out.C = 1.0;
    } else {
        const double c1 = law.c1, c2 = law.c2;
        out.B = (c1 - 1.0) * (c1 - c2 * z) + (1.0 - c2) * c1 * z;
        out.S = (c1 + c2) * edge;
        out.C = law.r2();
    }
    return out;
}

void require_off_support(const LimitLaw& law, std::complex<double> z) {
    if (z.imag() != 0.0) return;
    const auto [lo, hi] = support(law);
    const double x = z.real();
    if (x >= lo - 1e-14 && x <= hi + 1e-14)
        throw DomainError("Stieltjes transform evaluated on the support");
}

// density = weight(lambda) * sqrt((hi-lambda)(lambda-lo))
double edge_weight(const LimitLaw& law, double lambda) {
    if (law.family == LawFamily::SC) return 1.0 / (2.0 * kPi);
    if (law.mp_like()) return 1.0 / (2.0 * kPi * law.c1 * lambda);
    const double c1 = law.c1, c2 = law.c2;
    return (c1 + c2) / (2.0 * kPi * c1 * lambda * (c1 - c2 * lambda));
}

}  // namespace

LimitLaw LimitLaw::marchenko_pastur(double c1) {
    if (!(c1 > 0.0 && c1 < 1.0)) throw ValidationError("MP law requires c1 in (0,1)");
    return {LawFamily::MP, c1, 0.0};
}

LimitLaw LimitLaw::wachter(double c1, double c2) {
    if (!(c1 > 0.0 && c1 < 1.0)) throw ValidationError("W law requires c1 in (0,1)");
    if (!(c2 >= 0.0 && c2 <= 1.0)) throw ValidationError("W law requires c2 in [0,1]");
    return {LawFamily::W, c1, c2};
}

double LimitLaw::r() const { return std::sqrt(r2()); }

LimitLaw limit_law_for(const CaseSpec& spec) {
    switch (spec.case_id) {
        case CaseId::SMD: return LimitLaw::semicircle();
        case CaseId::PCA:
        case CaseId::REG0: return LimitLaw::marchenko_pastur(spec.c1());
        default: return LimitLaw::wachter(spec.c1(), spec.c2());
    }
}

std::pair<double, double> support(const LimitLaw& law) {
    switch (law.family) {
        case LawFamily::SC: return {-2.0, 2.0};
        case LawFamily::MP: break;
        case LawFamily::W:
            if (law.c2 > 0.0) {
                // c1 (r -+ c1)^2 / (c1+c2)^2, algebraically equal to the
                // (rho -+ 1)/(rho -+ c2) form and finite at c2 = 1.
                const double c1 = law.c1, c2 = law.c2, rr = law.r();
                const double d = (c1 + c2) * (c1 + c2);
                return {c1 * (rr - c1) * (rr - c1) / d, c1 * (rr + c1) * (rr + c1) / d};
            }
            break;
    }
    const double s = std::sqrt(law.c1);
    return {(1.0 - s) * (1.0 - s), (1.0 + s) * (1.0 + s)};
}

double density(const LimitLaw& law, double lambda) {
    const auto [lo, hi] = support(law);
    if (lambda <= lo || lambda >= hi) return 0.0;
    return edge_weight(law, lambda) * std::sqrt((hi - lambda) * (lambda - lo));
}

double threshold(const LimitLaw& law) {
    switch (law.family) {
        case LawFamily::SC: return 1.0;
        case LawFamily::MP: return std::sqrt(law.c1);
        case LawFamily::W:
            if (law.c2 <= 0.0) return std::sqrt(law.c1);
            if (law.c2 >= 1.0) return std::numeric_limits<double>::infinity();
            return (law.c2 + law.r()) / (1.0 - law.c2);
    }
    return 1.0;
}

std::complex<double> stieltjes(const LimitLaw& law, std::complex<double> z) {
    require_off_support(law, z);
    const auto parts = stieltjes_parts(law, z);
    return -2.0 * parts.C / (parts.B + parts.S);
}

std::complex<double> stieltjes_deriv(const LimitLaw& law, std::complex<double> z) {
    require_off_support(law, z);
    const auto [lo, hi] = support(law);
    const auto parts = stieltjes_parts(law, z);
    std::complex<double> Bp;
    if (law.family == LawFamily::SC) {
        Bp = 1.0;
    } else if (law.mp_like()) {
        Bp = 1.0;
    } else {
        const double c1 = law.c1, c2 = law.c2;
        Bp = c1 + c2 - 2.0 * c1 * c2;
    }
    const std::complex<double> Sp = parts.S * 0.5 * (1.0 / (z - lo) + 1.0 / (z - hi));
    const std::complex<double> denom = parts.B + parts.S;
    return 2.0 * parts.C * (Bp + Sp) / (denom * denom);
}

std::complex<double> lss_expectation_c(const LimitLaw& law,
                                       const std::function<std::complex<double>(double)>& g) {
    const auto [lo, hi] = support(law);
    const double alpha = 0.5 * (hi + lo);
    const double beta = 0.5 * (hi - lo);
    auto integrand = [&](double phi) -> std::complex<double> {
        const double s = std::sin(phi);
        const double lambda = alpha - beta * std::cos(phi);
        return g(lambda) * edge_weight(law, lambda) * beta * beta * s * s;
    };
    return integrate_gk(integrand, 0.0, kPi, 1e-13, 1e-11);
}

double lss_expectation(const LimitLaw& law, const std::function<double(double)>& g) {
    return lss_expectation_c(law, [&g](double x) { return std::complex<double>(g(x), 0.0); })
        .real();
}

double f2_closed(CaseId case_id, double c1, double c2, double theta) {
    switch (case_id) {
        case CaseId::SMD: {
            if (!(theta > 0.0 && theta < 1.0))
                throw DomainError("f2_closed(SMD) requires theta in (0,1)");
            return -std::log(theta) + 0.5 * theta * theta;
        }
        case CaseId::PCA:
        case CaseId::REG0: {
            if (!(theta > 0.0 && theta < std::sqrt(c1)))
                throw DomainError("f2_closed requires theta in (0, sqrt(c1))");
            return std::log(c1) - std::log(theta) -
                   (1.0 - c1) / c1 * std::log1p(theta) + theta / c1;
        }
        default: {
            const LimitLaw law = LimitLaw::wachter(c1, c2);
            if (!(theta > 0.0 && theta < threshold(law)))
                throw DomainError("f2_closed requires theta in (0, theta_bar)");
            const double r2 = law.r2();
            return 2.0 * std::log(c1) - std::log(theta) -
                   (1.0 - c1) / c1 * std::log1p(theta) -
                   (c1 + c2) / (c1 * c2) * std::log(c1 + c2) +
                   r2 / (c1 * c2) * std::log(c1 * l_of_theta(c1, c2, theta));
        }
    }
}

LawCdf::LawCdf(const LimitLaw& law, int grid) {
    const auto [lo, hi] = support(law);
    alpha_ = 0.5 * (hi + lo);
    beta_ = 0.5 * (hi - lo);
    phi_.resize(grid);
    cum_.resize(grid);
    std::vector<double> dens(grid);
    for (int i = 0; i < grid; ++i) {
        phi_[i] = kPi * static_cast<double>(i) / (grid - 1);
        const double s = std::sin(phi_[i]);
        const double lambda = alpha_ - beta_ * std::cos(phi_[i]);
        dens[i] = edge_weight(law, lambda) * beta_ * beta_ * s * s;
    }
    cum_[0] = 0.0;
    for (int i = 1; i < grid; ++i) {
        const double h = phi_[i] - phi_[i - 1];
        cum_[i] = cum_[i - 1] + 0.5 * h * (dens[i] + dens[i - 1]);
    }
    const double total = cum_.back();
    for (double& c : cum_) c /= total;
}

double LawCdf::cdf(double lambda) const {
    const double x = (alpha_ - lambda) / beta_;
    if (x >= 1.0) return 0.0;
    if (x <= -1.0) return 1.0;
    const double phi = std::acos(x);
    const auto it = std::upper_bound(phi_.begin(), phi_.end(), phi);
    const std::size_t i = std::min<std::size_t>(phi_.size() - 1, it - phi_.begin());
    const double t = (phi - phi_[i - 1]) / (phi_[i] - phi_[i - 1]);
    return cum_[i - 1] + t * (cum_[i] - cum_[i - 1]);
}

double LawCdf::quantile(double q) const {
    if (!(q >= 0.0 && q <= 1.0)) throw DomainError("quantile requires q in [0,1]");
    const auto it = std::lower_bound(cum_.begin(), cum_.end(), q);
    std::size_t i = std::min<std::size_t>(cum_.size() - 1,
                                          std::max<std::ptrdiff_t>(1, it - cum_.begin()));
    const double dc = cum_[i] - cum_[i - 1];
    const double t = dc > 0.0 ? (q - cum_[i - 1]) / dc : 0.5;
    const double phi = phi_[i - 1] + t * (phi_[i] - phi_[i - 1]);
    return alpha_ - beta_ * std::cos(phi);
}

}  // namespace spikedlr::spectra
