#include "spikedlr/specfun.hpp"

#include <cmath>

namespace spikedlr::specfun {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kEps = 2.220446049250313e-16;
constexpr double kRescaleAt = 1e250;
constexpr double kRescaleLog = 575.6462732485114210;  // ln(1e250)

struct RawSeries {
    cplx sum;
    double log_scale;
    double max_term;  // on the same scale as sum
    int terms;
};

// Generic pFq power series: term_{k+1} = term_k * ratio(k) with
// ratio(k) = z * prod(a_i + k) / (prod(b_i + k) * (k+1)).
template <class Ratio>
RawSeries run_series(const Ratio& ratio, int max_terms) {
    RawSeries s{cplx(1.0, 0.0), 0.0, 1.0, 1};
    cplx term(1.0, 0.0);
    int small_streak = 0;
    for (int k = 0; k < max_terms; ++k) {
        term *= ratio(k);
        s.sum += term;
        const double at = std::abs(term);
        s.max_term = std::max(s.max_term, at);
        ++s.terms;
        if (at < 1e-16 * std::abs(s.sum)) {
            if (++small_streak >= 30) return s;
        } else {
            small_streak = 0;
        }
        if (at > kRescaleAt || std::abs(s.sum) > kRescaleAt) {
            const double f = 1.0 / kRescaleAt;
            term *= f;
            s.sum *= f;
            s.max_term *= f;
            s.log_scale += kRescaleLog;
        }
    }
    throw ToleranceError("hypergeometric series did not converge within the term cap");
}

SeriesEval finish(const RawSeries& s, cplx log_shift = 0.0) {
    SeriesEval out;
    out.log_value = std::log(s.sum) + s.log_scale + log_shift;
    out.log_noise = std::log(kEps * s.max_term * std::sqrt(static_cast<double>(s.terms))) +
                    s.log_scale + log_shift.real();
    out.terms = s.terms;
    return out;
}

RawSeries series_0f1(cplx b, cplx z, int max_terms) {
    return run_series([&](int k) { return z / ((b + static_cast<double>(k)) * (k + 1.0)); },
                      max_terms);
}

RawSeries series_1f1(cplx a, cplx b, cplx z, int max_terms) {
    return run_series(
        [&](int k) {
            return z * (a + static_cast<double>(k)) /
                   ((b + static_cast<double>(k)) * (k + 1.0));
        },
        max_terms);
}

RawSeries series_2f1(cplx a, cplx b, cplx c, cplx z, int max_terms) {
    return run_series(
        [&](int k) {
            return z * (a + static_cast<double>(k)) * (b + static_cast<double>(k)) /
                   ((c + static_cast<double>(k)) * (k + 1.0));
        },
        max_terms);
}

bool on_cut_1_inf(cplx z) { return z.imag() == 0.0 && z.real() >= 1.0; }

}  // namespace

SeriesEval hyp_log_0f1(double b, cplx z, int max_terms) {
    return finish(series_0f1(b, z, max_terms));
}

SeriesEval hyp_log_1f1(double a, double b, cplx z, int max_terms) {
    if (z.real() < 0.0) {
        // Kummer: 1F1(a,b;z) = e^z 1F1(b-a,b;-z); moves the argument into the
        // right half-plane where the terms do not cancel catastrophically.
        return finish(series_1f1(b - a, b, -z, max_terms), z);
    }
    return finish(series_1f1(a, b, z, max_terms));
}

SeriesEval hyp_log_2f1(double a, double b, double c, cplx z, int max_terms) {
    if (on_cut_1_inf(z)) throw DomainError("2F1 argument on the branch cut [1, inf)");
    if (std::abs(z) <= 0.9) return finish(series_2f1(a, b, c, z, max_terms));
    const cplx w = z / (z - 1.0);
    if (std::abs(w) <= 0.95) {
        // Pfaff: 2F1(a,b;c;z) = (1-z)^{-a} 2F1(a, c-b; c; z/(z-1)).
        return finish(series_2f1(a, c - b, c, w, max_terms), -a * std::log(1.0 - z));
    }
    if (std::abs(z) < 0.995) return finish(series_2f1(a, b, c, z, max_terms));
    throw DomainError("2F1 argument too close to the unit circle");
}

cplx hyp_series(HypKind kind, const std::vector<cplx>& a, cplx b, cplx z) {
    switch (kind) {
        case HypKind::F0_1:
            if (!a.empty()) throw ValidationError("0F1 takes no upper parameters");
            return std::exp(finish(series_0f1(b, z, 1000000)).log_value);
        case HypKind::F1_1: {
            if (a.size() != 1) throw ValidationError("1F1 takes one upper parameter");
            if (z.real() < 0.0)
                return std::exp(finish(series_1f1(b - a[0], b, -z, 1000000), z).log_value);
            return std::exp(finish(series_1f1(a[0], b, z, 1000000)).log_value);
        }
        case HypKind::F2_1: {
            if (a.size() != 2) throw ValidationError("2F1 takes two upper parameters");
            if (on_cut_1_inf(z)) throw DomainError("2F1 argument on the branch cut [1, inf)");
            if (std::abs(z) > 0.9 && std::abs(z / (z - 1.0)) <= 0.95)
                return std::exp(
                    finish(series_2f1(a[0], b - a[1], b, z / (z - 1.0), 1000000),
                           -a[0] * std::log(1.0 - z))
                        .log_value);
            if (std::abs(z) < 0.995)
                return std::exp(finish(series_2f1(a[0], a[1], b, z, 1000000)).log_value);
            throw DomainError("2F1 argument too close to the unit circle");
        }
    }
    throw ValidationError("unknown hypergeometric kind");
}

Phi0 saddle_phi0(cplx eta0) {
    const cplx disc = 1.0 + 4.0 * eta0;
    if (disc.imag() == 0.0 && disc.real() <= 0.0)
        throw DomainError("saddle_phi0: eta0 on the cut (-inf, -1/4]");
    Phi0 out;
    out.t0 = 0.5 * (1.0 + std::sqrt(disc));
    out.phi0 = std::log(out.t0) - out.t0 - eta0 / out.t0 + 1.0;
    return out;
}

cplx approx_0F1_log(double m, cplx eta0) {
    const Phi0 s = saddle_phi0(eta0);
    return -0.25 * std::log(1.0 + 4.0 * eta0) - m * s.phi0;
}

cplx approx_0F1(double m, cplx eta0) { return std::exp(approx_0F1_log(m, eta0)); }

cplx phi_j(int j, double eps, cplx eta, cplx t) {
    if (j == 1) return -eta * t - eps * std::log(t) + (eps - 1.0) * std::log(t - 1.0);
    return -eps * (std::log(t) - std::log(1.0 - eta * t)) + (eps - 1.0) * std::log(t - 1.0);
}

SaddleJ saddle_j(int j, double eps, cplx eta) {
    if (!(eps > 1.0)) throw DomainError("saddle_j requires eps > 1");
    SaddleJ out;
    if (j == 1) {
        // root of eta t^2 - (eta-1) t - eps = 0 reducing to t = eps at eta = 0;
        // the form 2 eps / (D - eta + 1) is stable for small |eta|.
        const cplx D = std::sqrt((eta - 1.0) * (eta - 1.0) + 4.0 * eps * eta);
        out.t = 2.0 * eps / (D - eta + 1.0);
        out.psi = 1.0 / (out.t - 1.0);
        out.phi2 = eps / (out.t * out.t) - (eps - 1.0) / ((out.t - 1.0) * (out.t - 1.0));
    } else if (j == 2) {
        if (std::abs(std::arg(1.0 - eta)) >= kPi)
            throw DomainError("saddle_j(2): arg(1 - eta2) outside (-pi, pi)");
        const cplx D = std::sqrt(1.0 + 4.0 * eps * (eps - 1.0) * eta);
        out.t = 2.0 * eps / (1.0 + D);
        const cplx u = 1.0 - eta * out.t;
        out.psi = 1.0 / ((out.t - 1.0) * u);
        out.phi2 = eps / (out.t * out.t) - eps * eta * eta / (u * u) -
                   (eps - 1.0) / ((out.t - 1.0) * (out.t - 1.0));
    } else {
        throw ValidationError("saddle_j: j must be 1 or 2");
    }
    out.phi = phi_j(j, eps, eta, out.t);

    const double omega0 = std::arg(out.t - 1.0);
    const double omega_raw = std::arg(out.phi2) + kPi;
    double best = 0.0, best_abs = 1e300;
    for (int k = -3; k <= 3; ++k) {
        const double w = omega_raw + 2.0 * kPi * k;
        const double v = std::fabs(w + 2.0 * omega0);
        if (v < best_abs) {
            best_abs = v;
            best = w;
        }
    }
    if (best_abs > 0.5 * kPi + 1e-9)
        throw DomainError("saddle_j: omega branch constraint unsatisfiable");
    out.omega = best;
    return out;
}

cplx approx_Fj_log(int j, double m, double eps, cplx eta) {
    const SaddleJ s = saddle_j(j, eps, eta);
    return log_Cm_exact(m, eps) + std::log(s.psi) -
           0.5 * std::log(2.0 * kPi * m * std::abs(s.phi2)) -
           cplx(0.0, 0.5 * s.omega) - m * s.phi;
}

cplx approx_Fj(int j, double m, double eps, cplx eta) {
    return std::exp(approx_Fj_log(j, m, eps, eta));
}

double log_Cm_exact(double m, double eps) {
    return std::lgamma(m + 1.0) + std::lgamma(m * (eps - 1.0) + 1.0) -
           std::lgamma(m * eps + 1.0);
}

double stirling_Cm(double m, double eps, double c1) {
    if (!(c1 > 0.0 && c1 < 1.0)) throw DomainError("stirling_Cm requires c1 in (0,1)");
    const double p = 2.0 * m * c1 / (1.0 - c1);
    const double c2 = c1 / ((1.0 - c1) * (eps - 1.0));
    const double r = std::sqrt(c2 * (1.0 - c1) + c1);  // r^2, grouped to avoid inf-inf
    auto xlogx = [](double x) { return x > 0.0 ? x * std::log(x) : 0.0; };
    return std::sqrt(kPi * p * (1.0 - c1)) / r *
           std::exp(m * xlogx(eps - 1.0) - m * eps * std::log(eps));
}

}  // namespace spikedlr::specfun
