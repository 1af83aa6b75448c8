#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "spikedlr/types.hpp"

namespace spikedlr {

// Adaptive Gauss-Kronrod (G7,K15) on [a,b] for complex-valued integrands of a
// real parameter. Bisects segments whose |K15-G7| exceeds the local share of
// the tolerance. abs_tol and rel_tol combine as max(abs_tol, rel_tol*|I|).
namespace gk {

// K15 abscissae (positive half) and weights; G7 weights on the shared nodes.
inline constexpr double kx[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0};
inline constexpr double kw[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
inline constexpr double gw[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

template <class F>
inline void rule15(const F& f, double a, double b, std::complex<double>& k15,
                   std::complex<double>& err) {
    const double h = 0.5 * (b - a);
    const double c = 0.5 * (a + b);
    std::complex<double> acc_k = kw[7] * f(c);
    std::complex<double> acc_g = gw[3] * f(c);
    for (int i = 0; i < 7; ++i) {
        const std::complex<double> fv = f(c - h * kx[i]) + f(c + h * kx[i]);
        acc_k += kw[i] * fv;
        if (i % 2 == 1) acc_g += gw[i / 2] * fv;
    }
    k15 = acc_k * h;
    err = (acc_k - acc_g) * h;
}

}  // namespace gk

template <class F>
std::complex<double> integrate_gk(const F& f, double a, double b,
                                  double abs_tol = 1e-12, double rel_tol = 1e-10,
                                  int max_segments = 4000) {
    struct Seg {
        double a, b;
        std::complex<double> val;
        double err;
    };
    std::vector<Seg> segs;
    auto make = [&](double lo, double hi) {
        std::complex<double> v, e;
        gk::rule15(f, lo, hi, v, e);
        return Seg{lo, hi, v, std::abs(e)};
    };
    segs.push_back(make(a, b));
    for (;;) {
        std::complex<double> total = 0.0;
        double err_total = 0.0;
        std::size_t worst = 0;
        double worst_err = -1.0;
        for (std::size_t i = 0; i < segs.size(); ++i) {
            total += segs[i].val;
            err_total += segs[i].err;
            if (segs[i].err > worst_err) {
                worst_err = segs[i].err;
                worst = i;
            }
        }
        const double tol = std::max(abs_tol, rel_tol * std::abs(total));
        if (err_total <= tol) return total;
        if (static_cast<int>(segs.size()) >= max_segments)
            throw ToleranceError("adaptive Gauss-Kronrod quadrature did not converge");
        const Seg s = segs[worst];
        const double mid = 0.5 * (s.a + s.b);
        segs[worst] = make(s.a, mid);
        segs.push_back(make(mid, s.b));
    }
}

inline double integrate_gk_real(const std::function<double(double)>& f, double a,
                                double b, double abs_tol = 1e-12,
                                double rel_tol = 1e-10, int max_segments = 4000) {
    auto wrapped = [&f](double x) { return std::complex<double>(f(x), 0.0); };
    return integrate_gk(wrapped, a, b, abs_tol, rel_tol, max_segments).real();
}

}  // namespace spikedlr
