#include "spikedlr/inference.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

#include "spikedlr/lrengine.hpp"
#include "spikedlr/rng.hpp"
#include "spikedlr/spectra.hpp"
#include "spikedlr/stats.hpp"

namespace spikedlr::inference {

namespace {

double limit_threshold(CaseId case_id, double g1, double g2) {
    switch (case_id) {
        case CaseId::SMD: return 1.0;
        case CaseId::PCA:
        case CaseId::REG0: return std::sqrt(g1);
        default: {
            if (g2 >= 1.0) return std::numeric_limits<double>::infinity();
            return (g2 + std::sqrt(g1 + g2 - g1 * g2)) / (1.0 - g2);
        }
    }
}

}  // namespace

double delta_limit(CaseId case_id, double theta, double g1, double g2) {
    if (theta < 0.0) throw DomainError("delta_limit requires theta >= 0");
    if (theta >= limit_threshold(case_id, g1, g2))
        throw DomainError("delta_limit requires theta < theta_bar");
    switch (case_id) {
        case CaseId::SMD:
            return theta;
        case CaseId::PCA:
        case CaseId::REG0:
            return theta / std::sqrt(g1);
        default:
            return theta * std::sqrt(g1 + g2 - g1 * g2) / (g1 + g2 + theta * g2);
    }
}

GaussianLimit limit_law(CaseId case_id, double theta, double g1, double g2,
                        Hypothesis hyp) {
    GaussianLimit out;
    out.delta = delta_limit(case_id, theta, g1, g2);
    if (out.delta >= 1.0) throw DomainError("limit_law requires delta < 1");
    const double log1md2 = std::log1p(-out.delta * out.delta);
    out.variance = -0.5 * log1md2;
    out.mean = (hyp == Hypothesis::Null ? 0.25 : -0.25) * log1md2;
    return out;
}

double limit_cov(CaseId case_id, double theta1, double theta2, double g1, double g2) {
    const double d1 = delta_limit(case_id, theta1, g1, g2);
    const double d2 = delta_limit(case_id, theta2, g1, g2);
    if (d1 * d2 >= 1.0) throw DomainError("limit_cov requires delta1*delta2 < 1");
    return -0.5 * std::log1p(-d1 * d2);
}

double power_envelope(CaseId case_id, double theta, double alpha, double g1, double g2) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha must be in (0,1)");
    if (theta < 0.0) throw DomainError("power_envelope requires theta >= 0");
    if (theta >= limit_threshold(case_id, g1, g2)) return 1.0;
    const double d = delta_limit(case_id, theta, g1, g2);
    if (d == 0.0) return alpha;  // zero shift: size exactly
    const double shift = std::sqrt(-0.5 * std::log1p(-d * d));
    return 1.0 - norm_cdf(norm_quantile(1.0 - alpha) - shift);
}

bool np_reject(double lnL, CaseId case_id, double theta, double alpha, double g1,
               double g2) {
    const GaussianLimit null_law = limit_law(case_id, theta, g1, g2, Hypothesis::Null);
    return lnL > null_law.mean + std::sqrt(null_law.variance) * norm_quantile(1.0 - alpha);
}

MCSummary monte_carlo(const MCConfig& config_in) {
    MCConfig config = config_in;
    config.spec.validate();
    if (config.replicates < 1) throw ValidationError("replicates must be >= 1");
    const double tbar = lrengine::theta_bar_p(config.spec);
    if (config.theta_grid.empty()) {
        for (int i = 1; i <= 9; ++i) config.theta_grid.push_back(0.1 * i * tbar);
    }
    for (double th : config.theta_grid)
        if (!(th > 0.0 && th < tbar))
            throw ValidationError("theta grid must lie in (0, theta_bar_p)");

    const std::size_t nth = config.theta_grid.size();
    const int reps = config.replicates;
    const double g1 = config.spec.uses_n1() ? config.spec.c1() : 0.0;
    const double g2 = config.spec.two_wishart() ? config.spec.c2() : 0.0;

    MCSummary out;
    out.config = config;
    out.lnL.assign(reps, std::vector<double>(nth, 0.0));
    std::vector<std::vector<double>> lnL_lap;
    if (config.also_laplace) lnL_lap.assign(reps, std::vector<double>(nth, 0.0));
    std::vector<std::vector<int>> flagged(reps, std::vector<int>(nth, 0));

    int workers = config.workers > 0
                      ? config.workers
                      : static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
    workers = std::min<int>(workers, reps);

    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::string error_msg;
    std::mutex error_mutex;

    auto worker = [&]() {
        for (;;) {
            const int r = next.fetch_add(1);
            if (r >= reps || failed.load()) break;
            try {
                ensembles::SpikeParam spike;
                spike.theta = config.theta_true;
                const auto sample = ensembles::sample_case(
                    config.spec, spike, derive_seed(config.seed, r));
                for (std::size_t j = 0; j < nth; ++j) {
                    const auto res =
                        lrengine::lr_asymptotic(config.spec, config.theta_grid[j], sample);
                    out.lnL[r][j] = res.log_value;
                    flagged[r][j] = res.gII_unity ? 1 : 0;
                    if (config.also_laplace)
                        lnL_lap[r][j] =
                            lrengine::lr_laplace(config.spec, config.theta_grid[j], sample)
                                .log_value;
                }
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                error_msg = e.what();
                failed.store(true);
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (failed.load()) throw DomainError("monte_carlo replicate failed: " + error_msg);

    out.per_theta.resize(nth);
    for (std::size_t j = 0; j < nth; ++j) {
        ThetaSummary& s = out.per_theta[j];
        s.theta = config.theta_grid[j];
        s.delta_p = lrengine::delta_p_coef(config.spec, s.theta);
        const GaussianLimit pred =
            limit_law(config.spec.case_id, s.theta, g1, g2, Hypothesis::Null);
        s.pred_mean = pred.mean;
        s.pred_variance = pred.variance;
        std::vector<double> col(reps);
        double mean_L = 0.0;
        int rejects = 0;
        double lap_sum = 0.0;
        for (int r = 0; r < reps; ++r) {
            col[r] = out.lnL[r][j];
            mean_L += std::exp(col[r]);
            s.flagged += flagged[r][j];
            if (np_reject(col[r], config.spec.case_id, s.theta, config.alpha, g1, g2))
                ++rejects;
            if (config.also_laplace) lap_sum += lnL_lap[r][j];
        }
        s.mean_lnL = mean_of(col);
        s.var_lnL = reps > 1 ? variance_of(col) : 0.0;
        s.mean_L = mean_L / reps;
        s.reject_rate = static_cast<double>(rejects) / reps;
        if (config.also_laplace) s.mean_lnL_laplace = lap_sum / reps;
        const double sd = std::sqrt(s.pred_variance);
        s.ks_to_normal = ks_distance(
            col, [&](double x) { return norm_cdf((x - s.pred_mean) / sd); });
    }

    out.lnL_cov.assign(nth, std::vector<double>(nth, 0.0));
    for (std::size_t a = 0; a < nth; ++a) {
        for (std::size_t b = a; b < nth; ++b) {
            double cov = 0.0;
            for (int r = 0; r < reps; ++r)
                cov += (out.lnL[r][a] - out.per_theta[a].mean_lnL) *
                       (out.lnL[r][b] - out.per_theta[b].mean_lnL);
            cov /= std::max(1, reps - 1);
            out.lnL_cov[a][b] = cov;
            out.lnL_cov[b][a] = cov;
        }
    }
    return out;
}

}  // namespace spikedlr::inference
