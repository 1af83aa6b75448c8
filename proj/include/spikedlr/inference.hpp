#pragma once

#include <cstdint>
#include <vector>

#include "spikedlr/ensembles.hpp"
#include "spikedlr/types.hpp"

namespace spikedlr::inference {

enum class Hypothesis { Null, Alternative };

// delta(theta) of the Gaussian limit: theta (SMD), theta/sqrt(g1)
// (PCA/REG0), theta*rho/(g1+g2+theta*g2) (SigD/REG/CCA).
double delta_limit(CaseId case_id, double theta, double g1, double g2);

struct GaussianLimit {
    double delta = 0.0;
    double mean = 0.0;      // +-(1/4) ln(1-delta^2), sign by hypothesis
    double variance = 0.0;  // -(1/2) ln(1-delta^2)
};
GaussianLimit limit_law(CaseId case_id, double theta, double g1, double g2,
                        Hypothesis hyp = Hypothesis::Null);

// Cov(L(theta1), L(theta2)) = -(1/2) ln(1 - delta1 delta2).
double limit_cov(CaseId case_id, double theta1, double theta2, double g1, double g2);

// Asymptotic power envelope; 1 for theta >= theta_bar.
double power_envelope(CaseId case_id, double theta, double alpha, double g1, double g2);

// Neyman-Pearson test at asymptotic size alpha: reject iff
// lnL > mean_null + sqrt(variance) * Phi^{-1}(1-alpha).
bool np_reject(double lnL, CaseId case_id, double theta, double alpha, double g1,
               double g2);

struct MCConfig {
    CaseSpec spec;
    std::vector<double> theta_grid;  // empty: {0.1,...,0.9} * theta_bar_p
    double theta_true = 0.0;
    int replicates = 100;
    std::uint64_t seed = 0;
    int workers = 0;  // 0: hardware concurrency
    double alpha = 0.05;
    bool also_laplace = false;  // additionally evaluate lr_laplace per point
};

struct ThetaSummary {
    double theta = 0.0;
    double delta_p = 0.0;          // finite-p delta
    double pred_mean = 0.0;        // null-hypothesis prediction
    double pred_variance = 0.0;
    double mean_lnL = 0.0;
    double var_lnL = 0.0;
    double ks_to_normal = 0.0;     // vs N(pred_mean, pred_variance)
    double mean_L = 0.0;
    double reject_rate = 0.0;      // NP test at alpha
    double mean_lnL_laplace = 0.0; // only when also_laplace
    int flagged = 0;               // z0 <= lambda_1 events
};

struct MCSummary {
    MCConfig config;
    std::vector<ThetaSummary> per_theta;
    std::vector<std::vector<double>> lnL;      // replicates x thetas
    std::vector<std::vector<double>> lnL_cov;  // empirical covariance, thetas x thetas
};

// Deterministic for fixed (config, seed) independent of worker count:
// replicate r uses the stream derived from (seed, r).
MCSummary monte_carlo(const MCConfig& config);

}  // namespace spikedlr::inference
