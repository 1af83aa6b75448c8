#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "spikedlr/types.hpp"

namespace spikedlr::ensembles {

// Rank-one spike theta with optional unit direction(s). psi (length p)
// defaults to e1; phi (length n1, used by REG0/REG/CCA) defaults to e1.
// The eigenvalue law is invariant to both.
struct SpikeParam {
    double theta = 0.0;
    std::optional<Eigen::VectorXd> psi;
    std::optional<Eigen::VectorXd> phi;
};

struct EigenSample {
    CaseSpec spec;
    double theta_true = 0.0;
    std::uint64_t seed = 0;
    std::vector<double> values;  // descending
};

// GOE draw: symmetric, diagonal N(0,2), off-diagonal N(0,1).
Eigen::MatrixXd sample_goe(int p, std::uint64_t seed);

// The p solutions of det(H - lambda E) = 0 for symmetric H and positive
// definite E, descending. Cholesky reduction keeps them real.
std::vector<double> generalized_eigs(const Eigen::MatrixXd& H, const Eigen::MatrixXd& E);

// The p solutions of det(H - lambda (E + (n1/n2) H)) = 0, descending.
std::vector<double> beta_form_eigs(const Eigen::MatrixXd& H, const Eigen::MatrixXd& E,
                                   int n1, int n2);

// Case-appropriate eigenvalue statistic under a rank-one alternative.
// For CCA the stored values are the squared sample canonical correlations
// scaled by n2/n1, matching the Psi11 normalization of the likelihood ratio
// and the scaled-Wachter null law.
EigenSample sample_case(const CaseSpec& spec, const SpikeParam& spike, std::uint64_t seed);

}  // namespace spikedlr::ensembles
