#include "spikedlr/ensembles.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "spikedlr/rng.hpp"

namespace spikedlr::ensembles {

namespace {

Eigen::MatrixXd gaussian_matrix(GaussianStream& g, int rows, int cols) {
    Eigen::MatrixXd m(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) m(i, j) = g.normal();
    return m;
}

Eigen::VectorXd unit_or_default(const std::optional<Eigen::VectorXd>& v, int dim,
                                const char* what) {
    if (!v) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(dim);
        e(0) = 1.0;
        return e;
    }
    if (v->size() != dim)
        throw ValidationError(std::string(what) + " direction has wrong length");
    const double nrm = v->norm();
    if (std::fabs(nrm - 1.0) > 1e-8)
        throw ValidationError(std::string(what) + " direction must be a unit vector");
    return *v / nrm;
}

std::vector<double> descending(Eigen::VectorXd v) {
    std::vector<double> out(v.data(), v.data() + v.size());
    std::sort(out.begin(), out.end(), std::greater<double>());
    for (double x : out)
        if (!std::isfinite(x)) throw DomainError("non-finite eigenvalue");
    return out;
}

// n x p Gaussian with rows N(0, I + theta psi psi').
Eigen::MatrixXd spiked_gaussian_rows(GaussianStream& g, int n, int p,
                                     const Eigen::VectorXd& psi, double theta) {
    Eigen::MatrixXd b = gaussian_matrix(g, n, p);
    if (theta > 0.0) {
        // (I + theta psi psi')^{1/2} = I + (sqrt(1+theta)-1) psi psi'
        const double c = std::sqrt(1.0 + theta) - 1.0;
        b += c * (b * psi) * psi.transpose();
    }
    return b;
}

}  // namespace

Eigen::MatrixXd sample_goe(int p, std::uint64_t seed) {
    if (p < 1) throw ValidationError("sample_goe: p must be positive");
    GaussianStream g(derive_seed(seed, 0, 0x60e));
    Eigen::MatrixXd z(p, p);
    for (int i = 0; i < p; ++i) {
        z(i, i) = std::sqrt(2.0) * g.normal();
        for (int j = i + 1; j < p; ++j) {
            const double v = g.normal();
            z(i, j) = v;
            z(j, i) = v;
        }
    }
    return z;
}

std::vector<double> generalized_eigs(const Eigen::MatrixXd& H, const Eigen::MatrixXd& E) {
    if (H.rows() != H.cols() || E.rows() != E.cols() || H.rows() != E.rows())
        throw ValidationError("generalized_eigs: dimension mismatch");
    Eigen::LLT<Eigen::MatrixXd> llt(E);
    if (llt.info() != Eigen::Success)
        throw DomainError("generalized_eigs: E is not positive definite");
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(H, E,
                                                                     Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw DomainError("generalized_eigs: eigensolver failed");
    return descending(solver.eigenvalues());
}

std::vector<double> beta_form_eigs(const Eigen::MatrixXd& H, const Eigen::MatrixXd& E,
                                   int n1, int n2) {
    const double ratio = static_cast<double>(n1) / n2;
    return generalized_eigs(H, E + ratio * H);
}

EigenSample sample_case(const CaseSpec& spec, const SpikeParam& spike, std::uint64_t seed) {
    spec.validate();
    if (spike.theta < 0.0) throw ValidationError("spike theta must be nonnegative");
    const int p = spec.p;
    const Eigen::VectorXd psi = unit_or_default(spike.psi, p, "psi");

    GaussianStream g(derive_seed(seed, 1, static_cast<std::uint64_t>(spec.case_id)));
    EigenSample out;
    out.spec = spec;
    out.theta_true = spike.theta;
    out.seed = seed;

    switch (spec.case_id) {
        case CaseId::SMD: {
            Eigen::MatrixXd x = sample_goe(p, seed) / std::sqrt(static_cast<double>(p));
            x += spike.theta * psi * psi.transpose();
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x, Eigen::EigenvaluesOnly);
            out.values = descending(es.eigenvalues());
            break;
        }
        case CaseId::PCA: {
            Eigen::MatrixXd b = spiked_gaussian_rows(g, spec.n1, p, psi, spike.theta);
            Eigen::MatrixXd h = b.transpose() * b / static_cast<double>(spec.n1);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
            out.values = descending(es.eigenvalues());
            break;
        }
        case CaseId::SigD: {
            Eigen::MatrixXd b1 = spiked_gaussian_rows(g, spec.n1, p, psi, spike.theta);
            Eigen::MatrixXd b2 = gaussian_matrix(g, spec.n2, p);
            Eigen::MatrixXd h = b1.transpose() * b1 / static_cast<double>(spec.n1);
            Eigen::MatrixXd e = b2.transpose() * b2 / static_cast<double>(spec.n2);
            out.values = beta_form_eigs(h, e, spec.n1, spec.n2);
            break;
        }
        case CaseId::REG0:
        case CaseId::REG: {
            const Eigen::VectorXd phi = unit_or_default(spike.phi, spec.n1, "phi");
            Eigen::MatrixXd y1 = gaussian_matrix(g, spec.n1, p);
            if (spike.theta > 0.0)
                y1 += std::sqrt(spec.n1 * spike.theta) * phi * psi.transpose();
            Eigen::MatrixXd h = y1.transpose() * y1 / static_cast<double>(spec.n1);
            if (spec.case_id == CaseId::REG0) {
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
                out.values = descending(es.eigenvalues());
            } else {
                Eigen::MatrixXd b2 = gaussian_matrix(g, spec.n2, p);
                Eigen::MatrixXd e = b2.transpose() * b2 / static_cast<double>(spec.n2);
                out.values = beta_form_eigs(h, e, spec.n1, spec.n2);
            }
            break;
        }
        case CaseId::CCA: {
            const int q = spec.n1;           // dimension of y
            const int nobs = spec.n1 + spec.n2;
            const Eigen::VectorXd phi = unit_or_default(spike.phi, q, "phi");
            const double rho2 =
                spec.n1 * spike.theta / (spec.n1 * spike.theta + spec.n1 + spec.n2);
            const double rho = std::sqrt(rho2);
            Eigen::MatrixXd y = gaussian_matrix(g, nobs, q);
            Eigen::MatrixXd x = gaussian_matrix(g, nobs, p);
            if (spike.theta > 0.0) {
                // x | y has mean rho (y phi) psi' and covariance I - rho^2 psi psi'
                const double c = 1.0 - std::sqrt(1.0 - rho2);
                x -= c * (x * psi) * psi.transpose();
                x += rho * (y * phi) * psi.transpose();
            }
            const double n = static_cast<double>(nobs);
            Eigen::MatrixXd sxx = x.transpose() * x / n;
            Eigen::MatrixXd syy = y.transpose() * y / n;
            Eigen::MatrixXd sxy = x.transpose() * y / n;
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ex(sxx);
            Eigen::LLT<Eigen::MatrixXd> lyy(syy);
            if (ex.eigenvalues().minCoeff() <= 0.0 || lyy.info() != Eigen::Success)
                throw DomainError("CCA: sample covariance not positive definite");
            // singular values of Sxx^{-1/2} Sxy Lyy^{-T} equal those of the
            // symmetric whitening Sxx^{-1/2} Sxy Syy^{-1/2}
            Eigen::MatrixXd k = ex.operatorInverseSqrt() * sxy;
            lyy.matrixU().solveInPlace<Eigen::OnTheRight>(k);
            Eigen::BDCSVD<Eigen::MatrixXd> svd(k);
            Eigen::VectorXd r2 = svd.singularValues().array().square();
            // squared canonical correlations live in [0,1]; store the
            // (n2/n1)-scaled values entering the likelihood ratio
            if (r2.maxCoeff() > 1.0 + 1e-10)
                throw DomainError("CCA: squared canonical correlation above 1");
            out.values = descending(r2 * (static_cast<double>(spec.n2) / spec.n1));
            break;
        }
    }
    return out;
}

}  // namespace spikedlr::ensembles
