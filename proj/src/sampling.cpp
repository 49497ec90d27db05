#include "sfksd/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

namespace sfksd {

namespace {

// Cholesky factor, or a symmetric square root for singular PSD covariances
// (e.g. unit correlation, where the draws live on a hyperplane).
Matrix square_root(const Matrix &cov) {
    Eigen::LLT<Matrix> llt(cov);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
    const Vector lambda = eig.eigenvalues();
    const double scale = std::max(1.0, lambda.cwiseAbs().maxCoeff());
    if (!cov.isApprox(cov.transpose()) || lambda.minCoeff() < -1e-12 * scale)
        throw ConstructionError("mixture covariance is not positive semidefinite");
    return eig.eigenvectors() * lambda.cwiseMax(0.0).cwiseSqrt().asDiagonal() * eig.eigenvectors().transpose();
}

struct MixtureSampler {
    std::vector<double> cumulative;
    std::vector<Vector> means;
    std::vector<Matrix> factors;

    MixtureSampler(const std::vector<double> &weights, const std::vector<Vector> &mu,
                   const std::vector<Matrix> &covs) {
        if (weights.empty() || weights.size() != mu.size() || weights.size() != covs.size())
            throw ConstructionError("mixture weights, means and covariances differ in length");
        double total = 0.0;
        for (std::size_t c = 0; c < weights.size(); ++c) {
            if (!(weights[c] >= 0.0)) throw ConstructionError("mixture weight must be non-negative");
            total += weights[c];
            cumulative.push_back(total);
            if (mu[c].size() != mu[0].size() || covs[c].rows() != mu[c].size() ||
                covs[c].cols() != mu[c].size())
                throw ConstructionError("mixture component dimension mismatch");
            factors.push_back(square_root(covs[c]));
            means.push_back(mu[c]);
        }
        if (std::abs(total - 1.0) > 1e-12) throw ConstructionError("mixture weights must sum to 1");
    }

    void draw(RngStream &rng, Eigen::Ref<Vector> out) const {
        const double u = rng.uniform();
        std::size_t c = 0;
        while (c + 1 < cumulative.size() && !(u < cumulative[c])) ++c;
        Vector z(means[c].size());
        for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
        out = means[c] + factors[c] * z;
    }
};

}  // namespace

SamplerExhausted::SamplerExhausted(std::size_t accepted, std::size_t attempts)
    : NumericalError("rejection sampler exhausted after " + std::to_string(attempts) +
                     " attempts with " + std::to_string(accepted) + " accepted (acceptance rate " +
                     std::to_string(attempts ? double(accepted) / double(attempts) : 0.0) + ")"),
      rate_(attempts ? double(accepted) / double(attempts) : 0.0) {}

SampleMatrix sample_gaussian_mixture(const std::vector<double> &weights,
                                     const std::vector<Vector> &means,
                                     const std::vector<Matrix> &covariances, std::size_t n,
                                     RngStream &rng) {
    const MixtureSampler sampler(weights, means, covariances);
    const auto d = means.front().size();
    SampleMatrix out(static_cast<Eigen::Index>(n), d);
    Vector x(d);
    for (std::size_t r = 0; r < n; ++r) {
        sampler.draw(rng, x);
        out.row(static_cast<Eigen::Index>(r)) = x.transpose();
    }
    return out;
}

Proposal gaussian_mixture_proposal(const std::vector<double> &weights,
                                   const std::vector<Vector> &means,
                                   const std::vector<Matrix> &covariances) {
    auto sampler = std::make_shared<const MixtureSampler>(weights, means, covariances);
    return [sampler](RngStream &rng, Eigen::Ref<Vector> out) { sampler->draw(rng, out); };
}

RejectionResult rejection_sample(const DomainDescriptor &domain, const Proposal &proposal, std::size_t n,
                                 std::size_t max_attempts, RngStream &rng) {
    const int dim = domain.dim();
    if (max_attempts < n) throw std::invalid_argument("max_attempts must be at least n");
    RejectionResult result;
    result.samples.resize(static_cast<Eigen::Index>(n), dim);
    if (n == 0) return result;
    Vector x(dim);
    std::size_t accepted = 0;
    while (accepted < n) {
        if (result.attempts == max_attempts) throw SamplerExhausted(accepted, result.attempts);
        proposal(rng, x);
        ++result.attempts;
        if (domain.contains(x)) result.samples.row(static_cast<Eigen::Index>(accepted++)) = x.transpose();
    }
    result.acceptance_rate = double(accepted) / double(result.attempts);
    return result;
}

SampleMatrix sample_dirichlet(const Vector &alpha, std::size_t n, RngStream &rng) {
    if (alpha.size() < 2 || !(alpha.array() > 0.0).all())
        throw ConstructionError("dirichlet alpha must have >= 2 positive entries");
    const auto parts = alpha.size();
    const auto chart = DomainDescriptor::simplex_chart(static_cast<int>(parts));
    SampleMatrix out(static_cast<Eigen::Index>(n), parts - 1);
    Vector y(parts);
    for (std::size_t r = 0; r < n;) {
        for (Eigen::Index i = 0; i < parts; ++i) y[i] = rng.gamma(alpha[i]);
        const Vector x = (y / y.sum()).head(parts - 1);
        // Underflow can land a draw on a face; such draws are redrawn.
        if (!chart.contains(x)) continue;
        out.row(static_cast<Eigen::Index>(r++)) = x.transpose();
    }
    return out;
}

std::vector<CensoredSample> sample_censored_exponential(double rate_x, double rate_c, std::size_t n,
                                                        RngStream &rng) {
    if (!(rate_x > 0.0) || !(rate_c > 0.0)) throw ConstructionError("rates must be positive");
    std::vector<CensoredSample> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = rng.exponential(rate_x);
        const double c = rng.exponential(rate_c);
        out.push_back({std::min(x, c), x <= c});
    }
    return out;
}

}  // namespace sfksd
