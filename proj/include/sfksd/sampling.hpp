#pragma once

#include "sfksd/domain.hpp"
#include "sfksd/rng.hpp"
#include "sfksd/types.hpp"

#include <cstddef>
#include <functional>
#include <vector>

namespace sfksd {

/// Right-censored observation: t = min(X, C), delta = 1{X <= C}.
struct CensoredSample {
    double t;
    bool delta;
};

/// Writes one proposal draw into its second argument.
using Proposal = std::function<void(RngStream &, Eigen::Ref<Vector>)>;

struct RejectionResult {
    SampleMatrix samples;
    std::size_t attempts = 0;
    double acceptance_rate = 0.0;
};

class SamplerExhausted : public NumericalError {
public:
    SamplerExhausted(std::size_t accepted, std::size_t attempts);
    double acceptance_rate() const noexcept { return rate_; }

private:
    double rate_;
};

SampleMatrix sample_gaussian_mixture(const std::vector<double> &weights,
                                     const std::vector<Vector> &means,
                                     const std::vector<Matrix> &covariances, std::size_t n,
                                     RngStream &rng);

/// Draws from `proposal` until n points fall strictly inside `domain`.
RejectionResult rejection_sample(const DomainDescriptor &domain, const Proposal &proposal, std::size_t n,
                                 std::size_t max_attempts, RngStream &rng);

/// Proposal drawing from a Gaussian mixture (the parameters are factorised once).
Proposal gaussian_mixture_proposal(const std::vector<double> &weights,
                                   const std::vector<Vector> &means,
                                   const std::vector<Matrix> &covariances);

/// Dirichlet(alpha) draws in chart coordinates (first d-1 parts).
SampleMatrix sample_dirichlet(const Vector &alpha, std::size_t n, RngStream &rng);

std::vector<CensoredSample> sample_censored_exponential(double rate_x, double rate_c, std::size_t n,
                                                        RngStream &rng);

}  // namespace sfksd
