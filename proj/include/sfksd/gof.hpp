#pragma once

#include "sfksd/kernel.hpp"
#include "sfksd/stein.hpp"

#include <json.hpp>

#include <cstdint>

namespace sfksd {

struct TestResult {
    double statistic = 0.0;
    double threshold = 0.0;
    double p_value = 1.0;
    bool reject = false;
    std::size_t n = 0;
    std::size_t bootstrap_draws = 0;
    std::uint64_t seed = 0;
};

nlohmann::ordered_json to_json(const TestResult &result);

/// (eps^T H eps - tr H) / (n (n - 1)) for one multiplier vector.
double wild_bootstrap_draw(const Matrix &H, const Eigen::Ref<const Vector> &multipliers);

/// B wild-bootstrap replicates of the U-statistic with i.i.d. Rademacher
/// multipliers; draw b consumes stream (seed, b).
Vector wild_bootstrap_draws(const Matrix &H, std::size_t B, std::uint64_t seed, unsigned threads = 1);

/// Order statistic ceil((1 - level) B) of the ascending draws.
double bootstrap_threshold(const Vector &draws, double level);

/// (1 + #{b : draw_b >= statistic}) / (1 + B).
double bootstrap_p_value(const Vector &draws, double statistic);

/// Kernel Stein goodness-of-fit test calibrated by the wild bootstrap.
TestResult ksd_test(const SteinKernelSpec &spec, const SampleMatrix &samples, double level,
                    std::size_t B, std::uint64_t seed, unsigned threads = 1);

/// Unbiased MMD^2 between the rows of X and Y.
double mmd_u_statistic(const SampleMatrix &X, const SampleMatrix &Y, const SmoothKernel &kernel);

/// Two-sample permutation test on the unbiased MMD^2; permutation p uses
/// stream (seed, p).
TestResult mmd_test(const SampleMatrix &X, const SampleMatrix &Y, const SmoothKernel &kernel,
                    double level, std::size_t P, std::uint64_t seed);

}  // namespace sfksd
