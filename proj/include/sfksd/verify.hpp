#pragma once

#include "sfksd/auxiliary.hpp"
#include "sfksd/model.hpp"
#include "sfksd/rng.hpp"
#include "sfksd/stein.hpp"

#include <functional>
#include <string>
#include <vector>

namespace sfksd::verify {

/// Scalar test function with analytic derivatives.
struct SmoothTestFunction {
    std::string name;
    std::function<double(double)> eval;
    std::function<double(double)> deriv;
    std::function<double(double)> second;  // may be empty
    bool vanishes_at_zero = false;
};

SmoothTestFunction identity_fn();                 // x
SmoothTestFunction cube_fn();                     // x^3
SmoothTestFunction sine_fn();                     // sin x
SmoothTestFunction damped_linear_fn();            // x exp(-x)
SmoothTestFunction exp_fn();                      // exp(x)
SmoothTestFunction one_plus_square_fn();          // 1 + x^2
/// exp(a + b x + c x^2)
SmoothTestFunction log_quadratic_fn(double a, double b, double c);

/// Survival-time model with density mu0, survival S0, hazard lambda0 and an
/// independent censoring time with survival S_C and density mu_C.
struct CensoredModel {
    std::string name;
    std::function<double(double)> mu0;
    std::function<double(double)> mu0_deriv;
    std::function<double(double)> S0;
    std::function<double(double)> lambda0;
    std::function<double(double)> lambda0_deriv;
    std::function<double(double)> censoring_SC;
    std::function<double(double)> censoring_density;
};

CensoredModel censored_exponential(double rate_x, double rate_c);
CensoredModel censored_weibull(double shape, double scale, double rate_c);

/// Two-sided Gaussian mixture over a discrete latent label z.
struct LatentMixture {
    std::vector<double> weights;
    std::vector<double> means;
    std::vector<double> sds;

    Vector posterior(double x) const;
    double component_score(std::size_t z, double x) const { return -(x - means[z]) / (sds[z] * sds[z]); }
};

struct McEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
};

enum class CensoredOperator { Plain, Martingale, Survival };

std::string to_string(CensoredOperator which);

/// E_q[g (f s + f') + f g'] for a 1D model by Gauss-Hermite (full line)
/// or Gauss-Legendre (interval), self-normalised on the node set.
double stein_identity_quadrature_1d(const DensityModel &model, const DiagonalAux &aux,
                                    const SmoothTestFunction &f, int nodes);

/// Auxiliary functions that turn the Sf operator into the censored-data
/// operators. zeta uses the sign that solves T_{mu0,zeta} omega = -omega
/// (martingale) or -lambda0 omega (survival).
double zeta_martingale(const CensoredModel &cm, const SmoothTestFunction &omega, double x);
double zeta_survival(const CensoredModel &cm, const SmoothTestFunction &omega, double x);

/// Max over grid x and delta in {0, 1} of |Sf-side - censored-operator side|.
double verify_censored_equivalence(const CensoredModel &cm, const SmoothTestFunction &omega,
                                   const std::vector<double> &grid, CensoredOperator which);

/// E_0[(T0^(m) omega)(t, delta)] by Monte Carlo on an exponential race.
McEstimate martingale_identity_mc(double rate_x, double rate_c, const SmoothTestFunction &omega,
                                  std::size_t n, RngStream &rng);

/// E_mu0[T_{mu0,S_C} omega] by adaptive quadrature.
double censored_identity_quadrature(const CensoredModel &cm, const SmoothTestFunction &omega);

/// Max over grid of |T_{q,(log f)'} f - (f'' + score f')|.
double verify_second_order(const DensityModel &model, const SmoothTestFunction &f,
                           const std::vector<double> &grid);

/// n draws from the marginal mixture q.
Vector sample_latent_mixture(const LatentMixture &lm, std::size_t n, RngStream &rng);

/// MC estimate of E[(1/m) sum_j (s_{z_j}(x) f(x) + f'(x))], z_j ~ q(z|x).
/// x-draws use rng.substream(0); latent draws use rng.substream(1).
McEstimate verify_latent_stein_identity(const LatentMixture &lm, const SmoothTestFunction &f,
                                        std::size_t n, std::size_t m, const RngStream &rng);

/// Same x-draws as above, plain Langevin operator of the marginal q.
McEstimate langevin_identity_mc(const LatentMixture &lm, const SmoothTestFunction &f, std::size_t n,
                                const RngStream &rng);

using Sampler = std::function<SampleMatrix(std::size_t, RngStream &)>;

/// Mean and standard error of h(x, fixed_y) over n draws x ~ q.
McEstimate stein_identity_mc(const SteinKernelSpec &spec, const Eigen::Ref<const Vector> &fixed_y,
                             std::size_t n, const Sampler &sampler, RngStream &rng);

struct CheckResult {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool pass = false;           // whether the identity held within tolerance
    bool expected_fail = false;  // negative controls are expected not to hold
    bool ok() const { return pass != expected_fail; }
};

struct SuiteOptions {
    std::vector<std::string> checks;  // empty = all
    bool negative_control = true;
    std::uint64_t seed = 20240101;
};

std::vector<std::string> available_checks();

/// Runs the certification suite. Throws std::invalid_argument on unknown
/// check names.
std::vector<CheckResult> run_suite(const SuiteOptions &options);

}  // namespace sfksd::verify
