#include "sfksd/verify.hpp"

#include "sfksd/quadrature.hpp"
#include "sfksd/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sfksd::verify {

SmoothTestFunction identity_fn() {
    return {"x", [](double x) { return x; }, [](double) { return 1.0; }, [](double) { return 0.0; }, true};
}

SmoothTestFunction cube_fn() {
    return {"x^3", [](double x) { return x * x * x; }, [](double x) { return 3.0 * x * x; },
            [](double x) { return 6.0 * x; }, true};
}

SmoothTestFunction sine_fn() {
    return {"sin", [](double x) { return std::sin(x); }, [](double x) { return std::cos(x); },
            [](double x) { return -std::sin(x); }, true};
}

SmoothTestFunction damped_linear_fn() {
    return {"x*exp(-x)", [](double x) { return x * std::exp(-x); },
            [](double x) { return (1.0 - x) * std::exp(-x); },
            [](double x) { return (x - 2.0) * std::exp(-x); }, true};
}

SmoothTestFunction exp_fn() {
    auto e = [](double x) { return std::exp(x); };
    return {"exp", e, e, e, false};
}

SmoothTestFunction one_plus_square_fn() {
    return {"1+x^2", [](double x) { return 1.0 + x * x; }, [](double x) { return 2.0 * x; },
            [](double) { return 2.0; }, false};
}

SmoothTestFunction log_quadratic_fn(double a, double b, double c) {
    auto f = [=](double x) { return std::exp(a + b * x + c * x * x); };
    return {"exp(quadratic)", f, [=](double x) { return (b + 2.0 * c * x) * f(x); },
            [=](double x) {
                const double l = b + 2.0 * c * x;
                return (l * l + 2.0 * c) * f(x);
            },
            false};
}

CensoredModel censored_exponential(double rate_x, double rate_c) {
    if (!(rate_x > 0.0) || !(rate_c > 0.0)) throw ConstructionError("rates must be positive");
    CensoredModel cm;
    cm.name = "exponential";
    cm.mu0 = [=](double x) { return rate_x * std::exp(-rate_x * x); };
    cm.mu0_deriv = [=](double x) { return -rate_x * rate_x * std::exp(-rate_x * x); };
    cm.S0 = [=](double x) { return std::exp(-rate_x * x); };
    cm.lambda0 = [=](double) { return rate_x; };
    cm.lambda0_deriv = [](double) { return 0.0; };
    cm.censoring_SC = [=](double x) { return std::exp(-rate_c * x); };
    cm.censoring_density = [=](double x) { return rate_c * std::exp(-rate_c * x); };
    return cm;
}

CensoredModel censored_weibull(double shape, double scale, double rate_c) {
    if (!(shape > 0.0) || !(scale > 0.0) || !(rate_c > 0.0))
        throw ConstructionError("weibull parameters must be positive");
    CensoredModel cm;
    cm.name = "weibull";
    auto S0 = [=](double x) { return std::exp(-std::pow(x / scale, shape)); };
    auto haz = [=](double x) { return shape / scale * std::pow(x / scale, shape - 1.0); };
    auto haz_d = [=](double x) {
        return shape * (shape - 1.0) / (scale * scale) * std::pow(x / scale, shape - 2.0);
    };
    cm.S0 = S0;
    cm.lambda0 = haz;
    cm.lambda0_deriv = haz_d;
    cm.mu0 = [=](double x) { return haz(x) * S0(x); };
    cm.mu0_deriv = [=](double x) {
        const double l = haz(x);
        return (haz_d(x) - l * l) * S0(x);
    };
    cm.censoring_SC = [=](double x) { return std::exp(-rate_c * x); };
    cm.censoring_density = [=](double x) { return rate_c * std::exp(-rate_c * x); };
    return cm;
}

Vector LatentMixture::posterior(double x) const {
    const auto k = weights.size();
    Vector logp(static_cast<Eigen::Index>(k));
    for (std::size_t z = 0; z < k; ++z) {
        const double r = (x - means[z]) / sds[z];
        logp[z] = std::log(weights[z]) - std::log(sds[z]) - 0.5 * r * r;
    }
    const double m = logp.maxCoeff();
    Vector p = (logp.array() - m).exp();
    return p / p.sum();
}

std::string to_string(CensoredOperator which) {
    switch (which) {
    case CensoredOperator::Plain: return "plain";
    case CensoredOperator::Martingale: return "martingale";
    case CensoredOperator::Survival: return "survival";
    }
    return "?";
}

namespace {

constexpr double kIntegralTol = 1e-10;

// Central difference with one Richardson step: error O(h^4).
double richardson_derivative(const std::function<double(double)> &F, double x) {
    const double h = 1e-3 * std::max(1.0, std::abs(x));
    auto central = [&](double step) { return (F(x + step) - F(x - step)) / (2.0 * step); };
    return (4.0 * central(0.5 * h) - central(h)) / 3.0;
}

// The 1D Sf operator T_{q,g} f = g (f s + f') + f g'.
double sf_operator(double g, double g_deriv, double f, double f_deriv, double score) {
    return g * (f * score + f_deriv) + f * g_deriv;
}

struct Zeta {
    double value;
    double deriv;
};

// zeta = -I(x) / (mu0 omega) with I(x) = int_0^x mu0 omega weight. The
// derivative uses I' = mu0 omega weight directly.
Zeta zeta_with_deriv(const CensoredModel &cm, const SmoothTestFunction &omega, double x,
                     const std::function<double(double)> &weight) {
    const double mw = cm.mu0(x) * omega.eval(x);
    if (mw == 0.0) throw NumericalError("omega * mu0 vanishes at x = " + std::to_string(x));
    const double I = integrate_adaptive(
        [&](double s) { return cm.mu0(s) * omega.eval(s) * weight(s); }, 0.0, x, kIntegralTol);
    const double mw_deriv = cm.mu0_deriv(x) * omega.eval(x) + cm.mu0(x) * omega.deriv(x);
    return {-I / mw, -weight(x) + I * mw_deriv / (mw * mw)};
}

double check_positive(const std::vector<double> &grid) {
    for (double x : grid)
        if (!(x > 0.0)) throw std::invalid_argument("censored grid must be strictly positive");
    return 0.0;
}

}  // namespace

double stein_identity_quadrature_1d(const DensityModel &model, const DiagonalAux &aux,
                                    const SmoothTestFunction &f, int nodes) {
    if (model.dim() != 1 || aux.dim() != 1) throw std::invalid_argument("quadrature identity is 1D only");
    if (nodes < 50) throw std::invalid_argument("quadrature identity needs at least 50 nodes");
    const auto &dom = model.domain();
    Vector xs(nodes), ws(nodes);
    if (dom.kind() == DomainKind::FullSpace) {
        const auto rule = gauss_hermite_scaled(nodes);
        xs = std::sqrt(2.0) * rule.nodes;
        ws = rule.weights;
    } else if (dom.kind() == DomainKind::Box || dom.kind() == DomainKind::UnitBall) {
        const double a = dom.kind() == DomainKind::Box ? dom.lower()[0] : -dom.radius();
        const double b = dom.kind() == DomainKind::Box ? dom.upper()[0] : dom.radius();
        const auto rule = gauss_legendre(nodes);
        xs = 0.5 * (a + b) + 0.5 * (b - a) * rule.nodes.array();
        ws = rule.weights;
    } else {
        throw std::invalid_argument("quadrature identity needs a line or interval domain");
    }
    Vector logq(nodes);
    Vector pt(1);
    for (int k = 0; k < nodes; ++k) {
        pt[0] = xs[k];
        logq[k] = model.log_density_unnorm(pt);
    }
    const double top = logq.maxCoeff();
    if (!std::isfinite(top)) throw NumericalError("density underflows on every quadrature node");
    double num = 0.0;
    double den = 0.0;
    Vector g(1), dg(1);
    for (int k = 0; k < nodes; ++k) {
        const double w = ws[k] * std::exp(logq[k] - top);
        if (w == 0.0) continue;
        pt[0] = xs[k];
        aux.eval(pt, g, dg);
        const double s = model.score(pt)[0];
        num += w * sf_operator(g[0], dg[0], f.eval(xs[k]), f.deriv(xs[k]), s);
        den += w;
    }
    if (!(den > 0.0)) throw NumericalError("density underflows on every quadrature node");
    return num / den;
}

double zeta_martingale(const CensoredModel &cm, const SmoothTestFunction &omega, double x) {
    return zeta_with_deriv(cm, omega, x, [](double) { return 1.0; }).value;
}

double zeta_survival(const CensoredModel &cm, const SmoothTestFunction &omega, double x) {
    return zeta_with_deriv(cm, omega, x, cm.lambda0).value;
}

double verify_censored_equivalence(const CensoredModel &cm, const SmoothTestFunction &omega,
                                   const std::vector<double> &grid, CensoredOperator which) {
    if (!omega.vanishes_at_zero) throw std::invalid_argument("omega must vanish at zero");
    check_positive(grid);
    double worst = 0.0;
    for (double x : grid) {
        const double mu = cm.mu0(x);
        if (!(mu > 0.0)) throw std::invalid_argument("mu0 must be positive on the grid");
        const double score = cm.mu0_deriv(x) / mu;
        const double w = omega.eval(x);
        const double wd = omega.deriv(x);
        const double lam = cm.lambda0(x);
        const double lam_d = cm.lambda0_deriv(x);
        for (int delta = 0; delta <= 1; ++delta) {
            double lhs = 0.0;
            double rhs = 0.0;
            switch (which) {
            case CensoredOperator::Plain: {
                // Pointwise form of the identity: the Sf integrand against mu0
                // equals the censored operator against the observed density
                // mu0 S_C on the delta = 1 branch.
                const double sc = cm.censoring_SC(x);
                const double sf = sf_operator(sc, -cm.censoring_density(x), w, wd, score);
                const double num = richardson_derivative(
                    [&](double s) { return omega.eval(s) * cm.censoring_SC(s) * cm.mu0(s); }, x);
                lhs = delta * sf;
                rhs = delta * sc * num / (sc * mu);
                break;
            }
            case CensoredOperator::Martingale: {
                double g = 0.0;
                double gd = 0.0;
                if (delta == 1) {
                    g = 1.0 / lam;
                    gd = -lam_d / (lam * lam);
                } else {
                    const auto z = zeta_with_deriv(cm, omega, x, [](double) { return 1.0; });
                    g = z.value;
                    gd = z.deriv;
                }
                lhs = sf_operator(g, gd, w, wd, score);
                rhs = delta * wd / lam - w;
                break;
            }
            case CensoredOperator::Survival: {
                double g = 1.0;
                double gd = 0.0;
                if (delta == 0) {
                    const auto z = zeta_with_deriv(cm, omega, x, cm.lambda0);
                    g = z.value;
                    gd = z.deriv;
                }
                lhs = sf_operator(g, gd, w, wd, score);
                rhs = delta * (wd + lam_d / lam * w) - lam * w;
                break;
            }
            }
            worst = std::max(worst, std::abs(lhs - rhs));
        }
    }
    return worst;
}

McEstimate martingale_identity_mc(double rate_x, double rate_c, const SmoothTestFunction &omega,
                                  std::size_t n, RngStream &rng) {
    const auto obs = sample_censored_exponential(rate_x, rate_c, n, rng);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (const auto &o : obs) {
        const double v = (o.delta ? omega.deriv(o.t) / rate_x : 0.0) - omega.eval(o.t);
        sum += v;
        sum_sq += v * v;
    }
    const double dn = static_cast<double>(n);
    const double mean = sum / dn;
    const double var = std::max(0.0, (sum_sq - dn * mean * mean) / (dn - 1.0));
    return {mean, std::sqrt(var / dn)};
}

double censored_identity_quadrature(const CensoredModel &cm, const SmoothTestFunction &omega) {
    auto integrand = [&](double x) {
        const double mu = cm.mu0(x);
        if (mu == 0.0) return 0.0;
        return mu * sf_operator(cm.censoring_SC(x), -cm.censoring_density(x), omega.eval(x),
                                omega.deriv(x), cm.mu0_deriv(x) / mu);
    };
    // x = u^2 removes fractional powers at the origin (e.g. Weibull hazards).
    return integrate_adaptive([&](double u) { return 2.0 * u * integrand(u * u); }, 0.0,
                              std::numeric_limits<double>::infinity(), kIntegralTol);
}

double verify_second_order(const DensityModel &model, const SmoothTestFunction &f,
                           const std::vector<double> &grid) {
    if (model.dim() != 1) throw std::invalid_argument("second-order check is 1D only");
    if (!f.second) throw std::invalid_argument("second-order check needs f''");
    double worst = 0.0;
    Vector pt(1);
    for (double x : grid) {
        const double fv = f.eval(x);
        if (!(fv > 0.0)) throw std::invalid_argument("f must be positive on the grid");
        const double f1 = f.deriv(x);
        const double f2 = f.second(x);
        pt[0] = x;
        const double s = model.score(pt)[0];
        const double g = f1 / fv;
        const double gd = (f2 * fv - f1 * f1) / (fv * fv);
        const double lhs = sf_operator(g, gd, fv, f1, s);
        const double rhs = f2 + s * f1;
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

Vector sample_latent_mixture(const LatentMixture &lm, std::size_t n, RngStream &rng) {
    Vector x(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        double u = rng.uniform();
        std::size_t z = 0;
        while (z + 1 < lm.weights.size() && u > lm.weights[z]) {
            u -= lm.weights[z];
            ++z;
        }
        x[static_cast<Eigen::Index>(i)] = lm.means[z] + lm.sds[z] * rng.normal();
    }
    return x;
}

namespace {

McEstimate mean_and_stderr(const Vector &v) {
    const double n = static_cast<double>(v.size());
    const double mean = v.mean();
    const double var = (v.array() - mean).square().sum() / (n - 1.0);
    return {mean, std::sqrt(var / n)};
}

std::size_t draw_label(const Vector &p, RngStream &rng) {
    double u = rng.uniform();
    for (Eigen::Index z = 0; z + 1 < p.size(); ++z) {
        if (u <= p[z]) return static_cast<std::size_t>(z);
        u -= p[z];
    }
    return static_cast<std::size_t>(p.size() - 1);
}

}  // namespace

McEstimate verify_latent_stein_identity(const LatentMixture &lm, const SmoothTestFunction &f,
                                        std::size_t n, std::size_t m, const RngStream &rng) {
    if (n < 1000 || m < 1) throw std::invalid_argument("latent identity needs n >= 1000 and m >= 1");
    RngStream xs_rng = rng.substream(0);
    RngStream z_rng = rng.substream(1);
    const Vector xs = sample_latent_mixture(lm, n, xs_rng);
    Vector vals(xs.size());
    for (Eigen::Index i = 0; i < xs.size(); ++i) {
        const double x = xs[i];
        const Vector post = lm.posterior(x);
        double score = 0.0;
        for (std::size_t j = 0; j < m; ++j) score += lm.component_score(draw_label(post, z_rng), x);
        score /= static_cast<double>(m);
        vals[i] = score * f.eval(x) + f.deriv(x);
    }
    return mean_and_stderr(vals);
}

McEstimate langevin_identity_mc(const LatentMixture &lm, const SmoothTestFunction &f, std::size_t n,
                                const RngStream &rng) {
    RngStream xs_rng = rng.substream(0);
    const Vector xs = sample_latent_mixture(lm, n, xs_rng);
    Vector vals(xs.size());
    for (Eigen::Index i = 0; i < xs.size(); ++i) {
        const double x = xs[i];
        const Vector post = lm.posterior(x);
        double score = 0.0;
        for (Eigen::Index z = 0; z < post.size(); ++z)
            score += post[z] * lm.component_score(static_cast<std::size_t>(z), x);
        vals[i] = score * f.eval(x) + f.deriv(x);
    }
    return mean_and_stderr(vals);
}

McEstimate stein_identity_mc(const SteinKernelSpec &spec, const Eigen::Ref<const Vector> &fixed_y,
                             std::size_t n, const Sampler &sampler, RngStream &rng) {
    if (n < 1000) throw std::invalid_argument("MC identity needs n >= 1000");
    require_interior(spec.model.domain(), fixed_y);
    const SampleMatrix xs = sampler(n, rng);
    Vector vals(xs.rows());
    for (Eigen::Index i = 0; i < xs.rows(); ++i)
        vals[i] = stein_kernel_eval(spec, xs.row(i).transpose(), fixed_y);
    return mean_and_stderr(vals);
}

}  // namespace sfksd::verify
