#pragma once
// Independent reference computations used by the unit, property and
// acceptance tests. Nothing here calls into the Stein-kernel code paths
// under test.

#include "sfksd/auxiliary.hpp"
#include "sfksd/kernel.hpp"
#include "sfksd/model.hpp"
#include "sfksd/rng.hpp"

#include <cmath>
#include <functional>

namespace oracle {

using sfksd::Matrix;
using sfksd::Vector;

// h for a constant diagonal g, written term by term:
//   sum_i g_i(x) g_i(y) [ s_i(x) s_i(y) k + s_i(x) dk/dy_i + s_i(y) dk/dx_i + d2k/dx_i dy_i ]
inline double constant_g_stein_kernel(const sfksd::DensityModel &model, const sfksd::SmoothKernel &kernel,
                                      const sfksd::DiagonalAux &aux, const Vector &x, const Vector &y) {
    const Vector sx = model.score(x), sy = model.score(y);
    const Vector gx = aux.g(x), gy = aux.g(y);
    const double k = kernel.eval(x, y);
    const Vector kx = kernel.grad_x(x, y), ky = kernel.grad_y(x, y);
    const Matrix kxy = kernel.mixed_second(x, y);
    double h = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i)
        h += gx[i] * gy[i] * (sx[i] * sy[i] * k + sx[i] * ky[i] + sy[i] * kx[i] + kxy(i, i));
    return h;
}

// Classic KSD kernel with the RBF kernel expanded by hand (no kernel object):
//   k = exp(-r2/s2), dk/dx = -2 D k / s2, dk/dy = 2 D k / s2,
//   sum_i d2k/dx_i dy_i = k (2d/s2 - 4 r2/s2^2).
inline double classic_rbf_ksd(const sfksd::DensityModel &model, double s2, const Vector &x, const Vector &y) {
    const Vector D = x - y;
    const double r2 = D.squaredNorm();
    const double k = std::exp(-r2 / s2);
    const Vector sx = model.score(x), sy = model.score(y);
    const double d = static_cast<double>(x.size());
    return k * (sx.dot(sy) + (2.0 / s2) * (sx.dot(D) - sy.dot(D)) + 2.0 * d / s2 - 4.0 * r2 / (s2 * s2));
}

inline double central_difference(const std::function<double(double)> &f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// P(chi2_3 <= c) = erf(sqrt(c/2)) - sqrt(2c/pi) exp(-c/2)
inline double chi2_3_cdf(double c) {
    return std::erf(std::sqrt(c / 2.0)) - std::sqrt(2.0 * c / M_PI) * std::exp(-c / 2.0);
}

// Uniform point in the open d-ball of the given radius.
inline Vector uniform_in_ball(int d, double radius, sfksd::RngStream &rng) {
    Vector z(d);
    for (int i = 0; i < d; ++i) z[i] = rng.normal();
    const double r = radius * std::pow(rng.uniform(), 1.0 / d);
    return z / z.norm() * r;
}

// Uniform point strictly inside the simplex chart of `parts` parts, kept at
// least `margin` away from every face.
inline Vector interior_simplex_point(int parts, double margin, sfksd::RngStream &rng) {
    Vector e(parts);
    for (int i = 0; i < parts; ++i) e[i] = rng.exponential(1.0);
    e /= e.sum();
    e = e * (1.0 - parts * margin) + Vector::Constant(parts, margin);
    return e.head(parts - 1);
}

struct MeanSe {
    double mean;
    double se;
};

inline MeanSe mean_se(const Vector &v) {
    const double n = static_cast<double>(v.size());
    const double m = v.mean();
    const double var = (v.array() - m).square().sum() / (n - 1.0);
    return {m, std::sqrt(var / n)};
}

}  // namespace oracle
