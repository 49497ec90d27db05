#pragma once

#include "sfksd/types.hpp"

#include <functional>

namespace sfksd {

struct QuadratureRule {
    Vector nodes;
    Vector weights;
};

/// Gauss-Legendre rule on [-1, 1].
QuadratureRule gauss_legendre(int nodes);

/// Gauss-Hermite rule for the weight exp(-t^2). `weights` holds the
/// scaled weights w_k exp(t_k^2), computed stably through the Christoffel
/// function, so that sum_k weights_k exp(-t_k^2) F(t_k) approximates the
/// integral of exp(-t^2) F(t) and sum_k weights_k G(t_k) that of G.
QuadratureRule gauss_hermite_scaled(int nodes);

/// Adaptive Gauss-Kronrod integral of f over [a, b]. Throws
/// NumericalError if the error estimate exceeds rel_tol * max(|I|, L1)
/// where L1 is the integral of |f|. Infinite limits are allowed.
double integrate_adaptive(const std::function<double(double)> &f, double a, double b,
                          double rel_tol = 1e-10);

}  // namespace sfksd
