#include "sfksd/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>

namespace sfksd {

namespace {

// Golub-Welsch: eigen-decomposition of the symmetric Jacobi matrix with
// zero diagonal and off-diagonal beta_k.
Eigen::SelfAdjointEigenSolver<Matrix> jacobi(int n, const std::function<double(int)> &beta) {
    Matrix J = Matrix::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        J(k, k - 1) = beta(k);
        J(k - 1, k) = beta(k);
    }
    return Eigen::SelfAdjointEigenSolver<Matrix>(J);
}

}  // namespace

QuadratureRule gauss_legendre(int nodes) {
    if (nodes < 1) throw std::invalid_argument("quadrature needs at least one node");
    const auto eig = jacobi(nodes, [](int k) {
        const double kk = static_cast<double>(k);
        return kk / std::sqrt(4.0 * kk * kk - 1.0);
    });
    QuadratureRule rule{eig.eigenvalues(), Vector(nodes)};
    for (int k = 0; k < nodes; ++k) rule.weights[k] = 2.0 * eig.eigenvectors()(0, k) * eig.eigenvectors()(0, k);
    return rule;
}

QuadratureRule gauss_hermite_scaled(int nodes) {
    if (nodes < 1) throw std::invalid_argument("quadrature needs at least one node");
    const auto eig = jacobi(nodes, [](int k) { return std::sqrt(static_cast<double>(k) / 2.0); });
    QuadratureRule rule{eig.eigenvalues(), Vector(nodes)};
    const double pi_quarter = std::pow(M_PI, -0.25);
    for (int k = 0; k < nodes; ++k) {
        const double t = rule.nodes[k];
        // Orthonormal Hermite functions phi_j(t) = p_j(t) exp(-t^2 / 2).
        double prev = 0.0;
        double cur = pi_quarter * std::exp(-0.5 * t * t);
        double sum = cur * cur;
        for (int j = 0; j + 1 < nodes; ++j) {
            const double next = std::sqrt(2.0 / (j + 1.0)) * t * cur - std::sqrt(j / (j + 1.0)) * prev;
            prev = cur;
            cur = next;
            sum += cur * cur;
        }
        rule.weights[k] = 1.0 / sum;
    }
    return rule;
}

double integrate_adaptive(const std::function<double(double)> &f, double a, double b, double rel_tol) {
    if (a == b) return 0.0;
    double error = 0.0;
    double l1 = 0.0;
    const double value =
        boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 30, rel_tol, &error, &l1);
    // Integrals that cancel to zero are judged against the L1 norm.
    if (!std::isfinite(value) || error > rel_tol * std::max(std::abs(value), l1) + 1e-300)
        throw NumericalError("adaptive quadrature did not converge");
    return value;
}

}  // namespace sfksd
