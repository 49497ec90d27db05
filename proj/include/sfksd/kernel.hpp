#pragma once

#include "sfksd/types.hpp"

#include <memory>
#include <optional>

namespace sfksd {

namespace detail {
struct KernelImpl {
    virtual ~KernelImpl() = default;
    virtual double eval(const Eigen::Ref<const Vector> &x, const Eigen::Ref<const Vector> &y) const = 0;
    virtual Vector grad_x(const Eigen::Ref<const Vector> &x, const Eigen::Ref<const Vector> &y) const = 0;
    virtual Vector grad_y(const Eigen::Ref<const Vector> &x, const Eigen::Ref<const Vector> &y) const = 0;
    virtual Matrix mixed_second(const Eigen::Ref<const Vector> &x,
                                const Eigen::Ref<const Vector> &y) const = 0;
    virtual std::optional<double> rbf_bandwidth_sq() const { return std::nullopt; }
};
}  // namespace detail

/// Reproducing kernel with the derivative blocks the Stein kernel needs.
/// mixed_second(x, y)(i, j) is d^2 k / dx_i dy_j.
class SmoothKernel {
public:
    explicit SmoothKernel(std::shared_ptr<const detail::KernelImpl> impl) : impl_(std::move(impl)) {}

    double eval(const Eigen::Ref<const Vector> &x, const Eigen::Ref<const Vector> &y) const {
        return impl_->eval(x, y);
    }
    Vector grad_x(const Eigen::Ref<const Vector> &x, const Eigen::Ref<const Vector> &y) const {
        return impl_->grad_x(x, y);
    }
    Vector grad_y(const Eigen::Ref<const Vector> &x, const Eigen::Ref<const Vector> &y) const {
        return impl_->grad_y(x, y);
    }
    Matrix mixed_second(const Eigen::Ref<const Vector> &x, const Eigen::Ref<const Vector> &y) const {
        return impl_->mixed_second(x, y);
    }

    /// sigma^2 when this is an RBF kernel; enables the vectorised Gram paths.
    std::optional<double> rbf_bandwidth_sq() const { return impl_->rbf_bandwidth_sq(); }

private:
    std::shared_ptr<const detail::KernelImpl> impl_;
};

/// k(x, y) = exp(-|x - y|^2 / bandwidth_sq).
SmoothKernel rbf(double bandwidth_sq);

/// Lower median of the n(n-1)/2 squared pairwise distances between rows.
double median_heuristic(const SampleMatrix &samples);

/// Plain kernel matrix K(i, j) = k(x_i, y_j) for an RBF kernel.
Matrix rbf_gram(const SampleMatrix &x, const SampleMatrix &y, double bandwidth_sq);

}  // namespace sfksd
