#pragma once

#include "sfksd/domain.hpp"
#include "sfksd/types.hpp"

#include <memory>
#include <string>
#include <vector>

namespace sfksd {

namespace detail {
struct ModelImpl {
    virtual ~ModelImpl() = default;
    virtual double log_density(const Eigen::Ref<const Vector> &x) const = 0;
    virtual Vector score(const Eigen::Ref<const Vector> &x) const = 0;
    virtual std::string family() const = 0;
};
}  // namespace detail

/// Unnormalised target density q~ together with its analytic score
/// grad log q~ in chart coordinates. Immutable; copies share state.
class DensityModel {
public:
    DensityModel(DomainDescriptor domain, std::shared_ptr<const detail::ModelImpl> impl);

    int dim() const noexcept { return domain_.dim(); }
    const DomainDescriptor &domain() const noexcept { return domain_; }
    std::string family() const { return impl_->family(); }

    /// log q~(x), up to an additive constant.
    double log_density_unnorm(const Eigen::Ref<const Vector> &x) const {
        return impl_->log_density(x);
    }
    Vector score(const Eigen::Ref<const Vector> &x) const { return impl_->score(x); }

    /// Same density on a different support (truncation leaves q~ unchanged).
    DensityModel with_domain(DomainDescriptor domain) const;

private:
    DomainDescriptor domain_;
    std::shared_ptr<const detail::ModelImpl> impl_;
};

DensityModel make_gaussian(const Vector &mean, const Matrix &covariance,
                           const DomainDescriptor &domain);

DensityModel make_gaussian_mixture(const std::vector<double> &weights,
                                   const std::vector<Vector> &means,
                                   const std::vector<Matrix> &covariances,
                                   const DomainDescriptor &domain);

/// Dirichlet(alpha) on the (d-1)-dimensional simplex chart.
DensityModel make_dirichlet_chart(const Vector &alpha);

/// The 3x3 covariance with unit diagonal and correlation nu between the
/// first two coordinates, embedded in dim >= 2 as identity elsewhere.
Matrix correlated_covariance(double nu, int dim = 3);

/// max_i |central difference of log q~ along e_i - score_i(x)|.
double check_score_consistency(const DensityModel &model, const Eigen::Ref<const Vector> &x,
                               double step);

}  // namespace sfksd
