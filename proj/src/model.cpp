#include "sfksd/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sfksd {

namespace {

constexpr double kPivotFloor = 1e-12;

struct GaussianFactor {
    Vector mean;
    Matrix precision;
    double half_log_det = 0.0;
};

GaussianFactor factorize(const Vector &mean, const Matrix &cov) {
    const auto d = mean.size();
    if (d == 0) throw ConstructionError("gaussian mean must be non-empty");
    if (cov.rows() != d || cov.cols() != d)
        throw ConstructionError("covariance shape does not match mean dimension");
    if (!cov.isApprox(cov.transpose(), 1e-12))
        throw ConstructionError("covariance must be symmetric");
    Eigen::LDLT<Matrix> ldlt(cov);
    if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().array() > kPivotFloor).all())
        throw ConstructionError("covariance is not positive definite");
    GaussianFactor f;
    f.mean = mean;
    f.precision = ldlt.solve(Matrix::Identity(d, d));
    f.precision = 0.5 * (f.precision + f.precision.transpose()).eval();
    f.half_log_det = 0.5 * ldlt.vectorD().array().log().sum();
    return f;
}

class Gaussian final : public detail::ModelImpl {
public:
    explicit Gaussian(GaussianFactor f) : f_(std::move(f)) {}

    double log_density(const Eigen::Ref<const Vector> &x) const override {
        const Vector r = x - f_.mean;
        return -0.5 * r.dot(f_.precision * r);
    }
    Vector score(const Eigen::Ref<const Vector> &x) const override {
        return -(f_.precision * (x - f_.mean));
    }
    std::string family() const override { return "gaussian"; }

private:
    GaussianFactor f_;
};

class GaussianMixture final : public detail::ModelImpl {
public:
    GaussianMixture(std::vector<double> log_weights, std::vector<GaussianFactor> comps)
        : log_weights_(std::move(log_weights)), comps_(std::move(comps)) {}

    double log_density(const Eigen::Ref<const Vector> &x) const override {
        const Vector a = log_terms(x);
        const double m = a.maxCoeff();
        return m + std::log((a.array() - m).exp().sum());
    }

    Vector score(const Eigen::Ref<const Vector> &x) const override {
        const Vector a = log_terms(x);
        const double m = a.maxCoeff();
        const Vector r = (a.array() - m).exp().matrix();
        const double total = r.sum();
        Vector s = Vector::Zero(x.size());
        for (std::size_t c = 0; c < comps_.size(); ++c) {
            if (r[c] == 0.0) continue;
            s.noalias() -= (r[c] / total) * (comps_[c].precision * (x - comps_[c].mean));
        }
        return s;
    }
    std::string family() const override { return "gaussian_mixture"; }

private:
    Vector log_terms(const Eigen::Ref<const Vector> &x) const {
        Vector a(comps_.size());
        for (std::size_t c = 0; c < comps_.size(); ++c) {
            const Vector r = x - comps_[c].mean;
            a[c] = log_weights_[c] - comps_[c].half_log_det - 0.5 * r.dot(comps_[c].precision * r);
        }
        return a;
    }

    std::vector<double> log_weights_;
    std::vector<GaussianFactor> comps_;
};

class DirichletChart final : public detail::ModelImpl {
public:
    explicit DirichletChart(Vector alpha) : alpha_(std::move(alpha)) {}

    double log_density(const Eigen::Ref<const Vector> &x) const override {
        const auto m = x.size();
        double acc = (alpha_[m] - 1.0) * std::log(1.0 - x.sum());
        for (Eigen::Index i = 0; i < m; ++i) acc += (alpha_[i] - 1.0) * std::log(x[i]);
        return acc;
    }
    Vector score(const Eigen::Ref<const Vector> &x) const override {
        const auto m = x.size();
        const double last = (alpha_[m] - 1.0) / (1.0 - x.sum());
        Vector s(m);
        for (Eigen::Index i = 0; i < m; ++i) s[i] = (alpha_[i] - 1.0) / x[i] - last;
        return s;
    }
    std::string family() const override { return "dirichlet"; }

private:
    Vector alpha_;
};

}  // namespace

DensityModel::DensityModel(DomainDescriptor domain, std::shared_ptr<const detail::ModelImpl> impl)
    : domain_(std::move(domain)), impl_(std::move(impl)) {}

DensityModel DensityModel::with_domain(DomainDescriptor domain) const {
    if (domain.dim() != dim()) throw ConstructionError("domain dimension mismatch");
    return DensityModel(std::move(domain), impl_);
}

DensityModel make_gaussian(const Vector &mean, const Matrix &covariance,
                           const DomainDescriptor &domain) {
    if (domain.dim() != mean.size())
        throw ConstructionError("domain dimension does not match gaussian dimension");
    if (domain.kind() == DomainKind::SimplexChart)
        throw ConstructionError("gaussian on a simplex chart is not supported");
    return DensityModel(domain, std::make_shared<Gaussian>(factorize(mean, covariance)));
}

DensityModel make_gaussian_mixture(const std::vector<double> &weights,
                                   const std::vector<Vector> &means,
                                   const std::vector<Matrix> &covariances,
                                   const DomainDescriptor &domain) {
    if (weights.empty()) throw ConstructionError("mixture needs at least one component");
    if (weights.size() != means.size() || weights.size() != covariances.size())
        throw ConstructionError("mixture weights, means and covariances differ in length");
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0 && w <= 1.0)) throw ConstructionError("mixture weight outside [0,1]");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) throw ConstructionError("mixture weights must sum to 1");
    if (domain.kind() == DomainKind::SimplexChart)
        throw ConstructionError("gaussian mixture on a simplex chart is not supported");

    std::vector<double> log_w;
    std::vector<GaussianFactor> comps;
    for (std::size_t c = 0; c < weights.size(); ++c) {
        if (means[c].size() != domain.dim())
            throw ConstructionError("mixture component dimension mismatch");
        log_w.push_back(weights[c] > 0.0 ? std::log(weights[c])
                                         : -std::numeric_limits<double>::infinity());
        comps.push_back(factorize(means[c], covariances[c]));
    }
    return DensityModel(domain,
                        std::make_shared<GaussianMixture>(std::move(log_w), std::move(comps)));
}

DensityModel make_dirichlet_chart(const Vector &alpha) {
    if (alpha.size() < 2) throw ConstructionError("dirichlet needs at least 2 parts");
    if (!(alpha.array() > 0.0).all()) throw ConstructionError("dirichlet alpha must be positive");
    return DensityModel(DomainDescriptor::simplex_chart(static_cast<int>(alpha.size())),
                        std::make_shared<DirichletChart>(alpha));
}

Matrix correlated_covariance(double nu, int dim) {
    if (dim < 2) throw ConstructionError("correlated covariance needs dim >= 2");
    Matrix s = Matrix::Identity(dim, dim);
    s(0, 1) = nu;
    s(1, 0) = nu;
    return s;
}

double check_score_consistency(const DensityModel &model, const Eigen::Ref<const Vector> &x,
                               double step) {
    if (!(step > 0.0)) throw std::invalid_argument("step must be positive");
    require_interior(model.domain(), x);
    const Vector s = model.score(x);
    double worst = 0.0;
    Vector probe = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        probe[i] = x[i] + step;
        require_interior(model.domain(), probe);
        const double up = model.log_density_unnorm(probe);
        probe[i] = x[i] - step;
        require_interior(model.domain(), probe);
        const double down = model.log_density_unnorm(probe);
        probe[i] = x[i];
        worst = std::max(worst, std::abs((up - down) / (2.0 * step) - s[i]));
    }
    return worst;
}

}  // namespace sfksd
