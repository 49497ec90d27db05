#pragma once

#include "sfksd/model.hpp"
#include "sfksd/types.hpp"

#include <memory>
#include <string>
#include <variant>

namespace sfksd {

namespace detail {
struct DiagonalAuxImpl {
    virtual ~DiagonalAuxImpl() = default;
    /// Writes g_i(x) and dg_i/dx^i for every i.
    virtual void eval(const Eigen::Ref<const Vector> &x, Eigen::Ref<Vector> g,
                      Eigen::Ref<Vector> div) const = 0;
    virtual std::string name() const = 0;
};
struct MatrixAuxImpl {
    virtual ~MatrixAuxImpl() = default;
    /// Writes G(x) and col_div_i = sum_j dG_ji / dx^j.
    virtual void eval(const Eigen::Ref<const Vector> &x, Eigen::Ref<Matrix> G,
                      Eigen::Ref<Vector> col_div) const = 0;
    virtual std::string name() const = 0;
};
}  // namespace detail

/// Diagonal standardisation function g = (g_1, ..., g_d) with the partials
/// dg_i/dx^i that enter the Stein operator.
class DiagonalAux {
public:
    DiagonalAux(int dim, std::shared_ptr<const detail::DiagonalAuxImpl> impl, double scale = 1.0)
        : dim_(dim), scale_(scale), impl_(std::move(impl)) {}

    int dim() const noexcept { return dim_; }
    std::string name() const { return impl_->name(); }

    Vector g(const Eigen::Ref<const Vector> &x) const;
    Vector div_terms(const Eigen::Ref<const Vector> &x) const;
    void eval(const Eigen::Ref<const Vector> &x, Eigen::Ref<Vector> g, Eigen::Ref<Vector> div) const;

    /// c * g, with derivatives scaled accordingly.
    DiagonalAux scaled(double c) const { return DiagonalAux(dim_, impl_, scale_ * c); }

private:
    int dim_;
    double scale_;
    std::shared_ptr<const detail::DiagonalAuxImpl> impl_;
};

/// Matrix-valued standardisation function G(x).
class MatrixAux {
public:
    MatrixAux(int dim, std::shared_ptr<const detail::MatrixAuxImpl> impl, double scale = 1.0)
        : dim_(dim), scale_(scale), impl_(std::move(impl)) {}

    int dim() const noexcept { return dim_; }
    std::string name() const { return impl_->name(); }

    Matrix G(const Eigen::Ref<const Vector> &x) const;
    Vector col_div(const Eigen::Ref<const Vector> &x) const;
    void eval(const Eigen::Ref<const Vector> &x, Eigen::Ref<Matrix> G, Eigen::Ref<Vector> col_div) const;

    MatrixAux scaled(double c) const { return MatrixAux(dim_, impl_, scale_ * c); }

private:
    int dim_;
    double scale_;
    std::shared_ptr<const detail::MatrixAuxImpl> impl_;
};

using Auxiliary = std::variant<DiagonalAux, MatrixAux>;

int aux_dim(const Auxiliary &aux);
std::string aux_name(const Auxiliary &aux);

/// g == 1: the classic Langevin KSD.
DiagonalAux aux_constant_one(int dim);

/// g_i(x) = 1 - |x|^p on the unit ball.
DiagonalAux aux_ball_power(double p, int dim);

/// g_i(x) = (prod_j xbar^j)^(1/d) on the simplex chart with d parts.
DiagonalAux aux_simplex_geomean(int parts);

/// g_i(x) = min_j xbar^j on the simplex chart; lowest index wins ties.
DiagonalAux aux_simplex_mindist(int parts);

/// G(x) = diag(x) - x x^T, the inverse Hessian of negative entropy on the
/// simplex chart (mirrored Stein operator).
MatrixAux aux_mirror_negentropy(int parts);

/// Self-normalised density ratio g(x) = (q~/p~)(x) / Z with Z the mean of
/// q~/p~ over normalizer_samples (drawn from p).
DiagonalAux aux_density_ratio(const DensityModel &q_model, const DensityModel &p_model,
                              const SampleMatrix &normalizer_samples);

struct OptimalityResidual {
    Vector residual;
    Vector std_error;
};

/// Sample estimate of E_p[g_i(x) d/dx^i log q(x)] for each i.
OptimalityResidual optimality_residual(const DiagonalAux &aux, const DensityModel &q_model,
                                       const SampleMatrix &p_samples);

/// Per-coordinate sample mean of g_i over p_samples.
Vector variance_normalization(const DiagonalAux &aux, const SampleMatrix &p_samples);

}  // namespace sfksd
