#include "sfksd/auxiliary.hpp"

#include "sfksd/domain.hpp"

#include <cmath>
#include <sstream>

namespace sfksd {

namespace {

void require_simplex_interior(const Eigen::Ref<const Vector> &x) {
    if (!(x.array() > 0.0).all() || !(x.sum() < 1.0))
        throw DomainError("auxiliary evaluated outside the open simplex");
}

class ConstantOne final : public detail::DiagonalAuxImpl {
public:
    void eval(const Eigen::Ref<const Vector> &, Eigen::Ref<Vector> g,
              Eigen::Ref<Vector> div) const override {
        g.setOnes();
        div.setZero();
    }
    std::string name() const override { return "one"; }
};

class BallPower final : public detail::DiagonalAuxImpl {
public:
    explicit BallPower(double p) : p_(p) {}

    void eval(const Eigen::Ref<const Vector> &x, Eigen::Ref<Vector> g,
              Eigen::Ref<Vector> div) const override {
        const double r2 = x.squaredNorm();
        if (r2 == 0.0) {
            if (p_ < 2.0)
                throw DomainError("ball_power derivative is singular at the origin for p < 2");
            g.setOnes();
            div.setZero();
            return;
        }
        const double r = std::sqrt(r2);
        g.setConstant(1.0 - std::pow(r, p_));
        div = (-p_ * std::pow(r, p_ - 2.0)) * x;
    }
    std::string name() const override {
        std::ostringstream os;
        os << "ball_power(p=" << p_ << ")";
        return os.str();
    }

private:
    double p_;
};

class Geomean final : public detail::DiagonalAuxImpl {
public:
    void eval(const Eigen::Ref<const Vector> &x, Eigen::Ref<Vector> g,
              Eigen::Ref<Vector> div) const override {
        require_simplex_interior(x);
        const auto m = x.size();
        const double d = static_cast<double>(m + 1);
        const double last = 1.0 - x.sum();
        const double gm = std::exp((x.array().log().sum() + std::log(last)) / d);
        g.setConstant(gm);
        for (Eigen::Index i = 0; i < m; ++i) div[i] = gm / d * (1.0 / x[i] - 1.0 / last);
    }
    std::string name() const override { return "geomean"; }
};

class Mindist final : public detail::DiagonalAuxImpl {
public:
    void eval(const Eigen::Ref<const Vector> &x, Eigen::Ref<Vector> g,
              Eigen::Ref<Vector> div) const override {
        require_simplex_interior(x);
        const auto m = x.size();
        Eigen::Index active = 0;
        double best = x[0];
        for (Eigen::Index j = 1; j < m; ++j)
            if (x[j] < best) {
                best = x[j];
                active = j;
            }
        const double last = 1.0 - x.sum();
        if (last < best) {
            best = last;
            active = m;
        }
        g.setConstant(best);
        if (active == m) {
            div.setConstant(-1.0);
        } else {
            div.setZero();
            div[active] = 1.0;
        }
    }
    std::string name() const override { return "mindist"; }
};

class MirrorNegentropy final : public detail::MatrixAuxImpl {
public:
    void eval(const Eigen::Ref<const Vector> &x, Eigen::Ref<Matrix> G,
              Eigen::Ref<Vector> col_div) const override {
        require_simplex_interior(x);
        const double d = static_cast<double>(x.size() + 1);
        G = -x * x.transpose();
        G.diagonal() += x;
        col_div = (1.0 - d * x.array()).matrix();
    }
    std::string name() const override { return "mirror"; }
};

class DensityRatio final : public detail::DiagonalAuxImpl {
public:
    DensityRatio(DensityModel q, DensityModel p, double log_z)
        : q_(std::move(q)), p_(std::move(p)), log_z_(log_z) {}

    void eval(const Eigen::Ref<const Vector> &x, Eigen::Ref<Vector> g,
              Eigen::Ref<Vector> div) const override {
        const double lr = q_.log_density_unnorm(x) - p_.log_density_unnorm(x);
        if (lr > 700.0)
            throw NumericalError("density ratio overflows (log-ratio > 700); check model scales");
        const double value = std::exp(lr - log_z_);
        g.setConstant(value);
        div = value * (q_.score(x) - p_.score(x));
    }
    std::string name() const override { return "density_ratio"; }

private:
    DensityModel q_;
    DensityModel p_;
    double log_z_;
};

}  // namespace

Vector DiagonalAux::g(const Eigen::Ref<const Vector> &x) const {
    Vector g(dim_), div(dim_);
    eval(x, g, div);
    return g;
}

Vector DiagonalAux::div_terms(const Eigen::Ref<const Vector> &x) const {
    Vector g(dim_), div(dim_);
    eval(x, g, div);
    return div;
}

void DiagonalAux::eval(const Eigen::Ref<const Vector> &x, Eigen::Ref<Vector> g,
                       Eigen::Ref<Vector> div) const {
    if (x.size() != dim_) throw std::invalid_argument("auxiliary dimension mismatch");
    impl_->eval(x, g, div);
    if (scale_ != 1.0) {
        g *= scale_;
        div *= scale_;
    }
}

Matrix MatrixAux::G(const Eigen::Ref<const Vector> &x) const {
    Matrix G(dim_, dim_);
    Vector div(dim_);
    eval(x, G, div);
    return G;
}

Vector MatrixAux::col_div(const Eigen::Ref<const Vector> &x) const {
    Matrix G(dim_, dim_);
    Vector div(dim_);
    eval(x, G, div);
    return div;
}

void MatrixAux::eval(const Eigen::Ref<const Vector> &x, Eigen::Ref<Matrix> G,
                     Eigen::Ref<Vector> col_div) const {
    if (x.size() != dim_) throw std::invalid_argument("auxiliary dimension mismatch");
    impl_->eval(x, G, col_div);
    if (scale_ != 1.0) {
        G *= scale_;
        col_div *= scale_;
    }
}

int aux_dim(const Auxiliary &aux) {
    return std::visit([](const auto &a) { return a.dim(); }, aux);
}

std::string aux_name(const Auxiliary &aux) {
    return std::visit([](const auto &a) { return a.name(); }, aux);
}

DiagonalAux aux_constant_one(int dim) {
    if (dim < 1) throw ConstructionError("auxiliary dim must be >= 1");
    return DiagonalAux(dim, std::make_shared<ConstantOne>());
}

DiagonalAux aux_ball_power(double p, int dim) {
    if (!(p > 0.0)) throw ConstructionError("ball_power exponent must be positive");
    if (dim < 1) throw ConstructionError("auxiliary dim must be >= 1");
    return DiagonalAux(dim, std::make_shared<BallPower>(p));
}

DiagonalAux aux_simplex_geomean(int parts) {
    if (parts < 2) throw ConstructionError("simplex needs at least 2 parts");
    return DiagonalAux(parts - 1, std::make_shared<Geomean>());
}

DiagonalAux aux_simplex_mindist(int parts) {
    if (parts < 2) throw ConstructionError("simplex needs at least 2 parts");
    return DiagonalAux(parts - 1, std::make_shared<Mindist>());
}

MatrixAux aux_mirror_negentropy(int parts) {
    if (parts < 2) throw ConstructionError("simplex needs at least 2 parts");
    return MatrixAux(parts - 1, std::make_shared<MirrorNegentropy>());
}

DiagonalAux aux_density_ratio(const DensityModel &q_model, const DensityModel &p_model,
                              const SampleMatrix &normalizer_samples) {
    if (q_model.dim() != p_model.dim() || !(q_model.domain() == p_model.domain()))
        throw ConstructionError("density ratio needs models on the same domain");
    if (normalizer_samples.rows() < 100)
        throw ConstructionError("density ratio normaliser needs at least 100 samples");
    if (normalizer_samples.cols() != q_model.dim())
        throw ConstructionError("normaliser sample dimension mismatch");
    double total = 0.0;
    for (Eigen::Index r = 0; r < normalizer_samples.rows(); ++r) {
        const Vector x = normalizer_samples.row(r).transpose();
        const double lr = q_model.log_density_unnorm(x) - p_model.log_density_unnorm(x);
        if (lr > 700.0)
            throw NumericalError("density ratio overflows (log-ratio > 700); check model scales");
        total += std::exp(lr);
    }
    const double z = total / static_cast<double>(normalizer_samples.rows());
    return DiagonalAux(q_model.dim(), std::make_shared<DensityRatio>(q_model, p_model, std::log(z)));
}

OptimalityResidual optimality_residual(const DiagonalAux &aux, const DensityModel &q_model,
                                       const SampleMatrix &p_samples) {
    const auto n = p_samples.rows();
    if (n < 2) throw std::invalid_argument("optimality residual needs n >= 2");
    const int d = aux.dim();
    Matrix terms(n, d);
    Vector g(d), div(d);
    for (Eigen::Index r = 0; r < n; ++r) {
        const Vector x = p_samples.row(r).transpose();
        aux.eval(x, g, div);
        terms.row(r) = g.cwiseProduct(q_model.score(x)).transpose();
    }
    OptimalityResidual out;
    out.residual = terms.colwise().mean().transpose();
    const Matrix centred = terms.rowwise() - out.residual.transpose();
    const Vector var = centred.colwise().squaredNorm().transpose() / static_cast<double>(n - 1);
    out.std_error = (var / static_cast<double>(n)).cwiseSqrt();
    return out;
}

Vector variance_normalization(const DiagonalAux &aux, const SampleMatrix &p_samples) {
    const auto n = p_samples.rows();
    if (n < 2) throw std::invalid_argument("variance normalisation needs n >= 2");
    const int d = aux.dim();
    Vector acc = Vector::Zero(d);
    Vector g(d), div(d);
    for (Eigen::Index r = 0; r < n; ++r) {
        aux.eval(p_samples.row(r).transpose(), g, div);
        acc += g;
    }
    return acc / static_cast<double>(n);
}

}  // namespace sfksd
