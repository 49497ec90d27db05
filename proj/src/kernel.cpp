#include "sfksd/kernel.hpp"

#include "sfksd/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace sfksd {

namespace {

class Rbf final : public detail::KernelImpl {
public:
    explicit Rbf(double bw) : bw_(bw) {}

    double eval(const Eigen::Ref<const Vector> &x, const Eigen::Ref<const Vector> &y) const override {
        return std::exp(-(x - y).squaredNorm() / bw_);
    }
    Vector grad_x(const Eigen::Ref<const Vector> &x, const Eigen::Ref<const Vector> &y) const override {
        return (-2.0 / bw_ * eval(x, y)) * (x - y);
    }
    Vector grad_y(const Eigen::Ref<const Vector> &x, const Eigen::Ref<const Vector> &y) const override {
        return (2.0 / bw_ * eval(x, y)) * (x - y);
    }
    Matrix mixed_second(const Eigen::Ref<const Vector> &x,
                        const Eigen::Ref<const Vector> &y) const override {
        const Vector diff = x - y;
        const double k = eval(x, y);
        Matrix m = (-4.0 / (bw_ * bw_)) * diff * diff.transpose();
        m.diagonal().array() += 2.0 / bw_;
        return k * m;
    }
    std::optional<double> rbf_bandwidth_sq() const override { return bw_; }

private:
    double bw_;
};

std::vector<const double *> column_pointers(const SampleMatrix &m) {
    std::vector<const double *> cols(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) cols[j] = m.col(j).data();
    return cols;
}

}  // namespace

SmoothKernel rbf(double bandwidth_sq) {
    if (!(bandwidth_sq > 0.0) || !std::isfinite(bandwidth_sq))
        throw ConstructionError("rbf bandwidth must be positive and finite");
    return SmoothKernel(std::make_shared<Rbf>(bandwidth_sq));
}

double median_heuristic(const SampleMatrix &samples) {
    const auto n = static_cast<std::size_t>(samples.rows());
    if (n < 2) throw std::invalid_argument("median heuristic needs at least two samples");
    const auto cols = column_pointers(samples);
    const simd::SoaView view{cols.data(), static_cast<int>(samples.cols())};
    const auto &k = simd::active();

    std::vector<double> d2;
    d2.resize(n * (n - 1) / 2);
    std::size_t at = 0;
    Vector xr(samples.cols());
    for (std::size_t r = 0; r + 1 < n; ++r) {
        xr = samples.row(static_cast<Eigen::Index>(r)).transpose();
        k.sqdist_row(view, xr.data(), r + 1, n, d2.data() + at);
        at += n - r - 1;
    }
    const auto mid = d2.begin() + static_cast<std::ptrdiff_t>((d2.size() - 1) / 2);
    std::nth_element(d2.begin(), mid, d2.end());
    if (!(*mid > 0.0))
        throw NumericalError("degenerate bandwidth: median squared pairwise distance is zero");
    return *mid;
}

Matrix rbf_gram(const SampleMatrix &x, const SampleMatrix &y, double bandwidth_sq) {
    if (x.cols() != y.cols()) throw std::invalid_argument("rbf_gram dimension mismatch");
    const auto cols = column_pointers(y);
    const simd::SoaView view{cols.data(), static_cast<int>(y.cols())};
    const auto &k = simd::active();
    Matrix out(x.rows(), y.rows());
    std::vector<double> row(static_cast<std::size_t>(y.rows()));
    Vector xr(x.cols());
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        xr = x.row(r).transpose();
        k.rbf_row(view, xr.data(), 1.0 / bandwidth_sq, 0, row.size(), row.data());
        for (Eigen::Index s = 0; s < y.rows(); ++s) out(r, s) = row[static_cast<std::size_t>(s)];
    }
    return out;
}

}  // namespace sfksd
