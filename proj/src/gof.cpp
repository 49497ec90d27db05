#include "sfksd/gof.hpp"

#include "sfksd/parallel.hpp"
#include "sfksd/rng.hpp"
#include "sfksd/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace sfksd {

namespace {

void validate_level(double level) {
    if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("test level must be in (0, 1)");
}

// eps^T H eps through one dot product per column (H is symmetric and
// column-major, so each column is contiguous).
double quadratic_form(const Matrix &H, const double *eps) {
    const auto &table = simd::active();
    const auto n = static_cast<std::size_t>(H.rows());
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        acc += eps[i] * table.dot(H.col(static_cast<Eigen::Index>(i)).data(), eps, n);
    return acc;
}

Matrix kernel_matrix(const SampleMatrix &A, const SampleMatrix &B, const SmoothKernel &kernel) {
    if (const auto bw = kernel.rbf_bandwidth_sq()) return rbf_gram(A, B, *bw);
    Matrix K(A.rows(), B.rows());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < B.rows(); ++j)
            K(i, j) = kernel.eval(A.row(i).transpose(), B.row(j).transpose());
    return K;
}

// Unbiased MMD^2 from the pooled kernel matrix and a 0/1 membership vector
// (1 = first sample). Row sums against the indicator go through `dot`.
double mmd_from_pooled(const Matrix &K, const std::vector<double> &in_x, const Vector &row_sums,
                       std::size_t n, std::size_t m) {
    const auto &table = simd::active();
    const auto N = static_cast<std::size_t>(K.rows());
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const auto col = static_cast<Eigen::Index>(i);
        const double to_x = table.dot(K.col(col).data(), in_x.data(), N);
        const double to_y = row_sums[col] - to_x;
        const double kii = K(col, col);
        if (in_x[i] != 0.0) {
            sxx += to_x - kii;
            sxy += to_y;
        } else {
            syy += to_y - kii;
        }
    }
    const double dn = static_cast<double>(n), dm = static_cast<double>(m);
    return sxx / (dn * (dn - 1.0)) + syy / (dm * (dm - 1.0)) - 2.0 * sxy / (dn * dm);
}

}  // namespace

nlohmann::ordered_json to_json(const TestResult &r) {
    nlohmann::ordered_json j;
    j["statistic"] = r.statistic;
    j["threshold"] = r.threshold;
    j["p_value"] = r.p_value;
    j["reject"] = r.reject;
    j["n"] = r.n;
    j["B"] = r.bootstrap_draws;
    j["seed"] = r.seed;
    return j;
}

double wild_bootstrap_draw(const Matrix &H, const Eigen::Ref<const Vector> &multipliers) {
    const auto n = H.rows();
    if (n < 2 || multipliers.size() != n) throw std::invalid_argument("bootstrap draw shape mismatch");
    const Vector eps = multipliers;
    const double q = quadratic_form(H, eps.data());
    return (q - H.trace()) / (static_cast<double>(n) * static_cast<double>(n - 1));
}

Vector wild_bootstrap_draws(const Matrix &H, std::size_t B, std::uint64_t seed, unsigned threads) {
    const auto n = H.rows();
    if (n < 2 || H.cols() != n) throw std::invalid_argument("wild bootstrap needs a square H with n >= 2");
    if (B < 1) throw std::invalid_argument("wild bootstrap needs B >= 1");
    const double trace = H.trace();
    const double scale = 1.0 / (static_cast<double>(n) * static_cast<double>(n - 1));
    Vector draws(static_cast<Eigen::Index>(B));
    parallel_for(B, threads, [&](std::size_t b) {
        RngStream rng(seed, b);
        std::vector<double> eps(static_cast<std::size_t>(n));
        for (auto &e : eps) e = rng.rademacher();
        draws[static_cast<Eigen::Index>(b)] = (quadratic_form(H, eps.data()) - trace) * scale;
    });
    return draws;
}

double bootstrap_threshold(const Vector &draws, double level) {
    validate_level(level);
    const auto B = static_cast<std::size_t>(draws.size());
    if (B == 0) throw std::invalid_argument("no bootstrap draws");
    // The 1e-9 guard keeps e.g. 0.99 * 300 from rounding up to 298.
    auto k = static_cast<std::size_t>(std::ceil((1.0 - level) * static_cast<double>(B) - 1e-9));
    k = std::clamp<std::size_t>(k, 1, B);
    std::vector<double> sorted(draws.data(), draws.data() + B);
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k - 1), sorted.end());
    return sorted[k - 1];
}

double bootstrap_p_value(const Vector &draws, double statistic) {
    const auto exceed = (draws.array() >= statistic).count();
    return (1.0 + static_cast<double>(exceed)) / (1.0 + static_cast<double>(draws.size()));
}

TestResult ksd_test(const SteinKernelSpec &spec, const SampleMatrix &samples, double level,
                    std::size_t B, std::uint64_t seed, unsigned threads) {
    validate_level(level);
    if (samples.rows() < 2) throw std::invalid_argument("ksd_test needs n >= 2");
    const Matrix H = gram_matrix(spec, samples, threads);
    TestResult r;
    r.statistic = u_statistic(H);
    const Vector draws = wild_bootstrap_draws(H, B, seed, threads);
    r.threshold = bootstrap_threshold(draws, level);
    r.p_value = bootstrap_p_value(draws, r.statistic);
    r.reject = r.statistic > r.threshold;
    r.n = static_cast<std::size_t>(samples.rows());
    r.bootstrap_draws = B;
    r.seed = seed;
    return r;
}

double mmd_u_statistic(const SampleMatrix &X, const SampleMatrix &Y, const SmoothKernel &kernel) {
    const auto n = X.rows(), m = Y.rows();
    if (n < 2 || m < 2) throw std::invalid_argument("mmd needs at least two samples on each side");
    if (X.cols() != Y.cols()) throw std::invalid_argument("mmd samples differ in dimension");
    const Matrix Kxx = kernel_matrix(X, X, kernel);
    const Matrix Kyy = kernel_matrix(Y, Y, kernel);
    const Matrix Kxy = kernel_matrix(X, Y, kernel);
    const double dn = static_cast<double>(n), dm = static_cast<double>(m);
    return (Kxx.sum() - Kxx.trace()) / (dn * (dn - 1.0)) + (Kyy.sum() - Kyy.trace()) / (dm * (dm - 1.0)) -
           2.0 * Kxy.sum() / (dn * dm);
}

TestResult mmd_test(const SampleMatrix &X, const SampleMatrix &Y, const SmoothKernel &kernel,
                    double level, std::size_t P, std::uint64_t seed) {
    validate_level(level);
    const auto n = static_cast<std::size_t>(X.rows());
    const auto m = static_cast<std::size_t>(Y.rows());
    if (n < 2 || m < 2) throw std::invalid_argument("mmd needs at least two samples on each side");
    if (X.cols() != Y.cols()) throw std::invalid_argument("mmd samples differ in dimension");
    if (P < 1) throw std::invalid_argument("mmd_test needs P >= 1");

    SampleMatrix pooled(X.rows() + Y.rows(), X.cols());
    pooled << X, Y;
    const Matrix K = kernel_matrix(pooled, pooled, kernel);
    const Vector row_sums = K.colwise().sum().transpose();
    const std::size_t N = n + m;

    std::vector<double> labels(N, 0.0);
    std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(n), 1.0);

    TestResult r;
    r.statistic = mmd_from_pooled(K, labels, row_sums, n, m);
    Vector perm(static_cast<Eigen::Index>(P));
    for (std::size_t p = 0; p < P; ++p) {
        RngStream rng(seed, p);
        std::vector<double> shuffled = labels;
        for (std::size_t i = N - 1; i > 0; --i) std::swap(shuffled[i], shuffled[rng.next_u64() % (i + 1)]);
        perm[static_cast<Eigen::Index>(p)] = mmd_from_pooled(K, shuffled, row_sums, n, m);
    }
    r.threshold = bootstrap_threshold(perm, level);
    r.p_value = bootstrap_p_value(perm, r.statistic);
    r.reject = r.statistic > r.threshold;
    r.n = n;
    r.bootstrap_draws = P;
    r.seed = seed;
    return r;
}

}  // namespace sfksd
