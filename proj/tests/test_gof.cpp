#include "oracles.hpp"

#include "sfksd/gof.hpp"
#include "sfksd/sampling.hpp"

#include <doctest.h>

using namespace sfksd;

namespace {

Vector vec(std::initializer_list<double> v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

SampleMatrix normals(std::size_t n, int d, double shift, RngStream &rng) {
    SampleMatrix X = sample_gaussian_mixture({1.0}, {Vector::Zero(d)}, {Matrix::Identity(d, d)}, n, rng);
    X.col(0).array() += shift;
    return X;
}

Matrix random_symmetric(int n, RngStream &rng) {
    Matrix A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) A(i, j) = A(j, i) = rng.normal();
    return A;
}

}  // namespace

TEST_CASE("identity multipliers give the U-statistic") {
    RngStream rng(41, 0);
    for (int n : {2, 3, 17, 64}) {
        const Matrix H = random_symmetric(n, rng);
        CHECK(wild_bootstrap_draw(H, Vector::Ones(n)) == doctest::Approx(u_statistic(H)).epsilon(1e-14));
    }
}

TEST_CASE("sign multipliers on an outer product") {
    const Vector v = vec({1.5, -2.0, 0.5});
    Matrix H = v * v.transpose();
    H.diagonal().setZero();
    const Vector eps = vec({1.0, -1.0, 1.0});
    const double expect = (std::pow(v.cwiseAbs().sum(), 2) - v.squaredNorm()) / 6.0;
    CHECK(wild_bootstrap_draw(H, eps) == doctest::Approx(expect));
}

TEST_CASE("bootstrap draws are centred") {
    RngStream rng(42, 0);
    const Matrix H = random_symmetric(30, rng);
    const Vector draws = wild_bootstrap_draws(H, 10000, 7);
    const auto ms = oracle::mean_se(draws);
    CHECK(std::abs(ms.mean) <= 4.0 * ms.se);
}

TEST_CASE("bootstrap draws do not depend on the thread count") {
    RngStream rng(43, 0);
    const Matrix H = random_symmetric(25, rng);
    const Vector a = wild_bootstrap_draws(H, 200, 9, 1), b = wild_bootstrap_draws(H, 200, 9, 4);
    CHECK((a.array() == b.array()).all());
    CHECK_FALSE((a.array() == wild_bootstrap_draws(H, 200, 10, 1).array()).all());
}

TEST_CASE("threshold and p-value arithmetic") {
    Vector draws(300);
    for (int i = 0; i < 300; ++i) draws[i] = 300 - i;  // 300 .. 1
    CHECK(bootstrap_threshold(draws, 0.01) == 297.0);  // ceil(0.99 * 300) = 297th smallest
    CHECK(bootstrap_threshold(draws, 0.05) == 285.0);
    CHECK(bootstrap_p_value(draws, 300.0) == doctest::Approx(2.0 / 301.0));
    CHECK(bootstrap_p_value(draws, 1000.0) == doctest::Approx(1.0 / 301.0));
    CHECK(bootstrap_p_value(draws, 0.0) == 1.0);
    CHECK_THROWS_AS(bootstrap_threshold(draws, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(bootstrap_threshold(draws, 1.0), std::invalid_argument);
}

TEST_CASE("ksd_test determinism and result fields") {
    RngStream rng(44, 0);
    const auto X = normals(60, 2, 0.0, rng);
    const auto q = make_gaussian(Vector::Zero(2), Matrix::Identity(2, 2), DomainDescriptor::full_space(2));
    const SteinKernelSpec spec(q, rbf(median_heuristic(X)), aux_constant_one(2));
    const auto a = ksd_test(spec, X, 0.05, 200, 123, 1);
    const auto b = ksd_test(spec, X, 0.05, 200, 123, 3);
    CHECK(to_json(a).dump() == to_json(b).dump());
    CHECK(a.n == 60);
    CHECK(a.bootstrap_draws == 200);
    CHECK(a.seed == 123);
    CHECK(a.reject == (a.statistic > a.threshold));
    CHECK(a.statistic == doctest::Approx(u_statistic(gram_matrix(spec, X))).epsilon(1e-14));
    const auto j = to_json(a);
    for (const char *key : {"statistic", "threshold", "p_value", "reject", "n", "B", "seed"}) CHECK(j.contains(key));
}

TEST_CASE("ksd_test detects a shifted sample") {
    RngStream rng(45, 0);
    const auto X = normals(100, 2, 1.0, rng);
    const auto q = make_gaussian(Vector::Zero(2), Matrix::Identity(2, 2), DomainDescriptor::full_space(2));
    const SteinKernelSpec spec(q, rbf(median_heuristic(X)), aux_constant_one(2));
    const auto r = ksd_test(spec, X, 0.01, 300, 1);
    CHECK(r.reject);
    CHECK(r.p_value == doctest::Approx(1.0 / 301.0));
}

TEST_CASE("mmd statistic") {
    RngStream rng(46, 0);
    const auto X = normals(40, 2, 0.0, rng);
    const auto k = rbf(1.0);
    // with Y = X the biased form vanishes; the unbiased one is 2 (S - T) / (n (n - 1)) - 2 S / n^2
    const Matrix K = rbf_gram(X, X, 1.0);
    const double n = 40.0, S = K.sum(), T = K.trace();
    const double u_expect = 2.0 * (S - T) / (n * (n - 1.0)) - 2.0 * S / (n * n);
    CHECK(mmd_u_statistic(X, X, k) == doctest::Approx(u_expect).epsilon(1e-12));

    std::vector<double> stats;
    for (int t = 0; t < 200; ++t) {
        RngStream r(47, static_cast<std::uint64_t>(t));
        stats.push_back(mmd_u_statistic(normals(30, 2, 0.0, r), normals(30, 2, 0.0, r), k));
    }
    const auto ms = oracle::mean_se(Eigen::Map<Vector>(stats.data(), static_cast<Eigen::Index>(stats.size())));
    CHECK(std::abs(ms.mean) <= 4.0 * ms.se);
}

TEST_CASE("mmd_test calibration and power") {
    int rejections = 0;
    const int trials = 500;
    for (int t = 0; t < trials; ++t) {
        RngStream r(48, static_cast<std::uint64_t>(t));
        const auto X = normals(30, 1, 0.0, r), Y = normals(30, 1, 0.0, r);
        rejections += mmd_test(X, Y, rbf(1.0), 0.05, 99, r.next_u64()).reject ? 1 : 0;
    }
    const double rate = static_cast<double>(rejections) / trials;
    CHECK(rate >= 0.02);
    CHECK(rate <= 0.09);

    rejections = 0;
    for (int t = 0; t < 100; ++t) {
        RngStream r(49, static_cast<std::uint64_t>(t));
        // bandwidth_sq = 1, so a shift of 3 is three bandwidths
        const auto X = normals(100, 1, 3.0, r), Y = normals(100, 1, 0.0, r);
        rejections += mmd_test(X, Y, rbf(1.0), 0.05, 100, r.next_u64()).reject ? 1 : 0;
    }
    CHECK(rejections >= 99);
}

TEST_CASE("mmd_test with one permutation") {
    RngStream rng(50, 0);
    for (int t = 0; t < 20; ++t) {
        const auto X = normals(10, 1, 0.5, rng), Y = normals(10, 1, 0.0, rng);
        const double p = mmd_test(X, Y, rbf(1.0), 0.05, 1, rng.next_u64()).p_value;
        CHECK((p == 0.5 || p == 1.0));
    }
}

TEST_CASE("mmd_test determinism") {
    RngStream rng(51, 0);
    const auto X = normals(50, 2, 0.2, rng), Y = normals(50, 2, 0.0, rng);
    CHECK(to_json(mmd_test(X, Y, rbf(1.3), 0.05, 200, 77)).dump() ==
          to_json(mmd_test(X, Y, rbf(1.3), 0.05, 200, 77)).dump());
}

TEST_CASE("input errors") {
    RngStream rng(52, 0);
    const auto q = make_gaussian(Vector::Zero(2), Matrix::Identity(2, 2), DomainDescriptor::full_space(2));
    const SteinKernelSpec spec(q, rbf(1.0), aux_constant_one(2));
    const auto X = normals(10, 2, 0.0, rng);
    CHECK_THROWS_AS(ksd_test(spec, X, 1.5, 100, 1), std::invalid_argument);
    CHECK_THROWS_AS(ksd_test(spec, X.topRows(1), 0.05, 100, 1), std::invalid_argument);
    CHECK_THROWS_AS(wild_bootstrap_draws(Matrix::Identity(5, 5), 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(mmd_test(X, normals(10, 3, 0.0, rng), rbf(1.0), 0.05, 10, 1), std::invalid_argument);
    CHECK_THROWS_AS(mmd_test(X, X, rbf(1.0), 0.05, 0, 1), std::invalid_argument);
}
