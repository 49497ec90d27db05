#include "oracles.hpp"

#include "sfksd/simd/kernels.hpp"
#include "sfksd/stein.hpp"

#include <doctest.h>

#include <cstdlib>
#include <vector>

using namespace sfksd;
namespace simd = sfksd::simd;

namespace {

struct Soa {
    std::vector<std::vector<double>> data;
    std::vector<const double *> ptrs;
    Soa(int dim, std::size_t n, RngStream &rng, double scale) : data(static_cast<std::size_t>(dim)) {
        for (auto &col : data) {
            col.resize(n);
            for (auto &v : col) v = scale * rng.normal();
        }
        for (auto &col : data) ptrs.push_back(col.data());
    }
    simd::SoaView view() const { return {ptrs.data(), static_cast<int>(data.size())}; }
    std::vector<double> point(std::size_t s) const {
        std::vector<double> p;
        for (const auto &col : data) p.push_back(col[s]);
        return p;
    }
};

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

struct LevelGuard {
    simd::Level saved = simd::active_level();
    ~LevelGuard() { simd::set_level(saved); }
};

}  // namespace

TEST_CASE("scalar level is always available") {
    const auto levels = simd::available_levels();
    REQUIRE_FALSE(levels.empty());
    CHECK(levels.front() == simd::Level::Scalar);
    CHECK(simd::to_string(simd::Level::Scalar) == "scalar");
}

TEST_CASE("vector kernels agree with the scalar reference") {
    RngStream rng(81, 0);
    const auto &ref = simd::scalar_table();
    for (auto level : simd::available_levels()) {
        CAPTURE(simd::to_string(level));
        const auto &t = simd::table_for(level);
        for (int trial = 0; trial < 40; ++trial) {
            const int dim = 1 + trial % 5;
            const std::size_t n = 1 + static_cast<std::size_t>(trial * 7 % 53);
            const Soa x(dim, n, rng, 1.0), u(dim, n, rng, 2.0), g(dim, n, rng, 0.5);
            const auto xr = x.point(0), ur = u.point(0), gr = g.point(0);
            const std::size_t begin = n > 3 ? static_cast<std::size_t>(trial % 3) : 0;

            std::vector<double> a(n), b(n);
            CHECK(rel(t.dot(x.data[0].data(), u.data[0].data(), n), ref.dot(x.data[0].data(), u.data[0].data(), n)) < 1e-13);

            t.sqdist_row(x.view(), xr.data(), begin, n, a.data());
            ref.sqdist_row(x.view(), xr.data(), begin, n, b.data());
            for (std::size_t s = 0; s < n - begin; ++s) CHECK(rel(a[s], b[s]) < 1e-14);

            t.rbf_row(x.view(), xr.data(), 0.7, begin, n, a.data());
            ref.rbf_row(x.view(), xr.data(), 0.7, begin, n, b.data());
            for (std::size_t s = 0; s < n - begin; ++s) CHECK(rel(a[s], b[s]) < 1e-13);

            simd::SteinRowArgs args{x.view(), u.view(), g.view(), xr.data(), ur.data(), gr.data(), 0.8, begin, n, a.data()};
            t.stein_rbf_row(args);
            args.out = b.data();
            ref.stein_rbf_row(args);
            for (std::size_t s = 0; s < n - begin; ++s) CHECK(rel(a[s], b[s]) < 1e-12);
        }
    }
}

TEST_CASE("gram matrices agree across levels") {
    LevelGuard guard;
    RngStream rng(82, 0);
    SampleMatrix X(45, 3);
    for (Eigen::Index r = 0; r < X.rows(); ++r) X.row(r) = oracle::uniform_in_ball(3, 0.95, rng).transpose();
    const auto q = make_gaussian(Vector::Zero(3), correlated_covariance(0.3), DomainDescriptor::unit_ball(3));
    const SteinKernelSpec spec(q, rbf(0.6), aux_ball_power(2.0, 3));
    simd::set_level(simd::Level::Scalar);
    const Matrix ref = gram_matrix(spec, X);
    const Matrix kref = rbf_gram(X, X, 0.6);
    const double med = median_heuristic(X);
    for (auto level : simd::available_levels()) {
        CAPTURE(simd::to_string(level));
        simd::set_level(level);
        CHECK(simd::active_level() == level);
        CHECK((gram_matrix(spec, X) - ref).cwiseAbs().maxCoeff() <= 1e-12 * ref.cwiseAbs().maxCoeff());
        CHECK((rbf_gram(X, X, 0.6) - kref).cwiseAbs().maxCoeff() <= 1e-14);
        CHECK(median_heuristic(X) == doctest::Approx(med).epsilon(1e-14));
    }
}

TEST_CASE("unavailable levels are rejected") {
    LevelGuard guard;
    const auto levels = simd::available_levels();
    for (auto level : {simd::Level::Avx2, simd::Level::Neon}) {
        if (std::find(levels.begin(), levels.end(), level) == levels.end())
            CHECK_THROWS_AS(simd::set_level(level), std::invalid_argument);
    }
}
