#include "oracles.hpp"

#include "sfksd/model.hpp"

#include <doctest.h>

using namespace sfksd;

namespace {

Vector vec(std::initializer_list<double> v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

DensityModel std_normal_1d() {
    return make_gaussian(Vector::Zero(1), Matrix::Identity(1, 1), DomainDescriptor::full_space(1));
}

DensityModel two_normals_1d() {
    const Matrix I = Matrix::Identity(1, 1);
    return make_gaussian_mixture({0.5, 0.5}, {vec({-1.0}), vec({1.0})}, {I, I}, DomainDescriptor::full_space(1));
}

}  // namespace

TEST_CASE("gaussian score examples") {
    CHECK(std_normal_1d().score(vec({2.0}))[0] == doctest::Approx(-2.0));

    const auto g0 = make_gaussian(Vector::Zero(3), correlated_covariance(0.0), DomainDescriptor::full_space(3));
    const Vector s0 = g0.score(vec({1, 1, 1}));
    for (int i = 0; i < 3; ++i) CHECK(s0[i] == doctest::Approx(-1.0));

    const auto g5 = make_gaussian(Vector::Zero(3), correlated_covariance(0.5), DomainDescriptor::full_space(3));
    const Vector s5 = g5.score(vec({1, 0, 0}));
    CHECK(s5[0] == doctest::Approx(-4.0 / 3.0));
    CHECK(s5[1] == doctest::Approx(2.0 / 3.0));
    CHECK(s5[2] == doctest::Approx(0.0));
}

TEST_CASE("gaussian construction errors") {
    Matrix bad(2, 2);
    bad << 1, 2, 2, 1;
    CHECK_THROWS_AS(make_gaussian(Vector::Zero(2), bad, DomainDescriptor::full_space(2)), ConstructionError);
    CHECK_THROWS_AS(make_gaussian(Vector::Zero(3), Matrix::Identity(2, 2), DomainDescriptor::full_space(3)),
                    ConstructionError);
    CHECK_THROWS_AS(make_gaussian(Vector::Zero(2), Matrix::Identity(2, 2), DomainDescriptor::full_space(3)),
                    ConstructionError);
}

TEST_CASE("correlated covariance") {
    const Matrix S = correlated_covariance(0.3);
    CHECK(S(0, 1) == 0.3);
    CHECK(S(1, 0) == 0.3);
    CHECK(S(0, 2) == 0.0);
    CHECK(S.diagonal().isOnes());
}

TEST_CASE("single-component mixture equals the gaussian") {
    RngStream rng(1, 0);
    const Vector mu = vec({0.2, -0.4});
    Matrix S(2, 2);
    S << 1.5, 0.3, 0.3, 0.7;
    const auto dom = DomainDescriptor::full_space(2);
    const auto g = make_gaussian(mu, S, dom);
    const auto m = make_gaussian_mixture({1.0}, {mu}, {S}, dom);
    for (int t = 0; t < 10; ++t) {
        const Vector x = vec({2 * rng.normal(), 2 * rng.normal()});
        CHECK((g.score(x) - m.score(x)).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("identical components give the single-component score") {
    const Matrix S = Matrix::Identity(1, 1) * 2.0;
    const auto dom = DomainDescriptor::full_space(1);
    const auto g = make_gaussian(vec({0.5}), S, dom);
    const auto m = make_gaussian_mixture({0.3, 0.7}, {vec({0.5}), vec({0.5})}, {S, S}, dom);
    for (double x : {-3.0, 0.0, 0.7, 12.0}) CHECK(m.score(vec({x}))[0] == doctest::Approx(g.score(vec({x}))[0]));
}

TEST_CASE("symmetric mixture has zero score at the origin") {
    CHECK(two_normals_1d().score(vec({0.0}))[0] == doctest::Approx(0.0));
}

TEST_CASE("mixture score survives well separated components") {
    const Matrix I = Matrix::Identity(1, 1);
    const auto m = make_gaussian_mixture({0.5, 0.5}, {vec({-50.0}), vec({50.0})}, {I, I}, DomainDescriptor::full_space(1));
    const Vector s = m.score(vec({60.0}));
    CHECK(std::isfinite(s[0]));
    CHECK(s[0] == doctest::Approx(-10.0));
}

TEST_CASE("mixture construction errors") {
    const Matrix I = Matrix::Identity(1, 1);
    const auto dom = DomainDescriptor::full_space(1);
    CHECK_THROWS_AS(make_gaussian_mixture({0.5, 0.6}, {vec({0}), vec({1})}, {I, I}, dom), ConstructionError);
    CHECK_THROWS_AS(make_gaussian_mixture({1.0}, {vec({0}), vec({1})}, {I, I}, dom), ConstructionError);
    CHECK_THROWS_AS(make_gaussian_mixture({}, {}, {}, dom), ConstructionError);
}

TEST_CASE("dirichlet score examples") {
    CHECK(make_dirichlet_chart(vec({1, 1, 1})).score(vec({0.2, 0.5})).cwiseAbs().maxCoeff() == 0.0);
    CHECK(make_dirichlet_chart(vec({.5, .5, .5})).score(vec({1.0 / 3, 1.0 / 3})).cwiseAbs().maxCoeff() < 1e-12);
    const Vector s = make_dirichlet_chart(vec({2, 1, 1})).score(vec({0.5, 0.25}));
    CHECK(s[0] == doctest::Approx(2.0));
    CHECK(s[1] == doctest::Approx(0.0));
    CHECK_THROWS_AS(make_dirichlet_chart(vec({1.0, -1.0})), ConstructionError);
    CHECK_THROWS_AS(make_dirichlet_chart(vec({1.0})), ConstructionError);
}

TEST_CASE("check_score_consistency examples") {
    CHECK(check_score_consistency(std_normal_1d(), vec({0.7}), 1e-5) < 1e-6);
    CHECK(check_score_consistency(make_dirichlet_chart(vec({.5, .5, .5})), vec({0.4, 0.3}), 1e-6) < 1e-4);
    CHECK(check_score_consistency(two_normals_1d(), vec({0.3}), 1e-5) < 1e-6);
}

TEST_CASE("truncation does not change the score") {
    const auto full = make_gaussian(vec({0.1, 0.2, 0.3}), correlated_covariance(0.6), DomainDescriptor::full_space(3));
    const auto ball = full.with_domain(DomainDescriptor::unit_ball(3));
    RngStream rng(2, 0);
    for (int t = 0; t < 20; ++t) {
        const Vector x = oracle::uniform_in_ball(3, 0.99, rng);
        CHECK((full.score(x) - ball.score(x)).cwiseAbs().maxCoeff() == 0.0);
    }
    CHECK(ball.domain().kind() == DomainKind::UnitBall);
}

TEST_CASE("domains") {
    const auto b = DomainDescriptor::unit_ball(2);
    CHECK(b.contains(vec({0.5, 0.5})));
    CHECK_FALSE(b.contains(vec({1.0, 0.0})));
    CHECK(b.boundary_distance(vec({0.5, 0.0})) == doctest::Approx(0.5));

    const auto s = DomainDescriptor::simplex_chart(3);
    CHECK(s.dim() == 2);
    CHECK(s.contains(vec({0.2, 0.3})));
    CHECK_FALSE(s.contains(vec({0.0, 0.3})));
    CHECK_FALSE(s.contains(vec({0.7, 0.3})));
    CHECK(barycentric(vec({0.2, 0.3}))[2] == doctest::Approx(0.5));
    CHECK_THROWS_AS(require_interior(s, vec({0.7, 0.3}), 4), DomainError);
    try {
        require_interior(s, vec({0.7, 0.3}), 4);
    } catch (const DomainError &e) {
        CHECK(e.row() == 4);
    }

    const auto box = DomainDescriptor::box(vec({-1, 0}), vec({1, 2}));
    CHECK(box.contains(vec({0.0, 1.0})));
    CHECK_FALSE(box.contains(vec({0.0, 2.0})));
    CHECK_THROWS_AS(DomainDescriptor::box(vec({1}), vec({0})), ConstructionError);
    CHECK_THROWS_AS(DomainDescriptor::unit_ball(2, 0.0), ConstructionError);
}
