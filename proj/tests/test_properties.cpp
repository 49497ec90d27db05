// Randomised invariants. Each property runs over cases drawn by small
// hand-rolled generators seeded from the case index, so failures replay.

#include "oracles.hpp"

#include "sfksd/csv.hpp"
#include "sfksd/experiment.hpp"
#include "sfksd/gof.hpp"
#include "sfksd/sampling.hpp"
#include "sfksd/stein.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

using namespace sfksd;

namespace {

constexpr int kCases = 30;

// Halton point in [0,1)^d
Vector halton(int index, int d) {
    static const int primes[] = {2, 3, 5, 7, 11, 13};
    Vector out(d);
    for (int j = 0; j < d; ++j) {
        double f = 1.0, r = 0.0;
        for (int i = index + 1; i > 0; i /= primes[j]) {
            f /= primes[j];
            r += f * (i % primes[j]);
        }
        out[j] = r;
    }
    return out;
}

Matrix random_spd(int d, RngStream &rng) {
    Matrix A(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) A(i, j) = rng.normal();
    return A * A.transpose() / d + 0.3 * Matrix::Identity(d, d);
}

Vector random_vector(int d, double scale, RngStream &rng) {
    Vector v(d);
    for (int i = 0; i < d; ++i) v[i] = scale * rng.normal();
    return v;
}

struct Case {
    std::string name;
    DensityModel model;
    Auxiliary aux;
    std::function<Vector(RngStream &)> point;
    std::function<Vector(int)> quasi_point;  // from a Halton index
};

// Random model on a random domain with a random auxiliary that satisfies
// the boundary condition on that domain.
Case random_case(std::uint64_t seed) {
    RngStream rng(seed, 0);
    const int kind = static_cast<int>(rng.next_u64() % 4);
    const int d = 1 + static_cast<int>(rng.next_u64() % 3);
    if (kind == 0) {
        const auto m = make_gaussian(random_vector(d, 1.0, rng), random_spd(d, rng), DomainDescriptor::full_space(d));
        return {"gaussian", m, aux_constant_one(d).scaled(0.5 + rng.uniform()),
                [d](RngStream &r) { return random_vector(d, 1.5, r); },
                [d](int i) { return Vector((halton(i, d).array() * 6.0 - 3.0).matrix()); }};
    }
    if (kind == 1) {
        const int comps = 2 + static_cast<int>(rng.next_u64() % 2);
        std::vector<double> w(comps, 1.0 / comps);
        std::vector<Vector> mu;
        std::vector<Matrix> cov;
        for (int c = 0; c < comps; ++c) mu.push_back(random_vector(d, 1.0, rng)), cov.push_back(random_spd(d, rng));
        const auto m = make_gaussian_mixture(w, mu, cov, DomainDescriptor::unit_ball(d));
        const double p = std::vector<double>{1.0, 2.0, 4.0}[rng.next_u64() % 3];
        return {"ball mixture", m, aux_ball_power(p, d),
                [d](RngStream &r) {
                    Vector x;
                    do x = oracle::uniform_in_ball(d, 0.97, r);
                    while (x.norm() < 0.05);
                    return x;
                },
                [d](int i) {
                    Vector x = (halton(i, d).array() * 1.1 - 0.55).matrix();
                    return x;
                }};
    }
    const int parts = 3 + static_cast<int>(rng.next_u64() % 2);
    Vector alpha(parts);
    for (int i = 0; i < parts; ++i) alpha[i] = 0.3 + 2.0 * rng.uniform();
    const auto m = make_dirichlet_chart(alpha);
    const auto simplex_point = [parts](RngStream &r) { return oracle::interior_simplex_point(parts, 0.02, r); };
    const auto simplex_quasi = [parts](int i) {
        Vector e = (halton(i, parts).array() * 0.9 + 0.05).matrix();
        e = (-e.array().log()).matrix();
        e /= e.sum();
        return Vector(e.head(parts - 1));
    };
    if (kind == 2) return {"dirichlet/mirror", m, aux_mirror_negentropy(parts), simplex_point, simplex_quasi};
    return {"dirichlet/mindist", m, aux_simplex_mindist(parts), simplex_point, simplex_quasi};
}

SampleMatrix draw_points(const Case &c, int n, RngStream &rng) {
    SampleMatrix X(n, c.model.dim());
    for (int r = 0; r < n; ++r) X.row(r) = c.point(rng).transpose();
    return X;
}

Auxiliary scale_aux(const Auxiliary &a, double s) {
    return std::visit([s](const auto &x) -> Auxiliary { return x.scaled(s); }, a);
}

}  // namespace

TEST_CASE("property: score consistency at quasi-random interior points") {
    for (std::uint64_t s = 0; s < kCases; ++s) {
        const auto c = random_case(s);
        CAPTURE(s);
        CAPTURE(c.name);
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const Vector x = c.quasi_point(i);
            if (!c.model.domain().contains(x)) continue;
            worst = std::max(worst, check_score_consistency(c.model, x, 1e-6));
        }
        CHECK(worst < 1e-4);
    }
}

TEST_CASE("property: dirichlet score under permutation") {
    for (std::uint64_t s = 0; s < kCases; ++s) {
        RngStream rng(1000 + s, 0);
        Vector alpha(3);
        for (int i = 0; i < 3; ++i) alpha[i] = 0.3 + 2.0 * rng.uniform();
        const Vector x = oracle::interior_simplex_point(3, 0.05, rng);
        // swap parts 0 and 1 in both alpha and the point
        Vector alpha_sw = alpha, x_sw = x;
        std::swap(alpha_sw[0], alpha_sw[1]);
        std::swap(x_sw[0], x_sw[1]);
        const Vector s1 = make_dirichlet_chart(alpha).score(x);
        const Vector s2 = make_dirichlet_chart(alpha_sw).score(x_sw);
        CHECK(s1[0] == doctest::Approx(s2[1]).epsilon(1e-12));
        CHECK(s1[1] == doctest::Approx(s2[0]).epsilon(1e-12));
    }
}

TEST_CASE("property: stein gram is symmetric and PSD") {
    for (std::uint64_t s = 0; s < kCases; ++s) {
        const auto c = random_case(s);
        CAPTURE(s);
        CAPTURE(c.name);
        RngStream rng(2000 + s, 0);
        const SampleMatrix X = draw_points(c, 30, rng);
        const SteinKernelSpec spec(c.model, rbf(0.2 + rng.uniform()), c.aux);
        const Matrix H = gram_matrix(spec, X);
        CHECK((H - H.transpose()).cwiseAbs().maxCoeff() == 0.0);
        CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(H).eigenvalues().minCoeff() >= -1e-8 * H.cwiseAbs().maxCoeff());
        CHECK(v_statistic(H) >= -1e-10 * H.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("property: h is quadratic in the auxiliary scale") {
    for (std::uint64_t s = 0; s < kCases; ++s) {
        const auto c = random_case(s);
        CAPTURE(s);
        RngStream rng(3000 + s, 0);
        const double scale = 0.1 + 3.0 * rng.uniform();
        const auto k = rbf(0.5);
        const SteinKernelSpec a(c.model, k, c.aux), b(c.model, k, scale_aux(c.aux, scale));
        for (int t = 0; t < 10; ++t) {
            const Vector x = c.point(rng), y = c.point(rng);
            const double h = stein_kernel_eval(a, x, y);
            CHECK(stein_kernel_eval(b, x, y) == doctest::Approx(scale * scale * h).epsilon(1e-12));
        }
    }
}

TEST_CASE("property: identity multipliers reproduce the U-statistic") {
    for (std::uint64_t s = 0; s < kCases; ++s) {
        const auto c = random_case(s);
        RngStream rng(4000 + s, 0);
        const Matrix H = gram_matrix(SteinKernelSpec(c.model, rbf(0.5), c.aux), draw_points(c, 12 + int(s), rng));
        CHECK(wild_bootstrap_draw(H, Vector::Ones(H.rows())) ==
              doctest::Approx(u_statistic(H)).epsilon(1e-13));
        Vector flip = Vector::Ones(H.rows());
        for (Eigen::Index i = 0; i < flip.size(); ++i) flip[i] = rng.rademacher();
        CHECK(wild_bootstrap_draw(H, flip) == doctest::Approx(wild_bootstrap_draw(H, -flip)).epsilon(1e-13));
    }
}

TEST_CASE("property: p-values are uniform under the null") {
    const std::size_t trials = 500;
    const auto ball = DomainDescriptor::unit_ball(2);
    const auto q = make_gaussian(Vector::Zero(2), Matrix::Identity(2, 2), ball);
    const auto prop = gaussian_mixture_proposal({1.0}, {Vector::Zero(2)}, {Matrix::Identity(2, 2)});
    std::vector<double> pv(trials);
    for (std::size_t t = 0; t < trials; ++t) {
        RngStream r(5000, t);
        const auto X = rejection_sample(ball, prop, 60, 100000, r).samples;
        const SteinKernelSpec spec(q, rbf(median_heuristic(X)), aux_ball_power(2.0, 2));
        pv[t] = ksd_test(spec, X, 0.05, 200, r.next_u64()).p_value;
    }
    for (double level : {0.05, 0.1, 0.25}) {
        const double frac =
            static_cast<double>(std::count_if(pv.begin(), pv.end(), [&](double p) { return p <= level; })) / trials;
        CAPTURE(level);
        CHECK(std::abs(frac - level) <= 0.04);
    }
}

TEST_CASE("property: positive discrepancy and monotone power") {
    for (const char *name : {"truncated_mixture", "dirichlet"}) {
        CAPTURE(name);
        const auto setting = make_power_setting(name, 3);
        const auto &m0 = setting.default_methods.front();
        RngStream aux_rng(6000, 0);
        const auto aux = aux_from_json(std::string(name) == "dirichlet" ? nlohmann::json{{"aux", "mindist"}} : m0.aux,
                                       setting.null_model, aux_rng);
        double mean_stat = 0.0;
        const int trials = 10;
        for (int t = 0; t < trials; ++t) {
            RngStream r(6001, static_cast<std::uint64_t>(t));
            const auto X = setting.sample_alternative(1.0, 150, r);
            const SteinKernelSpec spec(setting.null_model, rbf(median_heuristic(X)), aux);
            mean_stat += u_statistic(gram_matrix(spec, X)) / trials;
        }
        CHECK(mean_stat > 0.0);
    }

    ExperimentConfig c;
    c.setting = "dirichlet";
    c.nu = {0.1, 0.3, 1.0};
    c.n = {100};
    c.trials = 40;
    c.seed = 6002;
    c.methods = {{"ksd", "mindist", {{"aux", "mindist"}}}, {"ksd", "mirror", {{"aux", "mirror"}}}, {"mmd", "MMD", {}}};
    const auto rows = run_power(c, 1);
    for (std::size_t k = 0; k < c.methods.size(); ++k) {
        const auto &lo = rows[k], &mid = rows[3 + k], &hi = rows[6 + k];
        CAPTURE(lo.method);
        CHECK(mid.rejection_rate >= lo.rejection_rate - 2.0 * std::hypot(lo.mc_stderr, mid.mc_stderr));
        CHECK(hi.rejection_rate >= mid.rejection_rate - 2.0 * std::hypot(mid.mc_stderr, hi.mc_stderr));
    }
}

TEST_CASE("property: csv round trip") {
    for (std::uint64_t s = 0; s < kCases; ++s) {
        RngStream rng(7000 + s, 0);
        const int rows = 1 + static_cast<int>(rng.next_u64() % 20), cols = 1 + static_cast<int>(rng.next_u64() % 6);
        SampleMatrix X(rows, cols);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) X(r, c) = rng.normal() * std::pow(10.0, static_cast<int>(rng.next_u64() % 40) - 20);
        const auto Y = parse_sample_csv(emit_sample_csv(X));
        CHECK((X.array() == Y.array()).all());
    }
}
