#include "sfksd/experiment.hpp"

#include "sfksd/csv.hpp"
#include "sfksd/parallel.hpp"
#include "sfksd/sampling.hpp"
#include "sfksd/verify.hpp"

#include <cmath>
#include <optional>

namespace sfksd {

using nlohmann::json;

namespace {

json matrix_json(const Matrix &m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

json vector_json(const Vector &v) { return std::vector<double>(v.data(), v.data() + v.size()); }

MethodSpec ksd_method(const std::string &label, json aux) { return {"ksd", label, std::move(aux)}; }

MethodSpec mmd_method() { return {"mmd", "MMD", json()}; }

SampleMatrix draw_mixture_in_ball(const std::vector<double> &weights, const std::vector<Vector> &means,
                                  const Matrix &cov, int dim, std::size_t n, RngStream &rng) {
    const std::vector<Matrix> covs(weights.size(), cov);
    const auto proposal = gaussian_mixture_proposal(weights, means, covs);
    return rejection_sample(DomainDescriptor::unit_ball(dim), proposal, n, 1000 * n + 10000, rng).samples;
}

struct TrialOutcome {
    std::vector<char> reject;  // per method
};

}  // namespace

PowerSetting make_power_setting(const std::string &name, int dim) {
    const std::vector<MethodSpec> ball_methods = {
        ksd_method("bd-KSD(p=1)", {{"aux", "ball_power"}, {"p", 1.0}}),
        ksd_method("bd-KSD(p=2)", {{"aux", "ball_power"}, {"p", 2.0}}), mmd_method()};
    if (name == "truncated_gaussian") {
        if (dim < 2) throw ConfigError("truncated_gaussian needs dim >= 2");
        const Matrix I = Matrix::Identity(dim, dim);
        json spec = {{"family", "gaussian"},
                     {"mean", vector_json(Vector::Zero(dim))},
                     {"covariance", matrix_json(I)},
                     {"domain", {{"kind", "unit_ball"}, {"dim", dim}}}};
        return {name, make_gaussian(Vector::Zero(dim), I, DomainDescriptor::unit_ball(dim)), spec,
                [dim](double nu, std::size_t n, RngStream &rng) {
                    return draw_mixture_in_ball({1.0}, {Vector::Zero(dim)}, correlated_covariance(nu, dim), dim, n,
                                                rng);
                },
                ball_methods};
    }
    if (name == "truncated_mixture") {
        if (dim < 2) throw ConfigError("truncated_mixture needs dim >= 2");
        const Matrix I = Matrix::Identity(dim, dim);
        Vector m1 = Vector::Zero(dim), m2 = Vector::Zero(dim);
        m1[0] = -1.0;
        m2[0] = 1.0;
        json spec = {{"family", "gaussian_mixture"},
                     {"weights", {0.5, 0.5}},
                     {"means", {vector_json(m1), vector_json(m2)}},
                     {"covariances", {matrix_json(I), matrix_json(I)}},
                     {"domain", {{"kind", "unit_ball"}, {"dim", dim}}}};
        return {name, make_gaussian_mixture({0.5, 0.5}, {m1, m2}, {I, I}, DomainDescriptor::unit_ball(dim)), spec,
                [dim, m1, m2](double nu, std::size_t n, RngStream &rng) {
                    return draw_mixture_in_ball({0.5, 0.5}, {m1, m2}, correlated_covariance(nu, dim), dim, n, rng);
                },
                ball_methods};
    }
    if (name == "dirichlet") {
        if (dim < 2) throw ConfigError("dirichlet needs at least 2 parts");
        const Vector alpha = Vector::Constant(dim, 0.5);
        json spec = {{"family", "dirichlet"}, {"alpha", vector_json(alpha)}};
        return {name, make_dirichlet_chart(alpha), spec,
                [alpha](double nu, std::size_t n, RngStream &rng) {
                    Vector a = alpha;
                    a[0] += nu;
                    return sample_dirichlet(a, n, rng);
                },
                {ksd_method("bd-KSD(geomean)", {{"aux", "geomean"}}),
                 ksd_method("bd-KSD(mindist)", {{"aux", "mindist"}}), mmd_method(),
                 ksd_method("MSD(mirror)", {{"aux", "mirror"}})}};
    }
    throw ConfigError("unknown setting: \"" + name + "\"");
}

std::vector<PowerRow> run_power(const ExperimentConfig &config, unsigned threads) {
    const PowerSetting setting = make_power_setting(config.setting, config.dim);
    const auto &methods = config.methods.empty() ? setting.default_methods : config.methods;
    if (config.nu.empty()) throw ConfigError("power needs at least one nu");
    if (config.n.empty()) throw ConfigError("power needs at least one n");
    for (auto n : config.n)
        if (n < 2) throw ConfigError("sample sizes must be >= 2");

    std::vector<std::optional<Auxiliary>> auxes;
    RngStream aux_rng(config.seed, ~std::uint64_t{0});
    for (const auto &m : methods) {
        if (m.kind == "ksd") {
            auxes.emplace_back(aux_from_json(m.aux, setting.null_model, aux_rng));
        } else {
            auxes.emplace_back();
        }
    }

    std::vector<PowerRow> rows;
    std::uint64_t cell = 0;
    for (double nu : config.nu) {
        for (std::size_t n : config.n) {
            std::vector<TrialOutcome> outcomes(config.trials);
            const std::uint64_t cell_base = cell << 32;
            parallel_for(config.trials, threads, [&](std::size_t t) {
                const RngStream trial(config.seed, cell_base + t);
                RngStream data_rng = trial.substream(0);
                const SampleMatrix X = setting.sample_alternative(nu, n, data_rng);
                auto &out = outcomes[t].reject;
                out.assign(methods.size(), 0);
                for (std::size_t k = 0; k < methods.size(); ++k) {
                    const std::uint64_t test_seed = trial.substream(2 + k).next_u64();
                    if (methods[k].kind == "ksd") {
                        const SteinKernelSpec spec(setting.null_model, config.kernel.resolve(X), *auxes[k]);
                        out[k] = ksd_test(spec, X, config.alpha, config.B, test_seed, 1).reject;
                    } else {
                        RngStream null_rng = trial.substream(1);
                        const SampleMatrix Y = sample_from_model_json(setting.null_spec, n, null_rng);
                        SampleMatrix pooled(X.rows() + Y.rows(), X.cols());
                        pooled << X, Y;
                        out[k] = mmd_test(X, Y, config.kernel.resolve(pooled), config.alpha, config.P, test_seed).reject;
                    }
                }
            });
            for (std::size_t k = 0; k < methods.size(); ++k) {
                PowerRow row;
                row.setting = setting.name;
                row.method = methods[k].label;
                row.nu = nu;
                row.n = n;
                row.trials = config.trials;
                for (const auto &o : outcomes) row.rejections += static_cast<std::size_t>(o.reject[k]);
                const double T = static_cast<double>(config.trials);
                row.rejection_rate = static_cast<double>(row.rejections) / T;
                row.mc_stderr = std::sqrt(row.rejection_rate * (1.0 - row.rejection_rate) / T);
                rows.push_back(row);
            }
            ++cell;
        }
    }
    return rows;
}

std::vector<PowerRow> run_type1(const ExperimentConfig &config, unsigned threads) {
    ExperimentConfig null_config = config;
    null_config.nu = {0.0};
    return run_power(null_config, threads);
}

std::string power_csv(const std::vector<PowerRow> &rows) {
    std::string out = "setting,method,nu,n,trials,rejections,rejection_rate,mc_stderr\n";
    for (const auto &r : rows) {
        out += r.setting + ',' + r.method + ',' + format_double(r.nu) + ',' + std::to_string(r.n) + ',' +
               std::to_string(r.trials) + ',' + std::to_string(r.rejections) + ',' + format_double(r.rejection_rate) +
               ',' + format_double(r.mc_stderr) + '\n';
    }
    return out;
}

std::vector<PowerRow> parse_power_csv(const std::string &text) {
    auto table = split_csv(text);
    if (table.empty() || table.front().size() != 8 || table.front()[0] != "setting")
        throw CsvError("missing power table header", -1);
    std::vector<PowerRow> rows;
    for (std::size_t r = 1; r < table.size(); ++r) {
        const auto &f = table[r];
        const auto row = static_cast<std::ptrdiff_t>(r - 1);
        if (f.size() != 8) throw CsvError("expected 8 fields", row);
        try {
            rows.push_back({f[0], f[1], std::stod(f[2]), std::stoull(f[3]), std::stoull(f[4]), std::stoull(f[5]),
                            std::stod(f[6]), std::stod(f[7])});
        } catch (const std::logic_error &) {
            throw CsvError("malformed number", row);
        }
    }
    return rows;
}

TestResult run_test(const ExperimentConfig &config, const SampleMatrix &samples, unsigned threads,
                    Matrix *gram_out) {
    if (config.model.is_null()) throw ConfigError("test needs a \"model\"");
    const DensityModel model = model_from_json(config.model);
    if (samples.cols() != model.dim())
        throw ConfigError("data has " + std::to_string(samples.cols()) + " columns but the model has dimension " +
                          std::to_string(model.dim()));
    if (samples.rows() < 2) throw ConfigError("test needs at least 2 rows");
    for (Eigen::Index r = 0; r < samples.rows(); ++r)
        if (!model.domain().contains(samples.row(r).transpose()))
            throw DomainError("point outside " + model.domain().describe(), r);
    RngStream aux_rng(config.seed, ~std::uint64_t{0});
    const json aux_json = config.aux.is_null() ? json{{"aux", "one"}} : config.aux;
    const SteinKernelSpec spec(model, config.kernel.resolve(samples), aux_from_json(aux_json, model, aux_rng));
    if (gram_out) *gram_out = gram_matrix(spec, samples, threads);
    return ksd_test(spec, samples, config.alpha, config.B, config.seed, threads);
}

SampleMatrix run_sample(const ExperimentConfig &config) {
    if (config.model.is_null()) throw ConfigError("sample needs a \"model\"");
    if (config.n.empty()) throw ConfigError("sample needs \"n\"");
    RngStream rng(config.seed, 0);
    return sample_from_model_json(config.model, config.n.front(), rng);
}

nlohmann::ordered_json run_verify(const ExperimentConfig &config, bool &all_ok) {
    verify::SuiteOptions options;
    options.checks = config.checks;
    options.negative_control = config.negative_control;
    options.seed = config.seed;
    const auto results = verify::run_suite(options);
    nlohmann::ordered_json report = nlohmann::ordered_json::array();
    all_ok = true;
    for (const auto &r : results) {
        nlohmann::ordered_json entry;
        entry["check_name"] = r.name;
        entry["value"] = r.value;
        entry["tolerance"] = r.tolerance;
        entry["pass"] = r.pass;
        entry["expected_fail"] = r.expected_fail;
        report.push_back(entry);
        all_ok = all_ok && r.ok();
    }
    return report;
}

}  // namespace sfksd
