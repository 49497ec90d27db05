#pragma once

#include "sfksd/config.hpp"
#include "sfksd/gof.hpp"

#include <json.hpp>

#include <functional>
#include <string>
#include <vector>

namespace sfksd {

/// One cell of a power or type-I table.
struct PowerRow {
    std::string setting;
    std::string method;
    double nu = 0.0;
    std::size_t n = 0;
    std::size_t trials = 0;
    std::size_t rejections = 0;
    double rejection_rate = 0.0;
    double mc_stderr = 0.0;

    bool operator==(const PowerRow &) const = default;
};

/// Null model and nu-perturbed alternative sampler of a built-in setting.
struct PowerSetting {
    std::string name;
    DensityModel null_model;
    nlohmann::json null_spec;  // model JSON of the null, for MMD reference draws
    std::function<SampleMatrix(double nu, std::size_t n, RngStream &rng)> sample_alternative;
    std::vector<MethodSpec> default_methods;
};

/// truncated_gaussian (dim-ball, Sigma_nu), truncated_mixture (means +-e1,
/// shared Sigma_nu) or dirichlet (dim parts, alpha = 0.5, alpha_1 = 0.5 + nu).
PowerSetting make_power_setting(const std::string &name, int dim);

/// For each nu x n x method cell, `trials` seeded repetitions of: draw n
/// alternative samples, run the method against the nu = 0 null, count
/// rejections. Trial t of cell c consumes stream (seed, c * 2^32 + t); all
/// methods see the same draws. Output does not depend on `threads`.
std::vector<PowerRow> run_power(const ExperimentConfig &config, unsigned threads);

/// run_power with nu forced to {0}.
std::vector<PowerRow> run_type1(const ExperimentConfig &config, unsigned threads);

std::string power_csv(const std::vector<PowerRow> &rows);
std::vector<PowerRow> parse_power_csv(const std::string &text);

/// ksd_test of the configured model/aux/kernel on user data. Rows outside
/// the model's domain raise DomainError naming the row. When gram_out is
/// given it receives the Stein Gram matrix.
TestResult run_test(const ExperimentConfig &config, const SampleMatrix &samples, unsigned threads,
                    Matrix *gram_out = nullptr);

/// Draws config.n[0] points from config.model.
SampleMatrix run_sample(const ExperimentConfig &config);

/// Verification suite report; `all_ok` is false iff some check did not
/// behave as expected.
nlohmann::ordered_json run_verify(const ExperimentConfig &config, bool &all_ok);

}  // namespace sfksd
