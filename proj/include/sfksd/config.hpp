#pragma once

#include "sfksd/auxiliary.hpp"
#include "sfksd/kernel.hpp"
#include "sfksd/model.hpp"
#include "sfksd/rng.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sfksd {

/// Invalid or inconsistent configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// {"kernel": "rbf", "bandwidth": "median" | number}
struct KernelPolicy {
    std::optional<double> bandwidth_sq;  // empty = median heuristic

    SmoothKernel resolve(const SampleMatrix &samples) const;
};

struct MethodSpec {
    std::string kind;      // "ksd" or "mmd"
    std::string label;
    nlohmann::json aux;    // ksd only
};

struct ExperimentConfig {
    std::string experiment;  // test | power | type1 | verify | sample
    nlohmann::json model;
    nlohmann::json aux;
    KernelPolicy kernel;
    std::string setting;     // truncated_gaussian | truncated_mixture | dirichlet
    int dim = 3;             // ball dimension, or simplex parts for dirichlet
    std::vector<MethodSpec> methods;
    std::vector<double> nu;
    std::vector<std::size_t> n;
    std::size_t trials = 100;
    double alpha = 0.01;
    std::size_t B = 300;
    std::size_t P = 200;
    std::uint64_t seed = 0;
    std::string output;
    std::vector<std::string> checks;
    bool negative_control = true;
};

ExperimentConfig parse_config(const nlohmann::json &j);
ExperimentConfig load_config(const std::string &path);

DomainDescriptor domain_from_json(const nlohmann::json &j);
DensityModel model_from_json(const nlohmann::json &j);

/// Builds an auxiliary for `model`. density_ratio needs {"p_model": {...},
/// "normalizer_n": count}; its normaliser samples are drawn from p_model
/// with `rng`.
Auxiliary aux_from_json(const nlohmann::json &j, const DensityModel &model, RngStream &rng);

KernelPolicy kernel_from_json(const nlohmann::json &j);

/// Draws n points from the model described by the JSON spec: Gaussian and
/// mixture families by rejection onto their domain, Dirichlet directly.
SampleMatrix sample_from_model_json(const nlohmann::json &j, std::size_t n, RngStream &rng);

}  // namespace sfksd
