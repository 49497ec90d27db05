#include "sfksd/config.hpp"

#include "sfksd/csv.hpp"
#include "sfksd/sampling.hpp"

#include <cmath>

namespace sfksd {

using nlohmann::json;

namespace {

const json &require(const json &j, const char *key, const std::string &where) {
    if (!j.is_object() || !j.contains(key)) throw ConfigError(where + ": missing \"" + key + "\"");
    return j.at(key);
}

double number(const json &j, const std::string &what) {
    if (!j.is_number()) throw ConfigError(what + " must be a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(what + " must be finite");
    return v;
}

Vector vector_from(const json &j, const std::string &what) {
    if (!j.is_array() || j.empty()) throw ConfigError(what + " must be a non-empty array");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = number(j[i], what);
    return v;
}

Matrix matrix_from(const json &j, const std::string &what) {
    if (!j.is_array() || j.empty()) throw ConfigError(what + " must be a non-empty array of rows");
    const auto rows = j.size();
    Matrix m;
    for (std::size_t r = 0; r < rows; ++r) {
        const Vector row = vector_from(j[r], what);
        if (r == 0) m.resize(static_cast<Eigen::Index>(rows), row.size());
        if (row.size() != m.cols()) throw ConfigError(what + " rows differ in length");
        m.row(static_cast<Eigen::Index>(r)) = row.transpose();
    }
    return m;
}

std::size_t count(const json &j, const std::string &what) {
    if (!j.is_number_integer() && !j.is_number_unsigned()) throw ConfigError(what + " must be an integer");
    const auto v = j.get<long long>();
    if (v < 0) throw ConfigError(what + " must be non-negative");
    return static_cast<std::size_t>(v);
}

struct MixtureParams {
    std::vector<double> weights;
    std::vector<Vector> means;
    std::vector<Matrix> covs;
};

MixtureParams mixture_params(const json &j) {
    MixtureParams p;
    const std::string family = require(j, "family", "model").get<std::string>();
    if (family == "gaussian") {
        p.weights = {1.0};
        p.means = {vector_from(require(j, "mean", "model"), "mean")};
        p.covs = {matrix_from(require(j, "covariance", "model"), "covariance")};
    } else {
        const Vector w = vector_from(require(j, "weights", "model"), "weights");
        p.weights.assign(w.data(), w.data() + w.size());
        const auto &means = require(j, "means", "model");
        const auto &covs = require(j, "covariances", "model");
        if (!means.is_array() || !covs.is_array()) throw ConfigError("means and covariances must be arrays");
        for (const auto &m : means) p.means.push_back(vector_from(m, "means"));
        for (const auto &c : covs) p.covs.push_back(matrix_from(c, "covariances"));
    }
    return p;
}

}  // namespace

SmoothKernel KernelPolicy::resolve(const SampleMatrix &samples) const {
    return rbf(bandwidth_sq ? *bandwidth_sq : median_heuristic(samples));
}

DomainDescriptor domain_from_json(const json &j) {
    const std::string kind = require(j, "kind", "domain").get<std::string>();
    if (kind == "full_space") return DomainDescriptor::full_space(static_cast<int>(count(require(j, "dim", "domain"), "dim")));
    if (kind == "box")
        return DomainDescriptor::box(vector_from(require(j, "lower", "domain"), "lower"),
                                     vector_from(require(j, "upper", "domain"), "upper"));
    if (kind == "unit_ball") {
        const double radius = j.contains("radius") ? number(j.at("radius"), "radius") : 1.0;
        return DomainDescriptor::unit_ball(static_cast<int>(count(require(j, "dim", "domain"), "dim")), radius);
    }
    if (kind == "simplex") return DomainDescriptor::simplex_chart(static_cast<int>(count(require(j, "parts", "domain"), "parts")));
    throw ConfigError("unknown domain kind: " + kind);
}

DensityModel model_from_json(const json &j) {
    try {
        const std::string family = require(j, "family", "model").get<std::string>();
        if (family == "dirichlet") return make_dirichlet_chart(vector_from(require(j, "alpha", "model"), "alpha"));
        if (family != "gaussian" && family != "gaussian_mixture") throw ConfigError("unknown model family: " + family);
        const auto p = mixture_params(j);
        const int dim = static_cast<int>(p.means.front().size());
        const auto domain = j.contains("domain") ? domain_from_json(j.at("domain")) : DomainDescriptor::full_space(dim);
        if (family == "gaussian") return make_gaussian(p.means.front(), p.covs.front(), domain);
        return make_gaussian_mixture(p.weights, p.means, p.covs, domain);
    } catch (const json::exception &e) {
        throw ConfigError(std::string("model: ") + e.what());
    }
}

SampleMatrix sample_from_model_json(const json &j, std::size_t n, RngStream &rng) {
    const std::string family = require(j, "family", "model").get<std::string>();
    if (family == "dirichlet") return sample_dirichlet(vector_from(require(j, "alpha", "model"), "alpha"), n, rng);
    const DensityModel model = model_from_json(j);
    const auto p = mixture_params(j);
    if (!model.domain().compact()) return sample_gaussian_mixture(p.weights, p.means, p.covs, n, rng);
    const auto proposal = gaussian_mixture_proposal(p.weights, p.means, p.covs);
    return rejection_sample(model.domain(), proposal, n, 1000 * n + 10000, rng).samples;
}

Auxiliary aux_from_json(const json &j, const DensityModel &model, RngStream &rng) {
    try {
        const std::string name = require(j, "aux", "aux").get<std::string>();
        const int dim = model.dim();
        const bool simplex = model.domain().kind() == DomainKind::SimplexChart;
        auto need_simplex = [&] {
            if (!simplex) throw ConfigError("aux \"" + name + "\" needs a simplex model");
        };
        if (name == "one") return aux_constant_one(dim);
        if (name == "ball_power") return aux_ball_power(number(require(j, "p", "aux"), "p"), dim);
        if (name == "geomean") return need_simplex(), aux_simplex_geomean(dim + 1);
        if (name == "mindist") return need_simplex(), aux_simplex_mindist(dim + 1);
        if (name == "mirror") return need_simplex(), aux_mirror_negentropy(dim + 1);
        if (name == "density_ratio") {
            const json &pj = require(j, "p_model", "aux");
            const DensityModel p_model = model_from_json(pj);
            const std::size_t nn = j.contains("normalizer_n") ? count(j.at("normalizer_n"), "normalizer_n") : 1000;
            return aux_density_ratio(model, p_model, sample_from_model_json(pj, nn, rng));
        }
        throw ConfigError("unknown aux: " + name);
    } catch (const json::exception &e) {
        throw ConfigError(std::string("aux: ") + e.what());
    }
}

KernelPolicy kernel_from_json(const json &j) {
    KernelPolicy policy;
    if (j.is_null()) return policy;
    if (j.contains("kernel") && j.at("kernel") != "rbf") throw ConfigError("only the rbf kernel is supported");
    if (j.contains("bandwidth")) {
        const auto &bw = j.at("bandwidth");
        if (bw.is_string()) {
            if (bw != "median") throw ConfigError("bandwidth must be \"median\" or a positive number");
        } else {
            const double v = number(bw, "bandwidth");
            if (!(v > 0.0)) throw ConfigError("bandwidth must be positive");
            policy.bandwidth_sq = v;
        }
    }
    return policy;
}

ExperimentConfig parse_config(const json &j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    ExperimentConfig c;
    try {
        c.experiment = j.value("experiment", "");
        if (j.contains("model")) c.model = j.at("model");
        if (j.contains("aux")) c.aux = j.at("aux");
        if (j.contains("kernel")) c.kernel = kernel_from_json(j.at("kernel"));
        c.setting = j.value("setting", "");
        if (j.contains("dim")) c.dim = static_cast<int>(count(j.at("dim"), "dim"));
        if (j.contains("methods")) {
            for (const auto &m : j.at("methods")) {
                MethodSpec spec;
                spec.kind = require(m, "method", "methods").get<std::string>();
                if (spec.kind != "ksd" && spec.kind != "mmd") throw ConfigError("unknown method: " + spec.kind);
                if (spec.kind == "ksd") spec.aux = require(m, "aux", "methods");
                spec.label = m.value("label", spec.kind == "mmd" ? std::string("MMD") : spec.aux.value("aux", "ksd"));
                if (spec.label.find_first_of(",\n") != std::string::npos)
                    throw ConfigError("method labels may not contain commas or newlines");
                c.methods.push_back(std::move(spec));
            }
        }
        if (j.contains("nu")) {
            for (const auto &v : j.at("nu")) c.nu.push_back(number(v, "nu"));
        }
        if (j.contains("n")) {
            const auto &nj = j.at("n");
            if (nj.is_array()) {
                for (const auto &v : nj) c.n.push_back(count(v, "n"));
            } else {
                c.n.push_back(count(nj, "n"));
            }
        }
        if (j.contains("trials")) c.trials = count(j.at("trials"), "trials");
        if (j.contains("alpha")) c.alpha = number(j.at("alpha"), "alpha");
        if (j.contains("B")) c.B = count(j.at("B"), "B");
        if (j.contains("P")) c.P = count(j.at("P"), "P");
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
        c.output = j.value("output", "");
        if (j.contains("checks")) c.checks = j.at("checks").get<std::vector<std::string>>();
        c.negative_control = j.value("negative_control", true);
    } catch (const json::exception &e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (c.trials < 1) throw ConfigError("trials must be >= 1");
    if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw ConfigError("alpha must be in (0, 1)");
    if (c.B < 1) throw ConfigError("B must be >= 1");
    if (c.P < 1) throw ConfigError("P must be >= 1");
    return c;
}

ExperimentConfig load_config(const std::string &path) {
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::parse_error &e) {
        throw ConfigError("cannot parse " + path + ": " + e.what());
    }
    return parse_config(j);
}

}  // namespace sfksd
