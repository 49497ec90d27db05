// sfksd: goodness-of-fit tests, experiment tables, verification suite and
// sampling from the command line.
//
// Exit codes: 0 success, 1 internal failure (or a failed verification
// check), 2 input error.

#include "sfksd/csv.hpp"
#include "sfksd/experiment.hpp"
#include "sfksd/parallel.hpp"
#include "sfksd/sampling.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>

namespace {

constexpr int kOk = 0;
constexpr int kInternal = 1;
constexpr int kInput = 2;

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    unsigned threads = 0;
    std::string out;
};

void emit(const std::string &path, const std::string &text) {
    if (path.empty()) {
        std::fwrite(text.data(), 1, text.size(), stdout);
    } else {
        sfksd::write_text_file(path, text);
    }
}

sfksd::ExperimentConfig load(const Common &c) {
    auto config = sfksd::load_config(c.config);
    if (c.seed) config.seed = *c.seed;
    return config;
}

std::string output_path(const Common &c, const sfksd::ExperimentConfig &config) {
    return c.out.empty() ? config.output : c.out;
}

unsigned threads_of(const Common &c) { return c.threads == 0 ? sfksd::default_threads() : c.threads; }

void add_common(CLI::App *sub, Common &c) {
    sub->add_option("--config", c.config, "JSON experiment config")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", c.seed, "master seed (overrides the config)");
    sub->add_option("--threads", c.threads, "worker threads (default: all cores)");
    sub->add_option("--out", c.out, "output file (default: config \"output\" or stdout)");
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Sf-KSD / bd-KSD goodness-of-fit engine"};
    app.require_subcommand(1);

    Common test_c, power_c, type1_c, verify_c, sample_c;
    std::string data_path, gram_path;

    auto *test = app.add_subcommand("test", "run a KSD test on a headerless CSV sample");
    add_common(test, test_c);
    test->add_option("--data", data_path, "CSV data, one observation per row")->required();
    test->add_option("--dump-gram", gram_path, "write the Stein Gram matrix as CSV");

    auto *power = app.add_subcommand("power", "power table over nu x n x method");
    add_common(power, power_c);
    auto *type1 = app.add_subcommand("type1", "null rejection rates over n x method");
    add_common(type1, type1_c);
    auto *verify = app.add_subcommand("verify", "run the verification suite");
    add_common(verify, verify_c);
    auto *sample = app.add_subcommand("sample", "draw samples from the configured model");
    add_common(sample, sample_c);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInput;
    }

    try {
        if (*test) {
            const auto config = load(test_c);
            const auto data = sfksd::read_sample_csv(data_path);
            sfksd::Matrix H;
            const auto result =
                sfksd::run_test(config, data, threads_of(test_c), gram_path.empty() ? nullptr : &H);
            if (!gram_path.empty()) sfksd::write_text_file(gram_path, sfksd::emit_sample_csv(H));
            emit(output_path(test_c, config), sfksd::to_json(result).dump(2) + "\n");
            return kOk;
        }
        if (*power || *type1) {
            const Common &c = *power ? power_c : type1_c;
            const auto config = load(c);
            const auto rows = *power ? sfksd::run_power(config, threads_of(c)) : sfksd::run_type1(config, threads_of(c));
            emit(output_path(c, config), sfksd::power_csv(rows));
            return kOk;
        }
        if (*verify) {
            const auto config = load(verify_c);
            bool all_ok = false;
            const auto report = sfksd::run_verify(config, all_ok);
            emit(output_path(verify_c, config), report.dump(2) + "\n");
            return all_ok ? kOk : kInternal;
        }
        if (*sample) {
            const auto config = load(sample_c);
            emit(output_path(sample_c, config), sfksd::emit_sample_csv(sfksd::run_sample(config)));
            return kOk;
        }
    } catch (const sfksd::SamplerExhausted &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInternal;
    } catch (const std::invalid_argument &e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kInput;
    } catch (const std::domain_error &e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kInput;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInternal;
    }
    return kInternal;
}
