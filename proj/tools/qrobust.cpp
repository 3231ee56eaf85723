// qrobust command-line tool: train a QCNN on MNIST 0/1, verify robustness of
// datasets or explicit probability rows, and run the library self-checks.
//
// Exit codes: 0 success, 1 property/verification failure, 2 usage or I/O
// error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qrobust/classifier.hpp"
#include "qrobust/mnist.hpp"
#include "qrobust/selftest.hpp"
#include "qrobust/training.hpp"
#include "qrobust/verifier.hpp"

namespace {

namespace fs = std::filesystem;
using namespace qrobust;

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct TrainCli {
    std::string data_dir;
    std::string out_path = "model.qrb";
    std::string history_path = "history.csv";
    std::string cache_path;  // optional preprocessed-dataset cache
    int qubits = 8;
    int train_count = 500;
    int test_count = 200;
    TrainConfig config;
};

struct VerifyCli {
    std::string model_path;
    std::string data_dir;
    std::string cache_path;
    std::vector<double> p0s;
    std::string which = "train";  // train | t10k
    int count = 0;                // 0 = all
    double epsilon = 0.0;
    int n = 8;
    std::string format = "csv";
    std::string out_path;  // empty = stdout
    bool full_precision = false;
    long shots = 0;  // 0 = exact forward pass
    std::uint64_t seed = 1;
};

struct SelftestCli {
    std::vector<std::string> groups;
    SelftestOptions options;
};

std::vector<EncodedSample> preprocess(const std::vector<RawImage>& raw) {
    std::vector<EncodedSample> samples;
    samples.reserve(raw.size());
    for (const RawImage& img : filter_binary(raw)) {
        samples.push_back(to_sample(downscale_16(img), img.label));
    }
    return samples;
}

std::vector<EncodedSample> load_samples(const std::string& data_dir,
                                        const std::string& which,
                                        const std::string& cache_path) {
    if (!cache_path.empty() && fs::exists(cache_path)) {
        std::cerr << "loading cached dataset " << cache_path << "\n";
        return load_cache(cache_path);
    }
    const std::string stem = which == "t10k" ? "t10k" : "train";
    const fs::path images = fs::path(data_dir) / (stem + "-images-idx3-ubyte");
    const fs::path labels = fs::path(data_dir) / (stem + "-labels-idx1-ubyte");
    for (const fs::path& p : {images, labels}) {
        if (!fs::exists(p)) {
            throw std::runtime_error("dataset file not found: " + p.string());
        }
    }
    std::vector<EncodedSample> samples =
        preprocess(load_idx(images.string(), labels.string()));
    if (!cache_path.empty()) {
        save_cache(cache_path, samples);
        std::cerr << "wrote dataset cache " << cache_path << "\n";
    }
    return samples;
}

int run_train(const TrainCli& cli) {
    if (cli.train_count < 1 || cli.test_count < 0) {
        throw std::runtime_error("train/test counts must be >= 1 / >= 0");
    }
    const std::vector<EncodedSample> all =
        load_samples(cli.data_dir, "train", cli.cache_path);
    if (static_cast<int>(all.size()) < cli.train_count + cli.test_count) {
        throw std::runtime_error(
            "dataset has only " + std::to_string(all.size()) +
            " usable 0/1 samples, need " +
            std::to_string(cli.train_count + cli.test_count));
    }
    const std::span<const EncodedSample> train_set(all.data(),
                                                   static_cast<std::size_t>(cli.train_count));
    const std::span<const EncodedSample> test_set(
        all.data() + cli.train_count, static_cast<std::size_t>(cli.test_count));

    const int stages = [&] {
        int s = 0;
        for (int v = cli.qubits; v > 1; v >>= 1) ++s;
        return s;
    }();
    const QcnnArchitecture arch = build_qcnn(cli.qubits, stages);
    const TrainResult result = train(arch, train_set, test_set, cli.config);

    save_model(cli.out_path, arch, result.theta);
    std::ofstream history(cli.history_path);
    if (!history) {
        throw std::runtime_error("cannot open history file for writing: " +
                                 cli.history_path);
    }
    write_history_csv(history, result.history);

    const Evaluation train_eval = evaluate(arch, result.theta, train_set, {0.0});
    const Evaluation test_eval = evaluate(arch, result.theta, test_set, {0.0});
    std::cout << "model written to " << cli.out_path << "\n"
              << "history written to " << cli.history_path << "\n"
              << "train accuracy: " << train_eval.accuracy_all << "\n"
              << "test accuracy:  " << test_eval.accuracy_all << "\n";
    return 0;
}

int run_verify(const VerifyCli& cli) {
    if (cli.p0s.empty() == (cli.model_path.empty())) {
        std::cerr << "verify needs exactly one of --p0 or --model\n";
        return kExitUsage;
    }

    VerificationReport report;
    bool statistical = false;
    if (!cli.p0s.empty()) {
        const VerifierConfig config{cli.epsilon, cli.n};
        report = verify_p0_batch(cli.p0s, config);
    } else {
        const LoadedModel model = load_model(cli.model_path);
        const VerifierConfig config{cli.epsilon, model.arch.n};
        std::vector<EncodedSample> samples =
            load_samples(cli.data_dir, cli.which, cli.cache_path);
        if (cli.count > 0 &&
            static_cast<std::size_t>(cli.count) < samples.size()) {
            samples.resize(static_cast<std::size_t>(cli.count));
        }
        const RealizedQcnn realized = realize(model.arch, model.theta);
        if (cli.shots > 0) {
            statistical = true;
            std::vector<double> p0s;
            p0s.reserve(samples.size());
            Rng seeds(cli.seed);
            for (const EncodedSample& sample : samples) {
                const Probs probs =
                    shot_estimate(model.arch, model.theta,
                                  amplitude_encode(sample.features), cli.shots,
                                  seeds.next_u64());
                p0s.push_back(probs.p0);
            }
            report = verify_p0_batch(p0s, config);
        } else {
            report = verify_dataset(samples, realized, config);
        }
    }

    const int digits = cli.full_precision ? 17 : 6;
    std::ostringstream body;
    if (cli.format == "json") {
        body << report_to_json(report, digits) << "\n";
    } else {
        write_report_csv(body, report, digits);
        body << "# summary: zero=" << report.zero_count
             << " one=" << report.one_count
             << " unclassifiable=" << report.unclassified_count;
        body << " min_delta=";
        if (report.min_delta) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.*g", digits, *report.min_delta);
            body << buf;
        } else {
            body << "n/a";
        }
        if (statistical) {
            body << " mode=statistical shots=" << cli.shots
                 << " seed=" << cli.seed;
        }
        body << "\n";
    }

    if (cli.out_path.empty()) {
        std::cout << body.str();
    } else {
        std::ofstream out(cli.out_path);
        if (!out) {
            throw std::runtime_error("cannot open report file for writing: " +
                                     cli.out_path);
        }
        out << body.str();
    }
    return 0;
}

int run_selftest(const SelftestCli& cli) {
    const std::vector<std::string> groups =
        cli.groups.empty() ? selftest_groups() : cli.groups;
    const std::vector<SelftestResult> results =
        run_selftest(groups, cli.options);
    bool all_passed = true;
    for (const SelftestResult& result : results) {
        if (result.passed()) {
            std::cout << "PASS " << result.group << " (" << result.checks
                      << " checks)\n";
        } else {
            all_passed = false;
            std::cout << "FAIL " << result.group << " ("
                      << result.failures.size() << " of " << result.checks
                      << " checks failed)\n";
            for (const std::string& failure : result.failures) {
                std::cout << "  - " << failure << "\n";
            }
        }
    }
    return all_passed ? 0 : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum classifier robustness toolkit"};
    app.require_subcommand(1);
    app.set_config("--config");
    app.allow_config_extras(CLI::config_extras_mode::error);

    TrainCli train_cli;
    CLI::App* train_cmd =
        app.add_subcommand("train", "train the QCNN on MNIST 0-vs-1");
    train_cmd->add_option("--data", train_cli.data_dir, "MNIST IDX directory")
        ->envname("QROBUST_DATA_DIR")
        ->required();
    train_cmd->add_option("--out", train_cli.out_path, "output model file");
    train_cmd->add_option("--history", train_cli.history_path,
                          "per-epoch history CSV");
    train_cmd->add_option("--cache", train_cli.cache_path,
                          "preprocessed dataset cache file (reused if present)");
    train_cmd->add_option("--qubits", train_cli.qubits, "qubit count (power of two)");
    train_cmd->add_option("--train-count", train_cli.train_count,
                          "training samples");
    train_cmd->add_option("--test-count", train_cli.test_count, "test samples");
    train_cmd->add_option("--seed", train_cli.config.seed, "RNG seed");
    train_cmd->add_option("--epochs", train_cli.config.epochs, "epoch count");
    train_cmd->add_option("--lr", train_cli.config.learning_rate,
                          "Adam learning rate");
    train_cmd->add_option("--batch", train_cli.config.batch_size, "batch size");
    train_cmd->add_option("--beta1", train_cli.config.beta1, "Adam beta1");
    train_cmd->add_option("--beta2", train_cli.config.beta2, "Adam beta2");
    train_cmd->add_option("--adam-eps", train_cli.config.adam_epsilon,
                          "Adam epsilon");

    VerifyCli verify_cli;
    CLI::App* verify_cmd = app.add_subcommand(
        "verify", "certify robust bounds for a dataset or explicit p0 values");
    verify_cmd->add_option("--model", verify_cli.model_path, "trained model file");
    verify_cmd->add_option("--data", verify_cli.data_dir, "MNIST IDX directory")
        ->envname("QROBUST_DATA_DIR");
    verify_cmd->add_option("--cache", verify_cli.cache_path,
                           "preprocessed dataset cache file");
    verify_cmd->add_option("--which", verify_cli.which,
                           "dataset split: train or t10k")
        ->check(CLI::IsMember({"train", "t10k"}));
    verify_cmd->add_option("--count", verify_cli.count,
                           "verify only the first N samples");
    verify_cmd->add_option("--p0", verify_cli.p0s,
                           "verify explicit p0 values instead of a dataset");
    verify_cmd->add_option("--epsilon", verify_cli.epsilon,
                           "classification policy tolerance");
    verify_cmd->add_option("--n", verify_cli.n, "qubit count for --p0 mode");
    verify_cmd->add_option("--format", verify_cli.format, "report format")
        ->check(CLI::IsMember({"csv", "json"}));
    verify_cmd->add_option("--out", verify_cli.out_path,
                           "report file (default stdout)");
    verify_cmd->add_flag("--full-precision", verify_cli.full_precision,
                         "print 17 significant digits instead of 6");
    verify_cmd->add_option("--shots", verify_cli.shots,
                           "estimate p0 from this many measurement shots "
                           "(marks the report statistical)");
    verify_cmd->add_option("--seed", verify_cli.seed, "seed for --shots mode");

    SelftestCli selftest_cli;
    CLI::App* selftest_cmd =
        app.add_subcommand("selftest", "run the reduced property suites");
    selftest_cmd->add_option("--group", selftest_cli.groups,
                             "run only these groups (default: all)");
    selftest_cmd->add_option("--seed", selftest_cli.options.seed, "RNG seed");
    selftest_cmd->add_option("--cases", selftest_cli.options.cases,
                             "random cases per property");
    selftest_cmd
        ->add_flag("--inject-failure", selftest_cli.options.inject_failure,
                   "force one failing check (harness test hook)")
        ->group("");  // hidden

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (train_cmd->parsed()) return run_train(train_cli);
        if (verify_cmd->parsed()) return run_verify(verify_cli);
        if (selftest_cmd->parsed()) return run_selftest(selftest_cli);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
