// Full pipeline exercise on a synthetic handwritten-digit stand-in corpus:
// IDX bytes -> parser -> filter -> downscale -> normalize -> train ->
// evaluate -> verify. This is not the MNIST acceptance criterion (that one
// requires the real dataset); it proves the training loop and the
// verification plumbing end to end at the same scale.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "qrobust/mnist.hpp"
#include "qrobust/training.hpp"
#include "qrobust/verifier.hpp"
#include "support/synthetic_digits.hpp"

using namespace qrobust;
namespace fs = std::filesystem;

TEST_CASE("synthetic 500/200 corpus trains to >= 90% and verifies") {
    const fs::path dir =
        fs::temp_directory_path() /
        ("qrobust_pipeline_" + std::to_string(::getpid()));
    fs::create_directories(dir);

    const std::vector<RawImage> images = testing::synth_dataset(2026, 700);
    testing::write_idx_pair(dir.string(), images);

    const std::vector<RawImage> parsed =
        load_idx((dir / "train-images-idx3-ubyte").string(),
                 (dir / "train-labels-idx1-ubyte").string());
    std::vector<EncodedSample> samples;
    for (const RawImage& img : filter_binary(parsed)) {
        samples.push_back(to_sample(downscale_16(img), img.label));
    }
    REQUIRE(samples.size() == 700);

    const std::span<const EncodedSample> train_set(samples.data(), 500);
    const std::span<const EncodedSample> test_set(samples.data() + 500, 200);
    const QcnnArchitecture arch = build_qcnn(8, 3);

    TrainConfig config;  // library defaults, seed 7
    const TrainResult result = train(arch, train_set, test_set, config);
    REQUIRE(result.history.size() == 20);
    CHECK(result.history.back().loss < result.history.front().loss);

    const Evaluation eval = evaluate(arch, result.theta, test_set, {0.0});
    CHECK(eval.accuracy_all >= 0.90);

    // a trained classifier puts a class-0 test input into the p0 > p1 regime
    const RealizedQcnn model = realize(arch, result.theta);
    int zeros_checked = 0;
    for (const EncodedSample& sample : test_set) {
        if (sample.label != 0 || zeros_checked >= 5) continue;
        const Probs p = forward(model, amplitude_encode(sample.features));
        CHECK(p.p0 > p.p1);
        ++zeros_checked;
    }
    CHECK(zeros_checked == 5);

    // certificates over the first test samples: classified rows carry a
    // positive bound, and the minimum is reported
    const VerifierConfig vconfig{0.0, 8};
    const VerificationReport report = verify_dataset(
        std::span(test_set.data(), 50), model, vconfig);
    CHECK(report.rows.size() == 50);
    CHECK(report.zero_count + report.one_count + report.unclassified_count == 50);
    if (report.min_delta) {
        CHECK(*report.min_delta > 0.0);
    }

    fs::remove_all(dir);
}
