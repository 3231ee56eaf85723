#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "qrobust/training.hpp"

using namespace qrobust;

namespace {

constexpr double kPi = 3.14159265358979323846;

EncodedSample normalized_sample(std::vector<double> features, int label) {
    double norm = 0.0;
    for (double f : features) norm += f * f;
    for (double& f : features) f /= std::sqrt(norm);
    return {std::move(features), label};
}

std::vector<EncodedSample> random_batch(Rng& rng, int n, int count) {
    std::vector<EncodedSample> batch;
    const std::size_t dim = std::size_t{1} << n;
    for (int i = 0; i < count; ++i) {
        std::vector<double> f(dim);
        for (double& x : f) x = rng.uniform(0.05, 1.0);
        batch.push_back(normalized_sample(std::move(f),
                                          static_cast<int>(rng.index(2))));
    }
    return batch;
}

}  // namespace

TEST_CASE("softmax cross entropy on the named inputs") {
    CHECK(loss(0.5, 0.5, 0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(loss(0.5, 0.5, 1) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    // logits (1, 0): -log softmax_0 = log(1 + e^-1)
    CHECK(loss(1.0, 0.0, 0) ==
          doctest::Approx(std::log(1.0 + std::exp(-1.0))).epsilon(1e-12));
    CHECK(loss(0.2, 0.8, 0) == doctest::Approx(loss(0.8, 0.2, 1)).epsilon(1e-15));
    CHECK(loss(0.9, 0.1, 1) > loss(0.9, 0.1, 0));
    CHECK(loss(0.3, 0.7, 1) >= 0.0);
    CHECK_THROWS_AS(loss(0.5, 0.5, 2), std::invalid_argument);
}

TEST_CASE("analytic loss derivative matches finite differences") {
    Rng rng(12);
    for (int trial = 0; trial < 50; ++trial) {
        const double p0 = rng.uniform(0.01, 0.99);
        const int label = static_cast<int>(rng.index(2));
        const double h = 1e-6;
        const double fd =
            (loss(p0 + h, 1.0 - (p0 + h), label) -
             loss(p0 - h, 1.0 - (p0 - h), label)) /
            (2.0 * h);
        CHECK(loss_grad_p0(p0, 1.0 - p0, label) ==
              doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("the gradient vanishes on a stationary configuration") {
    // theta = 0 and input |00>: every parameter-shift pair and both pooling
    // branches evaluate to identical p0, so the gradient is exactly zero
    const QcnnArchitecture arch = build_qcnn(2, 1);
    const std::vector<double> theta(4, 0.0);
    std::vector<double> e0{1.0, 0.0, 0.0, 0.0};
    const std::vector<EncodedSample> batch{{e0, 0}};
    const std::vector<double> grad = gradient(arch, theta, batch);
    for (double g : grad) {
        CHECK(std::abs(g) < 1e-15);
    }
}

TEST_CASE("parameter-shift gradient matches loss finite differences") {
    Rng rng(2718);
    for (const int n : {2, 4}) {
        const QcnnArchitecture arch = build_qcnn(n, n == 2 ? 1 : 2);
        for (int trial = 0; trial < 12; ++trial) {
            std::vector<double> theta(static_cast<std::size_t>(arch.param_count));
            for (double& t : theta) t = rng.uniform(-kPi, kPi);
            const std::vector<EncodedSample> batch = random_batch(rng, n, 2);
            const std::vector<double> grad = gradient(arch, theta, batch);

            const double h = 1e-5;
            for (std::size_t k = 0; k < theta.size(); ++k) {
                std::vector<double> up(theta), down(theta);
                up[k] += h;
                down[k] -= h;
                double fd = 0.0;
                for (const EncodedSample& s : batch) {
                    const PureState input = amplitude_encode(s.features);
                    const Probs pu = forward(arch, up, input);
                    const Probs pd = forward(arch, down, input);
                    fd += (loss(pu.p0, pu.p1, s.label) -
                           loss(pd.p0, pd.p1, s.label)) /
                          (2.0 * h);
                }
                fd /= static_cast<double>(batch.size());
                if (std::abs(grad[k]) > 1e-8 || std::abs(fd) > 1e-8) {
                    CAPTURE(n);
                    CAPTURE(k);
                    CHECK(std::abs(grad[k] - fd) <=
                          1e-5 * std::max(1.0, std::abs(fd)));
                }
            }
        }
    }
}

TEST_CASE("a batch gradient is the mean of per-sample gradients") {
    Rng rng(99);
    const QcnnArchitecture arch = build_qcnn(2, 1);
    std::vector<double> theta(4);
    for (double& t : theta) t = rng.uniform(-kPi, kPi);
    const std::vector<EncodedSample> batch = random_batch(rng, 2, 2);

    const std::vector<double> combined = gradient(arch, theta, batch);
    const std::vector<double> first =
        gradient(arch, theta, std::span(batch.data(), 1));
    const std::vector<double> second =
        gradient(arch, theta, std::span(batch.data() + 1, 1));
    for (std::size_t k = 0; k < combined.size(); ++k) {
        CHECK(combined[k] ==
              doctest::Approx(0.5 * (first[k] + second[k])).epsilon(1e-12));
    }
    CHECK_THROWS_AS(gradient(arch, theta, {}), std::invalid_argument);
}

TEST_CASE("adam step values") {
    TrainConfig config;  // lr 0.01, beta1 0.9, beta2 0.999, eps 1e-8

    AdamState zero_state = AdamState::zeros(3);
    const std::vector<double> delta0 =
        adam_step(zero_state, std::vector<double>(3, 0.0), config);
    for (double d : delta0) CHECK(d == 0.0);
    CHECK(zero_state.step == 1);

    // hand-computed first step for grad = 1: m_hat = 1, v_hat = 1,
    // delta = -lr / (1 + eps)
    AdamState state = AdamState::zeros(1);
    const std::vector<double> delta =
        adam_step(state, std::vector<double>{1.0}, config);
    CHECK(delta[0] == doctest::Approx(-0.00999999990).epsilon(1e-9));

    // identical coordinates move identically
    AdamState pair_state = AdamState::zeros(2);
    const std::vector<double> pair =
        adam_step(pair_state, std::vector<double>{0.37, 0.37}, config);
    CHECK(pair[0] == pair[1]);

    CHECK_THROWS_AS(adam_step(state, std::vector<double>{1.0, 2.0}, config),
                    std::invalid_argument);
}

TEST_CASE("training is deterministic and seeded") {
    Rng rng(42);
    const QcnnArchitecture arch = build_qcnn(2, 1);
    const std::vector<EncodedSample> data = random_batch(rng, 2, 24);
    TrainConfig config;
    config.epochs = 3;
    config.batch_size = 8;
    config.seed = 1234;

    const TrainResult a = train(arch, data, {}, config);
    const TrainResult b = train(arch, data, {}, config);
    REQUIRE(a.history.size() == 3);
    REQUIRE(b.history.size() == 3);
    for (std::size_t e = 0; e < a.history.size(); ++e) {
        CHECK(a.history[e].loss == b.history[e].loss);
        CHECK(a.history[e].train_accuracy == b.history[e].train_accuracy);
        CHECK(std::isnan(a.history[e].test_accuracy));
    }
    for (std::size_t k = 0; k < a.theta.size(); ++k) {
        CHECK(a.theta[k] == b.theta[k]);
    }

    config.seed = 99;
    const TrainResult c = train(arch, data, {}, config);
    bool different = false;
    for (std::size_t k = 0; k < a.theta.size(); ++k) {
        if (a.theta[k] != c.theta[k]) different = true;
    }
    CHECK(different);
}

TEST_CASE("zero epochs returns the seeded initialization unchanged") {
    Rng rng(5);
    const QcnnArchitecture arch = build_qcnn(2, 1);
    const std::vector<EncodedSample> data = random_batch(rng, 2, 8);
    TrainConfig config;
    config.epochs = 0;
    config.seed = 777;
    const TrainResult init = train(arch, data, {}, config);
    CHECK(init.history.empty());

    // a zero learning rate trains for an epoch without moving anything
    config.epochs = 1;
    config.learning_rate = 0.0;
    const TrainResult frozen = train(arch, data, {}, config);
    REQUIRE(frozen.history.size() == 1);
    for (std::size_t k = 0; k < init.theta.size(); ++k) {
        CHECK(frozen.theta[k] == init.theta[k]);
    }

    config.learning_rate = -0.01;
    CHECK_THROWS_AS(train(arch, data, {}, config), std::invalid_argument);
    config.learning_rate = 0.01;
    CHECK_THROWS_AS(train(arch, {}, {}, config), std::invalid_argument);
}

TEST_CASE("training loss decreases on a separable toy problem") {
    Rng rng(31415);
    const QcnnArchitecture arch = build_qcnn(2, 1);
    std::vector<EncodedSample> data;
    for (int i = 0; i < 16; ++i) {
        // class 0 concentrated on low indices, class 1 on high ones
        std::vector<double> f(4);
        if (i % 2 == 0) {
            f = {rng.uniform(0.8, 1.0), rng.uniform(0.0, 0.2),
                 rng.uniform(0.0, 0.2), rng.uniform(0.0, 0.1)};
        } else {
            f = {rng.uniform(0.0, 0.1), rng.uniform(0.0, 0.2),
                 rng.uniform(0.0, 0.2), rng.uniform(0.8, 1.0)};
        }
        data.push_back(normalized_sample(std::move(f), i % 2));
    }
    TrainConfig config;
    config.epochs = 40;
    config.batch_size = 4;
    config.seed = 7;
    const TrainResult result = train(arch, data, {}, config);
    CHECK(result.history.back().loss < result.history.front().loss);
    CHECK(result.history.back().train_accuracy >= 0.9);
}

TEST_CASE("evaluation counts and accuracies") {
    // theta = 0 tabulates exactly: |00> -> zero, |01> -> one, |10> -> one,
    // |11> -> zero, and |+0> forwards to a Bell pair (p0 = 1/2, unknown)
    const QcnnArchitecture arch = build_qcnn(2, 1);
    const std::vector<double> theta(4, 0.0);

    std::vector<EncodedSample> data;
    data.push_back(normalized_sample({1, 0, 0, 0}, 0));  // correct
    data.push_back(normalized_sample({0, 1, 0, 0}, 1));  // correct
    data.push_back(normalized_sample({0, 0, 1, 0}, 1));  // correct
    data.push_back(normalized_sample({0, 0, 0, 1}, 1));  // wrong (predicts 0)
    data.push_back(normalized_sample({1, 0, 1, 0}, 0));  // unknown

    const Evaluation eval = evaluate(arch, theta, data, {0.0});
    CHECK(eval.correct == 3);
    CHECK(eval.wrong == 1);
    CHECK(eval.unknown_count == 1);
    REQUIRE(eval.accuracy_classified.has_value());
    CHECK(*eval.accuracy_classified == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(eval.accuracy_all == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(eval.coverage == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(eval.confusion[0][0] == 1);
    CHECK(eval.confusion[0][2] == 1);
    CHECK(eval.confusion[1][0] == 1);
    CHECK(eval.confusion[1][1] == 2);

    // all predictions correct
    const Evaluation perfect =
        evaluate(arch, theta, std::span(data.data(), 3), {0.0});
    CHECK(perfect.accuracy_all == 1.0);
    REQUIRE(perfect.accuracy_classified.has_value());
    CHECK(*perfect.accuracy_classified == 1.0);

    // all unknown: classified accuracy is absent, coverage 0
    const Evaluation opaque =
        evaluate(arch, theta, std::span(data.data() + 4, 1), {0.0});
    CHECK_FALSE(opaque.accuracy_classified.has_value());
    CHECK(opaque.coverage == 0.0);
    CHECK(opaque.accuracy_all == 0.0);
}

TEST_CASE("history CSV layout") {
    std::vector<EpochStats> history;
    history.push_back({1, 0.6931, 0.5, 0.5});
    history.push_back({2, 0.5, 0.75,
                       std::numeric_limits<double>::quiet_NaN()});
    std::ostringstream out;
    write_history_csv(out, history);
    const std::string text = out.str();
    CHECK(text.find("epoch,loss,train_acc,test_acc\n") == 0);
    CHECK(text.find("1,0.69310000000000005,0.5,0.5\n") != std::string::npos);
    CHECK(text.find("2,0.5,0.75,\n") != std::string::npos);
}
