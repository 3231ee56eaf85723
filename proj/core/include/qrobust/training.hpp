// training.hpp
// Desk-scale trainer for the QCNN: softmax cross-entropy on the measured
// (p0, p1), parameter-shift gradients (finite differences for the controlled
// rotations), Adam, and a seeded epoch loop.

#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "qrobust/classifier.hpp"
#include "qrobust/sample.hpp"

namespace qrobust {

struct TrainConfig {
    double learning_rate = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_epsilon = 1e-8;
    int epochs = 20;
    int batch_size = 32;
    std::uint64_t seed = 7;

    void validate() const;
};

struct AdamState {
    std::vector<double> m;  // first-moment estimate
    std::vector<double> v;  // second-moment estimate
    long step = 0;

    static AdamState zeros(std::size_t param_count);
};

// Softmax cross entropy with (p0, p1) as the two logits, against the one-hot
// label. ln 2 at p0 = p1 regardless of label.
double loss(double p0, double p1, int label);

// d loss / d theta = loss_grad_p0(...) * d p0 / d theta for pipelines where
// p1 = 1 - p0.
double loss_grad_p0(double p0, double p1, int label);

// Mean gradient of loss over the batch. Single-qubit rotations use the
// parameter-shift rule per gate occurrence (shared parameters sum their
// occurrences); controlled-rotation parameters fall back to central finite
// differences (h = 1e-5) on p0. Both are chained with the analytic loss
// derivative.
std::vector<double> gradient(const QcnnArchitecture& arch,
                             std::span<const double> theta,
                             std::span<const EncodedSample> batch);

// Standard Adam update with bias correction. Mutates `state` (moments and
// step counter) and returns the parameter delta to add to theta.
std::vector<double> adam_step(AdamState& state, std::span<const double> grad,
                              const TrainConfig& config);

struct EpochStats {
    int epoch = 0;          // 1-based
    double loss = 0.0;      // mean training loss at end of epoch
    double train_accuracy = 0.0;
    double test_accuracy = 0.0;  // NaN when no test set was given
};

struct TrainResult {
    std::vector<double> theta;
    std::vector<EpochStats> history;
};

// Deterministic given config.seed and the dataset order: initialization
// (uniform on (-pi, pi)), shuffling and batching are all driven by the seed.
TrainResult train(const QcnnArchitecture& arch,
                  std::span<const EncodedSample> train_set,
                  std::span<const EncodedSample> test_set,
                  const TrainConfig& config);

struct Evaluation {
    int correct = 0;
    int wrong = 0;
    int unknown_count = 0;
    // [true label][predicted zero/one/unknown]
    int confusion[2][3] = {{0, 0, 0}, {0, 0, 0}};
    std::optional<double> accuracy_classified;  // absent when all unknown
    double accuracy_all = 0.0;
    double coverage = 0.0;  // classified / total
};

Evaluation evaluate(const QcnnArchitecture& arch, std::span<const double> theta,
                    std::span<const EncodedSample> dataset,
                    const ClassificationPolicy& policy);

// Columns: epoch,loss,train_acc,test_acc (test_acc empty when unavailable).
void write_history_csv(std::ostream& out, std::span<const EpochStats> history);

}  // namespace qrobust
