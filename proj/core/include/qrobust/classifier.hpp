// classifier.hpp
// The quantum classifier assembly: amplitude encoder, QCNN ansatz
// (convolution + pooling stages), exact forward pass to (p0, p1), shot-based
// estimation, and the epsilon-threshold classification policy.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qrobust/gates.hpp"
#include "qrobust/sample.hpp"
#include "qrobust/state.hpp"

namespace qrobust {

enum class Label { zero, one, unknown };

const char* to_string(Label label);

struct ClassificationPolicy {
    double epsilon = 0.0;  // in [0, 1)
};

// Three-case rule on exact probabilities:
//   zero    if p0 > p1 + epsilon
//   one     if p1 > p0 + epsilon
//   unknown if |p0 - p1| <= epsilon
// Inputs must be probabilities with p0 + p1 = 1 within 1e-6.
Label classify(double p0, double p1, const ClassificationPolicy& policy);

// Normalize a length-2^n feature vector into the amplitudes of a pure state
// (basis index i carries feature i). Rejects the all-zero vector.
PureState amplitude_encode(std::span<const double> features);

enum class ConvBlockKind { ry_ry_cnot };

const char* to_string(ConvBlockKind kind);

struct PoolPair {
    int discarded = 0;  // control qubit, never used after the pooling gates
    int survivor = 0;   // target qubit, stays active
};

struct QcnnStage {
    std::vector<std::pair<int, int>> conv_pairs;  // adjacent active pairs
    std::vector<PoolPair> pool_pairs;
};

// Parameter layout (block ry_ry_cnot): 4 parameters per stage, shared by all
// blocks of that stage's layer:
//   theta[4s + 0]  RY angle on the first qubit of every conv pair
//   theta[4s + 1]  RY angle on the second qubit of every conv pair
//   theta[4s + 2]  controlled-RZ angle of every pooling pair
//   theta[4s + 3]  controlled-RX angle of every pooling pair
struct QcnnArchitecture {
    int n = 0;
    ConvBlockKind block = ConvBlockKind::ry_ry_cnot;
    std::vector<QcnnStage> stages;
    int measured_qubit = 0;
    int param_count = 0;
};

// n must be a power of two >= 2 and stages = log2(n); each stage halves the
// active qubits (8 -> 4 -> 2 -> 1 for n = 8). Convolution pairs run over
// adjacent active qubits, as a ring when 3 or more are active and as a line
// for 2. Pooling keeps the second qubit of each adjacent pair, so the last
// qubit (index n - 1) survives everything and is the measured qubit.
QcnnArchitecture build_qcnn(int n, int stages,
                            ConvBlockKind block = ConvBlockKind::ry_ry_cnot);

// A concrete circuit for one parameter vector. Pooling is realized by the
// deferred-measurement principle: the measurement-controlled unitary stays a
// coherent controlled gate and the discarded qubit is simply never touched
// again.
struct RealizedQcnn {
    Circuit circuit;
    std::vector<int> theta_index;  // per gate; -1 for non-parametric gates
    int measured_qubit = 0;

    struct StageSpan {
        int conv_begin = 0, conv_end = 0;  // [begin, end) gate indices
        int pool_begin = 0, pool_end = 0;
    };
    std::vector<StageSpan> stage_spans;
};

RealizedQcnn realize(const QcnnArchitecture& arch,
                     std::span<const double> theta);

// Exact output distribution of the measured qubit, computed from the final
// amplitudes (no sampling).
Probs forward(const RealizedQcnn& model, const PureState& input);
Probs forward(const QcnnArchitecture& arch, std::span<const double> theta,
              const PureState& input);

// Density-operator route (mixed-state inputs).
Probs forward_density(const RealizedQcnn& model, const DensityOperator& input);

// Empirical estimate from `shots` seeded single-shot measurements of the
// exact distribution; converges to forward() as shots grows.
Probs shot_estimate(const QcnnArchitecture& arch, std::span<const double> theta,
                    const PureState& input, long shots, std::uint64_t seed);

// Versioned structured text (JSON) model file; theta round-trips bit-exactly.
void save_model(const std::string& path, const QcnnArchitecture& arch,
                std::span<const double> theta);

struct LoadedModel {
    QcnnArchitecture arch;
    std::vector<double> theta;
};

LoadedModel load_model(const std::string& path);

}  // namespace qrobust
