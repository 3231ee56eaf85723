#include "qrobust/classifier.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace qrobust {

namespace {

bool is_power_of_two(unsigned v) { return v != 0 && (v & (v - 1)) == 0; }

void check_theta_size(const QcnnArchitecture& arch,
                      std::span<const double> theta) {
    if (static_cast<int>(theta.size()) != arch.param_count) {
        throw std::invalid_argument(
            "parameter vector has length " + std::to_string(theta.size()) +
            ", architecture expects " + std::to_string(arch.param_count));
    }
}

}  // namespace

const char* to_string(Label label) {
    switch (label) {
        case Label::zero: return "0";
        case Label::one: return "1";
        case Label::unknown: return "unknown";
    }
    return "?";
}

const char* to_string(ConvBlockKind kind) {
    switch (kind) {
        case ConvBlockKind::ry_ry_cnot: return "ry_ry_cnot";
    }
    return "?";
}

Label classify(double p0, double p1, const ClassificationPolicy& policy) {
    if (policy.epsilon < 0.0 || policy.epsilon >= 1.0) {
        throw std::invalid_argument("policy epsilon must be in [0, 1), got " +
                                    std::to_string(policy.epsilon));
    }
    if (p0 < 0.0 || p0 > 1.0 || p1 < 0.0 || p1 > 1.0 ||
        std::abs(p0 + p1 - 1.0) > 1e-6) {
        throw std::invalid_argument("invalid probabilities (" +
                                    std::to_string(p0) + ", " +
                                    std::to_string(p1) + ")");
    }
    if (p0 > p1 + policy.epsilon) return Label::zero;
    if (p1 > p0 + policy.epsilon) return Label::one;
    return Label::unknown;
}

PureState amplitude_encode(std::span<const double> features) {
    if (features.empty() || !is_power_of_two(static_cast<unsigned>(features.size()))) {
        throw std::invalid_argument(
            "feature vector length must be a power of two, got " +
            std::to_string(features.size()));
    }
    double sum = 0.0;
    for (double f : features) sum += f * f;
    if (sum <= 0.0) {
        throw std::invalid_argument("cannot encode the all-zero vector");
    }
    const double inv = 1.0 / std::sqrt(sum);
    std::vector<cplx> amp;
    amp.reserve(features.size());
    for (double f : features) amp.emplace_back(f * inv, 0.0);
    const int n = std::countr_zero(features.size());
    return PureState(n, std::move(amp));
}

QcnnArchitecture build_qcnn(int n, int stages, ConvBlockKind block) {
    if (n < 2 || !is_power_of_two(static_cast<unsigned>(n))) {
        throw std::invalid_argument("qubit count must be a power of two >= 2, "
                                    "got " + std::to_string(n));
    }
    const int expected_stages = std::countr_zero(static_cast<unsigned>(n));
    if (stages != expected_stages) {
        throw std::invalid_argument(
            "stage count must be log2(n) = " + std::to_string(expected_stages) +
            " for n = " + std::to_string(n) + ", got " + std::to_string(stages));
    }

    QcnnArchitecture arch;
    arch.n = n;
    arch.block = block;

    std::vector<int> active(static_cast<std::size_t>(n));
    for (int q = 0; q < n; ++q) active[static_cast<std::size_t>(q)] = q;

    for (int s = 0; s < stages; ++s) {
        QcnnStage stage;
        const int m = static_cast<int>(active.size());
        if (m == 2) {
            stage.conv_pairs.emplace_back(active[0], active[1]);
        } else {
            // ring over the active qubits
            for (int i = 0; i < m; ++i) {
                stage.conv_pairs.emplace_back(
                    active[static_cast<std::size_t>(i)],
                    active[static_cast<std::size_t>((i + 1) % m)]);
            }
        }
        std::vector<int> survivors;
        for (int i = 0; i + 1 < m; i += 2) {
            stage.pool_pairs.push_back(
                {active[static_cast<std::size_t>(i)],
                 active[static_cast<std::size_t>(i + 1)]});
            survivors.push_back(active[static_cast<std::size_t>(i + 1)]);
        }
        active = std::move(survivors);
        arch.stages.push_back(std::move(stage));
    }

    arch.measured_qubit = active.at(0);
    // ry_ry_cnot: 2 shared conv angles + 2 shared pooling angles per stage
    arch.param_count = 4 * stages;
    return arch;
}

RealizedQcnn realize(const QcnnArchitecture& arch,
                     std::span<const double> theta) {
    check_theta_size(arch, theta);
    if (arch.block != ConvBlockKind::ry_ry_cnot) {
        throw std::invalid_argument("unsupported conv block kind");
    }
    RealizedQcnn model;
    model.circuit.n = arch.n;
    model.measured_qubit = arch.measured_qubit;

    auto push = [&model](GateOp gate, int theta_idx) {
        model.circuit.gates.push_back(gate);
        model.theta_index.push_back(theta_idx);
    };

    for (std::size_t s = 0; s < arch.stages.size(); ++s) {
        const QcnnStage& stage = arch.stages[s];
        const int base = static_cast<int>(4 * s);
        RealizedQcnn::StageSpan span;
        span.conv_begin = static_cast<int>(model.circuit.gates.size());
        for (const auto& [a, b] : stage.conv_pairs) {
            push(GateOp::ry(a, theta[base + 0]), base + 0);
            push(GateOp::ry(b, theta[base + 1]), base + 1);
            push(GateOp::cnot(a, b), -1);
        }
        span.conv_end = static_cast<int>(model.circuit.gates.size());
        span.pool_begin = span.conv_end;
        for (const PoolPair& pool : stage.pool_pairs) {
            push(GateOp::crz(pool.discarded, pool.survivor, theta[base + 2]),
                 base + 2);
            push(GateOp::crx(pool.discarded, pool.survivor, theta[base + 3]),
                 base + 3);
        }
        span.pool_end = static_cast<int>(model.circuit.gates.size());
        model.stage_spans.push_back(span);
    }
    return model;
}

Probs forward(const RealizedQcnn& model, const PureState& input) {
    PureState out = apply_circuit(input, model.circuit);
    return measure_probs(out, model.measured_qubit);
}

Probs forward(const QcnnArchitecture& arch, std::span<const double> theta,
              const PureState& input) {
    return forward(realize(arch, theta), input);
}

Probs forward_density(const RealizedQcnn& model, const DensityOperator& input) {
    DensityOperator out = apply_circuit(input, model.circuit);
    return measure_probs(out, model.measured_qubit);
}

Probs shot_estimate(const QcnnArchitecture& arch, std::span<const double> theta,
                    const PureState& input, long shots, std::uint64_t seed) {
    if (shots < 1) {
        throw std::invalid_argument("shot count must be >= 1, got " +
                                    std::to_string(shots));
    }
    const Probs exact = forward(arch, theta, input);
    Rng rng(seed);
    long zeros = 0;
    for (long s = 0; s < shots; ++s) {
        if (rng.uniform() < exact.p0) ++zeros;
    }
    const double p0_hat = static_cast<double>(zeros) / static_cast<double>(shots);
    return {p0_hat, 1.0 - p0_hat};
}

void save_model(const std::string& path, const QcnnArchitecture& arch,
                std::span<const double> theta) {
    check_theta_size(arch, theta);
    nlohmann::json j;
    j["format"] = "qrobust-model";
    j["version"] = 1;
    j["n"] = arch.n;
    j["stages"] = static_cast<int>(arch.stages.size());
    j["block"] = to_string(arch.block);
    j["measured_qubit"] = arch.measured_qubit;
    j["theta"] = std::vector<double>(theta.begin(), theta.end());
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open model file for writing: " + path);
    }
    out << j.dump(2) << '\n';
    if (!out) {
        throw std::runtime_error("failed writing model file: " + path);
    }
}

LoadedModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open model file: " + path);
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("model file " + path +
                                 " is not valid JSON: " + e.what());
    }
    if (j.value("format", "") != "qrobust-model") {
        throw std::runtime_error("model file " + path +
                                 " has unexpected format field");
    }
    if (j.value("version", 0) != 1) {
        throw std::runtime_error("model file " + path +
                                 " has unsupported version");
    }
    if (j.value("block", "") != std::string(to_string(ConvBlockKind::ry_ry_cnot))) {
        throw std::runtime_error("model file " + path +
                                 " uses unknown conv block \"" +
                                 j.value("block", "") + "\"");
    }
    LoadedModel model;
    model.arch = build_qcnn(j.at("n").get<int>(), j.at("stages").get<int>(),
                            ConvBlockKind::ry_ry_cnot);
    if (j.at("measured_qubit").get<int>() != model.arch.measured_qubit) {
        throw std::runtime_error("model file " + path +
                                 " has inconsistent measured_qubit");
    }
    model.theta = j.at("theta").get<std::vector<double>>();
    if (static_cast<int>(model.theta.size()) != model.arch.param_count) {
        throw std::runtime_error(
            "model file " + path + " has " + std::to_string(model.theta.size()) +
            " parameters, architecture expects " +
            std::to_string(model.arch.param_count));
    }
    return model;
}

}  // namespace qrobust
