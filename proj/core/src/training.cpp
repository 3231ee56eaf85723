#include "qrobust/training.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace qrobust {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kShiftStep = kPi / 2.0;  // parameter-shift offset
constexpr double kFdStep = 1e-5;          // central-difference step

void check_label(int label) {
    if (label != 0 && label != 1) {
        throw std::invalid_argument("label must be 0 or 1, got " +
                                    std::to_string(label));
    }
}

double softmax0(double z0, double z1) {
    // numerically stable softmax component for logit z0
    const double m = std::max(z0, z1);
    const double e0 = std::exp(z0 - m);
    const double e1 = std::exp(z1 - m);
    return e0 / (e0 + e1);
}

// p0 with one gate's angle offset (parameter-shift evaluations)
double forward_p0_shifted(const RealizedQcnn& model, const PureState& input,
                          std::size_t gate_idx, double offset) {
    PureState state = input;
    for (std::size_t g = 0; g < model.circuit.gates.size(); ++g) {
        GateOp gate = model.circuit.gates[g];
        if (g == gate_idx) *gate.angle += offset;
        state = apply_gate(std::move(state), gate);
    }
    return measure_probs(state, model.measured_qubit).p0;
}

}  // namespace

void TrainConfig::validate() const {
    // zero is a valid no-op rate (parameters provably stay put)
    if (learning_rate < 0.0) {
        throw std::invalid_argument("learning rate must be >= 0");
    }
    if (beta1 <= 0.0 || beta1 >= 1.0 || beta2 <= 0.0 || beta2 >= 1.0) {
        throw std::invalid_argument("Adam betas must lie in (0, 1)");
    }
    if (adam_epsilon <= 0.0) {
        throw std::invalid_argument("Adam epsilon must be > 0");
    }
    if (epochs < 0) {
        throw std::invalid_argument("epoch count must be >= 0");
    }
    if (batch_size < 1) {
        throw std::invalid_argument("batch size must be >= 1");
    }
}

AdamState AdamState::zeros(std::size_t param_count) {
    AdamState state;
    state.m.assign(param_count, 0.0);
    state.v.assign(param_count, 0.0);
    state.step = 0;
    return state;
}

double loss(double p0, double p1, int label) {
    check_label(label);
    const double s = softmax0(p0, p1);  // probability assigned to class 0
    const double p_label = label == 0 ? s : 1.0 - s;
    return -std::log(std::max(p_label, 1e-300));
}

double loss_grad_p0(double p0, double p1, int label) {
    check_label(label);
    const double s = softmax0(p0, p1);
    const double y0 = label == 0 ? 1.0 : 0.0;
    // d loss / d p0 with p1 = 1 - p0 folded in
    return 2.0 * (s - y0);
}

std::vector<double> gradient(const QcnnArchitecture& arch,
                             std::span<const double> theta,
                             std::span<const EncodedSample> batch) {
    if (batch.empty()) {
        throw std::invalid_argument("empty batch");
    }
    const std::size_t params = theta.size();
    std::vector<double> total(params, 0.0);
    const RealizedQcnn model = realize(arch, theta);

    // shared parameters used by controlled rotations get finite differences;
    // plain rotations get the two-point shift rule per occurrence
    std::vector<bool> fd_param(params, false);
    for (std::size_t g = 0; g < model.circuit.gates.size(); ++g) {
        const int k = model.theta_index[g];
        const GateKind kind = model.circuit.gates[g].kind;
        if (k >= 0 && is_controlled(kind)) {
            fd_param[static_cast<std::size_t>(k)] = true;
        }
    }

    std::vector<double> theta_lo(theta.begin(), theta.end());
    std::vector<double> theta_hi(theta.begin(), theta.end());

    for (const EncodedSample& sample : batch) {
        check_label(sample.label);
        const PureState input = amplitude_encode(sample.features);
        const Probs base = forward(model, input);
        const double chain = loss_grad_p0(base.p0, base.p1, sample.label);

        std::vector<double> dp0(params, 0.0);
        for (std::size_t g = 0; g < model.circuit.gates.size(); ++g) {
            const int k = model.theta_index[g];
            if (k < 0 || fd_param[static_cast<std::size_t>(k)]) continue;
            const double hi = forward_p0_shifted(model, input, g, kShiftStep);
            const double lo = forward_p0_shifted(model, input, g, -kShiftStep);
            dp0[static_cast<std::size_t>(k)] += (hi - lo) / 2.0;
        }
        for (std::size_t k = 0; k < params; ++k) {
            if (!fd_param[k]) continue;
            theta_hi[k] = theta[k] + kFdStep;
            theta_lo[k] = theta[k] - kFdStep;
            const double hi = forward(arch, theta_hi, input).p0;
            const double lo = forward(arch, theta_lo, input).p0;
            theta_hi[k] = theta[k];
            theta_lo[k] = theta[k];
            dp0[k] = (hi - lo) / (2.0 * kFdStep);
        }
        for (std::size_t k = 0; k < params; ++k) {
            total[k] += chain * dp0[k];
        }
    }

    const double inv = 1.0 / static_cast<double>(batch.size());
    for (double& g : total) g *= inv;
    return total;
}

std::vector<double> adam_step(AdamState& state, std::span<const double> grad,
                              const TrainConfig& config) {
    if (grad.size() != state.m.size() || grad.size() != state.v.size()) {
        throw std::invalid_argument(
            "gradient has length " + std::to_string(grad.size()) +
            ", optimizer state has " + std::to_string(state.m.size()));
    }
    ++state.step;
    const double bc1 = 1.0 - std::pow(config.beta1, state.step);
    const double bc2 = 1.0 - std::pow(config.beta2, state.step);
    std::vector<double> delta(grad.size());
    for (std::size_t k = 0; k < grad.size(); ++k) {
        state.m[k] = config.beta1 * state.m[k] + (1.0 - config.beta1) * grad[k];
        state.v[k] =
            config.beta2 * state.v[k] + (1.0 - config.beta2) * grad[k] * grad[k];
        const double m_hat = state.m[k] / bc1;
        const double v_hat = state.v[k] / bc2;
        delta[k] = -config.learning_rate * m_hat /
                   (std::sqrt(v_hat) + config.adam_epsilon);
    }
    return delta;
}

TrainResult train(const QcnnArchitecture& arch,
                  std::span<const EncodedSample> train_set,
                  std::span<const EncodedSample> test_set,
                  const TrainConfig& config) {
    config.validate();
    if (train_set.empty()) {
        throw std::invalid_argument("empty training set");
    }
    for (const EncodedSample& s : train_set) check_label(s.label);

    Rng rng(config.seed);
    TrainResult result;
    result.theta.resize(static_cast<std::size_t>(arch.param_count));
    for (double& t : result.theta) t = rng.uniform(-kPi, kPi);

    AdamState adam = AdamState::zeros(result.theta.size());
    std::vector<std::size_t> order(train_set.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    std::vector<EncodedSample> batch;
    batch.reserve(static_cast<std::size_t>(config.batch_size));

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(config.batch_size)) {
            batch.clear();
            const std::size_t end =
                std::min(order.size(),
                         start + static_cast<std::size_t>(config.batch_size));
            for (std::size_t i = start; i < end; ++i) {
                batch.push_back(train_set[order[i]]);
            }
            const std::vector<double> grad = gradient(arch, result.theta, batch);
            const std::vector<double> delta = adam_step(adam, grad, config);
            for (std::size_t k = 0; k < result.theta.size(); ++k) {
                result.theta[k] += delta[k];
            }
        }

        EpochStats stats;
        stats.epoch = epoch;
        const RealizedQcnn model = realize(arch, result.theta);
        double loss_sum = 0.0;
        for (const EncodedSample& s : train_set) {
            const Probs p = forward(model, amplitude_encode(s.features));
            loss_sum += loss(p.p0, p.p1, s.label);
        }
        stats.loss = loss_sum / static_cast<double>(train_set.size());
        stats.train_accuracy =
            evaluate(arch, result.theta, train_set, {0.0}).accuracy_all;
        stats.test_accuracy =
            test_set.empty()
                ? std::numeric_limits<double>::quiet_NaN()
                : evaluate(arch, result.theta, test_set, {0.0}).accuracy_all;
        result.history.push_back(stats);
    }
    return result;
}

Evaluation evaluate(const QcnnArchitecture& arch, std::span<const double> theta,
                    std::span<const EncodedSample> dataset,
                    const ClassificationPolicy& policy) {
    if (dataset.empty()) {
        throw std::invalid_argument("empty dataset");
    }
    const RealizedQcnn model = realize(arch, theta);
    Evaluation eval;
    for (const EncodedSample& sample : dataset) {
        check_label(sample.label);
        const Probs p = forward(model, amplitude_encode(sample.features));
        const Label predicted = classify(p.p0, p.p1, policy);
        const int col = predicted == Label::zero ? 0
                        : predicted == Label::one ? 1
                                                  : 2;
        ++eval.confusion[sample.label][col];
        if (predicted == Label::unknown) {
            ++eval.unknown_count;
        } else if (col == sample.label) {
            ++eval.correct;
        } else {
            ++eval.wrong;
        }
    }
    const int classified = eval.correct + eval.wrong;
    const int total = classified + eval.unknown_count;
    if (classified > 0) {
        eval.accuracy_classified =
            static_cast<double>(eval.correct) / classified;
    }
    eval.accuracy_all = static_cast<double>(eval.correct) / total;
    eval.coverage = static_cast<double>(classified) / total;
    return eval;
}

void write_history_csv(std::ostream& out, std::span<const EpochStats> history) {
    out << "epoch,loss,train_acc,test_acc\n";
    char buf[160];
    for (const EpochStats& s : history) {
        if (std::isnan(s.test_accuracy)) {
            std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,\n", s.epoch,
                          s.loss, s.train_accuracy);
        } else {
            std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g\n", s.epoch,
                          s.loss, s.train_accuracy, s.test_accuracy);
        }
        out << buf;
    }
}

}  // namespace qrobust
