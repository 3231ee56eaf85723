#include "qrobust/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace qrobust {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double bloch_scale(int n) {
    if (n < 1) {
        throw std::invalid_argument("qubit count must be >= 1, got " +
                                    std::to_string(n));
    }
    return std::sqrt(std::ldexp(1.0, n) - 1.0);  // sqrt(2^n - 1)
}

std::string format_double(double value, int significant_digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", significant_digits, value);
    return buf;
}

// round through the requested digit count so serialized numbers match the
// textual report
double rounded(double value, int significant_digits) {
    return std::stod(format_double(value, significant_digits));
}

}  // namespace

double VerifierConfig::t() const { return epsilon / bloch_scale(n); }

void VerifierConfig::validate() const {
    if (epsilon < 0.0) {
        throw std::invalid_argument("epsilon must be >= 0, got " +
                                    std::to_string(epsilon));
    }
    if (t() >= 1.0) {
        throw std::invalid_argument(
            "epsilon / sqrt(2^n - 1) must stay below 1, got " +
            std::to_string(t()));
    }
}

double v2_from_p0(double p0, int n) {
    if (p0 < 0.0 || p0 > 1.0) {
        throw std::out_of_range("p0 must be in [0, 1], got " +
                                std::to_string(p0));
    }
    return (2.0 * p0 - 1.0) / bloch_scale(n);
}

double cos_theta_min(double v2, double epsilon, int n) {
    if (epsilon < 0.0) {
        throw std::invalid_argument("epsilon must be >= 0");
    }
    if (std::abs(v2) > 1.0) {
        throw std::out_of_range("|v2| must be <= 1, got " + std::to_string(v2));
    }
    const double t = epsilon / bloch_scale(n);
    if (std::abs(v2) <= t) {
        throw std::domain_error(
            "state is not classifiable (|v2| = " + std::to_string(std::abs(v2)) +
            " <= t = " + std::to_string(t) + ")");
    }
    // class 0 branch is v2*t + sqrt(...); class 1 flips the sign of the v2*t
    // term, which collapses to |v2| since classifiability forces sign(v2) to
    // match the branch
    const double cos = std::abs(v2) * t +
                       std::sqrt(std::max(0.0, (1.0 - v2 * v2)) * (1.0 - t * t));
    return std::min(cos, 1.0);
}

double robust_bound(double cos_theta_min, int n) {
    if (cos_theta_min < -1.0 || cos_theta_min > 1.0) {
        throw std::out_of_range("cos_theta_min must be in [-1, 1], got " +
                                std::to_string(cos_theta_min));
    }
    const double dim = std::ldexp(1.0, n);
    const double delta = 1.0 - (1.0 + (dim - 1.0) * cos_theta_min) / dim;
    return std::clamp(delta, 0.0, 1.0);
}

VerificationResult verify_p0(double p0, const VerifierConfig& config) {
    config.validate();
    VerificationResult result;
    result.p0 = p0;
    result.p1 = 1.0 - p0;
    result.v2 = v2_from_p0(p0, config.n);
    result.label = classify(result.p0, result.p1, {config.epsilon});
    if (result.label == Label::unknown) {
        result.cos_theta_min = kNaN;
        result.delta = kNaN;
        return result;
    }
    result.cos_theta_min = cos_theta_min(result.v2, config.epsilon, config.n);
    result.delta = robust_bound(result.cos_theta_min, config.n);
    return result;
}

VerificationResult verify_state(const PureState& input,
                                const RealizedQcnn& model,
                                const VerifierConfig& config) {
    if (input.qubits() != config.n) {
        throw std::invalid_argument(
            "verifier is configured for " + std::to_string(config.n) +
            " qubits, input has " + std::to_string(input.qubits()));
    }
    const Probs probs = forward(model, input);
    return verify_p0(probs.p0, config);
}

namespace {

VerificationReport collect_report(std::vector<VerificationResult> rows,
                                  const VerifierConfig& config) {
    VerificationReport report;
    report.epsilon = config.epsilon;
    report.n = config.n;
    for (const VerificationResult& r : rows) {
        switch (r.label) {
            case Label::zero: ++report.zero_count; break;
            case Label::one: ++report.one_count; break;
            case Label::unknown: ++report.unclassified_count; break;
        }
        if (r.classified() &&
            (!report.min_delta || r.delta < *report.min_delta)) {
            report.min_delta = r.delta;
        }
    }
    report.rows = std::move(rows);
    return report;
}

}  // namespace

VerificationReport verify_p0_batch(std::span<const double> p0s,
                                   const VerifierConfig& config) {
    if (p0s.empty()) {
        throw std::invalid_argument("empty p0 list");
    }
    std::vector<VerificationResult> rows;
    rows.reserve(p0s.size());
    for (double p0 : p0s) rows.push_back(verify_p0(p0, config));
    return collect_report(std::move(rows), config);
}

VerificationReport verify_dataset(std::span<const EncodedSample> samples,
                                  const RealizedQcnn& model,
                                  const VerifierConfig& config) {
    if (samples.empty()) {
        throw std::invalid_argument("empty dataset");
    }
    std::vector<VerificationResult> rows;
    rows.reserve(samples.size());
    for (const EncodedSample& sample : samples) {
        rows.push_back(
            verify_state(amplitude_encode(sample.features), model, config));
    }
    return collect_report(std::move(rows), config);
}

std::optional<Counterexample> adversarial_probe(
    const PureState& input, const RealizedQcnn& model,
    const VerifierConfig& config, const VerificationResult& result,
    int samples, std::uint64_t seed, std::optional<double> min_fidelity) {
    if (!result.classified()) {
        throw std::logic_error("adversarial_probe requires a classified result");
    }
    const double floor =
        std::clamp(min_fidelity.value_or(1.0 - result.delta), 0.0, 1.0);
    Rng rng(seed);
    const std::uint64_t dim = input.dim();
    auto center = input.data();

    for (int s = 0; s < samples; ++s) {
        // Gaussian perturbation, projected orthogonal to the center, then
        // interpolated onto the target fidelity shell and renormalized.
        std::vector<cplx> dir(dim);
        double ortho_norm2 = 0.0;
        do {
            for (auto& d : dir) d = cplx{rng.normal(), rng.normal()};
            cplx overlap{0.0, 0.0};
            for (std::uint64_t i = 0; i < dim; ++i) {
                overlap += std::conj(center[i]) * dir[i];
            }
            ortho_norm2 = 0.0;
            for (std::uint64_t i = 0; i < dim; ++i) {
                dir[i] -= overlap * center[i];
                ortho_norm2 += std::norm(dir[i]);
            }
        } while (ortho_norm2 < 1e-24);

        const double fid = rng.uniform(floor, 1.0);
        const double a = std::sqrt(fid);
        const double b = std::sqrt(1.0 - fid) / std::sqrt(ortho_norm2);
        std::vector<cplx> amp(dim);
        for (std::uint64_t i = 0; i < dim; ++i) {
            amp[i] = a * center[i] + b * dir[i];
        }
        PureState sigma(input.qubits(), std::move(amp));
        const Probs probs = forward(model, sigma);
        const Label label = classify(probs.p0, probs.p1, {config.epsilon});
        if (label != result.label) {
            return Counterexample{
                s, fid, label,
                std::vector<cplx>(sigma.data().begin(), sigma.data().end())};
        }
    }
    return std::nullopt;
}

void write_report_csv(std::ostream& out, const VerificationReport& report,
                      int significant_digits) {
    out << "index,p0,p1,v2,cos_theta_min,delta,class\n";
    int index = 1;
    for (const VerificationResult& r : report.rows) {
        out << index++ << ',' << format_double(r.p0, significant_digits) << ','
            << format_double(r.p1, significant_digits) << ','
            << format_double(r.v2, significant_digits) << ',';
        if (r.classified()) {
            out << format_double(r.cos_theta_min, significant_digits) << ','
                << format_double(r.delta, significant_digits) << ','
                << to_string(r.label) << '\n';
        } else {
            out << ",," << to_string(r.label) << '\n';
        }
    }
}

std::string report_to_json(const VerificationReport& report,
                           int significant_digits) {
    nlohmann::json rows = nlohmann::json::array();
    int index = 1;
    for (const VerificationResult& r : report.rows) {
        nlohmann::json row;
        row["index"] = index++;
        row["p0"] = rounded(r.p0, significant_digits);
        row["p1"] = rounded(r.p1, significant_digits);
        row["v2"] = rounded(r.v2, significant_digits);
        if (r.classified()) {
            row["cos_theta_min"] = rounded(r.cos_theta_min, significant_digits);
            row["delta"] = rounded(r.delta, significant_digits);
        } else {
            row["cos_theta_min"] = nullptr;
            row["delta"] = nullptr;
        }
        row["class"] = to_string(r.label);
        rows.push_back(std::move(row));
    }
    nlohmann::json j;
    j["epsilon"] = report.epsilon;
    j["n"] = report.n;
    j["rows"] = std::move(rows);
    nlohmann::json summary;
    summary["zero"] = report.zero_count;
    summary["one"] = report.one_count;
    summary["unclassifiable"] = report.unclassified_count;
    if (report.min_delta) {
        summary["min_delta"] = rounded(*report.min_delta, significant_digits);
    } else {
        summary["min_delta"] = nullptr;
    }
    j["summary"] = std::move(summary);
    return j.dump(2);
}

}  // namespace qrobust
