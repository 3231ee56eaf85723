// verifier.hpp
// Per-input robustness certification. From the measured probability p0 of a
// classified state, compute the measured-qubit Bloch coefficient
// v2 = (2 p0 - 1) / sqrt(2^n - 1), the minimum angle cosine to the decision
// layer at t = epsilon / sqrt(2^n - 1),
//   cos_theta_min = |v2| t + sqrt((1 - v2^2)(1 - t^2)),
// and the certified radius in 1-fidelity distance,
//   delta = 1 - (1 + (2^n - 1) cos_theta_min) / 2^n:
// every pure state within distance delta of the input receives the same
// label.

#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "qrobust/classifier.hpp"
#include "qrobust/state.hpp"

namespace qrobust {

struct VerifierConfig {
    double epsilon = 0.0;  // classification policy tolerance, >= 0
    int n = 8;             // qubit count

    double t() const;  // epsilon / sqrt(2^n - 1), must stay in [0, 1)
    void validate() const;
};

struct VerificationResult {
    double p0 = 0.0;
    double p1 = 0.0;
    double v2 = 0.0;
    // NaN when the sample is unclassifiable (label == unknown)
    double cos_theta_min = 0.0;
    double delta = 0.0;
    Label label = Label::unknown;

    bool classified() const { return label != Label::unknown; }
};

struct VerificationReport {
    double epsilon = 0.0;
    int n = 0;
    std::vector<VerificationResult> rows;  // input order
    int zero_count = 0;
    int one_count = 0;
    int unclassified_count = 0;
    std::optional<double> min_delta;  // over classified rows
};

double v2_from_p0(double p0, int n);

// Requires |v2| > epsilon / sqrt(2^n - 1); throws std::domain_error
// otherwise (the caller must have branched on classifiability already).
double cos_theta_min(double v2, double epsilon, int n);

double robust_bound(double cos_theta_min, int n);

// Full branch structure on a measured p0. A tie (|p0 - p1| <= epsilon)
// yields label unknown with NaN cosine/delta, not an error.
VerificationResult verify_p0(double p0, const VerifierConfig& config);

VerificationResult verify_state(const PureState& input,
                                const RealizedQcnn& model,
                                const VerifierConfig& config);

VerificationReport verify_p0_batch(std::span<const double> p0s,
                                   const VerifierConfig& config);

VerificationReport verify_dataset(std::span<const EncodedSample> samples,
                                  const RealizedQcnn& model,
                                  const VerifierConfig& config);

struct Counterexample {
    int sample_index = 0;
    double fidelity = 0.0;  // against the probed input
    Label label = Label::unknown;
    std::vector<cplx> amplitudes;
};

// Empirical soundness check of a certificate: draw `samples` random pure
// states with fidelity(input, sigma) >= 1 - result.delta (Gaussian
// perturbation projected onto the fidelity shell), classify each, and return
// the first one whose label differs from result.label. For a sound
// certificate this returns nullopt. `min_fidelity` overrides the shell floor
// (used to probe outside the certified ball).
std::optional<Counterexample> adversarial_probe(
    const PureState& input, const RealizedQcnn& model,
    const VerifierConfig& config, const VerificationResult& result,
    int samples, std::uint64_t seed,
    std::optional<double> min_fidelity = std::nullopt);

// CSV with columns exactly: index,p0,p1,v2,cos_theta_min,delta,class
// (1-based index; empty cosine/delta cells and class "unknown" for
// unclassifiable rows). Values use `significant_digits` digits.
void write_report_csv(std::ostream& out, const VerificationReport& report,
                      int significant_digits = 6);

// Same content as a JSON document (rows + summary).
std::string report_to_json(const VerificationReport& report,
                           int significant_digits = 6);

}  // namespace qrobust
