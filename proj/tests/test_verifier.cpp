#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "qrobust/bloch.hpp"
#include "qrobust/verifier.hpp"
#include "support/oracles.hpp"

using namespace qrobust;

namespace {

// reference verification fixtures (n = 8): p0, v2, and the certificate at
// epsilon = 0 and epsilon = 0.01
struct TableRow {
    double p0;
    double v2;
    double cos0, delta0;
    double cos1, delta1;
    Label label;
};

const TableRow kTable[] = {
    {0.625719, 0.0157457, 0.999876, 0.000123487, 0.999886, 0.00011386,
     Label::zero},
    {0.133918, -0.0458499, 0.998948, 0.00104755, 0.998977, 0.00101915,
     Label::one},
    {0.115384, -0.0481711, 0.998839, 0.00115637, 0.998869, 0.00112652,
     Label::one},
    {0.11719, -0.0479449, 0.99885, 0.00114553, 0.99888, 0.00111582,
     Label::one},
    {0.688041, 0.0235512, 0.999723, 0.000276284, 0.999737, 0.000261789,
     Label::zero},
};

// The tight boundary direction for a single qubit: same azimuth as the
// center, z-coordinate exactly at the decision layer t. Its inner product
// with the center is cos_theta_min by the equality case of Cauchy-Schwarz.
Eigen::Vector3d boundary_direction(const Eigen::Vector3d& center, double t,
                                   int label_sign) {
    const double z = label_sign * t;
    double px = center.x(), py = center.y();
    const double pnorm = std::sqrt(px * px + py * py);
    if (pnorm < 1e-14) {
        px = 1.0;
        py = 0.0;
    } else {
        px /= pnorm;
        py /= pnorm;
    }
    const double r = std::sqrt(1.0 - t * t);
    return {r * px, r * py, z};
}

// single-qubit pure state with Bloch vector (sin a cos b, sin a sin b, cos a)
PureState pure_from_bloch_n1(const Eigen::Vector3d& v) {
    const double theta = std::acos(std::clamp(v.z(), -1.0, 1.0));
    const double phi = std::atan2(v.y(), v.x());
    std::vector<cplx> amp(2);
    amp[0] = cplx{std::cos(theta / 2.0), 0.0};
    amp[1] = std::polar(std::sin(theta / 2.0), phi);
    return PureState(1, std::move(amp));
}

RealizedQcnn identity_classifier_n1() {
    RealizedQcnn model;
    model.circuit = Circuit{1, {}};
    model.measured_qubit = 0;
    return model;
}

}  // namespace

TEST_CASE("v2 recovers the measured-qubit coefficient from p0") {
    CHECK(v2_from_p0(0.625719, 8) == doctest::Approx(0.0157457).epsilon(1e-5));
    CHECK(v2_from_p0(0.115384, 8) ==
          doctest::Approx(-0.0481711).epsilon(1e-5));
    CHECK(v2_from_p0(0.5, 8) == 0.0);
    CHECK(v2_from_p0(0.5, 3) == 0.0);
    CHECK_THROWS_AS(v2_from_p0(-0.1, 8), std::out_of_range);
    CHECK_THROWS_AS(v2_from_p0(1.0001, 8), std::out_of_range);
}

TEST_CASE("cos_theta_min against the reference rows and the pole") {
    for (const TableRow& row : kTable) {
        const double v2 = v2_from_p0(row.p0, 8);
        CHECK(cos_theta_min(v2, 0.0, 8) ==
              doctest::Approx(row.cos0).epsilon(1e-5));
        CHECK(cos_theta_min(v2, 0.01, 8) ==
              doctest::Approx(row.cos1).epsilon(1e-5));
    }
    // pole state: v2 = 1, epsilon = 0 -> the decision layer is a quarter
    // sphere away
    CHECK(cos_theta_min(1.0, 0.0, 1) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_THROWS_AS(cos_theta_min(0.0, 0.0, 8), std::domain_error);
    CHECK_THROWS_AS(cos_theta_min(0.0005, 0.01, 8), std::domain_error);
    CHECK_THROWS_AS(cos_theta_min(1.5, 0.0, 8), std::out_of_range);
}

TEST_CASE("cos_theta_min grows with epsilon for a fixed classifiable v2") {
    const double v2 = v2_from_p0(0.625719, 8);
    double previous = -1.0;
    for (double eps = 0.0; eps < 0.25; eps += 0.005) {
        const double c = cos_theta_min(v2, eps, 8);
        CHECK(c >= previous);
        previous = c;
    }
}

TEST_CASE("robust_bound against the reference rows and endpoints") {
    CHECK(robust_bound(0.999876, 8) ==
          doctest::Approx(0.000123487).epsilon(1e-5));
    CHECK(robust_bound(0.998948, 8) ==
          doctest::Approx(0.00104755).epsilon(1e-5));
    CHECK(robust_bound(1.0, 8) == 0.0);
    CHECK(robust_bound(1.0, 2) == 0.0);
    CHECK_THROWS_AS(robust_bound(1.5, 8), std::out_of_range);
    CHECK_THROWS_AS(robust_bound(-1.5, 8), std::out_of_range);
}

TEST_CASE("verify_p0 reproduces both reference tables") {
    for (const TableRow& row : kTable) {
        const VerificationResult r0 = verify_p0(row.p0, {0.0, 8});
        CHECK(r0.p1 == doctest::Approx(1.0 - row.p0).epsilon(1e-12));
        CHECK(r0.v2 == doctest::Approx(row.v2).epsilon(1e-5));
        CHECK(r0.cos_theta_min == doctest::Approx(row.cos0).epsilon(1e-5));
        CHECK(r0.delta == doctest::Approx(row.delta0).epsilon(1e-5));
        CHECK(r0.label == row.label);

        const VerificationResult r1 = verify_p0(row.p0, {0.01, 8});
        CHECK(r1.cos_theta_min == doctest::Approx(row.cos1).epsilon(1e-5));
        CHECK(r1.delta == doctest::Approx(row.delta1).epsilon(1e-5));
        CHECK(r1.label == row.label);

        // bigger epsilon, smaller certificate
        CHECK(r1.delta < r0.delta);
    }
}

TEST_CASE("a tie is a typed unclassifiable outcome, not a crash") {
    const VerificationResult r = verify_p0(0.5, {0.01, 8});
    CHECK(r.label == Label::unknown);
    CHECK_FALSE(r.classified());
    CHECK(std::isnan(r.delta));
    CHECK(std::isnan(r.cos_theta_min));
    CHECK(r.v2 == 0.0);
}

TEST_CASE("verification result equations hold to 1e-12") {
    Rng rng(321);
    const double scale = std::sqrt(255.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double p0 = rng.uniform();
        const VerifierConfig config{rng.uniform(0.0, 0.1), 8};
        const VerificationResult r = verify_p0(p0, config);
        CHECK(std::abs(r.v2 - (2.0 * r.p0 - 1.0) / scale) < 1e-12);
        if (r.classified()) {
            CHECK(std::abs(r.delta -
                           (1.0 - (1.0 + 255.0 * r.cos_theta_min) / 256.0)) <
                  1e-12);
            CHECK(r.delta > 0.0);
        }
    }
}

TEST_CASE("verification is mirror-symmetric in p0 <-> p1") {
    // on the 2^-53 grid that uniform() draws from, 1 - p0 is exact and the
    // mirror is bitwise; arbitrary doubles can pick up one ulp of noise
    Rng rng(555);
    for (int trial = 0; trial < 100; ++trial) {
        const double p0 = rng.uniform();
        const VerifierConfig config{rng.uniform(0.0, 0.05), 8};
        const VerificationResult a = verify_p0(p0, config);
        const VerificationResult b = verify_p0(1.0 - p0, config);
        CHECK(a.v2 == -b.v2);
        if (a.classified()) {
            REQUIRE(b.classified());
            CHECK(a.label != b.label);
            CHECK(a.delta == b.delta);
        } else {
            CHECK_FALSE(b.classified());
        }
    }
    for (int trial = 0; trial < 100; ++trial) {
        const double p0 = std::ldexp(rng.uniform(), -static_cast<int>(rng.index(30)));
        const VerifierConfig config{0.0, 8};
        const VerificationResult a = verify_p0(p0, config);
        const VerificationResult b = verify_p0(1.0 - p0, config);
        if (!a.classified()) continue;
        CHECK(std::abs(a.v2 + b.v2) <= 1e-16);
        CHECK(a.label != b.label);
        CHECK(std::abs(a.delta - b.delta) <= 2e-15);
    }
}

TEST_CASE("a larger probability margin never shrinks the bound") {
    const VerifierConfig config{0.01, 8};
    double previous = -1.0;
    for (double p0 = 0.51; p0 < 1.0; p0 += 0.01) {
        const VerificationResult r = verify_p0(p0, config);
        REQUIRE(r.classified());
        CHECK(r.delta >= previous);
        previous = r.delta;
    }
}

TEST_CASE("verify_p0_batch over the table matches the reference minimum") {
    std::vector<double> p0s;
    for (const TableRow& row : kTable) p0s.push_back(row.p0);
    const VerificationReport report = verify_p0_batch(p0s, {0.0, 8});
    REQUIRE(report.min_delta.has_value());
    CHECK(*report.min_delta == doctest::Approx(0.000123487).epsilon(1e-5));
    CHECK(report.zero_count == 2);
    CHECK(report.one_count == 3);
    CHECK(report.unclassified_count == 0);

    CHECK_THROWS_AS(verify_p0_batch({}, {0.0, 8}), std::invalid_argument);

    const VerificationReport ties =
        verify_p0_batch(std::vector<double>{0.5, 0.5}, {0.0, 8});
    CHECK(ties.unclassified_count == 2);
    CHECK_FALSE(ties.min_delta.has_value());
}

TEST_CASE("verify_state and verify_dataset run the real pipeline") {
    Rng rng(777);
    const QcnnArchitecture arch = build_qcnn(2, 1);
    std::vector<double> theta(4);
    for (double& t : theta) t = rng.uniform(-3.0, 3.0);
    const RealizedQcnn model = realize(arch, theta);
    const VerifierConfig config{0.0, 2};

    std::vector<EncodedSample> samples;
    for (int i = 0; i < 10; ++i) {
        const PureState psi = random_pure_state(rng, 2);
        // real nonnegative features so they survive amplitude encoding
        std::vector<double> f;
        double norm = 0.0;
        for (const cplx& a : psi.data()) {
            f.push_back(std::abs(a) + 0.01);
            norm += f.back() * f.back();
        }
        for (double& x : f) x /= std::sqrt(norm);
        samples.push_back({f, i % 2});
    }
    const VerificationReport report = verify_dataset(samples, model, config);
    REQUIRE(report.rows.size() == samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const VerificationResult direct = verify_state(
            amplitude_encode(samples[i].features), model, config);
        CHECK(report.rows[i].p0 == direct.p0);
        CHECK(report.rows[i].label == direct.label);
    }
    CHECK_THROWS_AS(verify_dataset({}, model, config), std::invalid_argument);
    CHECK_THROWS_AS(verify_state(PureState::zero(3), model, {0.0, 3}),
                    std::invalid_argument);
}

TEST_CASE("adversarial probe finds nothing inside a sound certificate") {
    Rng rng(1001);
    const QcnnArchitecture arch = build_qcnn(2, 1);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<double> theta(4);
        for (double& t : theta) t = rng.uniform(-3.141, 3.141);
        const RealizedQcnn model = realize(arch, theta);
        const VerifierConfig config{0.0, 2};
        const PureState input = random_pure_state(rng, 2);
        const VerificationResult result = verify_state(input, model, config);
        if (!result.classified()) continue;
        const auto counterexample = adversarial_probe(
            input, model, config, result, 1000, 4000 + trial);
        CHECK_FALSE(counterexample.has_value());
    }
}

TEST_CASE("adversarial probe respects samples = 0 and the classified precondition") {
    const RealizedQcnn model = identity_classifier_n1();
    const VerifierConfig config{0.0, 1};
    const VerificationResult result = verify_state(
        pure_from_bloch_n1({0.0, 0.0, 0.6}), model, config);
    REQUIRE(result.classified());
    CHECK_FALSE(adversarial_probe(pure_from_bloch_n1({0.0, 0.0, 0.6}), model,
                                  config, result, 0, 9)
                    .has_value());

    const VerificationResult tie = verify_p0(0.5, config);
    CHECK_THROWS_AS(adversarial_probe(PureState::zero(1), model, config, tie,
                                      10, 1),
                    std::logic_error);
}

TEST_CASE("the single-qubit boundary direction is tight") {
    Rng rng(31337);
    const RealizedQcnn model = identity_classifier_n1();
    for (int trial = 0; trial < 50; ++trial) {
        // random center with azimuth, comfortably classified
        const double z = (rng.uniform() < 0.5 ? -1 : 1) * rng.uniform(0.2, 0.95);
        const double phi = rng.uniform(0.0, 6.2831);
        const double r = std::sqrt(1.0 - z * z);
        const Eigen::Vector3d center{r * std::cos(phi), r * std::sin(phi), z};
        const double eps = rng.uniform(0.0, 0.1);
        const VerifierConfig config{eps, 1};

        const PureState psi = pure_from_bloch_n1(center);
        const VerificationResult result = verify_state(psi, model, config);
        REQUIRE(result.classified());
        const int sign = result.label == Label::zero ? 1 : -1;

        const Eigen::Vector3d vmin = boundary_direction(center, config.t(), sign);
        CHECK(vmin.norm() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(vmin.z() == sign * config.t());  // exact by construction
        CHECK(center.dot(vmin) ==
              doctest::Approx(result.cos_theta_min).epsilon(1e-9));

        // the boundary state must not land in the opposite class, and at the
        // realized |p0 - p1| the policy must call it unknown
        const PureState sigma = pure_from_bloch_n1(vmin);
        const Probs p = measure_probs(sigma, 0);
        CHECK(std::abs(std::abs(p.p0 - p.p1) - eps) < 1e-9);
        const Label opposite =
            result.label == Label::zero ? Label::one : Label::zero;
        CHECK(classify(p.p0, p.p1, {eps + 1e-9}) != opposite);
        CHECK(classify(p.p0, p.p1, {std::abs(p.p0 - p.p1)}) == Label::unknown);
    }
}

TEST_CASE("probing outside the certificate does find label changes") {
    const RealizedQcnn model = identity_classifier_n1();
    const VerifierConfig config{0.0, 1};
    const PureState input = pure_from_bloch_n1({0.0, 0.0, 0.3});
    const VerificationResult result = verify_state(input, model, config);
    REQUIRE(result.classified());
    // shell floor 1 - 2*delta reaches past the decision plane
    const auto counterexample = adversarial_probe(
        input, model, config, result, 2000, 1234, 1.0 - 2.0 * result.delta);
    REQUIRE(counterexample.has_value());
    CHECK(counterexample->label != result.label);
    CHECK(counterexample->fidelity >= 1.0 - 2.0 * result.delta);
    CHECK(counterexample->fidelity < 1.0 - result.delta);

    // the sampler's reported fidelity matches |<psi|sigma>|^2 recomputed
    // from the returned amplitudes
    cplx overlap{0.0, 0.0};
    for (std::uint64_t i = 0; i < input.dim(); ++i) {
        overlap += std::conj(input.amplitude(i)) * counterexample->amplitudes[i];
    }
    CHECK(std::norm(overlap) ==
          doctest::Approx(counterexample->fidelity).epsilon(1e-12));
}

TEST_CASE("CSV report shape, digits and unclassifiable flagging") {
    const VerificationReport report =
        verify_p0_batch(std::vector<double>{0.625719, 0.5}, {0.0, 8});
    std::ostringstream out;
    write_report_csv(out, report);
    const std::string expected =
        "index,p0,p1,v2,cos_theta_min,delta,class\n"
        "1,0.625719,0.374281,0.0157457,0.999876,0.000123486,0\n"
        "2,0.5,0.5,0,,,unknown\n";
    CHECK(out.str() == expected);

    std::ostringstream full;
    write_report_csv(full, report, 17);
    CHECK(full.str().find("0.62571900000000003") != std::string::npos);
}

TEST_CASE("JSON report carries rows and summary") {
    const VerificationReport report =
        verify_p0_batch(std::vector<double>{0.625719, 0.5}, {0.01, 8});
    const std::string json = report_to_json(report);
    CHECK(json.find("\"epsilon\": 0.01") != std::string::npos);
    CHECK(json.find("\"p0\": 0.625719") != std::string::npos);
    CHECK(json.find("\"delta\": 0.00011386") != std::string::npos);
    CHECK(json.find("\"class\": \"unknown\"") != std::string::npos);
    CHECK(json.find("\"min_delta\": 0.00011386") != std::string::npos);
    CHECK(json.find("\"unclassifiable\": 1") != std::string::npos);
}
