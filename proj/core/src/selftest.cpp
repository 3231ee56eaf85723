#include "qrobust/selftest.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "qrobust/bloch.hpp"
#include "qrobust/classifier.hpp"
#include "qrobust/gates.hpp"
#include "qrobust/mnist.hpp"
#include "qrobust/state.hpp"
#include "qrobust/training.hpp"
#include "qrobust/verifier.hpp"

namespace qrobust {

namespace {

class Checker {
public:
    explicit Checker(SelftestResult& result) : result_(result) {}

    void near(const std::string& what, double actual, double expected,
              double tol) {
        ++result_.checks;
        if (!(std::abs(actual - expected) <= tol)) {
            std::ostringstream oss;
            oss << what << ": got " << actual << ", expected " << expected
                << " within " << tol;
            result_.failures.push_back(oss.str());
        }
    }

    void is_true(const std::string& what, bool ok) {
        ++result_.checks;
        if (!ok) result_.failures.push_back(what);
    }

private:
    SelftestResult& result_;
};

void check_core(Checker& check, Rng& rng, int cases) {
    for (int c = 0; c < cases; ++c) {
        const int n = 1 + static_cast<int>(rng.index(3));
        const Circuit circuit = random_circuit(rng, n, 6);

        for (const GateOp& gate : circuit.gates) {
            const Eigen::MatrixXcd u = gate_matrix(gate);
            const double dev =
                (u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols()))
                    .cwiseAbs()
                    .maxCoeff();
            check.near("gate unitarity", dev, 0.0, 1e-12);
        }

        const DensityOperator rho = random_density_operator(rng, n);
        const DensityOperator evolved = apply_circuit(rho, circuit);
        check.near("purity conservation", purity(evolved), purity(rho), 1e-9);
        check.near("trace preservation", evolved.matrix().trace().real(), 1.0,
                   1e-9);

        const int q = static_cast<int>(rng.index(static_cast<std::uint64_t>(n)));
        const Probs p = measure_probs(evolved, q);
        check.near("probability completeness", p.p0 + p.p1, 1.0, 1e-9);
        const DensityOperator marginal = partial_trace(evolved, q);
        check.near("marginal consistency", marginal.matrix()(0, 0).real(), p.p0,
                   1e-10);

        const PureState psi = random_pure_state(rng, n);
        const double fast = fidelity_pure(psi, evolved);
        const double slow = fidelity(DensityOperator::pure(psi), evolved);
        check.near("fidelity shortcut", fast, slow, 1e-8);
        check.is_true("fidelity in range", slow >= -1e-9 && slow <= 1.0 + 1e-9);
    }
}

void check_bloch(Checker& check, Rng& rng, int cases) {
    for (int n = 1; n <= 3; ++n) {
        const PauliBasis& basis = PauliBasis::get(n);
        const double target = std::ldexp(1.0, 2 * n) - std::ldexp(1.0, n);
        for (std::size_t i = 0; i < basis.size(); ++i) {
            check.is_true("basis tracelessness",
                          basis.element(i).trace() == cplx{0.0, 0.0});
            for (std::size_t j = i; j < basis.size(); ++j) {
                const double tr =
                    (basis.element(i) * basis.element(j)).trace().real();
                check.near("basis orthogonality", tr, i == j ? target : 0.0,
                           1e-9);
            }
        }
    }
    for (int c = 0; c < cases; ++c) {
        const int n = 1 + static_cast<int>(rng.index(2));
        const PauliBasis& basis = PauliBasis::get(n);
        const DensityOperator rho = random_density_operator(rng, n);
        const BlochVector v = density_to_bloch(rho, basis);
        check.is_true("norm law", v.norm() <= 1.0 + 1e-9);
        const DensityOperator back = bloch_to_density(v, basis);
        check.near("roundtrip",
                   (back.matrix() - rho.matrix()).cwiseAbs().maxCoeff(), 0.0,
                   1e-10);
        check.near("purity from bloch", purity_from_bloch(v), purity(rho),
                   1e-9);

        const DensityOperator rho2 = random_density_operator(rng, n);
        const BlochVector v2 = density_to_bloch(rho2, basis);
        const double p = rng.uniform();
        const BlochVector vmix{n, p * v.v + (1.0 - p) * v2.v};
        const BlochVector direct =
            density_to_bloch(DensityOperator::mix(p, rho, rho2), basis);
        check.near("affinity", (vmix.v - direct.v).cwiseAbs().maxCoeff(), 0.0,
                   1e-10);

        const PureState psi = random_pure_state(rng, n);
        const BlochVector vp =
            density_to_bloch(DensityOperator::pure(psi), basis);
        check.near("pure states sit on the sphere", vp.norm(), 1.0, 1e-8);
        check.near("bloch fidelity", pure_fidelity_bloch(vp, v),
                   fidelity_pure(psi, rho), 1e-8);

        const Circuit circuit = random_circuit(rng, n, 5);
        const BlochVector rotated =
            density_to_bloch(apply_circuit(rho, circuit), basis);
        check.near("unitary norm preservation", rotated.norm(), v.norm(), 1e-9);
    }
}

void check_classifier(Checker& check, Rng& rng, int cases) {
    const QcnnArchitecture arch = build_qcnn(4, 2);
    check.is_true("param count", arch.param_count == 8);
    check.is_true("measured qubit", arch.measured_qubit == 3);
    for (int c = 0; c < cases; ++c) {
        std::vector<double> theta(static_cast<std::size_t>(arch.param_count));
        for (double& t : theta) t = rng.uniform(-3.141592653589793, 3.141592653589793);
        const RealizedQcnn model = realize(arch, theta);
        const PureState input = random_pure_state(rng, 4);
        const Probs p = forward(model, input);
        check.near("forward completeness", p.p0 + p.p1, 1.0, 1e-9);
        const Probs pd = forward_density(model, DensityOperator::pure(input));
        check.near("pure/density forward agreement", pd.p0, p.p0, 1e-10);

        // policy agrees with the v2 sign rule
        const double v2 = (2.0 * p.p0 - 1.0) / std::sqrt(15.0);
        const double eps = rng.uniform(0.0, 0.2);
        const double t = eps / std::sqrt(15.0);
        const Label label = classify(p.p0, p.p1, {eps});
        const Label sign_label =
            v2 > t ? Label::zero : (v2 < -t ? Label::one : Label::unknown);
        check.is_true("policy/Bloch equivalence", label == sign_label);
    }
}

void check_verifier(Checker& check, Rng& rng, int cases) {
    struct Row {
        double p0, v2, cos0, delta0, cos1, delta1;
        Label label;
    };
    // reference verification fixtures, epsilon = 0 and epsilon = 0.01, n = 8
    const Row rows[] = {
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
    for (const Row& row : rows) {
        const VerificationResult r0 = verify_p0(row.p0, {0.0, 8});
        const VerificationResult r1 = verify_p0(row.p0, {0.01, 8});
        check.near("table v2", r0.v2, row.v2, 1e-5);
        check.near("table cos (eps=0)", r0.cos_theta_min, row.cos0, 1e-5);
        check.near("table delta (eps=0)", r0.delta, row.delta0, 1e-5);
        check.near("table cos (eps=0.01)", r1.cos_theta_min, row.cos1, 1e-5);
        check.near("table delta (eps=0.01)", r1.delta, row.delta1, 1e-5);
        check.is_true("table label", r0.label == row.label && r1.label == row.label);
        check.is_true("epsilon monotonicity", r1.delta < r0.delta);
    }
    for (int c = 0; c < cases; ++c) {
        const double p0 = rng.uniform();
        const VerifierConfig config{rng.uniform(0.0, 0.05), 8};
        const VerificationResult r = verify_p0(p0, config);
        check.near("v2 consistency", r.v2, (2.0 * r.p0 - 1.0) / std::sqrt(255.0),
                   1e-12);
        if (r.classified()) {
            check.near("delta consistency", r.delta,
                       1.0 - (1.0 + 255.0 * r.cos_theta_min) / 256.0, 1e-12);
            check.is_true("classified implies positive bound", r.delta > 0.0);
            // exact because uniform() draws from the 2^-53 grid, where
            // 1 - p0 is itself exact
            const VerificationResult mirror = verify_p0(1.0 - p0, config);
            check.is_true("sign symmetry",
                          mirror.label != r.label && mirror.delta == r.delta);
        }
    }
}

void check_training(Checker& check, Rng& rng, int cases) {
    check.near("balanced loss", loss(0.5, 0.5, 0), std::log(2.0), 1e-12);
    check.near("confident loss", loss(1.0, 0.0, 0), std::log(1.0 + std::exp(-1.0)),
               1e-12);

    const QcnnArchitecture arch = build_qcnn(2, 1);
    for (int c = 0; c < cases; ++c) {
        std::vector<double> theta(static_cast<std::size_t>(arch.param_count));
        for (double& t : theta) t = rng.uniform(-3.0, 3.0);
        std::vector<EncodedSample> batch;
        const PureState psi = random_pure_state(rng, 2);
        EncodedSample sample;
        for (const cplx& a : psi.data()) sample.features.push_back(std::abs(a));
        double norm = 0.0;
        for (double f : sample.features) norm += f * f;
        if (norm <= 0.0) continue;
        for (double& f : sample.features) f /= std::sqrt(norm);
        sample.label = static_cast<int>(rng.index(2));
        batch.push_back(sample);

        const std::vector<double> grad = gradient(arch, theta, batch);
        // central differences of the full loss as the independent route
        const double h = 1e-5;
        for (std::size_t k = 0; k < theta.size(); ++k) {
            std::vector<double> up(theta), down(theta);
            up[k] += h;
            down[k] -= h;
            const PureState input = amplitude_encode(sample.features);
            const Probs pu = forward(arch, up, input);
            const Probs pd = forward(arch, down, input);
            const double fd = (loss(pu.p0, pu.p1, sample.label) -
                               loss(pd.p0, pd.p1, sample.label)) /
                              (2.0 * h);
            if (std::abs(grad[k]) > 1e-8 || std::abs(fd) > 1e-8) {
                check.near("parameter-shift vs finite difference", grad[k], fd,
                           1e-5 * std::max(1.0, std::abs(fd)));
            }
        }
    }

    AdamState adam = AdamState::zeros(1);
    const std::vector<double> g{1.0};
    const std::vector<double> delta = adam_step(adam, g, TrainConfig{});
    check.near("adam first step", delta[0], -0.01 / (1.0 + 1e-8), 1e-12);
}

void check_data(Checker& check, Rng& rng, int cases) {
    for (int c = 0; c < cases; ++c) {
        RawImage img;
        img.label = 0;
        for (auto& p : img.pixels) {
            p = static_cast<std::uint8_t>(rng.index(256));
        }
        const Grid16 grid = downscale_16(img);
        double in_sum = 0.0, out_sum = 0.0;
        for (auto p : img.pixels) in_sum += p;
        for (double v : grid) out_sum += v;
        // area averaging preserves total mass up to the cell-area factor
        check.near("downscale mass conservation", out_sum * (1.75 * 1.75),
                   in_sum, 1e-6);

        const EncodedSample sample = to_sample(grid, 0);
        double norm = 0.0;
        for (double f : sample.features) norm += f * f;
        check.near("sample normalization", std::sqrt(norm), 1.0, 1e-12);
    }

    RawImage flat;
    flat.label = 1;
    flat.pixels.fill(37);
    const Grid16 grid = downscale_16(flat);
    for (double v : grid) {
        check.near("downscale partition of unity", v, 37.0, 1e-9);
    }
}

using GroupFn = std::function<void(Checker&, Rng&, int)>;

const std::map<std::string, GroupFn>& group_table() {
    static const std::map<std::string, GroupFn> table = {
        {"core", check_core},         {"bloch", check_bloch},
        {"classifier", check_classifier}, {"verifier", check_verifier},
        {"training", check_training}, {"data", check_data},
    };
    return table;
}

}  // namespace

std::vector<std::string> selftest_groups() {
    std::vector<std::string> names;
    for (const auto& [name, fn] : group_table()) names.push_back(name);
    return names;
}

SelftestResult run_selftest_group(const std::string& group,
                                  const SelftestOptions& options) {
    const auto it = group_table().find(group);
    if (it == group_table().end()) {
        throw std::invalid_argument("unknown selftest group: " + group);
    }
    SelftestResult result;
    result.group = group;
    Checker check(result);
    Rng rng(options.seed);
    it->second(check, rng, options.cases);
    if (options.inject_failure) {
        check.near("injected tolerance violation (test hook)", 1.0, 0.0, 1e-9);
    }
    return result;
}

std::vector<SelftestResult> run_selftest(std::span<const std::string> groups,
                                         const SelftestOptions& options) {
    std::vector<SelftestResult> results;
    for (const std::string& group : groups) {
        results.push_back(run_selftest_group(group, options));
    }
    return results;
}

}  // namespace qrobust
