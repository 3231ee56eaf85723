#include <benchmark/benchmark.h>

#include "qrobust/bloch.hpp"
#include "qrobust/classifier.hpp"
#include "qrobust/gates.hpp"
#include "qrobust/mnist.hpp"
#include "qrobust/state.hpp"
#include "qrobust/verifier.hpp"

using namespace qrobust;

namespace {

std::vector<double> fixed_theta(const QcnnArchitecture& arch) {
    std::vector<double> theta(static_cast<std::size_t>(arch.param_count));
    for (std::size_t k = 0; k < theta.size(); ++k) {
        theta[k] = 0.1 * static_cast<double>(k + 1);
    }
    return theta;
}

void BM_apply_hadamard(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    PureState psi = PureState::zero(n);
    const GateOp gate = GateOp::h(n / 2);
    for (auto _ : state) {
        psi = apply_gate(std::move(psi), gate);
        benchmark::DoNotOptimize(psi.data().data());
    }
    state.SetItemsProcessed(state.iterations() * (1ll << n));
}
BENCHMARK(BM_apply_hadamard)->Arg(4)->Arg(8)->Arg(12);

void BM_apply_cnot(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    PureState psi = PureState::zero(n);
    const GateOp gate = GateOp::cnot(0, n - 1);
    for (auto _ : state) {
        psi = apply_gate(std::move(psi), gate);
        benchmark::DoNotOptimize(psi.data().data());
    }
    state.SetItemsProcessed(state.iterations() * (1ll << n));
}
BENCHMARK(BM_apply_cnot)->Arg(4)->Arg(8)->Arg(12);

void BM_qcnn_forward_n8(benchmark::State& state) {
    const QcnnArchitecture arch = build_qcnn(8, 3);
    const RealizedQcnn model = realize(arch, fixed_theta(arch));
    Rng rng(7);
    const PureState input = random_pure_state(rng, 8);
    for (auto _ : state) {
        benchmark::DoNotOptimize(forward(model, input).p0);
    }
}
BENCHMARK(BM_qcnn_forward_n8);

void BM_fidelity_eigen_n3(benchmark::State& state) {
    Rng rng(21);
    const DensityOperator a = random_density_operator(rng, 3);
    const DensityOperator b = random_density_operator(rng, 3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(fidelity(a, b));
    }
}
BENCHMARK(BM_fidelity_eigen_n3);

void BM_fidelity_pure_n3(benchmark::State& state) {
    Rng rng(22);
    const PureState psi = random_pure_state(rng, 3);
    const DensityOperator sigma = random_density_operator(rng, 3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(fidelity_pure(psi, sigma));
    }
}
BENCHMARK(BM_fidelity_pure_n3);

void BM_density_to_bloch(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    Rng rng(33);
    const DensityOperator rho = random_density_operator(rng, n);
    const PauliBasis& basis = PauliBasis::get(n);
    for (auto _ : state) {
        benchmark::DoNotOptimize(density_to_bloch(rho, basis).v.sum());
    }
}
BENCHMARK(BM_density_to_bloch)->Arg(2)->Arg(3);

void BM_verify_p0(benchmark::State& state) {
    const VerifierConfig config{0.01, 8};
    double p0 = 0.625719;
    for (auto _ : state) {
        benchmark::DoNotOptimize(verify_p0(p0, config).delta);
    }
}
BENCHMARK(BM_verify_p0);

void BM_downscale_16(benchmark::State& state) {
    RawImage img;
    img.label = 0;
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
        img.pixels[i] = static_cast<std::uint8_t>(i % 251);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(downscale_16(img)[0]);
    }
}
BENCHMARK(BM_downscale_16);

}  // namespace

BENCHMARK_MAIN();
