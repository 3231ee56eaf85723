// state.hpp
// n-qubit pure states and density operators, plus the measurement, partial
// trace and fidelity operations defined on them.
//
// Index convention: qubit 0 is the most significant bit of a basis-state
// index, i.e. basis index of |q0 q1 ... q_{n-1}> is q0*2^(n-1) + ... + q_{n-1}.

#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qrobust/rng.hpp"

namespace qrobust {

using cplx = std::complex<double>;

// bit mask selecting `qubit` inside an n-qubit basis index
inline std::uint64_t qubit_mask(int n, int qubit) {
    return std::uint64_t{1} << (n - 1 - qubit);
}

struct Probs {
    double p0 = 0.0;
    double p1 = 0.0;
};

class PureState {
public:
    // Validates the length (2^n) and the unit norm (within 1e-9).
    PureState(int n, std::vector<cplx> amplitudes);

    static PureState basis(int n, std::uint64_t index);
    static PureState zero(int n) { return basis(n, 0); }

    int qubits() const { return n_; }
    std::uint64_t dim() const { return amplitudes_.size(); }

    std::span<const cplx> data() const { return amplitudes_; }
    std::span<cplx> data() { return amplitudes_; }
    cplx amplitude(std::uint64_t i) const { return amplitudes_.at(i); }

    double norm() const;

private:
    int n_;
    std::vector<cplx> amplitudes_;
};

class DensityOperator {
public:
    // |psi><psi|
    static DensityOperator pure(const PureState& psi);

    // Full validation: Hermitian (1e-9 entrywise), trace 1 (1e-9),
    // eigenvalues >= -1e-9, purity <= 1 + 1e-9. Throws std::invalid_argument
    // describing the first violated property.
    static DensityOperator from_matrix(int n, Eigen::MatrixXcd m);

    // For callers that guarantee validity (unitary conjugation, convex
    // mixing, ...). No checks.
    static DensityOperator from_matrix_unchecked(int n, Eigen::MatrixXcd m);

    static DensityOperator maximally_mixed(int n);

    // p*a + (1-p)*b, p in [0, 1]
    static DensityOperator mix(double p, const DensityOperator& a,
                               const DensityOperator& b);

    int qubits() const { return n_; }
    Eigen::Index dim() const { return matrix_.rows(); }
    const Eigen::MatrixXcd& matrix() const { return matrix_; }

private:
    DensityOperator(int n, Eigen::MatrixXcd m)
        : n_(n), matrix_(std::move(m)) {}

    int n_;
    Eigen::MatrixXcd matrix_;
};

// Probability of outcome 0/1 when measuring `qubit` in the computational
// basis. p0 + p1 = 1 within 1e-9 for valid inputs.
Probs measure_probs(const DensityOperator& rho, int qubit);
Probs measure_probs(const PureState& psi, int qubit);

// Trace out every qubit except `keep`; result is a single-qubit operator.
DensityOperator partial_trace(const DensityOperator& rho, int keep);

// tr(rho^2), in [1/2^n, 1]
double purity(const DensityOperator& rho);

// Uhlmann fidelity tr(sqrt(sqrt(rho) sigma sqrt(rho)))^2 via Hermitian
// eigendecomposition. Eigenvalues in [-1e-6, 0) are clamped to 0; anything
// below -1e-6 is rejected as non-positive-semidefinite.
double fidelity(const DensityOperator& rho, const DensityOperator& sigma);

// <psi|sigma|psi>; equals fidelity(|psi><psi|, sigma) but without the
// eigendecomposition.
double fidelity_pure(const PureState& psi, const DensityOperator& sigma);

// 1 - fidelity
double distance(const DensityOperator& rho, const DensityOperator& sigma);

// Haar-ish random pure state (normalized complex Gaussian vector).
PureState random_pure_state(Rng& rng, int n);

// Full-rank random mixed state (Ginibre construction G G^dag / tr).
DensityOperator random_density_operator(Rng& rng, int n);

}  // namespace qrobust
