// bloch.hpp
// Generalized Bloch machinery: the scaled tensor-Pauli basis, the
// density <-> Bloch-vector conversions and the Bloch-space fidelity formula
// for pure states.
//
// The basis elements are sqrt(2^n - 1) * (P_1 x ... x P_n) with P_i in
// {I, X, Y, Z}, the all-identity product excluded, ordered lexicographically
// with I < X < Y < Z (first factor = qubit 0 = most significant). Under this
// scaling tr(s_i s_j) = (4^n - 2^n) delta_ij, every valid state satisfies
// ||v|| <= 1, and ||v|| = 1 exactly for pure states.

#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "qrobust/state.hpp"

namespace qrobust {

class PauliBasis {
public:
    // Cached, thread-safe. The basis is materialized (4^n - 1 dense
    // matrices), which restricts it to n <= 4; larger n throw.
    static const PauliBasis& get(int n);

    int qubits() const { return n_; }
    std::size_t size() const { return elements_.size(); }  // 4^n - 1
    const Eigen::MatrixXcd& element(std::size_t i) const {
        return elements_.at(i);
    }
    double scale() const { return scale_; }  // sqrt(2^n - 1)

    PauliBasis(const PauliBasis&) = delete;
    PauliBasis& operator=(const PauliBasis&) = delete;

private:
    explicit PauliBasis(int n);

    int n_;
    double scale_;
    std::vector<Eigen::MatrixXcd> elements_;
};

struct BlochVector {
    int n = 1;
    Eigen::VectorXd v;  // length 4^n - 1

    double norm() const { return v.norm(); }
};

// v_j = tr(rho s_j) / (2^n - 1). An imaginary residue above 1e-9 on any
// coefficient is rejected (the input is not Hermitian enough to be a state).
BlochVector density_to_bloch(const DensityOperator& rho,
                             const PauliBasis& basis);

// rho = (I + v . s) / 2^n. Hermitian with unit trace by construction, but
// for n >= 2 a vector inside the unit ball need not be a physical state:
// the result is checked and a std::domain_error raised if any eigenvalue
// falls below -1e-8.
DensityOperator bloch_to_density(const BlochVector& v, const PauliBasis& basis);

// tr(rho^2) = (1 + (2^n - 1) ||v||^2) / 2^n
double purity_from_bloch(const BlochVector& v);

// Fidelity of the two states when at least one is pure (||v|| = 1):
// (1 + (2^n - 1) v1 . v2) / 2^n. The purity precondition is the caller's
// contract and is not checked.
double pure_fidelity_bloch(const BlochVector& v1, const BlochVector& v2);

// Cosine threshold of the fidelity neighborhood: pure states sigma satisfy
// Dis(rho, sigma) <= delta iff v_rho . v_sigma >= threshold.
// threshold = (2^n (1 - delta) - 1) / (2^n - 1), delta in [0, 1].
double neighborhood_threshold(double delta, int n);

}  // namespace qrobust
