#include "qrobust/state.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qrobust {

namespace {

constexpr double kNormTol = 1e-9;
constexpr double kHermTol = 1e-9;
constexpr double kTraceTol = 1e-9;
constexpr double kEigenTol = 1e-9;
constexpr double kPurityTol = 1e-9;

// fidelity() tolerates slightly more PSD drift than type validation does
constexpr double kPsdErrorTol = 1e-6;

void check_qubit_count(int n) {
    if (n < 1) {
        throw std::invalid_argument("qubit count must be >= 1, got " +
                                    std::to_string(n));
    }
    if (n > 30) {
        throw std::invalid_argument("qubit count " + std::to_string(n) +
                                    " too large for dense simulation");
    }
}

void check_qubit_index(int n, int qubit) {
    if (qubit < 0 || qubit >= n) {
        throw std::out_of_range("qubit index " + std::to_string(qubit) +
                                " out of range for " + std::to_string(n) +
                                "-qubit state");
    }
}

void check_same_dim(const DensityOperator& a, const DensityOperator& b) {
    if (a.qubits() != b.qubits()) {
        throw std::invalid_argument(
            "dimension mismatch: " + std::to_string(a.qubits()) + " vs " +
            std::to_string(b.qubits()) + " qubits");
    }
}

// Eigenvalues below this relative fraction of the largest one are
// indistinguishable from eigensolver noise; treating them as exact zeros
// keeps sqrt() from amplifying 1e-16 noise into 1e-8 errors on
// rank-deficient operators.
constexpr double kRankCutoff = 1e-13;

// sqrt(rho) for a Hermitian PSD matrix; eigenvalues in the numerical-noise
// band around 0 are clamped to 0, anything below -kPsdErrorTol is rejected.
Eigen::MatrixXcd hermitian_sqrt(const Eigen::MatrixXcd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("eigendecomposition failed");
    }
    Eigen::VectorXd ev = solver.eigenvalues();
    const double cutoff = std::max(0.0, ev.maxCoeff()) * kRankCutoff;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev[i] < -kPsdErrorTol) {
            throw std::invalid_argument(
                "operator is not positive semidefinite (eigenvalue " +
                std::to_string(ev[i]) + ")");
        }
        ev[i] = ev[i] < cutoff ? 0.0 : std::sqrt(ev[i]);
    }
    return solver.eigenvectors() * ev.asDiagonal() *
           solver.eigenvectors().adjoint();
}

}  // namespace

PureState::PureState(int n, std::vector<cplx> amplitudes)
    : n_(n), amplitudes_(std::move(amplitudes)) {
    check_qubit_count(n);
    const std::uint64_t expected = std::uint64_t{1} << n;
    if (amplitudes_.size() != expected) {
        throw std::invalid_argument(
            "amplitude vector has length " + std::to_string(amplitudes_.size()) +
            ", expected 2^" + std::to_string(n) + " = " +
            std::to_string(expected));
    }
    const double nrm = norm();
    if (std::abs(nrm - 1.0) > kNormTol) {
        throw std::invalid_argument("state is not normalized (norm = " +
                                    std::to_string(nrm) + ")");
    }
}

PureState PureState::basis(int n, std::uint64_t index) {
    check_qubit_count(n);
    const std::uint64_t dim = std::uint64_t{1} << n;
    if (index >= dim) {
        throw std::out_of_range("basis index " + std::to_string(index) +
                                " out of range for dimension " +
                                std::to_string(dim));
    }
    std::vector<cplx> amp(dim, cplx{0.0, 0.0});
    amp[index] = cplx{1.0, 0.0};
    return PureState(n, std::move(amp));
}

double PureState::norm() const {
    double sum = 0.0;
    for (const cplx& a : amplitudes_) sum += std::norm(a);
    return std::sqrt(sum);
}

DensityOperator DensityOperator::pure(const PureState& psi) {
    const Eigen::Index d = static_cast<Eigen::Index>(psi.dim());
    Eigen::MatrixXcd m(d, d);
    auto amp = psi.data();
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            m(i, j) = amp[i] * std::conj(amp[j]);
        }
    }
    return DensityOperator(psi.qubits(), std::move(m));
}

DensityOperator DensityOperator::from_matrix(int n, Eigen::MatrixXcd m) {
    check_qubit_count(n);
    const Eigen::Index d = Eigen::Index{1} << n;
    if (m.rows() != d || m.cols() != d) {
        throw std::invalid_argument("matrix is " + std::to_string(m.rows()) +
                                    "x" + std::to_string(m.cols()) +
                                    ", expected " + std::to_string(d) + "x" +
                                    std::to_string(d));
    }
    const double herm_err = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (herm_err > kHermTol) {
        throw std::invalid_argument("matrix is not Hermitian (max deviation " +
                                    std::to_string(herm_err) + ")");
    }
    const cplx tr = m.trace();
    if (std::abs(tr - cplx{1.0, 0.0}) > kTraceTol) {
        std::ostringstream oss;
        oss << "trace is " << tr << ", expected 1";
        throw std::invalid_argument(oss.str());
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m,
                                                           Eigen::EigenvaluesOnly);
    const double min_ev = solver.eigenvalues().minCoeff();
    if (min_ev < -kEigenTol) {
        throw std::invalid_argument(
            "matrix is not positive semidefinite (eigenvalue " +
            std::to_string(min_ev) + ")");
    }
    const double pur = (m * m).trace().real();
    if (pur > 1.0 + kPurityTol) {
        throw std::invalid_argument("purity " + std::to_string(pur) +
                                    " exceeds 1");
    }
    return DensityOperator(n, std::move(m));
}

DensityOperator DensityOperator::from_matrix_unchecked(int n,
                                                       Eigen::MatrixXcd m) {
    return DensityOperator(n, std::move(m));
}

DensityOperator DensityOperator::maximally_mixed(int n) {
    check_qubit_count(n);
    const Eigen::Index d = Eigen::Index{1} << n;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(d, d) / double(d);
    return DensityOperator(n, std::move(m));
}

DensityOperator DensityOperator::mix(double p, const DensityOperator& a,
                                     const DensityOperator& b) {
    check_same_dim(a, b);
    if (p < 0.0 || p > 1.0) {
        throw std::invalid_argument("mixing weight must be in [0, 1], got " +
                                    std::to_string(p));
    }
    return DensityOperator(a.qubits(),
                           p * a.matrix() + (1.0 - p) * b.matrix());
}

Probs measure_probs(const DensityOperator& rho, int qubit) {
    check_qubit_index(rho.qubits(), qubit);
    const std::uint64_t mask = qubit_mask(rho.qubits(), qubit);
    double p0 = 0.0, p1 = 0.0;
    for (Eigen::Index i = 0; i < rho.dim(); ++i) {
        const double d = rho.matrix()(i, i).real();
        if (static_cast<std::uint64_t>(i) & mask) {
            p1 += d;
        } else {
            p0 += d;
        }
    }
    return {p0, p1};
}

Probs measure_probs(const PureState& psi, int qubit) {
    check_qubit_index(psi.qubits(), qubit);
    const std::uint64_t mask = qubit_mask(psi.qubits(), qubit);
    double p0 = 0.0, p1 = 0.0;
    auto amp = psi.data();
    for (std::uint64_t i = 0; i < psi.dim(); ++i) {
        const double d = std::norm(amp[i]);
        if (i & mask) {
            p1 += d;
        } else {
            p0 += d;
        }
    }
    return {p0, p1};
}

DensityOperator partial_trace(const DensityOperator& rho, int keep) {
    const int n = rho.qubits();
    check_qubit_index(n, keep);
    const std::uint64_t mask = qubit_mask(n, keep);
    const std::uint64_t dim = std::uint64_t{1} << n;
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(2, 2);
    // Sum rho[(a, rest), (b, rest)] over the 2^(n-1) values of `rest`.
    for (std::uint64_t i = 0; i < dim; ++i) {
        if (i & mask) continue;  // i has the kept qubit at 0
        const std::uint64_t j = i | mask;
        out(0, 0) += rho.matrix()(i, i);
        out(0, 1) += rho.matrix()(i, j);
        out(1, 0) += rho.matrix()(j, i);
        out(1, 1) += rho.matrix()(j, j);
    }
    return DensityOperator::from_matrix_unchecked(1, std::move(out));
}

double purity(const DensityOperator& rho) {
    return (rho.matrix() * rho.matrix()).trace().real();
}

double fidelity(const DensityOperator& rho, const DensityOperator& sigma) {
    check_same_dim(rho, sigma);
    const Eigen::MatrixXcd sq = hermitian_sqrt(rho.matrix());
    const Eigen::MatrixXcd inner = sq * sigma.matrix() * sq;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(inner,
                                                           Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("eigendecomposition failed");
    }
    double sum = 0.0;
    const double cutoff =
        std::max(0.0, solver.eigenvalues().maxCoeff()) * kRankCutoff;
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
        const double ev = solver.eigenvalues()[i];
        if (ev < -kPsdErrorTol) {
            throw std::invalid_argument(
                "operator is not positive semidefinite (eigenvalue " +
                std::to_string(ev) + ")");
        }
        if (ev > cutoff) sum += std::sqrt(ev);
    }
    return sum * sum;
}

double fidelity_pure(const PureState& psi, const DensityOperator& sigma) {
    if (psi.qubits() != sigma.qubits()) {
        throw std::invalid_argument(
            "dimension mismatch: " + std::to_string(psi.qubits()) + " vs " +
            std::to_string(sigma.qubits()) + " qubits");
    }
    auto amp = psi.data();
    cplx acc{0.0, 0.0};
    for (Eigen::Index i = 0; i < sigma.dim(); ++i) {
        cplx row{0.0, 0.0};
        for (Eigen::Index j = 0; j < sigma.dim(); ++j) {
            row += sigma.matrix()(i, j) * amp[j];
        }
        acc += std::conj(amp[i]) * row;
    }
    return acc.real();
}

double distance(const DensityOperator& rho, const DensityOperator& sigma) {
    return 1.0 - fidelity(rho, sigma);
}

PureState random_pure_state(Rng& rng, int n) {
    check_qubit_count(n);
    const std::uint64_t dim = std::uint64_t{1} << n;
    std::vector<cplx> amp(dim);
    double sum = 0.0;
    for (auto& a : amp) {
        a = cplx{rng.normal(), rng.normal()};
        sum += std::norm(a);
    }
    const double inv = 1.0 / std::sqrt(sum);
    for (auto& a : amp) a *= inv;
    return PureState(n, std::move(amp));
}

DensityOperator random_density_operator(Rng& rng, int n) {
    check_qubit_count(n);
    const Eigen::Index d = Eigen::Index{1} << n;
    Eigen::MatrixXcd g(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            g(i, j) = cplx{rng.normal(), rng.normal()};
        }
    }
    Eigen::MatrixXcd m = g * g.adjoint();
    m /= m.trace().real();
    // Hermitian PSD with unit trace by construction
    return DensityOperator::from_matrix_unchecked(n, std::move(m));
}

}  // namespace qrobust
