#include "qrobust/bloch.hpp"

#include <array>
#include <cmath>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>

namespace qrobust {

namespace {

constexpr int kMaxBasisQubits = 4;
constexpr double kImagResidueTol = 1e-9;
constexpr double kPhysicalTol = 1e-8;

Eigen::Matrix2cd single_pauli(int digit) {
    const cplx i{0.0, 1.0};
    Eigen::Matrix2cd m;
    switch (digit) {
        case 0: m << 1, 0, 0, 1; break;   // I
        case 1: m << 0, 1, 1, 0; break;   // X
        case 2: m << 0, -i, i, 0; break;  // Y
        default: m << 1, 0, 0, -1; break; // Z
    }
    return m;
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) =
                a(i, j) * b;
        }
    }
    return out;
}

// tr(a * b) without forming the product
cplx trace_of_product(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    return (a.transpose().cwiseProduct(b)).sum();
}

void check_matching(int basis_n, int other_n, const char* what) {
    if (basis_n != other_n) {
        throw std::invalid_argument(std::string(what) + " is for " +
                                    std::to_string(other_n) +
                                    " qubits, basis for " +
                                    std::to_string(basis_n));
    }
}

}  // namespace

PauliBasis::PauliBasis(int n) : n_(n) {
    scale_ = std::sqrt(std::ldexp(1.0, n) - 1.0);
    const std::size_t count = (std::size_t{1} << (2 * n)) - 1;
    elements_.reserve(count);
    // index k in base 4, most significant digit = qubit 0
    for (std::size_t k = 1; k <= count; ++k) {
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Ones(1, 1);
        for (int q = 0; q < n; ++q) {
            const int digit =
                static_cast<int>((k >> (2 * (n - 1 - q))) & 0x3u);
            m = kron(m, single_pauli(digit));
        }
        elements_.push_back(scale_ * m);
    }
}

const PauliBasis& PauliBasis::get(int n) {
    if (n < 1 || n > kMaxBasisQubits) {
        throw std::invalid_argument(
            "Pauli basis is materialized only for 1 <= n <= " +
            std::to_string(kMaxBasisQubits) + " (4^n - 1 dense matrices); got n = " +
            std::to_string(n));
    }
    static std::mutex mutex;
    static std::array<std::unique_ptr<PauliBasis>, kMaxBasisQubits + 1> cache;
    std::lock_guard<std::mutex> lock(mutex);
    if (!cache[static_cast<std::size_t>(n)]) {
        cache[static_cast<std::size_t>(n)].reset(new PauliBasis(n));
    }
    return *cache[static_cast<std::size_t>(n)];
}

BlochVector density_to_bloch(const DensityOperator& rho,
                             const PauliBasis& basis) {
    check_matching(basis.qubits(), rho.qubits(), "density operator");
    const double denom = std::ldexp(1.0, rho.qubits()) - 1.0;  // 2^n - 1
    BlochVector out{rho.qubits(),
                    Eigen::VectorXd(static_cast<Eigen::Index>(basis.size()))};
    for (std::size_t j = 0; j < basis.size(); ++j) {
        const cplx t = trace_of_product(rho.matrix(), basis.element(j));
        if (std::abs(t.imag()) > kImagResidueTol) {
            throw std::runtime_error(
                "tr(rho * sigma_" + std::to_string(j) +
                ") has imaginary residue " + std::to_string(t.imag()) +
                "; input is not a valid state");
        }
        out.v[static_cast<Eigen::Index>(j)] = t.real() / denom;
    }
    return out;
}

DensityOperator bloch_to_density(const BlochVector& v,
                                 const PauliBasis& basis) {
    check_matching(basis.qubits(), v.n, "Bloch vector");
    if (static_cast<std::size_t>(v.v.size()) != basis.size()) {
        throw std::invalid_argument(
            "Bloch vector has length " + std::to_string(v.v.size()) +
            ", expected " + std::to_string(basis.size()));
    }
    const Eigen::Index d = Eigen::Index{1} << v.n;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(d, d);
    for (std::size_t j = 0; j < basis.size(); ++j) {
        const double c = v.v[static_cast<Eigen::Index>(j)];
        if (c != 0.0) m += c * basis.element(j);
    }
    m /= double(d);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m,
                                                           Eigen::EigenvaluesOnly);
    const double min_ev = solver.eigenvalues().minCoeff();
    if (min_ev < -kPhysicalTol) {
        throw std::domain_error(
            "Bloch vector is outside the physical state set (eigenvalue " +
            std::to_string(min_ev) + ")");
    }
    return DensityOperator::from_matrix_unchecked(v.n, std::move(m));
}

double purity_from_bloch(const BlochVector& v) {
    const double dim = std::ldexp(1.0, v.n);
    return (1.0 + (dim - 1.0) * v.v.squaredNorm()) / dim;
}

double pure_fidelity_bloch(const BlochVector& v1, const BlochVector& v2) {
    if (v1.n != v2.n) {
        throw std::invalid_argument("Bloch vectors are for different qubit "
                                    "counts");
    }
    const double dim = std::ldexp(1.0, v1.n);
    return (1.0 + (dim - 1.0) * v1.v.dot(v2.v)) / dim;
}

double neighborhood_threshold(double delta, int n) {
    if (delta < 0.0 || delta > 1.0) {
        throw std::out_of_range("delta must be in [0, 1], got " +
                                std::to_string(delta));
    }
    const double dim = std::ldexp(1.0, n);
    return (dim * (1.0 - delta) - 1.0) / (dim - 1.0);
}

}  // namespace qrobust
