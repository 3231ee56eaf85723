#include "qrobust/gates.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qrobust {

namespace {

const cplx kI{0.0, 1.0};

void check_gate_indices(const GateOp& gate, int n) {
    auto check = [n](int q, const char* role) {
        if (q < 0 || q >= n) {
            throw std::out_of_range(std::string(role) + " qubit " +
                                    std::to_string(q) + " out of range for " +
                                    std::to_string(n) + "-qubit state");
        }
    };
    check(gate.target, "target");
    if (is_controlled(gate.kind)) {
        if (!gate.control) {
            throw std::invalid_argument(std::string(to_string(gate.kind)) +
                                        " gate requires a control qubit");
        }
        check(*gate.control, "control");
        if (*gate.control == gate.target) {
            throw std::invalid_argument("control and target must differ, both " +
                                        std::to_string(gate.target));
        }
    } else if (gate.control) {
        throw std::invalid_argument(std::string(to_string(gate.kind)) +
                                    " gate does not take a control qubit");
    }
}

double require_angle(const GateOp& gate) {
    if (!gate.angle) {
        throw std::invalid_argument(std::string("rotation gate ") +
                                    to_string(gate.kind) + " has no angle");
    }
    return *gate.angle;
}

// in-place 2x2 application on the amplitude pairs selected by `target`
void apply_block(std::span<cplx> amp, int n, int target,
                 const Eigen::Matrix2cd& u) {
    const std::uint64_t mask = qubit_mask(n, target);
    const std::uint64_t dim = std::uint64_t{1} << n;
    for (std::uint64_t i = 0; i < dim; ++i) {
        if (i & mask) continue;
        const std::uint64_t j = i | mask;
        const cplx a = amp[i], b = amp[j];
        amp[i] = u(0, 0) * a + u(0, 1) * b;
        amp[j] = u(1, 0) * a + u(1, 1) * b;
    }
}

void apply_block_controlled(std::span<cplx> amp, int n, int control, int target,
                            const Eigen::Matrix2cd& u) {
    const std::uint64_t cmask = qubit_mask(n, control);
    const std::uint64_t tmask = qubit_mask(n, target);
    const std::uint64_t dim = std::uint64_t{1} << n;
    for (std::uint64_t i = 0; i < dim; ++i) {
        if (!(i & cmask) || (i & tmask)) continue;
        const std::uint64_t j = i | tmask;
        const cplx a = amp[i], b = amp[j];
        amp[i] = u(0, 0) * a + u(0, 1) * b;
        amp[j] = u(1, 0) * a + u(1, 1) * b;
    }
}

}  // namespace

const char* to_string(GateKind kind) {
    switch (kind) {
        case GateKind::h: return "h";
        case GateKind::x: return "x";
        case GateKind::y: return "y";
        case GateKind::z: return "z";
        case GateKind::cnot: return "cnot";
        case GateKind::rx: return "rx";
        case GateKind::ry: return "ry";
        case GateKind::rz: return "rz";
        case GateKind::crx: return "crx";
        case GateKind::crz: return "crz";
    }
    return "?";
}

bool is_rotation(GateKind kind) {
    return kind == GateKind::rx || kind == GateKind::ry ||
           kind == GateKind::rz || kind == GateKind::crx ||
           kind == GateKind::crz;
}

bool is_controlled(GateKind kind) {
    return kind == GateKind::cnot || kind == GateKind::crx ||
           kind == GateKind::crz;
}

Eigen::Matrix2cd gate_block(const GateOp& gate) {
    Eigen::Matrix2cd u;
    switch (gate.kind) {
        case GateKind::h: {
            const double s = 1.0 / std::sqrt(2.0);
            u << s, s, s, -s;
            return u;
        }
        case GateKind::x:
        case GateKind::cnot:
            u << 0, 1, 1, 0;
            return u;
        case GateKind::y:
            u << 0, -kI, kI, 0;
            return u;
        case GateKind::z:
            u << 1, 0, 0, -1;
            return u;
        case GateKind::rx:
        case GateKind::crx: {
            const double t = require_angle(gate) / 2.0;
            u << std::cos(t), -kI * std::sin(t), -kI * std::sin(t), std::cos(t);
            return u;
        }
        case GateKind::ry: {
            const double t = require_angle(gate) / 2.0;
            u << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
            return u;
        }
        case GateKind::rz:
        case GateKind::crz: {
            const double t = require_angle(gate) / 2.0;
            u << std::exp(-kI * t), 0, 0, std::exp(kI * t);
            return u;
        }
    }
    throw std::invalid_argument("unknown gate kind");
}

Eigen::MatrixXcd gate_matrix(const GateOp& gate) {
    const Eigen::Matrix2cd block = gate_block(gate);
    if (!is_controlled(gate.kind)) return block;
    // local |control,target> basis, control = more significant bit
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(4, 4);
    u.block<2, 2>(2, 2) = block;
    return u;
}

Eigen::MatrixXcd embed_unitary(const GateOp& gate, int n) {
    check_gate_indices(gate, n);
    const Eigen::Index d = Eigen::Index{1} << n;
    Eigen::MatrixXcd u(d, d);
    // column j = gate applied to |j>
    std::vector<cplx> col(static_cast<std::size_t>(d));
    for (Eigen::Index j = 0; j < d; ++j) {
        std::fill(col.begin(), col.end(), cplx{0.0, 0.0});
        col[static_cast<std::size_t>(j)] = cplx{1.0, 0.0};
        const Eigen::Matrix2cd block = gate_block(gate);
        if (is_controlled(gate.kind)) {
            apply_block_controlled(col, n, *gate.control, gate.target, block);
        } else {
            apply_block(col, n, gate.target, block);
        }
        for (Eigen::Index i = 0; i < d; ++i) {
            u(i, j) = col[static_cast<std::size_t>(i)];
        }
    }
    return u;
}

PureState apply_gate(PureState state, const GateOp& gate) {
    const int n = state.qubits();
    check_gate_indices(gate, n);
    const Eigen::Matrix2cd block = gate_block(gate);
    if (is_controlled(gate.kind)) {
        apply_block_controlled(state.data(), n, *gate.control, gate.target,
                               block);
    } else {
        apply_block(state.data(), n, gate.target, block);
    }
    return state;
}

PureState apply_circuit(PureState state, const Circuit& circuit) {
    if (circuit.n != state.qubits()) {
        throw std::invalid_argument(
            "circuit is for " + std::to_string(circuit.n) +
            " qubits, state has " + std::to_string(state.qubits()));
    }
    for (const GateOp& gate : circuit.gates) {
        state = apply_gate(std::move(state), gate);
    }
    return state;
}

DensityOperator apply_gate(const DensityOperator& rho, const GateOp& gate) {
    const Eigen::MatrixXcd u = embed_unitary(gate, rho.qubits());
    return DensityOperator::from_matrix_unchecked(
        rho.qubits(), u * rho.matrix() * u.adjoint());
}

DensityOperator apply_circuit(const DensityOperator& rho,
                              const Circuit& circuit) {
    if (circuit.n != rho.qubits()) {
        throw std::invalid_argument(
            "circuit is for " + std::to_string(circuit.n) +
            " qubits, operator has " + std::to_string(rho.qubits()));
    }
    DensityOperator out = rho;
    for (const GateOp& gate : circuit.gates) {
        out = apply_gate(out, gate);
    }
    return out;
}

Circuit random_circuit(Rng& rng, int n, int gate_count) {
    static constexpr GateKind kinds[] = {
        GateKind::h,  GateKind::x,  GateKind::y,   GateKind::z,
        GateKind::rx, GateKind::ry, GateKind::rz,  GateKind::cnot,
        GateKind::crx, GateKind::crz};
    Circuit circuit{n, {}};
    circuit.gates.reserve(static_cast<std::size_t>(gate_count));
    for (int g = 0; g < gate_count; ++g) {
        GateKind kind = kinds[rng.index(std::size(kinds))];
        if (n < 2 && is_controlled(kind)) kind = GateKind::ry;
        GateOp op;
        op.kind = kind;
        op.target = static_cast<int>(rng.index(static_cast<std::uint64_t>(n)));
        if (is_controlled(kind)) {
            int control;
            do {
                control = static_cast<int>(rng.index(static_cast<std::uint64_t>(n)));
            } while (control == op.target);
            op.control = control;
        }
        if (is_rotation(kind)) {
            constexpr double pi = 3.14159265358979323846;
            op.angle = rng.uniform(-pi, pi);
        }
        circuit.gates.push_back(op);
    }
    return circuit;
}

}  // namespace qrobust
