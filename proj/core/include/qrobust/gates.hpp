// gates.hpp
// Gate descriptions, statevector kernels and circuit evolution.
//
// Rotation convention: RX(t) = exp(-i t X / 2), and likewise for RY/RZ.
// Controlled rotations apply the rotation to the target when the control
// qubit is |1>.

#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "qrobust/state.hpp"

namespace qrobust {

enum class GateKind { h, x, y, z, cnot, rx, ry, rz, crx, crz };

const char* to_string(GateKind kind);
bool is_rotation(GateKind kind);    // rx, ry, rz, crx, crz
bool is_controlled(GateKind kind);  // cnot, crx, crz

struct GateOp {
    GateKind kind = GateKind::h;
    int target = 0;
    std::optional<int> control;
    std::optional<double> angle;  // radians; rotation kinds only

    static GateOp h(int target) { return {GateKind::h, target, {}, {}}; }
    static GateOp x(int target) { return {GateKind::x, target, {}, {}}; }
    static GateOp y(int target) { return {GateKind::y, target, {}, {}}; }
    static GateOp z(int target) { return {GateKind::z, target, {}, {}}; }
    static GateOp cnot(int control, int target) {
        return {GateKind::cnot, target, control, {}};
    }
    static GateOp rx(int target, double angle) {
        return {GateKind::rx, target, {}, angle};
    }
    static GateOp ry(int target, double angle) {
        return {GateKind::ry, target, {}, angle};
    }
    static GateOp rz(int target, double angle) {
        return {GateKind::rz, target, {}, angle};
    }
    static GateOp crx(int control, int target, double angle) {
        return {GateKind::crx, target, control, angle};
    }
    static GateOp crz(int control, int target, double angle) {
        return {GateKind::crz, target, control, angle};
    }
};

// 2x2 single-qubit block of the gate (for controlled kinds, the block that
// acts on the target when the control is |1>).
Eigen::Matrix2cd gate_block(const GateOp& gate);

// Realized unitary of the gate alone: 2x2, or 4x4 for controlled kinds in
// the local |control,target> basis (control = more significant bit).
Eigen::MatrixXcd gate_matrix(const GateOp& gate);

// Full 2^n x 2^n unitary with the gate placed at its qubit indices.
Eigen::MatrixXcd embed_unitary(const GateOp& gate, int n);

struct Circuit {
    int n = 1;
    std::vector<GateOp> gates;
};

// |psi_out> = U |psi_in>, done by index-pair sweeps on the amplitude vector.
PureState apply_gate(PureState state, const GateOp& gate);
PureState apply_circuit(PureState state, const Circuit& circuit);

// rho_out = U rho U^dag with the embedded full-space unitary.
DensityOperator apply_gate(const DensityOperator& rho, const GateOp& gate);
DensityOperator apply_circuit(const DensityOperator& rho,
                              const Circuit& circuit);

// Random circuit over all supported gate kinds (angles uniform in [-pi, pi)).
Circuit random_circuit(Rng& rng, int n, int gate_count);

}  // namespace qrobust
