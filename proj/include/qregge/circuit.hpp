#pragma once

#include "qregge/linalg.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qregge {

constexpr int kMaxQubits = 14;

/// One eigenspace of a gate: phase angle theta and the projector onto the
/// subspace scattered by e^{-i theta}.
struct SpectralTerm {
    double theta = 0.0;
    Mat projector;
};

/// Gate in projector form: U = sum_j e^{-i theta_j} P_j over an orthogonal,
/// complete projector family. Exactly one theta is zero (the no-scattering
/// eigenspace); spectra are kept sorted so it is always entry 0.
struct ProjectorGate {
    std::vector<int> targets;       // 1 or 2 qubit indices, ascending order not required
    std::vector<SpectralTerm> spectrum;
    std::string label;

    int local_dim() const { return targets.size() == 1 ? 2 : 4; }
};

/// Computational-basis product state given as bits, qubit q = bits[q].
using BitString = std::vector<int>;

struct Circuit {
    int n_qubits = 0;
    std::vector<ProjectorGate> gates;
    BitString initial;
    std::optional<BitString> final_state;
    /// Phase factor e^{-i global_phase} pulled out when spectra are shifted
    /// so their smallest eigenphase is zero (see trotterize).
    double global_phase = 0.0;
};

/// Dense amplitude vector over n qubits; qubit 0 is the least significant bit.
struct StateVector {
    int n_qubits = 0;
    Vec amps;

    static StateVector basis(int n_qubits, const BitString& bits);
    double norm() const { return amps.norm(); }
};

/// Projectors usable by name in circuit files. "triplet" and "singlet" are the
/// symmetric/antisymmetric two-qubit subspaces; "proj11" is |11><11|.
Mat named_projector(const std::string& name);

/// Two-spectrum gate from a single projector: {(0, I-P), (theta, P)}.
/// theta == 0 collapses to the identity spectrum {(0, I)}.
ProjectorGate make_projector_gate(std::vector<int> targets, const Mat& projector,
                                  double theta, std::string label = "");

/// Checks the projector-family invariants (idempotent, orthogonal, complete,
/// exactly one zero phase) to 1e-12 and target sanity; throws on violation.
void validate(const ProjectorGate& gate, int n_qubits);
void validate(const Circuit& circuit);

/// Dense unitary of one gate on its local space (2x2 or 4x4).
Mat gate_unitary(const ProjectorGate& gate);

/// Applies a local operator (unitary or projector) to the targeted qubits.
void apply_local_operator(StateVector& state, const std::vector<int>& targets, const Mat& op);

/// Runs the circuit on its initial state. Norm is checked after every gate.
StateVector apply_circuit(const Circuit& circuit);

/// <final| U |initial> including the recorded global phase.
/// Requires final_state; throws otherwise.
cplx amplitude(const Circuit& circuit);

/// Full 2^n x 2^n unitary of the circuit (global phase included).
/// Intended for small-n oracle checks.
Mat circuit_unitary(const Circuit& circuit);

/// Embeds a local gate matrix into the full 2^n space.
Mat embed_operator(int n_qubits, const std::vector<int>& targets, const Mat& op);

/// JSON circuit file round trip. Format:
/// {"n_qubits": n, "initial": [bits], "final": [bits]?,
///  "gates": [{"targets": [...], "label": "...",
///             "spectrum": [{"theta": x, "projector": "triplet"|[[..re,im..]]}]}],
///  "global_phase": x?}
Circuit circuit_from_json(const std::string& text);
Circuit load_circuit(const std::string& path);
std::string circuit_to_json(const Circuit& circuit);

} // namespace qregge
