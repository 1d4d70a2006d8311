#pragma once

#include "qregge/circuit.hpp"

namespace qregge {

/// One local term of a qubit Hamiltonian: Hermitian matrix on 1 or 2 qubits.
struct HamiltonianTerm {
    std::vector<int> support;
    Mat matrix;
};

struct HamiltonianTermSet {
    int n_qubits = 0;
    std::vector<HamiltonianTerm> terms;
};

/// First-order product formula: n sweeps of exp(-i H_l t / n) over the terms
/// in listed order. Each slice becomes a projector-form gate by Hermitian
/// eigendecomposition; eigenvalues closer than 1e-9 share an eigenspace, the
/// smallest eigenphase is shifted to zero, and the shift accumulates into the
/// circuit's global phase. The result approximates exp(-i H t) with error
/// O(|Ht|^2 / n).
Circuit trotterize(const HamiltonianTermSet& terms, double t, int n,
                   const BitString& initial, const std::optional<BitString>& final_state = {});

/// Converts one evolution slice exp(-i H dt) to projector form.
ProjectorGate slice_gate(const HamiltonianTerm& term, double dt, double& phase_shift);

/// Dense exp(-i H t) on the full register, for oracle comparisons.
Mat exact_evolution(const HamiltonianTermSet& terms, double t);

} // namespace qregge
