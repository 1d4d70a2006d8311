#pragma once

#include "qregge/circuit.hpp"
#include "qregge/histories.hpp"

#include <string>
#include <vector>

namespace qregge {

enum class VertexKind { Initial, Gate, Final };

struct CausalVertex {
    int id = 0;
    VertexKind kind = VertexKind::Gate;
    std::vector<int> qubits;   // lines through this vertex (1 for initial/final)
    int gate_index = -1;       // position in the source circuit, gates only
    double theta = 0.0;        // chosen eigenphase; > 0 only in history graphs
    std::string label;
};

struct CausalEdge {
    int from = 0;
    int to = 0;
    int qubit = 0;
};

/// Directed acyclic wire graph of a circuit (all gates present) or of one
/// computational history (no-scattering gates excised, their wires fused).
struct CausalGraph {
    int n_qubits = 0;
    std::vector<CausalVertex> vertices;
    std::vector<CausalEdge> edges;

    std::vector<std::vector<int>> out_edges() const; // edge indices per vertex
    std::vector<std::vector<int>> in_edges() const;
    int in_degree(int v) const;
    int out_degree(int v) const;
};

/// Layered antichains; layer k holds the vertices at causal depth k.
struct Foliation {
    std::vector<std::vector<int>> layers;
    std::vector<int> depth; // per vertex id
};

/// Builds the full wiring: one initial and one final vertex per qubit, one
/// vertex per gate, edges following each qubit line in gate order.
CausalGraph wiring_dag(const Circuit& circuit);

/// Graph of one history: gates whose chosen eigenphase is zero are deleted
/// and their in/out wires fused per qubit. Remaining gate vertices carry the
/// chosen theta.
CausalGraph history_graph(const Circuit& circuit, const HistoryChoices& choices);

/// Longest-path layering, with every final vertex lifted into the last layer
/// so each maximal path crosses each layer exactly once (at a vertex on it or
/// along an edge spanning it).
Foliation cauchy_foliation(const CausalGraph& graph);

/// Structural checks: acyclic, arity per vertex kind, qubit-line continuity
/// (each edge's qubit is carried by both endpoints). Throws on violation.
void validate(const CausalGraph& graph);

/// Topological order (stable: by layer, then id).
std::vector<int> topological_order(const CausalGraph& graph);

/// True when every non-extensible path crosses every foliation layer exactly
/// once. Exhaustive walk over maximal paths; test-oracle sized graphs only.
bool foliation_covers_all_paths(const CausalGraph& graph, const Foliation& foliation);

std::string graph_to_json(const CausalGraph& graph);

} // namespace qregge
