#include "qregge/causal_graph.hpp"

#include <json.hpp>

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace qregge {

std::vector<std::vector<int>> CausalGraph::out_edges() const {
    std::vector<std::vector<int>> out(vertices.size());
    for (std::size_t e = 0; e < edges.size(); ++e) out[edges[e].from].push_back(int(e));
    return out;
}

std::vector<std::vector<int>> CausalGraph::in_edges() const {
    std::vector<std::vector<int>> in(vertices.size());
    for (std::size_t e = 0; e < edges.size(); ++e) in[edges[e].to].push_back(int(e));
    return in;
}

int CausalGraph::in_degree(int v) const {
    int d = 0;
    for (const auto& e : edges) d += (e.to == v);
    return d;
}

int CausalGraph::out_degree(int v) const {
    int d = 0;
    for (const auto& e : edges) d += (e.from == v);
    return d;
}

namespace {

CausalGraph build_graph(const Circuit& circuit, const HistoryChoices* choices) {
    CausalGraph g;
    g.n_qubits = circuit.n_qubits;
    std::vector<int> head(circuit.n_qubits); // vertex currently at the end of each line
    for (int q = 0; q < circuit.n_qubits; ++q) {
        CausalVertex v;
        v.id = int(g.vertices.size());
        v.kind = VertexKind::Initial;
        v.qubits = {q};
        v.label = "in" + std::to_string(q);
        head[q] = v.id;
        g.vertices.push_back(std::move(v));
    }
    for (std::size_t gi = 0; gi < circuit.gates.size(); ++gi) {
        const auto& gate = circuit.gates[gi];
        double theta = 0.0;
        if (choices) theta = gate.spectrum.at((*choices)[gi]).theta;
        // A zero chosen eigenphase means no scattering event: the vertex is
        // excised and its wires spring straight through.
        if (choices && theta == 0.0) continue;
        CausalVertex v;
        v.id = int(g.vertices.size());
        v.kind = VertexKind::Gate;
        v.qubits = gate.targets;
        v.gate_index = int(gi);
        v.theta = choices ? theta : 0.0;
        v.label = gate.label.empty() ? "g" + std::to_string(gi) : gate.label;
        g.vertices.push_back(v);
        for (int q : gate.targets) {
            g.edges.push_back({head[q], v.id, q});
            head[q] = v.id;
        }
    }
    for (int q = 0; q < circuit.n_qubits; ++q) {
        CausalVertex v;
        v.id = int(g.vertices.size());
        v.kind = VertexKind::Final;
        v.qubits = {q};
        v.label = "out" + std::to_string(q);
        g.vertices.push_back(v);
        g.edges.push_back({head[q], v.id, q});
    }
    return g;
}

} // namespace

CausalGraph wiring_dag(const Circuit& circuit) {
    validate(circuit);
    return build_graph(circuit, nullptr);
}

CausalGraph history_graph(const Circuit& circuit, const HistoryChoices& choices) {
    validate(circuit);
    if (choices.size() != circuit.gates.size())
        throw std::invalid_argument("choice tuple length does not match gate count");
    for (std::size_t g = 0; g < choices.size(); ++g)
        if (choices[g] < 0 || std::size_t(choices[g]) >= circuit.gates[g].spectrum.size())
            throw std::out_of_range("choice index outside gate spectrum");
    return build_graph(circuit, &choices);
}

std::vector<int> topological_order(const CausalGraph& graph) {
    const int n = int(graph.vertices.size());
    std::vector<int> indeg(n, 0);
    auto out = graph.out_edges();
    for (const auto& e : graph.edges) ++indeg[e.to];
    std::vector<int> queue, order;
    for (int v = 0; v < n; ++v)
        if (indeg[v] == 0) queue.push_back(v);
    while (!queue.empty()) {
        std::sort(queue.begin(), queue.end(), std::greater<int>());
        int v = queue.back();
        queue.pop_back();
        order.push_back(v);
        for (int e : out[v])
            if (--indeg[graph.edges[e].to] == 0) queue.push_back(graph.edges[e].to);
    }
    if (int(order.size()) != n) throw std::runtime_error("causal graph contains a cycle");
    return order;
}

Foliation cauchy_foliation(const CausalGraph& graph) {
    const std::vector<int> order = topological_order(graph);
    Foliation f;
    f.depth.assign(graph.vertices.size(), 0);
    auto in = graph.in_edges();
    for (int v : order)
        for (int e : in[v]) f.depth[v] = std::max(f.depth[v], f.depth[graph.edges[e].from] + 1);
    // Every sink is a final vertex; lifting all finals to the deepest layer
    // makes the layers proper Cauchy slices (each maximal path starts at depth
    // 0 and ends at the last layer, crossing every layer between).
    int deepest = 0;
    for (int d : f.depth) deepest = std::max(deepest, d);
    for (const auto& v : graph.vertices)
        if (v.kind == VertexKind::Final) f.depth[v.id] = deepest;
    f.layers.assign(deepest + 1, {});
    for (const auto& v : graph.vertices) f.layers[f.depth[v.id]].push_back(v.id);
    return f;
}

void validate(const CausalGraph& graph) {
    for (std::size_t i = 0; i < graph.vertices.size(); ++i)
        if (graph.vertices[i].id != int(i))
            throw std::runtime_error("vertex ids must be dense and ordered");
    for (const auto& e : graph.edges) {
        if (e.from < 0 || e.from >= int(graph.vertices.size()) || e.to < 0 ||
            e.to >= int(graph.vertices.size()))
            throw std::runtime_error("edge endpoint out of range");
        auto carries = [&](int v) {
            const auto& qs = graph.vertices[v].qubits;
            return std::find(qs.begin(), qs.end(), e.qubit) != qs.end();
        };
        if (!carries(e.from) || !carries(e.to))
            throw std::runtime_error("edge qubit not carried by both endpoints");
    }
    topological_order(graph); // throws on cycles
    for (const auto& v : graph.vertices) {
        const int in = graph.in_degree(v.id);
        const int out = graph.out_degree(v.id);
        switch (v.kind) {
            case VertexKind::Initial:
                if (in != 0 || out != 1)
                    throw std::runtime_error("initial vertex must have arity 0 in / 1 out");
                break;
            case VertexKind::Final:
                if (out != 0 || in != 1)
                    throw std::runtime_error("final vertex must have arity 1 in / 0 out");
                break;
            case VertexKind::Gate: {
                const int arity = int(v.qubits.size());
                if (in != arity || out != arity)
                    throw std::runtime_error("gate vertex arity does not match its line count");
                break;
            }
        }
    }
}

bool foliation_covers_all_paths(const CausalGraph& graph, const Foliation& foliation) {
    auto out = graph.out_edges();
    const int top = int(foliation.layers.size()) - 1;
    // Walk every maximal path; count crossings of each layer (vertex on the
    // layer, or edge spanning it).
    std::vector<int> path;
    bool ok = true;
    std::function<void(int)> walk = [&](int v) {
        path.push_back(v);
        if (out[v].empty()) {
            for (int k = 0; k <= top && ok; ++k) {
                int crossings = 0;
                for (std::size_t i = 0; i < path.size(); ++i) {
                    if (foliation.depth[path[i]] == k) ++crossings;
                    if (i + 1 < path.size() && foliation.depth[path[i]] < k &&
                        foliation.depth[path[i + 1]] > k)
                        ++crossings;
                }
                if (crossings != 1) ok = false;
            }
        } else {
            for (int e : out[v]) {
                if (!ok) break;
                walk(graph.edges[e].to);
            }
        }
        path.pop_back();
    };
    for (const auto& v : graph.vertices) {
        if (graph.in_degree(v.id) == 0) walk(v.id);
        if (!ok) break;
    }
    return ok;
}

std::string graph_to_json(const CausalGraph& graph) {
    nlohmann::json j;
    j["n_qubits"] = graph.n_qubits;
    j["vertices"] = nlohmann::json::array();
    for (const auto& v : graph.vertices) {
        nlohmann::json jv;
        jv["id"] = v.id;
        jv["kind"] = v.kind == VertexKind::Initial ? "initial"
                     : v.kind == VertexKind::Gate  ? "gate"
                                                   : "final";
        jv["qubits"] = v.qubits;
        if (v.kind == VertexKind::Gate) {
            jv["gate_index"] = v.gate_index;
            jv["theta"] = v.theta;
        }
        if (!v.label.empty()) jv["label"] = v.label;
        j["vertices"].push_back(jv);
    }
    j["edges"] = nlohmann::json::array();
    for (const auto& e : graph.edges)
        j["edges"].push_back({{"from", e.from}, {"to", e.to}, {"qubit", e.qubit}});
    return j.dump(2);
}

} // namespace qregge
