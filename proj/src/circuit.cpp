#include "qregge/circuit.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qregge {

using nlohmann::json;

namespace {
constexpr double kProjTol = 1e-12;
constexpr double kNormTol = 1e-10;

std::int64_t basis_index(const BitString& bits) {
    std::int64_t idx = 0;
    for (std::size_t q = 0; q < bits.size(); ++q)
        if (bits[q]) idx |= std::int64_t(1) << q;
    return idx;
}
} // namespace

StateVector StateVector::basis(int n_qubits, const BitString& bits) {
    if ((int)bits.size() != n_qubits)
        throw std::invalid_argument("basis state length does not match qubit count");
    StateVector s;
    s.n_qubits = n_qubits;
    s.amps = Vec::Zero(std::int64_t(1) << n_qubits);
    s.amps[basis_index(bits)] = 1.0;
    return s;
}

Mat named_projector(const std::string& name) {
    if (name == "proj11") {
        Mat p = Mat::Zero(4, 4);
        p(3, 3) = 1.0;
        return p;
    }
    if (name == "singlet" || name == "triplet") {
        // singlet = |psi-><psi-| with |psi-> = (|01> - |10>)/sqrt2; triplet is
        // its complement within the two-qubit space.
        Mat s = Mat::Zero(4, 4);
        s(1, 1) = 0.5;
        s(2, 2) = 0.5;
        s(1, 2) = -0.5;
        s(2, 1) = -0.5;
        if (name == "singlet") return s;
        return Mat::Identity(4, 4) - s;
    }
    throw std::invalid_argument("unknown named projector: " + name);
}

ProjectorGate make_projector_gate(std::vector<int> targets, const Mat& projector,
                                  double theta, std::string label) {
    ProjectorGate g;
    g.targets = std::move(targets);
    g.label = std::move(label);
    const int d = g.local_dim();
    if (projector.rows() != d || projector.cols() != d)
        throw std::invalid_argument("projector dimension does not match target count");
    if (theta == 0.0) {
        g.spectrum.push_back({0.0, Mat::Identity(d, d)});
        return g;
    }
    g.spectrum.push_back({0.0, Mat::Identity(d, d) - projector});
    g.spectrum.push_back({theta, projector});
    // A full-space projector leaves an all-zero complement; drop it.
    if (approx_zero(g.spectrum[0].projector, kProjTol)) g.spectrum.erase(g.spectrum.begin());
    return g;
}

void validate(const ProjectorGate& gate, int n_qubits) {
    if (gate.targets.empty() || gate.targets.size() > 2)
        throw std::invalid_argument("gate must target 1 or 2 qubits");
    for (int t : gate.targets)
        if (t < 0 || t >= n_qubits) throw std::invalid_argument("gate target out of range");
    if (gate.targets.size() == 2 && gate.targets[0] == gate.targets[1])
        throw std::invalid_argument("gate targets must be distinct");
    if (gate.spectrum.empty()) throw std::invalid_argument("gate has empty spectrum");

    const int d = gate.local_dim();
    Mat sum = Mat::Zero(d, d);
    int zero_count = 0;
    for (const auto& term : gate.spectrum) {
        const Mat& p = term.projector;
        if (p.rows() != d || p.cols() != d)
            throw std::invalid_argument("projector dimension mismatch in spectrum");
        if (!approx_zero(p * p - p, kProjTol))
            throw std::invalid_argument("spectral term is not idempotent");
        if (!is_hermitian(p, kProjTol))
            throw std::invalid_argument("spectral term is not Hermitian");
        if (term.theta == 0.0)
            ++zero_count;
        else if (term.theta < 0.0 || term.theta >= 2.0 * M_PI)
            throw std::invalid_argument("eigenphase outside [0, 2pi)");
        sum += p;
    }
    if (zero_count != 1)
        throw std::invalid_argument("spectrum must contain exactly one zero eigenphase");
    if (!approx_zero(sum - Mat::Identity(d, d), kProjTol))
        throw std::invalid_argument("projector family is not complete");
    for (std::size_t i = 0; i < gate.spectrum.size(); ++i)
        for (std::size_t j = i + 1; j < gate.spectrum.size(); ++j)
            if (!approx_zero(gate.spectrum[i].projector * gate.spectrum[j].projector, kProjTol))
                throw std::invalid_argument("projector family is not orthogonal");
}

void validate(const Circuit& circuit) {
    if (circuit.n_qubits < 1 || circuit.n_qubits > kMaxQubits)
        throw std::invalid_argument("qubit count must be in [1, 14]");
    if ((int)circuit.initial.size() != circuit.n_qubits)
        throw std::invalid_argument("initial state length does not match qubit count");
    for (int b : circuit.initial)
        if (b != 0 && b != 1) throw std::invalid_argument("initial state bits must be 0/1");
    if (circuit.final_state) {
        if ((int)circuit.final_state->size() != circuit.n_qubits)
            throw std::invalid_argument("final state length does not match qubit count");
        for (int b : *circuit.final_state)
            if (b != 0 && b != 1) throw std::invalid_argument("final state bits must be 0/1");
    }
    for (const auto& g : circuit.gates) validate(g, circuit.n_qubits);
}

Mat gate_unitary(const ProjectorGate& gate) {
    const int d = gate.local_dim();
    Mat u = Mat::Zero(d, d);
    for (const auto& term : gate.spectrum)
        u += std::exp(cplx(0.0, -term.theta)) * term.projector;
    return u;
}

void apply_local_operator(StateVector& state, const std::vector<int>& targets, const Mat& op) {
    const std::int64_t dim = state.amps.size();
    if (targets.size() == 1) {
        const std::int64_t bit = std::int64_t(1) << targets[0];
        for (std::int64_t i = 0; i < dim; ++i) {
            if (i & bit) continue;
            const cplx a0 = state.amps[i];
            const cplx a1 = state.amps[i | bit];
            state.amps[i] = op(0, 0) * a0 + op(0, 1) * a1;
            state.amps[i | bit] = op(1, 0) * a0 + op(1, 1) * a1;
        }
        return;
    }
    // Local index convention: targets[0] is the low bit of the 4-dim space.
    const std::int64_t b0 = std::int64_t(1) << targets[0];
    const std::int64_t b1 = std::int64_t(1) << targets[1];
    for (std::int64_t i = 0; i < dim; ++i) {
        if ((i & b0) || (i & b1)) continue;
        cplx a[4] = {state.amps[i], state.amps[i | b0], state.amps[i | b1],
                     state.amps[i | b0 | b1]};
        for (int r = 0; r < 4; ++r) {
            cplx acc = 0.0;
            for (int c = 0; c < 4; ++c) acc += op(r, c) * a[c];
            std::int64_t idx = i;
            if (r & 1) idx |= b0;
            if (r & 2) idx |= b1;
            state.amps[idx] = acc;
        }
    }
}

StateVector apply_circuit(const Circuit& circuit) {
    validate(circuit);
    StateVector state = StateVector::basis(circuit.n_qubits, circuit.initial);
    for (const auto& g : circuit.gates) {
        apply_local_operator(state, g.targets, gate_unitary(g));
        if (std::abs(state.norm() - 1.0) > kNormTol)
            throw std::runtime_error("state norm drifted past tolerance after gate " + g.label);
    }
    state.amps *= std::exp(cplx(0.0, -circuit.global_phase));
    return state;
}

cplx amplitude(const Circuit& circuit) {
    if (!circuit.final_state)
        throw std::invalid_argument("amplitude requires a final state; "
                                    "use the explicit-bra history form instead");
    StateVector out = apply_circuit(circuit);
    return out.amps[basis_index(*circuit.final_state)];
}

Mat embed_operator(int n_qubits, const std::vector<int>& targets, const Mat& op) {
    const std::int64_t dim = std::int64_t(1) << n_qubits;
    Mat full = Mat::Zero(dim, dim);
    if (targets.size() == 1) {
        const std::int64_t bit = std::int64_t(1) << targets[0];
        for (std::int64_t i = 0; i < dim; ++i) {
            if (i & bit) continue;
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 2; ++c)
                    full(r ? (i | bit) : i, c ? (i | bit) : i) = op(r, c);
        }
        return full;
    }
    const std::int64_t b0 = std::int64_t(1) << targets[0];
    const std::int64_t b1 = std::int64_t(1) << targets[1];
    for (std::int64_t i = 0; i < dim; ++i) {
        if ((i & b0) || (i & b1)) continue;
        auto sub = [&](int k) {
            std::int64_t idx = i;
            if (k & 1) idx |= b0;
            if (k & 2) idx |= b1;
            return idx;
        };
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) full(sub(r), sub(c)) = op(r, c);
    }
    return full;
}

Mat circuit_unitary(const Circuit& circuit) {
    validate(circuit);
    const std::int64_t dim = std::int64_t(1) << circuit.n_qubits;
    Mat u = Mat::Identity(dim, dim);
    for (const auto& g : circuit.gates)
        u = embed_operator(circuit.n_qubits, g.targets, gate_unitary(g)) * u;
    return std::exp(cplx(0.0, -circuit.global_phase)) * u;
}

namespace {

Mat projector_from_json(const json& j, int dim) {
    if (j.is_string()) {
        Mat p = named_projector(j.get<std::string>());
        if (p.rows() != dim)
            throw std::invalid_argument("named projector does not fit gate arity");
        return p;
    }
    if (!j.is_array() || (int)j.size() != dim)
        throw std::invalid_argument("projector matrix has wrong shape");
    Mat p(dim, dim);
    for (int r = 0; r < dim; ++r) {
        if ((int)j[r].size() != dim)
            throw std::invalid_argument("projector matrix has wrong shape");
        for (int c = 0; c < dim; ++c) {
            const json& e = j[r][c];
            if (e.is_number()) {
                p(r, c) = cplx(e.get<double>(), 0.0);
            } else if (e.is_array() && e.size() == 2) {
                p(r, c) = cplx(e[0].get<double>(), e[1].get<double>());
            } else {
                throw std::invalid_argument("matrix entries must be numbers or [re, im]");
            }
        }
    }
    return p;
}

json projector_to_json(const Mat& p) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < p.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < p.cols(); ++c)
            row.push_back(json::array({p(r, c).real(), p(r, c).imag()}));
        rows.push_back(row);
    }
    return rows;
}

} // namespace

Circuit circuit_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("circuit file is not valid JSON: ") + e.what());
    }
    Circuit c;
    try {
        c.n_qubits = j.at("n_qubits").get<int>();
        c.initial = j.at("initial").get<BitString>();
        if (j.contains("final")) c.final_state = j["final"].get<BitString>();
        if (j.contains("global_phase")) c.global_phase = j["global_phase"].get<double>();
        for (const auto& jg : j.value("gates", json::array())) {
            ProjectorGate g;
            g.targets = jg.at("targets").get<std::vector<int>>();
            g.label = jg.value("label", "");
            const int dim = g.local_dim();
            if (jg.contains("spectrum")) {
                for (const auto& jt : jg["spectrum"])
                    g.spectrum.push_back(
                        {jt.at("theta").get<double>(), projector_from_json(jt.at("projector"), dim)});
                std::stable_sort(g.spectrum.begin(), g.spectrum.end(),
                                 [](const SpectralTerm& a, const SpectralTerm& b) {
                                     return a.theta < b.theta;
                                 });
            } else {
                g = make_projector_gate(g.targets, projector_from_json(jg.at("projector"), dim),
                                        jg.at("theta").get<double>(), g.label);
            }
            c.gates.push_back(std::move(g));
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("circuit file missing field: ") + e.what());
    }
    validate(c);
    return c;
}

Circuit load_circuit(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open circuit file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return circuit_from_json(ss.str());
}

std::string circuit_to_json(const Circuit& circuit) {
    json j;
    j["n_qubits"] = circuit.n_qubits;
    j["initial"] = circuit.initial;
    if (circuit.final_state) j["final"] = *circuit.final_state;
    if (circuit.global_phase != 0.0) j["global_phase"] = circuit.global_phase;
    j["gates"] = json::array();
    for (const auto& g : circuit.gates) {
        json jg;
        jg["targets"] = g.targets;
        if (!g.label.empty()) jg["label"] = g.label;
        jg["spectrum"] = json::array();
        for (const auto& t : g.spectrum)
            jg["spectrum"].push_back({{"theta", t.theta}, {"projector", projector_to_json(t.projector)}});
        j["gates"].push_back(jg);
    }
    return j.dump(2);
}

} // namespace qregge
