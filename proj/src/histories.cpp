#include "qregge/histories.hpp"

#include <json.hpp>

#include <cmath>
#include <stdexcept>
#include <thread>

namespace qregge {

std::uint64_t history_count(const Circuit& circuit) {
    std::uint64_t count = 1;
    for (const auto& g : circuit.gates) {
        const std::uint64_t m = g.spectrum.size();
        if (count > (std::uint64_t(-1) / m)) throw std::overflow_error("history count overflows");
        count *= m;
    }
    return count;
}

HistoryChoices decode_choices(const Circuit& circuit, std::uint64_t rank) {
    HistoryChoices choices(circuit.gates.size(), 0);
    for (std::size_t g = circuit.gates.size(); g-- > 0;) {
        const std::uint64_t m = circuit.gates[g].spectrum.size();
        choices[g] = int(rank % m);
        rank /= m;
    }
    if (rank != 0) throw std::out_of_range("history rank out of range");
    return choices;
}

std::uint64_t encode_choices(const Circuit& circuit, const HistoryChoices& choices) {
    if (choices.size() != circuit.gates.size())
        throw std::invalid_argument("choice tuple length does not match gate count");
    std::uint64_t rank = 0;
    for (std::size_t g = 0; g < circuit.gates.size(); ++g) {
        const std::uint64_t m = circuit.gates[g].spectrum.size();
        if (choices[g] < 0 || std::uint64_t(choices[g]) >= m)
            throw std::out_of_range("choice index outside gate spectrum");
        rank = rank * m + std::uint64_t(choices[g]);
    }
    return rank;
}

double history_action(const Circuit& circuit, const HistoryChoices& choices) {
    if (choices.size() != circuit.gates.size())
        throw std::invalid_argument("choice tuple length does not match gate count");
    double action = 0.0;
    for (std::size_t g = 0; g < circuit.gates.size(); ++g)
        action += circuit.gates[g].spectrum[choices[g]].theta;
    return action;
}

namespace {

/// Projector chain applied to |initial>, shared by both amplitude forms.
StateVector chain_state(const Circuit& circuit, const HistoryChoices& choices, double& phase) {
    StateVector state = StateVector::basis(circuit.n_qubits, circuit.initial);
    phase = circuit.global_phase;
    for (std::size_t g = 0; g < circuit.gates.size(); ++g) {
        const auto& term = circuit.gates[g].spectrum.at(choices[g]);
        phase += term.theta;
        apply_local_operator(state, circuit.gates[g].targets, term.projector);
    }
    return state;
}

} // namespace

cplx history_amplitude(const Circuit& circuit, const HistoryChoices& choices,
                       const StateVector& bra) {
    double phase = 0.0;
    StateVector ket = chain_state(circuit, choices, phase);
    return std::exp(cplx(0.0, -phase)) * bra.amps.dot(ket.amps);
}

cplx history_amplitude(const Circuit& circuit, const HistoryChoices& choices) {
    if (!circuit.final_state)
        throw std::invalid_argument("history amplitude requires a final state; "
                                    "use the explicit-bra overload instead");
    return history_amplitude(circuit, choices,
                             StateVector::basis(circuit.n_qubits, *circuit.final_state));
}

void enumerate_range(const Circuit& circuit, std::uint64_t begin, std::uint64_t end,
                     const EnumerateOptions& opts,
                     const std::function<void(const ComputationalHistory&)>& visit) {
    if (!circuit.final_state)
        throw std::invalid_argument("history enumeration requires a final state");
    const std::uint64_t total = history_count(circuit);
    if (total > opts.cap)
        throw std::length_error("history count " + std::to_string(total) +
                                " exceeds enumeration cap " + std::to_string(opts.cap));
    end = std::min(end, total);
    const StateVector bra = StateVector::basis(circuit.n_qubits, *circuit.final_state);
    for (std::uint64_t rank = begin; rank < end; ++rank) {
        ComputationalHistory h;
        h.index = rank;
        h.choices = decode_choices(circuit, rank);
        h.amplitude = history_amplitude(circuit, h.choices, bra);
        h.action = history_action(circuit, h.choices);
        if (opts.amplitude_floor > 0.0 && std::abs(h.amplitude) <= opts.amplitude_floor) continue;
        visit(h);
    }
}

void enumerate_histories(const Circuit& circuit, const EnumerateOptions& opts,
                         const std::function<void(const ComputationalHistory&)>& visit) {
    enumerate_range(circuit, 0, history_count(circuit), opts, visit);
}

std::vector<ComputationalHistory> collect_histories(const Circuit& circuit,
                                                    const EnumerateOptions& opts,
                                                    int threads) {
    const std::uint64_t total = history_count(circuit);
    if (total > opts.cap)
        throw std::length_error("history count " + std::to_string(total) +
                                " exceeds enumeration cap " + std::to_string(opts.cap));
    threads = std::max(1, std::min<int>(threads, 64));
    std::vector<std::vector<ComputationalHistory>> parts(threads);
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (total + threads - 1) / std::uint64_t(threads);
    for (int w = 0; w < threads; ++w) {
        const std::uint64_t lo = std::uint64_t(w) * chunk;
        const std::uint64_t hi = std::min(total, lo + chunk);
        pool.emplace_back([&, w, lo, hi] {
            enumerate_range(circuit, lo, hi, opts,
                            [&](const ComputationalHistory& h) { parts[w].push_back(h); });
        });
    }
    for (auto& t : pool) t.join();
    std::vector<ComputationalHistory> all;
    for (auto& p : parts)
        for (auto& h : p) all.push_back(std::move(h));
    return all;
}

Mat reconstruct_unitary(const Circuit& circuit) {
    const std::int64_t dim = std::int64_t(1) << circuit.n_qubits;
    const std::uint64_t total = history_count(circuit);
    if (total > (std::uint64_t(1) << 24)) throw std::length_error("history count exceeds cap");
    Mat sum = Mat::Zero(dim, dim);
    for (std::uint64_t rank = 0; rank < total; ++rank) {
        HistoryChoices choices = decode_choices(circuit, rank);
        Mat term = Mat::Identity(dim, dim);
        double phase = circuit.global_phase;
        for (std::size_t g = 0; g < circuit.gates.size(); ++g) {
            const auto& t = circuit.gates[g].spectrum[choices[g]];
            phase += t.theta;
            term = embed_operator(circuit.n_qubits, circuit.gates[g].targets, t.projector) * term;
        }
        sum += std::exp(cplx(0.0, -phase)) * term;
    }
    return sum;
}

cplx algorithmic_amplitude(const std::vector<ProgramRecord>& records, const std::string& output) {
    cplx acc = 0.0;
    for (const auto& r : records)
        if (r.output == output) acc += std::pow(2.0, -double(r.length) / 2.0) * r.amp;
    return acc;
}

std::string history_to_jsonl(const ComputationalHistory& h) {
    nlohmann::json j;
    j["choices"] = h.choices;
    j["amplitude"] = {h.amplitude.real(), h.amplitude.imag()};
    j["action"] = h.action;
    return j.dump();
}

} // namespace qregge
