#pragma once

#include "qregge/circuit.hpp"

#include <cstdint>
#include <functional>

namespace qregge {

/// Per-gate eigenvalue indices; entry g picks a spectral term of gate g.
/// Index 0 is always the no-scattering (zero-phase) term of that gate.
using HistoryChoices = std::vector<int>;

struct ComputationalHistory {
    std::uint64_t index = 0;   // mixed-radix rank of the choice tuple
    HistoryChoices choices;
    cplx amplitude = 0.0;
    double action = 0.0;       // hbar * sum of chosen eigenphases
};

/// Mixed-radix codec between a flat rank and a per-gate choice tuple.
/// Gate 0 is the most significant digit, so ranks run in lexicographic
/// order of the tuples.
std::uint64_t history_count(const Circuit& circuit);
HistoryChoices decode_choices(const Circuit& circuit, std::uint64_t rank);
std::uint64_t encode_choices(const Circuit& circuit, const HistoryChoices& choices);

/// <final| product of chosen projectors |initial> times the phase
/// e^{-i (global_phase + sum theta)}. Requires a final state.
cplx history_amplitude(const Circuit& circuit, const HistoryChoices& choices);

/// Conditional form with an explicit bra, for circuits without final states.
cplx history_amplitude(const Circuit& circuit, const HistoryChoices& choices,
                       const StateVector& bra);

/// hbar = 1: action of a history is the sum of its chosen eigenphases.
double history_action(const Circuit& circuit, const HistoryChoices& choices);

struct EnumerateOptions {
    double amplitude_floor = 0.0;  // 0 emits everything, including zero amplitudes
    std::uint64_t cap = std::uint64_t(1) << 24;
};

/// Visits every history in rank order. With a positive floor only histories
/// with |amplitude| > floor reach the callback. Throws if the history count
/// exceeds the cap or the circuit lacks a final state.
void enumerate_histories(const Circuit& circuit, const EnumerateOptions& opts,
                         const std::function<void(const ComputationalHistory&)>& visit);

/// Same walk restricted to ranks [begin, end); partitions compose to the full
/// enumeration, so workers can split the index space deterministically.
void enumerate_range(const Circuit& circuit, std::uint64_t begin, std::uint64_t end,
                     const EnumerateOptions& opts,
                     const std::function<void(const ComputationalHistory&)>& visit);

/// Collects histories into a vector (enumerate with storage), using `threads`
/// workers over disjoint rank ranges; output order is rank order regardless
/// of the worker count.
std::vector<ComputationalHistory> collect_histories(const Circuit& circuit,
                                                    const EnumerateOptions& opts,
                                                    int threads = 1);

/// Rebuilds sum_b phase(b) P(b_n)...P(b_1) as a dense matrix and returns it;
/// callers compare against circuit_unitary.
Mat reconstruct_unitary(const Circuit& circuit);

/// Program record for algorithmic amplitudes: a self-delimiting program of
/// length `length` bits producing output `output` with path amplitude `amp`.
struct ProgramRecord {
    std::string output;
    std::uint64_t length = 0;
    cplx amp = 1.0;
};

/// A(o) = sum over programs with output o of 2^{-len/2} * amp.
cplx algorithmic_amplitude(const std::vector<ProgramRecord>& records, const std::string& output);

/// One history per JSONL line: {"choices": [...], "amplitude": [re, im],
/// "action": x}.
std::string history_to_jsonl(const ComputationalHistory& h);

} // namespace qregge
