#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qregge/histories.hpp"

#include <json.hpp>

#include <cmath>
#include <map>
#include <vector>

using namespace qregge;

namespace {

ProjectorGate random_gate(Rng& rng, std::vector<int> targets, int n_groups = 0) {
    const int d = targets.size() == 1 ? 2 : 4;
    Mat a(d, d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) a(r, c) = cplx(rng.normal(), rng.normal());
    const Mat q = Eigen::HouseholderQR<Mat>(a).householderQ();
    if (n_groups <= 0) n_groups = 2 + (d > 2 ? rng.integer_below(3) : 0);
    if (n_groups > d) n_groups = d;
    std::vector<Mat> proj(n_groups, Mat::Zero(d, d));
    for (int i = 0; i < d; ++i) {
        const int g = i < n_groups ? i : n_groups - 1;
        proj[g] += q.col(i) * q.col(i).adjoint();
    }
    ProjectorGate gate;
    gate.targets = std::move(targets);
    gate.spectrum.push_back({0.0, proj[0]});
    double theta = 0.0;
    for (int k = 1; k < n_groups; ++k) {
        theta += 0.3 + rng.uniform(0.0, 5.0 / n_groups);
        gate.spectrum.push_back({theta, proj[k]});
    }
    return gate;
}

Circuit random_circuit(Rng& rng, int n_qubits, int n_gates) {
    Circuit c;
    c.n_qubits = n_qubits;
    c.initial.assign(n_qubits, 0);
    for (int& b : c.initial) b = rng.integer_below(2);
    c.final_state = BitString(n_qubits, 0);
    for (int& b : *c.final_state) b = rng.integer_below(2);
    for (int gi = 0; gi < n_gates; ++gi) {
        std::vector<int> targets;
        if (n_qubits >= 2 && rng.integer_below(3) > 0) {
            int t0 = rng.integer_below(n_qubits);
            int t1 = rng.integer_below(n_qubits);
            while (t1 == t0) t1 = rng.integer_below(n_qubits);
            targets = {t0, t1};
        } else {
            targets = {rng.integer_below(n_qubits)};
        }
        c.gates.push_back(random_gate(rng, targets));
    }
    return c;
}

Circuit two_flip_circuit() {
    Circuit c;
    c.n_qubits = 2;
    c.initial = {0, 0};
    c.final_state = BitString{0, 0};
    c.gates.push_back(make_projector_gate({0, 1}, named_projector("proj11"), M_PI, "a"));
    c.gates.push_back(make_projector_gate({0, 1}, named_projector("triplet"), M_PI, "b"));
    return c;
}

} // namespace

TEST_CASE("history count is the product of spectrum sizes") {
    Circuit c = two_flip_circuit();
    CHECK(history_count(c) == 4);
    // an identity gate branches nowhere
    c.gates.push_back(make_projector_gate({0}, Mat::Zero(2, 2), 0.0, "id"));
    CHECK(history_count(c) == 4);
    Rng rng(5);
    Circuit three;
    three.n_qubits = 2;
    three.initial = {0, 0};
    three.final_state = BitString{0, 0};
    for (int g = 0; g < 3; ++g) three.gates.push_back(random_gate(rng, {0, 1}, 3));
    CHECK(history_count(three) == 27);
}

TEST_CASE("choice codec is a rank-order bijection") {
    Rng rng(17);
    Circuit c;
    c.n_qubits = 2;
    c.initial = {0, 0};
    c.final_state = BitString{0, 0};
    c.gates.push_back(random_gate(rng, {0, 1}, 3));
    c.gates.push_back(random_gate(rng, {0}, 2));
    c.gates.push_back(random_gate(rng, {0, 1}, 4));
    const std::uint64_t total = history_count(c);
    REQUIRE(total == 24);
    HistoryChoices prev;
    for (std::uint64_t rank = 0; rank < total; ++rank) {
        const HistoryChoices ch = decode_choices(c, rank);
        CHECK(encode_choices(c, ch) == rank);
        if (rank > 0) CHECK(std::lexicographical_compare(prev.begin(), prev.end(), ch.begin(), ch.end()));
        prev = ch;
    }
    // gate 0 is the most significant digit
    CHECK(decode_choices(c, 0) == HistoryChoices{0, 0, 0});
    CHECK(decode_choices(c, 8) == HistoryChoices{1, 0, 0});
    CHECK_THROWS_AS(decode_choices(c, total), std::out_of_range);
    CHECK_THROWS_AS(encode_choices(c, {0, 0, 4}), std::out_of_range);
    CHECK_THROWS_AS(encode_choices(c, {0, 0}), std::invalid_argument);
}

TEST_CASE("actions add the chosen eigenphases") {
    const Circuit c = two_flip_circuit();
    CHECK(history_action(c, {0, 0}) == 0.0);
    CHECK(history_action(c, {1, 1}) == doctest::Approx(2.0 * M_PI));
    // independent re-summation from the spectra
    Rng rng(23);
    const Circuit r = random_circuit(rng, 3, 5);
    for (std::uint64_t rank = 0; rank < history_count(r); rank += 7) {
        const HistoryChoices ch = decode_choices(r, rank);
        double expect = 0.0;
        for (std::size_t g = 0; g < r.gates.size(); ++g)
            expect += r.gates[g].spectrum[ch[g]].theta;
        CHECK(history_action(r, ch) == doctest::Approx(expect).epsilon(1e-15));
    }
}

TEST_CASE("action is additive under circuit concatenation") {
    Rng rng(29);
    const Circuit a = random_circuit(rng, 2, 3);
    const Circuit b = random_circuit(rng, 2, 2);
    Circuit both = a;
    both.gates.insert(both.gates.end(), b.gates.begin(), b.gates.end());
    const HistoryChoices ca = {1, 0, 1};
    const HistoryChoices cb = {1, 1};
    HistoryChoices cc = ca;
    cc.insert(cc.end(), cb.begin(), cb.end());
    CHECK(history_action(both, cc) ==
          doctest::Approx(history_action(a, ca) + history_action(b, cb)));
}

TEST_CASE("projector chains act as expected on basis states") {
    Circuit c;
    c.n_qubits = 2;
    c.initial = {0, 0};
    c.final_state = BitString{0, 0};
    c.gates.push_back(make_projector_gate({0, 1}, named_projector("proj11"), 1.0, "a"));
    c.gates.push_back(make_projector_gate({0, 1}, named_projector("proj11"), 2.0, "b"));
    // zero choices leave |00> alone: amplitude is <00|00> = 1
    CHECK(std::abs(history_amplitude(c, {0, 0}) - cplx(1.0)) < 1e-14);
    // any chain through the |11> projector annihilates |00>
    CHECK(std::abs(history_amplitude(c, {1, 0})) < 1e-15);
    CHECK(std::abs(history_amplitude(c, {1, 1})) < 1e-15);
}

TEST_CASE("history amplitudes sum to the circuit amplitude") {
    Rng rng(101);
    for (int trial = 0; trial < 5; ++trial) {
        const Circuit c = random_circuit(rng, 3, 5);
        cplx sum = 0.0;
        enumerate_histories(c, {}, [&](const ComputationalHistory& h) { sum += h.amplitude; });
        CHECK(std::abs(sum - amplitude(c)) < 1e-10);
    }
}

TEST_CASE("twenty-seven three-point histories reconstruct the unitary") {
    Rng rng(7);
    Circuit c;
    c.n_qubits = 2;
    c.initial = {0, 1};
    c.final_state = BitString{1, 1};
    for (int g = 0; g < 3; ++g) c.gates.push_back(random_gate(rng, {0, 1}, 3));
    std::uint64_t seen = 0;
    cplx sum = 0.0;
    enumerate_histories(c, {}, [&](const ComputationalHistory& h) {
        ++seen;
        sum += h.amplitude;
    });
    CHECK(seen == 27);
    CHECK(std::abs(sum - amplitude(c)) < 1e-12);
    CHECK(frobenius(reconstruct_unitary(c) - circuit_unitary(c)) < 1e-12);
}

TEST_CASE("reconstruction residual vanishes across circuit families") {
    Rng rng(55);
    Circuit one;
    one.n_qubits = 2;
    one.initial = {0, 0};
    one.final_state = BitString{0, 0};
    one.gates.push_back(random_gate(rng, {0, 1}));
    CHECK(frobenius(reconstruct_unitary(one) - circuit_unitary(one)) < 1e-14);

    // commuting diagonal gates
    Circuit diag;
    diag.n_qubits = 2;
    diag.initial = {0, 0};
    diag.final_state = BitString{0, 0};
    diag.gates.push_back(make_projector_gate({0, 1}, named_projector("proj11"), 0.8));
    Mat p0 = Mat::Zero(2, 2);
    p0(1, 1) = 1.0;
    diag.gates.push_back(make_projector_gate({0}, p0, 1.1));
    diag.gates.push_back(make_projector_gate({1}, p0, 0.4));
    CHECK(frobenius(reconstruct_unitary(diag) - circuit_unitary(diag)) < 1e-12);

    const Circuit big = random_circuit(rng, 4, 6);
    CHECK(frobenius(reconstruct_unitary(big) - circuit_unitary(big)) < 1e-10);
}

TEST_CASE("enumeration is deterministic and partition invariant") {
    Rng rng(202);
    const Circuit c = random_circuit(rng, 3, 4);
    const std::uint64_t total = history_count(c);
    std::vector<ComputationalHistory> whole;
    enumerate_histories(c, {}, [&](const ComputationalHistory& h) { whole.push_back(h); });
    REQUIRE(whole.size() == total);
    for (std::size_t i = 0; i < whole.size(); ++i) CHECK(whole[i].index == i);

    std::vector<ComputationalHistory> parts;
    const std::uint64_t cut1 = total / 3, cut2 = 2 * total / 3;
    const std::pair<std::uint64_t, std::uint64_t> ranges[] = {{0, cut1}, {cut1, cut2}, {cut2, total}};
    for (auto [lo, hi] : ranges)
        enumerate_range(c, lo, hi, {}, [&](const ComputationalHistory& h) { parts.push_back(h); });
    REQUIRE(parts.size() == whole.size());
    for (std::size_t i = 0; i < whole.size(); ++i) {
        CHECK(parts[i].index == whole[i].index);
        CHECK(parts[i].choices == whole[i].choices);
        CHECK(parts[i].amplitude == whole[i].amplitude);
        CHECK(parts[i].action == whole[i].action);
    }

    const auto threaded = collect_histories(c, {}, 4);
    REQUIRE(threaded.size() == whole.size());
    for (std::size_t i = 0; i < whole.size(); ++i) {
        CHECK(threaded[i].index == whole[i].index);
        CHECK(threaded[i].amplitude == whole[i].amplitude);
    }
}

TEST_CASE("amplitude floor prunes while floor zero emits everything") {
    Circuit c = two_flip_circuit();
    std::size_t all = 0, kept = 0;
    enumerate_histories(c, {}, [&](const ComputationalHistory&) { ++all; });
    EnumerateOptions floor;
    floor.amplitude_floor = 0.5;
    enumerate_histories(c, floor, [&](const ComputationalHistory& h) {
        ++kept;
        CHECK(std::abs(h.amplitude) > 0.5);
    });
    CHECK(all == 4);
    CHECK(kept < all);
}

TEST_CASE("enumeration cap and missing final state are reported") {
    Circuit c = two_flip_circuit();
    EnumerateOptions tight;
    tight.cap = 3;
    CHECK_THROWS_AS(enumerate_histories(c, tight, [](const ComputationalHistory&) {}),
                    std::length_error);
    CHECK_THROWS_AS(collect_histories(c, tight, 2), std::length_error);

    c.final_state.reset();
    CHECK_THROWS_AS(enumerate_histories(c, {}, [](const ComputationalHistory&) {}),
                    std::invalid_argument);
    CHECK_THROWS_AS(history_amplitude(c, {0, 0}), std::invalid_argument);
    // the explicit-bra form still works without a final state; note the
    // zero-phase term of the triplet gate is the singlet projector, which
    // annihilates |00>, so ask for the scattering branch instead
    const StateVector bra = StateVector::basis(2, {0, 0});
    CHECK(std::abs(history_amplitude(c, {0, 0}, bra)) < 1e-14);
    CHECK(std::abs(history_amplitude(c, {0, 1}, bra) - cplx(-1.0)) < 1e-14);
}

TEST_CASE("algorithmic amplitudes weight programs by two to the minus half length") {
    std::vector<ProgramRecord> recs = {{"x", 2, 1.0}};
    CHECK(std::abs(algorithmic_amplitude(recs, "x") - cplx(0.5)) < 1e-15);
    recs.push_back({"x", 2, -1.0});
    CHECK(std::abs(algorithmic_amplitude(recs, "x")) < 1e-15);
    CHECK(std::abs(algorithmic_amplitude(recs, "y")) == 0.0);

    Rng rng(404);
    std::vector<ProgramRecord> table;
    const std::vector<std::string> outs = {"a", "b", "c", "d"};
    for (int i = 0; i < 20; ++i)
        table.push_back({outs[rng.integer_below(4)], std::uint64_t(rng.integer_below(12)),
                         cplx(rng.normal(), rng.normal())});
    // naive per-output double loop
    std::map<std::string, cplx> expect;
    for (const auto& o : outs)
        for (const auto& r : table)
            if (r.output == o) expect[o] += std::pow(2.0, -double(r.length) / 2.0) * r.amp;
    for (const auto& o : outs)
        CHECK(std::abs(algorithmic_amplitude(table, o) - expect[o]) < 1e-13);
}

TEST_CASE("jsonl lines carry choices amplitude and action") {
    const Circuit c = two_flip_circuit();
    std::vector<std::string> lines;
    enumerate_histories(c, {}, [&](const ComputationalHistory& h) {
        lines.push_back(history_to_jsonl(h));
    });
    REQUIRE(lines.size() == 4);
    const auto j = nlohmann::json::parse(lines[3]);
    CHECK(j["choices"] == std::vector<int>({1, 1}));
    CHECK(j["action"].get<double>() == doctest::Approx(2.0 * M_PI));
    CHECK(j["amplitude"].size() == 2);
}
