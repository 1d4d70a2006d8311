#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qregge/circuit.hpp"

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

using namespace qregge;

namespace {

// series exponential with scaling and squaring; independent oracle for the
// spectral gate construction
Mat mat_exp(const Mat& a) {
    Mat x = a / 256.0;
    Mat sum = Mat::Identity(a.rows(), a.cols());
    Mat term = sum;
    for (int k = 1; k <= 24; ++k) {
        term = term * x / double(k);
        sum = sum + term;
    }
    for (int s = 0; s < 8; ++s) sum = sum * sum;
    return sum;
}

// entry (i, j) copies the local matrix whenever i and j agree outside the
// target bits; independent of the library's embedding
Mat embed_oracle(int n_qubits, const std::vector<int>& targets, const Mat& op) {
    const std::int64_t dim = std::int64_t(1) << n_qubits;
    std::int64_t mask = 0;
    for (int t : targets) mask |= std::int64_t(1) << t;
    auto loc = [&](std::int64_t i) {
        int l = 0;
        for (std::size_t k = 0; k < targets.size(); ++k)
            if ((i >> targets[k]) & 1) l |= 1 << k;
        return l;
    };
    Mat full = Mat::Zero(dim, dim);
    for (std::int64_t i = 0; i < dim; ++i)
        for (std::int64_t j = 0; j < dim; ++j)
            if ((i & ~mask) == (j & ~mask)) full(i, j) = op(loc(i), loc(j));
    return full;
}

std::int64_t bits_index(const BitString& bits) {
    std::int64_t idx = 0;
    for (std::size_t q = 0; q < bits.size(); ++q)
        if (bits[q]) idx |= std::int64_t(1) << q;
    return idx;
}

// random multi-term gate: orthonormal basis from a QR factorization, columns
// grouped into projectors, strictly increasing phases with entry 0 at zero
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

Circuit random_circuit(Rng& rng, int n_qubits, int n_gates, bool with_final = true) {
    Circuit c;
    c.n_qubits = n_qubits;
    c.initial.assign(n_qubits, 0);
    for (int& b : c.initial) b = rng.integer_below(2);
    if (with_final) {
        c.final_state = BitString(n_qubits, 0);
        for (int& b : *c.final_state) b = rng.integer_below(2);
    }
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
        ProjectorGate g = random_gate(rng, targets);
        g.label = "r" + std::to_string(gi);
        c.gates.push_back(std::move(g));
    }
    return c;
}

Mat circuit_oracle(const Circuit& c) {
    const std::int64_t dim = std::int64_t(1) << c.n_qubits;
    Mat u = Mat::Identity(dim, dim);
    for (const auto& g : c.gates) u = embed_oracle(c.n_qubits, g.targets, gate_unitary(g)) * u;
    return std::exp(cplx(0.0, -c.global_phase)) * u;
}

} // namespace

TEST_CASE("named projectors form orthogonal complete families") {
    const Mat t = named_projector("triplet");
    const Mat s = named_projector("singlet");
    const Mat p11 = named_projector("proj11");
    CHECK(approx_zero(t * t - t, 1e-14));
    CHECK(approx_zero(s * s - s, 1e-14));
    CHECK(approx_zero(p11 * p11 - p11, 1e-14));
    CHECK(approx_zero(t * s, 1e-14));
    CHECK(approx_zero(t + s - Mat::Identity(4, 4), 1e-14));
    CHECK_THROWS_AS(named_projector("bell"), std::invalid_argument);
}

TEST_CASE("zero-phase gate collapses to the identity") {
    const ProjectorGate g = make_projector_gate({0, 1}, named_projector("triplet"), 0.0);
    REQUIRE(g.spectrum.size() == 1);
    CHECK(approx_zero(gate_unitary(g) - Mat::Identity(4, 4), 1e-14));
}

TEST_CASE("pi phase on the triplet subspace gives minus swap") {
    Mat swap = Mat::Zero(4, 4);
    swap(0, 0) = swap(3, 3) = swap(1, 2) = swap(2, 1) = 1.0;
    const ProjectorGate g = make_projector_gate({0, 1}, named_projector("triplet"), M_PI, "swap");
    CHECK(frobenius(gate_unitary(g) + swap) < 1e-14);
}

TEST_CASE("projector gates match the matrix exponential") {
    const double theta = M_PI / 2.0;
    const ProjectorGate g = make_projector_gate({0, 1}, named_projector("proj11"), theta);
    Mat expect = Mat::Identity(4, 4);
    expect(3, 3) = std::exp(cplx(0.0, -theta));
    CHECK(frobenius(gate_unitary(g) - expect) < 1e-12);
    CHECK(frobenius(gate_unitary(g) - mat_exp(cplx(0.0, -theta) * named_projector("proj11"))) <
          1e-12);

    // random rank-1 and rank-2 projectors against the series oracle
    Rng rng(913);
    for (int trial = 0; trial < 12; ++trial) {
        Mat a(4, 4);
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) a(r, c) = cplx(rng.normal(), rng.normal());
        const Mat q = Eigen::HouseholderQR<Mat>(a).householderQ();
        const int rank = 1 + rng.integer_below(3);
        Mat p = Mat::Zero(4, 4);
        for (int k = 0; k < rank; ++k) p += q.col(k) * q.col(k).adjoint();
        const double th = rng.uniform(0.1, 6.0);
        const ProjectorGate rg = make_projector_gate({0, 1}, p, th);
        CHECK(frobenius(gate_unitary(rg) - mat_exp(cplx(0.0, -th) * p)) < 1e-11);
    }
}

TEST_CASE("random spectral gates validate and stay unitary") {
    Rng rng(4711);
    for (int trial = 0; trial < 50; ++trial) {
        const bool two = rng.integer_below(2) == 0;
        ProjectorGate g = random_gate(rng, two ? std::vector<int>{0, 1} : std::vector<int>{0});
        CHECK_NOTHROW(validate(g, 2));
        const Mat u = gate_unitary(g);
        CHECK(frobenius(dagger(u) * u - Mat::Identity(u.rows(), u.cols())) < 1e-12);
    }
}

TEST_CASE("validation rejects broken spectral families") {
    const Mat t = named_projector("triplet");
    const Mat s = named_projector("singlet");

    ProjectorGate dup; // same projector twice: neither orthogonal nor complete
    dup.targets = {0, 1};
    dup.spectrum = {{0.0, t}, {1.0, t}};
    CHECK_THROWS_AS(validate(dup, 2), std::invalid_argument);

    ProjectorGate incomplete;
    incomplete.targets = {0, 1};
    incomplete.spectrum = {{0.0, s}};
    CHECK_THROWS_AS(validate(incomplete, 2), std::invalid_argument);

    ProjectorGate two_zero;
    two_zero.targets = {0, 1};
    two_zero.spectrum = {{0.0, s}, {0.0, t}};
    CHECK_THROWS_AS(validate(two_zero, 2), std::invalid_argument);

    ProjectorGate soft; // not idempotent
    soft.targets = {0};
    soft.spectrum = {{0.0, 0.5 * Mat::Identity(2, 2)}, {1.0, 0.5 * Mat::Identity(2, 2)}};
    CHECK_THROWS_AS(validate(soft, 2), std::invalid_argument);

    ProjectorGate wrap;
    wrap.targets = {0, 1};
    wrap.spectrum = {{0.0, s}, {7.0, t}}; // exceeds 2 pi
    CHECK_THROWS_AS(validate(wrap, 2), std::invalid_argument);

    ProjectorGate same_target = make_projector_gate({0, 1}, t, 1.0);
    same_target.targets = {1, 1};
    CHECK_THROWS_AS(validate(same_target, 2), std::invalid_argument);
    same_target.targets = {0, 5};
    CHECK_THROWS_AS(validate(same_target, 2), std::invalid_argument);
}

TEST_CASE("empty circuit is the identity") {
    Circuit c;
    c.n_qubits = 2;
    c.initial = {0, 0};
    c.final_state = BitString{0, 0};
    const StateVector out = apply_circuit(c);
    CHECK(std::abs(out.amps[0] - cplx(1.0)) < 1e-15);
    CHECK(std::abs(amplitude(c) - cplx(1.0)) < 1e-15);
}

TEST_CASE("pi phase kicks the |11> component") {
    Circuit c;
    c.n_qubits = 2;
    c.initial = {1, 1};
    c.final_state = BitString{1, 1};
    c.gates.push_back(make_projector_gate({0, 1}, named_projector("proj11"), M_PI, "flip"));
    CHECK(std::abs(amplitude(c) - cplx(-1.0)) < 1e-12);
    const StateVector out = apply_circuit(c);
    CHECK(std::abs(out.amps[3] - cplx(-1.0)) < 1e-12);
}

TEST_CASE("swap phase gate has no |01> -> |01> amplitude") {
    Circuit c;
    c.n_qubits = 2;
    c.initial = {1, 0}; // qubit 0 set
    c.final_state = BitString{1, 0};
    c.gates.push_back(make_projector_gate({0, 1}, named_projector("triplet"), M_PI));
    CHECK(std::abs(amplitude(c)) < 1e-12);
    // the swapped component carries everything
    c.final_state = BitString{0, 1};
    CHECK(std::abs(amplitude(c) - cplx(-1.0)) < 1e-12);
}

TEST_CASE("random circuits match the dense matrix-product oracle") {
    Rng rng(2024);
    for (int trial = 0; trial < 12; ++trial) {
        const int n = 1 + rng.integer_below(5);
        const int gates = 1 + rng.integer_below(8);
        const Circuit c = random_circuit(rng, n, gates);
        const Mat u = circuit_oracle(c);
        const std::int64_t dim = std::int64_t(1) << n;

        CHECK(frobenius(circuit_unitary(c) - u) < 1e-11 * double(dim));

        const StateVector out = apply_circuit(c);
        CHECK(std::abs(out.norm() - 1.0) < 1e-10);
        const Vec expect = u.col(bits_index(c.initial));
        CHECK((out.amps - expect).cwiseAbs().maxCoeff() < 1e-11);

        CHECK(std::abs(amplitude(c) - u(bits_index(*c.final_state), bits_index(c.initial))) <
              1e-10);
        CHECK(std::abs(amplitude(c)) <= 1.0 + 1e-12);
    }
}

TEST_CASE("four-qubit six-gate amplitude agrees with the oracle") {
    Rng rng(66);
    const Circuit c = random_circuit(rng, 4, 6);
    const Mat u = circuit_oracle(c);
    CHECK(std::abs(amplitude(c) - u(bits_index(*c.final_state), bits_index(c.initial))) < 1e-10);
}

TEST_CASE("recorded global phase multiplies every amplitude") {
    Rng rng(31);
    Circuit c = random_circuit(rng, 2, 3);
    const cplx base = amplitude(c);
    c.global_phase = 0.7;
    CHECK(std::abs(amplitude(c) - std::exp(cplx(0.0, -0.7)) * base) < 1e-12);
    CHECK(frobenius(circuit_unitary(c) - circuit_oracle(c)) < 1e-12);
}

TEST_CASE("amplitude requires a final state") {
    Circuit c;
    c.n_qubits = 1;
    c.initial = {0};
    CHECK_THROWS_AS(amplitude(c), std::invalid_argument);
    CHECK_THROWS_AS(StateVector::basis(2, {0}), std::invalid_argument);
}

TEST_CASE("circuit validation rejects malformed inputs") {
    Circuit c;
    c.n_qubits = 0;
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
    c.n_qubits = 2;
    c.initial = {0};
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
    c.initial = {0, 2};
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
    c.initial = {0, 1};
    c.final_state = BitString{1};
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
    c.final_state = BitString{1, 0};
    CHECK_NOTHROW(validate(c));
}

TEST_CASE("json round trip preserves the circuit") {
    Rng rng(77);
    const Circuit c = random_circuit(rng, 3, 4);
    const Circuit back = circuit_from_json(circuit_to_json(c));
    REQUIRE(back.gates.size() == c.gates.size());
    CHECK(back.n_qubits == c.n_qubits);
    CHECK(back.initial == c.initial);
    CHECK(*back.final_state == *c.final_state);
    for (std::size_t g = 0; g < c.gates.size(); ++g) {
        CHECK(back.gates[g].targets == c.gates[g].targets);
        REQUIRE(back.gates[g].spectrum.size() == c.gates[g].spectrum.size());
        CHECK(frobenius(gate_unitary(back.gates[g]) - gate_unitary(c.gates[g])) < 1e-12);
    }
}

TEST_CASE("json accepts named projectors and the compact one-projector form") {
    const std::string text = R"({
      "n_qubits": 2,
      "initial": [0, 1],
      "final": [1, 0],
      "gates": [
        {"targets": [0, 1], "projector": "triplet", "theta": 3.141592653589793, "label": "sw"},
        {"targets": [0, 1], "spectrum": [
          {"theta": 0.0, "projector": [[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,0]]},
          {"theta": 1.5707963267948966, "projector": "proj11"}
        ]}
      ]
    })";
    const Circuit c = circuit_from_json(text);
    REQUIRE(c.gates.size() == 2);
    CHECK(c.gates[0].spectrum.size() == 2);
    CHECK(c.gates[1].spectrum[1].theta == doctest::Approx(M_PI / 2.0));
    CHECK(std::abs(amplitude(c)) > 0.0);

    CHECK_THROWS_AS(circuit_from_json("not json"), std::invalid_argument);
    CHECK_THROWS_AS(circuit_from_json(R"({"initial": [0]})"), std::invalid_argument);
    // named projector with the wrong arity
    CHECK_THROWS_AS(circuit_from_json(R"({
      "n_qubits": 1, "initial": [0],
      "gates": [{"targets": [0], "projector": "triplet", "theta": 1.0}]
    })"),
                    std::invalid_argument);
}
