#include "qregge/trotter.hpp"

#include <cmath>
#include <stdexcept>

namespace qregge {

namespace {
constexpr double kClusterTol = 1e-9;
}

ProjectorGate slice_gate(const HamiltonianTerm& term, double dt, double& phase_shift) {
    if (term.support.empty() || term.support.size() > 2)
        throw std::invalid_argument("hamiltonian term must touch 1 or 2 qubits");
    const int d = term.support.size() == 1 ? 2 : 4;
    if (term.matrix.rows() != d || term.matrix.cols() != d)
        throw std::invalid_argument("hamiltonian term dimension mismatch");
    if (!is_hermitian(term.matrix, 1e-10))
        throw std::invalid_argument("hamiltonian term is not Hermitian");

    Eigen::SelfAdjointEigenSolver<Mat> es(term.matrix);
    const RVec& lam = es.eigenvalues();
    const Mat& v = es.eigenvectors();

    ProjectorGate g;
    g.targets = term.support;
    // Cluster eigenvalues, then convert to nonnegative phases relative to the
    // smallest one. dt carries the sign of t.
    std::vector<std::pair<double, Mat>> spaces;
    for (int i = 0; i < d; ++i) {
        Mat p = v.col(i) * v.col(i).adjoint();
        if (!spaces.empty() && std::abs(lam[i] - spaces.back().first) < kClusterTol) {
            spaces.back().second += p;
        } else {
            spaces.emplace_back(lam[i], p);
        }
    }
    double phase_min = spaces.front().first * dt;
    for (const auto& s : spaces) phase_min = std::min(phase_min, s.first * dt);
    phase_shift = phase_min;
    for (const auto& s : spaces) {
        double theta = s.first * dt - phase_min;
        if (theta < kClusterTol * std::abs(dt)) theta = 0.0;
        g.spectrum.push_back({theta, s.second});
    }
    std::stable_sort(g.spectrum.begin(), g.spectrum.end(),
                     [](const SpectralTerm& a, const SpectralTerm& b) { return a.theta < b.theta; });
    // Phases must stay inside [0, 2pi); reject slices that wrap.
    if (g.spectrum.back().theta >= 2.0 * M_PI)
        throw std::invalid_argument("slice spectrum spans 2pi or more; increase n");
    return g;
}

Circuit trotterize(const HamiltonianTermSet& terms, double t, int n,
                   const BitString& initial, const std::optional<BitString>& final_state) {
    if (n < 1) throw std::invalid_argument("slice count must be positive");
    if (terms.n_qubits < 1 || terms.n_qubits > kMaxQubits)
        throw std::invalid_argument("qubit count must be in [1, 14]");
    Circuit c;
    c.n_qubits = terms.n_qubits;
    c.initial = initial;
    c.final_state = final_state;
    const double dt = t / n;
    for (int s = 0; s < n; ++s) {
        for (std::size_t k = 0; k < terms.terms.size(); ++k) {
            double shift = 0.0;
            ProjectorGate g = slice_gate(terms.terms[k], dt, shift);
            g.label = "slice" + std::to_string(s) + ".term" + std::to_string(k);
            c.global_phase += shift;
            c.gates.push_back(std::move(g));
        }
    }
    validate(c);
    return c;
}

Mat exact_evolution(const HamiltonianTermSet& terms, double t) {
    const std::int64_t dim = std::int64_t(1) << terms.n_qubits;
    Mat h = Mat::Zero(dim, dim);
    for (const auto& term : terms.terms) h += embed_operator(terms.n_qubits, term.support, term.matrix);
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    Vec phases(dim);
    for (std::int64_t i = 0; i < dim; ++i) phases[i] = std::exp(cplx(0.0, -es.eigenvalues()[i] * t));
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

} // namespace qregge
