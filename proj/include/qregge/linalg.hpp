#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <random>

namespace qregge {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline Mat dagger(const Mat& m) { return m.adjoint(); }

inline double frobenius(const Mat& m) { return m.norm(); }

/// Kronecker product; a owns the high bits.
inline Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline bool approx_zero(const Mat& m, double tol) { return m.cwiseAbs().maxCoeff() <= tol; }

inline bool is_hermitian(const Mat& m, double tol = 1e-12) {
    return approx_zero(m - m.adjoint(), tol);
}

inline bool is_unitary(const Mat& m, double tol = 1e-10) {
    Mat id = Mat::Identity(m.rows(), m.cols());
    return approx_zero(m.adjoint() * m - id, tol);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seeded RNG wrapper; every stochastic choice in the library flows through
/// one of these so a run is reproducible from its seed.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : seed_(seed), eng_(seed) {}
    double uniform(double lo = 0.0, double hi = 1.0) {
        return std::uniform_real_distribution<double>(lo, hi)(eng_);
    }
    double normal(double sigma = 1.0) {
        return std::normal_distribution<double>(0.0, sigma)(eng_);
    }
    std::uint64_t integer() { return eng_(); }
    int integer_below(int n) { return int(eng_() % std::uint64_t(n)); }
    /// Independent child stream; drawing from it never perturbs the parent.
    Rng fork(std::uint64_t salt) const { return Rng(mix_seed(seed_, salt)); }
    std::uint64_t seed() const { return seed_; }

  private:
    std::uint64_t seed_;
    std::mt19937_64 eng_;
};

} // namespace qregge
