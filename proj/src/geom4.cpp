#include "qregge/geom4.hpp"

#include <Eigen/Dense>

namespace qregge {

bool circumcenter(const Vec4* pts, int count, Vec4& center) {
    if (count < 1 || count > 5) return false;
    if (count == 1) {
        center = pts[0];
        return true;
    }
    const int k = count - 1;
    // Express the center as p0 + D^T y where D's rows span the affine hull;
    // |c - p_i| = |c - p_0| then reduces to (D D^T) y = rhs, a k x k solve.
    Eigen::MatrixXd d(k, 4);
    Eigen::VectorXd rhs(k);
    for (int i = 0; i < k; ++i) {
        const Vec4 diff = pts[i + 1] - pts[0];
        for (int c = 0; c < 4; ++c) d(i, c) = diff[c];
        rhs(i) = 0.5 * norm2(diff);
    }
    const Eigen::MatrixXd gram = d * d.transpose();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
    if (!lu.isInvertible()) return false;
    const Eigen::VectorXd y = lu.solve(rhs);
    const Eigen::VectorXd off = d.transpose() * y;
    for (int c = 0; c < 4; ++c) center[c] = pts[0][c] + off(c);
    return true;
}

} // namespace qregge
