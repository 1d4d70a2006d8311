#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace qregge {

/// Point or displacement in R^4; component 0 is the embedding time axis.
using Vec4 = std::array<double, 4>;
using Vec3 = std::array<double, 3>;

inline Vec4 operator+(const Vec4& a, const Vec4& b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]};
}
inline Vec4 operator-(const Vec4& a, const Vec4& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]};
}
inline Vec4 operator*(double s, const Vec4& a) {
    return {s * a[0], s * a[1], s * a[2], s * a[3]};
}
inline double dot(const Vec4& a, const Vec4& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}
inline double norm2(const Vec4& a) { return dot(a, a); }
inline double norm(const Vec4& a) { return std::sqrt(norm2(a)); }

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

inline double det3(const double m[3][3]) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
         - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
         + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

inline double det4(const double m[4][4]) {
    double acc = 0.0;
    for (int c = 0; c < 4; ++c) {
        double sub[3][3];
        for (int i = 1; i < 4; ++i) {
            int cc = 0;
            for (int j = 0; j < 4; ++j) {
                if (j == c) continue;
                sub[i - 1][cc++] = m[i][j];
            }
        }
        double cof = m[0][c] * det3(sub);
        acc += (c % 2 == 0) ? cof : -cof;
    }
    return acc;
}

/// Signed volume of the 4-simplex (p0..p4), positive for one orientation.
inline double simplex4_signed_volume(const Vec4& p0, const Vec4& p1, const Vec4& p2,
                                     const Vec4& p3, const Vec4& p4) {
    double m[4][4];
    const Vec4* ps[4] = {&p1, &p2, &p3, &p4};
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) m[r][c] = (*ps[r])[c] - p0[c];
    return det4(m) / 24.0;
}

/// Circumcenter of k+1 affinely independent points in R^4 (k <= 4): the point
/// equidistant from all of them within their affine hull.
/// Solves 2(p_i - p_0) . c = |p_i|^2 - |p_0|^2 in the spanned subspace.
bool circumcenter(const Vec4* pts, int count, Vec4& center);

} // namespace qregge
