#include "qregge/regge.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace qregge {

namespace {

constexpr double kPi = 3.14159265358979323846;
// |Q| below this times the complex-wide interval scale squared marks a hinge
// degenerate. The floor has to be measured against the whole complex, not the
// hinge's own edges: a sliver triangle between consecutive points of a null
// wire has all three intervals at jitter level, and its hinge Gram inverse
// amplifies roundoff by 1/Q. Artifact slivers sit at Q ~ 1e-12 of scale^2
// (quadratic in the transverse wire jitter) while honest hinges stay above
// ~1e-3, so 1e-6 splits the two populations cleanly.
constexpr double kHingeDegRel = 1e-6;
// a projected wedge leg closer to null than this (relative) is nudged off the
// cone so its rapidity stays finite
constexpr double kLegNullRel = 1e-13;
constexpr double kFrameDetMin = 1e-8;

// Slot of the local vertex pair (i, j) in a simplex's 10 edges, pair order
// 01,02,03,04,12,13,14,23,24,34.
constexpr int kPairSlot[5][5] = {
    {-1, 0, 1, 2, 3},
    {0, -1, 4, 5, 6},
    {1, 4, -1, 7, 8},
    {2, 5, 7, -1, 9},
    {3, 6, 8, 9, -1},
};

Vec4d to_eigen(const Vec4& v) { return Vec4d(v[0], v[1], v[2], v[3]); }

double part(std::complex<double> z, SignatureMode mode) {
    return mode == SignatureMode::Euclidean ? z.real() : z.imag();
}

// Angle subtended at the hinge by the wedge spanned by two outward leg
// projections with Gram entries q11, q12, q22. Definite wedge planes give the
// ordinary arccos; a wedge of a Minkowski plane gets a quarter turn of real
// part per light-cone crossing plus an imaginary rapidity part, with signs
// fixed so that consecutive wedges add exactly, so an interior fan always
// closes to real part 2 pi with curvature showing up in the imaginary part.
// The same table serves both signature modes: a sliver wedge pushed past
// embeddability continues analytically with constant real part (the branch
// the arccos clamp lands on), which keeps the real-part action smooth and the
// angle-derivative cancellation in the variation intact. A leg that lands on
// the light cone is nudged off it with its sign kept: the two wedges sharing
// the leg read the same clamped value, so their half-log rapidity terms still
// cancel exactly in the fan and the quarter-turn count just moves between the
// two, leaving every fan total unchanged. The only rejects are a zero Gram
// matrix and a wedge straddling the cone edge-on (divergent rapidity).
std::complex<double> wedge_angle(double q11, double q12, double q22) {
    double scale = std::max({std::abs(q11), std::abs(q22), std::abs(q12)});
    if (!(scale > 0.0))
        throw std::domain_error("degenerate wedge: zero Gram matrix");
    double floor = kLegNullRel * scale;
    if (std::abs(q11) < floor)
        q11 = q11 < 0.0 ? -floor : floor;
    if (std::abs(q22) < floor)
        q22 = q22 < 0.0 ? -floor : floor;
    double det = q11 * q22 - q12 * q12;
    if (q11 * q22 < 0.0) {
        // one leg inside the cone, one outside: a single crossing, and the
        // rapidity argument is bounded away from zero by r >= |q12| + y^2/(2r)
        double y = std::sqrt(-q11 * q22);
        double r = std::sqrt(-det);
        return {0.5 * kPi, -std::log((r - q12) / y)};
    }
    double den = std::sqrt(q11 * q22);
    if (det >= 0.0) {
        // definite wedge plane; for a negative-definite one the angle is
        // measured in the flipped metric
        double c = q12 / den;
        if (q11 < 0.0)
            c = -c;
        return {std::acos(std::clamp(c, -1.0, 1.0)), 0.0};
    }
    double r = std::sqrt(-det);
    if (q11 > 0.0) {
        double num = q12 - r;
        if (std::abs(num) <= kLegNullRel * den)
            throw std::domain_error("wedge straddles the light cone");
        if (num > 0.0)
            return {0.0, std::log(den / num)}; // legs on the same side of the cone
        return {kPi, -std::log(-num / den)};   // legs on opposite sides
    }
    if (q12 < 0.0)
        return {0.0, -std::log((r - q12) / den)}; // timelike legs, same cone
    double num = q12 - r;
    if (num <= kLegNullRel * den)
        throw std::domain_error("wedge straddles the light cone");
    return {kPi, -std::log(num / den)}; // timelike legs, opposite cones
}

// Sum of the wedge angles a hinge's incident simplices subtend at it, from
// squared intervals alone. Roles per simplex: the hinge triangle (o, t1, t2)
// and the two opposite vertices d, e; leg projections are d - o and e - o
// projected off the hinge plane, and every inner product comes from the
// polarization identity <p-o, q-o> = (s(o,p) + s(o,q) - s(p,q)) / 2.
std::complex<double> fan_sum(const SimplicialComplex& cx, const Hinge& h,
                             const std::vector<double>& s) {
    const auto& tri = cx.triangles[h.triangle];
    std::complex<double> total{0.0, 0.0};
    for (int sx : h.simplices) {
        const auto& sv = cx.simplices[sx];
        int loc[3] = {-1, -1, -1};
        int opp[2] = {-1, -1};
        int n_opp = 0;
        for (int i = 0; i < 5; ++i) {
            if (sv[i] == tri[0])
                loc[0] = i;
            else if (sv[i] == tri[1])
                loc[1] = i;
            else if (sv[i] == tri[2])
                loc[2] = i;
            else
                opp[n_opp++] = i;
        }
        const auto& se = cx.simplex_edges[sx];
        auto sval = [&](int li, int lj) { return s[se[kPairSlot[li][lj]]]; };

        double a11 = sval(loc[0], loc[1]);
        double a22 = sval(loc[0], loc[2]);
        double a12 = 0.5 * (a11 + a22 - sval(loc[1], loc[2]));
        double det = a11 * a22 - a12 * a12; // = Q/4, bounded away from 0 by the hinge check
        double b11 = sval(loc[0], opp[0]);
        double b22 = sval(loc[0], opp[1]);
        double b12 = 0.5 * (b11 + b22 - sval(opp[0], opp[1]));
        double c11 = 0.5 * (a11 + b11 - sval(loc[1], opp[0]));
        double c12 = 0.5 * (a11 + b22 - sval(loc[1], opp[1]));
        double c21 = 0.5 * (a22 + b11 - sval(loc[2], opp[0]));
        double c22 = 0.5 * (a22 + b22 - sval(loc[2], opp[1]));

        double p1 = (a22 * c11 - a12 * c21) / det;
        double p2 = (a11 * c21 - a12 * c11) / det;
        double r1 = (a22 * c12 - a12 * c22) / det;
        double r2 = (a11 * c22 - a12 * c12) / det;
        double q11 = b11 - (c11 * p1 + c21 * p2);
        double q12 = b12 - (c12 * p1 + c22 * p2);
        double q22 = b22 - (c12 * r1 + c22 * r2);
        total += wedge_angle(q11, q12, q22);
    }
    return total;
}

struct HingeCore {
    std::complex<double> eps_hat{0.0, 0.0};
    std::complex<double> dA_ds[3] = {};
    double w[3] = {0.0, 0.0, 0.0};
    double area = 0.0;
    HingeCharacter character = HingeCharacter::Null;
    bool degenerate = true;
    double closure_defect = 0.0;
};

// Full evaluation of one hinge: area and its interval derivatives from the
// squared-interval Heron form Q, the dihedral fan, and the residual weights
// w_p = part(eps_hat * dA/ds_p). A NaN reference wedge marks a hinge whose
// reference fan is itself degenerate; it is excluded outright.
HingeCore eval_hinge(const SimplicialComplex& cx, const Hinge& h, const std::vector<double>& s,
                     SignatureMode mode, std::complex<double> ref_wedge, double s_scale) {
    HingeCore core;
    if (std::isnan(ref_wedge.real()))
        return core;
    double s0 = s[h.edges[0]];
    double s1 = s[h.edges[1]];
    double s2 = s[h.edges[2]];
    if (mode == SignatureMode::Euclidean && (s0 <= 0.0 || s1 <= 0.0 || s2 <= 0.0))
        throw std::domain_error("nonpositive squared edge length in euclidean mode");
    double Q = 2.0 * (s0 * s1 + s0 * s2 + s1 * s2) - s0 * s0 - s1 * s1 - s2 * s2;
    if (s_scale == 0.0 || std::abs(Q) <= kHingeDegRel * s_scale * s_scale) {
        if (mode == SignatureMode::Euclidean)
            throw std::domain_error("degenerate hinge: zero area");
        return core; // null hinge: flagged, contributes nothing
    }
    if (mode == SignatureMode::Euclidean && Q < 0.0)
        throw std::domain_error("hinge violates the triangle inequality in euclidean mode");

    std::complex<double> A;
    if (Q > 0.0) {
        core.area = std::sqrt(Q) / 4.0;
        core.character = HingeCharacter::Spacelike;
        A = {core.area, 0.0};
    } else {
        core.area = std::sqrt(-Q) / 4.0;
        core.character = HingeCharacter::Timelike;
        A = {0.0, core.area};
    }
    core.degenerate = false;

    std::complex<double> fan = fan_sum(cx, h, s);
    core.eps_hat = ref_wedge - fan;
    if (h.interior && mode == SignatureMode::Lorentzian)
        core.closure_defect =
            Q > 0.0 ? std::abs(fan.real() - 2.0 * kPi) : std::abs(fan.imag());

    double dQ[3] = {2.0 * (s1 + s2 - s0), 2.0 * (s0 + s2 - s1), 2.0 * (s0 + s1 - s2)};
    for (int k = 0; k < 3; ++k) {
        core.dA_ds[k] = dQ[k] / (32.0 * A);
        core.w[k] = part(core.eps_hat * core.dA_ds[k], mode);
    }
    return core;
}

double hinge_action_part(const HingeCore& core, SignatureMode mode) {
    if (core.degenerate)
        return 0.0;
    std::complex<double> A = core.character == HingeCharacter::Timelike
                                 ? std::complex<double>(0.0, core.area)
                                 : std::complex<double>(core.area, 0.0);
    return part(A * core.eps_hat, mode);
}

// Squared intervals the embedding assigns to the edges under the flat vertex
// metrics, computed through the exact same per-edge routine the evaluator
// uses. Sharing the code path bit for bit is deliberate: an evaluator holding
// the flat metrics then reproduces these reference intervals exactly, so the
// flat state sits at zero deficit by construction instead of at the mercy of
// how well each hinge's fan conditioning tolerates path-dependent roundoff.
std::vector<double> reference_intervals(const SimplicialComplex& cx, const Embedding& emb,
                                        SignatureMode mode) {
    auto flat = flat_vertex_metrics(emb, mode);
    std::vector<double> s(cx.edges.size());
    for (size_t e = 0; e < cx.edges.size(); ++e) {
        int i = cx.edges[e][0];
        int j = cx.edges[e][1];
        s[e] = edge_interval(flat[i], flat[j], emb.points[j].x - emb.points[i].x);
    }
    return s;
}

// 2 pi for interior hinges; the reference-metric fan for boundary ones, so a
// flat metric has zero boundary defect even across hull corners. NaN marks a
// hinge excluded as below the mesh's numerical resolution: degenerate in the
// reference metric, reference fan failing or failing to close, or a fan so
// ill-conditioned that machine-level interval noise (~1e-16 of the lattice
// scale, from the metric polarization identities) would show up in it above
// ~1e-10. The probe measures that gradient directly, with a deterministic
// bump pattern 1e8 times the input noise floor.
// The marks are static mesh data: they depend only on the embedding, so the
// excluded set never flickers as metrics move.
std::vector<std::complex<double>> reference_wedges(const SimplicialComplex& cx,
                                                   const std::vector<Hinge>& hinge_list,
                                                   const Embedding& emb, SignatureMode mode) {
    std::vector<double> s_ref = reference_intervals(cx, emb, mode);
    double ref_scale = 0.0;
    for (double v : s_ref)
        ref_scale = std::max(ref_scale, std::abs(v));
    std::vector<double> abs_s(s_ref.size());
    for (size_t e = 0; e < s_ref.size(); ++e)
        abs_s[e] = std::abs(s_ref[e]);
    double med_scale = 0.0;
    if (!abs_s.empty()) {
        std::nth_element(abs_s.begin(), abs_s.begin() + abs_s.size() / 2, abs_s.end());
        med_scale = abs_s[abs_s.size() / 2];
    }
    // per-edge bump = 1e8 times the interval's machine-noise model, so a fan
    // difference of x under the probe predicts evaluation noise of x * 1e-8
    std::vector<double> s_probe(s_ref.size());
    for (size_t e = 0; e < s_ref.size(); ++e) {
        double sign = ((e * 2654435761u) >> 16) & 1u ? 1.0 : -1.0;
        s_probe[e] = s_ref[e] + 1e-8 * sign * (std::abs(s_ref[e]) + 0.3 * med_scale);
    }
    std::vector<std::complex<double>> ref(hinge_list.size(), {2.0 * kPi, 0.0});
    double nan = std::numeric_limits<double>::quiet_NaN();
    for (size_t h = 0; h < hinge_list.size(); ++h) {
        const auto& hg = hinge_list[h];
        double s0 = s_ref[hg.edges[0]], s1 = s_ref[hg.edges[1]], s2 = s_ref[hg.edges[2]];
        double Q = 2.0 * (s0 * s1 + s0 * s2 + s1 * s2) - s0 * s0 - s1 * s1 - s2 * s2;
        if (ref_scale == 0.0 || std::abs(Q) <= kHingeDegRel * ref_scale * ref_scale) {
            ref[h] = {nan, nan};
            continue;
        }
        try {
            std::complex<double> fan = fan_sum(cx, hg, s_ref);
            if (std::abs(fan - fan_sum(cx, hg, s_probe)) > 3e-3)
                throw std::domain_error("fan conditioning probe");
            if (hg.interior) {
                if (std::abs(fan.real() - 2.0 * kPi) > 3e-11 || std::abs(fan.imag()) > 3e-11)
                    ref[h] = {nan, nan};
            } else {
                ref[h] = fan;
            }
        } catch (const std::domain_error&) {
            ref[h] = {nan, nan};
        }
    }
    return ref;
}

HingeGeometry to_geometry(const HingeCore& core, bool interior, SignatureMode mode) {
    HingeGeometry g;
    g.area = core.area;
    g.character = core.character;
    g.boundary = !interior;
    g.degenerate = core.degenerate;
    g.closure_defect = core.closure_defect;
    g.deficit = core.degenerate ? 0.0 : hinge_action_part(core, mode) / core.area;
    return g;
}

// Euclidean Gram-Schmidt completion of a partially filled frame with the
// most independent coordinate axes, spatial axes first. Deterministic.
void complete_frame(Mat4& B, int filled) {
    const int axis_order[4] = {1, 2, 3, 0};
    for (int col = filled; col < 4; ++col) {
        for (int a : axis_order) {
            Vec4d v = Vec4d::Zero();
            v[a] = 1.0;
            for (int j = 0; j < col; ++j) {
                Vec4d bj = B.col(j);
                v -= bj * (bj.dot(v) / bj.squaredNorm());
            }
            if (v.norm() > 0.25) {
                B.col(col) = v / v.norm();
                break;
            }
        }
    }
}

// Frame column for a wire chord: unit time advance, spatial part normalized
// so the direction is exactly null in coordinates. The chord itself is only
// null up to the transverse subdivision jitter; the frame is a basis choice,
// and snapping it onto the cone is what makes the conjugated flat metric
// exactly flat, with the null diagonal entries vanishing identically rather
// than at jitter level.
Vec4d null_dir(const Vec4d& d, int point) {
    if (std::abs(d[0]) < 1e-12)
        throw std::runtime_error("wire direction with no time advance at point " +
                                 std::to_string(point));
    Vec4d v = d / d[0];
    double r = std::sqrt(v[1] * v[1] + v[2] * v[2] + v[3] * v[3]);
    if (r < 1e-12)
        throw std::runtime_error("wire direction with no spatial advance at point " +
                                 std::to_string(point));
    v[1] /= r;
    v[2] /= r;
    v[3] /= r;
    return v;
}

} // namespace

std::vector<VertexMetric> flat_vertex_metrics(const Embedding& embedding, SignatureMode mode) {
    size_t n = embedding.points.size();
    std::vector<VertexMetric> out(n);
    if (mode == SignatureMode::Euclidean)
        return out; // identity frames, identity metric

    // wire directions entering and leaving each point, in wire order
    std::vector<std::vector<Vec4d>> ins(n), outs(n);
    for (const auto& chain : embedding.wires) {
        for (size_t k = 0; k + 1 < chain.points.size(); ++k) {
            int p = chain.points[k];
            int q = chain.points[k + 1];
            Vec4d d = to_eigen(embedding.points[q].x - embedding.points[p].x);
            outs[p].push_back(d);
            ins[q].push_back(d);
        }
    }

    const Vec4d eta(-1.0, 1.0, 1.0, 1.0);
    for (size_t v = 0; v < n; ++v) {
        PointClass cls = embedding.points[v].cls;
        Mat4 B = Mat4::Identity();
        std::array<bool, 4> nulls{false, false, false, false};
        int filled = 0;
        auto expect = [&](size_t got_in, size_t got_out) {
            if (ins[v].size() != got_in || outs[v].size() != got_out)
                throw std::runtime_error("unexpected wire arity at point " + std::to_string(v) +
                                         " (" + point_class_name(cls) + ")");
        };
        switch (cls) {
        case PointClass::Gate2q:
            expect(2, 2);
            B.col(0) = null_dir(ins[v][0], int(v));
            B.col(1) = null_dir(ins[v][1], int(v));
            B.col(2) = null_dir(outs[v][0], int(v));
            B.col(3) = null_dir(outs[v][1], int(v));
            nulls = {true, true, true, true};
            filled = 4;
            break;
        case PointClass::Gate1q:
        case PointClass::Kink:
            expect(1, 1);
            B.col(0) = null_dir(ins[v][0], int(v));
            B.col(1) = null_dir(outs[v][0], int(v));
            nulls = {true, true, false, false};
            filled = 2;
            break;
        case PointClass::WireRef:
            expect(1, 1);
            B.col(0) = null_dir(ins[v][0] + outs[v][0], int(v));
            nulls = {true, false, false, false};
            filled = 1;
            break;
        case PointClass::Initial:
            expect(0, 1);
            B.col(0) = null_dir(outs[v][0], int(v));
            nulls = {true, false, false, false};
            filled = 1;
            break;
        case PointClass::Final:
            expect(1, 0);
            B.col(0) = null_dir(ins[v][0], int(v));
            nulls = {true, false, false, false};
            filled = 1;
            break;
        case PointClass::Empty:
            break; // identity frame
        }
        complete_frame(B, filled);
        double det = B.determinant();
        if (std::abs(det) < kFrameDetMin)
            throw std::runtime_error("degenerate local frame at point " + std::to_string(v));

        VertexMetric& m = out[v];
        m.basis = B;
        m.basis_inv = B.inverse();
        m.null_dirs = nulls;
        Mat4 g = B.transpose() * eta.asDiagonal() * B;
        g = 0.5 * (g + g.transpose());
        for (int a = 0; a < 4; ++a)
            if (nulls[a])
                g(a, a) = 0.0;
        m.g = g;
    }
    return out;
}

MetricGeometry make_flat_geometry(const SimplicialComplex& complex, const Embedding& embedding,
                                  const VoronoiDual& dual, SignatureMode mode) {
    MetricGeometry geom;
    geom.complex = &complex;
    geom.embedding = &embedding;
    geom.mode = mode;
    geom.metrics = flat_vertex_metrics(embedding, mode);
    size_t n = embedding.points.size();
    geom.theta.resize(n);
    geom.stress.resize(n);
    geom.volumes = dual.volumes;
    geom.volumes.resize(n, 0.0);
    for (size_t v = 0; v < n; ++v) {
        double th = embedding.points[v].theta;
        geom.theta[v] = th;
        if (th != 0.0 && geom.volumes[v] > 0.0)
            geom.stress[v].potential = th / geom.volumes[v];
    }
    return geom;
}

double edge_interval(const VertexMetric& a, const VertexMetric& b, const Vec4& edge_vector) {
    Vec4d d = to_eigen(edge_vector);
    Vec4d la = a.basis_inv * d;
    Vec4d lb = b.basis_inv * d;
    return 0.5 * (la.dot(a.g * la) + lb.dot(b.g * lb));
}

std::vector<double> edge_intervals(const MetricGeometry& geometry) {
    const auto& cx = *geometry.complex;
    const auto& pts = geometry.embedding->points;
    std::vector<double> s(cx.edges.size());
    for (size_t e = 0; e < cx.edges.size(); ++e) {
        int i = cx.edges[e][0];
        int j = cx.edges[e][1];
        s[e] = edge_interval(geometry.metrics[i], geometry.metrics[j], pts[j].x - pts[i].x);
    }
    return s;
}

std::vector<HingeGeometry> hinge_geometries(const MetricGeometry& geometry,
                                            const std::vector<Hinge>& hinge_list,
                                            const std::vector<double>& intervals) {
    const auto& cx = *geometry.complex;
    auto ref = reference_wedges(cx, hinge_list, *geometry.embedding, geometry.mode);
    double s_scale = 0.0;
    for (double v : intervals)
        s_scale = std::max(s_scale, std::abs(v));
    std::vector<HingeGeometry> out;
    out.reserve(hinge_list.size());
    for (size_t h = 0; h < hinge_list.size(); ++h) {
        HingeCore core =
            eval_hinge(cx, hinge_list[h], intervals, geometry.mode, ref[h], s_scale);
        out.push_back(to_geometry(core, hinge_list[h].interior, geometry.mode));
    }
    return out;
}

ReggeEvaluator::ReggeEvaluator(MetricGeometry geometry) : geom_(std::move(geometry)) {
    if (geom_.complex == nullptr || geom_.embedding == nullptr)
        throw std::invalid_argument("metric geometry without a complex or embedding");
    const auto& cx = *geom_.complex;
    size_t n = cx.n_points;
    if (geom_.metrics.size() != n || geom_.theta.size() != n || geom_.volumes.size() != n ||
        geom_.stress.size() != n)
        throw std::invalid_argument("metric geometry arrays do not match the complex");

    hinges_ = hinges(cx);
    vertex_edges_.resize(n);
    for (size_t e = 0; e < cx.edges.size(); ++e) {
        vertex_edges_[cx.edges[e][0]].push_back(int(e));
        vertex_edges_[cx.edges[e][1]].push_back(int(e));
    }
    vertex_hinges_.resize(n);
    dep_hinges_.resize(n);
    for (size_t h = 0; h < hinges_.size(); ++h) {
        for (int v : cx.triangles[hinges_[h].triangle])
            vertex_hinges_[v].push_back(int(h));
        for (int sx : hinges_[h].simplices)
            for (int v : cx.simplices[sx])
                dep_hinges_[v].push_back(int(h));
    }
    for (auto& list : dep_hinges_) {
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
    }
    coupled_.resize(n);
    for (size_t v = 0; v < n; ++v) {
        std::vector<int>& rows = coupled_[v];
        rows.push_back(int(v));
        for (int h : dep_hinges_[v])
            for (int u : cx.triangles[hinges_[h].triangle])
                rows.push_back(u);
        std::sort(rows.begin(), rows.end());
        rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    }

    reference_wedge_ = reference_wedges(cx, hinges_, *geom_.embedding, geom_.mode);
    edge_lambda_.resize(cx.edges.size());
    edge_outer_.resize(cx.edges.size());
    s_.resize(cx.edges.size());
    s_half_.resize(cx.edges.size());
    state_.resize(hinges_.size());
    refresh();
}

void ReggeEvaluator::refresh() {
    const auto& cx = *geom_.complex;
    const auto& pts = geom_.embedding->points;
    for (size_t e = 0; e < cx.edges.size(); ++e) {
        Vec4d d = to_eigen(pts[cx.edges[e][1]].x - pts[cx.edges[e][0]].x);
        for (int side = 0; side < 2; ++side) {
            Vec4d lam = geom_.metrics[cx.edges[e][side]].basis_inv * d;
            edge_lambda_[e][side] = lam;
            edge_outer_[e][side] = 0.5 * lam * lam.transpose();
        }
        recompute_edge(int(e));
    }
    // the degeneracy floor is frozen per refresh, not per set_metric call, so
    // incremental updates between refreshes all screen against one fixed scale
    s_scale_ = 0.0;
    for (double v : s_)
        s_scale_ = std::max(s_scale_, std::abs(v));
    for (size_t h = 0; h < hinges_.size(); ++h)
        recompute_hinge(int(h));
}

void ReggeEvaluator::recompute_edge(int e) {
    const auto& cx = *geom_.complex;
    for (int side = 0; side < 2; ++side) {
        const Vec4d& lam = edge_lambda_[e][side];
        s_half_[e][side] = 0.5 * lam.dot(geom_.metrics[cx.edges[e][side]].g * lam);
    }
    s_[e] = s_half_[e][0] + s_half_[e][1];
}

void ReggeEvaluator::recompute_hinge(int h) {
    HingeCore core =
        eval_hinge(*geom_.complex, hinges_[h], s_, geom_.mode, reference_wedge_[h], s_scale_);
    HingeState& st = state_[h];
    st.eps_hat = core.eps_hat;
    for (int k = 0; k < 3; ++k) {
        st.dA_ds[k] = core.dA_ds[k];
        st.w[k] = core.w[k];
    }
    st.area = core.area;
    st.character = core.character;
    st.degenerate = core.degenerate;
    st.closure_defect = core.closure_defect;
}

void ReggeEvaluator::set_metric(int vertex, const Mat4& g) {
    geom_.metrics[vertex].g = g;
    for (int e : vertex_edges_[vertex])
        recompute_edge(e);
    for (int h : dep_hinges_[vertex])
        recompute_hinge(h);
}

void ReggeEvaluator::set_gamma(int vertex, const Vec4d& gamma) {
    geom_.stress[vertex].gamma = gamma;
}

std::vector<HingeGeometry> ReggeEvaluator::hinge_data() const {
    std::vector<HingeGeometry> out;
    out.reserve(hinges_.size());
    for (size_t h = 0; h < hinges_.size(); ++h) {
        HingeCore core;
        core.eps_hat = state_[h].eps_hat;
        core.area = state_[h].area;
        core.character = state_[h].character;
        core.degenerate = state_[h].degenerate;
        core.closure_defect = state_[h].closure_defect;
        out.push_back(to_geometry(core, hinges_[h].interior, geom_.mode));
    }
    return out;
}

ActionBreakdown ReggeEvaluator::action() const {
    const auto& cx = *geom_.complex;
    size_t n = cx.n_points;
    ActionBreakdown bd;
    bd.vertex_gravitational.assign(n, 0.0);
    bd.vertex_matter.assign(n, 0.0);
    for (size_t h = 0; h < hinges_.size(); ++h) {
        const HingeState& st = state_[h];
        if (st.degenerate)
            continue;
        HingeCore core;
        core.eps_hat = st.eps_hat;
        core.area = st.area;
        core.character = st.character;
        core.degenerate = false;
        double contrib = hinge_action_part(core, geom_.mode) / (8.0 * kPi);
        if (hinges_[h].interior)
            bd.interior += contrib;
        else
            bd.boundary_term += contrib;
        const auto& tri = cx.triangles[hinges_[h].triangle];
        for (int i = 0; i < 3; ++i) {
            int v = tri[i];
            for (int j = 0; j < 3; ++j) {
                if (j == i)
                    continue;
                int e = hinges_[h].edges[j];
                int side = cx.edges[e][0] == v ? 0 : 1;
                bd.vertex_gravitational[v] += st.w[j] * s_half_[e][side] / (8.0 * kPi);
            }
        }
    }
    for (size_t v = 0; v < n; ++v) {
        bd.vertex_matter[v] = -geom_.theta[v];
        bd.matter -= geom_.theta[v];
    }
    return bd;
}

Mat4 ReggeEvaluator::residual(int vertex) const {
    const auto& cx = *geom_.complex;
    Mat4 res = Mat4::Zero();
    for (int h : vertex_hinges_[vertex]) {
        const HingeState& st = state_[h];
        if (st.degenerate)
            continue;
        const auto& tri = cx.triangles[hinges_[h].triangle];
        for (int i = 0; i < 3; ++i) {
            if (tri[i] != vertex)
                continue;
            for (int j = 0; j < 3; ++j) {
                if (j == i)
                    continue;
                int e = hinges_[h].edges[j];
                int side = cx.edges[e][0] == vertex ? 0 : 1;
                res -= st.w[j] * edge_outer_[e][side];
            }
        }
    }
    const VertexMetric& m = geom_.metrics[vertex];
    const StressEnergy& se = geom_.stress[vertex];
    Mat4 T = Mat4(se.gamma.asDiagonal()) - se.potential * m.g.inverse();
    res -= 4.0 * kPi * geom_.volumes[vertex] * T;
    return res;
}

double ReggeEvaluator::trace_check(int vertex) const {
    const auto& cx = *geom_.complex;
    double sum = 0.0;
    for (int h : vertex_hinges_[vertex]) {
        const HingeState& st = state_[h];
        if (st.degenerate)
            continue;
        const auto& tri = cx.triangles[hinges_[h].triangle];
        for (int i = 0; i < 3; ++i) {
            if (tri[i] != vertex)
                continue;
            for (int j = 0; j < 3; ++j) {
                if (j == i)
                    continue;
                int e = hinges_[h].edges[j];
                int side = cx.edges[e][0] == vertex ? 0 : 1;
                sum += st.w[j] * s_half_[e][side];
            }
        }
    }
    return 2.0 * sum - 32.0 * kPi * geom_.theta[vertex];
}

double ReggeEvaluator::variation(int vertex, int a, int b) const {
    const auto& cx = *geom_.complex;
    double out = 0.0;
    double mult = a == b ? 1.0 : 2.0;
    for (int h : vertex_hinges_[vertex]) {
        const HingeState& st = state_[h];
        if (st.degenerate)
            continue;
        const auto& tri = cx.triangles[hinges_[h].triangle];
        for (int i = 0; i < 3; ++i) {
            if (tri[i] != vertex)
                continue;
            for (int j = 0; j < 3; ++j) {
                if (j == i)
                    continue;
                int e = hinges_[h].edges[j];
                int side = cx.edges[e][0] == vertex ? 0 : 1;
                out += st.w[j] * edge_outer_[e][side](a, b) * mult;
            }
        }
    }
    return out / (8.0 * kPi);
}

ActionBreakdown gravitational_action(const MetricGeometry& geometry) {
    return ReggeEvaluator(geometry).action();
}

double matter_action(const CausalGraph& history) {
    double sum = 0.0;
    for (const auto& v : history.vertices)
        sum -= v.theta;
    return sum;
}

double matter_action(const MetricGeometry& geometry) {
    double sum = 0.0;
    for (double th : geometry.theta)
        sum -= th;
    return sum;
}

double action_variation(const MetricGeometry& geometry, int vertex, int a, int b) {
    return ReggeEvaluator(geometry).variation(vertex, a, b);
}

Mat4 einstein_regge_residual(const MetricGeometry& geometry, int vertex) {
    return ReggeEvaluator(geometry).residual(vertex);
}

double trace_check(const MetricGeometry& geometry, int vertex) {
    return ReggeEvaluator(geometry).trace_check(vertex);
}

MinAreaReport min_area_check(const MetricGeometry& geometry) {
    MinAreaReport report;
    if (!geometry.positive_phase) {
        report.enabled = false;
        report.note = "minimum-area screening applies to the positive-phase convention only";
        return report;
    }
    ReggeEvaluator eval(geometry);
    const auto& cx = *geometry.complex;
    const auto& hinge_list = eval.hinge_list();
    auto data = eval.hinge_data();
    for (size_t h = 0; h < hinge_list.size(); ++h) {
        if (data[h].degenerate || data[h].area >= 1.0)
            continue;
        for (int v : cx.triangles[hinge_list[h].triangle]) {
            if (geometry.theta[v] >= kPi - 1e-12) {
                report.flags.push_back({hinge_list[h].triangle, v, data[h].area});
                break;
            }
        }
    }
    report.note = report.flags.empty()
                      ? "no sub-Planck hinge adjoins a bit-flip event"
                      : std::to_string(report.flags.size()) +
                            " hinge(s) below the Planck area adjoin a bit-flip event";
    return report;
}

std::string residual_report_csv(const MetricGeometry& geometry) {
    ReggeEvaluator eval(geometry);
    const auto& pts = geometry.embedding->points;
    std::ostringstream os;
    os << std::setprecision(17);
    os << "point,class,hull,theta,volume,r00,r01,r02,r03,r11,r12,r13,r22,r23,r33,trace_check\n";
    for (int v = 0; v < geometry.complex->n_points; ++v) {
        Mat4 r = eval.residual(v);
        os << v << ',' << point_class_name(pts[v].cls) << ','
           << int(geometry.complex->on_hull[v]) << ',' << geometry.theta[v] << ','
           << geometry.volumes[v];
        for (int a = 0; a < 4; ++a)
            for (int b = a; b < 4; ++b)
                os << ',' << r(a, b);
        os << ',' << eval.trace_check(v) << '\n';
    }
    return os.str();
}

} // namespace qregge
