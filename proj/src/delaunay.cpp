#include "qregge/delaunay.hpp"

#include "qregge/linalg.hpp"

#include <json.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace qregge {

namespace {

std::uint64_t pack2(int a, int b, std::uint64_t k) { return std::uint64_t(a) * k + b; }
std::uint64_t pack3(int a, int b, int c, std::uint64_t k) {
    return (std::uint64_t(a) * k + b) * k + c;
}
std::uint64_t pack4(int a, int b, int c, int d, std::uint64_t k) {
    return ((std::uint64_t(a) * k + b) * k + c) * k + d;
}

struct BwSimplex {
    std::array<int, 5> v; // ascending
    double osign = 1.0;   // sign of the signed volume in stored order
    bool alive = true;
};

// Gaussian elimination determinant in extended precision, for predicate
// evaluations that land inside the double-precision noise window.
template <int N>
long double det_ld(long double m[N][N]) {
    long double det = 1.0L;
    for (int col = 0; col < N; ++col) {
        int piv = col;
        for (int r = col + 1; r < N; ++r)
            if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
        if (piv != col) {
            for (int j = 0; j < N; ++j) std::swap(m[piv][j], m[col][j]);
            det = -det;
        }
        if (m[col][col] == 0.0L) return 0.0L;
        det *= m[col][col];
        for (int r = col + 1; r < N; ++r) {
            const long double f = m[r][col] / m[col][col];
            for (int j = col; j < N; ++j) m[r][j] -= f * m[col][j];
        }
    }
    return det;
}

// In-sphere determinant, translated to the query point. Rows are
// [p_i - q, |p_i - q|^2]; translation avoids the cancellation that plain
// circumcenter caching suffers. `noise` is the rounding-error scale of the
// result: partial-pivoted LU keeps the backward error row-relative, so the
// Hadamard product of row norms with a generous constant bounds it. Results
// inside the double window are re-derived in extended precision, which keeps
// near-tie restarts rare even on grid-like data full of near-degeneracies.
double insphere_det(const Vec4 corner[5], const Vec4& q, double& noise) {
    Eigen::Matrix<double, 5, 5> M;
    double mag = 1.0;
    for (int i = 0; i < 5; ++i) {
        const Vec4 d = corner[i] - q;
        for (int c = 0; c < 4; ++c) M(i, c) = d[c];
        M(i, 4) = norm2(d);
        mag *= std::sqrt(norm2(d) + M(i, 4) * M(i, 4));
    }
    noise = 1e-12 * mag;
    const double det = M.determinant();
    if (std::abs(det) > noise) return det;
    long double m[5][5];
    for (int i = 0; i < 5; ++i) {
        long double s = 0.0L;
        for (int c = 0; c < 4; ++c) {
            m[i][c] = (long double)(corner[i][c]) - (long double)(q[c]);
            s += m[i][c] * m[i][c];
        }
        m[i][4] = s;
    }
    noise = 1e-16 * mag;
    return double(det_ld<5>(m));
}

// Signed volume of (f0,f1,f2,f3,x) with its own rounding-noise scale, also
// escalated to extended precision inside the double window.
double facet_side(const Vec4& f0, const Vec4& f1, const Vec4& f2, const Vec4& f3, const Vec4& x,
                  double& noise) {
    const double mag = norm(f1 - f0) * norm(f2 - f0) * norm(f3 - f0) * norm(x - f0) / 24.0;
    noise = 1e-12 * mag;
    const double vol = simplex4_signed_volume(f0, f1, f2, f3, x);
    if (std::abs(vol) > noise) return vol;
    long double m[4][4];
    const Vec4* rows[4] = {&f1, &f2, &f3, &x};
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            m[r][c] = (long double)((*rows[r])[c]) - (long double)(f0[c]);
    noise = 1e-16 * mag;
    return double(det_ld<4>(m) / 24.0L);
}

// Greedily pick five well-spread affinely independent points; returns the
// absolute 4-volume achieved (0 when the cloud is lower-dimensional).
double greedy_simplex(const std::vector<Vec4>& p, int n, std::array<int, 5>& idx) {
    idx = {0, -1, -1, -1, -1};
    double best = 0;
    for (int j = 1; j < n; ++j) {
        const double m = norm2(p[j] - p[0]);
        if (m > best) best = m, idx[1] = j;
    }
    if (idx[1] < 0) return 0;
    const Vec4 d1 = p[idx[1]] - p[0];
    best = 0;
    for (int j = 1; j < n; ++j) {
        const Vec4 dj = p[j] - p[0];
        const double m = norm2(d1) * norm2(dj) - dot(d1, dj) * dot(d1, dj);
        if (m > best) best = m, idx[2] = j;
    }
    if (idx[2] < 0) return 0;
    const Vec4 d2 = p[idx[2]] - p[0];
    best = 0;
    for (int j = 1; j < n; ++j) {
        const Vec4 dj = p[j] - p[0];
        double g[3][3] = {{dot(d1, d1), dot(d1, d2), dot(d1, dj)},
                          {dot(d2, d1), dot(d2, d2), dot(d2, dj)},
                          {dot(dj, d1), dot(dj, d2), dot(dj, dj)}};
        const double m = det3(g);
        if (m > best) best = m, idx[3] = j;
    }
    if (idx[3] < 0) return 0;
    best = 0;
    for (int j = 1; j < n; ++j) {
        const double m =
            std::abs(simplex4_signed_volume(p[0], p[idx[1]], p[idx[2]], p[idx[3]], p[j]));
        if (m > best) best = m, idx[4] = j;
    }
    return idx[4] < 0 ? 0 : best;
}

// sign of insphere_det for a strictly interior query of a positively
// oriented simplex, fixed by one reference evaluation
double inside_sign() {
    static const double s = [] {
        Vec4 c[5] = {{0, 0, 0, 0}, {1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}};
        Vec4 q{0.2, 0.2, 0.2, 0.2};
        double noise;
        const double d = insphere_det(c, q, noise);
        return d > 0 ? 1.0 : -1.0;
    }();
    return s;
}

// One full Bowyer-Watson pass over normalized points. The hull is closed by
// ghost simplices sharing a symbolic vertex "at infinity" (id n): a point
// conflicts with a ghost exactly when it lies strictly outside the hull
// across that ghost's real facet. Keeping the far side symbolic avoids both
// the mixed-scale conditioning and the correctness hole a concrete bounding
// simplex has once near-flat quintuples (routine along collinear wire points)
// grow circumspheres big enough to swallow its corners. Points are inserted
// in a salted random order: consecutive collinear runs (wire chains, grid
// lines) would otherwise pile up rank-deficient transient hull facets that no
// amount of jitter can make decidable.
// Returns false on a degeneracy the caller should re-jitter.
bool bowyer_watson(const std::vector<Vec4>& p, int n, std::uint64_t salt,
                   std::vector<std::array<int, 5>>& out, std::string& reason) {
    std::array<int, 5> init;
    if (greedy_simplex(p, n, init) <= 0) {
        reason = "points span fewer than four dimensions";
        return false;
    }
    std::sort(init.begin(), init.end());
    // fixed interior reference: the hull only grows, so the initial simplex
    // centroid stays strictly inside it for the whole run
    Vec4 c0{0, 0, 0, 0};
    for (int i : init) c0 = c0 + 0.2 * p[i];

    auto orientation = [&](const std::array<int, 5>& v) {
        return simplex4_signed_volume(p[v[0]], p[v[1]], p[v[2]], p[v[3]], p[v[4]]);
    };
    const double isign = inside_sign();
    // -1 outside, +1 inside, 0 tie (retry with fresh jitter)
    auto contains = [&](const BwSimplex& s, const Vec4& q) {
        if (s.v[4] == n) { // ghost: conflict iff q is beyond the hull facet
            const Vec4 &a = p[s.v[0]], &b = p[s.v[1]], &c = p[s.v[2]], &d = p[s.v[3]];
            double nq, nc;
            const double vq = facet_side(a, b, c, d, q, nq);
            const double vc = facet_side(a, b, c, d, c0, nc);
            if (std::abs(vq) <= nq || std::abs(vc) <= nc) return 0;
            return (vq > 0) != (vc > 0) ? 1 : -1;
        }
        Vec4 corner[5];
        for (int i = 0; i < 5; ++i) corner[i] = p[s.v[i]];
        double noise;
        const double det = insphere_det(corner, q, noise);
        if (std::abs(det) <= noise) return 0;
        return det * s.osign * isign > 0 ? 1 : -1;
    };

    std::vector<BwSimplex> simps;
    {
        BwSimplex s;
        s.v = init;
        s.osign = orientation(s.v) > 0 ? 1.0 : -1.0;
        simps.push_back(s);
        for (int skip = 0; skip < 5; ++skip) { // one ghost per initial facet
            BwSimplex g;
            int c = 0;
            for (int i = 0; i < 5; ++i)
                if (i != skip) g.v[c++] = init[i];
            g.v[4] = n;
            g.osign = 0;
            simps.push_back(g);
        }
    }

    const std::uint64_t K = std::uint64_t(n) + 8;

    std::vector<int> order;
    order.reserve(n - 5);
    for (int q = 0; q < n; ++q)
        if (q != init[0] && q != init[1] && q != init[2] && q != init[3] && q != init[4])
            order.push_back(q);
    Rng shuffle_rng(salt);
    for (int i = int(order.size()) - 1; i > 0; --i)
        std::swap(order[i], order[int(shuffle_rng.uniform() * (i + 1))]);

    for (int q : order) {
        std::vector<int> bad;
        for (std::size_t s = 0; s < simps.size(); ++s) {
            if (!simps[s].alive) continue;
            const int side = contains(simps[s], p[q]);
            if (side == 0) {
                reason = "co-spherical tie at point " + std::to_string(q) + " vs cell {" +
                         std::to_string(simps[s].v[0]) + "," + std::to_string(simps[s].v[1]) +
                         "," + std::to_string(simps[s].v[2]) + "," + std::to_string(simps[s].v[3]) +
                         "," + std::to_string(simps[s].v[4]) + "}";
                return false;
            }
            if (side > 0) bad.push_back(int(s));
        }
        if (bad.empty()) {
            reason = "no conflicting cell at point " + std::to_string(q);
            return false;
        }

        // the cavity must be one facet-connected star-shaped component;
        // anything else means the predicate misjudged a near-tie
        std::map<std::uint64_t, std::vector<int>> by_facet;
        auto facet_key = [&](const std::array<int, 5>& v, int skip) {
            std::array<int, 4> f;
            int c = 0;
            for (int i = 0; i < 5; ++i)
                if (i != skip) f[c++] = v[i];
            return pack4(f[0], f[1], f[2], f[3], K);
        };
        for (int s : bad)
            for (int skip = 0; skip < 5; ++skip) by_facet[facet_key(simps[s].v, skip)].push_back(s);
        std::map<int, bool> in_component;
        std::vector<int> stack{bad[0]};
        in_component[bad[0]] = true;
        while (!stack.empty()) {
            const int s = stack.back();
            stack.pop_back();
            for (int skip = 0; skip < 5; ++skip)
                for (int o : by_facet[facet_key(simps[s].v, skip)])
                    if (!in_component.count(o)) {
                        in_component[o] = true;
                        stack.push_back(o);
                    }
        }
        if (in_component.size() != bad.size()) {
            reason = "disconnected insertion cavity at point " + std::to_string(q);
            return false;
        }

        for (int s : bad) simps[s].alive = false;
        for (const auto& [key, owners] : by_facet) {
            if (owners.size() != 1) continue; // facet interior to the cavity
            const int s = owners[0];
            int skip = -1;
            for (int i = 0; i < 5; ++i)
                if (facet_key(simps[s].v, i) == key) skip = i;
            BwSimplex ns;
            int c = 0;
            ns.v[c++] = q;
            for (int i = 0; i < 5; ++i)
                if (i != skip) ns.v[c++] = simps[s].v[i];
            std::sort(ns.v.begin(), ns.v.end());
            if (ns.v[4] == n) { // facet reached the hull: new ghost
                ns.osign = 0;
                simps.push_back(ns);
                continue;
            }
            // fills whose orientation sign is lost in rounding mean the cavity
            // predicates contradicted each other; flat-stratified data (grid
            // faces, wire lines) legitimately produces transient slivers, so
            // only true sign loss trips this
            double fnoise;
            const double vol = facet_side(p[ns.v[0]], p[ns.v[1]], p[ns.v[2]], p[ns.v[3]],
                                          p[ns.v[4]], fnoise);
            if (std::abs(vol) <= fnoise) {
                reason = "flat cavity fill at point " + std::to_string(q);
                return false;
            }
            ns.osign = vol > 0 ? 1.0 : -1.0;
            simps.push_back(ns);
        }
    }

    out.clear();
    for (const auto& s : simps) {
        if (!s.alive) continue;
        if (s.v[4] >= n) continue; // sorted ids: any super vertex lands last
        out.push_back(s.v);
    }
    if (out.empty()) {
        reason = "points span fewer than four dimensions";
        return false;
    }
    return true;
}

SimplicialComplex build_tables(std::vector<std::array<int, 5>> simplices, int n_points,
                               const Embedding& embedding) {
    SimplicialComplex c;
    c.n_points = n_points;
    std::sort(simplices.begin(), simplices.end());
    c.simplices = std::move(simplices);
    const std::uint64_t K = std::uint64_t(n_points) + 1;

    c.vertex_simplices.assign(n_points, {});
    c.simplex_edges.resize(c.simplices.size());
    c.simplex_triangles.resize(c.simplices.size());

    std::unordered_map<std::uint64_t, int> tet_ids;
    std::unordered_map<std::uint64_t, int> tet_count;

    for (std::size_t s = 0; s < c.simplices.size(); ++s) {
        const auto& v = c.simplices[s];
        for (int i = 0; i < 5; ++i) c.vertex_simplices[v[i]].push_back(int(s));
        int epos = 0, tpos = 0;
        for (int i = 0; i < 5; ++i)
            for (int j = i + 1; j < 5; ++j) {
                const std::uint64_t key = pack2(v[i], v[j], K);
                auto it = c.edge_ids.find(key);
                int id;
                if (it == c.edge_ids.end()) {
                    id = int(c.edges.size());
                    c.edge_ids.emplace(key, id);
                    c.edges.push_back({v[i], v[j]});
                } else {
                    id = it->second;
                }
                c.simplex_edges[s][epos++] = id;
            }
        for (int i = 0; i < 5; ++i)
            for (int j = i + 1; j < 5; ++j)
                for (int k = j + 1; k < 5; ++k) {
                    const std::uint64_t key = pack3(v[i], v[j], v[k], K);
                    auto it = c.triangle_ids.find(key);
                    int id;
                    if (it == c.triangle_ids.end()) {
                        id = int(c.triangles.size());
                        c.triangle_ids.emplace(key, id);
                        c.triangles.push_back({v[i], v[j], v[k]});
                        c.triangle_simplices.push_back({});
                    } else {
                        id = it->second;
                    }
                    c.simplex_triangles[s][tpos++] = id;
                    c.triangle_simplices[id].push_back(int(s));
                }
        for (int skip = 0; skip < 5; ++skip) {
            std::array<int, 4> t;
            int pos = 0;
            for (int i = 0; i < 5; ++i)
                if (i != skip) t[pos++] = v[i];
            const std::uint64_t key = pack4(t[0], t[1], t[2], t[3], K);
            if (tet_ids.find(key) == tet_ids.end()) {
                tet_ids.emplace(key, int(c.tetrahedra.size()));
                c.tetrahedra.push_back(t);
                tet_count[key] = 0;
            }
            ++tet_count[key];
        }
    }

    c.on_hull.assign(n_points, 0);
    for (const auto& [key, cnt] : tet_count) {
        if (cnt != 1) continue;
        const auto& t = c.tetrahedra[tet_ids[key]];
        for (int v : t) c.on_hull[v] = 1;
    }

    c.edge_tags.assign(c.edges.size(), EdgeTag::Fill);
    for (const auto& seg : embedding.wire_segments()) {
        const int id = c.edge_index(seg[0], seg[1]);
        if (id >= 0) c.edge_tags[id] = EdgeTag::WireSegment;
    }
    return c;
}

} // namespace

int SimplicialComplex::edge_index(int a, int b) const {
    if (a > b) std::swap(a, b);
    auto it = edge_ids.find(pack2(a, b, std::uint64_t(n_points) + 1));
    return it == edge_ids.end() ? -1 : it->second;
}

int SimplicialComplex::triangle_index(int a, int b, int c) const {
    std::array<int, 3> t{a, b, c};
    std::sort(t.begin(), t.end());
    auto it = triangle_ids.find(pack3(t[0], t[1], t[2], std::uint64_t(n_points) + 1));
    return it == triangle_ids.end() ? -1 : it->second;
}

std::vector<std::array<int, 2>> missing_wire_segments(const SimplicialComplex& complex,
                                                      const Embedding& embedding) {
    std::vector<std::array<int, 2>> missing;
    for (const auto& seg : embedding.wire_segments())
        if (complex.edge_index(seg[0], seg[1]) < 0) missing.push_back(seg);
    return missing;
}

SimplicialComplex delaunay(Embedding& embedding, int max_refine_rounds) {
    if (int(embedding.points.size()) < 5)
        throw std::invalid_argument("triangulation needs at least 5 points");

    for (int refine = 0; refine <= max_refine_rounds; ++refine) {
        const int n = int(embedding.points.size());
        // normalize for conditioning; connectivity is scale invariant
        Vec4 lo = embedding.points[0].x, hi = embedding.points[0].x;
        for (const auto& pt : embedding.points)
            for (int c = 0; c < 4; ++c) {
                lo[c] = std::min(lo[c], pt.x[c]);
                hi[c] = std::max(hi[c], pt.x[c]);
            }
        double ext = 1e-30;
        for (int c = 0; c < 4; ++c) ext = std::max(ext, hi[c] - lo[c]);
        std::vector<Vec4> pts(n);
        for (int i = 0; i < n; ++i)
            for (int c = 0; c < 4; ++c) pts[i][c] = (embedding.points[i].x[c] - lo[c]) / ext;

        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (norm2(pts[i] - pts[j]) < 1e-24)
                    throw std::runtime_error("duplicate points " + std::to_string(i) + "," +
                                             std::to_string(j) + " in embedding");

        std::array<int, 5> span;
        if (greedy_simplex(pts, n, span) < 1e-12)
            throw std::runtime_error("points span fewer than four dimensions");

        std::vector<std::array<int, 5>> raw;
        std::string reason = "?";
        bool ok = false;
        static const double amps[] = {0, 1e-9, 1e-9, 3e-8, 3e-8, 9e-7, 9e-7, 2.7e-5, 2.7e-5};
        for (int round = 0; round < 9 && !ok; ++round) {
            std::vector<Vec4> jittered = pts;
            if (amps[round] > 0) {
                Rng jr(mix_seed(embedding.seed, 0xde1a + std::uint64_t(round)));
                for (auto& q : jittered)
                    for (int ccd = 0; ccd < 4; ++ccd) q[ccd] += amps[round] * (jr.uniform() - 0.5);
            }
            ok = bowyer_watson(jittered, n, mix_seed(embedding.seed, 0xd1c3 + std::uint64_t(round)),
                               raw, reason);
            if (ok && amps[round] > 0) {
                // degeneracy was resolved by perturbing the points, so keep the
                // perturbed coordinates: downstream geometry (circumcenters, dual
                // volumes) must see the positions this complex was built from
                for (int i = 0; i < n; ++i)
                    for (int c = 0; c < 4; ++c)
                        embedding.points[i].x[c] = lo[c] + jittered[i][c] * ext;
            }
        }
        if (!ok) throw std::runtime_error("triangulation failed: " + reason);

        SimplicialComplex complex = build_tables(std::move(raw), n, embedding);
        const auto missing = missing_wire_segments(complex, embedding);
        if (missing.empty()) return complex;
        if (refine == max_refine_rounds) {
            std::string names;
            for (const auto& seg : missing) {
                for (const auto& w : embedding.wires)
                    for (std::size_t i = 0; i + 1 < w.points.size(); ++i)
                        if (w.points[i] == seg[0] && w.points[i + 1] == seg[1])
                            names += " wire" + std::to_string(w.graph_edge) + "(q" +
                                     std::to_string(w.qubit) + ")";
            }
            throw std::runtime_error("wire recovery failed after refinement:" + names);
        }
        // split every missing segment at its midpoint and retriangulate
        for (const auto& seg : missing) {
            for (auto& w : embedding.wires)
                for (std::size_t i = 0; i + 1 < w.points.size(); ++i) {
                    if (w.points[i] != seg[0] || w.points[i + 1] != seg[1]) continue;
                    LatticePoint mp;
                    mp.cls = PointClass::WireRef;
                    mp.x = 0.5 * (embedding.points[seg[0]].x + embedding.points[seg[1]].x);
                    const int id = int(embedding.points.size());
                    embedding.points.push_back(mp);
                    w.points.insert(w.points.begin() + i + 1, id);
                    i = w.points.size(); // this wire is done
                }
        }
    }
    throw std::logic_error("unreachable");
}

std::vector<Hinge> hinges(const SimplicialComplex& c) {
    std::vector<Hinge> out(c.triangles.size());
    const std::uint64_t K = std::uint64_t(c.n_points) + 1;
    for (std::size_t t = 0; t < c.triangles.size(); ++t) {
        Hinge& h = out[t];
        h.triangle = int(t);
        const auto& tri = c.triangles[t];
        h.edges = {c.edge_index(tri[1], tri[2]), c.edge_index(tri[0], tri[2]),
                   c.edge_index(tri[0], tri[1])};
        const auto& inc = c.triangle_simplices[t];

        // fan walk across shared tetrahedra (triangle plus one extra vertex)
        std::map<std::uint64_t, std::vector<std::pair<int, int>>> by_tet; // key -> (simplex, other extra)
        for (int s : inc) {
            std::array<int, 2> extra;
            int pos = 0;
            for (int v : c.simplices[s])
                if (v != tri[0] && v != tri[1] && v != tri[2]) extra[pos++] = v;
            for (int e = 0; e < 2; ++e) {
                std::array<int, 4> tet{tri[0], tri[1], tri[2], extra[e]};
                std::sort(tet.begin(), tet.end());
                by_tet[pack4(tet[0], tet[1], tet[2], tet[3], K)].push_back({s, extra[1 - e]});
            }
        }
        for (const auto& [key, lst] : by_tet)
            if (lst.size() > 2)
                throw std::runtime_error("non-manifold hinge fan at triangle " + std::to_string(t));

        std::uint64_t start_key = by_tet.begin()->first;
        bool open = false;
        for (const auto& [key, lst] : by_tet)
            if (lst.size() == 1) {
                start_key = key;
                open = true;
                break;
            }
        std::map<int, bool> used;
        std::uint64_t cur_key = start_key;
        int cur_simplex = by_tet[cur_key][0].first;
        while (true) {
            if (used.count(cur_simplex)) break;
            used[cur_simplex] = true;
            h.simplices.push_back(cur_simplex);
            // step across cur_simplex to its other tetrahedron
            int other_extra = -1;
            for (const auto& [s, oe] : by_tet[cur_key])
                if (s == cur_simplex) other_extra = oe;
            std::array<int, 4> tet{tri[0], tri[1], tri[2], other_extra};
            std::sort(tet.begin(), tet.end());
            const std::uint64_t next_key = pack4(tet[0], tet[1], tet[2], tet[3], K);
            int next_simplex = -1;
            for (const auto& [s, oe] : by_tet[next_key])
                if (s != cur_simplex) next_simplex = s;
            if (next_simplex < 0) break; // hit the boundary: open fan
            cur_key = next_key;
            cur_simplex = next_simplex;
        }
        if (h.simplices.size() != inc.size())
            throw std::runtime_error("disconnected hinge fan at triangle " + std::to_string(t));
        h.interior = !open && inc.size() >= 2;
        if (inc.size() == 1) h.interior = false;
    }
    return out;
}

void validate(const SimplicialComplex& c, const Embedding& embedding) {
    if (c.n_points != int(embedding.points.size()))
        throw std::runtime_error("complex and embedding disagree on point count");
    for (int v = 0; v < c.n_points; ++v)
        if (c.vertex_simplices[v].empty())
            throw std::runtime_error("isolated point " + std::to_string(v));
    const std::uint64_t K = std::uint64_t(c.n_points) + 1;
    std::unordered_map<std::uint64_t, int> tet_count;
    for (const auto& s : c.simplices)
        for (int skip = 0; skip < 5; ++skip) {
            std::array<int, 4> t;
            int pos = 0;
            for (int i = 0; i < 5; ++i)
                if (i != skip) t[pos++] = s[i];
            ++tet_count[pack4(t[0], t[1], t[2], t[3], K)];
        }
    for (const auto& [key, cnt] : tet_count)
        if (cnt > 2) throw std::runtime_error("tetrahedron shared by more than two simplices");
    const long long chi = (long long)c.n_points - (long long)c.edges.size() +
                          (long long)c.triangles.size() - (long long)c.tetrahedra.size() +
                          (long long)c.simplices.size();
    if (chi != 1)
        throw std::runtime_error("Euler characteristic " + std::to_string(chi) +
                                 " (expected 1 for a 4-ball)");
}

int empty_sphere_violations(const SimplicialComplex& c, const Embedding& embedding,
                            double rel_tol) {
    // judged by the lifted determinant rather than an explicit circumcenter:
    // slivers have well-defined in-sphere sides long after their circumcenter
    // stops being representable
    const double isign = inside_sign();
    int bad = 0;
    for (const auto& s : c.simplices) {
        Vec4 corner[5];
        for (int i = 0; i < 5; ++i) corner[i] = embedding.points[s[i]].x;
        const double osign = simplex4_signed_volume(corner[0], corner[1], corner[2], corner[3],
                                                    corner[4]) > 0
                                 ? 1.0
                                 : -1.0;
        for (int q = 0; q < c.n_points; ++q) {
            if (q == s[0] || q == s[1] || q == s[2] || q == s[3] || q == s[4]) continue;
            const Vec4& x = embedding.points[q].x;
            double mag = 1.0;
            for (int i = 0; i < 5; ++i) {
                const double d2 = norm2(corner[i] - x);
                mag *= std::sqrt(d2 + d2 * d2);
            }
            double noise;
            const double det = insphere_det(corner, x, noise);
            if (det * osign * isign > rel_tol * mag) {
                ++bad;
                break;
            }
        }
    }
    return bad;
}

std::string complex_to_json(const SimplicialComplex& c, const Embedding& embedding) {
    nlohmann::json j = nlohmann::json::parse(embedding_to_json(embedding));
    j["simplices"] = c.simplices;
    j["edges"] = nlohmann::json::array();
    for (std::size_t e = 0; e < c.edges.size(); ++e)
        j["edges"].push_back({{"v", c.edges[e]},
                              {"tag", c.edge_tags[e] == EdgeTag::WireSegment ? "wire" : "fill"}});
    j["hinges"] = nlohmann::json::array();
    for (const auto& h : hinges(c))
        j["hinges"].push_back({{"triangle", c.triangles[h.triangle]},
                               {"interior", h.interior},
                               {"fan_size", h.simplices.size()}});
    return j.dump(2);
}

} // namespace qregge
