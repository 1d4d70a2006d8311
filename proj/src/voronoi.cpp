#include "qregge/voronoi.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qregge {

namespace {

// Unit normal of the sub-face span within the parent face, pointing toward
// `opposite`. Sub-face positions q[0..k-1]; the perpendicular component of
// (opposite - q0) against the sub-face's edge span.
Vec4 inward_normal(const Vec4* q, int k, const Vec4& opposite) {
    Vec4 basis[3];
    int nb = 0;
    for (int i = 1; i < k; ++i) {
        Vec4 b = q[i] - q[0];
        for (int j = 0; j < nb; ++j) b = b - dot(b, basis[j]) * basis[j];
        const double n = norm(b);
        if (n < 1e-14) throw std::runtime_error("degenerate face in dual volume computation");
        basis[nb++] = (1.0 / n) * b;
    }
    Vec4 r = opposite - q[0];
    for (int j = 0; j < nb; ++j) r = r - dot(r, basis[j]) * basis[j];
    const double n = norm(r);
    if (n < 1e-14) throw std::runtime_error("degenerate face in dual volume computation");
    return (1.0 / n) * r;
}

} // namespace

VoronoiDual voronoi_volumes(const SimplicialComplex& c, const Embedding& embedding) {
    VoronoiDual dual;
    dual.volumes.assign(c.n_points, 0.0);
    dual.edge_dual_measure.assign(c.edges.size(), 0.0);

    auto pos = [&](int v) -> const Vec4& { return embedding.points[v].x; };

    // circumcenters of every face, cached by global id
    std::vector<Vec4> edge_cc(c.edges.size());
    for (std::size_t e = 0; e < c.edges.size(); ++e)
        edge_cc[e] = 0.5 * (pos(c.edges[e][0]) + pos(c.edges[e][1]));
    std::vector<Vec4> tri_cc(c.triangles.size());
    for (std::size_t t = 0; t < c.triangles.size(); ++t) {
        Vec4 q[3] = {pos(c.triangles[t][0]), pos(c.triangles[t][1]), pos(c.triangles[t][2])};
        if (!circumcenter(q, 3, tri_cc[t]))
            throw std::runtime_error("degenerate triangle " + std::to_string(t));
    }

    for (std::size_t s = 0; s < c.simplices.size(); ++s) {
        const auto& sv = c.simplices[s];
        Vec4 corner[5];
        for (int i = 0; i < 5; ++i) corner[i] = pos(sv[i]);

        Vec4 simp_cc;
        if (!circumcenter(corner, 5, simp_cc))
            throw std::runtime_error("degenerate 4-simplex " + std::to_string(s));

        // tetra circumcenters, indexed by the skipped local vertex
        Vec4 tet_cc[5];
        for (int skip = 0; skip < 5; ++skip) {
            Vec4 q[4];
            int pos4 = 0;
            for (int i = 0; i < 5; ++i)
                if (i != skip) q[pos4++] = corner[i];
            if (!circumcenter(q, 4, tet_cc[skip]))
                throw std::runtime_error("degenerate tetrahedron in simplex " + std::to_string(s));
        }

        // local face enumerations mirror build_tables: pair/triple order of
        // ascending local indices
        int epos = 0;
        int pair_of[5][5];
        for (int i = 0; i < 5; ++i)
            for (int j = i + 1; j < 5; ++j) {
                pair_of[i][j] = epos;
                pair_of[j][i] = epos;
                ++epos;
            }
        int tpos = 0;
        int triple_of[5][5][5];
        std::array<int, 3> triples[10];
        for (int i = 0; i < 5; ++i)
            for (int j = i + 1; j < 5; ++j)
                for (int k = j + 1; k < 5; ++k) {
                    triple_of[i][j][k] = tpos;
                    triples[tpos] = {i, j, k};
                    ++tpos;
                }

        // signed heights: edge -> triangle (30 pairs), triangle -> tetra (20),
        // tetra -> simplex (5)
        double h_et[10][3]; // per local triangle, per omitted corner
        for (int t = 0; t < 10; ++t) {
            const auto& tr = triples[t];
            for (int omit = 0; omit < 3; ++omit) {
                const int a = tr[(omit + 1) % 3], b = tr[(omit + 2) % 3];
                Vec4 q[2] = {corner[std::min(a, b)], corner[std::max(a, b)]};
                const Vec4 n = inward_normal(q, 2, corner[tr[omit]]);
                const int ge = c.simplex_edges[s][pair_of[std::min(a, b)][std::max(a, b)]];
                h_et[t][omit] = dot(tri_cc[c.simplex_triangles[s][t]] - edge_cc[ge], n);
            }
        }
        double h_tt[5][4]; // per tetra (skip vertex), per omitted tetra corner
        for (int skip = 0; skip < 5; ++skip) {
            std::array<int, 4> tet;
            int p4 = 0;
            for (int i = 0; i < 5; ++i)
                if (i != skip) tet[p4++] = i;
            for (int omit = 0; omit < 4; ++omit) {
                std::array<int, 3> tr;
                int p3 = 0;
                for (int i = 0; i < 4; ++i)
                    if (i != omit) tr[p3++] = tet[i];
                Vec4 q[3] = {corner[tr[0]], corner[tr[1]], corner[tr[2]]};
                const Vec4 n = inward_normal(q, 3, corner[tet[omit]]);
                const int gt = c.simplex_triangles[s][triple_of[tr[0]][tr[1]][tr[2]]];
                h_tt[skip][omit] = dot(tet_cc[skip] - tri_cc[gt], n);
            }
        }
        double h_ts[5];
        for (int skip = 0; skip < 5; ++skip) {
            Vec4 q[4];
            int p4 = 0;
            for (int i = 0; i < 5; ++i)
                if (i != skip) q[p4++] = corner[i];
            const Vec4 n = inward_normal(q, 4, corner[skip]);
            h_ts[skip] = dot(simp_cc - tet_cc[skip], n);
        }

        // vertex pieces: chains v in e in t in tet in simplex
        double piece_sum = 0.0, piece_scale = 0.0;
        for (int v = 0; v < 5; ++v) {
            double piece = 0.0;
            for (int o = 0; o < 5; ++o) { // other edge endpoint
                if (o == v) continue;
                const double len1 = 0.5 * norm(corner[o] - corner[v]);
                for (int w = 0; w < 5; ++w) { // third triangle corner
                    if (w == v || w == o) continue;
                    std::array<int, 3> tr{v, o, w};
                    std::sort(tr.begin(), tr.end());
                    const int t = triple_of[tr[0]][tr[1]][tr[2]];
                    int omit = 0;
                    while (tr[omit] != w) ++omit;
                    const double a2 = 0.5 * h_et[t][omit] * len1;
                    for (int u = 0; u < 5; ++u) { // fourth tetra corner
                        if (u == v || u == o || u == w) continue;
                        int skip = 0; // tetra omits the remaining vertex
                        while (skip == v || skip == o || skip == w || skip == u) ++skip;
                        std::array<int, 4> tet;
                        int p4 = 0;
                        for (int i = 0; i < 5; ++i)
                            if (i != skip) tet[p4++] = i;
                        int tomit = 0;
                        while (tet[tomit] != u) ++tomit;
                        const double v3 = (1.0 / 3.0) * h_tt[skip][tomit] * a2;
                        piece += 0.25 * h_ts[skip] * v3;
                    }
                }
            }
            dual.volumes[sv[v]] += piece;
            piece_sum += piece;
            piece_scale += std::abs(piece);
        }

        const double vol = std::abs(
            simplex4_signed_volume(corner[0], corner[1], corner[2], corner[3], corner[4]));
        dual.hull_volume += vol;
        // hull slivers have large signed pieces cancelling to a tiny volume,
        // so roundoff must be judged against the piece scale, not the volume
        const double err = std::abs(piece_sum - vol) / std::max(vol, piece_scale);
        dual.max_partition_error = std::max(dual.max_partition_error, err);
        if (err > 1e-6)
            throw std::runtime_error("dual volume pieces fail to partition simplex " +
                                     std::to_string(s));

        // edge facet pieces: chains e in t in tet in simplex
        for (int i = 0; i < 5; ++i)
            for (int j = i + 1; j < 5; ++j) {
                double measure = 0.0;
                for (int w = 0; w < 5; ++w) {
                    if (w == i || w == j) continue;
                    std::array<int, 3> tr{i, j, w};
                    std::sort(tr.begin(), tr.end());
                    const int t = triple_of[tr[0]][tr[1]][tr[2]];
                    int omit = 0;
                    while (tr[omit] != w) ++omit;
                    const double len1 = h_et[t][omit];
                    for (int u = 0; u < 5; ++u) {
                        if (u == i || u == j || u == w) continue;
                        int skip = 0;
                        while (skip == i || skip == j || skip == w || skip == u) ++skip;
                        std::array<int, 4> tet;
                        int p4 = 0;
                        for (int v5 = 0; v5 < 5; ++v5)
                            if (v5 != skip) tet[p4++] = v5;
                        int tomit = 0;
                        while (tet[tomit] != u) ++tomit;
                        const double a2 = 0.5 * h_tt[skip][tomit] * len1;
                        measure += (1.0 / 3.0) * h_ts[skip] * a2;
                    }
                }
                dual.edge_dual_measure[c.simplex_edges[s][pair_of[i][j]]] += measure;
            }
    }

    return dual;
}

} // namespace qregge
