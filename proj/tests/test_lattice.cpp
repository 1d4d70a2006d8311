#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qregge/circuit.hpp"
#include "qregge/causal_graph.hpp"
#include "qregge/delaunay.hpp"
#include "qregge/embedding.hpp"
#include "qregge/voronoi.hpp"

#include <algorithm>
#include <cmath>
#include <set>

using namespace qregge;

namespace {

Vec3 spatial3(const Vec4& x) { return {x[1], x[2], x[3]}; }

Circuit passthrough_1q() {
    Circuit c;
    c.n_qubits = 1;
    c.initial = {0};
    return c;
}

Circuit chain_1q() {
    Circuit c;
    c.n_qubits = 1;
    c.initial = {0};
    Mat p = Mat::Zero(2, 2);
    p(1, 1) = 1.0;
    c.gates.push_back(make_projector_gate({0}, p, 1.2, "z"));
    return c;
}

Circuit pair_2q() {
    // two coupling gates on the same qubit pair: the wires between them are
    // a duplicated pair and must bend through kinks
    Circuit c;
    c.n_qubits = 2;
    c.initial = {0, 1};
    c.gates.push_back(make_projector_gate({0, 1}, named_projector("triplet"), 1.0, "g0"));
    c.gates.push_back(make_projector_gate({0, 1}, named_projector("proj11"), 0.7, "g1"));
    return c;
}

Circuit triangle_3q() {
    Circuit c;
    c.n_qubits = 3;
    c.initial = {0, 0, 0};
    c.gates.push_back(make_projector_gate({0, 1}, named_projector("triplet"), 0.9, "a"));
    c.gates.push_back(make_projector_gate({1, 2}, named_projector("singlet"), 1.1, "b"));
    c.gates.push_back(make_projector_gate({0, 2}, named_projector("proj11"), 0.5, "c"));
    return c;
}

Embedding cloud_embedding(std::vector<Vec4> pts, std::uint64_t seed) {
    Embedding e;
    e.seed = seed;
    for (const auto& x : pts) {
        LatticePoint p;
        p.x = x;
        p.cls = PointClass::Empty;
        e.points.push_back(p);
    }
    return e;
}

void check_null_wires(const Embedding& e) {
    for (const auto& w : e.wires)
        for (std::size_t i = 0; i + 1 < w.points.size(); ++i) {
            const Vec4& a = e.points[w.points[i]].x;
            const Vec4& b = e.points[w.points[i + 1]].x;
            const double dt = b[0] - a[0];
            const double ds = norm(spatial3(b) - spatial3(a));
            CHECK(dt > 0);
            CHECK(std::abs(ds - dt) <= 1e-9 * e.time_scale);
        }
}

} // namespace

TEST_CASE("embedding of a single vertex sits at the origin") {
    CausalGraph g;
    g.n_qubits = 0;
    CausalVertex v;
    v.id = 0;
    v.kind = VertexKind::Gate;
    g.vertices.push_back(v);
    const Embedding e = embed(g, 7);
    REQUIRE(e.points.size() == 1);
    for (int c = 0; c < 4; ++c) CHECK(e.points[0].x[c] == 0.0);
}

TEST_CASE("three-vertex chain gets strictly increasing distinct times") {
    const CausalGraph g = wiring_dag(chain_1q());
    const Embedding e = embed(g, 11);
    REQUIRE(e.points.size() == 3);
    // graph order: initial, gate, final
    CHECK(e.points[0].x[0] < e.points[1].x[0]);
    CHECK(e.points[1].x[0] < e.points[2].x[0]);
    check_null_wires(e);
}

TEST_CASE("embedding is deterministic in the seed") {
    const CausalGraph g = wiring_dag(triangle_3q());
    const Embedding a = embed(g, 42);
    const Embedding b = embed(g, 42);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i)
        for (int c = 0; c < 4; ++c) CHECK(a.points[i].x[c] == b.points[i].x[c]);
    const Embedding d = embed(g, 43);
    bool any_differs = false;
    for (std::size_t i = 0; i < a.points.size(); ++i)
        if (norm(a.points[i].x - d.points[i].x) > 1e-12) any_differs = true;
    CHECK(any_differs);
}

TEST_CASE("layers share a time coordinate and wires are exactly null") {
    for (auto make : {triangle_3q, pair_2q}) {
        const CausalGraph g = wiring_dag(make());
        const Foliation f = cauchy_foliation(g);
        const Embedding e = embed(g, 5);
        for (const auto& p : e.points) {
            if (p.graph_vertex < 0) continue;
            CHECK(p.x[0] == doctest::Approx(f.depth[p.graph_vertex] * e.time_scale).epsilon(1e-12));
        }
        check_null_wires(e);
    }
}

TEST_CASE("wire subdivision counts follow the spacing") {
    const CausalGraph g = wiring_dag(passthrough_1q());
    const Embedding base = embed(g, 3);
    REQUIRE(base.wires.size() == 1);
    const Vec4 a = base.points[base.wires[0].points.front()].x;
    const Vec4 b = base.points[base.wires[0].points.back()].x;
    const double L = norm(b - a);

    ReferenceOptions longer;
    longer.spacing = L * 1.05;
    longer.fill_empty = false;
    const Embedding none = add_reference_vertices(g, base, longer);
    CHECK(none.count(PointClass::WireRef) == 0);

    ReferenceOptions thirds;
    thirds.spacing = L / 3.0;
    thirds.fill_empty = false;
    const Embedding two = add_reference_vertices(g, base, thirds);
    CHECK(two.count(PointClass::WireRef) == 2);
    REQUIRE(two.wires[0].points.size() == 4);
    // inserted points stay within a hair of the segment thirds
    const Vec4 t1 = two.points[two.wires[0].points[1]].x;
    CHECK(norm(t1 - (a + (1.0 / 3.0) * (b - a))) < 1e-4 * L);

    CHECK_THROWS(add_reference_vertices(g, base, -1.0));
}

TEST_CASE("five generic points triangulate to one 4-simplex with ten lonely hinges") {
    Embedding e = cloud_embedding({{0, 0, 0, 0},
                                   {1, 0, 0, 0},
                                   {0.1, 1, 0, 0},
                                   {0.2, 0.1, 1, 0},
                                   {0.3, 0.2, 0.1, 1}},
                                  1);
    const SimplicialComplex c = delaunay(e);
    REQUIRE(c.simplices.size() == 1);
    CHECK(c.edges.size() == 10);
    CHECK(c.triangles.size() == 10);
    CHECK(c.tetrahedra.size() == 5);
    validate(c, e);
    const auto hs = hinges(c);
    REQUIRE(hs.size() == 10);
    for (const auto& h : hs) {
        CHECK(h.simplices.size() == 1);
        CHECK(!h.interior);
    }
    for (int v = 0; v < 5; ++v) CHECK(c.on_hull[v] == 1);
}

TEST_CASE("two simplices sharing a tetrahedron expose the shared faces") {
    Embedding e = cloud_embedding({{0, 0, 0, 0},
                                   {1, 0, 0, 0},
                                   {0, 1, 0, 0},
                                   {0, 0, 1, 0},
                                   {0.25, 0.25, 0.25, 0.8},
                                   {0.25, 0.25, 0.25, -0.8}},
                                  2);
    const SimplicialComplex c = delaunay(e);
    REQUIRE(c.simplices.size() == 2);
    validate(c, e);
    int shared = 0;
    for (const auto& h : hinges(c)) {
        REQUIRE((h.simplices.size() == 1 || h.simplices.size() == 2));
        if (h.simplices.size() == 2) ++shared;
    }
    CHECK(shared == 4); // the four triangles of the shared tetrahedron
}

TEST_CASE("jittered hypercubic block satisfies the empty-circumsphere property") {
    Embedding e = flat_block({3, 3, 3, 3}, 1.0, 9);
    const SimplicialComplex c = delaunay(e);
    validate(c, e);
    CHECK(empty_sphere_violations(c, e) == 0);
    // determinism
    Embedding e2 = flat_block({3, 3, 3, 3}, 1.0, 9);
    const SimplicialComplex c2 = delaunay(e2);
    CHECK(c.simplices == c2.simplices);
}

TEST_CASE("exactly co-spherical grid input is resolved by jitter") {
    Embedding e = flat_block({3, 3, 3, 3}, 1.0, 4, 0.0); // no jitter: every cell co-spherical
    const SimplicialComplex c = delaunay(e);
    validate(c, e);
    CHECK(empty_sphere_violations(c, e, 1e-6) == 0);
}

TEST_CASE("interior hinge fans of a block close into cycles") {
    Embedding e = flat_block({3, 3, 3, 3}, 1.0, 12);
    const SimplicialComplex c = delaunay(e);
    const auto hs = hinges(c);
    int interior = 0;
    for (const auto& h : hs) {
        CHECK(h.simplices.size() == c.triangle_simplices[h.triangle].size());
        if (!h.interior) continue;
        ++interior;
        CHECK(h.simplices.size() >= 3);
        // cyclic: consecutive (and wrap-around) fan members share a tetrahedron
        const auto& tri = c.triangles[h.triangle];
        const int n = int(h.simplices.size());
        for (int i = 0; i < n; ++i) {
            const auto& sa = c.simplices[h.simplices[i]];
            const auto& sb = c.simplices[h.simplices[(i + 1) % n]];
            std::set<int> inter;
            std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(),
                                  std::inserter(inter, inter.begin()));
            CHECK(inter.size() == 4); // shared tetra: triangle plus one vertex
            CHECK(inter.count(tri[0]) == 1);
        }
    }
    CHECK(interior > 0);
}

TEST_CASE("triangulation needs five points and rejects duplicates") {
    Embedding tiny = cloud_embedding({{0, 0, 0, 0}, {1, 0, 0, 0}}, 3);
    CHECK_THROWS(delaunay(tiny));
    Embedding dup = cloud_embedding({{0, 0, 0, 0},
                                     {1, 0, 0, 0},
                                     {0, 1, 0, 0},
                                     {0, 0, 1, 0},
                                     {0, 0, 0, 1},
                                     {0, 0, 0, 1}},
                                    3);
    CHECK_THROWS(delaunay(dup));
}

TEST_CASE("degenerate lower-dimensional input raises a construction error") {
    std::vector<Vec4> flat3d;
    Rng r(17);
    for (int i = 0; i < 12; ++i)
        flat3d.push_back({r.uniform(), r.uniform(), r.uniform(), 0.0});
    Embedding e = cloud_embedding(flat3d, 17);
    CHECK_THROWS(delaunay(e));
}

TEST_CASE("wire segments survive triangulation for embedded circuits") {
    for (auto make : {pair_2q, triangle_3q}) {
        const CausalGraph g = wiring_dag(make());
        const Embedding base = embed(g, 21);
        Embedding aug = add_reference_vertices(g, base, 1.2);
        const SimplicialComplex c = delaunay(aug);
        validate(c, aug);
        CHECK(missing_wire_segments(c, aug).empty());
        int wire_edges = 0;
        for (const auto& seg : aug.wire_segments()) {
            const int id = c.edge_index(seg[0], seg[1]);
            REQUIRE(id >= 0);
            CHECK(c.edge_tags[id] == EdgeTag::WireSegment);
            ++wire_edges;
        }
        CHECK(wire_edges > 0);
        CHECK(empty_sphere_violations(c, aug, 1e-7) == 0);
    }
}

TEST_CASE("computational points end up interior to the reference cloud hull") {
    const CausalGraph g = wiring_dag(pair_2q());
    const Embedding base = embed(g, 33);
    Embedding aug = add_reference_vertices(g, base, 1.2);
    const SimplicialComplex c = delaunay(aug);
    for (int i = 0; i < c.n_points; ++i)
        if (aug.points[i].cls != PointClass::Empty) CHECK(c.on_hull[i] == 0);
}

TEST_CASE("voronoi volumes partition an exactly known hull volume") {
    // hull is a big 4-simplex of known volume; interior points are generic
    const double s = 2.0;
    std::vector<Vec4> pts = {
        {0, 0, 0, 0}, {s, 0, 0, 0}, {0, s, 0, 0}, {0, 0, s, 0}, {0, 0, 0, s}};
    Rng r(99);
    for (int i = 0; i < 50; ++i) {
        double b[5];
        double tot = 0;
        for (double& x : b) {
            x = 0.05 + r.uniform();
            tot += x;
        }
        Vec4 p{0, 0, 0, 0};
        p[0] = s * b[1] / tot;
        p[1] = s * b[2] / tot;
        p[2] = s * b[3] / tot;
        p[3] = s * b[4] / tot;
        pts.push_back(p);
    }
    Embedding e = cloud_embedding(pts, 99);
    const SimplicialComplex c = delaunay(e);
    validate(c, e);
    const VoronoiDual dual = voronoi_volumes(c, e);

    const double exact = s * s * s * s / 24.0;
    CHECK(dual.hull_volume == doctest::Approx(exact).epsilon(1e-10));
    double total = 0;
    for (std::size_t i = 0; i < dual.volumes.size(); ++i) {
        total += dual.volumes[i];
        // positivity is only promised away from the hull: at the five sharp
        // corners the clipped cells are signed and may overshoot
        if (!c.on_hull[i]) CHECK(dual.volumes[i] > 0);
    }
    CHECK(std::abs(total - exact) < 1e-8);
    CHECK(dual.max_partition_error < 1e-8);
}

TEST_CASE("dual volumes are equivariant under reflection of the embedding") {
    // a mirror-symmetric cloud cannot be triangulated unperturbed (any three
    // mirrored pairs are co-spherical), so instead reflect a generic cloud and
    // demand the dual volumes follow it point by point
    std::vector<Vec4> pts;
    Rng r(5);
    for (int i = 0; i < 48; ++i)
        pts.push_back({0.05 + r.uniform(), r.uniform(-1, 1), r.uniform(-1, 1), r.uniform(-1, 1)});
    std::vector<Vec4> mirrored = pts;
    for (auto& p : mirrored) p[0] = -p[0];

    Embedding e1 = cloud_embedding(pts, 5);
    Embedding e2 = cloud_embedding(mirrored, 5);
    const SimplicialComplex c1 = delaunay(e1);
    const SimplicialComplex c2 = delaunay(e2);
    const VoronoiDual d1 = voronoi_volumes(c1, e1);
    const VoronoiDual d2 = voronoi_volumes(c2, e2);

    REQUIRE(d1.volumes.size() == d2.volumes.size());
    for (std::size_t i = 0; i < d1.volumes.size(); ++i)
        CHECK(d1.volumes[i] == doctest::Approx(d2.volumes[i]).epsilon(1e-9));
    double t1 = 0, t2 = 0;
    for (double v : d1.volumes) t1 += v;
    for (double v : d2.volumes) t2 += v;
    CHECK(t1 == doctest::Approx(d1.hull_volume).epsilon(1e-10));
    CHECK(t2 == doctest::Approx(d2.hull_volume).epsilon(1e-10));
}

TEST_CASE("interior cell of a near-regular lattice has volume spacing^4") {
    // jitter well above the cocircular-sliver scale: an exactly regular grid
    // has Delaunay-legal slivers too flat for a circumcentric dual
    const double s = 1.3;
    Embedding e = flat_block({5, 5, 5, 5}, s, 8, 0.01);
    const SimplicialComplex c = delaunay(e);
    const VoronoiDual dual = voronoi_volumes(c, e);
    // center of the 5x5x5x5 grid: index (2,2,2,2) in row-major order
    const int center = ((2 * 5 + 2) * 5 + 2) * 5 + 2;
    CHECK(c.on_hull[center] == 0);
    CHECK(dual.volumes[center] == doctest::Approx(s * s * s * s).epsilon(0.05));

    double total = 0;
    for (double v : dual.volumes) total += v;
    // boundary slivers cancel large signed pieces, leaving a little roundoff
    CHECK(total == doctest::Approx(dual.hull_volume).epsilon(1e-7));

    // Delaunay edges between interior vertices carry a real dual facet
    int interior_edges = 0;
    for (std::size_t k = 0; k < c.edges.size(); ++k) {
        if (c.on_hull[c.edges[k][0]] || c.on_hull[c.edges[k][1]]) continue;
        ++interior_edges;
        CHECK(dual.edge_dual_measure[k] > 0);
    }
    CHECK(interior_edges > 0);
}

TEST_CASE("lattice json export carries vertices, tags and simplices") {
    const CausalGraph g = wiring_dag(chain_1q());
    const Embedding base = embed(g, 2);
    Embedding aug = add_reference_vertices(g, base, 1.0);
    const SimplicialComplex c = delaunay(aug);
    const std::string js = complex_to_json(c, aug);
    CHECK(js.find("\"vertices\"") != std::string::npos);
    CHECK(js.find("\"simplices\"") != std::string::npos);
    CHECK(js.find("\"wire\"") != std::string::npos);
    CHECK(js.find("\"hinges\"") != std::string::npos);
}
