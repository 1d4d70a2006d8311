#include "qregge/embedding.hpp"

#include "qregge/linalg.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace qregge {

const char* point_class_name(PointClass cls) {
    switch (cls) {
        case PointClass::Gate2q: return "gate2q";
        case PointClass::Gate1q: return "gate1q";
        case PointClass::Kink: return "kink";
        case PointClass::WireRef: return "wire_ref";
        case PointClass::Initial: return "initial";
        case PointClass::Final: return "final";
        case PointClass::Empty: return "empty";
    }
    return "?";
}

std::vector<std::array<int, 2>> Embedding::wire_segments() const {
    std::vector<std::array<int, 2>> segs;
    for (const auto& w : wires)
        for (std::size_t i = 0; i + 1 < w.points.size(); ++i)
            segs.push_back({w.points[i], w.points[i + 1]});
    return segs;
}

int Embedding::count(PointClass cls) const {
    int n = 0;
    for (const auto& p : points) n += (p.cls == cls);
    return n;
}

namespace {

Vec3 spatial(const Vec4& p) { return {p[1], p[2], p[3]}; }
Vec4 make4(double t, const Vec3& s) { return {t, s[0], s[1], s[2]}; }

Vec3 random_unit(Rng& rng) {
    while (true) {
        Vec3 v{rng.normal(), rng.normal(), rng.normal()};
        double n = norm(v);
        if (n > 1e-6) return (1.0 / n) * v;
    }
}

Vec3 any_perp(const Vec3& u) {
    int k = 0;
    for (int i = 1; i < 3; ++i)
        if (std::abs(u[i]) < std::abs(u[k])) k = i;
    Vec3 e{0, 0, 0};
    e[k] = 1;
    Vec3 p = e - dot(e, u) * u;
    return (1.0 / norm(p)) * p;
}

// Per-qubit home positions packed in a small ball. Pairwise distances stay
// under ~2 * radius, so any two parked qubit lines remain within one light
// cone diameter of each other and every gate placement is feasible.
std::vector<Vec3> draw_homes(int n, Rng& rng, double radius) {
    std::vector<Vec3> h;
    if (n == 1) {
        h.push_back({0, 0, 0});
        return h;
    }
    double min_sep = 0.6 * radius;
    while (int(h.size()) < n) {
        bool placed = false;
        for (int attempt = 0; attempt < 400 && !placed; ++attempt) {
            Vec3 c{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
            if (norm(c) > 1.0) continue;
            c = radius * c;
            bool ok = true;
            for (const auto& o : h)
                if (norm(c - o) < min_sep) ok = false;
            if (ok) {
                h.push_back(c);
                placed = true;
            }
        }
        if (!placed) min_sep *= 0.7; // dense packing: relax separation
    }
    return h;
}

struct PlaceParams {
    double tau;
    double home_radius; // absolute, spatial
    double jitter;      // absolute, spatial
    double kink_offset;
    std::uint64_t salt;
};

// One placement attempt. Wires get a kink vertex on every intermediate
// foliation layer, so each light-cone constraint is a sphere of radius
// exactly tau around the immediate predecessor. Idle lines zigzag around
// their qubit's home with legs of half a light-crossing; the two lines
// entering a coupling gate park in opposite phases around the pair's
// rendezvous point, keeping their constraint spheres comfortably overlapped.
// A duplicated wire pair (two wires joining the same two gates one layer
// apart) instead bends through two antipodal half-layer kinks.
bool try_place(const CausalGraph& graph, const Foliation& fol, const Rng& root,
               const PlaceParams& pp, Embedding& out, std::string& reason) {
    const int nv = int(graph.vertices.size());
    out.points.assign(nv, {});
    out.wires.assign(graph.edges.size(), {});
    out.time_scale = pp.tau;
    out.n_layers = int(fol.layers.size());

    Rng hr = root.fork(mix_seed(pp.salt, 0x803e));
    const std::vector<Vec3> homes = draw_homes(std::max(graph.n_qubits, 1), hr, pp.home_radius);
    auto qubit_axis = [&](int q) {
        Rng ar = root.fork(mix_seed(pp.salt, 0xa215 + std::uint64_t(q)));
        return random_unit(ar);
    };
    auto pair_axis = [&](int a, int b) {
        if (a > b) std::swap(a, b);
        Rng ar = root.fork(mix_seed(pp.salt, 0xbb00 + std::uint64_t(a) * 97 + std::uint64_t(b)));
        return random_unit(ar);
    };
    int draw_counter = 0;
    auto jitter3 = [&]() {
        Rng jr = root.fork(mix_seed(pp.salt, 0x9e01 + std::uint64_t(draw_counter++)));
        return Vec3{jr.normal(pp.jitter), jr.normal(pp.jitter), jr.normal(pp.jitter)};
    };
    auto random_dir = [&]() {
        Rng rr = root.fork(mix_seed(pp.salt, 0xcafe + std::uint64_t(draw_counter++)));
        return random_unit(rr);
    };

    // parking target of qubit q's line at layer k on its way to vertex `dest`
    auto park_target = [&](int q, int dest, int k) {
        const auto& dv = graph.vertices[dest];
        if (dv.kind == VertexKind::Gate && dv.qubits.size() == 2) {
            const int a = std::min(dv.qubits[0], dv.qubits[1]);
            const int b = std::max(dv.qubits[0], dv.qubits[1]);
            const Vec3 m = 0.5 * (homes[a] + homes[b]);
            const int flips = fol.depth[dest] - 1 - k; // 0 on the last layer before the gate
            const double sign = (q == a ? 1.0 : -1.0) * (flips % 2 == 0 ? 1.0 : -1.0);
            return m + (sign * 0.5 * pp.tau) * pair_axis(a, b);
        }
        const double sign = k % 2 == 0 ? 1.0 : -1.0;
        return homes[q] + (sign * 0.5 * pp.tau) * qubit_axis(q);
    };
    // wires leaving a one-input gate are deflected so the in and out null
    // directions at that gate stay well separated
    auto is_1q_gate = [&](int point_id) {
        return point_id < nv && graph.vertices[point_id].kind == VertexKind::Gate &&
               graph.vertices[point_id].qubits.size() == 1;
    };
    auto null_step = [&](int parent_point, Vec3 target) {
        const Vec3 p = spatial(out.points[parent_point].x);
        if (is_1q_gate(parent_point)) target = target + (0.35 * pp.tau) * random_dir();
        Vec3 d = target - p;
        const double n = norm(d);
        if (n < 1e-9 * pp.tau) d = random_dir();
        return p + (pp.tau / norm(d)) * d;
    };

    auto in_edges = graph.in_edges();
    std::vector<int> order(nv);
    for (int i = 0; i < nv; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return std::make_pair(fol.depth[a], a) < std::make_pair(fol.depth[b], b);
    });
    const double margin = 1e-7 * pp.tau;

    for (int vid : order) {
        const auto& v = graph.vertices[vid];
        {
            auto& pt = out.points[vid];
            pt.layer = fol.depth[vid];
            pt.graph_vertex = vid;
            pt.theta = v.kind == VertexKind::Gate ? v.theta : 0.0;
            switch (v.kind) {
                case VertexKind::Initial: pt.cls = PointClass::Initial; break;
                case VertexKind::Final: pt.cls = PointClass::Final; break;
                case VertexKind::Gate:
                    pt.cls = v.qubits.size() == 2 ? PointClass::Gate2q : PointClass::Gate1q;
                    break;
            }
        }
        const double t = fol.depth[vid] * pp.tau;

        if (nv == 1) {
            out.points[vid].x = {0, 0, 0, 0};
            continue;
        }
        if (v.kind == VertexKind::Initial) {
            out.points[vid].x = make4(t, homes[v.qubits[0]] + jitter3());
            continue;
        }

        // kink chains along each in-wire, one kink per intermediate layer
        std::vector<int> eids = in_edges[vid];
        std::sort(eids.begin(), eids.end());
        std::vector<std::vector<int>> chains(eids.size());
        for (std::size_t i = 0; i < eids.size(); ++i) {
            const auto& e = graph.edges[eids[i]];
            int cur = e.from;
            chains[i].push_back(cur);
            for (int k = fol.depth[e.from] + 1; k < fol.depth[vid]; ++k) {
                LatticePoint kp;
                kp.cls = PointClass::Kink;
                kp.layer = k;
                kp.x = make4(k * pp.tau,
                             null_step(cur, park_target(e.qubit, vid, k) + jitter3()));
                const int kid = int(out.points.size());
                out.points.push_back(kp);
                chains[i].push_back(kid);
                cur = kid;
            }
        }

        // steering target for the vertex itself
        Vec3 target;
        if (v.kind == VertexKind::Gate && v.qubits.size() == 2) {
            const int a = std::min(v.qubits[0], v.qubits[1]);
            const int b = std::max(v.qubits[0], v.qubits[1]);
            target = 0.5 * (homes[a] + homes[b]) + jitter3();
        } else if (v.kind == VertexKind::Final) {
            target = homes[v.qubits[0]] + jitter3();
        } else {
            target = park_target(v.qubits[0], vid, fol.depth[vid]) + jitter3();
        }

        const bool duplicate_pair =
            eids.size() == 2 && chains[0].back() == chains[1].back();
        Vec3 x;
        if (eids.empty()) {
            x = target; // gate with no lines (degenerate but legal)
        } else if (eids.size() == 1 || duplicate_pair) {
            const int p = chains[0].back();
            if (duplicate_pair) {
                // pull inside the light sphere; both wires bend through kinks
                const double c = pp.tau * std::sqrt(1.0 - 4.0 * pp.kink_offset * pp.kink_offset);
                const Vec3 ps = spatial(out.points[p].x);
                Vec3 d = target - ps;
                if (norm(d) < 1e-9 * pp.tau) d = random_dir();
                x = ps + (c / norm(d)) * d;
            } else {
                x = null_step(p, target);
            }
        } else if (eids.size() == 2) {
            const Vec3 c1 = spatial(out.points[chains[0].back()].x);
            const Vec3 c2 = spatial(out.points[chains[1].back()].x);
            const double d = norm(c2 - c1);
            if (d < 0.02 * pp.tau || d > 1.96 * pp.tau) {
                reason = "light spheres of vertex " + std::to_string(vid) +
                         " poorly separated (d=" + std::to_string(d) + ", tau=" +
                         std::to_string(pp.tau) + ")";
                return false;
            }
            const Vec3 u = (1.0 / d) * (c2 - c1);
            const double rho = std::sqrt(pp.tau * pp.tau - d * d / 4.0);
            Vec3 w = (target - c1) - dot(target - c1, u) * u;
            if (norm(w) < 1e-9 * pp.tau) w = any_perp(u);
            x = 0.5 * (c1 + c2) + (rho / norm(w)) * w;
        } else {
            reason = "vertex with more than two in-wires";
            return false;
        }
        out.points[vid].x = make4(t, x);

        // wire chains, with half-layer kinks for a duplicated direct pair
        if (duplicate_pair) {
            const int p = chains[0].back();
            const Vec4 xp = out.points[p].x, xv = out.points[vid].x;
            const double dt = xv[0] - xp[0];
            const Vec3 sp = spatial(xp), sv = spatial(xv);
            const double c = norm(sv - sp);
            const double rho2 = dt * dt / 4.0 - c * c / 4.0;
            if (rho2 < margin * margin) {
                reason = "kink circle degenerate between vertices " + std::to_string(p) +
                         " and " + std::to_string(vid);
                return false;
            }
            const double rho = std::sqrt(rho2);
            const Vec3 u = (1.0 / c) * (sv - sp);
            Rng kr = root.fork(mix_seed(pp.salt, 0x6b00 + std::uint64_t(eids[0])));
            const Vec3 a = any_perp(u);
            const Vec3 b = cross(u, a);
            const double phi = kr.uniform() * 2.0 * M_PI;
            const Vec3 nhat = std::cos(phi) * a + std::sin(phi) * b;
            const Vec3 mid = 0.5 * (sp + sv);
            const double tm = xp[0] + dt / 2.0;
            for (int side = 0; side < 2; ++side) {
                LatticePoint k;
                k.cls = PointClass::Kink;
                k.x = make4(tm, mid + (side == 0 ? rho : -rho) * nhat);
                const int kid = int(out.points.size());
                out.points.push_back(k);
                out.wires[eids[side]].points = {p, kid, vid};
            }
            for (int side = 0; side < 2; ++side) {
                out.wires[eids[side]].graph_edge = eids[side];
                out.wires[eids[side]].qubit = graph.edges[eids[side]].qubit;
            }
        } else {
            for (std::size_t i = 0; i < eids.size(); ++i) {
                out.wires[eids[i]].graph_edge = eids[i];
                out.wires[eids[i]].qubit = graph.edges[eids[i]].qubit;
                out.wires[eids[i]].points = chains[i];
                out.wires[eids[i]].points.push_back(vid);
            }
        }
    }

    // hard check: every wire segment is exactly null
    for (const auto& w : out.wires)
        for (std::size_t i = 0; i + 1 < w.points.size(); ++i) {
            const Vec4& A = out.points[w.points[i]].x;
            const Vec4& B = out.points[w.points[i + 1]].x;
            const double dt = B[0] - A[0];
            const double ds = norm(spatial(B) - spatial(A));
            if (dt <= 0 || std::abs(ds - dt) > 1e-9 * pp.tau) {
                reason = "wire segment failed the null check";
                return false;
            }
        }
    return true;
}

} // namespace

Embedding embed(const CausalGraph& graph, std::uint64_t seed, const EmbedOptions& options) {
    validate(graph);
    const Foliation fol = cauchy_foliation(graph);
    Rng root(seed);

    Embedding out;
    out.seed = seed;
    std::string reason = "unknown";
    // retries redraw homes, parking axes and jitters; lengths are unchanged
    // since the placement constraints are scale invariant
    for (int round = 0; round <= options.max_retry; ++round) {
        PlaceParams pp;
        pp.tau = options.time_scale;
        pp.home_radius = options.home_radius * pp.tau;
        pp.jitter = options.jitter * pp.tau * (1.0 + 0.2 * round);
        pp.kink_offset = options.kink_offset;
        pp.salt = 0xab5eed00 + std::uint64_t(round);
        if (try_place(graph, fol, root, pp, out, reason)) return out;
    }
    throw std::runtime_error("lattice construction failed: " + reason);
}

Embedding add_reference_vertices(const CausalGraph& graph, const Embedding& base,
                                 const ReferenceOptions& options) {
    (void)graph;
    if (options.spacing <= 0) throw std::invalid_argument("reference spacing must be positive");
    Embedding aug = base;
    Rng root(mix_seed(base.seed, 0x5e9f));

    // subdivide wires into mutually-nearest-neighbor chains
    double total_len = 0;
    int total_segs = 0;
    for (auto& w : aug.wires) {
        std::vector<int> chain;
        for (std::size_t i = 0; i + 1 < w.points.size(); ++i) {
            const int ia = w.points[i], ib = w.points[i + 1];
            const Vec4 A = aug.points[ia].x, B = aug.points[ib].x;
            chain.push_back(ia);
            const double L = norm(B - A);
            const int m = std::max(0, int(std::ceil(L / options.spacing - 1e-9)) - 1);
            const Vec3 sdir = (1.0 / std::max(norm(spatial(B) - spatial(A)), 1e-12)) *
                              (spatial(B) - spatial(A));
            const Vec3 pa = any_perp(sdir);
            const Vec3 pb = cross(sdir, pa);
            Rng jr = root.fork(mix_seed(w.graph_edge, i));
            for (int k = 1; k <= m; ++k) {
                const double f = double(k) / (m + 1);
                LatticePoint rp;
                rp.cls = PointClass::WireRef;
                const double amp = options.wire_jitter * options.spacing;
                rp.x = (1.0 - f) * A + f * B;
                const Vec3 off = (amp * jr.normal()) * pa + (amp * jr.normal()) * pb;
                rp.x = rp.x + make4(0.0, off);
                chain.push_back(int(aug.points.size()));
                aug.points.push_back(rp);
            }
            total_len += L;
            total_segs += m + 1;
        }
        chain.push_back(w.points.back());
        w.points = chain;
    }

    if (!options.fill_empty) return aug;

    const double mean_seg = total_segs > 0 ? total_len / total_segs : options.spacing;
    const double es = options.empty_spacing > 0 ? options.empty_spacing : mean_seg;
    const double tube = options.tube_radius > 0 ? options.tube_radius : 1.7 * es;
    const double clear2 = [&] {
        const double c = options.clearance > 0 ? options.clearance : 0.45 * es;
        return c * c;
    }();

    // distance targets: wire segments, or bare points when there are no wires
    std::vector<std::array<Vec4, 2>> segs;
    for (const auto& w : aug.wires)
        for (std::size_t i = 0; i + 1 < w.points.size(); ++i)
            segs.push_back({aug.points[w.points[i]].x, aug.points[w.points[i + 1]].x});
    if (segs.empty())
        for (const auto& p : aug.points) segs.push_back({p.x, p.x});

    auto seg_dist2 = [](const Vec4& q, const Vec4& a, const Vec4& b) {
        const Vec4 ab = b - a;
        const double n2 = norm2(ab);
        double s = n2 > 0 ? dot(q - a, ab) / n2 : 0.0;
        s = std::clamp(s, 0.0, 1.0);
        return norm2(q - (a + s * ab));
    };

    Vec4 lo = aug.points[0].x, hi = aug.points[0].x;
    for (const auto& p : aug.points)
        for (int c = 0; c < 4; ++c) {
            lo[c] = std::min(lo[c], p.x[c]);
            hi[c] = std::max(hi[c], p.x[c]);
        }
    for (int c = 0; c < 4; ++c) {
        lo[c] -= tube;
        hi[c] += tube;
    }

    std::vector<Vec4> kept;
    for (const auto& p : aug.points) kept.push_back(p.x);
    std::array<int, 4> steps;
    for (int c = 0; c < 4; ++c) steps[c] = int(std::floor((hi[c] - lo[c]) / es)) + 1;

    std::array<int, 4> idx{};
    for (idx[0] = 0; idx[0] < steps[0]; ++idx[0])
        for (idx[1] = 0; idx[1] < steps[1]; ++idx[1])
            for (idx[2] = 0; idx[2] < steps[2]; ++idx[2])
                for (idx[3] = 0; idx[3] < steps[3]; ++idx[3]) {
                    Rng jr = root.fork(mix_seed(0xc10d,
                                                ((std::uint64_t(idx[0]) * 0x3f1 + idx[1]) * 0x3f1 +
                                                 idx[2]) * 0x3f1 + idx[3]));
                    Vec4 q;
                    for (int c = 0; c < 4; ++c)
                        q[c] = lo[c] + (idx[c] + 0.5 + options.jitter * (jr.uniform() - 0.5)) * es;
                    double d2 = std::numeric_limits<double>::max();
                    for (const auto& s : segs) d2 = std::min(d2, seg_dist2(q, s[0], s[1]));
                    if (d2 > tube * tube) continue;
                    bool clear_ok = true;
                    for (const auto& k : kept)
                        if (norm2(q - k) < clear2) {
                            clear_ok = false;
                            break;
                        }
                    if (!clear_ok) continue;
                    kept.push_back(q);
                    LatticePoint ep;
                    ep.cls = PointClass::Empty;
                    ep.x = q;
                    aug.points.push_back(ep);
                }
    return aug;
}

Embedding add_reference_vertices(const CausalGraph& graph, const Embedding& base, double spacing) {
    ReferenceOptions o;
    o.spacing = spacing;
    return add_reference_vertices(graph, base, o);
}

Embedding flat_block(const std::array<int, 4>& dims, double spacing, std::uint64_t seed,
                     double jitter) {
    if (spacing <= 0) throw std::invalid_argument("block spacing must be positive");
    Embedding out;
    out.seed = seed;
    out.time_scale = spacing;
    out.n_layers = dims[0];
    Rng root(seed);
    std::array<int, 4> i{};
    for (i[0] = 0; i[0] < dims[0]; ++i[0])
        for (i[1] = 0; i[1] < dims[1]; ++i[1])
            for (i[2] = 0; i[2] < dims[2]; ++i[2])
                for (i[3] = 0; i[3] < dims[3]; ++i[3]) {
                    Rng jr = root.fork(
                        ((std::uint64_t(i[0]) * 0x51d + i[1]) * 0x51d + i[2]) * 0x51d + i[3]);
                    LatticePoint p;
                    p.cls = PointClass::Empty;
                    for (int c = 0; c < 4; ++c)
                        p.x[c] = (i[c] + jitter * (jr.uniform() - 0.5)) * spacing;
                    out.points.push_back(p);
                }
    return out;
}

std::string embedding_to_json(const Embedding& e) {
    nlohmann::json j;
    j["seed"] = e.seed;
    j["time_scale"] = e.time_scale;
    j["n_layers"] = e.n_layers;
    j["vertices"] = nlohmann::json::array();
    for (std::size_t i = 0; i < e.points.size(); ++i) {
        const auto& p = e.points[i];
        nlohmann::json jp;
        jp["id"] = i;
        jp["x"] = {p.x[0], p.x[1], p.x[2], p.x[3]};
        jp["tag"] = point_class_name(p.cls);
        if (p.theta != 0.0) jp["theta"] = p.theta;
        if (p.graph_vertex >= 0) jp["graph_vertex"] = p.graph_vertex;
        j["vertices"].push_back(jp);
    }
    j["wires"] = nlohmann::json::array();
    for (const auto& w : e.wires)
        j["wires"].push_back({{"edge", w.graph_edge}, {"qubit", w.qubit}, {"points", w.points}});
    return j.dump(2);
}

} // namespace qregge
