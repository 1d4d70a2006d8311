#pragma once

// Embedding of a history graph into R^4. Coordinate 0 is time, equal to
// foliation depth times time_scale. Spatial positions are built so that every
// wire segment satisfies |dx_spatial| = dt exactly: wires are light rays of
// the flat metric diag(-1,1,1,1), which makes that metric an exact solution
// of the lattice field equations for the zero-action history.
//
// Layout idea: every wire receives a kink vertex on each intermediate
// foliation layer, so each placement is constrained by light spheres of
// radius exactly one layer step around the immediate predecessors. Each
// qubit owns a "home" position inside a small ball; idle lines zigzag around
// their home with legs of half a light-crossing, and the two lines entering
// a coupling gate park in opposite phases around the pair's rendezvous
// point, which keeps the two constraint spheres overlapped. A vertex is
// placed on the exact intersection of its parents' light spheres, steered
// toward its parking target. A pair of parallel wires between the same two
// gates cannot both be straight null segments, so the receiving gate is
// pulled inside the light sphere and each wire bends through its own
// half-layer "kink" point, keeping both halves null.

#include "qregge/causal_graph.hpp"
#include "qregge/geom4.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace qregge {

enum class PointClass { Gate2q, Gate1q, Kink, WireRef, Initial, Final, Empty };

const char* point_class_name(PointClass cls);

struct LatticePoint {
    Vec4 x{};
    PointClass cls = PointClass::Empty;
    int graph_vertex = -1; // causal-graph id for computational points
    double theta = 0.0;    // eigenphase carried by the event (gate points)
    int layer = -1;        // foliation layer; -1 for kink/reference/empty
};

struct WireChain {
    int graph_edge = -1;
    int qubit = -1;
    std::vector<int> points; // consecutive lattice point ids along the wire
};

struct EmbedOptions {
    double time_scale = 3.0;   // layer-to-layer time step
    double home_radius = 0.42; // qubit home ball radius, in units of time_scale
    double kink_offset = 0.1;  // transverse bend of duplicated wires, relative to span
    double jitter = 0.04;      // parking jitter, in units of time_scale
    int max_retry = 8;
};

struct Embedding {
    std::uint64_t seed = 0;
    double time_scale = 3.0;
    int n_layers = 0;
    std::vector<LatticePoint> points;
    std::vector<WireChain> wires;

    std::vector<std::array<int, 2>> wire_segments() const;
    int count(PointClass cls) const;
};

Embedding embed(const CausalGraph& graph, std::uint64_t seed, const EmbedOptions& options = {});

struct ReferenceOptions {
    double spacing = 1.5;      // wire subdivision spacing (4D Euclidean length)
    double empty_spacing = 0;  // 0: defaults to mean wire-segment spacing
    double tube_radius = 0;    // 0: defaults to 1.7 * empty_spacing
    double clearance = 0;      // 0: defaults to 0.45 * empty_spacing
    double jitter = 0.08;      // cloud jitter, relative to empty_spacing
    // transverse jitter on wire subdivision points, relative to spacing. The
    // offset is orthogonal to the ray, so a segment's interval only picks up
    // the jitter squared; 1e-2 keeps wires null to a few parts in 1e4 while
    // keeping the angle sums around wire-adjacent hinges numerically stable
    // (their conditioning goes as machine epsilon over the wire interval).
    double wire_jitter = 1e-2;
    bool fill_empty = true;
};

/// Subdivide every wire so consecutive points are mutually nearest neighbors
/// (the diametral ball of each segment stays empty, so the segment is forced
/// into the Delaunay complex), then sprinkle empty-space points in a tube
/// around the wires to give the lattice four-dimensional bulk.
Embedding add_reference_vertices(const CausalGraph& graph, const Embedding& base,
                                 const ReferenceOptions& options);
Embedding add_reference_vertices(const CausalGraph& graph, const Embedding& base, double spacing);

/// Jittered hypercubic block of empty points, for flat-space validation.
Embedding flat_block(const std::array<int, 4>& dims, double spacing, std::uint64_t seed,
                     double jitter = 0.05);

std::string embedding_to_json(const Embedding& embedding);

} // namespace qregge
