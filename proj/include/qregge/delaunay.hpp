#pragma once

// Incremental 4D Delaunay triangulation (Bowyer-Watson) of an embedding, with
// deterministic jitter rounds for degenerate inputs and wire-edge recovery by
// midpoint refinement. Closeness is always the ordinary Euclidean metric of
// the embedding; the physical metric never enters here.

#include "qregge/embedding.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace qregge {

enum class EdgeTag { WireSegment, Fill };

struct SimplicialComplex {
    int n_points = 0;
    std::vector<std::array<int, 5>> simplices; // vertex ids, ascending
    std::vector<std::array<int, 2>> edges;
    std::vector<std::array<int, 3>> triangles;
    std::vector<std::array<int, 4>> tetrahedra;
    std::vector<EdgeTag> edge_tags;
    std::vector<std::vector<int>> vertex_simplices;   // per point
    std::vector<std::array<int, 10>> simplex_edges;   // local pair order (ij): 01,02,03,04,12,...
    std::vector<std::array<int, 10>> simplex_triangles;
    std::vector<std::vector<int>> triangle_simplices; // per triangle
    std::vector<char> on_hull;                        // per point

    int edge_index(int a, int b) const;
    int triangle_index(int a, int b, int c) const;

    std::unordered_map<std::uint64_t, int> edge_ids;
    std::unordered_map<std::uint64_t, int> triangle_ids;
};

struct Hinge {
    int triangle = -1;
    std::array<int, 3> edges{};  // edges[i] is the triangle edge opposite vertex i
    std::vector<int> simplices;  // incident 4-simplices; cyclic order when interior
    bool interior = false;
};

/// Triangulate the embedding's points. Missing wire segments trigger midpoint
/// refinement of the offending wires (mutating the embedding), at most
/// `max_refine_rounds` times; unrecoverable wires raise an error naming them.
SimplicialComplex delaunay(Embedding& embedding, int max_refine_rounds = 3);

std::vector<Hinge> hinges(const SimplicialComplex& complex);

/// Structural checks: face closure, tetrahedron sharing, Euler characteristic
/// of a 4-ball, isolated vertices. Throws on violation.
void validate(const SimplicialComplex& complex, const Embedding& embedding);

/// Brute-force empty-circumsphere count over all 4-simplices; a strict
/// interior point within relative margin `rel_tol` counts as a violation.
int empty_sphere_violations(const SimplicialComplex& complex, const Embedding& embedding,
                            double rel_tol = 1e-9);

/// Wire segments of the embedding missing from the complex's edge set.
std::vector<std::array<int, 2>> missing_wire_segments(const SimplicialComplex& complex,
                                                      const Embedding& embedding);

std::string complex_to_json(const SimplicialComplex& complex, const Embedding& embedding);

} // namespace qregge
