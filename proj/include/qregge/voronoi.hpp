#pragma once

// Voronoi dual volumes of a Delaunay complex via signed circumcentric
// subdivision. Each 4-simplex is split into signed kite pieces assigned to
// its vertices; summed per vertex these equal the Voronoi cell volume clipped
// to the convex hull, and summed per simplex they reproduce the simplex
// volume exactly, so the per-vertex volumes partition the hull volume.

#include "qregge/delaunay.hpp"

#include <vector>

namespace qregge {

struct VoronoiDual {
    std::vector<double> volumes;           // per vertex, hull-clipped cell 4-volume
    std::vector<double> edge_dual_measure; // per edge, 3-volume of the shared Voronoi facet
    double hull_volume = 0.0;              // sum of simplex volumes
    double max_partition_error = 0.0;      // worst per-simplex |sum of pieces - volume| / volume
};

VoronoiDual voronoi_volumes(const SimplicialComplex& complex, const Embedding& embedding);

} // namespace qregge
