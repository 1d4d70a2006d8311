#pragma once

// Regge calculus over a triangulated embedding. Each lattice point carries a
// metric expressed in its own local frame; at computational points the frame
// contains the null wire directions and the matching diagonal entries of the
// metric are frozen at zero, which makes every wire segment exactly null for
// any admissible metric. Edge intervals average the two endpoint metrics,
// hinge areas come from the squared-interval form of Heron's formula, and
// dihedral fans are evaluated purely from intervals.
//
// Signature handling is a mode switch. Euclidean mode is the validation
// workhorse: ordinary angles via the normalized Gram arccos. Lorentzian mode
// evaluates wedges in the plane orthogonal to the hinge, where the angle of a
// wedge of a Minkowski plane has a quarter-turn real part (pi/2 per light-cone
// crossing, so an interior fan always closes to 2 pi) plus a rapidity
// imaginary part; deficits are read from the part the signature makes
// meaningful. Degenerate (null) hinges are flagged and excluded.

#include "qregge/causal_graph.hpp"
#include "qregge/delaunay.hpp"
#include "qregge/voronoi.hpp"

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <string>
#include <vector>

namespace qregge {

enum class SignatureMode { Euclidean, Lorentzian };
enum class HingeCharacter { Spacelike, Timelike, Null };

using Mat4 = Eigen::Matrix4d;
using Vec4d = Eigen::Vector4d;

/// Metric at one lattice point in that point's local frame. Columns of
/// `basis` are the frame vectors in embedding coordinates; null_dirs marks
/// frame directions along wires, whose diagonal entries stay exactly zero.
struct VertexMetric {
    Mat4 basis = Mat4::Identity();
    Mat4 basis_inv = Mat4::Identity();
    Mat4 g = Mat4::Identity();
    std::array<bool, 4> null_dirs{false, false, false, false};
};

/// Kinetic energy densities along the frame directions plus the interaction
/// energy density U = theta/dV. The kinetic tensor is diag(gamma) in the
/// frame, so with null frame directions it never contributes g_ab T^ab.
struct StressEnergy {
    Vec4d gamma = Vec4d::Zero();
    double potential = 0.0;
};

struct HingeGeometry {
    double area = 0.0;    // Planck areas, always >= 0
    double deficit = 0.0; // angle (euclidean and timelike fans) or rapidity (spacelike fans)
    HingeCharacter character = HingeCharacter::Spacelike;
    bool boundary = false;   // measured against the embedding reference wedge, not 2 pi
    bool degenerate = false; // |Q| under tolerance; contributes nothing anywhere
    double closure_defect = 0.0; // fan-sum distance from exact flat closure, diagnostics
};

struct ActionBreakdown {
    double interior = 0.0;      // (1/8 pi) sum of interior area * deficit
    double boundary_term = 0.0; // (1/8 pi) sum of boundary area * wedge defect
    double matter = 0.0;        // minus the summed vertex phases
    std::vector<double> vertex_gravitational; // per point; sums to interior + boundary_term
    std::vector<double> vertex_matter;        // per point, -theta
    double gravitational() const { return interior + boundary_term; }
    double total() const { return gravitational() + matter; }
};

/// Everything a geometric evaluation needs: the complex, the embedding it was
/// built from, per-point metrics, matter data, and dual volumes.
struct MetricGeometry {
    const SimplicialComplex* complex = nullptr;
    const Embedding* embedding = nullptr;
    SignatureMode mode = SignatureMode::Lorentzian;
    bool positive_phase = true;
    std::vector<VertexMetric> metrics;
    std::vector<StressEnergy> stress;
    std::vector<double> theta;   // per point
    std::vector<double> volumes; // per point, Voronoi dual
};

/// Local frames with flat metric components. Lorentzian mode: wire directions
/// at computational points (diagonal frozen at zero), embedding axes at empty
/// points, components of diag(-1,1,1,1). Euclidean mode: identity frames and
/// the identity metric everywhere.
std::vector<VertexMetric> flat_vertex_metrics(const Embedding& embedding, SignatureMode mode);

/// Assemble a geometry with flat metrics, phases from the embedding points,
/// zero kinetic densities, and volumes from the dual.
MetricGeometry make_flat_geometry(const SimplicialComplex& complex, const Embedding& embedding,
                                  const VoronoiDual& dual, SignatureMode mode);

/// Squared interval of one edge: each endpoint metric evaluates the
/// displacement in its own frame, and the two results are averaged.
double edge_interval(const VertexMetric& a, const VertexMetric& b, const Vec4& edge_vector);

/// Squared intervals for every edge of the complex.
std::vector<double> edge_intervals(const MetricGeometry& geometry);

/// Area, character, and deficit per hinge. Interior deficits are measured
/// against the exact flat closure, boundary ones against the wedge the
/// reference metric subtends in the embedding (so a flat metric gives zero
/// boundary term even where the hull turns a corner).
std::vector<HingeGeometry> hinge_geometries(const MetricGeometry& geometry,
                                            const std::vector<Hinge>& hinge_list,
                                            const std::vector<double>& intervals);

ActionBreakdown gravitational_action(const MetricGeometry& geometry);

/// Matter action of a history: minus the summed eigenphases of its
/// scattering vertices (hbar = 1).
double matter_action(const CausalGraph& history);
double matter_action(const MetricGeometry& geometry);

/// Analytic d I_G / d g_ab(vertex) in the symmetric-perturbation convention
/// (an off-diagonal component moves both (a,b) and (b,a)). The angle terms
/// cancel exactly, so only area derivatives of adjoining hinges appear.
double action_variation(const MetricGeometry& geometry, int vertex, int a, int b);

/// Field-equation residual at one point, tensor components in the local
/// frame: -sum_{h adjoining} eps_h dA_h/dg_ab - 4 pi (T^ab - U g^ab) dV.
/// Zero at a solved point.
Mat4 einstein_regge_residual(const MetricGeometry& geometry, int vertex);

/// Trace identity mismatch R dV - 32 pi theta at one point, where R dV is
/// read off the adjoining-hinge action share. Zero at solved points.
double trace_check(const MetricGeometry& geometry, int vertex);

struct MinAreaFlag {
    int triangle = -1;
    int vertex = -1;   // the bit-flip event the hinge adjoins
    double area = 0.0; // below the Planck area
};
struct MinAreaReport {
    bool enabled = true; // positive-phase mode only
    std::vector<MinAreaFlag> flags;
    std::string note;
};

/// Hinges adjoining a bit-flip event (theta >= pi) with area below the
/// Planck area (hbar G = 1): the curvature demand there is unsatisfiable.
/// Disabled outside positive-phase mode, where deficits are unbounded below.
MinAreaReport min_area_check(const MetricGeometry& geometry);

/// Per-point report: id, class, theta, dV, the ten residual components, and
/// the trace check.
std::string residual_report_csv(const MetricGeometry& geometry);

/// Incremental evaluation engine. Owns a MetricGeometry plus interval and fan
/// caches, and recomputes only what a single-point metric change touches;
/// this is the solver's inner loop. Queries match the free functions.
class ReggeEvaluator {
  public:
    explicit ReggeEvaluator(MetricGeometry geometry);

    const MetricGeometry& geometry() const { return geom_; }
    /// Bulk access; call refresh() after editing metrics through it.
    MetricGeometry& geometry() { return geom_; }

    void refresh();
    void set_metric(int vertex, const Mat4& g);
    void set_gamma(int vertex, const Vec4d& gamma);

    const std::vector<Hinge>& hinge_list() const { return hinges_; }
    const std::vector<double>& intervals() const { return s_; }
    std::vector<HingeGeometry> hinge_data() const;
    ActionBreakdown action() const;
    Mat4 residual(int vertex) const;
    double trace_check(int vertex) const;
    double variation(int vertex, int a, int b) const;

    /// Points whose residual rows move when the metric at `vertex` moves.
    const std::vector<int>& coupled_rows(int vertex) const { return coupled_[vertex]; }
    /// Hinges whose fan data depends on the metric at `vertex`.
    const std::vector<int>& dependent_hinges(int vertex) const { return dep_hinges_[vertex]; }

  private:
    struct HingeState {
        std::complex<double> eps_hat;     // closure (or reference wedge) minus fan sum
        std::complex<double> dA_ds[3];    // complex area derivative per triangle edge
        double w[3] = {0, 0, 0};          // part(eps_hat * dA_ds), residual weights
        double area = 0.0;
        HingeCharacter character = HingeCharacter::Null;
        bool degenerate = true;
        double closure_defect = 0.0;
    };

    void recompute_edge(int e);
    void recompute_hinge(int h);

    MetricGeometry geom_;
    std::vector<Hinge> hinges_;
    std::vector<std::complex<double>> reference_wedge_; // per hinge; 2 pi when interior
    std::vector<std::vector<int>> vertex_edges_;        // edges at a point
    std::vector<std::vector<int>> vertex_hinges_;       // hinges with the point as a corner
    std::vector<std::vector<int>> dep_hinges_;          // hinges reading the point's metric
    std::vector<std::vector<int>> coupled_;             // residual rows per metric column
    std::vector<std::array<Mat4, 2>> edge_outer_;       // per edge/endpoint, lambda lambda^T / 2
    std::vector<std::array<Vec4d, 2>> edge_lambda_;
    std::vector<double> s_;                             // squared interval per edge
    std::vector<std::array<double, 2>> s_half_;         // per-endpoint halves of s
    double s_scale_ = 0.0;                              // complex-wide |s| scale, set per refresh
    std::vector<HingeState> state_;
};

} // namespace qregge
