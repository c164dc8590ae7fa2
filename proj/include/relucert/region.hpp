#pragma once

#include <vector>

#include "relucert/linalg.hpp"
#include "relucert/network.hpp"

namespace relucert {

/// Polyhedron S = {x : face_normals * x + face_offsets >= 0} describing
/// all inputs that induce one activation pattern. Has exactly
/// sum(N_1..N_{M-1}) rows; layer_row_offsets[i] is the first row
/// contributed by hidden layer i+1.
struct ActivationRegion {
    Matrix face_normals;                       // P, (sum N_i) x D
    Vector face_offsets;                       // q
    std::vector<std::size_t> layer_row_offsets; // M-1 entries
};

/// Affine map x -> weight * x + bias that coincides with (part of) the
/// network on an activation region.
struct DecisionFunction {
    Matrix weight; // C
    Vector bias;   // d
};

/// Pattern, region and decision function induced by one input, plus the
/// per-layer affine maps (entry i gives z^(i+1) restricted to the
/// region; the last entry equals `decision`).
struct RegionBundle {
    ActivationPattern pattern;
    ActivationRegion region;
    DecisionFunction decision;
    std::vector<DecisionFunction> per_layer_affine; // M entries
};

/// Single-pass computation of the activation region and decision
/// function for the pattern induced by x:
///   C <- W^(1), d <- b^(1)
///   per hidden layer i: append diag(2 theta^(i) - 1) * (C, d) to (P, q),
///   then C <- W^(i+1) diag(theta^(i)) C,
///        d <- W^(i+1) diag(theta^(i)) d + b^(i+1).
RegionBundle compute_region(const MlpNetwork& net, const Vector& x);

/// Same, reusing an existing forward trace of x.
RegionBundle compute_region(const MlpNetwork& net, const ForwardTrace& trace);

/// true iff min_i (P_i . x + q_i) >= -eps.
bool region_contains(const ActivationRegion& region, const Vector& x, double eps = 1e-9);

/// Per-face distances |P_i . u + q_i| / ||P_i||_2. Faces with a zero
/// normal are degenerate and report +infinity; minima downstream skip
/// them.
std::vector<double> face_distances(const ActivationRegion& region, const Vector& u);

/// Only the final affine map (C, d), accumulated backwards through the
/// ReLU masks of the trace. Same values as compute_region().decision at
/// a fraction of the cost; this is the fast path the attacks use.
DecisionFunction local_decision(const MlpNetwork& net, const ForwardTrace& trace);

} // namespace relucert
