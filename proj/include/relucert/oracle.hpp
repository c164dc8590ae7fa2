#pragma once

#include <cstddef>

#include "relucert/network.hpp"

namespace relucert {

enum class OracleStatus {
    FoundAdversarial,
    NoAdversarialInBox,
};

/// Brute-force bracket around the true closest-adversarial distance.
/// `witness` is a concrete misclassified point at distance_upper;
/// `resolution` is the coarsest grid spacing, and the bracket satisfies
/// distance_upper - distance_lower <= 2 * resolution * sqrt(D).
struct OracleResult {
    double distance_lower = 0.0;
    double distance_upper = 0.0;
    Vector witness;
    double resolution = 0.0;
    OracleStatus status = OracleStatus::NoAdversarialInBox;
};

/// Multi-resolution scan of the L-inf box of the given half-width around
/// u: 101 points per axis, then `levels - 1` re-grids of a shrinking box
/// around the best witness. Inputs of dimension up to 3 only. When no
/// grid point is misclassified the distances are +infinity and the
/// status says so.
OracleResult grid_oracle(const MlpNetwork& net, const Vector& u, double radius,
                         std::size_t levels = 4);

/// Exact closest-adversarial distance for a binary two-layer network
/// with at most 12 hidden units: enumerate all activation patterns,
/// project u onto (boundary hyperplane) intersect (pattern polyhedron)
/// per pattern, and take the minimum feasible distance. +infinity when
/// no pattern admits a boundary point.
double enumerate_exact_2layer(const MlpNetwork& net, const Vector& u);

} // namespace relucert
