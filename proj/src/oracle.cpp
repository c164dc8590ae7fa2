#include "relucert/oracle.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace relucert {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kPointsPerAxis = 101;

struct GridScan {
    bool found = false;
    double best_distance = kInf;
    Vector witness;
};

// Scan a 101-per-axis grid over the box [center - half, center + half]^D
// and keep the misclassified point closest to u.
GridScan scan_box(const MlpNetwork& net, const Vector& u, std::size_t clean_class,
                  const Vector& center, double half, GridScan carry) {
    const std::size_t dim = u.dim();
    const double spacing = 2.0 * half / static_cast<double>(kPointsPerAxis - 1);

    std::array<std::size_t, 3> idx{0, 0, 0};
    Vector point(dim);
    std::size_t total = 1;
    for (std::size_t a = 0; a < dim; ++a) total *= kPointsPerAxis;

    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rem = flat;
        for (std::size_t a = 0; a < dim; ++a) {
            idx[a] = rem % kPointsPerAxis;
            rem /= kPointsPerAxis;
        }
        double dist_sq = 0.0;
        for (std::size_t a = 0; a < dim; ++a) {
            point[a] = center[a] - half + spacing * static_cast<double>(idx[a]);
            const double d = point[a] - u[a];
            dist_sq += d * d;
        }
        const double dist = std::sqrt(dist_sq);
        if (dist >= carry.best_distance) continue; // cannot improve
        if (forward(net, point).predicted != clean_class) {
            carry.found = true;
            carry.best_distance = dist;
            carry.witness = point;
        }
    }
    return carry;
}

} // namespace

OracleResult grid_oracle(const MlpNetwork& net, const Vector& u, double radius,
                         std::size_t levels) {
    const std::size_t dim = net.input_dim();
    if (dim > 3) {
        throw UnsupportedArchitectureError("grid_oracle: input dim " + std::to_string(dim) +
                                           " exceeds the supported maximum of 3");
    }
    if (u.dim() != dim) {
        throw DimensionError("grid_oracle: point dim " + std::to_string(u.dim()) +
                             " does not match network input dim " + std::to_string(dim));
    }
    if (radius <= 0.0) {
        throw ValidationError("grid_oracle: radius must be positive");
    }
    if (levels < 1) {
        throw ValidationError("grid_oracle: need at least one level");
    }

    const std::size_t clean_class = forward(net, u).predicted;
    const double coarse_cell = 2.0 * radius / static_cast<double>(kPointsPerAxis - 1);

    OracleResult result;
    result.resolution = coarse_cell;

    GridScan scan = scan_box(net, u, clean_class, u, radius, GridScan{});
    if (!scan.found) {
        result.distance_lower = kInf;
        result.distance_upper = kInf;
        result.witness = u;
        result.status = OracleStatus::NoAdversarialInBox;
        return result;
    }

    double half = coarse_cell;
    for (std::size_t level = 1; level < levels; ++level) {
        const Vector center = scan.witness;
        scan = scan_box(net, u, clean_class, center, half, std::move(scan));
        half = 2.0 * half / static_cast<double>(kPointsPerAxis - 1);
    }

    result.status = OracleStatus::FoundAdversarial;
    result.distance_upper = scan.best_distance;
    result.distance_lower =
        std::max(0.0, scan.best_distance - 2.0 * coarse_cell * std::sqrt(static_cast<double>(dim)));
    result.witness = std::move(scan.witness);
    return result;
}

namespace {

// Projection of u onto the intersection of a hyperplane {x: c.x + delta
// = 0} (optional) and half-spaces {x: a_i.x + b_i >= 0}, by Dykstra's
// algorithm. Returns false when the iterate still violates a constraint
// after the round limit (empty or numerically hard intersection).
bool dykstra_project(const Vector& u, const Vector* hyper_c, double hyper_delta,
                     const std::vector<Vector>& normals, const std::vector<double>& offsets,
                     std::size_t rounds, double tol, Vector& out) {
    const std::size_t dim = u.dim();
    const std::size_t num_sets = normals.size() + (hyper_c ? 1 : 0);
    std::vector<Vector> corrections(num_sets, Vector(dim));
    Vector x = u;

    for (std::size_t round = 0; round < rounds; ++round) {
        for (std::size_t s = 0; s < num_sets; ++s) {
            Vector y(dim);
            for (std::size_t t = 0; t < dim; ++t) y[t] = x[t] + corrections[s][t];

            Vector projected = y;
            if (hyper_c && s == 0) {
                double value = hyper_delta;
                double norm_sq = 0.0;
                for (std::size_t t = 0; t < dim; ++t) {
                    value += (*hyper_c)[t] * y[t];
                    norm_sq += (*hyper_c)[t] * (*hyper_c)[t];
                }
                const double scale = value / norm_sq;
                for (std::size_t t = 0; t < dim; ++t) projected[t] -= scale * (*hyper_c)[t];
            } else {
                const std::size_t i = hyper_c ? s - 1 : s;
                double value = offsets[i];
                double norm_sq = 0.0;
                for (std::size_t t = 0; t < dim; ++t) {
                    value += normals[i][t] * y[t];
                    norm_sq += normals[i][t] * normals[i][t];
                }
                if (value < 0.0) {
                    const double scale = value / norm_sq;
                    for (std::size_t t = 0; t < dim; ++t) projected[t] -= scale * normals[i][t];
                }
            }
            for (std::size_t t = 0; t < dim; ++t) corrections[s][t] = y[t] - projected[t];
            x = std::move(projected);
        }
    }

    if (hyper_c) {
        double value = hyper_delta;
        for (std::size_t t = 0; t < dim; ++t) value += (*hyper_c)[t] * x[t];
        if (std::abs(value) > tol) return false;
    }
    for (std::size_t i = 0; i < normals.size(); ++i) {
        double value = offsets[i];
        for (std::size_t t = 0; t < dim; ++t) value += normals[i][t] * x[t];
        if (value < -tol) return false;
    }
    out = std::move(x);
    return true;
}

} // namespace

double enumerate_exact_2layer(const MlpNetwork& net, const Vector& u) {
    if (net.depth() != 2) {
        throw UnsupportedArchitectureError("enumerate_exact_2layer: network depth must be 2, got " +
                                           std::to_string(net.depth()));
    }
    if (net.num_classes() != 2) {
        throw UnsupportedArchitectureError("enumerate_exact_2layer: binary classifiers only, got " +
                                           std::to_string(net.num_classes()) + " classes");
    }
    const std::size_t hidden = net.layer(0).weight.rows();
    if (hidden > 12) {
        throw UnsupportedArchitectureError("enumerate_exact_2layer: at most 12 hidden units, got " +
                                           std::to_string(hidden));
    }
    if (u.dim() != net.input_dim()) {
        throw DimensionError("enumerate_exact_2layer: input dim mismatch");
    }

    const std::size_t dim = net.input_dim();
    const Matrix& w1 = net.layer(0).weight;
    const Vector& b1 = net.layer(0).bias;
    const Matrix& w2 = net.layer(1).weight;
    const Vector& b2 = net.layer(1).bias;

    const std::size_t k = forward(net, u).predicted;
    const std::size_t j = 1 - k;

    constexpr double kTol = 1e-9;
    constexpr std::size_t kRounds = 500;
    double best = kInf;

    for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << hidden); ++mask) {
        // Boundary row for this pattern: c = (W2_j - W2_k) diag(theta) W1.
        Vector c(dim);
        double delta = b2[j] - b2[k];
        for (std::size_t i = 0; i < hidden; ++i) {
            if (!(mask & (std::uint64_t(1) << i))) continue;
            const double head = w2(j, i) - w2(k, i);
            const double* row = w1.row_data(i);
            for (std::size_t t = 0; t < dim; ++t) c[t] += head * row[t];
            delta += head * b1[i];
        }
        const double c_norm = c.l2_norm();

        // Pattern polyhedron, with sign-flipped rows for the off units.
        // A zero row makes the constraint vacuous (kept feasible) or the
        // pattern empty.
        std::vector<Vector> normals;
        std::vector<double> offsets;
        normals.reserve(hidden);
        bool empty = false;
        for (std::size_t i = 0; i < hidden; ++i) {
            const double sign = (mask & (std::uint64_t(1) << i)) ? 1.0 : -1.0;
            Vector row(dim);
            double norm_sq = 0.0;
            for (std::size_t t = 0; t < dim; ++t) {
                row[t] = sign * w1(i, t);
                norm_sq += row[t] * row[t];
            }
            const double offset = sign * b1[i];
            if (norm_sq == 0.0) {
                if (offset < 0.0) {
                    empty = true;
                    break;
                }
                continue;
            }
            normals.push_back(std::move(row));
            offsets.push_back(offset);
        }
        if (empty) continue;

        if (c_norm < 1e-15) {
            if (std::abs(delta) > 1e-15) continue; // classes never tie here
            // Classes tie on the whole pattern: any feasible point is on
            // the boundary.
            Vector proj;
            if (dykstra_project(u, nullptr, 0.0, normals, offsets, kRounds, kTol, proj)) {
                double dist = 0.0;
                for (std::size_t t = 0; t < dim; ++t) {
                    const double d = proj[t] - u[t];
                    dist += d * d;
                }
                best = std::min(best, std::sqrt(dist));
            }
            continue;
        }

        // Plain hyperplane projection first; fall back to Dykstra when it
        // leaves the polyhedron.
        double value = delta;
        for (std::size_t t = 0; t < dim; ++t) value += c[t] * u[t];
        Vector candidate(dim);
        const double scale = value / (c_norm * c_norm);
        for (std::size_t t = 0; t < dim; ++t) candidate[t] = u[t] - scale * c[t];

        bool feasible = true;
        for (std::size_t i = 0; i < normals.size(); ++i) {
            double v = offsets[i];
            for (std::size_t t = 0; t < dim; ++t) v += normals[i][t] * candidate[t];
            if (v < -kTol) {
                feasible = false;
                break;
            }
        }
        if (!feasible) {
            if (!dykstra_project(u, &c, delta, normals, offsets, kRounds, kTol, candidate)) {
                continue;
            }
        }
        double dist = 0.0;
        for (std::size_t t = 0; t < dim; ++t) {
            const double d = candidate[t] - u[t];
            dist += d * d;
        }
        best = std::min(best, std::sqrt(dist));
    }
    return best;
}

} // namespace relucert
