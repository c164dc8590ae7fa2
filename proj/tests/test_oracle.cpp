#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "relucert/certificates.hpp"
#include "relucert/oracle.hpp"
#include "oracles.hpp"

using namespace relucert;

namespace {

// Pinned two-layer net with logits (0, x1 - 0.5): the only decision
// boundary is the vertical line x1 = 0.5.
MlpNetwork vertical_boundary_net(double beta = 10.0) {
    return MlpNetwork({{Matrix::identity(2), Vector{beta, beta}},
                       {Matrix::from_rows({{0, 0}, {1, 0}}), Vector{0.0, -beta - 0.5}}});
}

} // namespace

TEST_CASE("grid oracle brackets a known boundary distance") {
    const MlpNetwork net = vertical_boundary_net();
    const OracleResult r = grid_oracle(net, Vector{0.0, 0.0}, 1.0);
    REQUIRE(r.status == OracleStatus::FoundAdversarial);
    CHECK(std::abs(r.distance_upper - 0.5) <= r.resolution);
    CHECK(r.distance_lower <= 0.5);
    CHECK(r.distance_lower <= r.distance_upper);
    CHECK(r.distance_upper - r.distance_lower <= 2.0 * r.resolution * std::sqrt(2.0) + 1e-12);
    CHECK(forward(net, r.witness).predicted != forward(net, Vector{0.0, 0.0}).predicted);
}

TEST_CASE("grid oracle reports when the box holds no adversarial") {
    // Zero output weights with distinct biases: constant prediction.
    const MlpNetwork net({{Matrix::identity(2), Vector(2)},
                          {Matrix(2, 2), Vector{1.0, 0.0}}});
    const OracleResult r = grid_oracle(net, Vector{0.0, 0.0}, 1.0);
    CHECK(r.status == OracleStatus::NoAdversarialInBox);
    CHECK(std::isinf(r.distance_lower));
    CHECK(std::isinf(r.distance_upper));
}

TEST_CASE("grid oracle rejects high-dimensional inputs and bad parameters") {
    std::mt19937_64 rng(501);
    const MlpNetwork net = testoracle::random_net(rng, {4, 6, 2});
    CHECK_THROWS_AS(grid_oracle(net, testoracle::random_vector(rng, 4), 1.0),
                    UnsupportedArchitectureError);
    const MlpNetwork small = vertical_boundary_net();
    CHECK_THROWS_AS(grid_oracle(small, Vector{0.0, 0.0}, -1.0), ValidationError);
    CHECK_THROWS_AS(grid_oracle(small, Vector{0.0, 0.0}, 1.0, 0), ValidationError);
}

TEST_CASE("grid oracle refinement is monotone in the upper bound") {
    std::mt19937_64 rng(503);
    for (int trial = 0; trial < 10; ++trial) {
        const MlpNetwork net = testoracle::random_net(rng, {2, 5, 2});
        const Vector u = testoracle::random_vector(rng, 2, 1.0);
        double prev = std::numeric_limits<double>::infinity();
        for (std::size_t levels = 1; levels <= 4; ++levels) {
            const OracleResult r = grid_oracle(net, u, 2.0, levels);
            if (r.status != OracleStatus::FoundAdversarial) break;
            CHECK(r.distance_upper <= prev + 1e-15);
            prev = r.distance_upper;
        }
    }
}

TEST_CASE("both certificates are below the oracle upper bound") {
    std::mt19937_64 rng(509);
    int found = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const MlpNetwork net = testoracle::random_net(rng, {2, 4, 2});
        const Vector u = testoracle::random_vector(rng, 2, 1.0);
        const OracleResult oracle = grid_oracle(net, u, 4.0);
        if (oracle.status != OracleStatus::FoundAdversarial) continue;
        ++found;
        const SimplexCertificate simplex = simplex_certificate(net, u);
        const DecisionBoundaryCertificate db = decision_boundary_certificate(net, u);
        CHECK(simplex.value <= oracle.distance_upper + oracle.resolution);
        if (std::isfinite(db.value)) {
            CHECK(db.value <= oracle.distance_upper + oracle.resolution);
        }
    }
    CHECK(found > 100); // the probe should actually exercise the bound
}

TEST_CASE("exact enumeration on a single-region net is the plain projection") {
    const MlpNetwork net = vertical_boundary_net();
    const double exact = enumerate_exact_2layer(net, Vector{0.0, 0.0});
    CHECK(exact == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("exact enumeration validates its preconditions") {
    std::mt19937_64 rng(521);
    const MlpNetwork deep = testoracle::random_net(rng, {2, 4, 4, 2});
    CHECK_THROWS_AS(enumerate_exact_2layer(deep, testoracle::random_vector(rng, 2)),
                    UnsupportedArchitectureError);
    const MlpNetwork wide = testoracle::random_net(rng, {2, 13, 2});
    CHECK_THROWS_AS(enumerate_exact_2layer(wide, testoracle::random_vector(rng, 2)),
                    UnsupportedArchitectureError);
    const MlpNetwork multi = testoracle::random_net(rng, {2, 4, 3});
    CHECK_THROWS_AS(enumerate_exact_2layer(multi, testoracle::random_vector(rng, 2)),
                    UnsupportedArchitectureError);
}

TEST_CASE("grid oracle and exact enumeration agree within grid resolution") {
    std::mt19937_64 rng(523);
    int agreed = 0;
    int trial = 0;
    while (agreed < 50 && trial < 500) {
        ++trial;
        const std::size_t hidden = 2 + static_cast<std::size_t>(testoracle::unit_uniform(rng) * 4);
        const MlpNetwork net = testoracle::random_net(rng, {2, hidden, 2});
        const Vector u = testoracle::random_vector(rng, 2, 1.0);
        const double exact = enumerate_exact_2layer(net, u);
        if (!std::isfinite(exact)) continue;
        // The bracket is only meaningful when the true optimum lies inside
        // the inscribed ball of the search box.
        const double radius = std::clamp(1.5 * exact, 0.5, 4.0);
        if (exact > 0.9 * radius) continue;
        const OracleResult grid = grid_oracle(net, u, radius);
        if (grid.status != OracleStatus::FoundAdversarial) continue;
        // The grid can only overshoot the true distance, and only by its
        // resolution; the exact value can only be smaller.
        CHECK(exact <= grid.distance_upper + 1e-9);
        CHECK(grid.distance_upper - exact <= 2.0 * grid.resolution * std::sqrt(2.0) + 1e-9);
        ++agreed;
    }
    CHECK(agreed == 50);
}

TEST_CASE("simplex certificate is below the exact distance on every trial") {
    std::mt19937_64 rng(541);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t hidden = 2 + static_cast<std::size_t>(testoracle::unit_uniform(rng) * 6);
        const std::size_t dim = 2 + static_cast<std::size_t>(testoracle::unit_uniform(rng) * 3);
        const MlpNetwork net = testoracle::random_net(rng, {dim, hidden, 2});
        const Vector u = testoracle::random_vector(rng, dim, 1.5);
        const double exact = enumerate_exact_2layer(net, u);
        if (!std::isfinite(exact)) continue;
        const SimplexCertificate cert = simplex_certificate(net, u);
        CHECK(cert.value <= exact + 1e-9);
        const DecisionBoundaryCertificate db = decision_boundary_certificate(net, u);
        if (std::isfinite(db.value)) {
            CHECK(db.value <= exact + 1e-9);
        }
    }
}
