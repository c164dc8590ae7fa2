#pragma once

// Test-only reference implementations, written independently of the
// library code paths they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "relucert/network.hpp"
#include "relucert/trainer.hpp"

namespace testoracle {

// Singular values of a 2x2 matrix in closed form: the roots of
// sigma^4 - ||A||_F^2 sigma^2 + det(A)^2.
inline std::pair<double, double> svd2x2(double a, double b, double c, double d) {
    const double frob_sq = a * a + b * b + c * c + d * d;
    const double det = a * d - b * c;
    const double disc = std::sqrt(std::max(0.0, frob_sq * frob_sq - 4.0 * det * det));
    const double s1 = std::sqrt(std::max(0.0, (frob_sq + disc) / 2.0));
    const double s2 = std::sqrt(std::max(0.0, (frob_sq - disc) / 2.0));
    return {s1, s2};
}

// Straight-line forward pass over raw weight entries; no shared code
// with relucert::forward.
inline std::vector<double> naive_forward(const relucert::MlpNetwork& net,
                                         const std::vector<double>& x) {
    std::vector<double> current = x;
    for (std::size_t l = 0; l < net.depth(); ++l) {
        const relucert::Matrix& w = net.layer(l).weight;
        const relucert::Vector& b = net.layer(l).bias;
        std::vector<double> next(w.rows());
        for (std::size_t i = 0; i < w.rows(); ++i) {
            double sum = b[i];
            for (std::size_t j = 0; j < w.cols(); ++j) sum += w(i, j) * current[j];
            next[i] = sum;
        }
        if (l + 1 < net.depth()) {
            for (double& v : next) v = v > 0.0 ? v : 0.0;
        }
        current = std::move(next);
    }
    return current;
}

// Exhaustive scan argmax, lowest index wins.
inline std::size_t scan_argmax(const std::vector<double>& values) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[best]) best = i;
    }
    return best;
}

inline double unit_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double symmetric_uniform(std::mt19937_64& rng, double scale) {
    return scale * (2.0 * unit_uniform(rng) - 1.0);
}

// Standard normal via Box-Muller on the portable uniform.
inline double standard_normal(std::mt19937_64& rng) {
    double u1 = unit_uniform(rng);
    while (u1 <= 1e-300) u1 = unit_uniform(rng);
    const double u2 = unit_uniform(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

inline relucert::Matrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols,
                                      double scale = 1.0) {
    relucert::Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = symmetric_uniform(rng, scale);
    }
    return m;
}

inline relucert::Vector random_vector(std::mt19937_64& rng, std::size_t dim, double scale = 1.0) {
    relucert::Vector v(dim);
    for (std::size_t i = 0; i < dim; ++i) v[i] = symmetric_uniform(rng, scale);
    return v;
}

// Random fully-connected ReLU net with the given widths; weight scale
// keeps activations in a moderate range.
inline relucert::MlpNetwork random_net(std::mt19937_64& rng, const std::vector<std::size_t>& widths,
                                       double scale = 1.0) {
    std::vector<relucert::Layer> layers;
    for (std::size_t i = 1; i < widths.size(); ++i) {
        const double layer_scale = scale / std::sqrt(static_cast<double>(widths[i - 1]));
        layers.push_back({random_matrix(rng, widths[i], widths[i - 1], layer_scale),
                          random_vector(rng, widths[i], 0.5)});
    }
    return relucert::MlpNetwork(std::move(layers));
}

// Random architecture within the acceptance-criterion envelope.
inline std::vector<std::size_t> random_widths(std::mt19937_64& rng, std::size_t max_depth = 4,
                                              std::size_t max_width = 32, std::size_t max_dim = 16,
                                              std::size_t max_classes = 5) {
    const std::size_t depth = 2 + static_cast<std::size_t>(unit_uniform(rng) * (max_depth - 1));
    std::vector<std::size_t> widths;
    widths.push_back(2 + static_cast<std::size_t>(unit_uniform(rng) * (max_dim - 1)));
    for (std::size_t i = 0; i + 1 < depth; ++i) {
        widths.push_back(2 + static_cast<std::size_t>(unit_uniform(rng) * (max_width - 1)));
    }
    widths.push_back(2 + static_cast<std::size_t>(unit_uniform(rng) * (max_classes - 1)));
    return widths;
}

} // namespace testoracle
