#pragma once

#include <cstdint>
#include <vector>

#include "relucert/linalg.hpp"

namespace relucert {

struct Layer {
    Matrix weight; // N_i x N_{i-1}
    Vector bias;   // N_i
};

/// Fully-connected ReLU classifier with M >= 2 weight layers. The last
/// layer produces raw logits (no softmax). Immutable after construction;
/// forward passes may run concurrently.
class MlpNetwork {
public:
    explicit MlpNetwork(std::vector<Layer> layers);

    /// Number of weight layers, M.
    std::size_t depth() const noexcept { return layers_.size(); }
    std::size_t input_dim() const noexcept { return layers_.front().weight.cols(); }
    std::size_t num_classes() const noexcept { return layers_.back().weight.rows(); }

    const Layer& layer(std::size_t i) const { return layers_.at(i); }
    const std::vector<Layer>& layers() const noexcept { return layers_; }

    /// [N_0, N_1, ..., N_M].
    std::vector<std::size_t> widths() const;

    /// Total hidden unit count, sum of N_1..N_{M-1}.
    std::size_t hidden_units() const noexcept;

    bool operator==(const MlpNetwork& other) const noexcept { return layers_ == other.layers_; }

private:
    std::vector<Layer> layers_;
};

/// Per-hidden-layer on/off indicators: pattern.per_layer[i][j] == 1 iff
/// unit j of hidden layer i+1 has a nonnegative pre-activation.
struct ActivationPattern {
    std::vector<std::vector<std::uint8_t>> per_layer; // M-1 entries

    bool operator==(const ActivationPattern& other) const = default;
};

/// Everything one evaluation produces: pre-activations z^(i) for every
/// layer, post-ReLU activations a^(i) for the hidden layers, the logits
/// z^(M), and the predicted class.
struct ForwardTrace {
    std::vector<Vector> raw;       // z^(1)..z^(M)
    std::vector<Vector> activated; // a^(1)..a^(M-1)
    Vector logits;                 // == raw.back()
    std::size_t predicted = 0;
};

ForwardTrace forward(const MlpNetwork& net, const Vector& x);

/// Indicator vectors from a trace; z == 0 counts as active.
ActivationPattern activation_pattern(const ForwardTrace& trace);

/// Smallest index attaining the maximum logit.
std::size_t predicted_class(const Vector& logits);

bool operator==(const Layer& a, const Layer& b) noexcept;

} // namespace relucert
