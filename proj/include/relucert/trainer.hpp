#pragma once

#include <cstdint>
#include <vector>

#include "relucert/network.hpp"

namespace relucert {

/// Labeled samples, one input per row.
struct Dataset {
    Matrix inputs;                   // num_samples x D
    std::vector<std::size_t> labels; // < num_classes

    std::size_t size() const noexcept { return labels.size(); }
    Vector sample(std::size_t i) const;
};

struct TrainConfig {
    std::vector<std::size_t> architecture; // layer widths, input first
    std::size_t batch_size = 64;
    std::size_t epochs = 20;
    double learning_rate = 0.001;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    std::uint64_t seed = 0;
};

struct EpochStats {
    double loss = 0.0;     // mean cross-entropy over the epoch
    double accuracy = 0.0; // training accuracy over the epoch
};

struct TrainResult {
    MlpNetwork net;
    std::vector<EpochStats> log;
};

/// Glorot-uniform weights (bound sqrt(6 / (fan_in + fan_out))), zero
/// biases. Bit-identical for a fixed seed.
MlpNetwork glorot_init(const std::vector<std::size_t>& widths, std::uint64_t seed);

/// Adam on softmax cross-entropy, seeded shuffling, single-threaded and
/// deterministic. Throws when labels exceed the class count or the loss
/// diverges.
TrainResult train(const MlpNetwork& net, const Dataset& data, const TrainConfig& cfg);

struct LossGradient {
    double loss = 0.0; // mean cross-entropy over the dataset
    std::vector<Matrix> weight_grads;
    std::vector<Vector> bias_grads;
};

/// Mean cross-entropy and its gradient for every parameter, via the same
/// batched backprop the training loop runs.
LossGradient loss_gradient(const MlpNetwork& net, const Dataset& data);

/// Fraction of samples whose predicted class matches the label.
double evaluate_accuracy(const MlpNetwork& net, const Dataset& data);

} // namespace relucert
