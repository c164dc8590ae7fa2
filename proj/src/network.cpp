#include "relucert/network.hpp"

#include <string>
#include <utility>

namespace relucert {

bool operator==(const Layer& a, const Layer& b) noexcept {
    return a.weight == b.weight && a.bias == b.bias;
}

MlpNetwork::MlpNetwork(std::vector<Layer> layers) : layers_(std::move(layers)) {
    if (layers_.size() < 2) {
        throw ValidationError("MlpNetwork: need at least two weight layers, got " +
                              std::to_string(layers_.size()));
    }
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        const Layer& l = layers_[i];
        if (l.weight.rows() == 0 || l.weight.cols() == 0) {
            throw ValidationError("MlpNetwork: layer " + std::to_string(i + 1) + " has an empty weight");
        }
        if (l.bias.dim() != l.weight.rows()) {
            throw DimensionError("MlpNetwork: layer " + std::to_string(i + 1) + " bias has dim " +
                                 std::to_string(l.bias.dim()) + " but weight has " +
                                 std::to_string(l.weight.rows()) + " rows");
        }
        if (i > 0 && l.weight.cols() != layers_[i - 1].weight.rows()) {
            throw DimensionError("MlpNetwork: layer " + std::to_string(i + 1) + " expects input dim " +
                                 std::to_string(l.weight.cols()) + " but layer " + std::to_string(i) +
                                 " outputs " + std::to_string(layers_[i - 1].weight.rows()));
        }
    }
}

std::vector<std::size_t> MlpNetwork::widths() const {
    std::vector<std::size_t> w;
    w.reserve(layers_.size() + 1);
    w.push_back(input_dim());
    for (const Layer& l : layers_) w.push_back(l.weight.rows());
    return w;
}

std::size_t MlpNetwork::hidden_units() const noexcept {
    std::size_t n = 0;
    for (std::size_t i = 0; i + 1 < layers_.size(); ++i) n += layers_[i].weight.rows();
    return n;
}

ForwardTrace forward(const MlpNetwork& net, const Vector& x) {
    if (x.dim() != net.input_dim()) {
        throw DimensionError("forward: input has dim " + std::to_string(x.dim()) +
                             " but network expects " + std::to_string(net.input_dim()));
    }
    ForwardTrace trace;
    trace.raw.reserve(net.depth());
    trace.activated.reserve(net.depth() - 1);

    const Vector* current = &x;
    for (std::size_t i = 0; i < net.depth(); ++i) {
        const Layer& l = net.layer(i);
        Vector z = matvec(l.weight, *current);
        for (std::size_t j = 0; j < z.dim(); ++j) z[j] += l.bias[j];
        trace.raw.push_back(std::move(z));
        if (i + 1 < net.depth()) {
            const Vector& zi = trace.raw.back();
            Vector a(zi.dim());
            for (std::size_t j = 0; j < zi.dim(); ++j) a[j] = zi[j] > 0.0 ? zi[j] : 0.0;
            trace.activated.push_back(std::move(a));
            current = &trace.activated.back();
        }
    }
    trace.logits = trace.raw.back();
    trace.predicted = predicted_class(trace.logits);
    return trace;
}

ActivationPattern activation_pattern(const ForwardTrace& trace) {
    ActivationPattern pattern;
    pattern.per_layer.reserve(trace.raw.size() - 1);
    for (std::size_t i = 0; i + 1 < trace.raw.size(); ++i) {
        const Vector& z = trace.raw[i];
        std::vector<std::uint8_t> theta(z.dim());
        for (std::size_t j = 0; j < z.dim(); ++j) theta[j] = z[j] >= 0.0 ? 1 : 0;
        pattern.per_layer.push_back(std::move(theta));
    }
    return pattern;
}

std::size_t predicted_class(const Vector& logits) {
    if (logits.dim() == 0) {
        throw ValidationError("predicted_class: empty logits");
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < logits.dim(); ++i) {
        if (logits[i] > logits[best]) best = i;
    }
    return best;
}

} // namespace relucert
