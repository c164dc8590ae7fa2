#include "relucert/trainer.hpp"

#include <cmath>
#include <cstring>
#include <numeric>
#include <random>
#include <string>
#include <utility>

namespace relucert {

namespace {

// Portable mapping of engine output to [0, 1): top 53 bits of a 64-bit
// draw, so results do not depend on the standard library's
// uniform_real_distribution.
double unit_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct AdamSlot {
    std::vector<double> m;
    std::vector<double> v;
};

void adam_update(double* params, const double* grad, std::size_t n, AdamSlot& slot,
                 const TrainConfig& cfg, double bias_corr1, double bias_corr2) {
    for (std::size_t i = 0; i < n; ++i) {
        slot.m[i] = cfg.adam_beta1 * slot.m[i] + (1.0 - cfg.adam_beta1) * grad[i];
        slot.v[i] = cfg.adam_beta2 * slot.v[i] + (1.0 - cfg.adam_beta2) * grad[i] * grad[i];
        const double m_hat = slot.m[i] / bias_corr1;
        const double v_hat = slot.v[i] / bias_corr2;
        params[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.adam_eps);
    }
}

struct BatchResult {
    double loss_sum = 0.0; // summed cross-entropy, caller normalizes
    std::size_t correct = 0;
    std::vector<Matrix> grad_w; // d(mean loss)/dW per layer
    std::vector<Vector> grad_b;
};

// One batched forward/backward pass. Gradients are of the mean
// cross-entropy over the batch.
BatchResult batch_forward_backward(const std::vector<Matrix>& weights,
                                   const std::vector<Vector>& biases, const Matrix& batch,
                                   const std::vector<std::size_t>& labels) {
    const std::size_t depth = weights.size();
    const std::size_t count = batch.rows();
    const std::size_t num_classes = weights.back().rows();

    std::vector<Matrix> pre(depth);  // z per layer
    std::vector<Matrix> post(depth); // relu(z); last entry unused
    const Matrix* activ = &batch;
    for (std::size_t l = 0; l < depth; ++l) {
        pre[l] = matmul_nt(*activ, weights[l]);
        for (std::size_t b = 0; b < count; ++b) {
            double* row = pre[l].row_data(b);
            for (std::size_t j = 0; j < biases[l].dim(); ++j) row[j] += biases[l][j];
        }
        if (l + 1 < depth) {
            post[l] = pre[l];
            double* values = post[l].data();
            for (std::size_t idx = 0; idx < post[l].entries().size(); ++idx) {
                if (values[idx] < 0.0) values[idx] = 0.0;
            }
            activ = &post[l];
        }
    }

    BatchResult result;
    result.grad_w.resize(depth);
    result.grad_b.resize(depth);

    // Softmax + cross-entropy; the logits block is reused as
    // d(loss)/d(logits).
    Matrix& logits = pre[depth - 1];
    for (std::size_t b = 0; b < count; ++b) {
        double* row = logits.row_data(b);
        double max = row[0];
        std::size_t arg = 0;
        for (std::size_t j = 1; j < num_classes; ++j) {
            if (row[j] > max) {
                max = row[j];
                arg = j;
            }
        }
        if (arg == labels[b]) ++result.correct;
        double sum = 0.0;
        for (std::size_t j = 0; j < num_classes; ++j) {
            row[j] = std::exp(row[j] - max);
            sum += row[j];
        }
        for (std::size_t j = 0; j < num_classes; ++j) row[j] /= sum;
        result.loss_sum += -std::log(std::max(row[labels[b]], 1e-300));
        row[labels[b]] -= 1.0;
        for (std::size_t j = 0; j < num_classes; ++j) row[j] /= static_cast<double>(count);
    }

    Matrix delta = std::move(logits); // d(loss)/d(z_l), walking backwards
    for (std::size_t l = depth; l-- > 0;) {
        const Matrix& input_act = l == 0 ? batch : post[l - 1];
        result.grad_w[l] = matmul_tn(delta, input_act);
        Vector gb(biases[l].dim());
        for (std::size_t b = 0; b < delta.rows(); ++b) {
            const double* row = delta.row_data(b);
            for (std::size_t j = 0; j < gb.dim(); ++j) gb[j] += row[j];
        }
        result.grad_b[l] = std::move(gb);
        if (l > 0) {
            Matrix next_delta = matmul(delta, weights[l]);
            const double* z = pre[l - 1].data();
            double* nd = next_delta.data();
            for (std::size_t idx = 0; idx < next_delta.entries().size(); ++idx) {
                if (z[idx] <= 0.0) nd[idx] = 0.0;
            }
            delta = std::move(next_delta);
        }
    }
    return result;
}

void validate_dataset(const MlpNetwork& net, const Dataset& data) {
    if (data.size() == 0) {
        throw ValidationError("trainer: empty dataset");
    }
    if (data.inputs.rows() != data.size()) {
        throw DimensionError("trainer: dataset has " + std::to_string(data.inputs.rows()) +
                             " input rows but " + std::to_string(data.size()) + " labels");
    }
    if (data.inputs.cols() != net.input_dim()) {
        throw DimensionError("trainer: dataset dim " + std::to_string(data.inputs.cols()) +
                             " does not match network input dim " + std::to_string(net.input_dim()));
    }
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (data.labels[i] >= net.num_classes()) {
            throw ValidationError("trainer: label " + std::to_string(data.labels[i]) +
                                  " at sample " + std::to_string(i) + " out of range for " +
                                  std::to_string(net.num_classes()) + " classes");
        }
    }
}

} // namespace

Vector Dataset::sample(std::size_t i) const {
    if (i >= size()) {
        throw IndexError("Dataset::sample: index " + std::to_string(i) + " out of range for " +
                         std::to_string(size()) + " samples");
    }
    Vector x(inputs.cols());
    std::memcpy(x.data(), inputs.row_data(i), inputs.cols() * sizeof(double));
    return x;
}

MlpNetwork glorot_init(const std::vector<std::size_t>& widths, std::uint64_t seed) {
    if (widths.size() < 3) {
        throw ValidationError("glorot_init: need at least [input, hidden, output] widths");
    }
    std::mt19937_64 rng(seed);
    std::vector<Layer> layers;
    layers.reserve(widths.size() - 1);
    for (std::size_t i = 1; i < widths.size(); ++i) {
        const std::size_t fan_in = widths[i - 1];
        const std::size_t fan_out = widths[i];
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        Matrix w(fan_out, fan_in);
        for (std::size_t r = 0; r < fan_out; ++r) {
            for (std::size_t c = 0; c < fan_in; ++c) {
                w(r, c) = (2.0 * unit_uniform(rng) - 1.0) * limit;
            }
        }
        layers.push_back({std::move(w), Vector(fan_out)});
    }
    return MlpNetwork(std::move(layers));
}

TrainResult train(const MlpNetwork& net, const Dataset& data, const TrainConfig& cfg) {
    validate_dataset(net, data);
    if (cfg.learning_rate < 0.0) {
        throw ValidationError("train: learning rate must be nonnegative");
    }
    if (cfg.epochs < 1 || cfg.batch_size < 1) {
        throw ValidationError("train: epochs and batch size must be at least 1");
    }

    const std::size_t num_samples = data.size();
    const std::size_t depth = net.depth();

    std::vector<Matrix> weights;
    std::vector<Vector> biases;
    for (const Layer& l : net.layers()) {
        weights.push_back(l.weight);
        biases.push_back(l.bias);
    }
    std::vector<AdamSlot> w_slots(depth), b_slots(depth);
    for (std::size_t l = 0; l < depth; ++l) {
        w_slots[l].m.assign(weights[l].entries().size(), 0.0);
        w_slots[l].v.assign(weights[l].entries().size(), 0.0);
        b_slots[l].m.assign(biases[l].dim(), 0.0);
        b_slots[l].v.assign(biases[l].dim(), 0.0);
    }

    std::mt19937_64 rng(cfg.seed);
    std::vector<std::size_t> order(num_samples);
    std::iota(order.begin(), order.end(), 0);

    TrainResult result{net, {}};
    result.log.reserve(cfg.epochs);
    std::size_t step = 0;

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        // Fisher-Yates with the portable draw.
        for (std::size_t i = num_samples - 1; i > 0; --i) {
            const std::size_t j =
                std::min(i, static_cast<std::size_t>(unit_uniform(rng) * static_cast<double>(i + 1)));
            std::swap(order[i], order[j]);
        }

        double epoch_loss = 0.0;
        std::size_t epoch_correct = 0;

        for (std::size_t start = 0; start < num_samples; start += cfg.batch_size) {
            const std::size_t count = std::min(cfg.batch_size, num_samples - start);
            Matrix batch(count, net.input_dim());
            std::vector<std::size_t> labels(count);
            for (std::size_t b = 0; b < count; ++b) {
                std::memcpy(batch.row_data(b), data.inputs.row_data(order[start + b]),
                            net.input_dim() * sizeof(double));
                labels[b] = data.labels[order[start + b]];
            }

            BatchResult br = batch_forward_backward(weights, biases, batch, labels);
            epoch_loss += br.loss_sum;
            epoch_correct += br.correct;

            ++step;
            const double bias_corr1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(step));
            const double bias_corr2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(step));
            for (std::size_t l = 0; l < depth; ++l) {
                adam_update(weights[l].data(), br.grad_w[l].data(), br.grad_w[l].entries().size(),
                            w_slots[l], cfg, bias_corr1, bias_corr2);
                adam_update(biases[l].data(), br.grad_b[l].data(), br.grad_b[l].dim(), b_slots[l],
                            cfg, bias_corr1, bias_corr2);
            }
        }

        epoch_loss /= static_cast<double>(num_samples);
        if (!std::isfinite(epoch_loss)) {
            throw Error("train: loss diverged at epoch " + std::to_string(epoch + 1));
        }
        result.log.push_back(
            {epoch_loss, static_cast<double>(epoch_correct) / static_cast<double>(num_samples)});
    }

    std::vector<Layer> trained;
    trained.reserve(depth);
    for (std::size_t l = 0; l < depth; ++l) {
        trained.push_back({std::move(weights[l]), std::move(biases[l])});
    }
    result.net = MlpNetwork(std::move(trained));
    return result;
}

LossGradient loss_gradient(const MlpNetwork& net, const Dataset& data) {
    validate_dataset(net, data);
    std::vector<Matrix> weights;
    std::vector<Vector> biases;
    for (const Layer& l : net.layers()) {
        weights.push_back(l.weight);
        biases.push_back(l.bias);
    }
    BatchResult br = batch_forward_backward(weights, biases, data.inputs, data.labels);
    LossGradient out;
    out.loss = br.loss_sum / static_cast<double>(data.size());
    out.weight_grads = std::move(br.grad_w);
    out.bias_grads = std::move(br.grad_b);
    return out;
}

double evaluate_accuracy(const MlpNetwork& net, const Dataset& data) {
    validate_dataset(net, data);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (forward(net, data.sample(i)).predicted == data.labels[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(data.size());
}

} // namespace relucert
