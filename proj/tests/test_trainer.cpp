#include <doctest.h>

#include <cmath>
#include <random>

#include "relucert/synthdata.hpp"
#include "relucert/trainer.hpp"
#include "oracles.hpp"

using namespace relucert;

TEST_CASE("glorot weights respect the per-layer bound and biases are zero") {
    const MlpNetwork net = glorot_init({784, 1024, 2}, 7);
    const double bound1 = std::sqrt(6.0 / 1808.0); // ~0.0576
    for (double w : net.layer(0).weight.entries()) {
        CHECK(std::abs(w) <= bound1);
    }
    const double bound2 = std::sqrt(6.0 / 1026.0);
    for (double w : net.layer(1).weight.entries()) {
        CHECK(std::abs(w) <= bound2);
    }
    for (std::size_t l = 0; l < net.depth(); ++l) {
        for (std::size_t i = 0; i < net.layer(l).bias.dim(); ++i) {
            CHECK(net.layer(l).bias[i] == 0.0);
        }
    }
}

TEST_CASE("glorot initialization is reproducible per seed") {
    const MlpNetwork a = glorot_init({6, 9, 3}, 42);
    const MlpNetwork b = glorot_init({6, 9, 3}, 42);
    const MlpNetwork c = glorot_init({6, 9, 3}, 43);
    CHECK(a == b);
    CHECK_FALSE(a == c);
}

TEST_CASE("training separates 2-D blobs") {
    const Dataset data = synth_blobs2d(512, 5);
    TrainConfig cfg;
    cfg.architecture = {2, 16, 2};
    cfg.epochs = 20;
    cfg.seed = 5;
    const TrainResult r = train(glorot_init(cfg.architecture, cfg.seed), data, cfg);
    CHECK(r.log.size() == 20);
    CHECK(r.log.back().accuracy >= 0.99);
    CHECK(evaluate_accuracy(r.net, data) >= 0.99);
    for (const EpochStats& e : r.log) {
        CHECK(std::isfinite(e.loss));
    }
}

TEST_CASE("a zero learning rate leaves the weights untouched") {
    const Dataset data = synth_blobs2d(64, 11);
    TrainConfig cfg;
    cfg.architecture = {2, 8, 2};
    cfg.epochs = 3;
    cfg.learning_rate = 0.0;
    const MlpNetwork init = glorot_init(cfg.architecture, 11);
    const TrainResult r = train(init, data, cfg);
    CHECK(r.net == init);
}

TEST_CASE("training is deterministic for a fixed seed") {
    const Dataset data = synth_blobs2d(128, 3);
    TrainConfig cfg;
    cfg.architecture = {2, 8, 2};
    cfg.epochs = 4;
    cfg.seed = 9;
    const MlpNetwork init = glorot_init(cfg.architecture, 9);
    const TrainResult a = train(init, data, cfg);
    const TrainResult b = train(init, data, cfg);
    CHECK(a.net == b.net);
    REQUIRE(a.log.size() == b.log.size());
    for (std::size_t i = 0; i < a.log.size(); ++i) {
        CHECK(a.log[i].loss == b.log[i].loss);
    }
}

TEST_CASE("out-of-range labels are rejected") {
    Dataset data = synth_blobs2d(32, 1);
    data.labels[5] = 2; // only classes 0 and 1 exist
    TrainConfig cfg;
    cfg.architecture = {2, 8, 2};
    cfg.epochs = 1;
    CHECK_THROWS_AS(train(glorot_init(cfg.architecture, 1), data, cfg), ValidationError);
}

TEST_CASE("backprop matches central finite differences on a tiny net") {
    std::mt19937_64 rng(601);
    // [1, 1, 2] toy: five trainable parameters plus the final bias pair.
    const MlpNetwork net = testoracle::random_net(rng, {1, 1, 2});
    Dataset data;
    data.inputs = testoracle::random_matrix(rng, 6, 1, 1.5);
    data.labels = {0, 1, 0, 1, 1, 0};

    const LossGradient analytic = loss_gradient(net, data);
    const double h = 1e-5;

    auto perturbed_loss = [&](std::size_t layer, bool is_bias, std::size_t flat, double eps) {
        std::vector<Layer> layers;
        for (const Layer& l : net.layers()) layers.push_back(l);
        if (is_bias) layers[layer].bias[flat] += eps;
        else layers[layer].weight.data()[flat] += eps;
        return loss_gradient(MlpNetwork(std::move(layers)), data).loss;
    };

    for (std::size_t l = 0; l < net.depth(); ++l) {
        for (std::size_t f = 0; f < net.layer(l).weight.entries().size(); ++f) {
            const double fd = (perturbed_loss(l, false, f, h) - perturbed_loss(l, false, f, -h)) /
                              (2.0 * h);
            const double an = analytic.weight_grads[l].data()[f];
            const double scale = std::max({1e-8, std::abs(fd), std::abs(an)});
            CHECK(std::abs(fd - an) / scale <= 1e-4);
        }
        for (std::size_t f = 0; f < net.layer(l).bias.dim(); ++f) {
            const double fd = (perturbed_loss(l, true, f, h) - perturbed_loss(l, true, f, -h)) /
                              (2.0 * h);
            const double an = analytic.bias_grads[l][f];
            const double scale = std::max({1e-8, std::abs(fd), std::abs(an)});
            CHECK(std::abs(fd - an) / scale <= 1e-4);
        }
    }
}

TEST_CASE("synthetic digit corpus trains to high accuracy on a small net") {
    const Dataset digits = synth_digits(2000, 77);
    // Binarize: label 1 iff digit >= 5.
    Dataset binary;
    binary.inputs = digits.inputs;
    binary.labels.resize(digits.size());
    for (std::size_t i = 0; i < digits.size(); ++i) {
        binary.labels[i] = digits.labels[i] >= 5 ? 1 : 0;
    }
    TrainConfig cfg;
    cfg.architecture = {784, 64, 2};
    cfg.epochs = 5;
    cfg.seed = 21;
    const TrainResult r = train(glorot_init(cfg.architecture, cfg.seed), binary, cfg);
    CHECK(r.log.back().accuracy >= 0.95);
}
