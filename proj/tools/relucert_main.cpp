// Command line front end: train networks, certify datasets, run attacks
// and oracles, benchmark certificate throughput.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "relucert/attacks.hpp"
#include "relucert/certificates.hpp"
#include "relucert/data_io.hpp"
#include "relucert/oracle.hpp"
#include "relucert/trainer.hpp"

namespace {

using namespace relucert;

constexpr int kExitSoundnessViolation = 3;

std::pair<std::size_t, std::size_t> parse_range(const std::string& text) {
    const auto pos = text.find("..");
    if (pos == std::string::npos) {
        throw ValidationError("--samples expects the form A..B (half-open), got '" + text + "'");
    }
    const std::size_t a = std::stoull(text.substr(0, pos));
    const std::size_t b = std::stoull(text.substr(pos + 2));
    return {a, b};
}

Dataset load_dataset(const std::string& images_path, const std::string& labels_path) {
    IdxImages images = load_idx_images(images_path);
    const std::vector<std::uint8_t> labels = load_idx_labels(labels_path);
    if (images.count != labels.size()) {
        throw ValidationError("dataset mismatch: " + std::to_string(images.count) + " images vs " +
                              std::to_string(labels.size()) + " labels");
    }
    Dataset data;
    data.inputs = std::move(images.data);
    data.labels.assign(labels.begin(), labels.end());
    return data;
}

double mean_of(const std::vector<double>& values) {
    if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

double min_of(const std::vector<double>& values) {
    if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
    return *std::min_element(values.begin(), values.end());
}

void print_column_summary(const char* name, const std::vector<double>& values) {
    if (values.empty()) return;
    std::printf("  %-10s mean=%.9g min=%.9g (n=%zu)\n", name, mean_of(values), min_of(values),
                values.size());
}

struct CertifyOptions {
    std::string weights, images, labels, out;
    std::string samples;
    bool attacks = false;
    bool timings = false;
    bool clip = false;
    unsigned threads = 1;
    std::uint64_t seed = 0;
    double fgsm_step = 0.01;
    std::size_t fgsm_iters = 1000;
    double deepfool_overshoot = 0.02;
    std::size_t deepfool_iters = 100;
};

int run_certify(const CertifyOptions& opt) {
    const MlpNetwork net = load_weights(opt.weights);
    const Dataset data = load_dataset(opt.images, opt.labels);

    std::size_t begin = 0, end = data.size();
    if (!opt.samples.empty()) std::tie(begin, end) = parse_range(opt.samples);
    end = std::min(end, data.size());
    if (begin >= end) {
        throw ValidationError("empty sample range [" + std::to_string(begin) + ", " +
                              std::to_string(end) + ")");
    }

    const bool two_layer = net.depth() == 2;
    const double w1_norm = two_layer ? spectral_norm(net.layer(0).weight) : 0.0;

    const std::size_t count = end - begin;
    std::vector<CertRecord> records(count);
    std::atomic<std::size_t> next{0};
    std::exception_ptr worker_error;
    std::mutex error_mutex;

    auto worker = [&] {
        try {
        for (std::size_t slot = next.fetch_add(1); slot < count; slot = next.fetch_add(1)) {
            const std::size_t id = begin + slot;
            const Vector u = data.sample(id);

            const auto t0 = std::chrono::steady_clock::now();
            const ForwardTrace trace = forward(net, u);
            const RegionBundle bundle = compute_region(net, trace);
            const SimplexCertificate simplex = simplex_certificate(bundle, trace.predicted, u);
            std::optional<double> db;
            if (two_layer) {
                db = decision_boundary_certificate(net, u, w1_norm).value;
            }
            const auto t1 = std::chrono::steady_clock::now();

            CertRecord rec;
            rec.sample_id = id;
            rec.true_label = data.labels[id];
            rec.predicted = trace.predicted;
            rec.p_min = simplex.p_min;
            rec.d_min = simplex.d_min;
            rec.simplex_value = simplex.value;
            rec.db_value = db;
            if (opt.timings) {
                rec.wall_time_us = static_cast<std::uint64_t>(
                    std::chrono::duration_cast<std::chrono::microseconds>(t1 - t0).count());
            }
            if (opt.attacks) {
                const AttackResult df =
                    deepfool(net, u, opt.deepfool_overshoot, opt.deepfool_iters, opt.clip);
                const AttackResult fg = iterative_fgsm(net, u, opt.fgsm_step, opt.fgsm_iters, opt.clip);
                rec.deepfool_dist = df.distance;
                rec.ifgsm_dist = fg.distance;
            }
            records[slot] = std::move(rec);
        }
        } catch (...) {
            const std::lock_guard<std::mutex> lock(error_mutex);
            if (!worker_error) worker_error = std::current_exception();
            next.store(count); // stop the remaining work
        }
    };

    const unsigned threads = std::max(1u, opt.threads);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }
    if (worker_error) std::rethrow_exception(worker_error);

    // A certificate above a successful attack distance is a soundness
    // bug, not a data point.
    std::size_t violations = 0;
    for (const CertRecord& r : records) {
        for (const std::optional<double>& upper : {r.deepfool_dist, r.ifgsm_dist}) {
            if (upper && std::isfinite(*upper) && r.simplex_value > *upper + 1e-9) {
                std::fprintf(stderr, "soundness violation at sample %zu: simplex %.9g > attack %.9g\n",
                             r.sample_id, r.simplex_value, *upper);
                ++violations;
            }
        }
    }

    write_report(records, opt.out);

    std::vector<double> p_mins, d_mins, simplexes, dbs, deepfools, ifgsms;
    for (const CertRecord& r : records) {
        p_mins.push_back(r.p_min);
        d_mins.push_back(r.d_min);
        simplexes.push_back(r.simplex_value);
        if (r.db_value && std::isfinite(*r.db_value)) dbs.push_back(*r.db_value);
        if (r.deepfool_dist && std::isfinite(*r.deepfool_dist)) deepfools.push_back(*r.deepfool_dist);
        if (r.ifgsm_dist && std::isfinite(*r.ifgsm_dist)) ifgsms.push_back(*r.ifgsm_dist);
    }
    std::printf("certified %zu samples -> %s\n", count, opt.out.c_str());
    print_column_summary("p_min", p_mins);
    print_column_summary("d_min", d_mins);
    print_column_summary("simplex", simplexes);
    print_column_summary("db_cert", dbs);
    print_column_summary("deepfool", deepfools);
    print_column_summary("ifgsm", ifgsms);

    if (violations > 0) {
        std::fprintf(stderr, "%zu soundness violation(s)\n", violations);
        return kExitSoundnessViolation;
    }
    return 0;
}

struct BenchOptions {
    std::string weights, images;
    std::size_t count = 100;
    std::uint64_t seed = 0;
};

int run_bench(const BenchOptions& opt) {
    const MlpNetwork net = load_weights(opt.weights);

    std::vector<Vector> inputs;
    if (!opt.images.empty()) {
        IdxImages images = load_idx_images(opt.images);
        const std::size_t n = std::min<std::size_t>(opt.count, images.count);
        for (std::size_t i = 0; i < n; ++i) {
            Vector u(images.data.cols());
            for (std::size_t j = 0; j < u.dim(); ++j) u[j] = images.data(i, j);
            inputs.push_back(std::move(u));
        }
    } else {
        std::mt19937_64 rng(opt.seed);
        for (std::size_t i = 0; i < opt.count; ++i) {
            Vector u(net.input_dim());
            for (std::size_t j = 0; j < u.dim(); ++j) {
                u[j] = static_cast<double>(rng() >> 11) * 0x1.0p-53;
            }
            inputs.push_back(std::move(u));
        }
    }
    if (inputs.empty()) {
        throw ValidationError("bench: no inputs");
    }

    // Warm-up pass, then timed single-threaded runs.
    (void)simplex_certificate(net, inputs.front());
    std::vector<double> seconds;
    seconds.reserve(inputs.size());
    for (const Vector& u : inputs) {
        const auto t0 = std::chrono::steady_clock::now();
        const SimplexCertificate cert = simplex_certificate(net, u);
        const auto t1 = std::chrono::steady_clock::now();
        seconds.push_back(std::chrono::duration<double>(t1 - t0).count());
        if (cert.value < 0.0) std::abort(); // keep the call from being optimized out
    }
    std::vector<double> sorted = seconds;
    std::sort(sorted.begin(), sorted.end());
    const double mean = mean_of(seconds);
    const double median = sorted[sorted.size() / 2];
    const double p95 = sorted[std::min(sorted.size() - 1,
                                       static_cast<std::size_t>(0.95 * sorted.size()))];
    std::printf("bench: %zu samples, single-threaded simplex certificate\n", seconds.size());
    std::printf("  mean=%.9g s  median=%.9g s  p95=%.9g s\n", mean, median, p95);
    return 0;
}

struct TrainOptions {
    std::string images, labels, out;
    std::string test_images, test_labels;
    std::vector<std::size_t> widths;
    std::size_t epochs = 20;
    std::size_t batch = 64;
    double lr = 0.001;
    std::uint64_t seed = 0;
    int binarize_at = -1;
};

int run_train(const TrainOptions& opt) {
    Dataset data = load_dataset(opt.images, opt.labels);
    if (opt.binarize_at >= 0) {
        for (std::size_t& label : data.labels) {
            label = label >= static_cast<std::size_t>(opt.binarize_at) ? 1 : 0;
        }
    }

    TrainConfig cfg;
    cfg.architecture = opt.widths;
    cfg.epochs = opt.epochs;
    cfg.batch_size = opt.batch;
    cfg.learning_rate = opt.lr;
    cfg.seed = opt.seed;

    const MlpNetwork init = glorot_init(cfg.architecture, cfg.seed);
    const TrainResult result = train(init, data, cfg);
    for (std::size_t e = 0; e < result.log.size(); ++e) {
        std::printf("epoch %zu: loss=%.6f accuracy=%.4f\n", e + 1, result.log[e].loss,
                    result.log[e].accuracy);
    }
    save_weights(result.net, opt.out);
    std::printf("saved weights -> %s\n", opt.out.c_str());

    if (!opt.test_images.empty() && !opt.test_labels.empty()) {
        Dataset test = load_dataset(opt.test_images, opt.test_labels);
        if (opt.binarize_at >= 0) {
            for (std::size_t& label : test.labels) {
                label = label >= static_cast<std::size_t>(opt.binarize_at) ? 1 : 0;
            }
        }
        std::printf("test accuracy: %.4f\n", evaluate_accuracy(result.net, test));
    }
    return 0;
}

struct AttackOptions {
    std::string weights, images, labels, out;
    std::string samples;
    bool clip = false;
    double fgsm_step = 0.01;
    std::size_t fgsm_iters = 1000;
    double deepfool_overshoot = 0.02;
    std::size_t deepfool_iters = 100;
};

int run_attack(const AttackOptions& opt) {
    const MlpNetwork net = load_weights(opt.weights);
    const Dataset data = load_dataset(opt.images, opt.labels);
    std::size_t begin = 0, end = data.size();
    if (!opt.samples.empty()) std::tie(begin, end) = parse_range(opt.samples);
    end = std::min(end, data.size());
    if (begin >= end) {
        throw ValidationError("empty sample range");
    }

    std::FILE* out = std::fopen(opt.out.c_str(), "w");
    if (!out) {
        throw IoError("attack: cannot open " + opt.out);
    }
    std::fprintf(out, "sample_id,predicted,deepfool,deepfool_iters,deepfool_success,ifgsm,"
                      "ifgsm_iters,ifgsm_success\n");
    for (std::size_t id = begin; id < end; ++id) {
        const Vector u = data.sample(id);
        const std::size_t predicted = forward(net, u).predicted;
        const AttackResult df = deepfool(net, u, opt.deepfool_overshoot, opt.deepfool_iters, opt.clip);
        const AttackResult fg = iterative_fgsm(net, u, opt.fgsm_step, opt.fgsm_iters, opt.clip);
        std::fprintf(out, "%zu,%zu,%.9g,%zu,%d,%.9g,%zu,%d\n", id, predicted, df.distance,
                     df.iterations_used, df.success ? 1 : 0, fg.distance, fg.iterations_used,
                     fg.success ? 1 : 0);
    }
    std::fclose(out);
    std::printf("attacked %zu samples -> %s\n", end - begin, opt.out.c_str());
    return 0;
}

struct OracleOptions {
    std::string weights, out;
    std::size_t count = 50;
    double radius = 2.0;
    std::size_t levels = 4;
    double input_scale = 1.0;
    std::uint64_t seed = 0;
};

int run_oracle(const OracleOptions& opt) {
    const MlpNetwork net = load_weights(opt.weights);
    std::mt19937_64 rng(opt.seed);

    std::FILE* out = std::fopen(opt.out.c_str(), "w");
    if (!out) {
        throw IoError("oracle: cannot open " + opt.out);
    }
    std::fprintf(out, "sample_id,simplex,db_cert,oracle_lower,oracle_upper,exact,gap\n");

    const bool two_layer = net.depth() == 2;
    const bool exact_ok = two_layer && net.num_classes() == 2 && net.layer(0).weight.rows() <= 12;
    std::size_t violations = 0;

    for (std::size_t id = 0; id < opt.count; ++id) {
        Vector u(net.input_dim());
        for (std::size_t j = 0; j < u.dim(); ++j) {
            u[j] = opt.input_scale * (2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0);
        }
        const SimplexCertificate simplex = simplex_certificate(net, u);
        const double db = two_layer ? decision_boundary_certificate(net, u).value
                                    : std::numeric_limits<double>::quiet_NaN();
        const OracleResult oracle = grid_oracle(net, u, opt.radius, opt.levels);
        const double exact = exact_ok ? enumerate_exact_2layer(net, u)
                                      : std::numeric_limits<double>::quiet_NaN();
        const double gap = oracle.status == OracleStatus::FoundAdversarial
                               ? oracle.distance_upper - simplex.value
                               : std::numeric_limits<double>::quiet_NaN();
        if (oracle.status == OracleStatus::FoundAdversarial &&
            simplex.value > oracle.distance_upper + oracle.resolution) {
            std::fprintf(stderr, "soundness violation at sample %zu\n", id);
            ++violations;
        }
        std::fprintf(out, "%zu,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n", id, simplex.value, db,
                     oracle.distance_lower, oracle.distance_upper, exact, gap);
    }
    std::fclose(out);
    std::printf("oracle table for %zu inputs -> %s\n", opt.count, opt.out.c_str());
    return violations > 0 ? kExitSoundnessViolation : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Robustness certificates for fully-connected ReLU classifiers"};
    app.require_subcommand(1);

    CertifyOptions cert_opt;
    CLI::App* certify = app.add_subcommand("certify", "Certify a dataset and write a CSV report");
    certify->add_option("--weights", cert_opt.weights)->required();
    certify->add_option("--images", cert_opt.images)->required();
    certify->add_option("--labels", cert_opt.labels)->required();
    certify->add_option("--out", cert_opt.out)->required();
    certify->add_option("--samples", cert_opt.samples, "Half-open range A..B");
    certify->add_flag("--attacks", cert_opt.attacks, "Also run DeepFool and iterative FGSM");
    certify->add_flag("--timings", cert_opt.timings, "Record wall times (breaks byte-determinism)");
    certify->add_flag("--clip", cert_opt.clip, "Clamp attack iterates to [0,1]");
    certify->add_option("--threads", cert_opt.threads);
    certify->add_option("--seed", cert_opt.seed);
    certify->add_option("--fgsm-step", cert_opt.fgsm_step);
    certify->add_option("--fgsm-iters", cert_opt.fgsm_iters);
    certify->add_option("--deepfool-overshoot", cert_opt.deepfool_overshoot);
    certify->add_option("--deepfool-iters", cert_opt.deepfool_iters);

    BenchOptions bench_opt;
    CLI::App* bench = app.add_subcommand("bench", "Time the simplex certificate per sample");
    bench->add_option("--weights", bench_opt.weights)->required();
    bench->add_option("--images", bench_opt.images);
    bench->add_option("--count", bench_opt.count);
    bench->add_option("--seed", bench_opt.seed);

    TrainOptions train_opt;
    CLI::App* train_cmd = app.add_subcommand("train", "Train a ReLU classifier on an IDX dataset");
    train_cmd->add_option("--images", train_opt.images)->required();
    train_cmd->add_option("--labels", train_opt.labels)->required();
    train_cmd->add_option("--out", train_opt.out)->required();
    train_cmd->add_option("--widths", train_opt.widths, "Layer widths, e.g. 784 1024 2")
        ->required()
        ->delimiter(',');
    train_cmd->add_option("--epochs", train_opt.epochs);
    train_cmd->add_option("--batch", train_opt.batch);
    train_cmd->add_option("--lr", train_opt.lr);
    train_cmd->add_option("--seed", train_opt.seed);
    train_cmd->add_option("--binarize-at", train_opt.binarize_at,
                          "Map labels to (label >= N) before training");
    train_cmd->add_option("--test-images", train_opt.test_images);
    train_cmd->add_option("--test-labels", train_opt.test_labels);

    AttackOptions attack_opt;
    CLI::App* attack = app.add_subcommand("attack", "Run DeepFool and iterative FGSM");
    attack->add_option("--weights", attack_opt.weights)->required();
    attack->add_option("--images", attack_opt.images)->required();
    attack->add_option("--labels", attack_opt.labels)->required();
    attack->add_option("--out", attack_opt.out)->required();
    attack->add_option("--samples", attack_opt.samples);
    attack->add_flag("--clip", attack_opt.clip);
    attack->add_option("--fgsm-step", attack_opt.fgsm_step);
    attack->add_option("--fgsm-iters", attack_opt.fgsm_iters);
    attack->add_option("--deepfool-overshoot", attack_opt.deepfool_overshoot);
    attack->add_option("--deepfool-iters", attack_opt.deepfool_iters);

    OracleOptions oracle_opt;
    CLI::App* oracle = app.add_subcommand("oracle", "Certificate-vs-oracle gap table for tiny nets");
    oracle->add_option("--weights", oracle_opt.weights)->required();
    oracle->add_option("--out", oracle_opt.out)->required();
    oracle->add_option("--count", oracle_opt.count);
    oracle->add_option("--radius", oracle_opt.radius);
    oracle->add_option("--levels", oracle_opt.levels);
    oracle->add_option("--input-scale", oracle_opt.input_scale);
    oracle->add_option("--seed", oracle_opt.seed);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*certify) return run_certify(cert_opt);
        if (*bench) return run_bench(bench_opt);
        if (*train_cmd) return run_train(train_opt);
        if (*attack) return run_attack(attack_opt);
        if (*oracle) return run_oracle(oracle_opt);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
