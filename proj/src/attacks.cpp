#include "relucert/attacks.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "relucert/region.hpp"

namespace relucert {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double l2_distance(const Vector& a, const Vector& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return std::sqrt(sum);
}

void clamp_unit_box(Vector& x) {
    for (std::size_t i = 0; i < x.dim(); ++i) {
        if (x[i] < 0.0) x[i] = 0.0;
        else if (x[i] > 1.0) x[i] = 1.0;
    }
}

Vector softmax(const Vector& logits) {
    double max = logits[0];
    for (std::size_t i = 1; i < logits.dim(); ++i) max = std::max(max, logits[i]);
    Vector p(logits.dim());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.dim(); ++i) {
        p[i] = std::exp(logits[i] - max);
        sum += p[i];
    }
    for (std::size_t i = 0; i < p.dim(); ++i) p[i] /= sum;
    return p;
}

// d/dx of cross-entropy against class k, exact through the ReLU masks:
// C^T (softmax(logits) - e_k) with C the local affine weight.
Vector loss_input_gradient(const DecisionFunction& local, const Vector& logits, std::size_t k) {
    Vector g_logit = softmax(logits);
    g_logit[k] -= 1.0;
    Vector grad(local.weight.cols());
    for (std::size_t r = 0; r < local.weight.rows(); ++r) {
        const double gr = g_logit[r];
        if (gr == 0.0) continue;
        const double* row = local.weight.row_data(r);
        for (std::size_t t = 0; t < grad.dim(); ++t) grad[t] += gr * row[t];
    }
    return grad;
}

} // namespace

AttackResult iterative_fgsm(const MlpNetwork& net, const Vector& u, double step,
                            std::size_t max_iters, bool clip_unit_box) {
    if (step <= 0.0) {
        throw ValidationError("iterative_fgsm: step must be positive");
    }
    const ForwardTrace clean = forward(net, u);
    const std::size_t k = clean.predicted;

    Vector x = u;
    ForwardTrace trace = clean;
    for (std::size_t it = 1; it <= max_iters; ++it) {
        const DecisionFunction local = local_decision(net, trace);
        const Vector grad = loss_input_gradient(local, trace.logits, k);

        const Vector x_prev = x;
        for (std::size_t t = 0; t < x.dim(); ++t) {
            if (grad[t] > 0.0) x[t] += step;
            else if (grad[t] < 0.0) x[t] -= step;
        }
        if (clip_unit_box) clamp_unit_box(x);

        trace = forward(net, x);
        if (trace.predicted != k) {
            // Tighten along the final step: x_prev keeps the clean class,
            // x flips it.
            double lo = 0.0, hi = 1.0;
            for (int b = 0; b < 20; ++b) {
                const double mid = 0.5 * (lo + hi);
                Vector probe(x.dim());
                for (std::size_t t = 0; t < x.dim(); ++t) {
                    probe[t] = x_prev[t] + mid * (x[t] - x_prev[t]);
                }
                if (forward(net, probe).predicted != k) hi = mid;
                else lo = mid;
            }
            Vector adv(x.dim());
            for (std::size_t t = 0; t < x.dim(); ++t) {
                adv[t] = x_prev[t] + hi * (x[t] - x_prev[t]);
            }
            const double dist = l2_distance(adv, u);
            return {std::move(adv), dist, it, true};
        }
    }
    return {std::move(x), kInf, max_iters, false};
}

AttackResult deepfool(const MlpNetwork& net, const Vector& u, double overshoot,
                      std::size_t max_iters, bool clip_unit_box) {
    if (overshoot < 0.0) {
        throw ValidationError("deepfool: overshoot must be nonnegative");
    }
    const ForwardTrace clean = forward(net, u);
    const std::size_t k = clean.predicted;
    const std::size_t num_classes = net.num_classes();

    Vector x = u;
    ForwardTrace trace = clean;
    for (std::size_t it = 0; it < max_iters; ++it) {
        if (trace.predicted != k) {
            const double dist = l2_distance(x, u);
            return {std::move(x), dist, it, true};
        }
        const DecisionFunction local = local_decision(net, trace);
        const Matrix& c = local.weight;

        // Closest boundary of the local affine classifier.
        double best_ratio = kInf;
        std::size_t best_j = num_classes;
        double best_gap = 0.0, best_norm_sq = 0.0;
        for (std::size_t j = 0; j < num_classes; ++j) {
            if (j == k) continue;
            double norm_sq = 0.0;
            for (std::size_t t = 0; t < c.cols(); ++t) {
                const double diff = c(j, t) - c(k, t);
                norm_sq += diff * diff;
            }
            if (norm_sq == 0.0) continue;
            const double gap = trace.logits[j] - trace.logits[k];
            const double ratio = std::abs(gap) / std::sqrt(norm_sq);
            if (ratio < best_ratio) {
                best_ratio = ratio;
                best_j = j;
                best_gap = gap;
                best_norm_sq = norm_sq;
            }
        }
        if (best_j == num_classes) {
            break; // every boundary is degenerate here
        }

        // Nudge the magnitude so a numerator that is exactly zero (input
        // on a boundary) still produces a crossing step.
        const double magnitude = (std::abs(best_gap) + 1e-12 * (1.0 + std::abs(trace.logits[k]))) /
                                 best_norm_sq;
        for (std::size_t t = 0; t < x.dim(); ++t) {
            x[t] += (1.0 + overshoot) * magnitude * (c(best_j, t) - c(k, t));
        }
        if (clip_unit_box) clamp_unit_box(x);
        trace = forward(net, x);
    }

    if (trace.predicted != k) {
        const double dist = l2_distance(x, u);
        return {std::move(x), dist, max_iters, true};
    }
    return {std::move(x), kInf, max_iters, false};
}

} // namespace relucert
