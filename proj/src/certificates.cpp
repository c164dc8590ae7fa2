#include "relucert/certificates.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace relucert {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTieTol = 1e-9;
constexpr double kNumeratorTol = 1e-12;

// Distance from u to the boundary between class j and class k of the
// affine classifier (C, d): |(C_j - C_k).u + (d_j - d_k)| / ||C_j - C_k||.
// Zero-norm differences are unreachable within the region: +inf.
double class_boundary_distance(const DecisionFunction& decision, std::size_t j, std::size_t k,
                               const Vector& u) {
    const Matrix& c = decision.weight;
    double value = decision.bias[j] - decision.bias[k];
    double norm_sq = 0.0;
    const double* rj = c.row_data(j);
    const double* rk = c.row_data(k);
    for (std::size_t t = 0; t < c.cols(); ++t) {
        const double diff = rj[t] - rk[t];
        value += diff * u[t];
        norm_sq += diff * diff;
    }
    if (norm_sq == 0.0) return kInf;
    return std::abs(value) / std::sqrt(norm_sq);
}

} // namespace

SimplexCertificate simplex_certificate(const MlpNetwork& net, const Vector& u) {
    const ForwardTrace trace = forward(net, u);
    const RegionBundle bundle = compute_region(net, trace);
    return simplex_certificate(bundle, trace.predicted, u);
}

SimplexCertificate simplex_certificate(const RegionBundle& bundle, std::size_t predicted,
                                       const Vector& u) {
    SimplexCertificate cert;

    const std::vector<double> faces = face_distances(bundle.region, u);
    cert.p_min = kInf;
    std::size_t p_arg = 0;
    for (std::size_t i = 0; i < faces.size(); ++i) {
        if (faces[i] < cert.p_min) {
            cert.p_min = faces[i];
            p_arg = i;
        }
    }

    const std::size_t num_classes = bundle.decision.weight.rows();
    cert.d_min = kInf;
    std::size_t d_arg = 0;
    for (std::size_t j = 0; j < num_classes; ++j) {
        if (j == predicted) continue;
        const double dist = class_boundary_distance(bundle.decision, j, predicted, u);
        if (dist < cert.d_min) {
            cert.d_min = dist;
            d_arg = j;
        }
    }

    if (cert.p_min <= cert.d_min) {
        cert.value = cert.p_min;
        cert.active_branch = BindingBranch::FaceBinding;
        if (!faces.empty() && std::isfinite(cert.p_min)) cert.binding_face = p_arg;
    } else {
        cert.value = cert.d_min;
        cert.active_branch = BindingBranch::BoundaryBinding;
        cert.binding_class = d_arg;
    }
    return cert;
}

CertificateGradient simplex_gradient(const MlpNetwork& net, const Vector& u) {
    const ForwardTrace trace = forward(net, u);
    const RegionBundle bundle = compute_region(net, trace);
    const std::size_t k = trace.predicted;
    const std::size_t dim = u.dim();

    // All candidate terms |w.u + b| / ||w||, faces first then class
    // boundaries, in index order.
    struct Term {
        double distance;
        double signed_value; // w.u + b
        double norm;
        const double* w_face;      // face row when a face term
        std::size_t class_index;   // boundary class when a boundary term
        bool is_face;
    };
    std::vector<Term> terms;
    terms.reserve(bundle.region.face_normals.rows() + net.num_classes());

    for (std::size_t i = 0; i < bundle.region.face_normals.rows(); ++i) {
        const double* row = bundle.region.face_normals.row_data(i);
        double value = bundle.region.face_offsets[i];
        double norm_sq = 0.0;
        for (std::size_t t = 0; t < dim; ++t) {
            value += row[t] * u[t];
            norm_sq += row[t] * row[t];
        }
        if (norm_sq == 0.0) continue; // degenerate face, +inf distance
        const double norm = std::sqrt(norm_sq);
        terms.push_back({std::abs(value) / norm, value, norm, row, 0, true});
    }
    for (std::size_t j = 0; j < net.num_classes(); ++j) {
        if (j == k) continue;
        const Matrix& c = bundle.decision.weight;
        double value = bundle.decision.bias[j] - bundle.decision.bias[k];
        double norm_sq = 0.0;
        for (std::size_t t = 0; t < dim; ++t) {
            const double diff = c(j, t) - c(k, t);
            value += diff * u[t];
            norm_sq += diff * diff;
        }
        if (norm_sq == 0.0) continue;
        terms.push_back({std::abs(value) / std::sqrt(norm_sq), value, std::sqrt(norm_sq), nullptr, j,
                         false});
    }

    CertificateGradient out;
    out.grad = Vector(dim);
    if (terms.empty()) {
        out.at_kink = true;
        return out;
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < terms.size(); ++i) {
        if (terms[i].distance < terms[best].distance) best = i;
    }
    std::size_t ties = 0;
    for (const Term& t : terms) {
        if (t.distance <= terms[best].distance + kTieTol) ++ties;
    }
    const Term& b = terms[best];
    out.at_kink = ties > 1 || std::abs(b.signed_value) < kNumeratorTol;

    const double sign = b.signed_value >= 0.0 ? 1.0 : -1.0;
    if (b.is_face) {
        for (std::size_t t = 0; t < dim; ++t) out.grad[t] = sign * b.w_face[t] / b.norm;
    } else {
        const Matrix& c = bundle.decision.weight;
        for (std::size_t t = 0; t < dim; ++t) {
            out.grad[t] = sign * (c(b.class_index, t) - c(k, t)) / b.norm;
        }
    }
    return out;
}

BoxMinResult box_min_abs_affine(const Vector& a, double b) {
    if (a.dim() == 0) {
        throw ValidationError("box_min_abs_affine: empty coefficient vector");
    }
    const std::size_t n = a.dim();
    double lo = b;
    double hi = b;
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i] < 0.0) lo += a[i];
        else hi += a[i];
    }

    BoxMinResult result;
    result.argmin = Vector(n);

    if (lo <= 0.0 && 0.0 <= hi) {
        // Zero is attainable: water-fill coordinates in index order
        // until the running value crosses it.
        double value = b;
        if (value > 0.0) {
            for (std::size_t i = 0; i < n && value > 0.0; ++i) {
                if (a[i] >= 0.0) continue;
                if (value + a[i] >= 0.0) {
                    result.argmin[i] = 1.0;
                    value += a[i];
                } else {
                    result.argmin[i] = -value / a[i];
                    value = 0.0;
                }
            }
        } else if (value < 0.0) {
            for (std::size_t i = 0; i < n && value < 0.0; ++i) {
                if (a[i] <= 0.0) continue;
                if (value + a[i] <= 0.0) {
                    result.argmin[i] = 1.0;
                    value += a[i];
                } else {
                    result.argmin[i] = -value / a[i];
                    value = 0.0;
                }
            }
        }
        result.value = 0.0;
        return result;
    }

    if (lo > 0.0) {
        result.value = lo;
        for (std::size_t i = 0; i < n; ++i) result.argmin[i] = a[i] < 0.0 ? 1.0 : 0.0;
    } else { // hi < 0
        result.value = -hi;
        for (std::size_t i = 0; i < n; ++i) result.argmin[i] = a[i] > 0.0 ? 1.0 : 0.0;
    }
    return result;
}

DecisionBoundaryCertificate decision_boundary_certificate(const MlpNetwork& net, const Vector& u) {
    if (net.depth() != 2) {
        throw UnsupportedArchitectureError(
            "decision_boundary_certificate: defined for two-layer networks only, got depth " +
            std::to_string(net.depth()));
    }
    return decision_boundary_certificate(net, u, spectral_norm(net.layer(0).weight));
}

DecisionBoundaryCertificate decision_boundary_certificate(const MlpNetwork& net, const Vector& u,
                                                          double first_layer_spectral_norm) {
    if (net.depth() != 2) {
        throw UnsupportedArchitectureError(
            "decision_boundary_certificate: defined for two-layer networks only, got depth " +
            std::to_string(net.depth()));
    }
    const std::size_t num_classes = net.num_classes();
    if (num_classes < 2) {
        throw ValidationError("decision_boundary_certificate: need at least two classes");
    }

    const ForwardTrace trace = forward(net, u);
    const std::size_t k = trace.predicted;
    const Vector& z1 = trace.raw[0]; // W1 u + b1, one value per hidden unit
    const Matrix& w2 = net.layer(1).weight;
    const Vector& b2 = net.layer(1).bias;
    const std::size_t hidden = z1.dim();

    DecisionBoundaryCertificate cert;
    cert.first_layer_spectral_norm = first_layer_spectral_norm;
    cert.value = kInf;

    Vector coeff(hidden);
    for (std::size_t j = 0; j < num_classes; ++j) {
        if (j == k) continue;
        double head_norm_sq = 0.0;
        for (std::size_t i = 0; i < hidden; ++i) {
            const double diff = w2(j, i) - w2(k, i);
            coeff[i] = diff * z1[i];
            head_norm_sq += diff * diff;
        }
        const double head_norm = std::sqrt(head_norm_sq);
        BoxMinResult inner = box_min_abs_affine(coeff, b2[j] - b2[k]);

        cert.classes.push_back(j);
        cert.per_class_numerators.push_back(inner.value);
        cert.head_row_norms.push_back(head_norm);
        cert.minimizing_theta.push_back(std::move(inner.argmin));

        const double denom = head_norm * first_layer_spectral_norm;
        if (denom == 0.0) continue; // identical logit rows: skipped as +inf
        const double dist = cert.per_class_numerators.back() / denom;
        if (dist < cert.value) cert.value = dist;
    }
    return cert;
}

} // namespace relucert
