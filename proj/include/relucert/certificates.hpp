#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "relucert/network.hpp"
#include "relucert/region.hpp"

namespace relucert {

enum class BindingBranch {
    FaceBinding,     // nearest region face attains the minimum
    BoundaryBinding, // nearest in-region decision boundary attains it
};

/// L2 lower bound min(p_min, d_min) on the distance to the closest
/// adversarial example, valid at any depth. p_min is the distance to the
/// nearest face of the activation region, d_min the distance to the
/// nearest decision boundary of the local affine classifier.
struct SimplexCertificate {
    double p_min = 0.0;
    double d_min = 0.0;
    double value = 0.0;
    std::optional<std::size_t> binding_face;  // set for FaceBinding
    std::optional<std::size_t> binding_class; // set for BoundaryBinding
    BindingBranch active_branch = BindingBranch::FaceBinding;
};

/// Two-layer lower bound: per class pair, the inner minimum over the
/// unit-box relaxation of the activation indicators, divided by
/// ||W2_j - W2_k||_2 * ||W1||_2. +infinity when every class pair has a
/// zero denominator ("no reachable boundary").
struct DecisionBoundaryCertificate {
    double value = 0.0;
    std::vector<std::size_t> classes;         // the j's, ascending, j != predicted
    std::vector<double> per_class_numerators; // relaxed inner minima
    std::vector<double> head_row_norms;       // ||W2_j - W2_k||_2 per class
    double first_layer_spectral_norm = 0.0;   // ||W1||_2
    std::vector<Vector> minimizing_theta;     // box argmin per class, entries in [0,1]
};

struct CertificateGradient {
    Vector grad;
    bool at_kink = false; // tied binding terms or a vanishing numerator
};

struct BoxMinResult {
    double value = 0.0;
    Vector argmin; // entries in [0,1]
};

SimplexCertificate simplex_certificate(const MlpNetwork& net, const Vector& u);

/// Same, reusing an already computed bundle and predicted class for u.
SimplexCertificate simplex_certificate(const RegionBundle& bundle, std::size_t predicted,
                                       const Vector& u);

/// Gradient of the simplex certificate with respect to the input: for a
/// binding term |w.u + b| / ||w||, this is sign(w.u + b) * w / ||w||.
/// Ties within 1e-9 or a numerator below 1e-12 set at_kink and report
/// the subgradient of the lowest-index binding term (faces in row
/// order, then boundary terms in class order).
CertificateGradient simplex_gradient(const MlpNetwork& net, const Vector& u);

/// Minimum of |b + sum_i theta_i a_i| over theta in [0,1]^n. The
/// attainable values form the interval [b + sum min(a_i,0),
/// b + sum max(a_i,0)]; when it straddles zero the argmin is built by
/// water-filling coordinates in index order, otherwise it is the
/// nearest vertex.
BoxMinResult box_min_abs_affine(const Vector& a, double b);

DecisionBoundaryCertificate decision_boundary_certificate(const MlpNetwork& net, const Vector& u);

/// Same, with ||W1||_2 precomputed (it does not depend on u).
DecisionBoundaryCertificate decision_boundary_certificate(const MlpNetwork& net, const Vector& u,
                                                          double first_layer_spectral_norm);

} // namespace relucert
