#pragma once

#include <cstddef>

#include "relucert/network.hpp"

namespace relucert {

/// Outcome of one attack run. On success `distance` is the L2 norm of
/// the perturbation and replaying `adversarial_input` through the
/// network flips the clean prediction; on failure `distance` is
/// +infinity and `adversarial_input` holds the last iterate.
struct AttackResult {
    Vector adversarial_input;
    double distance = 0.0;
    std::size_t iterations_used = 0;
    bool success = false;
};

/// Iterative FGSM: ascend the cross-entropy loss against the clean
/// predicted class with fixed-size sign steps; the gradient is exact
/// through the ReLU masks of the current iterate. After the first class
/// flip the final step is tightened by 20 bisections. `clip_unit_box`
/// clamps iterates to [0,1]^D (off by default so distances stay
/// comparable with the unconstrained certificates).
AttackResult iterative_fgsm(const MlpNetwork& net, const Vector& u, double step = 0.01,
                            std::size_t max_iters = 1000, bool clip_unit_box = false);

/// Multi-class DeepFool: repeatedly step to the closest decision
/// boundary of the local affine classifier, overshooting by the given
/// fraction, until the prediction flips.
AttackResult deepfool(const MlpNetwork& net, const Vector& u, double overshoot = 0.02,
                      std::size_t max_iters = 100, bool clip_unit_box = false);

} // namespace relucert
