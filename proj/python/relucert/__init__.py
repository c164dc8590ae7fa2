"""L2 robustness certificates for fully-connected ReLU classifiers.

Thin wrapper over the C++ core: activation-region geometry, the simplex
and decision-boundary certificates, DeepFool / iterative-FGSM upper
bounds, brute-force oracles, and a small Adam trainer.
"""

from relucert._core import (  # noqa: F401
    MlpNetwork,
    RelucertError,
    __version__,
    activation_pattern,
    box_min_abs_affine,
    compute_region,
    decision_boundary_certificate,
    deepfool,
    enumerate_exact_2layer,
    evaluate_accuracy,
    forward,
    glorot_init,
    grid_oracle,
    iterative_fgsm,
    load_idx_images,
    load_idx_labels,
    load_weights,
    save_weights,
    simplex_certificate,
    simplex_gradient,
    synth_blobs2d,
    synth_digits,
    train,
)

__all__ = [
    "MlpNetwork",
    "RelucertError",
    "activation_pattern",
    "box_min_abs_affine",
    "compute_region",
    "decision_boundary_certificate",
    "deepfool",
    "enumerate_exact_2layer",
    "evaluate_accuracy",
    "forward",
    "glorot_init",
    "grid_oracle",
    "iterative_fgsm",
    "load_idx_images",
    "load_idx_labels",
    "load_weights",
    "save_weights",
    "simplex_certificate",
    "simplex_gradient",
    "synth_blobs2d",
    "synth_digits",
    "train",
]
