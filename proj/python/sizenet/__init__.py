"""Weak-supervision lab for size-issue prediction.

A statistical teacher scores sales/return ledgers against category return
rates, an MLP student learns from image features under the teacher's
labels and weights, and randomized masking explains what the student looks
at. Everything is deterministic in the run seed.
"""

from ._core import (
    MaskSet,
    Model,
    ProjectionSpec,
    RandomProjection,
    assign_label,
    confidence_score,
    generate_masks,
    kl_asymptote,
    label,
    load_model,
    localization_score,
    log_likelihood,
    pr_ap,
    rise_map,
    roc_auc,
    run_pipeline,
    sample_weight,
    score_bounds,
    simulate,
    train,
    weighted_bce,
)

__all__ = [
    "MaskSet",
    "Model",
    "ProjectionSpec",
    "RandomProjection",
    "assign_label",
    "confidence_score",
    "generate_masks",
    "kl_asymptote",
    "label",
    "load_model",
    "localization_score",
    "log_likelihood",
    "pr_ap",
    "rise_map",
    "roc_auc",
    "run_pipeline",
    "sample_weight",
    "score_bounds",
    "simulate",
    "train",
    "weighted_bce",
]
