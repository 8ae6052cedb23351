"""Topological features and histogram gradient boosting for image classification."""

from ._core import (
    Model,
    TopoboostError,
    add_gaussian_noise,
    betti_curve,
    evaluate,
    image_diagrams,
    image_to_point_cloud,
    persistence,
    run_experiment,
    train,
    vectorize,
)

__all__ = [
    "Model",
    "TopoboostError",
    "add_gaussian_noise",
    "betti_curve",
    "evaluate",
    "image_diagrams",
    "image_to_point_cloud",
    "persistence",
    "run_experiment",
    "train",
    "vectorize",
]
