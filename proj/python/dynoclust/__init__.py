"""Temporal stream clustering: D-Means, KD-Means, and SD-Means."""

try:
    from ._dynoclust import *  # noqa: F401,F403  (installed package layout)
except ImportError:
    from _dynoclust import *  # noqa: F401,F403  (in-tree build layout)

__all__ = [
    "gamma_of",
    "reparam",
    "generate_gaussians",
    "generate_rings",
    "cluster_stream",
    "consistent_accuracy",
]
