"""Unsupervised landmark learning through cross-image cycle consistency.

Subpackages: heatmaps (differentiable landmark representation), networks
(encoders/decoder), flow (cross-image correspondence), losses, synthdata
(procedural dataset with exact ground truth), training, evaluation, cli.
"""

__version__ = "0.1.0"

from . import errors  # noqa: F401
