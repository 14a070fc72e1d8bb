"""Training objectives: perceptual reconstruction, cycle consistency,
pose invariance, cross-image equivariance, and their weighted sum.

The perceptual metric is a pixel L1 term plus feature L1 terms from a
frozen 3-stage random convolutional pyramid. The pyramid weights are
drawn once from a pinned seed, so the metric is a fixed measurement
device: reproducible, differentiable, never trained.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch
import torch.nn.functional as F
from torch import nn

from .errors import InvalidInputError
from .flow import soft_warp

__all__ = [
    "PerceptualMetric",
    "cycle_loss",
    "invariance_loss",
    "equivariance_loss",
    "total_loss",
    "LossBreakdown",
    "DEFAULT_LAMBDAS",
]

DEFAULT_LAMBDAS = (1.0, 0.1, 0.1)  # (cycle, equiv, inv)

PYRAMID_STAGES = ((3, 16), (16, 32), (32, 64))


class PerceptualMetric(nn.Module):
    """Frozen random feature pyramid distance.

    ``P(A, B) = mean|A - B| + sum_s mean|F_s(A) - F_s(B)|`` where each stage
    is a stride-2 3x3 convolution (seeded Gaussian weights, He-scaled)
    followed by a rectifier.
    """

    def __init__(self, seed: int = 1234):
        super().__init__()
        self.seed = seed
        gen = torch.Generator().manual_seed(seed)
        for i, (c_in, c_out) in enumerate(PYRAMID_STAGES):
            std = (2.0 / (9 * c_in)) ** 0.5
            w = torch.randn(c_out, c_in, 3, 3, generator=gen) * std
            self.register_buffer(f"stage{i}", w)

    def stages(self) -> list[torch.Tensor]:
        return [getattr(self, f"stage{i}") for i in range(len(PYRAMID_STAGES))]

    def features(self, image: torch.Tensor) -> list[torch.Tensor]:
        if image.ndim == 3:
            image = image.unsqueeze(0)
        feats = []
        x = image
        for w in self.stages():
            x = F.relu(F.conv2d(x, w.to(x.dtype), stride=2, padding=1))
            feats.append(x)
        return feats

    def forward(self, image_a: torch.Tensor, image_b: torch.Tensor) -> torch.Tensor:
        if image_a.shape != image_b.shape:
            raise InvalidInputError(
                f"image shapes differ: {tuple(image_a.shape)} vs {tuple(image_b.shape)}"
            )
        dist = (image_a - image_b).abs().mean()
        for fa, fb in zip(self.features(image_a), self.features(image_b)):
            dist = dist + (fa - fb).abs().mean()
        return dist


def cycle_loss(
    metric: PerceptualMetric,
    image_a: torch.Tensor,
    image_b: torch.Tensor,
    rec_a: torch.Tensor,
    rec_b: torch.Tensor,
) -> torch.Tensor:
    """Perceptual distance of both double-swap reconstructions to the originals."""
    return metric(image_a, rec_a) + metric(image_b, rec_b)


def _stack_norm(a: torch.Tensor, b: torch.Tensor) -> torch.Tensor:
    # Euclidean norm over each flattened (K, h, w) stack, averaged over any batch
    diff = a - b
    lead = diff.shape[:-3]
    return diff.reshape(*lead, -1).norm(dim=-1).mean()


def invariance_loss(
    pose_a: torch.Tensor,
    pose_b: torch.Tensor,
    pose_a_prime: torch.Tensor,
    pose_b_prime: torch.Tensor,
) -> torch.Tensor:
    """Distance between first-pass and second-pass pose maps."""
    if pose_a.shape != pose_a_prime.shape or pose_b.shape != pose_b_prime.shape:
        raise InvalidInputError("pose map shapes must match across passes")
    return _stack_norm(pose_a_prime, pose_a) + _stack_norm(pose_b_prime, pose_b)


def equivariance_loss(
    pose_a: torch.Tensor,
    pose_b: torch.Tensor,
    score_ab: torch.Tensor,
    score_ba: torch.Tensor,
) -> torch.Tensor:
    """Pose maps must commute with the estimated cross-image correspondence.

    ``score_ba`` warps B's pose maps into A's frame and vice versa; pose maps
    are expected at the flow resolution already.
    """
    warped_b_to_a = soft_warp(score_ba, pose_b)
    warped_a_to_b = soft_warp(score_ab, pose_a)
    return _stack_norm(pose_a, warped_b_to_a) + _stack_norm(pose_b, warped_a_to_b)


@dataclass
class LossBreakdown:
    cycle: float
    equiv: float
    inv: float
    total: float
    lambdas: tuple[float, float, float]

    def as_dict(self) -> dict[str, float]:
        return {
            "cycle": self.cycle,
            "equiv": self.equiv,
            "inv": self.inv,
            "total": self.total,
        }


def total_loss(
    cycle: torch.Tensor,
    equiv: torch.Tensor,
    inv: torch.Tensor,
    lambdas: tuple[float, float, float] = DEFAULT_LAMBDAS,
) -> tuple[torch.Tensor, LossBreakdown]:
    """Weighted sum of the component losses.

    Returns the differentiable total plus a detached numeric breakdown.
    """
    lc, le, li = lambdas
    if lc < 0 or le < 0 or li < 0:
        raise InvalidInputError(f"lambdas must be nonnegative, got {lambdas}")
    total = lc * cycle + le * equiv + li * inv
    breakdown = LossBreakdown(
        cycle=float(cycle.detach()),
        equiv=float(equiv.detach()),
        inv=float(inv.detach()),
        total=float(total.detach()),
        lambdas=(lc, le, li),
    )
    return total, breakdown
