"""Differentiable landmark representation.

Raw K-channel heatmaps are turned into coordinates and back into Gaussian
feature maps through a two-step transform: per-channel spatial softmax
followed by a coordinate expectation, then an isotropic Gaussian bump is
rendered around each estimated coordinate. Every step is differentiable,
so gradients flow from the rendered maps back into the raw activations.

Conventions used throughout the package:
  * map tensors are ``(..., K, h, w)``; rows run downward (y), columns
    rightward (x),
  * coordinate tensors are ``(..., K, 2)`` with the last axis ``(x, y)``,
  * coordinates are normalized to ``[0, 1]^2`` with the center of pixel
    ``(row u, col v)`` at ``((v + 0.5) / w, (u + 0.5) / h)``.
"""

from __future__ import annotations

import torch

from .errors import ContractViolationError, InvalidInputError, InvalidParameterError

__all__ = [
    "normalize_heatmaps",
    "expected_coordinates",
    "render_gaussians",
    "pose_representation",
    "pixel_center_grid",
]

CHANNEL_SUM_TOL = 1e-4


def pixel_center_grid(h: int, w: int, *, dtype=torch.float32, device=None):
    """Normalized x and y pixel-center coordinates, shapes ``(w,)`` and ``(h,)``."""
    xs = (torch.arange(w, dtype=dtype, device=device) + 0.5) / w
    ys = (torch.arange(h, dtype=dtype, device=device) + 0.5) / h
    return xs, ys


def normalize_heatmaps(raw: torch.Tensor, temperature: float = 1.0) -> torch.Tensor:
    """Per-channel spatial softmax turning raw activations into probability maps.

    ``temperature`` rescales the logits (>1 flattens, <1 sharpens).
    """
    if raw.ndim < 3:
        raise InvalidInputError(f"expected (..., K, h, w), got shape {tuple(raw.shape)}")
    if not torch.isfinite(raw).all():
        raise InvalidInputError("raw heatmaps contain non-finite values")
    if temperature <= 0:
        raise InvalidParameterError(f"temperature must be positive, got {temperature}")
    h, w = raw.shape[-2:]
    flat = (raw / temperature).flatten(-2)
    return torch.softmax(flat, dim=-1).reshape(*raw.shape[:-2], h, w)


def expected_coordinates(prob: torch.Tensor, *, validate: bool = True) -> torch.Tensor:
    """Coordinate expectation under per-channel probability maps.

    Returns ``(..., K, 2)`` normalized ``(x, y)`` positions. Channels whose
    mass deviates from 1 by more than ``CHANNEL_SUM_TOL`` are rejected.
    """
    if prob.ndim < 3:
        raise InvalidInputError(f"expected (..., K, h, w), got shape {tuple(prob.shape)}")
    h, w = prob.shape[-2:]
    if validate:
        sums = prob.sum(dim=(-2, -1))
        if (sums - 1.0).abs().max() > CHANNEL_SUM_TOL:
            raise ContractViolationError(
                f"channel mass deviates from 1 by {(sums - 1.0).abs().max().item():.3e}"
            )
    xs, ys = pixel_center_grid(h, w, dtype=prob.dtype, device=prob.device)
    # marginalize rows for x, columns for y
    x = (prob.sum(dim=-2) * xs).sum(dim=-1)
    y = (prob.sum(dim=-1) * ys).sum(dim=-1)
    return torch.stack([x, y], dim=-1)


def render_gaussians(
    coords: torch.Tensor, sigma: float, h: int, w: int
) -> torch.Tensor:
    """Render one isotropic Gaussian bump per landmark.

    Channel ``t`` holds ``exp(-||pixel - coords_t||^2 / (2 sigma^2))`` on the
    normalized pixel-center grid, so a landmark sitting exactly on a pixel
    center peaks at 1. Deterministic and differentiable w.r.t. ``coords``.
    """
    if sigma <= 0:
        raise InvalidParameterError(f"sigma must be positive, got {sigma}")
    if coords.shape[-1] != 2:
        raise InvalidInputError(f"expected (..., K, 2) coords, got {tuple(coords.shape)}")
    if coords.min() < 0.0 or coords.max() > 1.0:
        raise InvalidInputError("landmark coordinates must lie in [0, 1]^2")
    xs, ys = pixel_center_grid(h, w, dtype=coords.dtype, device=coords.device)
    dx = xs.reshape(1, w) - coords[..., 0:1].unsqueeze(-1)  # (..., K, 1, w)
    dy = ys.reshape(h, 1) - coords[..., 1:2].unsqueeze(-1)  # (..., K, h, 1)
    d2 = dx * dx + dy * dy
    return torch.exp(-d2 / (2.0 * sigma * sigma))


def pose_representation(
    raw: torch.Tensor, sigma: float, temperature: float = 1.0
) -> tuple[torch.Tensor, torch.Tensor]:
    """Two-step transform: raw heatmaps -> coordinates -> Gaussian maps.

    Returns ``(coords, maps)`` where ``maps`` matches the spatial size of
    ``raw``. The intermediate softmax keeps the whole path differentiable.
    """
    prob = normalize_heatmaps(raw, temperature)
    coords = expected_coordinates(prob, validate=False)
    h, w = raw.shape[-2:]
    maps = render_gaussians(coords, sigma, h, w)
    return coords, maps
