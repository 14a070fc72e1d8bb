"""Cross-image flow: 4D correlation, separable refinement, score and
transformation maps, and the warping operations built on them.

A correlation tensor between feature maps of two images A and B is laid
out as ``corr[u_a, v_a, u_b, v_b]`` (optionally with one leading batch
axis). Score maps are stored target-major, ``score[u_t, v_t, u_s, v_s]``,
so each ``(u_t, v_t)`` slice is a distribution over source locations; the
A->B map has targets in B and sources in A.

Training warps with the soft score maps (differentiable); evaluation and
visualization use the hard argmax transformation maps.
"""

from __future__ import annotations

import torch
import torch.nn.functional as F
from torch import nn

from .errors import ContractViolationError, InvalidInputError

__all__ = [
    "correlation_tensor",
    "CorrelationRefiner",
    "refine_correlation",
    "score_maps",
    "transformation_map",
    "soft_warp",
    "hard_warp",
]

COSINE_EPS = 1e-8


def _split_batch(t: torch.Tensor, core_ndim: int):
    """Reshape ``t`` to a single leading batch axis; return (tensor, lead shape)."""
    lead = t.shape[: t.ndim - core_ndim]
    return t.reshape(-1, *t.shape[t.ndim - core_ndim :]), lead


def correlation_tensor(feat_a: torch.Tensor, feat_b: torch.Tensor) -> torch.Tensor:
    """All-pairs cosine similarity between two ``(..., C, h, w)`` feature maps.

    Entry ``[u_a, v_a, u_b, v_b]`` is ``<f_a, f_b> / (|f_a||f_b| + eps)`` for
    the feature vectors at those locations.
    """
    if feat_a.ndim < 3 or feat_b.ndim < 3:
        raise InvalidInputError("feature maps must be (..., C, h, w)")
    if feat_a.shape[-3] != feat_b.shape[-3]:
        raise InvalidInputError(
            f"channel mismatch: {feat_a.shape[-3]} vs {feat_b.shape[-3]}"
        )
    fa, lead = _split_batch(feat_a, 3)
    fb, _ = _split_batch(feat_b, 3)
    ha, wa = fa.shape[-2:]
    hb, wb = fb.shape[-2:]
    fa = fa.flatten(-2)  # (B, C, ha*wa)
    fb = fb.flatten(-2)
    dots = torch.einsum("bci,bcj->bij", fa, fb)
    denom = fa.norm(dim=1).unsqueeze(-1) * fb.norm(dim=1).unsqueeze(-2) + COSINE_EPS
    corr = (dots / denom).reshape(-1, ha, wa, hb, wb)
    return corr.reshape(*lead, ha, wa, hb, wb)


def refine_correlation(
    corr: torch.Tensor,
    weight_a: torch.Tensor,
    bias_a: torch.Tensor | None,
    weight_b: torch.Tensor,
    bias_b: torch.Tensor | None,
) -> torch.Tensor:
    """Separable stand-in for a full 4D convolution over the correlation tensor.

    ``weight_a`` is convolved over the leading ``(u_a, v_a)`` axes with the
    trailing axes flattened into the batch, a rectifier is applied, then
    ``weight_b`` is convolved over the trailing ``(u_b, v_b)`` axes. Both are
    single-channel 2D kernels with same-size padding, so the shape is kept.
    """
    core, lead = _split_batch(corr, 4)
    b, ha, wa, hb, wb = core.shape
    pad_a = (weight_a.shape[-2] // 2, weight_a.shape[-1] // 2)
    pad_b = (weight_b.shape[-2] // 2, weight_b.shape[-1] // 2)
    # conv over the A axes, B axes as batch
    x = core.permute(0, 3, 4, 1, 2).reshape(b * hb * wb, 1, ha, wa)
    x = F.conv2d(x, weight_a, bias_a, padding=pad_a)
    x = F.relu(x)
    # conv over the B axes, A axes as batch
    x = x.reshape(b, hb, wb, ha, wa).permute(0, 3, 4, 1, 2).reshape(b * ha * wa, 1, hb, wb)
    x = F.conv2d(x, weight_b, bias_b, padding=pad_b)
    out = x.reshape(b, ha, wa, hb, wb)
    return out.reshape(*lead, ha, wa, hb, wb)


class CorrelationRefiner(nn.Module):
    """Learnable pair of separable 3x3 refinement kernels."""

    def __init__(self, kernel_size: int = 3):
        super().__init__()
        self.weight_a = nn.Parameter(torch.empty(1, 1, kernel_size, kernel_size))
        self.weight_b = nn.Parameter(torch.empty(1, 1, kernel_size, kernel_size))
        self.bias_a = nn.Parameter(torch.zeros(1))
        self.bias_b = nn.Parameter(torch.zeros(1))
        nn.init.normal_(self.weight_a, std=0.01)
        nn.init.normal_(self.weight_b, std=0.01)

    def forward(self, corr: torch.Tensor) -> torch.Tensor:
        return refine_correlation(
            corr, self.weight_a, self.bias_a, self.weight_b, self.bias_b
        )


def score_maps(corr: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
    """Softmax the (refined) correlation tensor into two score maps.

    Returns ``(score_ab, score_ba)``: ``score_ab[u_b, v_b, u_a, v_a]`` is the
    distribution over source locations in A for each target in B, and
    ``score_ba`` the symmetric construction with targets in A.
    """
    if not torch.isfinite(corr).all():
        raise InvalidInputError("correlation tensor contains non-finite values")
    core, lead = _split_batch(corr, 4)
    b, ha, wa, hb, wb = core.shape
    # over A locations for each B target, then move targets in front
    s_ab = torch.softmax(core.reshape(b, ha * wa, hb, wb), dim=1)
    s_ab = s_ab.reshape(b, ha, wa, hb, wb).permute(0, 3, 4, 1, 2)
    # over B locations for each A target; already target-major
    s_ba = torch.softmax(core.reshape(b, ha, wa, hb * wb), dim=3)
    s_ba = s_ba.reshape(b, ha, wa, hb, wb)
    return (
        s_ab.reshape(*lead, hb, wb, ha, wa),
        s_ba.reshape(*lead, ha, wa, hb, wb),
    )


def transformation_map(score: torch.Tensor) -> torch.Tensor:
    """Hard correspondence: per target, the argmax source pixel ``(u_s, v_s)``.

    Ties resolve to the lowest row-major flattened source index, so the
    result is deterministic across platforms.
    """
    core, lead = _split_batch(score, 4)
    b, ht, wt, hs, ws = core.shape
    flat = core.reshape(b, ht, wt, hs * ws)
    top = flat.amax(dim=-1, keepdim=True)
    n = hs * ws
    idx = torch.arange(n, device=score.device).expand_as(flat)
    first = torch.where(flat == top, idx, n).min(dim=-1).values
    out = torch.stack([first // ws, first % ws], dim=-1)
    return out.reshape(*lead, ht, wt, 2)


def soft_warp(score: torch.Tensor, maps: torch.Tensor) -> torch.Tensor:
    """Differentiable warp: expectation of ``maps`` under each target's scores.

    ``score`` is ``(..., h_t, w_t, h_s, w_s)`` and ``maps`` ``(..., K, h_s, w_s)``;
    the result is ``(..., K, h_t, w_t)``.
    """
    if score.shape[-2:] != maps.shape[-2:]:
        raise InvalidInputError(
            f"source dims {tuple(score.shape[-2:])} do not match maps {tuple(maps.shape[-2:])}"
        )
    s, lead = _split_batch(score, 4)
    m, _ = _split_batch(maps, 3)
    if s.shape[0] != m.shape[0]:
        raise InvalidInputError("score and maps disagree on batch shape")
    warped = torch.einsum("btuij,bkij->bktu", s, m)
    return warped.reshape(*lead, m.shape[1], *s.shape[1:3])


def hard_warp(tmap: torch.Tensor, maps: torch.Tensor) -> torch.Tensor:
    """Gather ``maps`` at the transformation map's source indices.

    Non-differentiable; the evaluation-path counterpart of :func:`soft_warp`.
    """
    t, lead = _split_batch(tmap, 3)
    m, _ = _split_batch(maps, 3)
    b, ht, wt, _ = t.shape
    hs, ws = m.shape[-2:]
    if t.min() < 0 or t[..., 0].max() >= hs or t[..., 1].max() >= ws:
        raise ContractViolationError("transformation map indexes outside the source map")
    flat_idx = (t[..., 0] * ws + t[..., 1]).reshape(b, 1, ht * wt)
    gathered = torch.gather(
        m.flatten(-2), 2, flat_idx.expand(-1, m.shape[1], -1)
    )
    return gathered.reshape(*lead, m.shape[1], ht, wt)
