"""Desk-scale networks: shared backbone, appearance and pose extractors,
image decoder, plus checkpoint round-tripping.

The backbone is an 8-conv residual net trained from scratch with two
output taps: landmark-level features at stride 4 and flow-level features
at stride 8. The decoder consumes the concatenation of an appearance map
and a Gaussian pose map and upsamples bilinearly (x2 per block, channels
halved down to a floor) until it reaches the input resolution, finishing
with a linear RGB regression.
"""

from __future__ import annotations

import dataclasses
import hashlib
import io
import json
from dataclasses import dataclass
from pathlib import Path

import torch
import torch.nn.functional as F
from torch import nn

from .errors import InvalidInputError
from .flow import CorrelationRefiner
from .heatmaps import pose_representation

__all__ = [
    "ModelConfig",
    "Backbone",
    "AppearanceHead",
    "PoseHead",
    "Decoder",
    "LandmarkModel",
    "bilinear_upsample_2x",
    "init_weights",
    "save_checkpoint",
    "load_checkpoint",
    "config_hash",
]

VALID_RESOLUTIONS = (32, 64, 128)


@dataclass(frozen=True)
class ModelConfig:
    resolution: int = 64
    landmarks: int = 10
    sigma: float = 0.1
    temperature: float = 1.0
    stem_channels: int = 32
    base_channels: int = 64        # landmark-level features, stride 4
    flow_channels: int = 128       # flow-level features, stride 8
    appearance_channels: int = 256
    decoder_start: int = 256
    decoder_floor: int = 32
    refiner_kernel: int = 3
    init_std: float = 0.01

    def __post_init__(self):
        if self.resolution not in VALID_RESOLUTIONS:
            raise InvalidInputError(
                f"resolution must be one of {VALID_RESOLUTIONS}, got {self.resolution}"
            )
        if self.landmarks < 1:
            raise InvalidInputError("need at least one landmark channel")

    @property
    def feature_size(self) -> int:
        return self.resolution // 4

    @property
    def flow_size(self) -> int:
        return self.resolution // 8


def config_hash(cfg: ModelConfig) -> str:
    payload = json.dumps(dataclasses.asdict(cfg), sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()


def init_weights(module: nn.Module, std: float = 0.01) -> None:
    """Gaussian(0, std) conv weights, zero biases."""
    for m in module.modules():
        if isinstance(m, nn.Conv2d):
            nn.init.normal_(m.weight, mean=0.0, std=std)
            if m.bias is not None:
                nn.init.zeros_(m.bias)


def bilinear_upsample_2x(x: torch.Tensor) -> torch.Tensor:
    """Exact 2x bilinear upsampling (align_corners=False), separable form.

    Matches ``F.interpolate(..., mode="bilinear")`` to float rounding but has
    a much cheaper backward on CPU, which dominates desk-scale training.
    """
    b, c, h, w = x.shape
    xp = F.pad(x, (0, 0, 1, 1), mode="replicate")
    even = 0.25 * xp[:, :, :-2, :] + 0.75 * xp[:, :, 1:-1, :]
    odd = 0.75 * xp[:, :, 1:-1, :] + 0.25 * xp[:, :, 2:, :]
    x = torch.stack([even, odd], dim=3).reshape(b, c, 2 * h, w)
    xp = F.pad(x, (1, 1, 0, 0), mode="replicate")
    even = 0.25 * xp[..., :-2] + 0.75 * xp[..., 1:-1]
    odd = 0.75 * xp[..., 1:-1] + 0.25 * xp[..., 2:]
    return torch.stack([even, odd], dim=4).reshape(b, c, 2 * h, 2 * w)


class _ResidualBlock(nn.Module):
    def __init__(self, channels: int):
        super().__init__()
        self.conv1 = nn.Conv2d(channels, channels, 3, padding=1)
        self.conv2 = nn.Conv2d(channels, channels, 3, padding=1)

    def forward(self, x):
        y = self.conv2(F.relu(self.conv1(x)))
        return F.relu(x + y)


class Backbone(nn.Module):
    """Eight convolutions, taps after the stride-4 and stride-8 stages."""

    def __init__(self, cfg: ModelConfig):
        super().__init__()
        self.cfg = cfg
        self.stem1 = nn.Conv2d(3, cfg.stem_channels, 3, stride=2, padding=1)
        self.stem2 = nn.Conv2d(cfg.stem_channels, cfg.base_channels, 3, stride=2, padding=1)
        self.block1 = _ResidualBlock(cfg.base_channels)
        self.down = nn.Conv2d(cfg.base_channels, cfg.flow_channels, 3, stride=2, padding=1)
        self.block2 = _ResidualBlock(cfg.flow_channels)
        self.tail = nn.Conv2d(cfg.flow_channels, cfg.flow_channels, 3, padding=1)

    def forward(self, image: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        if image.ndim != 4 or image.shape[1] != 3:
            raise InvalidInputError(f"expected (B, 3, H, W) image, got {tuple(image.shape)}")
        if image.shape[-2] != self.cfg.resolution or image.shape[-1] != self.cfg.resolution:
            raise InvalidInputError(
                f"expected {self.cfg.resolution}x{self.cfg.resolution} input, "
                f"got {image.shape[-2]}x{image.shape[-1]}"
            )
        x = F.relu(self.stem1(image))
        x = F.relu(self.stem2(x))
        feats = self.block1(x)
        y = F.relu(self.down(feats))
        y = self.block2(y)
        flow_feats = F.relu(self.tail(y))
        return feats, flow_feats


class AppearanceHead(nn.Module):
    """Two stacked 3x3 convolutions with rectifiers."""

    def __init__(self, cfg: ModelConfig):
        super().__init__()
        self.conv1 = nn.Conv2d(cfg.base_channels, cfg.appearance_channels, 3, padding=1)
        self.conv2 = nn.Conv2d(cfg.appearance_channels, cfg.appearance_channels, 3, padding=1)

    def forward(self, feats: torch.Tensor) -> torch.Tensor:
        return F.relu(self.conv2(F.relu(self.conv1(feats))))


class PoseHead(nn.Module):
    """Same stack as the appearance head plus a linear 1x1 landmark layer."""

    def __init__(self, cfg: ModelConfig):
        super().__init__()
        self.conv1 = nn.Conv2d(cfg.base_channels, cfg.base_channels, 3, padding=1)
        self.conv2 = nn.Conv2d(cfg.base_channels, cfg.base_channels, 3, padding=1)
        self.out = nn.Conv2d(cfg.base_channels, cfg.landmarks, 1)

    def forward(self, feats: torch.Tensor) -> torch.Tensor:
        return self.out(F.relu(self.conv2(F.relu(self.conv1(feats)))))


class Decoder(nn.Module):
    """Upsampling decoder from concatenated appearance + pose maps to RGB."""

    def __init__(self, cfg: ModelConfig):
        super().__init__()
        self.cfg = cfg
        blocks = []
        in_ch = cfg.appearance_channels + cfg.landmarks
        ch = cfg.decoder_start
        size = cfg.feature_size
        self.upsample_count = 0
        while True:
            blocks.append(
                nn.Sequential(
                    nn.Conv2d(in_ch, ch, 3, padding=1),
                    nn.ReLU(),
                    nn.Conv2d(ch, ch, 3, padding=1),
                    nn.ReLU(),
                )
            )
            if size >= cfg.resolution:
                break
            size *= 2
            self.upsample_count += 1
            in_ch = ch
            ch = max(ch // 2, cfg.decoder_floor)
        self.blocks = nn.ModuleList(blocks)
        self.out = nn.Conv2d(in_ch, 3, 3, padding=1)

    def forward(self, appearance: torch.Tensor, pose_maps: torch.Tensor) -> torch.Tensor:
        if appearance.shape[-2:] != pose_maps.shape[-2:]:
            raise InvalidInputError(
                f"appearance {tuple(appearance.shape[-2:])} and pose "
                f"{tuple(pose_maps.shape[-2:])} spatial dims differ"
            )
        x = torch.cat([appearance, pose_maps], dim=1)
        for i, block in enumerate(self.blocks):
            x = block(x)
            if i < len(self.blocks) - 1:
                x = bilinear_upsample_2x(x)
        return self.out(x)


class LandmarkModel(nn.Module):
    """Backbone + extractors + decoder + flow refinement kernels."""

    def __init__(self, cfg: ModelConfig):
        super().__init__()
        self.cfg = cfg
        self.backbone = Backbone(cfg)
        self.appearance_head = AppearanceHead(cfg)
        self.pose_head = PoseHead(cfg)
        self.decoder = Decoder(cfg)
        self.refiner = CorrelationRefiner(cfg.refiner_kernel)
        init_weights(self, cfg.init_std)

    def encode(self, image: torch.Tensor) -> dict[str, torch.Tensor]:
        """Run the extraction side: features, appearance, landmarks, pose maps."""
        feats, flow_feats = self.backbone(image)
        appearance = self.appearance_head(feats)
        raw = self.pose_head(feats)
        coords, pose_maps = pose_representation(raw, self.cfg.sigma, self.cfg.temperature)
        return {
            "feats": feats,
            "flow_feats": flow_feats,
            "appearance": appearance,
            "raw_heatmaps": raw,
            "coords": coords,
            "pose_maps": pose_maps,
        }

    def decode(self, appearance: torch.Tensor, pose_maps: torch.Tensor) -> torch.Tensor:
        return self.decoder(appearance, pose_maps)

    def forward(self, image: torch.Tensor) -> torch.Tensor:
        """Plain self-reconstruction."""
        enc = self.encode(image)
        return self.decode(enc["appearance"], enc["pose_maps"])

    def parameter_count(self) -> int:
        return sum(p.numel() for p in self.parameters())


def save_checkpoint(path: str | Path, model: LandmarkModel, extra: dict | None = None) -> None:
    """Serialize model weights + config; tensors round-trip bit-exactly."""
    payload = {
        "config": dataclasses.asdict(model.cfg),
        "config_hash": config_hash(model.cfg),
        "state_dict": model.state_dict(),
        "extra": extra or {},
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    buf = io.BytesIO()
    torch.save(payload, buf)
    path.write_bytes(buf.getvalue())


def load_checkpoint(path: str | Path) -> tuple[LandmarkModel, dict]:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"checkpoint not found: {path}")
    payload = torch.load(path, map_location="cpu", weights_only=False)
    cfg = ModelConfig(**payload["config"])
    if payload.get("config_hash") != config_hash(cfg):
        raise InvalidInputError("checkpoint config hash mismatch")
    model = LandmarkModel(cfg)
    model.load_state_dict(payload["state_dict"])
    return model, payload.get("extra", {})
