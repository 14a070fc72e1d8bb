"""Procedural face-like scenes with exact ground truth.

Each scene is a cartoon head (ellipse, two eyes, nose, mouth) rendered
with anti-aliased implicit shapes over a seeded value-noise background.
Pose factors (translation, rotation, scale, per-part jitter) and
appearance factors (skin hue/lightness, illumination gradient, background
texture) are drawn independently, so paired samples can share appearance
verbatim while analytic keypoints and warp fields provide exact
correspondence supervision.

Seven ground-truth keypoints per scene: two eye centers, nose tip, two
mouth corners, two face-outline extremes. All coordinates are normalized
(x, y) in [0, 1]^2 with pixel centers at ((col + 0.5)/W, (row + 0.5)/H).

Images are numpy ``(H, W, 3)`` float32 arrays in [0, 1]; rendering and
resampling run in float64 internally.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image as PILImage

from .errors import InvalidInputError, InvalidParameterError

__all__ = [
    "PoseParams",
    "AppearanceParams",
    "SyntheticSample",
    "AffineParams",
    "TpsParams",
    "WarpField",
    "PairSample",
    "sample_scene",
    "apply_affine",
    "apply_tps",
    "random_affine_params",
    "random_tps_params",
    "make_paired_batch",
    "make_unpaired_batch",
    "write_dataset",
    "read_dataset",
    "bilinear_sample",
    "KEYPOINT_NAMES",
    "GENERATOR_VERSION",
]

GENERATOR_VERSION = "1"

KEYPOINT_NAMES = (
    "eye_left",
    "eye_right",
    "nose_tip",
    "mouth_left",
    "mouth_right",
    "outline_left",
    "outline_right",
)

# canonical template, normalized coordinates
_HEAD_CENTER = (0.5, 0.52)
_HEAD_RADII = (0.30, 0.38)
_TEMPLATE_POINTS = {
    "eye_left": (0.37, 0.42),
    "eye_right": (0.63, 0.42),
    "nose_top": (0.50, 0.50),
    "nose_tip": (0.50, 0.60),
    "mouth_left": (0.39, 0.72),
    "mouth_right": (0.61, 0.72),
    "outline_left": (0.20, 0.52),
    "outline_right": (0.80, 0.52),
}
_JITTER_PARTS = ("eye_left", "eye_right", "nose", "mouth_left", "mouth_right")

TRANSLATION_MAX = 0.15
ROTATION_MAX_DEG = 30.0
SCALE_RANGE = (0.8, 1.2)
PART_JITTER_MAX = 0.02
MIN_IOD = 0.05
_KEYPOINT_MARGIN = 0.025

AFFINE_ROTATION_MAX_DEG = 25.0
AFFINE_SCALE_RANGE = (0.85, 1.18)
AFFINE_TRANSLATION_MAX = 0.12
AFFINE_SHEAR_MAX = 0.10
TPS_GRID = 4
TPS_DISPLACEMENT_MAX = 0.08


@dataclass(frozen=True)
class PoseParams:
    translation: tuple[float, float]
    rotation_deg: float
    scale: float
    part_jitter: dict[str, tuple[float, float]]


@dataclass(frozen=True)
class AppearanceParams:
    hue: float
    lightness: float
    illum_direction: float
    illum_strength: float
    background_seed: int


@dataclass(frozen=True)
class SyntheticSample:
    image: np.ndarray  # (H, W, 3) float32 in [0, 1]
    keypoints: np.ndarray  # (7, 2) float64 normalized (x, y)
    pose_params: PoseParams
    appearance_params: AppearanceParams
    seed: int


# ---------------------------------------------------------------------------
# scene rendering
# ---------------------------------------------------------------------------

def _pixel_grid(h: int, w: int):
    ys = (np.arange(h, dtype=np.float64) + 0.5) / h
    xs = (np.arange(w, dtype=np.float64) + 0.5) / w
    return np.meshgrid(xs, ys)  # X, Y each (h, w)


def _hsv_to_rgb(h, s, v):
    i = int(h * 6.0) % 6
    f = h * 6.0 - int(h * 6.0)
    p, q, t = v * (1 - s), v * (1 - f * s), v * (1 - (1 - f) * s)
    return [
        (v, t, p), (q, v, p), (p, v, t), (p, q, v), (t, p, v), (v, p, q),
    ][i]


def _value_noise(h: int, w: int, seed: int) -> np.ndarray:
    """Multi-octave value noise in [0, 1], deterministic in the seed."""
    rng = np.random.default_rng(seed)
    out = np.zeros((h, w), dtype=np.float64)
    weight_total = 0.0
    for cells, weight in ((3, 1.0), (6, 0.5), (12, 0.25)):
        lattice = rng.uniform(size=(cells + 1, cells + 1))
        ys = np.linspace(0.0, cells, h)
        xs = np.linspace(0.0, cells, w)
        yi = np.minimum(ys.astype(int), cells - 1)
        xi = np.minimum(xs.astype(int), cells - 1)
        fy = (ys - yi)[:, None]
        fx = (xs - xi)[None, :]
        a = lattice[np.ix_(yi, xi)]
        b = lattice[np.ix_(yi, xi + 1)]
        c = lattice[np.ix_(yi + 1, xi)]
        d = lattice[np.ix_(yi + 1, xi + 1)]
        out += weight * ((a * (1 - fx) + b * fx) * (1 - fy) + (c * (1 - fx) + d * fx) * fy)
        weight_total += weight
    return out / weight_total


def _paint(canvas: np.ndarray, coverage: np.ndarray, color) -> None:
    canvas *= (1.0 - coverage)[..., None]
    canvas += coverage[..., None] * np.asarray(color, dtype=np.float64)


def _ellipse_coverage(x, y, cx, cy, rx, ry, aa):
    q = np.sqrt(((x - cx) / rx) ** 2 + ((y - cy) / ry) ** 2)
    dist = (q - 1.0) * min(rx, ry)
    return np.clip(0.5 - dist / aa, 0.0, 1.0)


def _capsule_coverage(x, y, p0, p1, radius, aa):
    px, py = p1[0] - p0[0], p1[1] - p0[1]
    norm2 = px * px + py * py
    t = np.clip(((x - p0[0]) * px + (y - p0[1]) * py) / max(norm2, 1e-12), 0.0, 1.0)
    dist = np.hypot(x - (p0[0] + t * px), y - (p0[1] + t * py)) - radius
    return np.clip(0.5 - dist / aa, 0.0, 1.0)


def _similarity(points: np.ndarray, pose: PoseParams) -> np.ndarray:
    """Template frame -> image frame: rotate/scale about (0.5, 0.5), then shift."""
    theta = np.deg2rad(pose.rotation_deg)
    rot = np.array(
        [[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]]
    )
    centered = (points - 0.5) * pose.scale
    return centered @ rot.T + 0.5 + np.asarray(pose.translation)


def _draw_pose(rng: np.random.Generator) -> PoseParams:
    jitter = {
        part: tuple(rng.uniform(-PART_JITTER_MAX, PART_JITTER_MAX, size=2))
        for part in _JITTER_PARTS
    }
    return PoseParams(
        translation=tuple(rng.uniform(-TRANSLATION_MAX, TRANSLATION_MAX, size=2)),
        rotation_deg=float(rng.uniform(-ROTATION_MAX_DEG, ROTATION_MAX_DEG)),
        scale=float(rng.uniform(*SCALE_RANGE)),
        part_jitter=jitter,
    )


def _template_anchors(pose: PoseParams) -> dict[str, np.ndarray]:
    anchors = {}
    for name, point in _TEMPLATE_POINTS.items():
        p = np.asarray(point, dtype=np.float64)
        if name in ("nose_top", "nose_tip"):
            p = p + np.asarray(pose.part_jitter["nose"])
        elif name in pose.part_jitter:
            p = p + np.asarray(pose.part_jitter[name])
        anchors[name] = p
    return anchors


def _scene_keypoints(pose: PoseParams) -> np.ndarray:
    anchors = _template_anchors(pose)
    pts = np.stack([anchors[n if n != "nose_tip" else "nose_tip"] for n in KEYPOINT_NAMES])
    return _similarity(pts, pose)


def sample_scene(seed: int, resolution: int = 64) -> SyntheticSample:
    """Render one deterministic scene. Pose params are redrawn (from the same
    stream) until every keypoint sits inside the image with a small margin."""
    rng = np.random.default_rng(seed)
    appearance = AppearanceParams(
        hue=float(rng.uniform(0.02, 0.12)),
        lightness=float(rng.uniform(0.55, 0.9)),
        illum_direction=float(rng.uniform(0.0, 2 * np.pi)),
        illum_strength=float(rng.uniform(0.0, 0.45)),
        background_seed=int(rng.integers(0, 2**31 - 1)),
    )
    for _ in range(200):
        pose = _draw_pose(rng)
        keypoints = _scene_keypoints(pose)
        if keypoints.min() >= _KEYPOINT_MARGIN and keypoints.max() <= 1.0 - _KEYPOINT_MARGIN:
            break
    else:  # pragma: no cover - ranges make this unreachable
        raise RuntimeError("could not place keypoints inside the image")

    h = w = resolution
    x_img, y_img = _pixel_grid(h, w)

    # background texture
    noise = _value_noise(h, w, appearance.background_seed)
    bg_rng = np.random.default_rng(appearance.background_seed + 1)
    base = bg_rng.uniform(0.25, 0.75, size=3)
    amp = bg_rng.uniform(0.08, 0.28)
    canvas = np.clip(base[None, None, :] + (noise[..., None] - 0.5) * 2 * amp, 0.0, 1.0)

    # evaluate all face shapes in the template frame via the inverse transform
    theta = np.deg2rad(pose.rotation_deg)
    cos_t, sin_t = np.cos(theta), np.sin(theta)
    dx = x_img - 0.5 - pose.translation[0]
    dy = y_img - 0.5 - pose.translation[1]
    tx = (cos_t * dx + sin_t * dy) / pose.scale + 0.5
    ty = (-sin_t * dx + cos_t * dy) / pose.scale + 0.5
    aa = 1.5 / (h * pose.scale)

    anchors = _template_anchors(pose)
    skin = np.array(_hsv_to_rgb(appearance.hue, 0.45, appearance.lightness))
    dark_skin = skin * 0.55
    eye_white = np.array([0.95, 0.95, 0.93]) * appearance.lightness
    iris = np.array([0.08, 0.07, 0.09])
    mouth_color = np.array(_hsv_to_rgb(0.99, 0.65, min(0.85, appearance.lightness + 0.1)))

    _paint(canvas, _ellipse_coverage(tx, ty, *_HEAD_CENTER, *_HEAD_RADII, aa), skin)
    for side in ("eye_left", "eye_right"):
        ex, ey = anchors[side]
        _paint(canvas, _ellipse_coverage(tx, ty, ex, ey, 0.055, 0.035, aa), eye_white)
        _paint(canvas, _ellipse_coverage(tx, ty, ex, ey, 0.024, 0.024, aa), iris)
    _paint(
        canvas,
        _capsule_coverage(tx, ty, anchors["nose_top"], anchors["nose_tip"], 0.012, aa),
        dark_skin,
    )
    _paint(
        canvas,
        _capsule_coverage(tx, ty, anchors["mouth_left"], anchors["mouth_right"], 0.020, aa),
        mouth_color,
    )

    # global illumination gradient
    direction = appearance.illum_direction
    ramp = (x_img - 0.5) * np.cos(direction) + (y_img - 0.5) * np.sin(direction)
    canvas = np.clip(canvas * (1.0 + appearance.illum_strength * ramp)[..., None], 0.0, 1.0)

    return SyntheticSample(
        image=canvas.astype(np.float32),
        keypoints=keypoints,
        pose_params=pose,
        appearance_params=appearance,
        seed=int(seed),
    )


# ---------------------------------------------------------------------------
# warps with exact correspondence
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AffineParams:
    rotation_deg: float = 0.0
    scale: float = 1.0
    translation: tuple[float, float] = (0.0, 0.0)
    shear: float = 0.0

    def validate(self) -> None:
        if abs(self.rotation_deg) > AFFINE_ROTATION_MAX_DEG:
            raise InvalidParameterError(f"rotation {self.rotation_deg} outside range")
        if not (AFFINE_SCALE_RANGE[0] <= self.scale <= AFFINE_SCALE_RANGE[1]):
            raise InvalidParameterError(f"scale {self.scale} outside range")
        if max(abs(self.translation[0]), abs(self.translation[1])) > AFFINE_TRANSLATION_MAX:
            raise InvalidParameterError(f"translation {self.translation} outside range")
        if abs(self.shear) > AFFINE_SHEAR_MAX:
            raise InvalidParameterError(f"shear {self.shear} outside range")

    def matrix(self) -> np.ndarray:
        theta = np.deg2rad(self.rotation_deg)
        rot = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
        shear = np.array([[1.0, self.shear], [0.0, 1.0]])
        return rot @ shear * self.scale


@dataclass(frozen=True)
class TpsParams:
    displacements: tuple  # TPS_GRID^2 control-point (dx, dy) pairs, row-major

    def validate(self) -> None:
        arr = np.asarray(self.displacements, dtype=np.float64)
        if arr.shape != (TPS_GRID * TPS_GRID, 2):
            raise InvalidParameterError(
                f"expected {TPS_GRID * TPS_GRID} control displacements, got {arr.shape}"
            )
        if np.abs(arr).max() > TPS_DISPLACEMENT_MAX + 1e-12:
            raise InvalidParameterError("control displacement outside declared bound")


def _tps_kernel(r2: np.ndarray) -> np.ndarray:
    out = np.zeros_like(r2)
    mask = r2 > 1e-300
    out[mask] = 0.5 * r2[mask] * np.log(r2[mask])  # r^2 log r
    return out


def _tps_control_points() -> np.ndarray:
    lin = np.linspace(0.0, 1.0, TPS_GRID)
    gx, gy = np.meshgrid(lin, lin)
    return np.stack([gx.ravel(), gy.ravel()], axis=1)


class WarpField:
    """Analytic map from target pixels to source pixels (normalized coords).

    ``source_of`` evaluates the map exactly; ``target_of`` inverts it (in
    closed form for affine warps, by Newton iteration for TPS warps), which
    is how ground-truth keypoints are pushed into the warped image.
    """

    def __init__(self, kind: str, params):
        if kind not in ("identity", "affine", "tps"):
            raise InvalidParameterError(f"unknown warp kind {kind!r}")
        self.kind = kind
        self.params = params
        if kind == "affine":
            params.validate()
            fwd = params.matrix()
            self._fwd = fwd
            self._inv = np.linalg.inv(fwd)
            self._trans = np.asarray(params.translation, dtype=np.float64)
        elif kind == "tps":
            params.validate()
            ctrl = _tps_control_points()
            disp = np.asarray(params.displacements, dtype=np.float64)
            n = ctrl.shape[0]
            r2 = ((ctrl[:, None, :] - ctrl[None, :, :]) ** 2).sum(-1)
            kmat = _tps_kernel(r2)
            pmat = np.concatenate([np.ones((n, 1)), ctrl], axis=1)
            lmat = np.zeros((n + 3, n + 3))
            lmat[:n, :n] = kmat
            lmat[:n, n:] = pmat
            lmat[n:, :n] = pmat.T
            rhs = np.zeros((n + 3, 2))
            rhs[:n] = disp
            sol = np.linalg.solve(lmat, rhs)
            self._ctrl = ctrl
            self._w = sol[:n]
            self._a = sol[n:]

    # target -> source -------------------------------------------------
    def source_of(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=np.float64)
        if self.kind == "identity":
            return pts.copy()
        if self.kind == "affine":
            return (pts - 0.5 - self._trans) @ self._inv.T + 0.5
        disp = self._tps_displacement(pts)
        return pts + disp

    def _tps_displacement(self, pts: np.ndarray) -> np.ndarray:
        flat = pts.reshape(-1, 2)
        r2 = ((flat[:, None, :] - self._ctrl[None, :, :]) ** 2).sum(-1)
        basis = _tps_kernel(r2)
        disp = basis @ self._w + np.concatenate(
            [np.ones((flat.shape[0], 1)), flat], axis=1
        ) @ self._a
        return disp.reshape(pts.shape)

    def _tps_jacobian(self, pts: np.ndarray) -> np.ndarray:
        """d(source)/d(target) at each point, for Newton inversion."""
        flat = pts.reshape(-1, 2)
        diff = flat[:, None, :] - self._ctrl[None, :, :]  # (n, K, 2)
        r2 = (diff**2).sum(-1)
        grad_u = np.zeros_like(r2)
        mask = r2 > 1e-300
        grad_u[mask] = np.log(r2[mask]) + 1.0  # d(r^2 log r)/d(r^2) * 2
        jac = np.zeros((flat.shape[0], 2, 2))
        for out_dim in range(2):
            for in_dim in range(2):
                jac[:, out_dim, in_dim] = (
                    grad_u * diff[..., in_dim] * self._w[None, :, out_dim]
                ).sum(-1) + self._a[1 + in_dim, out_dim]
        jac += np.eye(2)[None]
        return jac

    # source -> target -------------------------------------------------
    def target_of(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=np.float64)
        if self.kind == "identity":
            return pts.copy()
        if self.kind == "affine":
            return (pts - 0.5) @ self._fwd.T + 0.5 + self._trans
        target = pts.copy()
        for _ in range(50):
            residual = self.source_of(target) - pts
            if np.abs(residual).max() < 1e-12:
                break
            jac = self._tps_jacobian(target)
            step = np.linalg.solve(jac, residual.reshape(-1, 2)[..., None])
            target = target - step[..., 0].reshape(pts.shape)
        return target

    def grid(self, h: int, w: int) -> np.ndarray:
        """Dense (h, w, 2) target-pixel-center -> source-position map."""
        x, y = _pixel_grid(h, w)
        return self.source_of(np.stack([x, y], axis=-1))

    def params_dict(self) -> dict:
        if self.kind == "identity":
            return {"kind": "identity"}
        if self.kind == "affine":
            return {"kind": "affine", **dataclasses.asdict(self.params)}
        return {
            "kind": "tps",
            "displacements": np.asarray(self.params.displacements).tolist(),
        }


def bilinear_sample(image: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Sample ``image`` (H, W, C) at normalized (x, y) positions, edge-clamped."""
    h, w = image.shape[:2]
    pts = np.asarray(points, dtype=np.float64)
    px = pts[..., 0] * w - 0.5
    py = pts[..., 1] * h - 0.5
    x0 = np.floor(px)
    y0 = np.floor(py)
    fx = (px - x0)[..., None]
    fy = (py - y0)[..., None]
    x0 = np.clip(x0.astype(int), 0, w - 1)
    y0 = np.clip(y0.astype(int), 0, h - 1)
    x1 = np.clip(x0 + 1, 0, w - 1)
    y1 = np.clip(y0 + 1, 0, h - 1)
    img = image.astype(np.float64)
    top = img[y0, x0] * (1 - fx) + img[y0, x1] * fx
    bottom = img[y1, x0] * (1 - fx) + img[y1, x1] * fx
    return top * (1 - fy) + bottom * fy


def _apply_field(image: np.ndarray, field_obj: WarpField) -> np.ndarray:
    h, w = image.shape[:2]
    return bilinear_sample(image, field_obj.grid(h, w)).astype(np.float32)


def apply_affine(image: np.ndarray, params: AffineParams) -> tuple[np.ndarray, WarpField]:
    """Warp an image by an affine transform; returns the exact field with it."""
    field_obj = WarpField("affine", params)
    return _apply_field(image, field_obj), field_obj


def apply_tps(image: np.ndarray, params: TpsParams) -> tuple[np.ndarray, WarpField]:
    """Thin-plate-spline warp driven by control-point displacements."""
    field_obj = WarpField("tps", params)
    return _apply_field(image, field_obj), field_obj


def random_affine_params(rng: np.random.Generator) -> AffineParams:
    return AffineParams(
        rotation_deg=float(rng.uniform(-AFFINE_ROTATION_MAX_DEG, AFFINE_ROTATION_MAX_DEG)),
        scale=float(rng.uniform(*AFFINE_SCALE_RANGE)),
        translation=tuple(rng.uniform(-AFFINE_TRANSLATION_MAX, AFFINE_TRANSLATION_MAX, size=2)),
        shear=float(rng.uniform(-AFFINE_SHEAR_MAX, AFFINE_SHEAR_MAX)),
    )


def random_tps_params(rng: np.random.Generator) -> TpsParams:
    disp = rng.uniform(
        -TPS_DISPLACEMENT_MAX, TPS_DISPLACEMENT_MAX, size=(TPS_GRID * TPS_GRID, 2)
    )
    return TpsParams(displacements=tuple(map(tuple, disp)))


# ---------------------------------------------------------------------------
# batches and dataset files
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PairSample:
    """A scene and its warped counterpart: same appearance, new pose."""

    source: SyntheticSample
    warped_image: np.ndarray
    warped_keypoints: np.ndarray
    warp: WarpField


def make_paired_batch(n: int, seed: int, resolution: int = 64) -> list[PairSample]:
    """Pairs (I, warp(I)) with the exact field attached; affine and TPS mixed."""
    root = np.random.SeedSequence(seed)
    out = []
    for i, child in enumerate(root.spawn(n)):
        rng = np.random.default_rng(child)
        scene_seed = int(rng.integers(0, 2**63 - 1))
        sample = sample_scene(scene_seed, resolution)
        if rng.uniform() < 0.5:
            warped, field_obj = apply_affine(sample.image, random_affine_params(rng))
        else:
            warped, field_obj = apply_tps(sample.image, random_tps_params(rng))
        out.append(
            PairSample(
                source=sample,
                warped_image=warped,
                warped_keypoints=field_obj.target_of(sample.keypoints),
                warp=field_obj,
            )
        )
    return out


def make_unpaired_batch(
    n: int, seed: int, resolution: int = 64
) -> list[tuple[SyntheticSample, SyntheticSample]]:
    """Independent scene pairs: both appearance and pose differ."""
    root = np.random.SeedSequence(seed)
    out = []
    for child in root.spawn(n):
        rng = np.random.default_rng(child)
        a = sample_scene(int(rng.integers(0, 2**63 - 1)), resolution)
        b = sample_scene(int(rng.integers(0, 2**63 - 1)), resolution)
        out.append((a, b))
    return out


def write_dataset(directory: str | Path, n: int, seed: int, resolution: int = 64) -> Path:
    """Write ``n`` scenes: images/NNNNNN.png, meta/NNNNNN.json, manifest.json."""
    directory = Path(directory)
    (directory / "images").mkdir(parents=True, exist_ok=True)
    (directory / "meta").mkdir(parents=True, exist_ok=True)
    root = np.random.SeedSequence(seed)
    for i, child in enumerate(root.spawn(n)):
        scene_seed = int(np.random.default_rng(child).integers(0, 2**63 - 1))
        sample = sample_scene(scene_seed, resolution)
        img8 = np.clip(np.rint(sample.image * 255.0), 0, 255).astype(np.uint8)
        PILImage.fromarray(img8).save(directory / "images" / f"{i:06d}.png")
        meta = {
            "keypoints": sample.keypoints.tolist(),
            "pose_params": dataclasses.asdict(sample.pose_params),
            "appearance_params": dataclasses.asdict(sample.appearance_params),
            "seed": sample.seed,
        }
        (directory / "meta" / f"{i:06d}.json").write_text(json.dumps(meta))
    manifest = {
        "count": n,
        "seed": seed,
        "resolution": resolution,
        "generator_version": GENERATOR_VERSION,
    }
    (directory / "manifest.json").write_text(json.dumps(manifest, indent=2))
    return directory


@dataclass(frozen=True)
class DatasetRecord:
    image: np.ndarray
    keypoints: np.ndarray
    pose_params: dict
    appearance_params: dict
    seed: int


def read_dataset(directory: str | Path) -> tuple[dict, list[DatasetRecord]]:
    directory = Path(directory)
    manifest_path = directory / "manifest.json"
    if not manifest_path.exists():
        raise InvalidInputError(f"no manifest.json under {directory}")
    manifest = json.loads(manifest_path.read_text())
    records = []
    for i in range(manifest["count"]):
        img = np.asarray(PILImage.open(directory / "images" / f"{i:06d}.png"))
        meta = json.loads((directory / "meta" / f"{i:06d}.json").read_text())
        records.append(
            DatasetRecord(
                image=img.astype(np.float32) / 255.0,
                keypoints=np.asarray(meta["keypoints"], dtype=np.float64),
                pose_params=meta["pose_params"],
                appearance_params=meta["appearance_params"],
                seed=meta["seed"],
            )
        )
    return manifest, records
