"""Deterministic synthetic scene generator with ground truth.

Scenes are built from flat-shaded polygon shapes rasterized at 4x4
supersampling (hard-edged rendering aliases badly under feature
extraction). Every sample is fully determined by (spec, seed, index): the
random stream is PCG64 seeded from (seed, index), so generation order and
parallelism cannot change a sample.

A scene has one anchor shape with the ROI rigidly attached, plus
distractor shapes placed by policy:

* ``rigid``    - fixed pose relative to the anchor (a decoy that moves with it)
* ``rotating`` - position fixed relative to the anchor, own orientation random
* ``free``     - uniform random pose anywhere that keeps clear of the anchor
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import SpecError
from .geometry import OrientedRect, Point2, SimilarityTransform, transform_rect

SUPERSAMPLE = 4
FREE_PLACEMENT_TRIES = 60
MAX_ANCHOR_OCCLUSION = 0.30


# ---------------------------------------------------------------------------
# shape library
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ShapeGroup:
    """Polygons of one shape in its local frame, plus paint levels."""

    name: str
    polygons: tuple[np.ndarray, ...]   # each (N, 2) float, local coords
    levels: tuple[float, ...]          # gray level per polygon
    radius: float                      # circumradius of the local geometry

    @classmethod
    def build(cls, name: str, polys: list[tuple[np.ndarray, float]]) -> "ShapeGroup":
        pts = [np.asarray(p, dtype=float) for p, _ in polys]
        radius = max(float(np.max(np.hypot(p[:, 0], p[:, 1]))) for p in pts)
        return cls(name, tuple(pts), tuple(float(lv) for _, lv in polys), radius)


def _star_shape() -> ShapeGroup:
    # Irregular five-spike star: asymmetry keeps the spike junctions
    # mutually distinguishable for descriptor matching.
    spike_deg = [-90.0, -14.0, 52.0, 129.0, 196.0]
    outer = [70.0, 56.0, 66.0, 50.0, 61.0]
    inner = [27.0, 31.0, 24.0, 29.0, 26.0]
    verts = []
    for i in range(5):
        a = math.radians(spike_deg[i])
        verts.append((outer[i] * math.cos(a), outer[i] * math.sin(a)))
        nxt = spike_deg[(i + 1) % 5] + (360.0 if i == 4 else 0.0)
        m = math.radians(0.5 * (spike_deg[i] + nxt))
        verts.append((inner[i] * math.cos(m), inner[i] * math.sin(m)))
    return ShapeGroup.build("star", [(np.array(verts), 50.0)])


def _octagon(cx: float, cy: float, radii: list[float]) -> np.ndarray:
    pts = []
    for i, r in enumerate(radii):
        a = math.radians(45.0 * i + 11.0)
        pts.append((cx + r * math.cos(a), cy + r * math.sin(a)))
    return np.array(pts)


def _cart_shape() -> ShapeGroup:
    # Wagon built from many segments (body, cab, two octagon wheels, mast,
    # flag): 31 boundary segments, each geometrically distinct.
    body = np.array([(-75.0, -8.0), (78.0, -12.0), (74.0, 42.0), (-70.0, 38.0)])
    cab = np.array([(-70.0, -48.0), (-18.0, -44.0), (-10.0, -10.0), (-62.0, -8.0)])
    wheel1 = _octagon(-42.0, 62.0, [26.0, 24.0, 27.0, 23.0, 26.0, 25.0, 22.0, 27.0])
    wheel2 = _octagon(40.0, 64.0, [23.0, 26.0, 22.0, 25.0, 27.0, 23.0, 26.0, 24.0])
    mast = np.array([(58.0, -44.0), (66.0, -46.0), (68.0, -12.0), (60.0, -10.0)])
    flag = np.array([(62.0, -72.0), (92.0, -58.0), (64.0, -44.0)])
    return ShapeGroup.build(
        "cart",
        [(body, 70.0), (cab, 76.0), (wheel1, 64.0), (wheel2, 64.0), (mast, 72.0), (flag, 80.0)],
    )


# 4x7 dash pattern: dashes are 10 px long, short enough that the segment
# family ignores them while the corner family and the ROI content
# descriptor still see them.
_DASH_PATTERN = (
    (1, 1, 0, 1, 0, 1, 1),
    (1, 0, 1, 1, 1, 0, 0),
    (0, 1, 1, 0, 1, 1, 1),
    (1, 1, 0, 1, 1, 0, 1),
)


def _glyph_dashes_shape() -> ShapeGroup:
    polys = []
    for r, row in enumerate(_DASH_PATTERN):
        y = -18.0 + 12.0 * r
        for c, on in enumerate(row):
            if not on:
                continue
            x = -54.0 + 18.0 * c
            rect = np.array(
                [(x - 5.0, y - 2.0), (x + 5.0, y - 2.0), (x + 5.0, y + 2.0), (x - 5.0, y + 2.0)]
            )
            polys.append((rect, 25.0))
    return ShapeGroup.build("glyph-dashes", polys)


def _blob_shape() -> ShapeGroup:
    radii = [34.0, 28.0, 37.0, 30.0, 35.0, 26.0, 33.0]
    pts = []
    for i, r in enumerate(radii):
        a = math.radians(i * 360.0 / len(radii) + 17.0)
        pts.append((r * math.cos(a), r * math.sin(a)))
    return ShapeGroup.build("blob", [(np.array(pts), 95.0)])


def _polygon_shape() -> ShapeGroup:
    radii = [60.0, 48.0, 66.0, 42.0, 58.0, 52.0]
    pts = []
    for i, r in enumerate(radii):
        a = math.radians(i * 60.0 - 75.0)
        pts.append((r * math.cos(a), r * math.sin(a)))
    return ShapeGroup.build("polygon", [(np.array(pts), 55.0)])


def _glyph_block_shape() -> ShapeGroup:
    # Dense textured patch: a grid of small tilted squares with varying
    # levels. Plenty of corners, no long straight segments.
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(0x5AF51BE)))
    polys = []
    levels = (30.0, 70.0, 110.0)
    for r in range(6):
        for c in range(8):
            if rng.uniform() < 0.28:
                continue
            cx = -63.0 + 18.0 * c + rng.uniform(-2.0, 2.0)
            cy = -45.0 + 18.0 * r + rng.uniform(-2.0, 2.0)
            half = rng.uniform(4.0, 7.0)
            ang = rng.uniform(0.0, math.pi / 2.0)
            ca, sa = math.cos(ang), math.sin(ang)
            sq = np.array([(-half, -half), (half, -half), (half, half), (-half, half)])
            rot = sq @ np.array([[ca, sa], [-sa, ca]])
            rot[:, 0] += cx
            rot[:, 1] += cy
            polys.append((rot, levels[int(rng.integers(0, 3))]))
    return ShapeGroup.build("glyph-block", polys)


_SHAPES = {
    "star": _star_shape,
    "cart": _cart_shape,
    "glyph-dashes": _glyph_dashes_shape,
    "blob": _blob_shape,
    "polygon": _polygon_shape,
    "glyph-block": _glyph_block_shape,
}


def shape_group(tag: str) -> ShapeGroup:
    if tag not in _SHAPES:
        raise SpecError(f"unknown shape tag {tag!r}")
    return _SHAPES[tag]()


# ---------------------------------------------------------------------------
# scene specification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PoseJitter:
    """Uniform jitter ranges for the anchor pose."""

    translation: float = 0.0       # +- pixels, each axis
    rotation_deg: float = 0.0      # +- degrees
    scale: tuple[float, float] = (1.0, 1.0)


@dataclass(frozen=True)
class DistractorSpec:
    shape: str
    policy: str                    # rigid | rotating | free
    offset: tuple[float, float] = (0.0, 0.0)   # anchor-frame, rigid/rotating only


@dataclass(frozen=True)
class SceneSpec:
    canvas: tuple[int, int]        # (width, height)
    anchor_shape: str              # star | polygon | glyph-block | none
    distractors: tuple[DistractorSpec, ...]
    roi_spec: OrientedRect         # in the anchor frame
    pose_jitter: PoseJitter = field(default_factory=PoseJitter)
    noise: float = 0.0             # gaussian sigma, gray levels
    seed: int = 0
    background: float = 200.0

    def __post_init__(self):
        w, h = self.canvas
        if w < 128 or h < 128:
            raise SpecError(f"canvas must be at least 128x128, got {self.canvas}")
        lo, hi = self.pose_jitter.scale
        if not (0.85 <= lo <= hi <= 1.15):
            raise SpecError(f"scale jitter range {self.pose_jitter.scale} outside [0.85, 1.15]")
        for d in self.distractors:
            if d.policy not in ("rigid", "rotating", "free"):
                raise SpecError(f"unknown pose policy {d.policy!r}")
        if self.anchor_shape != "none":
            shape_group(self.anchor_shape)


@dataclass(frozen=True)
class GeneratedSample:
    image: np.ndarray                       # uint8 grayscale
    roi: OrientedRect                       # ground truth
    anchor_pose: SimilarityTransform        # ground truth
    shape_masks: dict[str, np.ndarray]      # per-shape boolean masks


# ---------------------------------------------------------------------------
# rasterization
# ---------------------------------------------------------------------------

def _fill_polygon(canvas: np.ndarray, poly: np.ndarray, value: float) -> None:
    """Even-odd scanline fill. `poly` is in supersampled index coordinates."""
    h, w = canvas.shape
    ys = poly[:, 1]
    row_lo = max(0, int(math.ceil(float(ys.min()))))
    row_hi = min(h - 1, int(math.floor(float(ys.max()))))
    if row_hi < row_lo:
        return
    rows_all = []
    xs_all = []
    n = len(poly)
    for i in range(n):
        x1, y1 = poly[i]
        x2, y2 = poly[(i + 1) % n]
        if y1 == y2:
            continue
        lo, hi = (y1, y2) if y1 < y2 else (y2, y1)
        r0 = max(row_lo, int(math.ceil(lo)))
        r1 = min(row_hi, int(math.ceil(hi)) - 1)
        if r1 < r0:
            continue
        rr = np.arange(r0, r1 + 1)
        xx = x1 + (rr - y1) * (x2 - x1) / (y2 - y1)
        rows_all.append(rr)
        xs_all.append(xx)
    if not rows_all:
        return
    rows = np.concatenate(rows_all)
    xs = np.concatenate(xs_all)
    order = np.lexsort((xs, rows))
    rows, xs = rows[order], xs[order]
    # crossings per row come in pairs under the half-open edge rule
    start = 0
    m = len(rows)
    while start < m:
        r = rows[start]
        end = start
        while end < m and rows[end] == r:
            end += 1
        cross = xs[start:end]
        for k in range(0, len(cross) - 1, 2):
            a = int(math.ceil(cross[k]))
            b = int(math.ceil(cross[k + 1]))
            if b > a:
                canvas[r, max(a, 0):min(b, w)] = value
        start = end


def _to_super(points: np.ndarray) -> np.ndarray:
    """Image coordinates -> supersampled index coordinates."""
    return points * SUPERSAMPLE + (SUPERSAMPLE / 2.0 - 0.5)


def _downsample(canvas: np.ndarray) -> np.ndarray:
    h, w = canvas.shape
    s = SUPERSAMPLE
    return canvas.reshape(h // s, s, w // s, s).mean(axis=(1, 3))


def _paint_group(
    canvas: np.ndarray,
    scratch: np.ndarray,
    group: ShapeGroup,
    pose: SimilarityTransform,
) -> np.ndarray:
    """Paint a posed shape group; returns its final-resolution boolean mask."""
    scratch.fill(0.0)
    for poly, level in zip(group.polygons, group.levels):
        pts = _to_super(pose.apply_array(poly))
        _fill_polygon(canvas, pts, level)
        _fill_polygon(scratch, pts, 1.0)
    return _downsample(scratch) >= 0.5


# ---------------------------------------------------------------------------
# generation
# ---------------------------------------------------------------------------

def _sample_rng(spec_seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence((spec_seed, index))))


def _unique_names(spec: SceneSpec) -> list[str]:
    seen: dict[str, int] = {}
    names = []
    for d in spec.distractors:
        k = seen.get(d.shape, 0)
        names.append(d.shape if k == 0 else f"{d.shape}#{k}")
        seen[d.shape] = k + 1
    return names


def generate_one(spec: SceneSpec, index: int) -> GeneratedSample:
    """Generate a single sample, fully determined by (spec, spec.seed, index)."""
    rng = _sample_rng(spec.seed, index)
    w, h = spec.canvas
    jit = spec.pose_jitter

    tx = w / 2.0 + rng.uniform(-jit.translation, jit.translation)
    ty = h / 2.0 + rng.uniform(-jit.translation, jit.translation)
    rot = math.radians(rng.uniform(-jit.rotation_deg, jit.rotation_deg))
    sc = rng.uniform(jit.scale[0], jit.scale[1])
    anchor_pose = SimilarityTransform(scale=float(sc), rotation=float(rot),
                                      tx=float(tx), ty=float(ty))
    roi = transform_rect(anchor_pose, spec.roi_spec)

    hi = np.full((h * SUPERSAMPLE, w * SUPERSAMPLE), spec.background, dtype=np.float32)
    scratch = np.zeros_like(hi)

    masks: dict[str, np.ndarray] = {}
    keepouts: list[tuple[float, float, float]] = []   # (cx, cy, radius), image frame

    if spec.anchor_shape != "none":
        group = shape_group(spec.anchor_shape)
        masks["anchor"] = _paint_group(hi, scratch, group, anchor_pose)
        keepouts.append((anchor_pose.tx, anchor_pose.ty, group.radius * anchor_pose.scale))
        rc = anchor_pose.apply(spec.roi_spec.center)
        keepouts.append((rc.x, rc.y, 0.5 * spec.roi_spec.diagonal() * anchor_pose.scale))
    else:
        masks["anchor"] = np.zeros((h, w), dtype=bool)

    names = _unique_names(spec)
    later_masks = []
    for d, name in zip(spec.distractors, names):
        group = shape_group(d.shape)
        if d.policy == "rigid":
            pose = anchor_pose.compose(SimilarityTransform.translation(*d.offset))
        elif d.policy == "rotating":
            c = anchor_pose.apply(Point2(*d.offset))
            own_rot = rng.uniform(-math.pi, math.pi)
            pose = SimilarityTransform(anchor_pose.scale, float(own_rot), c.x, c.y)
        else:  # free
            pose = _place_free(rng, spec, group, keepouts)
        mask = _paint_group(hi, scratch, group, pose)
        masks[name] = mask
        later_masks.append(mask)
        keepouts.append((pose.tx, pose.ty, group.radius * pose.scale))

    anchor_mask = masks["anchor"]
    anchor_px = int(anchor_mask.sum())
    if anchor_px and later_masks:
        covered = anchor_mask & np.logical_or.reduce(later_masks)
        if covered.sum() > MAX_ANCHOR_OCCLUSION * anchor_px:
            raise SpecError(
                f"sample {index}: distractors occlude "
                f"{covered.sum() / anchor_px:.0%} of the anchor (> 30%)"
            )

    image = _downsample(hi)
    if spec.noise > 0.0:
        image = image + rng.normal(0.0, spec.noise, size=image.shape)
    image = np.clip(np.rint(image), 0, 255).astype(np.uint8)
    return GeneratedSample(image=image, roi=roi, anchor_pose=anchor_pose, shape_masks=masks)


def _place_free(
    rng: np.random.Generator,
    spec: SceneSpec,
    group: ShapeGroup,
    keepouts: list[tuple[float, float, float]],
) -> SimilarityTransform:
    w, h = spec.canvas
    lo, hi_ = spec.pose_jitter.scale
    for _ in range(FREE_PLACEMENT_TRIES):
        sc = rng.uniform(lo, hi_)
        margin = group.radius * sc + 8.0
        if 2 * margin >= min(w, h):
            raise SpecError(f"shape {group.name} cannot fit the canvas")
        x = rng.uniform(margin, w - 1 - margin)
        y = rng.uniform(margin, h - 1 - margin)
        rot = rng.uniform(-math.pi, math.pi)
        clear = all(
            math.hypot(x - kx, y - ky) >= kr + group.radius * sc + 10.0
            for kx, ky, kr in keepouts
        )
        if clear:
            return SimilarityTransform(float(sc), float(rot), float(x), float(y))
    raise SpecError(f"could not place free shape {group.name} clear of the anchor")


def generate(spec: SceneSpec, n: int) -> list[GeneratedSample]:
    """Generate `n` samples; sample i depends only on (spec, spec.seed, i)."""
    if n < 1:
        raise SpecError(f"sample count must be >= 1, got {n}")
    return [generate_one(spec, i) for i in range(n)]


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------

def _roi_with_dashes() -> tuple[OrientedRect, DistractorSpec]:
    roi = OrientedRect(Point2(150.0, -5.0), 170.0, 80.0, -math.pi / 2.0)
    dashes = DistractorSpec("glyph-dashes", "rigid", (150.0, -5.0))
    return roi, dashes


def starcart_preset(seed: int = 0) -> SceneSpec:
    """Star anchor with rigid ROI content and a rotating many-segment cart.

    The cart holds position relative to the ROI but spins freely, so only
    the star works as an anchor even though the cart has three times as
    many boundary segments.
    """
    roi, dashes = _roi_with_dashes()
    return SceneSpec(
        canvas=(768, 576),
        anchor_shape="star",
        distractors=(dashes, DistractorSpec("cart", "rotating", (-205.0, 10.0))),
        roi_spec=roi,
        pose_jitter=PoseJitter(translation=30.0, rotation_deg=25.0, scale=(0.97, 1.03)),
        noise=3.0,
        seed=seed,
    )


def dual_instance_preset(seed: int = 0) -> SceneSpec:
    """Two identical star anchors; only the true one carries the ROI content."""
    roi, dashes = _roi_with_dashes()
    return SceneSpec(
        canvas=(768, 640),
        anchor_shape="star",
        distractors=(dashes, DistractorSpec("star", "free")),
        roi_spec=roi,
        pose_jitter=PoseJitter(translation=30.0, rotation_deg=25.0, scale=(0.95, 1.05)),
        noise=3.0,
        seed=seed,
    )


def textured_preset(seed: int = 0) -> SceneSpec:
    """Textured block anchor plus free-floating blob clutter."""
    return SceneSpec(
        canvas=(640, 480),
        anchor_shape="glyph-block",
        distractors=(
            DistractorSpec("glyph-dashes", "rigid", (150.0, 0.0)),
            DistractorSpec("blob", "free"),
            DistractorSpec("blob", "free"),
        ),
        roi_spec=OrientedRect(Point2(150.0, 0.0), 150.0, 72.0, -math.pi / 2.0),
        pose_jitter=PoseJitter(translation=25.0, rotation_deg=20.0, scale=(0.97, 1.03)),
        noise=3.0,
        seed=seed,
    )


def noise_preset(seed: int = 0) -> SceneSpec:
    """Anchor-free clutter used to verify that nothing is detected."""
    return SceneSpec(
        canvas=(640, 480),
        anchor_shape="none",
        distractors=tuple(DistractorSpec("blob", "free") for _ in range(6)),
        roi_spec=OrientedRect(Point2(0.0, 0.0), 120.0, 60.0, -math.pi / 2.0),
        pose_jitter=PoseJitter(translation=40.0, rotation_deg=180.0, scale=(0.9, 1.1)),
        noise=6.0,
        seed=seed,
    )


PRESETS = {
    "starcart": starcart_preset,
    "textured": textured_preset,
    "dual-instance": dual_instance_preset,
    "noise": noise_preset,
}


def preset(name: str, seed: int = 0) -> SceneSpec:
    if name not in PRESETS:
        raise SpecError(f"unknown preset {name!r} (choose from {sorted(PRESETS)})")
    return PRESETS[name](seed)


def single_instance_variant(spec: SceneSpec) -> SceneSpec:
    """Drop free-floating decoys: the training-set twin of a detection spec."""
    kept = tuple(d for d in spec.distractors if d.policy != "free")
    return replace(spec, distractors=kept)
