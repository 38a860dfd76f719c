"""Planar similarity transforms, oriented rectangles, and IoU metrics.

Coordinates follow image convention: x grows right (columns), y grows down
(rows). A similarity transform applies rotation, then isotropic scale, then
translation. Oriented rectangles carry a full 360-degree orientation: the
angle points from the center toward the midpoint of the edge that starts at
the distinguished origin corner, so a 180-degree flip of a rectangle is a
different rectangle even though it covers the same pixels.

All values here are immutable and all operations are pure functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi


def wrap_angle(angle: float) -> float:
    """Normalize an angle to (-pi, pi]."""
    a = math.fmod(angle + math.pi, TWO_PI)
    if a <= 0.0:
        a += TWO_PI
    return a - math.pi


def wrap_angles(angles: np.ndarray) -> np.ndarray:
    """Vectorized wrap_angle."""
    a = np.mod(np.asarray(angles, dtype=float) + math.pi, TWO_PI)
    a = np.where(a <= 0.0, a + TWO_PI, a)
    return a - math.pi


@dataclass(frozen=True)
class Point2:
    """A 2D point in pixel units."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite point ({self.x}, {self.y})")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y], dtype=float)


@dataclass(frozen=True)
class SimilarityTransform:
    """4-DOF planar similarity: rotation + isotropic scale + translation.

    Applying the transform maps p to  scale * R(rotation) @ p + (tx, ty).
    """

    scale: float
    rotation: float
    tx: float
    ty: float

    def __post_init__(self):
        if not (math.isfinite(self.scale) and self.scale > 0.0):
            raise ValueError(f"scale must be positive and finite, got {self.scale}")
        if not (math.isfinite(self.tx) and math.isfinite(self.ty)):
            raise ValueError("non-finite translation")
        object.__setattr__(self, "rotation", wrap_angle(self.rotation))

    @classmethod
    def identity(cls) -> "SimilarityTransform":
        return cls(1.0, 0.0, 0.0, 0.0)

    @classmethod
    def translation(cls, tx: float, ty: float) -> "SimilarityTransform":
        return cls(1.0, 0.0, tx, ty)

    def apply(self, p: Point2) -> Point2:
        c, s = math.cos(self.rotation), math.sin(self.rotation)
        x = self.scale * (c * p.x - s * p.y) + self.tx
        y = self.scale * (s * p.x + c * p.y) + self.ty
        return Point2(x, y)

    def apply_array(self, pts: np.ndarray) -> np.ndarray:
        """Apply to an (N, 2) array of points."""
        pts = np.asarray(pts, dtype=float)
        c, s = math.cos(self.rotation), math.sin(self.rotation)
        out = np.empty_like(pts)
        out[..., 0] = self.scale * (c * pts[..., 0] - s * pts[..., 1]) + self.tx
        out[..., 1] = self.scale * (s * pts[..., 0] + c * pts[..., 1]) + self.ty
        return out

    def compose(self, other: "SimilarityTransform") -> "SimilarityTransform":
        """Return the transform equivalent to applying `other`, then self."""
        c, s = math.cos(self.rotation), math.sin(self.rotation)
        tx = self.scale * (c * other.tx - s * other.ty) + self.tx
        ty = self.scale * (s * other.tx + c * other.ty) + self.ty
        return SimilarityTransform(
            scale=self.scale * other.scale,
            rotation=self.rotation + other.rotation,
            tx=tx,
            ty=ty,
        )

    def invert(self) -> "SimilarityTransform":
        inv_s = 1.0 / self.scale
        c, s = math.cos(-self.rotation), math.sin(-self.rotation)
        tx = -inv_s * (c * self.tx - s * self.ty)
        ty = -inv_s * (s * self.tx + c * self.ty)
        return SimilarityTransform(scale=inv_s, rotation=-self.rotation, tx=tx, ty=ty)


def compose(a: SimilarityTransform, b: SimilarityTransform) -> SimilarityTransform:
    """Transform equivalent to applying b first, then a."""
    return a.compose(b)


def apply_transform(t: SimilarityTransform, p: Point2) -> Point2:
    return t.apply(p)


@dataclass(frozen=True)
class OrientedRect:
    """Oriented rectangle with a distinguished origin corner.

    `orientation` is the direction from the center toward the midpoint of
    the edge running from the origin corner to the next corner (the edge of
    length `width`). Corners are ordered clockwise in image coordinates
    starting at the origin corner.
    """

    center: Point2
    width: float
    height: float
    orientation: float

    def __post_init__(self):
        if not (math.isfinite(self.width) and self.width > 0.0):
            raise ValueError(f"width must be positive, got {self.width}")
        if not (math.isfinite(self.height) and self.height > 0.0):
            raise ValueError(f"height must be positive, got {self.height}")
        object.__setattr__(self, "orientation", wrap_angle(self.orientation))

    def corners(self) -> np.ndarray:
        """(4, 2) array of corners, clockwise from the origin corner."""
        c, s = math.cos(self.orientation), math.sin(self.orientation)
        u = np.array([c, s])            # toward origin-edge midpoint
        v = np.array([-s, c])           # along the origin edge
        ctr = np.array([self.center.x, self.center.y])
        hu = 0.5 * self.height * u
        hv = 0.5 * self.width * v
        return np.array([ctr + hu - hv, ctr + hu + hv, ctr - hu + hv, ctr - hu - hv])

    @classmethod
    def from_corners(cls, corners: np.ndarray) -> "OrientedRect":
        """Rebuild from 4 corners ordered clockwise from the origin corner."""
        pts = np.asarray(corners, dtype=float)
        if pts.shape != (4, 2):
            raise ValueError(f"expected (4, 2) corners, got {pts.shape}")
        ctr = pts.mean(axis=0)
        mid01 = 0.5 * (pts[0] + pts[1])
        u = mid01 - ctr
        orientation = math.atan2(u[1], u[0])
        width = 0.5 * (np.linalg.norm(pts[1] - pts[0]) + np.linalg.norm(pts[2] - pts[3]))
        height = 0.5 * (np.linalg.norm(pts[3] - pts[0]) + np.linalg.norm(pts[2] - pts[1]))
        return cls(Point2(float(ctr[0]), float(ctr[1])), float(width), float(height), orientation)

    def flipped(self) -> "OrientedRect":
        """Same footprint, origin corner rotated 180 degrees."""
        return OrientedRect(self.center, self.width, self.height, self.orientation + math.pi)

    def area(self) -> float:
        return self.width * self.height

    def diagonal(self) -> float:
        return math.hypot(self.width, self.height)

    def dilated(self, fraction: float) -> "OrientedRect":
        """Push every side outward by `fraction` of its distance to center."""
        return OrientedRect(
            self.center,
            self.width * (1.0 + fraction),
            self.height * (1.0 + fraction),
            self.orientation,
        )


def transform_rect(t: SimilarityTransform, r: OrientedRect) -> OrientedRect:
    """Map a rectangle through a similarity transform."""
    return OrientedRect(
        center=t.apply(r.center),
        width=r.width * t.scale,
        height=r.height * t.scale,
        orientation=r.orientation + t.rotation,
    )


def _polygon_area(poly: np.ndarray) -> float:
    """Signed shoelace area; positive for counterclockwise in standard axes."""
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _clip_polygon(subject: np.ndarray, clip: np.ndarray) -> np.ndarray:
    """Sutherland-Hodgman clip of `subject` by convex polygon `clip`."""
    orient = 1.0 if _polygon_area(clip) >= 0.0 else -1.0
    output = [tuple(p) for p in subject]
    n = len(clip)
    for i in range(n):
        if not output:
            break
        px, py = clip[i]
        qx, qy = clip[(i + 1) % n]
        ex, ey = qx - px, qy - py
        pts = output
        output = []
        m = len(pts)
        for j in range(m):
            cx, cy = pts[j]
            nx, ny = pts[(j + 1) % m]
            cur_in = orient * (ex * (cy - py) - ey * (cx - px)) >= 0.0
            nxt_in = orient * (ex * (ny - py) - ey * (nx - px)) >= 0.0
            if cur_in:
                output.append((cx, cy))
            if cur_in != nxt_in:
                # edge crossing: intersect segment (c, n) with clip line (p, q)
                dx, dy = nx - cx, ny - cy
                denom = ex * dy - ey * dx
                if denom != 0.0:
                    s = (ex * (py - cy) - ey * (px - cx)) / denom
                    output.append((cx + s * dx, cy + s * dy))
    return np.array(output, dtype=float) if output else np.empty((0, 2))


def intersection_area(a: OrientedRect, b: OrientedRect) -> float:
    inter = _clip_polygon(a.corners(), b.corners())
    if len(inter) < 3:
        return 0.0
    return abs(_polygon_area(inter))


def iou(a: OrientedRect, b: OrientedRect) -> float:
    """Intersection over union of the two corner quadrilaterals, in [0, 1]."""
    inter = intersection_area(a, b)
    union = a.area() + b.area() - inter
    if union <= 0.0:
        return 0.0
    return min(max(inter / union, 0.0), 1.0)


def oriented_iou(a: OrientedRect, b: OrientedRect) -> float:
    """IoU damped by orientation agreement.

    Equals plain IoU when the orientations agree and reaches exactly zero
    once they disagree by 90 degrees or more, so a flipped but perfectly
    overlapping rectangle scores 0.
    """
    cos_term = math.cos(a.orientation - b.orientation)
    if cos_term <= 0.0:
        return 0.0
    return iou(a, b) * cos_term
