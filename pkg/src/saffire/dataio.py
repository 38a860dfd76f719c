"""Image files, ROI interchange encoding, and annotation manifests.

The manifest is the tool's annotation format: a JSON document with one
record per image (relative image path + ROI). The synthetic generator
writes it and training/evaluation consume it, so the same format covers
both synthetic and real datasets.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import DataError
from .geometry import OrientedRect, Point2

MANIFEST_VERSION = 1


def load_image(path: str | Path) -> np.ndarray:
    """Load an image as an 8-bit grayscale array (color converted by luma)."""
    try:
        with Image.open(path) as im:
            return np.asarray(im.convert("L"), dtype=np.uint8)
    except FileNotFoundError:
        raise
    except Exception as exc:  # unreadable / not an image
        raise DataError(f"cannot read image {path}: {exc}") from exc


def save_image(path: str | Path, image: np.ndarray) -> None:
    arr = np.asarray(image)
    if arr.dtype != np.uint8:
        arr = np.clip(np.rint(arr), 0, 255).astype(np.uint8)
    Image.fromarray(arr, mode="L").save(path, format="PNG")


def to_grayscale(image: np.ndarray) -> np.ndarray:
    """Accept 8-bit grayscale or color arrays; convert color by luma."""
    arr = np.asarray(image)
    if arr.ndim == 3:
        arr = (0.299 * arr[..., 0] + 0.587 * arr[..., 1] + 0.114 * arr[..., 2])
        arr = np.clip(np.rint(arr), 0, 255).astype(np.uint8)
    if arr.ndim != 2:
        raise DataError(f"expected a 2D grayscale or 3-channel image, got shape {arr.shape}")
    return arr


def roi_to_record(roi: OrientedRect) -> dict:
    """ROI interchange encoding: center/size in pixels, orientation in degrees."""
    return {
        "center_x": float(roi.center.x),
        "center_y": float(roi.center.y),
        "width": float(roi.width),
        "height": float(roi.height),
        "orientation_degrees": math.degrees(roi.orientation),
    }


def roi_from_record(rec: dict) -> OrientedRect:
    try:
        return OrientedRect(
            center=Point2(float(rec["center_x"]), float(rec["center_y"])),
            width=float(rec["width"]),
            height=float(rec["height"]),
            orientation=math.radians(float(rec["orientation_degrees"])),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"bad ROI record {rec!r}: {exc}") from exc


@dataclass(frozen=True)
class AnnotatedImage:
    """One training/evaluation sample: a grayscale image and its ROI."""

    image: np.ndarray
    roi: OrientedRect
    path: str = ""


def write_manifest(
    manifest_path: str | Path,
    records: list[tuple[str, OrientedRect]],
    family: str | None = None,
) -> None:
    """Write an annotation manifest; image paths are relative to it."""
    doc: dict = {
        "format": "saffire-manifest",
        "format_version": MANIFEST_VERSION,
        "images": [{"path": p, "roi": roi_to_record(r)} for p, r in records],
    }
    if family is not None:
        doc["family"] = family
    Path(manifest_path).write_text(json.dumps(doc, indent=2) + "\n")


def read_manifest(manifest_path: str | Path) -> tuple[list[AnnotatedImage], str | None]:
    """Load a manifest and its images. Returns (samples, declared family)."""
    mpath = Path(manifest_path)
    try:
        doc = json.loads(mpath.read_text())
    except FileNotFoundError:
        raise
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot parse manifest {manifest_path}: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("format") != "saffire-manifest":
        raise DataError(f"{manifest_path} is not a saffire manifest")
    if doc.get("format_version") != MANIFEST_VERSION:
        raise DataError(f"unsupported manifest version {doc.get('format_version')!r}")
    samples = []
    for entry in doc.get("images", []):
        rel = entry["path"]
        img_path = mpath.parent / rel
        samples.append(
            AnnotatedImage(
                image=load_image(img_path),
                roi=roi_from_record(entry["roi"]),
                path=str(rel),
            )
        )
    return samples, doc.get("family")
