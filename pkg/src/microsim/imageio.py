"""Grayscale image and depth-map loading/saving.

Object images: 8-bit or 16-bit grayscale PNG, normalized to [0, 1] on load.
Depth maps: 32-bit float TIFF (meters, as stored) or 16-bit PNG with a
declared linear mapping from the integer range to [min_depth, max_depth].
A sidecar JSON file (``<depthfile>.json`` with ``min_depth``/``max_depth``)
declares the mapping; otherwise the caller's z-range is used.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
from PIL import Image


def load_image(path: str | Path) -> np.ndarray:
    """Load a grayscale PNG as float in [0, 1]."""
    img = Image.open(path)
    arr = np.asarray(img)
    if arr.ndim == 3:
        raise ValueError(f"{path}: expected grayscale, got {arr.shape[-1]} channels")
    if arr.dtype == np.uint8:
        return arr.astype(float) / 255.0
    if arr.dtype in (np.uint16, np.int32):
        return arr.astype(float) / 65535.0
    return arr.astype(float)


def save_image_u8(image: np.ndarray, path: str | Path) -> None:
    """Save a [0, 1] float image as 8-bit grayscale PNG."""
    arr = np.asarray(image, dtype=float)
    quantized = np.clip(np.round(arr * 255.0), 0, 255).astype(np.uint8)
    Image.fromarray(quantized).save(path, format="PNG")


def save_depth_tiff(depth: np.ndarray, path: str | Path) -> None:
    """Save a depth map (meters) as 32-bit float TIFF."""
    Image.fromarray(np.asarray(depth, dtype=np.float32)).save(path, format="TIFF")


def load_depth(
    path: str | Path,
    min_depth: float | None = None,
    max_depth: float | None = None,
) -> np.ndarray:
    """Load a depth map in meters.

    Float TIFFs are taken as-is.  Integer PNGs are mapped linearly from
    [0, 65535] (or [0, 255]) to [min_depth, max_depth]; the sidecar
    ``<file>.json`` overrides the passed range.
    """
    path = Path(path)
    sidecar = path.with_name(path.name + ".json")
    if sidecar.exists():
        meta = json.loads(sidecar.read_text())
        min_depth = float(meta["min_depth"])
        max_depth = float(meta["max_depth"])
    arr = np.asarray(Image.open(path))
    if arr.ndim != 2:
        raise ValueError(f"{path}: depth map must be single-channel, got {arr.shape}")
    if np.issubdtype(arr.dtype, np.floating):
        return arr.astype(float)
    if min_depth is None or max_depth is None:
        raise ValueError(
            f"{path}: integer depth map needs a declared (min_depth, max_depth) mapping"
        )
    full_scale = 255.0 if arr.dtype == np.uint8 else 65535.0
    return min_depth + arr.astype(float) / full_scale * (max_depth - min_depth)


def natural_key(name: str) -> tuple:
    """Sort key treating digit runs numerically: frame2 < frame10."""
    parts = []
    buf = ""
    for ch in name:
        if ch.isdigit():
            buf += ch
        else:
            if buf:
                parts.append((1, int(buf)))
                buf = ""
            parts.append((0, ch))
    if buf:
        parts.append((1, int(buf)))
    return tuple(parts)


def list_frames(directory: str | Path, suffixes: tuple[str, ...] = (".png",)) -> list[Path]:
    """Frames in a directory in natural filename order."""
    directory = Path(directory)
    files = [p for p in directory.iterdir()
             if p.is_file() and p.suffix.lower() in suffixes]
    return sorted(files, key=lambda p: natural_key(p.name))
