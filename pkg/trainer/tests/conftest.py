"""Shared toy-data builders for the trainer tests."""

import json
import math
from pathlib import Path

import numpy as np
import pytest
from PIL import Image

from sim2real.data import Entry, Pair, write_dataset_manifest, write_pair_manifest


def save_png(arr: np.ndarray, path: Path) -> None:
    Image.fromarray((arr.clip(0, 1) * 255).round().astype(np.uint8)).save(path)


def contrast_gloss(arr: np.ndarray) -> np.ndarray:
    """Fixed contrast/gloss perturbation standing in for the real-image look."""
    out = 0.6 * np.power(arr.clip(0, 1), 1.6) + 0.25
    img = Image.fromarray((out.clip(0, 1) * 255).round().astype(np.uint8))
    from PIL import ImageFilter

    img = img.filter(ImageFilter.GaussianBlur(0.8))
    return np.asarray(img).astype(np.float32) / 255.0


def toy_object(rng: np.random.Generator, size: int = 32) -> np.ndarray:
    """A bright blob with a ring, loosely microscope-like."""
    yy, xx = np.mgrid[0:size, 0:size]
    cy, cx = rng.uniform(size * 0.3, size * 0.7, size=2)
    r = rng.uniform(size * 0.12, size * 0.22)
    d = np.hypot(yy - cy, xx - cx)
    img = 0.85 * (d < r) + 0.35 * (np.abs(d - 1.6 * r) < 1.2)
    return (img + 0.04 * rng.random((size, size))).clip(0, 1)


@pytest.fixture()
def tiny_pairs(tmp_path):
    """Eight 32x32 (input, perturbed target) pairs plus a manifest."""
    rng = np.random.default_rng(0)
    root = tmp_path / "data"
    (root / "x").mkdir(parents=True)
    (root / "y").mkdir()
    pairs = []
    for i in range(8):
        x = toy_object(rng)
        y = contrast_gloss(x)
        save_png(x, root / "x" / f"{i}.png")
        save_png(y, root / "y" / f"{i}.png")
        pairs.append(Pair(rendered=f"x/{i}.png", experimental=f"y/{i}.png",
                          bin=i % 2, pose="P0_R0", norm_depth=0.0))
    manifest = root / "pairs.jsonl"
    write_pair_manifest({"seed": 0, "n_bins": 2, "sigma": 2.0}, pairs, manifest)
    return manifest, root, pairs


def pose_image(pitch: int, roll: int, rng: np.random.Generator,
               size: int = 64) -> np.ndarray:
    """Pose-coded toy frame: bar angle tracks pitch, ring radius tracks roll."""
    yy, xx = np.mgrid[0:size, 0:size]
    cy = cx = size / 2
    theta = math.radians(10 + pitch * 1.6)
    u = (xx - cx) * math.cos(theta) + (yy - cy) * math.sin(theta)
    v = -(xx - cx) * math.sin(theta) + (yy - cy) * math.cos(theta)
    bar = (np.abs(u) < size * 0.35) & (np.abs(v) < 2.5)
    radius = size * (0.18 + roll / 60.0 * 0.22)
    ring = np.abs(np.hypot(xx - cx, yy - cy) - radius) < 1.5
    img = 0.9 * bar + 0.5 * ring + 0.05 * rng.random((size, size))
    return img.clip(0, 1)


def build_pose_set(root: Path, poses, per_pose: int, source: str, split: str,
                   seed: int, prefix: str) -> list[Entry]:
    rng = np.random.default_rng(seed)
    img_dir = root / prefix
    img_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    for pose in poses:
        pitch = int(pose.split("_")[0][1:])
        roll = int(pose.split("_")[1][1:])
        for i in range(per_pose):
            name = f"{prefix}/{pose}_{i:03d}.png"
            save_png(pose_image(pitch, roll, rng), root / name)
            entries.append(Entry(image=name, pose=pose, bin=i % 4,
                                 source=source, split=split))
    return entries
