"""Manifest parsing and torch datasets.

This package talks to the renderer only through its published file formats:
the pair manifest (JSON Lines: header with seed/n_bins/sigma, then records
with rendered/experimental/bin/pose/norm_depth) and the dataset manifest
(records with image/pose/bin/source/split).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch
from PIL import Image
from torch.utils.data import Dataset

_POSE_RE = re.compile(r"^P(-?\d+)_R(-?\d+)$")


@dataclass(frozen=True)
class Pair:
    rendered: str
    experimental: str
    bin: int
    pose: str
    norm_depth: float


@dataclass(frozen=True)
class Entry:
    image: str
    pose: str
    bin: int
    source: str
    split: str = ""


def read_pair_manifest(path: str | Path) -> tuple[dict, list[Pair]]:
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise ValueError(f"{path}: empty manifest")
    header = json.loads(lines[0])
    pairs = []
    for line in lines[1:]:
        if not line.strip():
            continue
        rec = json.loads(line)
        pairs.append(Pair(rendered=rec["rendered"], experimental=rec["experimental"],
                          bin=int(rec["bin"]), pose=rec["pose"],
                          norm_depth=float(rec["norm_depth"])))
    if not pairs:
        raise ValueError(f"{path}: manifest has a header but no pairs")
    return header, pairs


def write_pair_manifest(header: dict, pairs: list[Pair], path: str | Path) -> None:
    lines = [json.dumps(header, sort_keys=True, separators=(",", ":"))]
    for p in pairs:
        lines.append(json.dumps(
            {"rendered": p.rendered, "experimental": p.experimental, "bin": p.bin,
             "pose": p.pose, "norm_depth": p.norm_depth},
            sort_keys=True, separators=(",", ":")))
    Path(path).write_text("\n".join(lines) + "\n")


def read_dataset_manifest(path: str | Path) -> list[Entry]:
    lines = Path(path).read_text().splitlines()
    entries = []
    for line in lines[1:]:
        if not line.strip():
            continue
        rec = json.loads(line)
        entries.append(Entry(image=rec["image"], pose=rec["pose"], bin=int(rec["bin"]),
                             source=rec["source"], split=rec.get("split", "")))
    if not entries:
        raise ValueError(f"{path}: no entries")
    return entries


def write_dataset_manifest(header: dict, entries: list[Entry], path: str | Path) -> None:
    lines = [json.dumps(header, sort_keys=True, separators=(",", ":"))]
    for e in entries:
        lines.append(json.dumps(
            {"image": e.image, "pose": e.pose, "bin": e.bin, "source": e.source,
             "split": e.split},
            sort_keys=True, separators=(",", ":")))
    Path(path).write_text("\n".join(lines) + "\n")


def parse_pose_angles(pose: str) -> tuple[int, int]:
    m = _POSE_RE.match(pose.strip())
    if not m:
        raise ValueError(f"malformed pose label {pose!r}")
    return int(m.group(1)), int(m.group(2))


def load_gray(path: str | Path, size: int | None = None) -> np.ndarray:
    """Grayscale image as float32 in [0, 1], optionally resized to size x size."""
    img = Image.open(path)
    if img.mode not in ("L", "I", "I;16", "F"):
        img = img.convert("L")
    if size is not None and img.size != (size, size):
        img = img.resize((size, size), Image.BILINEAR)
    arr = np.asarray(img).astype(np.float32)
    if arr.max() > 1.0:
        arr = arr / (255.0 if arr.max() <= 255 else 65535.0)
    return arr


def to_tensor(arr: np.ndarray) -> torch.Tensor:
    """[0,1] array -> 1xHxW tensor in [-1, 1] (tanh-compatible)."""
    return torch.from_numpy(arr * 2.0 - 1.0).unsqueeze(0)


def from_tensor(t: torch.Tensor) -> np.ndarray:
    """1xHxW tensor in [-1, 1] -> [0,1] float array."""
    return ((t.detach().squeeze(0).cpu().numpy() + 1.0) / 2.0).clip(0.0, 1.0)


class PairDataset(Dataset):
    """(rendered input, experimental target) tensor pairs for GAN training."""

    def __init__(self, pairs: list[Pair], root: str | Path, image_size: int = 64):
        self.pairs = list(pairs)
        self.root = Path(root)
        self.image_size = image_size

    def __len__(self) -> int:
        return len(self.pairs)

    def __getitem__(self, idx: int):
        p = self.pairs[idx]
        x = to_tensor(load_gray(self.root / p.rendered, self.image_size))
        y = to_tensor(load_gray(self.root / p.experimental, self.image_size))
        return x, y


class PoseDataset(Dataset):
    """Images with (pitch class, roll class) targets."""

    def __init__(self, entries: list[Entry], root: str | Path,
                 pitch_classes: list[int], roll_classes: list[int],
                 image_size: int = 64):
        self.entries = list(entries)
        self.root = Path(root)
        self.image_size = image_size
        self.pitch_to_idx = {p: i for i, p in enumerate(pitch_classes)}
        self.roll_to_idx = {r: i for i, r in enumerate(roll_classes)}

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, idx: int):
        e = self.entries[idx]
        x = to_tensor(load_gray(self.root / e.image, self.image_size))
        pitch, roll = parse_pose_angles(e.pose)
        return x, self.pitch_to_idx[pitch], self.roll_to_idx[roll]


def pose_classes(entries: list[Entry]) -> tuple[list[int], list[int]]:
    """Sorted distinct pitch and roll angles present in a manifest."""
    pitches, rolls = set(), set()
    for e in entries:
        p, r = parse_pose_angles(e.pose)
        pitches.add(p)
        rolls.add(r)
    return sorted(pitches), sorted(rolls)
