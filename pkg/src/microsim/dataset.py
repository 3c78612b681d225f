"""Pose-label grammar, dataset manifests, and stratified train/val/test splits.

Pose labels follow the ``P<pitch>_R<roll>`` convention with 10-degree
resolution.  The 35-class default grid (pitch 0..40, roll 0..60) is a
placeholder consistent with the published label examples; deployments should
supply the real enumeration via a class-set file (one label per line).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import PoseError

_POSE_RE = re.compile(r"^P(-?\d+)_R(-?\d+)$")

SOURCES = ("experimental", "rendered", "generated")

DEFAULT_SET_A = ("P0_R20", "P10_R30", "P20_R40", "P30_R50", "P40_R60")


@dataclass(frozen=True, order=True)
class PoseLabel:
    pitch: int
    roll: int

    def __str__(self) -> str:
        return format_pose(self)


def format_pose(pose: PoseLabel) -> str:
    return f"P{pose.pitch}_R{pose.roll}"


def default_class_set() -> tuple[str, ...]:
    """Placeholder 35-label grid: pitch 0..40 x roll 0..60 in 10-degree steps."""
    return tuple(f"P{p}_R{r}" for p in range(0, 50, 10) for r in range(0, 70, 10))


def load_class_set(path: str | Path) -> tuple[str, ...]:
    """Read a class-set file: one pose label per line, ``#`` comments allowed."""
    labels = []
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            labels.append(line)
    if not labels:
        raise PoseError(f"{path}: class set is empty")
    for label in labels:
        if not _POSE_RE.match(label):
            raise PoseError(f"{path}: malformed pose label {label!r}")
    if len(set(labels)) != len(labels):
        raise PoseError(f"{path}: duplicate pose labels")
    return tuple(labels)


def parse_pose(label: str, class_set: tuple[str, ...] | None = None) -> PoseLabel:
    """Parse ``P<int>_R<int>``; angles must be multiples of 10 and in the class set."""
    m = _POSE_RE.match(label.strip())
    if not m:
        raise PoseError(f"malformed pose label {label!r}, expected P<int>_R<int>")
    pitch, roll = int(m.group(1)), int(m.group(2))
    if pitch % 10 or roll % 10:
        raise PoseError(f"pose {label!r} violates the 10-degree resolution")
    if class_set is None:
        class_set = default_class_set()
    canonical = f"P{pitch}_R{roll}"
    if canonical not in class_set:
        raise PoseError(f"pose {canonical!r} is not in the configured class set")
    return PoseLabel(pitch=pitch, roll=roll)


@dataclass(frozen=True)
class PoseSplitSpec:
    """Disjoint, exhaustive partition of the class set into Set A and Set B."""

    set_a: tuple[str, ...]
    set_b: tuple[str, ...]


def make_pose_split(
    full_set: tuple[str, ...], set_a: tuple[str, ...] | list[str]
) -> PoseSplitSpec:
    """Set B is the complement of Set A within the full class set."""
    full = list(full_set)
    for pose in set_a:
        if pose not in full:
            raise ValueError(f"pose {pose!r} is not in the full class set")
    a = tuple(set_a)
    b = tuple(p for p in full if p not in set(a))
    return PoseSplitSpec(set_a=a, set_b=b)


@dataclass(frozen=True)
class ManifestEntry:
    image: str
    pose: str
    bin: int
    source: str
    split: str = ""


@dataclass(frozen=True)
class DatasetManifest:
    entries: tuple[ManifestEntry, ...]
    fractions: tuple[float, float, float]
    seed: int


def split_manifest(
    entries,
    fractions: tuple[float, float, float] = (0.70, 0.15, 0.15),
    seed: int = 42,
) -> DatasetManifest:
    """Assign train/val/test splits by seeded, pose-stratified shuffling.

    Entries are shuffled within each pose group, interleaved round-robin
    across groups (so every pose reaches the front of the order), and the
    interleaved list is cut at the cumulative fraction boundaries.  Split
    sizes are exact: boundaries are round(N * cumulative fraction).
    """
    entries = list(entries)
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise ValueError(f"fractions must sum to 1, got {fractions}")
    if any(f < 0 for f in fractions):
        raise ValueError(f"fractions must be non-negative, got {fractions}")
    rng = np.random.default_rng(seed)
    groups: dict[str, list[ManifestEntry]] = {}
    for e in entries:
        groups.setdefault(e.pose, []).append(e)
    for pose in groups:
        order = rng.permutation(len(groups[pose]))
        groups[pose] = [groups[pose][i] for i in order]
    interleaved: list[ManifestEntry] = []
    queues = [groups[p] for p in sorted(groups)]
    while queues:
        queues = [q for q in queues if q]
        for q in queues:
            if q:
                interleaved.append(q.pop(0))
    n = len(interleaved)
    b1 = round(n * fractions[0])
    b2 = round(n * (fractions[0] + fractions[1]))
    named = []
    for j, e in enumerate(interleaved):
        split = "train" if j < b1 else ("val" if j < b2 else "test")
        named.append(ManifestEntry(image=e.image, pose=e.pose, bin=e.bin,
                                   source=e.source, split=split))
    return DatasetManifest(entries=tuple(named), fractions=tuple(fractions), seed=seed)


def write_dataset_manifest(manifest: DatasetManifest, path: str | Path) -> None:
    """JSON Lines: header with seed and fractions, then one entry per line."""
    lines = [json.dumps(
        {"seed": manifest.seed, "fractions": list(manifest.fractions)},
        sort_keys=True, separators=(",", ":"),
    )]
    for e in manifest.entries:
        lines.append(json.dumps(
            {"image": e.image, "pose": e.pose, "bin": e.bin,
             "source": e.source, "split": e.split},
            sort_keys=True, separators=(",", ":"),
        ))
    Path(path).write_text("\n".join(lines) + "\n")


def read_dataset_manifest(path: str | Path) -> DatasetManifest:
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise ValueError(f"{path}: empty manifest")
    header = json.loads(lines[0])
    entries = []
    for line in lines[1:]:
        if not line.strip():
            continue
        rec = json.loads(line)
        if rec["source"] not in SOURCES:
            raise ValueError(f"{path}: unknown source {rec['source']!r}")
        entries.append(ManifestEntry(
            image=rec["image"], pose=rec["pose"], bin=int(rec["bin"]),
            source=rec["source"], split=rec.get("split", ""),
        ))
    fr = header["fractions"]
    return DatasetManifest(entries=tuple(entries),
                           fractions=(fr[0], fr[1], fr[2]),
                           seed=int(header["seed"]))
