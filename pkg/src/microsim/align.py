"""Focus-measure alignment of rendered and experimental image series.

Each frame gets a Laplacian-of-Gaussian focus measure; the peak frame marks
the focal plane (normalized depth 0).  Both series are bucketed by
normalized depth, each bucket is balanced by seeded subsampling, and frames
are zipped into one-to-one (rendered, experimental) pairs for downstream
training.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.signal import convolve2d

from .errors import AlignmentError, DimensionError


def log_kernel(sigma: float = 2.0) -> np.ndarray:
    """Discrete Laplacian-of-Gaussian kernel, truncated at 4*sigma, odd size.

    The kernel is shifted to exactly zero sum so that constant images give a
    strictly zero response (DC is killed exactly despite truncation).
    """
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    half = int(np.ceil(4.0 * sigma))
    ax = np.arange(-half, half + 1, dtype=float)
    xx, yy = np.meshgrid(ax, ax)
    r2 = xx**2 + yy**2
    gauss = np.exp(-r2 / (2.0 * sigma**2))
    kern = (r2 - 2.0 * sigma**2) / sigma**4 * gauss
    kern -= kern.mean()
    return kern


def log_response(image: np.ndarray, sigma: float = 2.0) -> float:
    """Focus measure: variance of the LoG response over the image.

    The convolution is restricted to full-overlap (valid) positions so edge
    padding cannot leak into the statistic; images smaller than the kernel
    are rejected.  Offset-invariant: adding a constant changes nothing.
    """
    image = np.asarray(image, dtype=float)
    kern = log_kernel(sigma)
    if image.shape[0] < kern.shape[0] or image.shape[1] < kern.shape[1]:
        raise ValueError(
            f"image {image.shape} smaller than LoG kernel {kern.shape} at sigma={sigma}"
        )
    response = convolve2d(image, kern, mode="valid")
    return float(np.var(response))


@dataclass(frozen=True)
class FocusSeries:
    """An ordered image series with focus measures and normalized depths."""

    frames: tuple[str, ...]
    log_values: np.ndarray
    peak_index: int
    normalized_depth: np.ndarray


def find_focal_peak(log_values: np.ndarray) -> int:
    """Index of the maximum focus measure; ties break to the lowest index."""
    log_values = np.asarray(log_values, dtype=float)
    if log_values.size < 1:
        raise ValueError("need at least one frame")
    return int(np.argmax(log_values))


def normalized_depths(n: int, peak: int) -> np.ndarray:
    """Per-frame depth scaled so the peak sits at 0 and the span covers [-1, 1]."""
    idx = np.arange(n, dtype=float)
    denom = max(peak, n - 1 - peak, 1)
    return (idx - peak) / denom


def make_focus_series(
    images, names: list[str] | None = None, sigma: float = 2.0
) -> FocusSeries:
    """Build a FocusSeries from in-memory frames (or precomputed measures)."""
    values = np.array([log_response(img, sigma) for img in images], dtype=float)
    if names is None:
        names = [f"frame_{i:04d}" for i in range(len(values))]
    if len(names) != values.size:
        raise DimensionError(f"{len(names)} names for {values.size} frames")
    peak = find_focal_peak(values)
    return FocusSeries(frames=tuple(names), log_values=values, peak_index=peak,
                       normalized_depth=normalized_depths(values.size, peak))


def split_at_peaks(log_values: np.ndarray, threshold: float = 0.8) -> list[tuple[int, int]]:
    """Split a sweep into spans around each strong local focus maximum.

    Local maxima at or above ``threshold`` times the global peak each anchor
    one span; boundaries fall at the minimum between consecutive peaks.
    Returns half-open (start, stop) index ranges; single-peak sweeps yield
    one full-range span.
    """
    v = np.asarray(log_values, dtype=float)
    n = v.size
    if n == 0:
        return []
    peaks = []
    for i in range(n):
        left = v[i - 1] if i > 0 else -np.inf
        right = v[i + 1] if i < n - 1 else -np.inf
        if v[i] > left and v[i] >= right:
            peaks.append(i)
    floor_value = threshold * v.max()
    peaks = [p for p in peaks if v[p] >= floor_value]
    if len(peaks) <= 1:
        return [(0, n)]
    spans = []
    start = 0
    for a, b in zip(peaks[:-1], peaks[1:]):
        valley = a + int(np.argmin(v[a:b + 1]))
        spans.append((start, valley + 1))
        start = valley + 1
    spans.append((start, n))
    return spans


def _bin_index(norm_depth: np.ndarray, n_bins: int) -> np.ndarray:
    idx = np.floor((norm_depth + 1.0) / 2.0 * n_bins).astype(int)
    return np.clip(idx, 0, n_bins - 1)


@dataclass(frozen=True)
class BalancedBins:
    """Per-bin frame selections with equal rendered/experimental counts."""

    bins: dict[int, tuple[list[int], list[int]]]
    sim: FocusSeries
    exp: FocusSeries
    n_bins: int
    seed: int
    sigma: float = 2.0


def segment_and_balance(
    sim: FocusSeries, exp: FocusSeries, n_bins: int = 40, seed: int = 42,
    sigma: float = 2.0,
) -> BalancedBins:
    """Bucket both series by normalized depth and equalize counts per bucket.

    Within every bin the larger side is subsampled uniformly without
    replacement (seeded); bins with an empty side are dropped.  Raises
    AlignmentError when nothing survives.
    """
    if n_bins < 1:
        raise ValueError(f"n_bins must be >= 1, got {n_bins}")
    if len(sim.frames) == 0 or len(exp.frames) == 0:
        raise AlignmentError("both series must be non-empty")
    rng = np.random.default_rng(seed)
    sim_bins = _bin_index(sim.normalized_depth, n_bins)
    exp_bins = _bin_index(exp.normalized_depth, n_bins)
    bins: dict[int, tuple[list[int], list[int]]] = {}
    for b in range(n_bins):
        sim_idx = np.nonzero(sim_bins == b)[0]
        exp_idx = np.nonzero(exp_bins == b)[0]
        if sim_idx.size == 0 or exp_idx.size == 0:
            continue
        keep = min(sim_idx.size, exp_idx.size)
        if sim_idx.size > keep:
            sim_idx = np.sort(rng.choice(sim_idx, size=keep, replace=False))
        if exp_idx.size > keep:
            exp_idx = np.sort(rng.choice(exp_idx, size=keep, replace=False))
        bins[b] = (sim_idx.tolist(), exp_idx.tolist())
    if not bins:
        raise AlignmentError("no depth bin has frames from both series")
    return BalancedBins(bins=bins, sim=sim, exp=exp, n_bins=n_bins, seed=seed,
                        sigma=sigma)


@dataclass(frozen=True)
class PairRecord:
    rendered: str
    experimental: str
    bin: int
    pose: str
    norm_depth: float


@dataclass(frozen=True)
class PairManifest:
    """The aligned pair list handed to the sim-to-real trainer."""

    pairs: tuple[PairRecord, ...]
    seed: int
    n_bins: int
    sigma: float
    counts: dict[int, int]


def build_pairs(balanced: BalancedBins, pose_label: str = "") -> PairManifest:
    """Zip each balanced bin into one-to-one pairs ordered by depth.

    Within a bin both sides are sorted by normalized depth and paired
    positionally; ``norm_depth`` records the rendered frame's depth.
    """
    if not balanced.bins:
        raise AlignmentError("balanced bins are empty")
    pairs: list[PairRecord] = []
    counts: dict[int, int] = {}
    for b in sorted(balanced.bins):
        sim_idx, exp_idx = balanced.bins[b]
        sim_sorted = sorted(sim_idx, key=lambda i: (balanced.sim.normalized_depth[i], i))
        exp_sorted = sorted(exp_idx, key=lambda i: (balanced.exp.normalized_depth[i], i))
        for si, ei in zip(sim_sorted, exp_sorted):
            pairs.append(PairRecord(
                rendered=balanced.sim.frames[si],
                experimental=balanced.exp.frames[ei],
                bin=b,
                pose=pose_label,
                norm_depth=float(balanced.sim.normalized_depth[si]),
            ))
        counts[b] = len(sim_sorted)
    return PairManifest(pairs=tuple(pairs), seed=balanced.seed,
                        n_bins=balanced.n_bins, sigma=balanced.sigma, counts=counts)


def write_pair_manifest(manifest: PairManifest, path: str | Path) -> None:
    """Serialize as JSON Lines: a header record, then one record per pair."""
    lines = [json.dumps(
        {"seed": manifest.seed, "n_bins": manifest.n_bins, "sigma": manifest.sigma},
        sort_keys=True, separators=(",", ":"),
    )]
    for p in manifest.pairs:
        lines.append(json.dumps(
            {"rendered": p.rendered, "experimental": p.experimental, "bin": p.bin,
             "pose": p.pose, "norm_depth": p.norm_depth},
            sort_keys=True, separators=(",", ":"),
        ))
    Path(path).write_text("\n".join(lines) + "\n")


def read_pair_manifest(path: str | Path) -> PairManifest:
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise ValueError(f"{path}: empty manifest")
    header = json.loads(lines[0])
    pairs = []
    counts: dict[int, int] = {}
    for line in lines[1:]:
        if not line.strip():
            continue
        rec = json.loads(line)
        pairs.append(PairRecord(
            rendered=rec["rendered"], experimental=rec["experimental"],
            bin=int(rec["bin"]), pose=rec["pose"],
            norm_depth=float(rec["norm_depth"]),
        ))
        counts[int(rec["bin"])] = counts.get(int(rec["bin"]), 0) + 1
    return PairManifest(pairs=tuple(pairs), seed=int(header["seed"]),
                        n_bins=int(header["n_bins"]), sigma=float(header["sigma"]),
                        counts=counts)
