"""Foreground segmentation of depth maps and object-enclosing crop windows.

Scalar k-means on the depth values separates the micro-object from the
background plane; the minority cluster is taken as foreground and its
bounding box (plus margin) becomes the render crop.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, DimensionError

KMEANS_TOL = 1e-12
KMEANS_MAX_ITER = 100


@dataclass(frozen=True)
class SegmentationResult:
    labels: np.ndarray
    centroids: np.ndarray
    foreground_id: int
    bbox: tuple[int, int, int, int]


def kmeans_depth(depth: np.ndarray, k: int = 2, seed: int = 0):
    """Lloyd's algorithm on the scalar depth distribution.

    Deterministic: centroids start at the k evenly spaced mid-quantiles
    ((i+0.5)/k) of the depths and iterate until movement < 1e-12 m or 100
    rounds.  ``seed`` is accepted for CLI plumbing symmetry but unused; the
    procedure has no randomness.  Returns (labels, centroids) with centroids
    in ascending order.
    """
    depth = np.asarray(depth, dtype=float)
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    flat = depth.ravel()
    uniq = np.unique(flat)
    if uniq.size < k:
        raise DegenerateInputError(
            f"k-means needs at least {k} distinct depths, found {uniq.size}"
        )
    centroids = np.quantile(flat, (np.arange(k) + 0.5) / k)
    if np.unique(centroids).size < k:
        # Heavily duplicated depths can collapse quantiles; fall back to
        # evenly spaced distinct values, still deterministic.
        pick = np.round(np.linspace(0, uniq.size - 1, k)).astype(int)
        centroids = uniq[pick]
    for _ in range(KMEANS_MAX_ITER):
        labels = np.argmin(np.abs(flat[:, None] - centroids[None, :]), axis=1)
        new_centroids = centroids.copy()
        for j in range(k):
            members = flat[labels == j]
            if members.size:
                new_centroids[j] = members.mean()
        if np.max(np.abs(new_centroids - centroids)) < KMEANS_TOL:
            centroids = new_centroids
            break
        centroids = new_centroids
    order = np.argsort(centroids)
    remap = np.empty(k, dtype=int)
    remap[order] = np.arange(k)
    labels = remap[labels].reshape(depth.shape)
    return labels, centroids[order]


def select_foreground(labels: np.ndarray, centroids: np.ndarray) -> int:
    """Pick the foreground cluster: fewest pixels, ties to larger |mean depth|."""
    counts = np.bincount(labels.ravel(), minlength=centroids.size)
    best = 0
    for j in range(1, centroids.size):
        if counts[j] < counts[best]:
            best = j
        elif counts[j] == counts[best] and abs(centroids[j]) > abs(centroids[best]):
            best = j
    return int(best)


def foreground_crop(
    labels: np.ndarray, foreground_id: int, margin: int = 8
) -> tuple[int, int, int, int]:
    """Tight bounding box (x, y, w, h) of the foreground, grown by margin.

    The expanded box is clamped to the image bounds.
    """
    mask = labels == foreground_id
    if not mask.any():
        raise DegenerateInputError(f"cluster {foreground_id} has no pixels")
    rows = np.any(mask, axis=1).nonzero()[0]
    cols = np.any(mask, axis=0).nonzero()[0]
    y0 = max(int(rows[0]) - margin, 0)
    y1 = min(int(rows[-1]) + margin, labels.shape[0] - 1)
    x0 = max(int(cols[0]) - margin, 0)
    x1 = min(int(cols[-1]) + margin, labels.shape[1] - 1)
    return (x0, y0, x1 - x0 + 1, y1 - y0 + 1)


def segment_foreground(
    depth: np.ndarray, k: int = 2, margin: int = 8, seed: int = 0
) -> SegmentationResult:
    """Cluster a depth map, pick the foreground, and compute its crop window."""
    depth = np.asarray(depth, dtype=float)
    if depth.ndim != 2:
        raise DimensionError(f"depth map must be 2-D, got shape {depth.shape}")
    labels, centroids = kmeans_depth(depth, k=k, seed=seed)
    fg = select_foreground(labels, centroids)
    bbox = foreground_crop(labels, fg, margin=margin)
    return SegmentationResult(labels=labels, centroids=centroids,
                              foreground_id=fg, bbox=bbox)
