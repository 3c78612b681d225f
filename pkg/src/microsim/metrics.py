"""Full-reference image-quality metrics: MSE, PSNR, and windowed SSIM.

Inputs are grayscale images normalized to [0, 1].  SSIM follows the
canonical definition: 11x11 Gaussian window with sigma 1.5, stability
constants C1 = (0.01 L)^2 and C2 = (0.03 L)^2 with dynamic range L = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import convolve2d

from .errors import DimensionError

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03


@dataclass(frozen=True)
class MetricReport:
    mse: float
    psnr: float
    ssim: float


def _check_pair(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise DimensionError(f"image shapes differ: {a.shape} vs {b.shape}")
    return a, b


def mse(a: np.ndarray, b: np.ndarray) -> float:
    """Mean over pixels of the squared difference."""
    a, b = _check_pair(a, b)
    return float(np.mean((a - b) ** 2))


def psnr(a: np.ndarray, b: np.ndarray, max_value: float = 1.0) -> float:
    """Peak signal-to-noise ratio in dB; +inf when the images are identical."""
    if max_value <= 0:
        raise ValueError(f"max_value must be positive, got {max_value}")
    err = mse(a, b)
    if err == 0:
        return math.inf
    return 10.0 * math.log10(max_value**2 / err)


def ssim_window() -> np.ndarray:
    """The 11x11 Gaussian weighting window, normalized to unit sum."""
    half = SSIM_WINDOW // 2
    ax = np.arange(-half, half + 1, dtype=float)
    g = np.exp(-(ax**2) / (2.0 * SSIM_SIGMA**2))
    win = np.outer(g, g)
    return win / win.sum()


def ssim(a: np.ndarray, b: np.ndarray, dynamic_range: float = 1.0) -> float:
    """Mean local structural similarity over all full-overlap windows.

    Local weighted means/variances/covariance come from correlating with the
    Gaussian window in 'valid' mode, so every window is fully inside the
    image and the result matches a per-window loop exactly.
    """
    a, b = _check_pair(a, b)
    if min(a.shape) < SSIM_WINDOW:
        raise ValueError(
            f"image {a.shape} smaller than the {SSIM_WINDOW}x{SSIM_WINDOW} SSIM window"
        )
    win = ssim_window()
    c1 = (SSIM_K1 * dynamic_range) ** 2
    c2 = (SSIM_K2 * dynamic_range) ** 2
    mu_a = convolve2d(a, win, mode="valid")
    mu_b = convolve2d(b, win, mode="valid")
    var_a = convolve2d(a * a, win, mode="valid") - mu_a**2
    var_b = convolve2d(b * b, win, mode="valid") - mu_b**2
    cov = convolve2d(a * b, win, mode="valid") - mu_a * mu_b
    num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)
    den = (mu_a**2 + mu_b**2 + c1) * (var_a + var_b + c2)
    return float(np.mean(num / den))


def evaluate_pair(a: np.ndarray, b: np.ndarray, max_value: float = 1.0) -> MetricReport:
    """All three metrics for one image pair."""
    return MetricReport(mse=mse(a, b), psnr=psnr(a, b, max_value), ssim=ssim(a, b))
