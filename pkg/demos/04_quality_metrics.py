"""Score rendered images against targets with MSE, PSNR, and SSIM.

Uses a rendered frame as the reference and perturbed variants as candidates,
showing how each metric reacts to noise, blur, and contrast changes.
"""

import numpy as np
from scipy.ndimage import gaussian_filter

from microsim import OpticalConfig, RenderOptions, evaluate_pair, render_frame

rng = np.random.default_rng(0)

size = 128
img = np.zeros((size, size))
img[44:84, 58:70] = 0.9
img[58:70, 44:84] = 0.9
frame = render_frame(img, np.full_like(img, 3e-6), OpticalConfig(), RenderOptions())
target = frame.intensity

candidates = {
    "identical": target,
    "mild noise": np.clip(target + 0.02 * rng.standard_normal(target.shape), 0, 1),
    "strong noise": np.clip(target + 0.10 * rng.standard_normal(target.shape), 0, 1),
    "blurred": gaussian_filter(target, 2.0),
    "contrast shift": np.clip(0.6 * target + 0.2, 0, 1),
    "inverted": 1.0 - target,
}

print(f"{'candidate':<16} {'MSE':>10} {'PSNR (dB)':>10} {'SSIM':>8}")
for name, cand in candidates.items():
    rep = evaluate_pair(target, cand)
    psnr_txt = "inf" if rep.psnr == float("inf") else f"{rep.psnr:.2f}"
    print(f"{name:<16} {rep.mse:>10.5f} {psnr_txt:>10} {rep.ssim:>8.4f}")
