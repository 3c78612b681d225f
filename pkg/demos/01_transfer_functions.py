"""Walk through the optical transfer functions that shape every rendered image.

Builds the frequency grid for a small frame, evaluates each element of the
microscope train, composes the system OTF, and visualizes the NA cutoff and
the spherical-aberration phase.  Figures land in demos/output/.
"""

import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from microsim import (
    OpticalConfig,
    apply_na_mask,
    assemble_system_otf,
    lens_otf,
    make_frequency_grid,
    na_cutoff,
    slab_otf,
    total_otf,
    zernike_spherical_phase,
)
from microsim.optics import index_frequency_grid

out_dir = pathlib.Path(__file__).parent / "output"
out_dir.mkdir(exist_ok=True)

config = OpticalConfig()
print(f"objective f = {config.f_obj * 1e3:.0f} mm, eyepiece f = {config.f_eye * 1e3:.0f} mm")
print(f"NA = {config.na}, lambda = {config.lambda_vac * 1e9:.1f} nm")

# The grid for a 256x256 frame at 0.1 um/pixel.  u and v are in cycles/meter.
grid = make_frequency_grid(256, 256, 0.1e-6)
cutoff = na_cutoff(config)
print(f"NA cutoff = {cutoff:.4g} cycles/m "
      f"(Nyquist is {1 / (2 * grid.pixel_pitch):.4g})")

# Individual train elements.  The lens/slab phase laws are evaluated on
# cycles-per-field coordinates, where they produce a gentle pupil curvature.
igrid = index_frequency_grid(grid)
h_eye = lens_otf(igrid, config.f_eye, config.lam_eye)
h_obj = lens_otf(igrid, config.f_obj, config.lam_obj)
h_cs = slab_otf(igrid, config.lambda_vac / config.n_coverslip)
product = total_otf([h_eye, h_obj, h_cs])
print(f"train is pure phase: max ||H|-1| = {np.max(np.abs(np.abs(product.values) - 1)):.2e}")

# Full system OTF: five elements, NA mask, Z4 spherical aberration.
h_total = assemble_system_otf(grid, config, aberration=True)
open_cells = int(np.count_nonzero(h_total.values))
print(f"system OTF keeps {open_cells} of {h_total.values.size} cells inside the NA disk")

z4 = zernike_spherical_phase(grid, cutoff)
masked = apply_na_mask(h_total, cutoff)

fig, axes = plt.subplots(1, 3, figsize=(13, 4))
shifted = np.fft.fftshift(np.angle(h_eye.values))
axes[0].imshow(shifted, cmap="twilight")
axes[0].set_title("eyepiece phase (rad)")
axes[1].imshow(np.fft.fftshift(np.abs(masked.values)), cmap="gray")
axes[1].set_title("NA support of the system OTF")
axes[2].imshow(np.fft.fftshift(z4), cmap="coolwarm")
axes[2].set_title(r"$Z_4$ spherical aberration phase")
for ax in axes:
    ax.axis("off")
fig.tight_layout()
fig.savefig(out_dir / "transfer_functions.png", dpi=120)
print(f"wrote {out_dir / 'transfer_functions.png'}")
