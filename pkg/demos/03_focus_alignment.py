"""Align a rendered focus sweep with a pretend experimental sweep.

Both series get per-frame Laplacian-of-Gaussian focus measures; the peak
marks the focal plane, depths are normalized to [-1, 1], and depth bins are
balanced so each bin pairs one-to-one.  The resulting manifest is the
contract consumed by the GAN trainer.
"""

import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
from scipy.ndimage import gaussian_filter

from microsim import (
    build_pairs,
    make_focus_series,
    segment_and_balance,
    write_pair_manifest,
)

out_dir = pathlib.Path(__file__).parent / "output"
out_dir.mkdir(exist_ok=True)

# Two synthetic through-focus sweeps of an edge target.  The "experimental"
# sweep has a different length, focal frame, and blur slope, like real data.
base = np.zeros((64, 64))
base[:, 32:] = 1.0
sim_frames = [gaussian_filter(base, 0.4 + 0.10 * abs(i - 30)) for i in range(60)]
exp_frames = [gaussian_filter(base, 0.5 + 0.13 * abs(i - 21)) for i in range(45)]

sim = make_focus_series(sim_frames, names=[f"rendered/f{i:03d}.png" for i in range(60)])
exp = make_focus_series(exp_frames, names=[f"experimental/f{i:03d}.png" for i in range(45)])
print(f"rendered peak at frame {sim.peak_index}, experimental peak at {exp.peak_index}")

balanced = segment_and_balance(sim, exp, n_bins=12, seed=42)
manifest = build_pairs(balanced, pose_label="P0_R20")
print(f"{len(manifest.pairs)} pairs across {len(manifest.counts)} depth bins")
for b in sorted(manifest.counts):
    print(f"  bin {b:2d}: {manifest.counts[b]} pairs")

write_pair_manifest(manifest, out_dir / "pairs.jsonl")
print(f"wrote {out_dir / 'pairs.jsonl'}")

fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
ax1.plot(sim.log_values, label="rendered")
ax1.plot(exp.log_values, label="experimental")
ax1.axvline(sim.peak_index, color="C0", ls=":")
ax1.axvline(exp.peak_index, color="C1", ls=":")
ax1.set_xlabel("frame")
ax1.set_ylabel("LoG focus measure")
ax1.legend()
ax2.plot(sim.normalized_depth, sim.log_values, label="rendered")
ax2.plot(exp.normalized_depth, exp.log_values, label="experimental")
ax2.set_xlabel("normalized depth (0 = focal plane)")
ax2.legend()
fig.tight_layout()
fig.savefig(out_dir / "focus_alignment.png", dpi=120)
print(f"wrote {out_dir / 'focus_alignment.png'}")
