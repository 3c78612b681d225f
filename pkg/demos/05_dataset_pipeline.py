"""End-to-end dataset pipeline exercised through the command-line interface.

Synthesizes a small focus sweep on disk, then drives the actual CLI:
render -> align -> metrics -> dataset.  This mirrors how a real capture
session turns into a training-ready manifest.
"""

import json
import pathlib
import tempfile

import numpy as np

from microsim.cli import main
from microsim.imageio import save_depth_tiff, save_image_u8

work = pathlib.Path(tempfile.mkdtemp(prefix="microsim_demo_"))
print(f"working in {work}")

# Fabricate a 12-frame sweep: a disk object stepping through depth.
img_dir = work / "objects"
dep_dir = work / "depths"
img_dir.mkdir()
dep_dir.mkdir()
rng = np.random.default_rng(1)
yy, xx = np.mgrid[0:96, 0:96]
disk = ((yy - 48) ** 2 + (xx - 48) ** 2 < 18**2).astype(float)
for i, z in enumerate(np.linspace(-8e-6, 8e-6, 12)):
    save_image_u8(disk * 0.85 + 0.03 * rng.random((96, 96)), img_dir / f"s{i:02d}.png")
    save_depth_tiff(np.where(disk > 0, z, 0.0), dep_dir / f"s{i:02d}.tif")

steps = [
    ["render", str(img_dir), str(dep_dir), "--out", str(work / "rendered"),
     "--layers", "16", "--threads", "2"],
    # pretend the "experimental" series is the same sweep rendered without
    # aberration, so the two series differ but stay alignable
    ["render", str(img_dir), str(dep_dir), "--out", str(work / "experimental"),
     "--layers", "16", "--no-aberration"],
    ["align", str(work / "rendered"), str(work / "experimental"),
     "--out", str(work / "pairs.jsonl"), "--bins", "6", "--pose", "P0_R20"],
    ["metrics", "--manifest", str(work / "pairs.jsonl"),
     "--out", str(work / "report.csv"), "--grid"],
    ["dataset", "--manifest", str(work / "pairs.jsonl"),
     "--out", str(work / "dataset.jsonl"), "--seed", "7"],
]
for argv in steps:
    print(f"\n$ microsim {' '.join(argv)}")
    code = main(argv)
    assert code == 0, f"step failed: {argv[0]}"

print("\nfirst lines of the dataset manifest:")
for line in (work / "dataset.jsonl").read_text().splitlines()[:4]:
    print(" ", json.dumps(json.loads(line), sort_keys=True))
print(f"\nmetrics report: {work / 'report.csv'}")
print((work / "report.csv").read_text().splitlines()[0])
