"""Command-line entry point: render, segment, align, metrics, dataset, bench.

All randomness flows from ``--seed``.  Frame ordering inside directories is
the natural sort of filenames, which alignment depends on.  The env var
``MICROSIM_LOG`` selects the log level (DEBUG/INFO/WARNING/...).
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import statistics
import sys
import time
from pathlib import Path

import numpy as np

from . import align as align_mod
from . import dataset as dataset_mod
from . import metrics as metrics_mod
from .config import OpticalConfig, load_optical_config
from .imageio import list_frames, load_depth, load_image, save_image_u8
from .render import RenderOptions, render_frame
from .segment import segment_foreground

log = logging.getLogger("microsim")

DEPTH_SUFFIXES = (".tif", ".tiff", ".png")


def _setup_logging() -> None:
    level = os.environ.get("MICROSIM_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _load_config(args) -> OpticalConfig:
    if args.config:
        return load_optical_config(args.config)
    return OpticalConfig()


def _render_options(args, crop: bool = False) -> RenderOptions:
    return RenderOptions(
        n_layers=args.layers,
        z_min=args.zmin,
        z_max=args.zmax,
        pixel_pitch=args.pixel_pitch,
        aberration=not args.no_aberration,
        coherent=args.coherent,
        crop=crop,
        margin=args.margin,
        k=args.k,
        threads=args.threads,
    )


def _frame_inputs(image_path: Path, depth_path: Path) -> list[tuple[str, Path, Path]]:
    """Resolve (name, image file, depth file) tuples for file or directory inputs."""
    if image_path.is_file():
        return [(image_path.stem, image_path, depth_path)]
    pairs = []
    for img in list_frames(image_path):
        match = None
        for suffix in DEPTH_SUFFIXES:
            cand = depth_path / (img.stem + suffix)
            if cand.exists():
                match = cand
                break
        if match is None:
            raise FileNotFoundError(f"no depth map for {img.name} under {depth_path}")
        pairs.append((img.stem, img, match))
    if not pairs:
        raise FileNotFoundError(f"no frames found in {image_path}")
    return pairs


def cmd_render(args) -> int:
    config = _load_config(args)
    opts = _render_options(args, crop=args.crop)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    status = 0
    try:
        frames = _frame_inputs(Path(args.image), Path(args.depth))
    except (OSError, ValueError) as exc:
        log.error("%s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for name, img_path, dep_path in frames:
        try:
            image = load_image(img_path)
            depth = load_depth(dep_path, min_depth=opts.z_min, max_depth=opts.z_max)
            frame = render_frame(image, depth, config, opts)
            save_image_u8(frame.intensity, out_dir / f"{name}.png")
            meta = {
                "frame": name,
                "timing": frame.timing,
                "parseval_error": frame.parseval_error,
                "bbox": list(frame.bbox) if frame.bbox else None,
                "options": {
                    "n_layers": opts.n_layers, "z_min": opts.z_min,
                    "z_max": opts.z_max, "pixel_pitch": opts.pixel_pitch,
                    "aberration": opts.aberration, "coherent": opts.coherent,
                    "crop": opts.crop, "margin": opts.margin, "k": opts.k,
                },
            }
            (out_dir / f"{name}.json").write_text(json.dumps(meta, indent=2) + "\n")
            log.info("rendered %s in %.3fs", name, frame.timing)
        except Exception as exc:
            log.error("frame %s (%s): %s", name, img_path, exc)
            print(f"error: frame {name} ({img_path}): {exc}", file=sys.stderr)
            status = 1
    return status


def cmd_segment(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    depth_path = Path(args.depth)
    files = [depth_path] if depth_path.is_file() else list_frames(depth_path, DEPTH_SUFFIXES)
    status = 0
    for dep in files:
        try:
            depth = load_depth(dep, min_depth=args.zmin, max_depth=args.zmax)
            seg = segment_foreground(depth, k=args.k, margin=args.margin, seed=args.seed)
            meta = {
                "frame": dep.stem,
                "bbox": list(seg.bbox),
                "foreground_id": seg.foreground_id,
                "centroids": [float(c) for c in seg.centroids],
                "k": args.k,
                "margin": args.margin,
            }
            (out_dir / f"{dep.stem}.json").write_text(json.dumps(meta, indent=2) + "\n")
        except Exception as exc:
            print(f"error: {dep}: {exc}", file=sys.stderr)
            status = 1
    return status


def _series_from_dir(directory: Path, sigma: float) -> align_mod.FocusSeries:
    frames = list_frames(directory)
    if not frames:
        raise FileNotFoundError(f"no PNG frames in {directory}")
    images = [load_image(p) for p in frames]
    return align_mod.make_focus_series(images, names=[str(p) for p in frames],
                                       sigma=sigma)


def cmd_align(args) -> int:
    try:
        sim = _series_from_dir(Path(args.rendered), args.sigma)
        exp = _series_from_dir(Path(args.experimental), args.sigma)
        balanced = align_mod.segment_and_balance(sim, exp, n_bins=args.bins,
                                                 seed=args.seed, sigma=args.sigma)
        manifest = align_mod.build_pairs(balanced, pose_label=args.pose)
        align_mod.write_pair_manifest(manifest, args.out)
    except Exception as exc:
        log.error("%s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {len(manifest.pairs)} pairs across {len(manifest.counts)} bins "
          f"to {args.out}")
    return 0


def _metric_rows(manifest: align_mod.PairManifest, root: Path, max_value: float):
    for i, pair in enumerate(manifest.pairs):
        a = load_image(root / pair.rendered)
        b = load_image(root / pair.experimental)
        report = metrics_mod.evaluate_pair(a, b, max_value)
        yield (i, pair.pose, pair.bin, report)


def cmd_metrics(args) -> int:
    try:
        if args.manifest:
            manifest = align_mod.read_pair_manifest(args.manifest)
            root = Path(args.root) if args.root else Path(args.manifest).parent
        else:
            if not (args.rendered and args.experimental):
                raise ValueError("need --manifest or two directories")
            a_dir, b_dir = Path(args.rendered), Path(args.experimental)
            a_frames = list_frames(a_dir)
            b_frames = list_frames(b_dir)
            if len(a_frames) != len(b_frames):
                raise ValueError(
                    f"directories differ in frame count: {len(a_frames)} vs {len(b_frames)}"
                )
            pairs = tuple(
                align_mod.PairRecord(rendered=str(a), experimental=str(b), bin=0,
                                     pose="", norm_depth=0.0)
                for a, b in zip(a_frames, b_frames)
            )
            manifest = align_mod.PairManifest(pairs=pairs, seed=args.seed, n_bins=1,
                                              sigma=args.sigma,
                                              counts={0: len(pairs)})
            root = Path(".")
        rows = list(_metric_rows(manifest, root, args.max_value))
    except Exception as exc:
        log.error("%s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return 1

    out = Path(args.out)
    with out.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["pair_id", "pose", "bin", "mse", "psnr", "ssim"])
        for i, pose, b, rep in rows:
            writer.writerow([i, pose, b, repr(rep.mse), repr(rep.psnr), repr(rep.ssim)])
    mean_mse = float(np.mean([r.mse for *_, r in rows]))
    finite_psnr = [r.psnr for *_, r in rows if np.isfinite(r.psnr)]
    mean_psnr = float(np.mean(finite_psnr)) if finite_psnr else float("inf")
    mean_ssim = float(np.mean([r.ssim for *_, r in rows]))
    print(f"pairs={len(rows)} mean_mse={mean_mse:.6g} "
          f"mean_psnr={mean_psnr:.6g} mean_ssim={mean_ssim:.6g}")

    if args.grid:
        poses = sorted({pose for _, pose, _, _ in rows})
        bins = sorted({b for _, _, b, _ in rows})
        for metric in ("mse", "psnr", "ssim"):
            grid_path = out.with_name(out.stem + f"_grid_{metric}.csv")
            with grid_path.open("w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["bin"] + poses)
                for b in bins:
                    row = [b]
                    for pose in poses:
                        vals = [getattr(r, metric) for _, p, bb, r in rows
                                if p == pose and bb == b and np.isfinite(getattr(r, metric))]
                        row.append(repr(float(np.mean(vals))) if vals else "")
                    writer.writerow(row)
    return 0


def cmd_dataset(args) -> int:
    try:
        class_set = (dataset_mod.load_class_set(args.classes)
                     if args.classes else dataset_mod.default_class_set())
        pair_manifest = align_mod.read_pair_manifest(args.manifest)
        entries = []
        for p in pair_manifest.pairs:
            if p.pose:
                dataset_mod.parse_pose(p.pose, class_set)
            entries.append(dataset_mod.ManifestEntry(
                image=p.rendered, pose=p.pose, bin=p.bin, source="rendered"))
            entries.append(dataset_mod.ManifestEntry(
                image=p.experimental, pose=p.pose, bin=p.bin, source="experimental"))
        fractions = tuple(float(x) for x in args.fractions.split(","))
        if len(fractions) != 3:
            raise ValueError(f"--fractions needs three values, got {args.fractions!r}")
        manifest = dataset_mod.split_manifest(entries, fractions, seed=args.seed)
        dataset_mod.write_dataset_manifest(manifest, args.out)
    except Exception as exc:
        log.error("%s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return 1
    n = len(manifest.entries)
    counts = {s: sum(1 for e in manifest.entries if e.split == s)
              for s in ("train", "val", "test")}
    print(f"wrote {n} entries to {args.out} (splits: {counts})")
    return 0


def cmd_bench(args) -> int:
    config = _load_config(args)
    opts = _render_options(args, crop=not args.no_crop)
    try:
        image = load_image(args.image)
        depth = load_depth(args.depth, min_depth=opts.z_min, max_depth=opts.z_max)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    timings = []
    for _ in range(args.reps):
        t0 = time.perf_counter()
        render_frame(image, depth, config, opts)
        timings.append(time.perf_counter() - t0)
    mean_t = statistics.mean(timings)
    median_t = statistics.median(timings)
    print(f"frames={args.reps} size={image.shape[1]}x{image.shape[0]} "
          f"layers={opts.n_layers} crop={opts.crop} "
          f"mean={mean_t:.4f}s median={median_t:.4f}s "
          f"min={min(timings):.4f}s max={max(timings):.4f}s")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="microsim",
        description="Wave-optics microscope image simulator and dataset toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="OpticalConfig key=value file")
        p.add_argument("--seed", type=int, default=42)
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--layers", type=int, default=40)
        p.add_argument("--zmin", type=float, default=-10e-6)
        p.add_argument("--zmax", type=float, default=10e-6)
        p.add_argument("--pixel-pitch", dest="pixel_pitch", type=float, default=0.1e-6)
        p.add_argument("--no-aberration", action="store_true")
        p.add_argument("--coherent", action="store_true")
        p.add_argument("--sigma", type=float, default=2.0)
        p.add_argument("--bins", type=int, default=40)
        p.add_argument("--margin", type=int, default=8)
        p.add_argument("--k", type=int, default=2)

    p = sub.add_parser("render", help="render defocused frames from images + depth maps")
    p.add_argument("image", help="object image file or directory of PNGs")
    p.add_argument("depth", help="depth map file or directory")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--crop", action="store_true",
                   help="segment the foreground and render only its window")
    add_common(p)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("segment", help="segment foregrounds and emit crop windows")
    p.add_argument("depth", help="depth map file or directory")
    p.add_argument("--out", required=True)
    add_common(p)
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("align", help="pair rendered and experimental series by focus")
    p.add_argument("rendered", help="directory of rendered PNG frames")
    p.add_argument("experimental", help="directory of experimental PNG frames")
    p.add_argument("--out", required=True, help="pair manifest JSONL path")
    p.add_argument("--pose", default="", help="pose label recorded on every pair")
    add_common(p)
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("metrics", help="score image pairs with MSE/PSNR/SSIM")
    p.add_argument("rendered", nargs="?", help="directory A (when no manifest)")
    p.add_argument("experimental", nargs="?", help="directory B (when no manifest)")
    p.add_argument("--manifest", help="pair manifest JSONL")
    p.add_argument("--root", help="base directory for manifest paths")
    p.add_argument("--out", required=True, help="CSV report path")
    p.add_argument("--grid", action="store_true",
                   help="also write pose x depth-bin aggregate grids")
    p.add_argument("--max-value", dest="max_value", type=float, default=1.0,
                   help="PSNR peak value (1.0 after normalization, 255 for raw 8-bit)")
    add_common(p)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("dataset", help="build a split dataset manifest from pairs")
    p.add_argument("--manifest", required=True, help="pair manifest JSONL")
    p.add_argument("--out", required=True, help="dataset manifest JSONL")
    p.add_argument("--fractions", default="0.70,0.15,0.15")
    p.add_argument("--classes", help="class-set file, one pose label per line")
    add_common(p)
    p.set_defaults(func=cmd_dataset)

    p = sub.add_parser("bench", help="time the render pipeline")
    p.add_argument("image")
    p.add_argument("depth")
    p.add_argument("--reps", type=int, default=20)
    p.add_argument("--no-crop", action="store_true",
                   help="time full-frame rendering instead of the cropped pipeline")
    add_common(p)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
