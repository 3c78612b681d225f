"""Trainer CLI: train-gan, generate, train-pose, hybrid, holdout."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import GanConfig, PoseTrainConfig
from .data import read_dataset_manifest, read_pair_manifest
from .gan import generate_images, train_pix2pix
from .pose import run_hybrid_sweep, run_pose_holdout, train_pose_estimator


def _gan_config(args) -> GanConfig:
    return GanConfig(lambda_l1=args.lambda_l1, epochs=args.epochs,
                     image_size=args.image_size, batch_size=args.batch_size,
                     seed=args.seed)


def _pose_config(args) -> PoseTrainConfig:
    return PoseTrainConfig(backbone=args.backbone, epochs=args.epochs,
                           image_size=args.image_size, seed=args.seed,
                           n_repeats=args.repeats)


def cmd_train_gan(args) -> int:
    checkpoint = train_pix2pix(args.manifest, _gan_config(args), args.out,
                               root=args.root)
    print(f"checkpoint: {checkpoint}")
    return 0


def cmd_generate(args) -> int:
    pairs_path, dataset_path = generate_images(args.checkpoint, args.manifest,
                                               args.out, root=args.root,
                                               seed=args.seed)
    print(f"pairs manifest: {pairs_path}")
    print(f"dataset manifest: {dataset_path}")
    return 0


def _split_entries(manifest_path: str):
    entries = read_dataset_manifest(manifest_path)
    train = [e for e in entries if e.split in ("", "train")]
    test = [e for e in entries if e.split == "test"]
    if not test:  # unsplit manifests evaluate on their own experimental frames
        test = [e for e in entries if e.source == "experimental"]
    return train, test


def cmd_train_pose(args) -> int:
    train, test = _split_entries(args.manifest)
    _, report = train_pose_estimator(train, test, _pose_config(args),
                                     root=args.root or Path(args.manifest).parent,
                                     out_dir=args.out)
    print(json.dumps(report, indent=2))
    return 0


def cmd_hybrid(args) -> int:
    exp_train, test = _split_entries(args.manifest)
    exp_train = [e for e in exp_train if e.source == "experimental"]
    gen_entries = [e for e in read_dataset_manifest(args.generated)
                   if e.source == "generated"]
    ratios = [float(r) for r in args.ratio.split(",")]
    results = run_hybrid_sweep(exp_train, gen_entries, test, ratios,
                               _pose_config(args),
                               root=args.root or Path(args.manifest).parent,
                               out_path=Path(args.out) / "hybrid_results.json")
    for ratio, res in results.items():
        print(f"ratio {ratio}: pitch={res['pitch_accuracy']:.3f} "
              f"roll={res['roll_accuracy']:.3f}")
    return 0


def cmd_holdout(args) -> int:
    _, pairs = read_pair_manifest(args.manifest)
    set_a = [line.strip() for line in Path(args.split_file).read_text().splitlines()
             if line.strip() and not line.startswith("#")]
    _, test = _split_entries(args.test_manifest)
    report = run_pose_holdout(pairs, set_a, test, _gan_config(args),
                              PoseTrainConfig(epochs=args.pose_epochs,
                                              image_size=args.image_size,
                                              seed=args.seed, n_repeats=1),
                              root=args.root or Path(args.manifest).parent,
                              work_dir=args.out)
    print(json.dumps(report, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sim2real",
                                     description="sim-to-real GAN and pose trainer")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--manifest", required=True)
        p.add_argument("--root", help="base directory for manifest paths")
        p.add_argument("--out", required=True)
        p.add_argument("--seed", type=int, default=42)
        p.add_argument("--image-size", dest="image_size", type=int, default=64)
        p.add_argument("--epochs", type=int, default=20)

    p = sub.add_parser("train-gan", help="train the sim-to-real generator")
    add_common(p)
    p.add_argument("--lambda", dest="lambda_l1", type=float, default=100.0)
    p.add_argument("--batch-size", dest="batch_size", type=int, default=4)
    p.set_defaults(func=cmd_train_gan)

    p = sub.add_parser("generate", help="refine rendered frames with a checkpoint")
    add_common(p)
    p.add_argument("--checkpoint", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("train-pose", help="train the pose estimator")
    add_common(p)
    p.add_argument("--backbone", default="cnn3",
                   choices=("cnn3", "resnet18", "vit"))
    p.add_argument("--repeats", type=int, default=1)
    p.set_defaults(func=cmd_train_pose)

    p = sub.add_parser("hybrid", help="sweep experimental/generated mix ratios")
    add_common(p)
    p.add_argument("--generated", required=True,
                   help="dataset manifest of generated frames")
    p.add_argument("--ratio", default="0,0.25,0.5,0.75,1.0")
    p.add_argument("--backbone", default="cnn3",
                   choices=("cnn3", "resnet18", "vit"))
    p.add_argument("--repeats", type=int, default=3)
    p.set_defaults(func=cmd_hybrid)

    p = sub.add_parser("holdout", help="pose-holdout generalisability experiment")
    add_common(p)
    p.add_argument("--split-file", dest="split_file", required=True,
                   help="file listing Set A poses, one per line")
    p.add_argument("--test-manifest", dest="test_manifest", required=True)
    p.add_argument("--lambda", dest="lambda_l1", type=float, default=100.0)
    p.add_argument("--batch-size", dest="batch_size", type=int, default=4)
    p.add_argument("--pose-epochs", dest="pose_epochs", type=int, default=10)
    p.set_defaults(func=cmd_holdout)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
