"""Pose-estimation training, hybrid-ratio sweeps, and pose-holdout experiments.

Reported metrics (accuracy, macro precision/recall/F1 per axis) are always
computed on experimental frames; generated or rendered frames never enter an
evaluation set.
"""

from __future__ import annotations

import dataclasses
import json
import math
from pathlib import Path

import numpy as np
import torch
import torch.nn.functional as F
from torch.utils.data import DataLoader

from .config import GanConfig, PoseTrainConfig
from .data import Entry, Pair, PoseDataset, parse_pose_angles, pose_classes
from .models import build_pose_model


def _seed_everything(seed: int) -> None:
    torch.manual_seed(seed)
    np.random.seed(seed % 2**32)


def _macro_prf(true: np.ndarray, pred: np.ndarray, n_classes: int):
    precisions, recalls, f1s = [], [], []
    for c in range(n_classes):
        tp = int(np.sum((pred == c) & (true == c)))
        fp = int(np.sum((pred == c) & (true != c)))
        fn = int(np.sum((pred != c) & (true == c)))
        p = tp / (tp + fp) if tp + fp else 0.0
        r = tp / (tp + fn) if tp + fn else 0.0
        f = 2 * p * r / (p + r) if p + r else 0.0
        precisions.append(p)
        recalls.append(r)
        f1s.append(f)
    return float(np.mean(precisions)), float(np.mean(recalls)), float(np.mean(f1s))


def _axis_report(true: np.ndarray, pred: np.ndarray, n_classes: int) -> dict:
    acc = float(np.mean(true == pred)) if true.size else 0.0
    p, r, f = _macro_prf(true, pred, n_classes)
    return {"accuracy": acc, "precision": p, "recall": r, "f1": f}


def evaluate_pose_model(model, entries: list[Entry], root: str | Path,
                        pitch_classes: list[int], roll_classes: list[int],
                        image_size: int, batch_size: int = 32) -> dict:
    """Per-axis and combined metrics on experimental frames only."""
    test_entries = [e for e in entries if e.source == "experimental"]
    if not test_entries:
        raise ValueError("evaluation set has no experimental frames")
    ds = PoseDataset(test_entries, root, pitch_classes, roll_classes, image_size)
    loader = DataLoader(ds, batch_size=batch_size, shuffle=False)
    model.eval()
    true_p, true_r, pred_p, pred_r = [], [], [], []
    with torch.no_grad():
        for x, p, r in loader:
            lp, lr = model(x)
            true_p.append(p.numpy())
            true_r.append(r.numpy())
            pred_p.append(lp.argmax(dim=1).numpy())
            pred_r.append(lr.argmax(dim=1).numpy())
    true_p = np.concatenate(true_p)
    true_r = np.concatenate(true_r)
    pred_p = np.concatenate(pred_p)
    pred_r = np.concatenate(pred_r)
    return {
        "n_test": int(true_p.size),
        "pitch": _axis_report(true_p, pred_p, len(pitch_classes)),
        "roll": _axis_report(true_r, pred_r, len(roll_classes)),
        "combined_accuracy": float(np.mean((true_p == pred_p) & (true_r == pred_r))),
    }


def train_pose_estimator(
    train_entries: list[Entry],
    test_entries: list[Entry],
    config: PoseTrainConfig,
    root: str | Path,
    out_dir: str | Path | None = None,
):
    """Train the two-headed classifier; returns (model, report).

    Class vocabularies come from the union of train and test entries so the
    heads cover every pose either side mentions.  Needs at least two classes
    on each predicted axis.
    """
    all_entries = list(train_entries) + list(test_entries)
    pitches, rolls = pose_classes(all_entries)
    if len(pitches) < 2 and len(rolls) < 2:
        raise ValueError("need at least 2 classes on pitch or roll axis")
    _seed_everything(config.seed)
    model = build_pose_model(config.backbone, len(pitches), len(rolls),
                             config.image_size)
    ds = PoseDataset(train_entries, root, pitches, rolls, config.image_size)
    loader = DataLoader(ds, batch_size=config.batch_size, shuffle=True,
                        generator=torch.Generator().manual_seed(config.seed))
    opt = torch.optim.Adam(model.parameters(), lr=config.lr)
    model.train()
    for _ in range(config.epochs):
        for x, p, r in loader:
            logits_p, logits_r = model(x)
            loss = F.cross_entropy(logits_p, p) + F.cross_entropy(logits_r, r)
            opt.zero_grad()
            loss.backward()
            opt.step()
    report = evaluate_pose_model(model, test_entries, root, pitches, rolls,
                                 config.image_size)
    report["backbone"] = config.backbone
    report["seed"] = config.seed
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        torch.save({"model": model.state_dict(),
                    "pitch_classes": pitches, "roll_classes": rolls,
                    "config": dataclasses.asdict(config)},
                   out_dir / "pose_model.pt")
        (out_dir / "report.json").write_text(json.dumps(report, indent=2) + "\n")
    return model, report


def build_hybrid_training_set(
    exp_entries: list[Entry],
    gen_entries: list[Entry],
    ratio: float,
    seed: int,
) -> list[Entry]:
    """Mix floor(ratio*N) generated with N - floor(ratio*N) experimental entries.

    N is the experimental training-set size.  Subsampling is seeded; a side
    that is used whole is passed through untouched (so ratio 0 reproduces the
    pure-experimental set exactly, ordering included).
    """
    n = len(exp_entries)
    k = math.floor(ratio * n)
    if k > len(gen_entries):
        raise ValueError(f"ratio {ratio} needs {k} generated entries, "
                         f"have {len(gen_entries)}")
    rng = np.random.default_rng(seed)
    if k == 0:
        return list(exp_entries)
    gen_part = [gen_entries[i] for i in
                np.sort(rng.choice(len(gen_entries), size=k, replace=False))]
    exp_part = [exp_entries[i] for i in
                np.sort(rng.choice(n, size=n - k, replace=False))]
    return exp_part + gen_part


def run_hybrid_sweep(
    exp_entries: list[Entry],
    gen_entries: list[Entry],
    test_entries: list[Entry],
    ratios: list[float],
    config: PoseTrainConfig,
    root: str | Path,
    out_path: str | Path | None = None,
) -> dict:
    """Train at each mix ratio, averaging reports over n_repeats seeds."""
    results = {}
    for ratio in ratios:
        runs = []
        for rep in range(config.n_repeats):
            seed = config.seed + rep
            mixed = build_hybrid_training_set(exp_entries, gen_entries, ratio, seed)
            cfg = dataclasses.replace(config, seed=seed, hybrid_ratio=ratio)
            _, report = train_pose_estimator(mixed, test_entries, cfg, root)
            runs.append(report)
        results[str(ratio)] = {
            "n_train": len(exp_entries),
            "n_generated": math.floor(ratio * len(exp_entries)),
            "pitch_accuracy": float(np.mean([r["pitch"]["accuracy"] for r in runs])),
            "roll_accuracy": float(np.mean([r["roll"]["accuracy"] for r in runs])),
            "combined_accuracy": float(np.mean([r["combined_accuracy"] for r in runs])),
            "runs": runs,
        }
    if out_path is not None:
        Path(out_path).write_text(json.dumps(results, indent=2) + "\n")
    return results


def run_pose_holdout(
    pairs: list[Pair],
    set_a: list[str],
    test_entries: list[Entry],
    gan_config: GanConfig,
    pose_config: PoseTrainConfig,
    root: str | Path,
    work_dir: str | Path,
) -> dict:
    """Generator trained without Set A poses, estimator trained on its output.

    Trains the GAN on Set B pairs only, generates for all poses, trains the
    pose estimator on the generated frames, and reports metrics separately on
    the experimental test frames of Set A (unseen by the GAN) and Set B.
    """
    from .data import write_pair_manifest
    from .gan import generate_images, train_pix2pix

    work_dir = Path(work_dir)
    work_dir.mkdir(parents=True, exist_ok=True)
    set_a = list(set_a)
    set_b_pairs = [p for p in pairs if p.pose not in set_a]
    if not set_b_pairs:
        raise ValueError("Set B has no training pairs")

    header = {"seed": gan_config.seed, "n_bins": 0, "sigma": 0.0}
    holdout_manifest = work_dir / "set_b_pairs.jsonl"
    write_pair_manifest(header, set_b_pairs, holdout_manifest)
    checkpoint = train_pix2pix(holdout_manifest, gan_config,
                               work_dir / "gan", root=root)

    all_manifest = work_dir / "all_pairs.jsonl"
    write_pair_manifest(header, pairs, all_manifest)
    _, gen_dataset = generate_images(checkpoint, all_manifest,
                                     work_dir / "generated", root=root,
                                     seed=gan_config.seed)
    from .data import read_dataset_manifest

    # train the estimator purely on generated frames; absolute paths let the
    # generated and experimental sets share one training run
    gen_root = Path(gen_dataset).parent
    gen_entries = [dataclasses.replace(e, image=str((gen_root / e.image).resolve()))
                   for e in read_dataset_manifest(gen_dataset)]
    test_abs = [dataclasses.replace(e, image=str((Path(root) / e.image).resolve()))
                for e in test_entries]
    model, _ = train_pose_estimator(gen_entries, test_abs, pose_config, root=".")
    pitches, rolls = pose_classes(gen_entries + test_abs)
    report = {}
    for name, poses in (("set_a", set(set_a)),
                        ("set_b", {p.pose for p in set_b_pairs})):
        subset = [e for e in test_abs if e.pose in poses]
        if subset:
            report[name] = evaluate_pose_model(
                model, subset, ".", pitches, rolls, pose_config.image_size)
    (work_dir / "holdout_report.json").write_text(json.dumps(report, indent=2) + "\n")
    return report
