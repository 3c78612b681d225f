"""Pix2pix-style training and inference on pair manifests.

The generator maps a rendered image (plus dropout noise) to its experimental
counterpart; a patch discriminator judges (input, candidate) pairs.  The
generator objective is the adversarial term plus lambda_l1 times the L1
distance to the target; both terms and their sum are logged per step so the
accounting can be audited.
"""

from __future__ import annotations

import csv
import dataclasses
import os
from pathlib import Path

import numpy as np
import torch
import torch.nn.functional as F
from PIL import Image
from torch.utils.data import DataLoader

from .config import GanConfig
from .data import (
    Entry,
    Pair,
    PairDataset,
    from_tensor,
    load_gray,
    read_pair_manifest,
    to_tensor,
    write_dataset_manifest,
    write_pair_manifest,
)
from .models import PatchDiscriminator, UNetGenerator


def _seed_everything(seed: int) -> None:
    torch.manual_seed(seed)
    np.random.seed(seed % 2**32)


def train_pix2pix(
    manifest_path: str | Path,
    config: GanConfig,
    out_dir: str | Path,
    root: str | Path | None = None,
) -> Path:
    """Train the generator on a pair manifest; returns the checkpoint path.

    Writes ``generator.pt`` (generator weights + config) and ``curves.csv``
    with per-step loss_adv, loss_l1_weighted, loss_g (their sum), and
    loss_d columns.
    """
    manifest_path = Path(manifest_path)
    header, pairs = read_pair_manifest(manifest_path)
    root = Path(root) if root is not None else manifest_path.parent
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    _seed_everything(config.seed)
    dataset = PairDataset(pairs, root, config.image_size)
    loader = DataLoader(dataset, batch_size=config.batch_size, shuffle=True,
                        generator=torch.Generator().manual_seed(config.seed),
                        num_workers=0)

    gen = UNetGenerator(base=config.base_channels, dropout=config.noise_dropout)
    disc = PatchDiscriminator(base=config.base_channels)
    opt_g = torch.optim.Adam(gen.parameters(), lr=config.lr,
                             betas=(config.beta1, 0.999))
    opt_d = torch.optim.Adam(disc.parameters(), lr=config.lr,
                             betas=(config.beta1, 0.999))
    bce = torch.nn.BCEWithLogitsLoss()

    curves_path = out_dir / "curves.csv"
    with curves_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "step", "loss_adv", "loss_l1_weighted",
                         "loss_g", "loss_d"])
        step = 0
        for epoch in range(config.epochs):
            for x, y in loader:
                # discriminator: real pairs up, generated pairs down
                with torch.no_grad():
                    fake = gen(x)
                logits_real = disc(x, y)
                logits_fake = disc(x, fake)
                loss_d = 0.5 * (bce(logits_real, torch.ones_like(logits_real))
                                + bce(logits_fake, torch.zeros_like(logits_fake)))
                opt_d.zero_grad()
                loss_d.backward()
                opt_d.step()

                # generator: fool the patch discriminator, stay close in L1
                fake = gen(x)
                logits = disc(x, fake)
                loss_adv = bce(logits, torch.ones_like(logits))
                loss_l1_weighted = config.lambda_l1 * F.l1_loss(fake, y)
                loss_g = loss_adv + loss_l1_weighted
                opt_g.zero_grad()
                loss_g.backward()
                opt_g.step()

                writer.writerow([epoch, step, loss_adv.item(),
                                 loss_l1_weighted.item(), loss_g.item(),
                                 loss_d.item()])
                step += 1

    checkpoint = out_dir / "generator.pt"
    torch.save({"generator": gen.state_dict(),
                "config": dataclasses.asdict(config),
                "manifest_header": header}, checkpoint)
    return checkpoint


def load_generator(checkpoint: str | Path) -> tuple[UNetGenerator, GanConfig]:
    blob = torch.load(checkpoint, map_location="cpu", weights_only=True)
    config = GanConfig(**blob["config"])
    gen = UNetGenerator(base=config.base_channels, dropout=config.noise_dropout)
    gen.load_state_dict(blob["generator"])
    gen.eval()
    return gen, config


def generate_images(
    checkpoint: str | Path,
    manifest_path: str | Path,
    out_dir: str | Path,
    root: str | Path | None = None,
    seed: int = 42,
) -> tuple[Path, Path]:
    """Run the generator over every rendered frame in a manifest.

    Outputs one PNG per input at the input's native dimensions, plus two
    manifests in ``out_dir``: ``generated_pairs.jsonl`` (pair schema with
    ``rendered`` pointing at the generated files) and
    ``generated_dataset.jsonl`` (entries with source=generated).  Dropout
    noise is active but seeded, so outputs are reproducible.
    """
    manifest_path = Path(manifest_path)
    header, pairs = read_pair_manifest(manifest_path)
    root = Path(root) if root is not None else manifest_path.parent
    out_dir = Path(out_dir)
    images_dir = out_dir / "images"
    images_dir.mkdir(parents=True, exist_ok=True)

    gen, _ = load_generator(checkpoint)
    _seed_everything(seed)
    new_pairs = []
    entries = []
    with torch.no_grad():
        for i, pair in enumerate(pairs):
            arr = load_gray(root / pair.rendered)  # native size
            out = from_tensor(gen(to_tensor(arr).unsqueeze(0))[0])
            assert out.shape == arr.shape
            name = f"gen_{i:05d}.png"
            Image.fromarray((out * 255.0).round().astype(np.uint8)).save(
                images_dir / name, format="PNG")
            rel = str(Path("images") / name)
            # keep every path resolvable against out_dir, experimental included
            exp_rel = os.path.relpath(root / pair.experimental, out_dir)
            new_pairs.append(Pair(rendered=rel, experimental=exp_rel,
                                  bin=pair.bin, pose=pair.pose,
                                  norm_depth=pair.norm_depth))
            entries.append(Entry(image=rel, pose=pair.pose, bin=pair.bin,
                                 source="generated"))
    pairs_path = out_dir / "generated_pairs.jsonl"
    dataset_path = out_dir / "generated_dataset.jsonl"
    write_pair_manifest({**header, "generator_seed": seed}, new_pairs, pairs_path)
    write_dataset_manifest({"seed": seed, "fractions": [1.0, 0.0, 0.0]}, entries,
                           dataset_path)
    return pairs_path, dataset_path


def heldout_l1(
    checkpoint: str | Path,
    pairs: list[Pair],
    root: str | Path,
    image_size: int,
    seed: int = 42,
) -> tuple[float, float]:
    """Mean L1 of (generated, target) vs the identity baseline (input, target)."""
    gen, _ = load_generator(checkpoint)
    _seed_everything(seed)
    gen_l1, id_l1 = [], []
    with torch.no_grad():
        for pair in pairs:
            x = load_gray(Path(root) / pair.rendered, image_size)
            y = load_gray(Path(root) / pair.experimental, image_size)
            out = from_tensor(gen(to_tensor(x).unsqueeze(0))[0])
            gen_l1.append(float(np.mean(np.abs(out - y))))
            id_l1.append(float(np.mean(np.abs(x - y))))
    return float(np.mean(gen_l1)), float(np.mean(id_l1))
