"""Training configurations for the GAN and the pose estimator."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class GanConfig:
    """Pix2pix-style training knobs.

    ``lambda_l1`` weights the L1 reconstruction term in the generator
    objective (reference default 100).  Desk-scale defaults keep runs CPU
    friendly: 64 px crops, 20 epochs, small channel counts.  The canonical
    reference run uses 100 epochs at full resolution.
    """

    lambda_l1: float = 100.0
    epochs: int = 20
    image_size: int = 64
    lr: float = 2e-4
    beta1: float = 0.5
    batch_size: int = 4
    base_channels: int = 32
    noise_dropout: float = 0.5
    seed: int = 42


@dataclass(frozen=True)
class PoseTrainConfig:
    """Pose-estimation training knobs.

    ``hybrid_ratio`` is the fraction of generated images in a mixed training
    set.  ``n_repeats`` runs with consecutive seeds are averaged when
    sweeping (reference protocol: 3).
    """

    backbone: str = "cnn3"
    epochs: int = 30
    image_size: int = 64
    lr: float = 1e-3
    batch_size: int = 16
    hybrid_ratio: float = 0.0
    n_repeats: int = 3
    seed: int = 42

    def __post_init__(self) -> None:
        if self.backbone not in ("cnn3", "resnet18", "vit"):
            raise ValueError(f"unknown backbone {self.backbone!r}")
        if not 0.0 <= self.hybrid_ratio <= 1.0:
            raise ValueError(f"hybrid_ratio must be in [0, 1], got {self.hybrid_ratio}")
        if self.epochs <= 0:
            raise ValueError(f"epochs must be positive, got {self.epochs}")
