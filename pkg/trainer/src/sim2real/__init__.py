"""sim2real: GAN refinement and pose-estimation training on microsim manifests."""

from .config import GanConfig, PoseTrainConfig
from .data import (
    Entry,
    Pair,
    PairDataset,
    PoseDataset,
    read_dataset_manifest,
    read_pair_manifest,
    write_dataset_manifest,
    write_pair_manifest,
)
from .gan import generate_images, heldout_l1, load_generator, train_pix2pix
from .models import PatchDiscriminator, PoseCNN, TinyViT, UNetGenerator, build_pose_model
from .pose import (
    build_hybrid_training_set,
    evaluate_pose_model,
    run_hybrid_sweep,
    run_pose_holdout,
    train_pose_estimator,
)

__version__ = "0.1.0"
