"""Pose-holdout experiment at tiny scale: generator never sees Set A."""

from conftest import build_pose_set, save_png, toy_object

import numpy as np

from sim2real.config import GanConfig, PoseTrainConfig
from sim2real.data import Pair
from sim2real.pose import run_pose_holdout

POSES = ["P0_R0", "P10_R20", "P20_R40", "P30_R60"]


def test_holdout_reports_both_sets(tmp_path):
    rng = np.random.default_rng(0)
    (tmp_path / "x").mkdir()
    (tmp_path / "y").mkdir()
    pairs = []
    for pose in POSES:
        for i in range(4):
            x = toy_object(rng, size=32)
            y = (0.7 * x + 0.2).clip(0, 1)
            save_png(x, tmp_path / "x" / f"{pose}_{i}.png")
            save_png(y, tmp_path / "y" / f"{pose}_{i}.png")
            pairs.append(Pair(rendered=f"x/{pose}_{i}.png",
                              experimental=f"y/{pose}_{i}.png",
                              bin=0, pose=pose, norm_depth=0.0))
    test_entries = build_pose_set(tmp_path, POSES, 3, "experimental", "test",
                                  5, "testset")
    set_a = [POSES[0]]
    gan_cfg = GanConfig(epochs=1, image_size=32, batch_size=4, base_channels=8,
                        seed=1)
    pose_cfg = PoseTrainConfig(epochs=2, image_size=64, batch_size=8, seed=2,
                               n_repeats=1)
    report = run_pose_holdout(pairs, set_a, test_entries, gan_cfg, pose_cfg,
                              root=tmp_path, work_dir=tmp_path / "work")
    assert "set_a" in report and "set_b" in report
    assert report["set_a"]["n_test"] == 3
    assert report["set_b"]["n_test"] == 9
    # the generator trained only on Set B pairs, yet generated all poses
    gen_images = list((tmp_path / "work" / "generated" / "images").glob("*.png"))
    assert len(gen_images) == len(pairs)
