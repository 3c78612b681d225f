"""End-to-end subcommand tests on small synthetic scenes."""

import json

import numpy as np
import pytest

from microsim.cli import main
from microsim.imageio import save_depth_tiff, save_image_u8


@pytest.fixture()
def scene(tmp_path):
    """A small blob object over a flat background, with a depth sweep."""
    rng = np.random.default_rng(0)
    img_dir = tmp_path / "images"
    dep_dir = tmp_path / "depths"
    img_dir.mkdir()
    dep_dir.mkdir()
    yy, xx = np.mgrid[0:64, 0:64]
    blob = ((yy - 32) ** 2 + (xx - 32) ** 2 < 12**2).astype(float)
    for i, z in enumerate(np.linspace(-8e-6, 8e-6, 5)):
        img = blob * (0.6 + 0.05 * i) + 0.05 * rng.random((64, 64))
        depth = np.where(blob > 0, z, 0.0)
        save_image_u8(img, img_dir / f"frame{i}.png")
        save_depth_tiff(depth, dep_dir / f"frame{i}.tif")
    return tmp_path, img_dir, dep_dir


def run(argv):
    return main([str(a) for a in argv])


class TestRenderCommand:
    def test_single_frame(self, scene, tmp_path):
        root, img_dir, dep_dir = scene
        out = tmp_path / "out_single"
        code = run(["render", img_dir / "frame0.png", dep_dir / "frame0.tif",
                    "--out", out, "--layers", "8"])
        assert code == 0
        assert (out / "frame0.png").exists()
        meta = json.loads((out / "frame0.json").read_text())
        assert meta["parseval_error"] < 1e-9
        assert meta["timing"] > 0

    def test_directory_batch(self, scene, tmp_path):
        root, img_dir, dep_dir = scene
        out = tmp_path / "out_batch"
        code = run(["render", img_dir, dep_dir, "--out", out, "--layers", "8"])
        assert code == 0
        assert len(list(out.glob("*.png"))) == 5
        assert len(list(out.glob("*.json"))) == 5

    def test_missing_depth_is_error(self, scene, tmp_path):
        root, img_dir, dep_dir = scene
        (dep_dir / "frame3.tif").unlink()
        out = tmp_path / "out_missing"
        code = run(["render", img_dir, dep_dir, "--out", out])
        assert code != 0

    def test_idempotent_outputs(self, scene, tmp_path):
        root, img_dir, dep_dir = scene
        out1 = tmp_path / "rep1"
        out2 = tmp_path / "rep2"
        for out in (out1, out2):
            assert run(["render", img_dir / "frame1.png", dep_dir / "frame1.tif",
                        "--out", out, "--layers", "8", "--threads", "2"]) == 0
        assert (out1 / "frame1.png").read_bytes() == (out2 / "frame1.png").read_bytes()


class TestSegmentCommand:
    def test_emits_bbox_metadata(self, scene, tmp_path):
        root, img_dir, dep_dir = scene
        out = tmp_path / "seg"
        code = run(["segment", dep_dir / "frame4.tif", "--out", out, "--margin", "4"])
        assert code == 0
        meta = json.loads((out / "frame4.json").read_text())
        x, y, w, h = meta["bbox"]
        assert w > 0 and h > 0
        assert meta["k"] == 2


class TestAlignCommand:
    @pytest.fixture()
    def sweeps(self, tmp_path):
        from scipy.ndimage import gaussian_filter

        base = np.zeros((48, 48))
        base[:, 24:] = 1.0
        for name, peak in (("rendered", 10), ("experimental", 12)):
            d = tmp_path / name
            d.mkdir()
            for i in range(20):
                img = gaussian_filter(base, 0.5 + 0.4 * abs(i - peak))
                save_image_u8(img, d / f"f{i:03d}.png")
        return tmp_path

    def test_manifest_and_determinism(self, sweeps, tmp_path):
        m1 = tmp_path / "pairs1.jsonl"
        m2 = tmp_path / "pairs2.jsonl"
        for m in (m1, m2):
            code = run(["align", sweeps / "rendered", sweeps / "experimental",
                        "--out", m, "--bins", "10", "--seed", "3",
                        "--pose", "P0_R20"])
            assert code == 0
        assert m1.read_bytes() == m2.read_bytes()
        lines = m1.read_text().splitlines()
        header = json.loads(lines[0])
        assert header["seed"] == 3 and header["n_bins"] == 10
        assert len(lines) > 1

    def test_empty_directory_fails(self, tmp_path):
        empty = tmp_path / "empty"
        empty.mkdir()
        code = run(["align", empty, empty, "--out", tmp_path / "m.jsonl"])
        assert code != 0


class TestMetricsCommand:
    def test_self_pairs_are_perfect(self, scene, tmp_path):
        root, img_dir, dep_dir = scene
        manifest = tmp_path / "self.jsonl"
        lines = [json.dumps({"seed": 0, "n_bins": 1, "sigma": 2.0})]
        for i in range(3):
            lines.append(json.dumps({
                "rendered": f"images/frame{i}.png",
                "experimental": f"images/frame{i}.png",
                "bin": 0, "pose": "P0_R0", "norm_depth": 0.0}))
        manifest.write_text("\n".join(lines) + "\n")
        out = tmp_path / "report.csv"
        code = run(["metrics", "--manifest", manifest, "--root", root, "--out", out])
        assert code == 0
        rows = out.read_text().splitlines()
        assert rows[0] == "pair_id,pose,bin,mse,psnr,ssim"
        assert len(rows) == 4
        for row in rows[1:]:
            cells = row.split(",")
            assert float(cells[3]) == 0.0
            assert cells[4] == "inf"
            assert float(cells[5]) == pytest.approx(1.0)

    def test_directory_mode_and_grid(self, scene, tmp_path):
        root, img_dir, dep_dir = scene
        out = tmp_path / "report.csv"
        code = run(["metrics", img_dir, img_dir, "--out", out, "--grid"])
        assert code == 0
        grid = out.with_name("report_grid_ssim.csv")
        assert grid.exists()
        assert grid.read_text().splitlines()[0].startswith("bin,")


class TestDatasetCommand:
    def test_build_and_split(self, scene, tmp_path):
        manifest = tmp_path / "pairs.jsonl"
        lines = [json.dumps({"seed": 0, "n_bins": 2, "sigma": 2.0})]
        for i in range(20):
            lines.append(json.dumps({
                "rendered": f"r{i}.png", "experimental": f"e{i}.png",
                "bin": i % 2, "pose": "P0_R20" if i % 2 else "P10_R30",
                "norm_depth": 0.0}))
        manifest.write_text("\n".join(lines) + "\n")
        out = tmp_path / "dataset.jsonl"
        code = run(["dataset", "--manifest", manifest, "--out", out,
                    "--fractions", "0.5,0.25,0.25", "--seed", "1"])
        assert code == 0
        rows = [json.loads(l) for l in out.read_text().splitlines()[1:]]
        assert len(rows) == 40  # two entries per pair
        splits = {r["split"] for r in rows}
        assert splits == {"train", "val", "test"}
        sources = {r["source"] for r in rows}
        assert sources == {"rendered", "experimental"}


class TestBenchCommand:
    def test_reports_timing(self, scene, capsys):
        root, img_dir, dep_dir = scene
        code = run(["bench", img_dir / "frame1.png", dep_dir / "frame1.tif",
                    "--reps", "2", "--layers", "8"])
        assert code == 0
        out = capsys.readouterr().out
        assert "median=" in out and "mean=" in out

    def test_single_rep_mean_equals_median(self, scene, capsys):
        root, img_dir, dep_dir = scene
        code = run(["bench", img_dir / "frame2.png", dep_dir / "frame2.tif",
                    "--reps", "1", "--layers", "4", "--no-crop"])
        assert code == 0
        out = capsys.readouterr().out
        mean = float(out.split("mean=")[1].split("s")[0])
        median = float(out.split("median=")[1].split("s")[0])
        assert mean == median
