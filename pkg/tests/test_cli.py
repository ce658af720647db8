from __future__ import annotations

import json

import pytest

from caliblab.cli import main
from caliblab.logio import read_samples, read_trajectory_csv, write_trajectory_csv
from caliblab import TrajectoryPoint


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


FOUR_RECORD_LOG = (
    '{"label": 1, "conf": 0.9}\n'
    '{"label": 0, "conf": 0.9}\n'
    '{"label": 0, "conf": 0.2}\n'
    '{"label": 0, "conf": 0.2}\n'
)


def test_gen_writes_parseable_samples(tmp_path, capsys):
    out = tmp_path / "data.jsonl"
    code, stdout, _ = run_cli(capsys, "gen", "--n", "50", "--seed", "3", "--out", str(out))
    assert code == 0
    x, y = read_samples(out)
    assert x.shape == (50, 20)
    assert set(y.tolist()) <= {0, 1}
    assert json.loads(stdout)["n"] == 50


def test_gen_is_byte_deterministic(tmp_path, capsys):
    a = tmp_path / "a.jsonl"
    b = tmp_path / "b.jsonl"
    assert run_cli(capsys, "gen", "--n", "30", "--seed", "9", "--out", str(a))[0] == 0
    assert run_cli(capsys, "gen", "--n", "30", "--seed", "9", "--out", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_gen_multiclass(tmp_path, capsys):
    out = tmp_path / "multi.jsonl"
    code, _, _ = run_cli(capsys, "gen", "--task", "multi10", "--n", "40", "--out", str(out))
    assert code == 0
    _, y = read_samples(out)
    assert y.max() <= 9


def test_metrics_reports_hand_computed_ece(tmp_path, capsys):
    log = tmp_path / "log.jsonl"
    log.write_text(FOUR_RECORD_LOG)
    code, stdout, _ = run_cli(capsys, "metrics", "--log", str(log), "--bins", "10")
    assert code == 0
    assert '"ece_binned": 0.3' in stdout
    report = json.loads(stdout.splitlines()[0])
    assert report["n"] == 4
    assert report["mce"] == 0.4
    assert report["error"] == 0.25


def test_metrics_equal_mass_binning(tmp_path, capsys):
    log = tmp_path / "log.jsonl"
    log.write_text(FOUR_RECORD_LOG)
    code, stdout, _ = run_cli(capsys, "metrics", "--log", str(log), "--bins", "2", "--binning", "mass")
    assert code == 0
    report = json.loads(stdout.splitlines()[0])
    assert report["diagram"]["edges"] == [0.0, 0.55, 1.0]


def test_metrics_is_deterministic(tmp_path, capsys):
    log = tmp_path / "log.jsonl"
    log.write_text(FOUR_RECORD_LOG)
    _, first, _ = run_cli(capsys, "metrics", "--log", str(log))
    _, second, _ = run_cli(capsys, "metrics", "--log", str(log))
    assert first == second


def test_metrics_missing_file_is_input_error(tmp_path, capsys):
    code, _, stderr = run_cli(capsys, "metrics", "--log", str(tmp_path / "nope.jsonl"))
    assert code == 2
    assert "error" in stderr


def test_unknown_flag_is_usage_error(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["metrics", "--log", "x", "--frobnicate"])
    assert exc.value.code == 2


def test_train_writes_all_outputs(tmp_path, capsys):
    out_dir = tmp_path / "run"
    code, stdout, _ = run_cli(
        capsys, "train", "--regime", "under", "--hidden", "4", "--epochs", "2",
        "--samples-per-epoch", "200", "--test-size", "100", "--eval-every", "2",
        "--seed", "1", "--out-dir", str(out_dir),
    )
    assert code == 0
    summary = json.loads(stdout)
    assert summary["diverged"] is False
    assert (out_dir / "trajectory.csv").exists()
    assert (out_dir / "predictions.jsonl").exists()
    svgs = sorted(out_dir.glob("reliability_step*.svg"))
    assert len(svgs) == summary["checkpoints"]
    points = read_trajectory_csv(out_dir / "trajectory.csv")
    assert len(points) == summary["checkpoints"]


def test_train_trajectories_are_byte_identical(tmp_path, capsys):
    args = ["train", "--regime", "over", "--hidden", "8", "--epochs", "2",
            "--train-size", "60", "--test-size", "40", "--eval-every", "2",
            "--seed", "5"]
    a = tmp_path / "a"
    b = tmp_path / "b"
    assert run_cli(capsys, *args, "--out-dir", str(a))[0] == 0
    assert run_cli(capsys, *args, "--out-dir", str(b))[0] == 0
    assert (a / "trajectory.csv").read_bytes() == (b / "trajectory.csv").read_bytes()
    assert (a / "predictions.jsonl").read_bytes() == (b / "predictions.jsonl").read_bytes()


def test_train_sgd_without_lr_uses_sgd_default(tmp_path, capsys):
    out_dir = tmp_path / "sgd"
    code, stdout, _ = run_cli(
        capsys, "train", "--regime", "under", "--hidden", "4", "--epochs", "1",
        "--samples-per-epoch", "100", "--test-size", "50", "--eval-every", "1",
        "--opt", "sgd", "--out-dir", str(out_dir),
    )
    assert code == 0
    assert json.loads(stdout)["diverged"] is False


def test_decompose_prints_identity(tmp_path, capsys):
    log = tmp_path / "log.jsonl"
    lines = []
    for split, confs, labels in [
        ("train", [0.8, 0.3, 0.9, 0.1], [1, 0, 1, 0]),
        ("test", [0.7, 0.4, 0.95, 0.2], [1, 1, 1, 0]),
    ]:
        for c, y in zip(confs, labels):
            lines.append(json.dumps({"split": split, "step": 10, "label": y, "conf": c}))
    log.write_text("\n".join(lines) + "\n")
    code, stdout, _ = run_cli(capsys, "decompose", "--log", str(log), "--bins", "10")
    assert code == 0
    row = json.loads(stdout.splitlines()[0])
    assert row["step"] == 10
    assert row["identity_holds"] is True
    assert row["calib_gap"] == pytest.approx(abs(row["test_ece"] - row["train_ece"]), abs=1e-9)


def test_decompose_requires_split_tags(tmp_path, capsys):
    log = tmp_path / "log.jsonl"
    log.write_text(FOUR_RECORD_LOG)
    code, _, stderr = run_cli(capsys, "decompose", "--log", str(log))
    assert code == 2
    assert "split" in stderr


def _write_trajectory(path, rows):
    write_trajectory_csv(path, [TrajectoryPoint.create(*row) for row in rows])


def test_check_claims_passes_on_clean_trajectory(tmp_path, capsys):
    path = tmp_path / "traj.csv"
    _write_trajectory(path, [
        (100, 0.10, 0.20, 0.01, 0.05),   # calib 0.04 <= error 0.10
        (200, 0.05, 0.20, 0.02, 0.10),   # calib 0.08 <= error 0.15
    ])
    code, stdout, _ = run_cli(capsys, "check-claims", "--trajectory", str(path))
    assert code == 0
    report = json.loads(stdout)
    assert report["claim1_holds"] and report["claim2_holds"]
    assert report["violations"] == []


def test_check_claims_fails_with_exit_one(tmp_path, capsys):
    path = tmp_path / "traj.csv"
    _write_trajectory(path, [
        (100, 0.10, 0.12, 0.01, 0.30),   # calib 0.29 > error 0.02 + tol
    ])
    code, stdout, _ = run_cli(capsys, "check-claims", "--trajectory", str(path))
    assert code == 1
    report = json.loads(stdout)
    assert not report["claim2_holds"]
    assert report["violations"] == [100]


def test_check_claims_claim1_threshold(tmp_path, capsys):
    path = tmp_path / "traj.csv"
    _write_trajectory(path, [(100, 0.10, 0.20, 0.08, 0.10)])  # train ECE 0.08 > 0.05
    code, stdout, _ = run_cli(capsys, "check-claims", "--trajectory", str(path))
    assert code == 1
    assert not json.loads(stdout)["claim1_holds"]
    # overriding the threshold flips the verdict
    code, stdout, _ = run_cli(capsys, "check-claims", "--trajectory", str(path), "--tol1", "0.1")
    assert code == 0


def test_check_claims_warmup_fraction(tmp_path, capsys):
    path = tmp_path / "traj.csv"
    _write_trajectory(path, [
        (100, 0.05, 0.25, 0.06, 0.10),   # mid-fit checkpoint, train ECE 0.06
        (1000, 0.00, 0.25, 0.01, 0.20),
        (2000, 0.00, 0.25, 0.01, 0.22),
    ])
    assert run_cli(capsys, "check-claims", "--trajectory", str(path))[0] == 1
    code, stdout, _ = run_cli(capsys, "check-claims", "--trajectory", str(path),
                              "--warmup-fraction", "0.05")
    assert code == 0
    assert json.loads(stdout)["points"] == 2


def test_exit_codes_are_distinct(tmp_path, capsys):
    # input error (2) is distinct from claim violation (1)
    code, _, _ = run_cli(capsys, "check-claims", "--trajectory", str(tmp_path / "none.csv"))
    assert code == 2
