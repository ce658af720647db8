"""Command-line interface.

Subcommands::

    gen          sample a synthetic dataset to a JSONL file
    train        run a training experiment; write trajectory, logs and SVGs
    metrics      print a metrics report per (split, step) group of a log
    decompose    print trajectory points with the decomposition identity
    check-claims evaluate both claims over a trajectory CSV

Every command is deterministic given its flags: all randomness is seeded and
outputs are byte-identical across repeated invocations. Exit codes: 0 on
success (claims hold), 1 when a claim check fails, 2 on usage or input
errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from .binning import make_equal_mass_bins, make_equal_width_bins
from .dataset import Dataset
from .decomposition import (
    CLAIM1_DEFAULT_TOL,
    CLAIM2_DEFAULT_TOL,
    decomposition_report,
    evaluate_claims,
)
from .errors import CalibLabError
from .logio import (
    parse_log,
    read_trajectory_csv,
    write_prediction_log,
    write_samples,
    write_trajectory_csv,
)
from .metrics import DEFAULT_NUM_BINS, MetricsReport, metrics_report, reliability
from .svg import render_reliability_svg
from .synth import DEFAULT_DIM, DEFAULT_NOISE_SCALE, make_task, sample
from .trainer import (
    FIXED_SUBSAMPLE,
    FRESH_SAMPLES,
    OVER_DEFAULT_HIDDEN,
    UNDER_DEFAULT_HIDDEN,
    TrainConfig,
    over_config,
    run_experiment,
    under_config,
)

CLAIM2_FRACTION = 0.95


def _round9(x: float):
    """JSON-friendly value at 9 significant digits; NaN becomes null."""
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return None
    return float(format(float(x), ".9g"))


def _print_json(obj) -> None:
    sys.stdout.write(json.dumps(obj) + "\n")


def _parse_hidden(text: str) -> tuple[int, ...]:
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"--hidden expects comma-separated integers, got {text!r}")


def _make_cli_task(args):
    num_classes = 2 if args.task == "binary" else 10
    return make_task(dim=args.dim, num_classes=num_classes, noise_scale=args.noise, seed=args.task_seed)


def _add_task_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--task", choices=["binary", "multi10"], default="binary",
                        help="task family (default: binary)")
    parser.add_argument("--dim", type=int, default=DEFAULT_DIM,
                        help=f"input dimension (default: {DEFAULT_DIM})")
    parser.add_argument("--noise", type=float, default=DEFAULT_NOISE_SCALE,
                        help=f"posterior temperature (default: {DEFAULT_NOISE_SCALE})")
    parser.add_argument("--task-seed", type=int, default=0,
                        help="seed for the task weights (default: 0)")


def _report_json(key, data: Dataset, report: MetricsReport) -> dict:
    split, step = key
    diagram = report.diagram
    return {
        "split": split,
        "step": step,
        "n": len(data),
        "num_classes": data.num_classes,
        "ece_binned": _round9(report.ece_binned),
        "ece_exact": _round9(report.ece_exact),
        "mce": _round9(report.mce),
        "brier": _round9(report.brier),
        "sce": _round9(report.sce),
        "ace": _round9(report.ace),
        "error": _round9(report.error),
        "diagram": {
            "edges": [_round9(e) for e in diagram.scheme.edges],
            "count": [int(c) for c in diagram.count],
            "confidence": [_round9(c) for c in diagram.mean_confidence],
            "accuracy": [_round9(a) for a in diagram.accuracy],
        },
    }


# ------------------------------------------------------------------- commands

def _cmd_gen(args) -> int:
    task = _make_cli_task(args)
    x, y = sample(task, args.n, args.seed)
    write_samples(args.out, x, y)
    _print_json({"written": str(args.out), "n": args.n, "dim": task.dim,
                 "num_classes": task.num_classes, "seed": args.seed})
    return 0


def _cmd_train(args) -> int:
    task = _make_cli_task(args)
    hidden = args.hidden if args.hidden is not None else (
        OVER_DEFAULT_HIDDEN if args.regime == "over" else UNDER_DEFAULT_HIDDEN
    )
    base = over_config(seed=args.seed) if args.regime == "over" else under_config(seed=args.seed)
    optimizer = args.opt if args.opt is not None else base.optimizer
    if args.lr is not None:
        learning_rate = args.lr
    elif optimizer == "sgd":
        learning_rate = 0.1  # regime defaults are tuned for adam
    else:
        learning_rate = base.learning_rate
    config = TrainConfig(
        regime=FIXED_SUBSAMPLE if args.regime == "over" else FRESH_SAMPLES,
        train_size=args.train_size if args.train_size is not None else base.train_size,
        samples_per_epoch=(args.samples_per_epoch if args.samples_per_epoch is not None
                           else base.samples_per_epoch),
        test_size=args.test_size if args.test_size is not None else base.test_size,
        epochs=args.epochs if args.epochs is not None else base.epochs,
        batch_size=args.batch if args.batch is not None else base.batch_size,
        optimizer=optimizer,
        learning_rate=learning_rate,
        momentum=args.momentum,
        weight_decay=args.weight_decay if args.weight_decay is not None else base.weight_decay,
        eval_every=args.eval_every if args.eval_every is not None else base.eval_every,
        bins=args.bins,
        seed=args.seed,
        cosine_lr=args.cosine_lr,
    )
    result = run_experiment(task, hidden, config, collect_predictions=not args.no_logs)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_trajectory_csv(out_dir / "trajectory.csv", result.trajectory)
    if result.predictions is not None:
        write_prediction_log(out_dir / "predictions.jsonl", result.predictions)
        scheme = make_equal_width_bins(config.bins)
        for key, group in parse_log(out_dir / "predictions.jsonl").items():
            split, step = key
            if split != "test":
                continue
            render_reliability_svg(
                reliability(group, scheme),
                out_dir / f"reliability_step{step:06d}.svg",
                title=f"test step {step}",
            )

    summary = {
        "out_dir": str(out_dir),
        "regime": args.regime,
        "hidden": list(hidden),
        "parameter_count": result.parameter_count,
        "checkpoints": len(result.trajectory),
        "diverged": result.diverged,
    }
    if result.trajectory:
        final = result.trajectory[-1]
        summary["final"] = {
            "step": final.step,
            "train_error": _round9(final.train_error),
            "test_error": _round9(final.test_error),
            "train_ece": _round9(final.train_ece),
            "test_ece": _round9(final.test_ece),
            "error_gap": _round9(final.error_gap),
            "calib_gap": _round9(final.calib_gap),
        }
    _print_json(summary)
    return 0


def _cmd_metrics(args) -> int:
    groups = parse_log(args.log)
    for key, data in groups.items():
        if args.binning == "width":
            scheme = make_equal_width_bins(args.bins)
        else:
            conf, _ = data.calibration_pairs()
            scheme = make_equal_mass_bins(args.bins, conf)
        _print_json(_report_json(key, data, metrics_report(data, scheme)))
    return 0


def _cmd_decompose(args) -> int:
    groups = parse_log(args.log)
    steps = []
    for split, step in groups:
        if split is None or step is None:
            raise CalibLabError("decompose needs every record tagged with split and step")
        if step not in steps:
            steps.append(step)
    scheme = make_equal_width_bins(args.bins)
    for step in steps:
        train = groups.get(("train", step))
        test = groups.get(("test", step))
        if train is None or test is None:
            raise CalibLabError(f"step {step} is missing a train or test group")
        point = decomposition_report(train, test, scheme, step=step)
        _print_json({
            "step": point.step,
            "train_error": _round9(point.train_error),
            "test_error": _round9(point.test_error),
            "train_ece": _round9(point.train_ece),
            "test_ece": _round9(point.test_ece),
            "error_gap": _round9(point.error_gap),
            "calib_gap": _round9(point.calib_gap),
            "identity_holds": point.identity_holds(),
        })
    return 0


def _cmd_check_claims(args) -> int:
    trajectory = read_trajectory_csv(args.trajectory)
    if args.warmup_fraction > 0 and trajectory:
        cutoff = args.warmup_fraction * trajectory[-1].step
        kept = [p for p in trajectory if p.step > cutoff]
        if not kept:
            raise CalibLabError("warmup fraction leaves no checkpoints to judge")
        trajectory = kept
    report = evaluate_claims(trajectory, tol=args.tol2)
    claim1_ok = all(p.train_ece <= args.tol1 for p in trajectory)
    claim2_ok = report.claim2_holds_fraction >= args.claim2_fraction
    _print_json({
        "points": len(trajectory),
        "claim1_max_train_ece": _round9(report.claim1_max_train_ece),
        "claim1_tol": args.tol1,
        "claim1_holds": claim1_ok,
        "claim2_holds_fraction": _round9(report.claim2_holds_fraction),
        "claim2_tol": args.tol2,
        "claim2_required_fraction": args.claim2_fraction,
        "claim2_holds": claim2_ok,
        "violations": list(report.violations),
        "min_claim2_slack": _round9(min(report.claim2_slack)),
    })
    return 0 if claim1_ok and claim2_ok else 1


# --------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="caliblab",
        description="Calibration metrics, the train/test calibration decomposition, "
                    "and a desk-scale training bench on synthetic tasks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="sample a labeled dataset to a JSONL file")
    _add_task_flags(gen)
    gen.add_argument("--n", type=int, default=1000, help="number of samples (default: 1000)")
    gen.add_argument("--seed", type=int, default=0, help="sampling seed (default: 0)")
    gen.add_argument("--out", required=True, help="output JSONL path")
    gen.set_defaults(func=_cmd_gen)

    train = sub.add_parser("train", help="run a training experiment")
    _add_task_flags(train)
    train.add_argument("--regime", choices=["over", "under"], default="over",
                       help="over = fixed subsample, under = fresh samples (default: over)")
    train.add_argument("--hidden", type=_parse_hidden, default=None,
                       help="hidden widths, comma separated "
                            f"(default: {','.join(map(str, OVER_DEFAULT_HIDDEN))} over / "
                            f"{','.join(map(str, UNDER_DEFAULT_HIDDEN))} under)")
    train.add_argument("--epochs", type=int, default=None, help="training epochs (default: per regime)")
    train.add_argument("--batch", type=int, default=None, help="batch size (default: per regime)")
    train.add_argument("--opt", choices=["sgd", "adam"], default=None,
                       help="optimizer (default: per regime)")
    train.add_argument("--lr", type=float, default=None,
                       help="learning rate (default: per regime for adam, 0.1 for sgd)")
    train.add_argument("--momentum", type=float, default=0.9, help="SGD momentum (default: 0.9)")
    train.add_argument("--weight-decay", type=float, default=None,
                       help="decoupled weight decay (default: per regime)")
    train.add_argument("--eval-every", type=int, default=None,
                       help="batches between checkpoints (default: per regime)")
    train.add_argument("--cosine-lr", action="store_true",
                       help="anneal the learning rate to zero over the epochs (default: constant)")
    train.add_argument("--bins", type=int, default=DEFAULT_NUM_BINS,
                       help=f"reliability bins (default: {DEFAULT_NUM_BINS})")
    train.add_argument("--train-size", type=int, default=None,
                       help="fixed-subsample size (default: per regime)")
    train.add_argument("--samples-per-epoch", type=int, default=None,
                       help="fresh samples per epoch (default: per regime)")
    train.add_argument("--test-size", type=int, default=None,
                       help="held-out test size (default: per regime)")
    train.add_argument("--seed", type=int, default=0, help="run seed (default: 0)")
    train.add_argument("--no-logs", action="store_true",
                       help="skip prediction logs and reliability SVGs")
    train.add_argument("--out-dir", required=True, help="directory for run outputs")
    train.set_defaults(func=_cmd_train)

    met = sub.add_parser("metrics", help="metrics report per (split, step) group of a log")
    met.add_argument("--log", required=True, help="prediction log (JSONL)")
    met.add_argument("--bins", type=int, default=DEFAULT_NUM_BINS,
                     help=f"bin count (default: {DEFAULT_NUM_BINS})")
    met.add_argument("--binning", choices=["width", "mass"], default="width",
                     help="equal-width or equal-mass bins (default: width)")
    met.set_defaults(func=_cmd_metrics)

    dec = sub.add_parser("decompose", help="trajectory points and the decomposition identity")
    dec.add_argument("--log", required=True, help="prediction log (JSONL)")
    dec.add_argument("--bins", type=int, default=DEFAULT_NUM_BINS,
                     help=f"bin count (default: {DEFAULT_NUM_BINS})")
    dec.set_defaults(func=_cmd_decompose)

    chk = sub.add_parser("check-claims", help="evaluate both claims over a trajectory CSV")
    chk.add_argument("--trajectory", required=True, help="trajectory CSV path")
    chk.add_argument("--tol1", type=float, default=CLAIM1_DEFAULT_TOL,
                     help=f"max train ECE counted as calibrated (default: {CLAIM1_DEFAULT_TOL})")
    chk.add_argument("--tol2", type=float, default=CLAIM2_DEFAULT_TOL,
                     help=f"slack when comparing the gaps (default: {CLAIM2_DEFAULT_TOL})")
    chk.add_argument("--claim2-fraction", type=float, default=CLAIM2_FRACTION,
                     help=f"fraction of checkpoints claim 2 must hold at (default: {CLAIM2_FRACTION})")
    chk.add_argument("--warmup-fraction", type=float, default=0.0,
                     help="ignore checkpoints in this leading fraction of training "
                          "(default: 0.0, judge every checkpoint)")
    chk.set_defaults(func=_cmd_check_claims)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CalibLabError, OSError, ValueError) as err:
        print(f"caliblab: error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
