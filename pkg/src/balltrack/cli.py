"""Command-line entry point.

Subcommands:

* ``gen``        generate datasets (train/val/test) at the requested noise levels
* ``track``      run the matched-filter tracker over a split and write metrics
* ``selfcheck``  run the numerical self-check suite (constants, gradients)
* ``effects``    estimate factorial effects from a results CSV

Every command writes a ``<command>_manifest.json`` next to its outputs with
the fully resolved configuration, so a run can be reproduced bit-exactly.
Output directories are guarded by a lock file; two commands cannot write
the same directory concurrently.
"""

from __future__ import annotations

import argparse
import json
import os
import struct
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .factorial import (
    MissingCellsError,
    ResponseTable,
    all_terms,
    compute_all_effects,
    rank_effects,
    ENCODER_METRICS,
    DECODER_METRICS,
)
from .selfcheck import broken_kernel, run_all
from .sim import SimConfig, SimulationError
from .tracker import METRICS, evaluate, evaluate_sequences, metrics_to_csv, track_sequence
from .video import (
    DatasetError,
    FORMAT_VERSION,
    MAGIC,
    SPLITS,
    generate_split,
    read_dataset,
    write_dataset,
)

ENV_OUT_ROOT = "BALLTRACK_OUT"


class _OutputLock:
    """Single-writer lock per output directory."""

    def __init__(self, directory: Path):
        self.path = Path(directory) / ".balltrack.lock"

    def __enter__(self):
        self.path.parent.mkdir(parents=True, exist_ok=True)
        try:
            fd = os.open(self.path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            raise SystemExit(f"output directory is locked by {self.path}; "
                             "remove the file if no other run is active")
        os.close(fd)
        return self

    def __exit__(self, *exc):
        self.path.unlink(missing_ok=True)


def _add_sim_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--image-size", type=int, default=224)
    parser.add_argument("--scale", type=float, default=0.02, help="meters per pixel")
    parser.add_argument("--dt", type=float, default=0.04, help="seconds per frame")
    parser.add_argument("--gravity", type=float, default=9.81)
    parser.add_argument("--restitution", type=float, default=0.75)
    parser.add_argument("--radius", type=float, default=2.0, help="ball radius [px]")
    parser.add_argument("--vmax", type=float, default=11.1, help="max |v0| component [m/s]")
    parser.add_argument("--frames", type=int, default=40)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--train", type=int, default=100, help="training sequences")
    parser.add_argument("--val", type=int, default=50, help="validation sequences")
    parser.add_argument("--test", type=int, default=100, help="test sequences")


def _config_from_args(args, sigma: float) -> SimConfig:
    return SimConfig(
        image_size=args.image_size,
        scale=args.scale,
        dt=args.dt,
        gravity=args.gravity,
        restitution=args.restitution,
        radius_px=args.radius,
        v_max=args.vmax,
        frames_per_video=args.frames,
        noise_sigma=sigma,
        n_train=args.train,
        n_val=args.val,
        n_test=args.test,
        seed=args.seed,
    )


def _resolve_out(args, default_name: str) -> Path:
    if args.out is not None:
        return Path(args.out)
    root = os.environ.get(ENV_OUT_ROOT)
    if root is None:
        raise SystemExit(f"--out not given and ${ENV_OUT_ROOT} is unset")
    return Path(root) / default_name


def _write_manifest(directory: Path, command: str, config: dict, inputs, outputs, started: float) -> None:
    resolved = {k: v for k, v in config.items()
                if k != "func" and isinstance(v, (str, int, float, bool, list, type(None)))}
    manifest = {
        "command": command,
        "config": resolved,
        "inputs": [str(p) for p in inputs],
        "outputs": [str(p) for p in outputs],
        "artifact_version": __version__,
        "duration_s": round(time.time() - started, 3),
    }
    (directory / f"{command}_manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _sigma_dir(out: Path, sigma: float) -> Path:
    tag = f"{sigma:g}".replace(".", "p")
    return out / f"sigma_{tag}"


def cmd_gen(args) -> int:
    out = _resolve_out(args, "dataset")
    sigmas = args.sigma if args.sigma else [0.0, 1.0]
    started = time.time()
    outputs = []
    with _OutputLock(out):
        for sigma in sigmas:
            try:
                cfg = _config_from_args(args, sigma)
            except SimulationError as err:
                raise SystemExit(f"invalid configuration: {err}")
            target = _sigma_dir(out, sigma)
            for split in SPLITS:
                sequences = generate_split(cfg, split)
                write_dataset(target, split, sequences, cfg)
                outputs.append(target / f"{split}_frames.bin")
            print(f"wrote {target} (sigma={sigma:g}, "
                  f"{cfg.n_train}/{cfg.n_val}/{cfg.n_test} sequences)")
        _write_manifest(out, "gen", {**vars(args), "sigma": sigmas}, [], outputs, started)
    return 0


def cmd_track(args) -> int:
    data = Path(args.data)
    out = _resolve_out(args, "results")
    started = time.time()
    sequences, cfg = read_dataset(data, args.split)
    with _OutputLock(out):
        out.mkdir(parents=True, exist_ok=True)
        per_seq = []
        predictions_blob = []
        for seq in sequences:
            preds = track_sequence(seq, cfg, temporal_mean=args.temporal_mean)
            per_seq.append(evaluate(preds, seq.trajectory))
            predictions_blob.append(preds)
        table = evaluate_sequences(per_seq)

        csv_path = out / "metrics.csv"
        csv_path.write_text(metrics_to_csv(table, args.config_label, args.replicate))
        pred_path = out / "predictions.bin"
        _write_predictions(pred_path, predictions_blob)
        for metric in METRICS:
            print(f"{metric:>10}: {table.values[metric]:.4f}")
        _write_manifest(out, "track", vars(args), [data], [csv_path, pred_path], started)
    return 0


def _write_predictions(path: Path, per_sequence) -> None:
    """Binary dump of every window prediction (record scheme of the dataset
    files; per scale: B/H/P positions, velocities f64, bounce flags u8)."""
    scales = sorted(per_sequence[0].keys())
    with open(path, "wb") as fh:
        for scale in scales:
            for attr, dtype in (("p_bilinear", "<f8"), ("p_argmax", "<f8"),
                                ("p_physics", "<f8"), ("v", "<f8"), ("b", "<u1")):
                stacked = np.stack([
                    np.stack([getattr(w, attr) for w in seq[scale]]) for seq in per_sequence
                ])
                data = np.ascontiguousarray(stacked.astype(dtype))
                fh.write(MAGIC)
                fh.write(struct.pack("<II", FORMAT_VERSION, data.ndim))
                fh.write(struct.pack(f"<{data.ndim}Q", *data.shape))
                fh.write(data.tobytes())


def cmd_selfcheck(args) -> int:
    kernel = broken_kernel if args.inject_broken_kernel else None
    kwargs = {"trials": args.trials}
    if kernel is not None:
        kwargs["physics_window"] = kernel
    checks = run_all(**kwargs)
    failed = 0
    for name, passed, detail in checks:
        status = "PASS" if passed else "FAIL"
        print(f"[{status}] {name}: {detail}")
        failed += 0 if passed else 1
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return 0 if failed == 0 else 1


def cmd_effects(args) -> int:
    out = _resolve_out(args, "effects")
    started = time.time()
    text = Path(args.results).read_text()
    from .tracker import metrics_from_csv

    table = ResponseTable.from_rows(metrics_from_csv(text))
    table.add_aggregates()
    metrics = table.metrics()
    try:
        effects = compute_all_effects(table, metrics)
    except MissingCellsError as err:
        raise SystemExit(f"incomplete design grid: {err}")

    with _OutputLock(out):
        out.mkdir(parents=True, exist_ok=True)
        csv_path = out / "effects.csv"
        lines = ["term,metric,effect"]
        for term in all_terms():
            for metric in metrics:
                lines.append(f"{term},{metric},{effects[term][metric]:.17g}")
        csv_path.write_text("\n".join(lines) + "\n")

        report_path = out / "effects_report.txt"
        report = []
        for title, group in (("encoder (56-scale metrics)", ENCODER_METRICS),
                             ("decoder (112/224-scale metrics)", DECODER_METRICS)):
            if not all(m in metrics for m in group):
                continue
            report.append(f"Top effects, {title}; negative = reduces error")
            header = "term".ljust(8) + "".join(m.rjust(10) for m in group) + "avg".rjust(10)
            report.append(header)
            ranked = rank_effects(effects, group)[: args.top]
            for term, avg in ranked:
                row = term.ljust(8)
                row += "".join(f"{effects[term][m]:+.2f}".rjust(10) for m in group)
                row += f"{avg:+.2f}".rjust(10)
                report.append(row)
            report.append("")
        report_path.write_text("\n".join(report))
        print(report_path.read_text())
        _write_manifest(out, "effects", vars(args), [args.results], [csv_path, report_path], started)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="balltrack",
                                     description="bouncing-ball tracking toolbox")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate synthetic datasets")
    gen.add_argument("--out", default=None, help=f"output dir (default ${ENV_OUT_ROOT}/dataset)")
    gen.add_argument("--sigma", type=float, action="append", default=None,
                     help="noise level; repeatable (default: 0 and 1)")
    _add_sim_flags(gen)
    gen.set_defaults(func=cmd_gen)

    track = sub.add_parser("track", help="track a dataset split and write metrics")
    track.add_argument("--data", required=True, help="dataset directory (one sigma level)")
    track.add_argument("--split", default="test", choices=SPLITS)
    track.add_argument("--out", default=None)
    track.add_argument("--temporal-mean", action="store_true",
                       help="subtract the 3-frame mean before correlation "
                            "(cancels the static noise background)")
    track.add_argument("--config-label", default="A0B0C0D0E0F0",
                       help="config column stamped into the results CSV")
    track.add_argument("--replicate", type=int, default=0)
    track.set_defaults(func=cmd_track)

    check = sub.add_parser("selfcheck", help="run numerical self-checks")
    check.add_argument("--trials", type=int, default=100, help="derivative probe count")
    check.add_argument("--inject-broken-kernel", action="store_true",
                       help=argparse.SUPPRESS)  # test hook: force a failure
    check.set_defaults(func=cmd_selfcheck)

    effects = sub.add_parser("effects", help="factorial effects from a results CSV")
    effects.add_argument("--results", required=True, help="CSV: config,replicate,metric,value")
    effects.add_argument("--out", default=None)
    effects.add_argument("--top", type=int, default=10, help="rows in the ranked report")
    effects.set_defaults(func=cmd_effects)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DatasetError, SimulationError) as err:
        raise SystemExit(f"error: {err}")


if __name__ == "__main__":
    sys.exit(main())
