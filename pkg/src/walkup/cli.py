"""Command-line front end.

Subcommands: validate, signals, analyze, features, synth, report.
Exit codes: 0 success, 1 validation failure, 2 usage error, 3 I/O error.
All diagnostics go to stderr; outputs are files (or stdout for `report`).
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional

import numpy as np

from .core import UpdrsItem, validate_sequence
from .errors import UnreadableInput, WalkupError
from .features import default_specs, extract_values, features_csv, features_json_payload
from .ingest import FileFormat, GapFill, parse_frames, write_sequence
from .kinematics import Plane
from .peaks import overlay_csv
from .report import AnalysisConfig, analyze, atomic_write, input_digest, plot_svg, report_json
from .signals import signal_csv
from .synth import DEFAULT_AMPLITUDE, MotionScenario, generate

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_IO = 3


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="walkup", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, multi_in: bool = False) -> None:
        nargs = "+" if multi_in else None
        p.add_argument("--in", dest="inputs", required=True, nargs=nargs, help="input file(s)")
        p.add_argument("--format", choices=["jsonl", "csv"], default="jsonl")
        p.add_argument("--item", help="item tag override (e.g. finger_taps)")
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--plane", choices=["2d", "3d"], help="geometry plane override")
        p.add_argument("--normalize-palm", action="store_true", default=None,
                       help="divide hand-movement distances by palm length")

    p_validate = sub.add_parser("validate", help="diagnose a landmark file")
    add_common(p_validate, multi_in=True)

    p_signals = sub.add_parser("signals", help="write per-channel signal CSVs")
    add_common(p_signals)
    p_signals.add_argument("--out", required=True, help="output directory")

    p_analyze = sub.add_parser("analyze", help="full analysis: report + overlays + plots")
    add_common(p_analyze, multi_in=True)
    p_analyze.add_argument("--out", required=True, help="output directory")

    p_features = sub.add_parser("features", help="extract features from a signal CSV (t,value)")
    p_features.add_argument("--in", dest="inputs", required=True)
    p_features.add_argument("--out", help="output directory (default: stdout CSV)")
    p_features.add_argument("--spec", default="default", help="feature set name")

    p_synth = sub.add_parser("synth", help="generate a synthetic landmark JSONL file")
    p_synth.add_argument("--item", required=True)
    p_synth.add_argument("--out", required=True)
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--duration", type=float, default=10.0)
    p_synth.add_argument("--fps", type=float, default=30.0)
    p_synth.add_argument("--frequency", type=float, default=1.0)
    p_synth.add_argument("--amplitude", type=float, help="swing size (per-item default)")
    p_synth.add_argument("--decrement", type=float, default=0.0,
                         help="amplitude lost per cycle")
    p_synth.add_argument("--interval-growth", type=float, default=0.0,
                         help="seconds added to each successive cycle")
    p_synth.add_argument("--tremor-amplitude", type=float, default=0.0)
    p_synth.add_argument("--tremor-freq", type=float, default=5.0)
    p_synth.add_argument("--noise-std", type=float, default=0.0)

    p_report = sub.add_parser("report", help="merge analysis reports into a summary table")
    p_report.add_argument("--in", dest="inputs", required=True, nargs="+",
                          help="report.json files")
    p_report.add_argument("--out", help="summary CSV path (default: stdout)")
    return parser


def _resolve_config(args) -> AnalysisConfig:
    cfg = AnalysisConfig.load(args.config) if args.config else AnalysisConfig()
    overrides = {}
    if getattr(args, "plane", None):
        overrides["plane"] = Plane(args.plane)
    if getattr(args, "normalize_palm", None):
        overrides["normalize_palm"] = True
    if overrides:
        cfg = dataclasses.replace(cfg, **overrides)
    return cfg


def _load_sequence(path: str, args):
    fmt = FileFormat(args.format)
    item = UpdrsItem.from_name(args.item) if args.item else None
    return parse_frames(path, format=fmt, item=item)


def _cmd_validate(args) -> int:
    worst = EXIT_OK
    for path in args.inputs:
        try:
            seq = _load_sequence(path, args)
        except UnreadableInput as exc:
            _err(f"{path}: {type(exc).__name__}: {exc}")
            worst = max(worst, EXIT_IO)
            continue
        except WalkupError as exc:
            _err(f"{path}: {type(exc).__name__}: {exc}")
            worst = max(worst, EXIT_VALIDATION)
            continue
        report = validate_sequence(seq)
        if report.ok:
            _err(f"{path}: ok ({len(seq)} frames)")
        else:
            for violation in report.violations:
                _err(f"{path}: {violation}")
            worst = max(worst, EXIT_VALIDATION)
    return worst


def _cmd_signals(args) -> int:
    seq = _load_sequence(args.inputs, args)
    cfg = _resolve_config(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    report = analyze(seq, cfg)
    for ch in report.channels:
        name = f"{report.subject_id or 'anon'}_{report.item.value}_{ch.series.channel.value}.csv"
        atomic_write(out_dir / name, signal_csv(ch.series))
        _err(f"wrote {out_dir / name}")
    return EXIT_OK


def _analyze_one(path: str, args, cfg: AnalysisConfig, out_dir: Path) -> None:
    raw = Path(path).read_bytes()
    seq = _load_sequence(path, args)
    report = analyze(seq, cfg, digest=input_digest(raw))
    stem = f"{report.subject_id or Path(path).stem}_{report.item.value}"
    sub = out_dir / stem if len(args.inputs) > 1 else out_dir
    sub.mkdir(parents=True, exist_ok=True)
    atomic_write(sub / "report.json", report_json(report))
    for ch in report.channels:
        base = f"{stem}_{ch.series.channel.value}"
        atomic_write(sub / f"{base}.csv", signal_csv(ch.series))
        atomic_write(sub / f"{base}_peaks.csv", overlay_csv(ch.series, ch.peaks, ch.troughs))
        atomic_write(sub / f"{base}.svg", plot_svg(ch.series, ch.peaks, ch.troughs))
    _err(f"analyzed {path} -> {sub}")


def _cmd_analyze(args) -> int:
    cfg = _resolve_config(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    if len(args.inputs) == 1:
        _analyze_one(args.inputs[0], args, cfg, out_dir)
        return EXIT_OK
    with ThreadPoolExecutor(max_workers=min(4, len(args.inputs))) as pool:
        futures = [pool.submit(_analyze_one, p, args, cfg, out_dir) for p in args.inputs]
        for f in futures:
            f.result()
    return EXIT_OK


def _read_signal_csv(path: str) -> np.ndarray:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][:2] != ["t", "value"]:
        raise WalkupError(f"{path}: expected a t,value CSV")
    return np.array([float(r[1]) for r in rows[1:]], dtype=float)


def _cmd_features(args) -> int:
    if args.spec != "default":
        _err(f"unknown feature set {args.spec!r} (only 'default' is shipped)")
        return EXIT_USAGE
    values = _read_signal_csv(args.inputs)
    vector = extract_values(values, default_specs())
    csv_text = features_csv(vector)
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        atomic_write(out_dir / "features.csv", csv_text)
        payload = json.dumps(features_json_payload(vector), sort_keys=True, indent=2) + "\n"
        atomic_write(out_dir / "features.json", payload)
        _err(f"wrote {out_dir / 'features.csv'} and features.json")
    else:
        sys.stdout.write(csv_text)
    return EXIT_OK


def _cmd_synth(args) -> int:
    item = UpdrsItem.from_name(args.item)
    amplitude = args.amplitude if args.amplitude is not None else DEFAULT_AMPLITUDE[item]
    scenario = MotionScenario(
        item=item,
        duration_s=args.duration,
        fps=args.fps,
        base_amplitude=amplitude,
        frequency_hz=args.frequency,
        amplitude_decrement_per_cycle=args.decrement,
        interval_growth_s_per_cycle=args.interval_growth,
        tremor_amplitude=args.tremor_amplitude,
        tremor_freq_hz=args.tremor_freq,
        noise_std=args.noise_std,
        seed=args.seed,
    )
    seq = generate(scenario)
    write_sequence(seq, args.out)
    _err(f"wrote {args.out} ({len(seq)} frames)")
    return EXIT_OK


_SUMMARY_COLUMNS = [
    "subject", "item", "channel", "length", "signal_mean", "peak_count",
    "mean_amplitude", "mean_interval_s", "interval_slope_s_per_cycle", "amplitude_slope",
]


def _cmd_report(args) -> int:
    rows: list[list[str]] = []
    for path in args.inputs:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        for channel in sorted(data.get("channels", {})):
            ch = data["channels"][channel]
            cadence = ch["cadence"]
            row = [
                data.get("subject", ""),
                data.get("item", ""),
                channel,
                str(ch["signal"]["length"]),
                repr(ch["signal"]["mean"]),
            ]
            for key in ("peak_count", "mean_amplitude", "mean_interval_s",
                        "interval_slope_s_per_cycle", "amplitude_slope"):
                v = cadence.get(key)
                row.append("" if v is None else (str(v) if isinstance(v, int) else repr(v)))
            rows.append(row)
    lines = [",".join(_SUMMARY_COLUMNS)]
    lines += [",".join(r) for r in rows]
    text = "\n".join(lines) + "\n"
    if args.out:
        atomic_write(Path(args.out), text)
        _err(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


_COMMANDS = {
    "validate": _cmd_validate,
    "signals": _cmd_signals,
    "analyze": _cmd_analyze,
    "features": _cmd_features,
    "synth": _cmd_synth,
    "report": _cmd_report,
}


def main(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return _COMMANDS[args.command](args)
    except (UnreadableInput, OSError) as exc:
        _err(f"I/O error: {exc}")
        return EXIT_IO
    except WalkupError as exc:
        _err(f"{type(exc).__name__}: {exc}")
        return EXIT_VALIDATION
    except ValueError as exc:
        _err(f"error: {exc}")
        return EXIT_USAGE


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
