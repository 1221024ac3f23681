"""Command-line front end.

Every flag can also be set through an environment variable named
``ADPAAD_<FLAG>`` (upper case, dashes as underscores), e.g.
``ADPAAD_EPSILON=0.05``. Explicit flags win over the environment.

Exit status: 0 success, 1 a bound check failed in compare mode,
2 invalid configuration, 3 unreadable input, 4 scores undefined.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Sequence

from . import qprimitives as qp
from .analysis import write_rows
from .classical_adpaad import UndefinedScoresError
from .qadpaad import APPENDIX, POSTSELECT, PipelineConfig, PipelineError, run_pipeline
from .qarith import HALF_OPEN, PAPER_LITERAL, FixedPointFormat, FixedPointOverflow
from .timeseries import SeriesError, TimeSeries, load_series

log = logging.getLogger("adpaad")

ENV_PREFIX = "ADPAAD_"
EXIT_OK, EXIT_BOUND, EXIT_CONFIG, EXIT_INPUT, EXIT_UNDEFINED = 0, 1, 2, 3, 4
ERROR_CURVE_MAX_M = 12


@dataclass(frozen=True)
class RunConfig:
    input: Path
    pipeline: PipelineConfig
    column: Optional[str] = None
    report: Optional[Path] = None
    plot_dir: Optional[Path] = None
    timestamp: bool = True
    verbose: bool = False

    def as_dict(self) -> dict:
        return {"input": str(self.input), "column": self.column,
                "report": None if self.report is None else str(self.report),
                "emit_plot_data": None if self.plot_dir is None else str(self.plot_dir)}


def preprocess(ts: TimeSeries) -> tuple[TimeSeries, float]:
    """Shift the series so its minimum is zero when it has negative samples."""
    lo = min(ts.samples)
    if lo < 0:
        return ts.shifted(-lo), -lo
    return ts, 0.0


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="adpaad", description="PAAD anomaly detection, classical and simulated quantum.")
    p.add_argument("--input", required=True, type=Path, help="CSV file with one numeric column (or use --column)")
    p.add_argument("--column", help="column name or 0-based index")
    p.add_argument("--window", required=True, type=_positive_int, help="subsequence length n")
    p.add_argument("--stride", type=_positive_int, default=1)
    p.add_argument("--subsections", type=_positive_int, default=4, help="number of subsections q")
    p.add_argument("--delta", type=float, default=1.0, help="anomaly threshold")
    p.add_argument("--mode", choices=("classical", "quantum", "compare"), default="compare")
    p.add_argument("--aa-mode", choices=(POSTSELECT, APPENDIX), default=POSTSELECT)
    p.add_argument("--aa-iterations", type=int, default=None, help="amplification rounds in appendix mode")
    p.add_argument("--membership", choices=("half-open", "paper-literal"), default="half-open")
    p.add_argument("--precision-qubits", type=_positive_int, default=None,
                   help="estimation qubits m for every stage (default: from the error budget)")
    p.add_argument("--precision", choices=("uniform", "per_stage"), default="uniform",
                   help="how budget-derived m is spread over stages")
    p.add_argument("--epsilon", type=_positive_float, default=0.1)
    p.add_argument("--fixed-point-bits", type=_positive_int, default=32)
    p.add_argument("--frac-bits", type=int, default=16)
    p.add_argument("--ae-mode", choices=qp.AE_MODES, default=qp.DETERMINISTIC)
    p.add_argument("--search", choices=(qp.KNOWN_T, qp.UNKNOWN_T), default=qp.UNKNOWN_T)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--report", type=Path, default=None, help="write the JSON report here (default: stdout)")
    p.add_argument("--emit-plot-data", type=Path, default=None, metavar="DIR",
                   help="write CSV tables for external plotting")
    p.add_argument("--no-timestamp", action="store_true", help="omit the timing block from the report")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _apply_env(parser: argparse.ArgumentParser, environ) -> None:
    for action in parser._actions:
        if not action.option_strings or action.dest == "help":
            continue
        key = ENV_PREFIX + action.dest.upper()
        if key not in environ:
            continue
        raw = environ[key]
        if action.nargs == 0:  # store_true
            action.default = raw.lower() in ("1", "true", "yes", "on")
        else:
            action.default = raw
        action.required = False


def parse_config(argv: Optional[Sequence[str]] = None, environ=None) -> RunConfig:
    parser = build_parser()
    _apply_env(parser, os.environ if environ is None else environ)
    args = parser.parse_args(argv)
    # env defaults arrive as strings; argparse only converts them for typed options
    try:
        fmt = FixedPointFormat(total_bits=int(args.fixed_point_bits), frac_bits=int(args.frac_bits))
        pipeline = PipelineConfig(
            n=int(args.window), q=int(args.subsections), step=int(args.stride),
            delta=float(args.delta), mode=args.mode, aa_mode=args.aa_mode,
            aa_iterations=None if args.aa_iterations is None else int(args.aa_iterations),
            membership=HALF_OPEN if args.membership == "half-open" else PAPER_LITERAL,
            m=None if args.precision_qubits is None else int(args.precision_qubits),
            precision=args.precision, epsilon=float(args.epsilon), ae_mode=args.ae_mode,
            fmt=fmt, search=args.search, seed=int(args.seed))
    except ValueError as exc:
        parser.error(str(exc))
    return RunConfig(input=Path(args.input), pipeline=pipeline, column=args.column,
                     report=None if args.report is None else Path(args.report),
                     plot_dir=None if args.emit_plot_data is None else Path(args.emit_plot_data),
                     timestamp=not args.no_timestamp, verbose=bool(args.verbose))


def emit_plot_data(report, cfg: RunConfig, series: TimeSeries) -> list[Path]:
    out = cfg.plot_dir
    out.mkdir(parents=True, exist_ok=True)
    written = []
    rows = report.to_json(include_time=False)["subsequences"]
    write_rows(out / "scores.csv", rows)
    written.append(out / "scores.csv")
    if report.scores is None:
        return written
    counters = report.counters.as_dict()["steps"]
    write_rows(out / "counters.csv",
               [{"step": k, "ox_calls": v["ox"], "os_calls": v["os"]} for k, v in counters.items()])
    written.append(out / "counters.csv")
    if report.classical is not None:
        curve = []
        m_top = min(ERROR_CURVE_MAX_M, max(report.m.values()))
        for m in range(3, m_top + 1):
            try:
                r = run_pipeline(series, replace(cfg.pipeline, m=m, mode="compare"))
            except (PipelineError, FixedPointOverflow) as exc:
                curve.append({"m": m, "mu_error": "", "similarity_error": "", "score_error": "",
                              "note": str(exc)})
                continue
            checks = {c.name: c for c in r.checks()}
            curve.append({"m": m, "mu_error": checks["mu"].max_error,
                          "similarity_error": checks["similarity"].max_error,
                          "score_error": checks["score"].max_error, "note": ""})
        write_rows(out / "error_vs_m.csv", curve)
        written.append(out / "error_vs_m.csv")
    return written


def run(cfg: RunConfig) -> int:
    try:
        raw = load_series(cfg.input, cfg.column)
    except (OSError, SeriesError) as exc:
        log.error("cannot read input: %s", exc)
        return EXIT_INPUT
    if cfg.pipeline.n > raw.m:
        log.error("window n=%d exceeds series length %d", cfg.pipeline.n, raw.m)
        return EXIT_CONFIG
    series, shift = preprocess(raw)
    try:
        report = run_pipeline(series, cfg.pipeline, shift=shift)
    except UndefinedScoresError as exc:
        log.error("scores undefined: %s", exc)
        return EXIT_UNDEFINED
    except PipelineError as exc:
        log.error("%s", exc)
        return EXIT_UNDEFINED
    except FixedPointOverflow as exc:
        log.error("%s; rescale the input or widen --fixed-point-bits", exc)
        return EXIT_CONFIG

    body = report.to_json(include_time=False)
    body["run"] = cfg.as_dict()
    if cfg.timestamp:
        body["timing"] = {"timestamp": datetime.now(timezone.utc).isoformat(),
                          "wall_time_s": report.wall_time}
    text = json.dumps(body, indent=2, sort_keys=True) + "\n"
    if cfg.report is None:
        sys.stdout.write(text)
    else:
        cfg.report.parent.mkdir(parents=True, exist_ok=True)
        cfg.report.write_text(text)
    if cfg.plot_dir is not None:
        emit_plot_data(report, cfg, series)

    failed = report.failed_checks() if cfg.pipeline.mode == "compare" else []
    for c in failed:
        log.error("bound check %s failed: max error %.6g > bound %.6g", c.name, c.max_error, c.bound)
    if cfg.pipeline.mode == "compare" and report.sets_equal is False:
        log.warning("quantum and classical anomaly sets differ")
    return EXIT_BOUND if failed else EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    cfg = parse_config(argv)
    logging.basicConfig(level=logging.INFO if cfg.verbose else logging.WARNING,
                        format="adpaad: %(levelname)s: %(message)s")
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
