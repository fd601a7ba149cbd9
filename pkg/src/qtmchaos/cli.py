"""Command-line experiment runner.

Exit codes: 0 success, 1 usage error, 2 a simulated column strayed from its
closed form by more than the tolerance.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import fields
from pathlib import Path

from .drive import Angle
from .experiments import EXPERIMENTS, ExperimentConfig, ExperimentResult, run_experiment

EXIT_OK, EXIT_USAGE, EXIT_TOLERANCE = 0, 1, 2

_KEYS = {f.name for f in fields(ExperimentConfig)}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qtmchaos", description=__doc__.splitlines()[0])
    p.add_argument("--config", action="append", default=[], metavar="FILE",
                   help="flat key=value file; repeat for a batch (one run per file)")
    p.add_argument("--experiment", choices=EXPERIMENTS)
    p.add_argument("--alpha1", help="'p/q pi' (exact) or radians")
    p.add_argument("--delta", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--driver", choices=("fibonacci", "constant", "arithmetic"))
    p.add_argument("--initial", help="head,tape spins, e.g. '0,0' or '0,+' or 'phi=0.3,0'")
    p.add_argument("--subsystem", choices=("all", "head", "tape", "total"))
    p.add_argument("--out", help="output path ('-' or omitted: stdout)")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--m-max", dest="m_max", type=int)
    p.add_argument("--jobs", type=int, default=1, help="parallel runs for a batch")
    p.add_argument("--backend", choices=("numba", "numpy"), default=None)
    return p


def read_config(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lstrip("-").replace("-", "_")
        if key not in _KEYS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = value
    return out


def make_config(values: dict) -> ExperimentConfig:
    kw = {}
    try:
        for key, value in values.items():
            if value is None:
                continue
            if key == "alpha1":
                kw[key] = Angle.parse(value)
            elif key == "delta":
                kw[key] = float(value)
            elif key in ("steps", "m_max"):
                kw[key] = int(value)
            else:
                kw[key] = str(value)
        return ExperimentConfig(**kw)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, int)) and not isinstance(v, float):
        return str(int(v))
    if isinstance(v, str):
        return v
    v = float(v)
    return "nan" if math.isnan(v) else f"{v:.17g}"


def _json_value(v):
    if v is None or isinstance(v, (str, int)):
        return v
    v = float(v)
    return None if math.isnan(v) else v


def summary_lines(result: ExperimentResult) -> list:
    lines = [f"check {c.name}: max_abs_dev={c.max_abs_dev:.3e} tol={c.tol:.0e} "
             f"{'ok' if c.ok else 'FAIL'}" for c in result.checks]
    return lines + list(result.notes)


def render(result: ExperimentResult, cfg: ExperimentConfig) -> str:
    if cfg.format == "json":
        doc = {
            "experiment": result.experiment,
            "config": {f.name: (str(getattr(cfg, f.name)) if f.name == "alpha1"
                                else getattr(cfg, f.name)) for f in fields(cfg)},
            "columns": result.columns,
            "rows": [[_json_value(v) for v in row] for row in result.rows],
            "checks": [{"name": c.name, "max_abs_dev": c.max_abs_dev, "tol": c.tol, "ok": c.ok}
                       for c in result.checks],
            "notes": result.notes,
        }
        return json.dumps(doc, indent=1) + "\n"
    buf = io.StringIO()
    buf.write(",".join(result.columns) + "\n")
    for row in result.rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    for line in summary_lines(result):
        buf.write(f"# {line}\n")
    return buf.getvalue()


def execute(cfg: ExperimentConfig, backend=None) -> int:
    """Run one configuration and write its output. Returns the exit code."""
    try:
        result = run_experiment(cfg, backend=backend)
    except ValueError as exc:
        print(f"qtmchaos: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = render(result, cfg)
    if cfg.out in (None, "", "-"):
        sys.stdout.write(text)
    else:
        try:
            Path(cfg.out).write_text(text)
        except OSError as exc:
            print(f"qtmchaos: error: cannot write {cfg.out}: {exc.strerror}", file=sys.stderr)
            return EXIT_USAGE
    for line in summary_lines(result):
        print(f"[{cfg.experiment}] {line}", file=sys.stderr)
    return EXIT_OK if result.ok else EXIT_TOLERANCE


def _execute_packed(args):
    return execute(*args)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    overrides = {k: getattr(args, k) for k in _KEYS if getattr(args, k, None) is not None}
    try:
        bases = [read_config(p) for p in args.config] or [{}]
        configs = [make_config({**base, **overrides}) for base in bases]
    except UsageError as exc:
        print(f"qtmchaos: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if len(configs) > 1 and args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            codes = list(pool.map(_execute_packed, [(c, args.backend) for c in configs]))
    else:
        codes = [execute(c, args.backend) for c in configs]
    return max(codes)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
