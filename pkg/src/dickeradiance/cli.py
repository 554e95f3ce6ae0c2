"""Command-line front end: single points, sweeps, ladder maps and verification.

Usage::

    dickeradiance steady|sweep|ladder|verify [--config PATH] [overrides...]

Rates in configuration files and flags are multiples of the reference rate
``epsilon``.  Circuit parameters (``lambda_ab``, ``lambda_bgamma``,
``delta``, ``kappa_a``, ``kappa_b``) and ``epsilon`` itself are frequencies
``omega / 2 pi`` and accept ``Hz``, ``kHz``, ``MHz`` or ``GHz`` suffixes.
"""

from __future__ import annotations

import argparse
import csv
import io
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .dicke import (
    MAX_ATOMS,
    CircuitParams,
    ModelParams,
    build_basis,
    build_generator,
    effective_rates,
    residual,
    steady_state,
)
from .errors import InvalidArgument, NonUniqueSteadyState, NumericalFailure, ParseError
from .observables import ladder_distribution, observables

__all__ = [
    "RunConfig",
    "CSV_FIELDS",
    "parse_config",
    "solve_point",
    "sweep_values",
    "format_rows",
    "run",
    "main",
]

MODES = ("steady", "sweep", "ladder", "verify")
SWEEP_VARIABLES = ("gamma_p", "gamma_1", "gamma_2")
CSV_FIELDS = (
    "gamma_p_over_eps",
    "gamma_1_over_eps",
    "gamma_2_over_eps",
    "jpjm",
    "sum_pop",
    "r_f",
    "sigma_z",
    "xi2",
    "g2_1",
    "g2_2",
    "solver_residual",
)
LADDER_FIELDS = ("J", "M", "probability")

EXIT_OK, EXIT_PARSE, EXIT_NUMERICAL, EXIT_VERIFY = 0, 2, 3, 4

_INT_KEYS = {"n_atoms", "sweep_points", "threads"}
_RATE_KEYS = {"gamma_p", "gamma_1", "gamma_2", "sweep_start", "sweep_stop"}
_FREQ_KEYS = {"epsilon", "lambda_ab", "lambda_bgamma", "delta", "kappa_a", "kappa_b"}
_CIRCUIT_KEYS = ("lambda_ab", "lambda_bgamma", "delta", "kappa_a", "kappa_b")
_STR_KEYS = {"mode", "sweep_variable", "out"}
KNOWN_KEYS = _INT_KEYS | _RATE_KEYS | _FREQ_KEYS | _STR_KEYS

_UNITS = {"hz": 1.0, "khz": 1e3, "mhz": 1e6, "ghz": 1e9}


@dataclass(frozen=True)
class RunConfig:
    """Validated run configuration.

    ``epsilon_hz`` is ``epsilon / 2 pi`` in Hz; ``circuit`` holds frequencies
    in Hz.  When a circuit block is present ``gamma_2`` is derived from it.
    """

    mode: str
    n_atoms: Optional[int] = None
    gamma_p: Optional[float] = None
    gamma_1: float = 0.0
    gamma_2: float = 0.0
    epsilon_hz: float = 10.0
    circuit: Optional[CircuitParams] = None
    sweep_variable: str = "gamma_p"
    sweep_start: float = 1e-2
    sweep_stop: float = 1e2
    sweep_points: int = 81
    out: Optional[str] = None
    threads: int = 1
    lines: dict = field(default_factory=dict, repr=False, compare=False)

    def model_params(self, **overrides) -> ModelParams:
        kw = dict(
            n_atoms=self.n_atoms,
            gamma_p=self.gamma_p,
            gamma_1=self.gamma_1,
            gamma_2=self.gamma_2,
            epsilon=2 * np.pi * self.epsilon_hz,
        )
        kw.update(overrides)
        return ModelParams(**kw)


def _parse_number(key, raw, line):
    text = raw.strip()
    scale = 1.0
    if key in _FREQ_KEYS:
        m = re.fullmatch(r"(.*?)\s*([kKmMgG]?[hH][zZ])", text)
        if m:
            text, scale = m.group(1), _UNITS[m.group(2).lower()]
    try:
        if key in _INT_KEYS:
            value = int(text)
        else:
            value = float(text) * scale
    except ValueError:
        raise ParseError(f"malformed number for {key!r}: {raw.strip()!r}", line) from None
    if not np.isfinite(value):
        raise ParseError(f"{key} must be finite", line)
    return value


def _read_pairs(text):
    pairs = {}
    lines = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ParseError(f"expected 'key = value', got {body!r}", lineno)
        key, value = (s.strip() for s in body.split("=", 1))
        if key not in KNOWN_KEYS:
            raise ParseError(f"unknown key {key!r}", lineno)
        if key in pairs:
            raise ParseError(f"duplicate key {key!r}", lineno)
        pairs[key] = value
        lines[key] = lineno
    return pairs, lines


def parse_config(text: str = "", overrides: Optional[dict] = None, mode: Optional[str] = None) -> RunConfig:
    """Parse ``key = value`` configuration text into a :class:`RunConfig`.

    ``overrides`` (e.g. from command-line flags) take precedence over file
    values.  ``mode`` is the subcommand; it must agree with any ``mode`` key
    in the file.
    """
    pairs, lines = _read_pairs(text)
    values = {}
    for key, raw in pairs.items():
        values[key] = raw if key in _STR_KEYS else _parse_number(key, raw, lines[key])
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in KNOWN_KEYS:
            raise ParseError(f"unknown option {key!r}")
        values[key] = value
        lines[key] = None

    file_mode = values.get("mode")
    if mode is not None and file_mode is not None and file_mode != mode:
        raise ParseError(f"config mode {file_mode!r} conflicts with command {mode!r}", lines.get("mode"))
    mode = mode or file_mode
    if mode is None:
        raise ParseError("missing required key 'mode'")
    if mode not in MODES:
        raise ParseError(f"mode must be one of {MODES}, got {mode!r}", lines.get("mode"))
    values["mode"] = mode

    for key in ("gamma_p", "gamma_1", "gamma_2", "sweep_start", "sweep_stop", "epsilon") + _CIRCUIT_KEYS:
        if key in values and values[key] < 0:
            raise ParseError(f"{key} must be nonnegative, got {values[key]}", lines.get(key))

    circuit_given = [k for k in _CIRCUIT_KEYS if k in values]
    circuit = None
    if circuit_given:
        missing = [k for k in _CIRCUIT_KEYS if k not in values]
        if missing:
            raise ParseError(f"incomplete circuit block, missing {missing}", lines[circuit_given[0]])
        if "gamma_2" in values:
            raise ParseError("gamma_2 conflicts with the circuit block that determines it", lines.get("gamma_2"))
        if "n_atoms" not in values:
            raise ParseError("circuit block requires n_atoms")
        try:
            circuit = CircuitParams(*(values.pop(k) for k in _CIRCUIT_KEYS), n_atoms=values["n_atoms"])
            _, g2_hz = effective_rates(circuit)
        except InvalidArgument as exc:
            raise ParseError(str(exc), lines[circuit_given[0]]) from None
        values["gamma_2"] = g2_hz / values.get("epsilon", 10.0)

    if "epsilon" in values:
        if values["epsilon"] <= 0:
            raise ParseError("epsilon must be positive", lines.get("epsilon"))
        values["epsilon_hz"] = values.pop("epsilon")

    if mode != "verify":
        if "n_atoms" not in values:
            raise ParseError("missing required key 'n_atoms'")
        if not 1 <= values["n_atoms"] <= MAX_ATOMS:
            raise ParseError(f"n_atoms must lie in [1, {MAX_ATOMS}]", lines.get("n_atoms"))
        swept = values.get("sweep_variable", "gamma_p") if mode == "sweep" else None
        if "gamma_p" not in values and swept != "gamma_p":
            raise ParseError("missing required key 'gamma_p'")
    if mode == "sweep":
        var = values.get("sweep_variable", "gamma_p")
        if var not in SWEEP_VARIABLES:
            raise ParseError(f"sweep_variable must be one of {SWEEP_VARIABLES}", lines.get("sweep_variable"))
        start = values.get("sweep_start", RunConfig.sweep_start)
        stop = values.get("sweep_stop", RunConfig.sweep_stop)
        if not 0 < start < stop:
            raise ParseError(f"sweep range needs 0 < start < stop, got {start}:{stop}", lines.get("sweep_start"))
        if values.get("sweep_points", 2) < 2:
            raise ParseError("sweep_points must be at least 2", lines.get("sweep_points"))
    if values.get("threads", 1) < 1:
        raise ParseError("threads must be at least 1", lines.get("threads"))

    return RunConfig(circuit=circuit, lines=lines, **values)


def sweep_values(cfg: RunConfig) -> np.ndarray:
    return np.logspace(np.log10(cfg.sweep_start), np.log10(cfg.sweep_stop), cfg.sweep_points)


def solve_point(params: ModelParams) -> dict:
    """Solve one parameter point and return a validated CSV row (as a dict)."""
    gen = build_generator(build_basis(params.n_atoms), params)
    state = steady_state(gen)
    obs = observables(state)
    row = {
        "gamma_p_over_eps": params.gamma_p,
        "gamma_1_over_eps": params.gamma_1,
        "gamma_2_over_eps": params.gamma_2,
        "jpjm": obs.jpjm,
        "sum_pop": obs.sum_pop,
        "r_f": obs.r_f,
        "sigma_z": obs.sigma_z,
        "xi2": obs.xi2,
        "g2_1": obs.g2_1,
        "g2_2": obs.g2_2,
        "solver_residual": residual(gen, state),
    }
    _validate_row(row)
    return row


def _validate_row(row):
    problems = []
    if abs(row["sigma_z"]) > 1 + 1e-12:
        problems.append(f"|sigma_z|={abs(row['sigma_z'])}")
    if row["xi2"] < -1e-12:
        problems.append(f"xi2={row['xi2']}")
    for key in ("g2_1", "g2_2"):
        if row[key] is not None and row[key] < 0:
            problems.append(f"{key}={row[key]}")
    if row["solver_residual"] > 1e-10:
        problems.append(f"residual={row['solver_residual']:.3e}")
    if problems:
        raise NumericalFailure("row failed validation: " + ", ".join(problems))


def _fmt(value):
    return "" if value is None else format(value, ".17g")


def format_rows(rows, fields=CSV_FIELDS) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fields)
    for row in rows:
        writer.writerow([_fmt(row[k]) for k in fields])
    return buf.getvalue()


def _sweep_rows(cfg: RunConfig):
    points = [cfg.model_params(**{cfg.sweep_variable: float(v)}) for v in sweep_values(cfg)]
    if cfg.threads > 1:
        with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
            return list(pool.map(solve_point, points))
    return [solve_point(p) for p in points]


def _emit(text, out, stdout):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        stdout.write(text)


def run(cfg: RunConfig, stdout=None, stderr=None) -> int:
    """Execute ``cfg``; returns the process exit code."""
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    try:
        if cfg.mode == "steady":
            text = format_rows([solve_point(cfg.model_params())])
            stdout.write(text)
            if cfg.out:
                Path(cfg.out).write_text(text, encoding="utf-8")
        elif cfg.mode == "sweep":
            _emit(format_rows(_sweep_rows(cfg)), cfg.out, stdout)
        elif cfg.mode == "ladder":
            params = cfg.model_params()
            state = steady_state(build_generator(build_basis(params.n_atoms), params))
            rows = [dict(zip(LADDER_FIELDS, t)) for t in ladder_distribution(state).triples()]
            _emit(format_rows(rows, LADDER_FIELDS), cfg.out, stdout)
        else:
            from .verify import run_all

            results = run_all()
            for r in results:
                stdout.write(r.line() + "\n")
            if not all(r.passed for r in results):
                return EXIT_VERIFY
    except (NumericalFailure, NonUniqueSteadyState) as exc:
        stderr.write(f"numerical failure: {exc}\n")
        return EXIT_NUMERICAL
    return EXIT_OK


def _parse_range(text):
    try:
        lo, hi = (float(x) for x in text.split(":"))
    except ValueError:
        raise ParseError(f"--range expects LO:HI, got {text!r}") from None
    return lo, hi


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dickeradiance",
        description="Steady-state collective radiance of a pumped atomic ensemble.",
    )
    parser.add_argument("mode", choices=MODES)
    parser.add_argument("--config", help="key = value configuration file")
    parser.add_argument("--n-atoms", type=int)
    parser.add_argument("--gamma-p", type=float, help="pump rate / epsilon")
    parser.add_argument("--gamma-1", type=float, help="single-atom collective decay / epsilon")
    parser.add_argument("--gamma-2", type=float, help="two-atom collective decay / epsilon")
    parser.add_argument("--out", help="output file (default: standard output)")
    parser.add_argument("--points", type=int, help="number of sweep points")
    parser.add_argument("--range", dest="range_", metavar="LO:HI", help="log-spaced sweep range")
    parser.add_argument("--variable", choices=SWEEP_VARIABLES, help="swept rate")
    parser.add_argument("--threads", type=int, help="parallel sweep workers")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = ""
        if args.config:
            try:
                text = Path(args.config).read_text(encoding="utf-8")
            except OSError as exc:
                raise ParseError(f"cannot read config: {exc}") from None
        overrides = {
            "n_atoms": args.n_atoms,
            "gamma_p": args.gamma_p,
            "gamma_1": args.gamma_1,
            "gamma_2": args.gamma_2,
            "out": args.out,
            "sweep_points": args.points,
            "sweep_variable": args.variable,
            "threads": args.threads,
        }
        if args.range_:
            overrides["sweep_start"], overrides["sweep_stop"] = _parse_range(args.range_)
        cfg = parse_config(text, overrides, mode=args.mode)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
