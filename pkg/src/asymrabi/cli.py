"""Command-line interface with reproducible CSV outputs.

Subcommands: spectrum, gapcurve, crossing, overlap, partition, perturb,
scan, run.  Every output file starts with a '#'-prefixed metadata header
recording the tool version and the full resolved parameter set, so a file
is a self-describing, byte-reproducible artifact.  Floats print at 6
significant digits by default (--full-precision switches to 17); the
header always carries parameters at full precision.

Exit codes: 0 ok, 1 numerical failure, 2 usage error, 3 overlap zero
classification without a certified scale separation.  The truncation cap
can be raised or lowered with the QRM_MAX_FOCK environment variable.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import re
import sys
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import __version__
from .eigen import DEFAULT_TOL, EigenSolveError, TruncationCapError
from .model import ModelParams
from .overlap import (
    ScaleSeparationError,
    classify_zeros,
    eigensystems_for_overlap,
    find_partition,
    format_overlap_table,
    overlap_matrix,
)
from .perturb import effective_splitting, locate_exact_pair
from .scan import ScanEvalError, epsilon_sweep, grid_points, min_gap_scan
from .spectra import (
    MonotoneGapError,
    SweepEvalError,
    refine_crossing,
    sweep_levels,
)

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_USAGE = 2
EXIT_UNCERTIFIED = 3

_NUMERICAL_ERRORS = (
    EigenSolveError,
    TruncationCapError,
    SweepEvalError,
    ScanEvalError,
    MonotoneGapError,
)


class UsageError(ValueError):
    pass


def parse_value(text: str) -> float:
    """Parse a scalar that may be symbolic, e.g. '0.7', 'pi', 'pi^-1/3'.

    The symbolic form exists so deliberately irrational inputs expand at
    full precision instead of being typed truncated.
    """
    s = text.strip()
    m = re.fullmatch(r"pi(?:\^(-?\d+(?:/\d+)?))?", s)
    if m:
        exp = Fraction(m.group(1)) if m.group(1) else Fraction(1)
        return float(math.pi ** float(exp))
    try:
        return float(s)
    except ValueError:
        raise UsageError(f"cannot parse value {text!r}") from None


def parse_range(text: str) -> tuple[float, float, float]:
    """Parse 'lo:hi:step' with lo <= hi and step > 0."""
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"range must be lo:hi:step, got {text!r}")
    lo, hi, step = (parse_value(p) for p in parts)
    if step <= 0:
        raise UsageError(f"range step must be > 0, got {step!r}")
    if hi < lo:
        raise UsageError(f"descending range rejected: {text!r}")
    return lo, hi, step


def parse_value_or_range(text: str):
    return parse_range(text) if ":" in text else parse_value(text)


def parse_triple(text: str) -> tuple[float, float, float]:
    """Parse 'eps,delta,g'."""
    parts = text.split(",")
    if len(parts) != 3:
        raise UsageError(f"expected eps,delta,g, got {text!r}")
    eps, delta, g = (parse_value(p) for p in parts)
    return eps, delta, g


@dataclass(frozen=True)
class RunConfig:
    """Declarative record of one CLI invocation, fully resolved.

    params holds only JSON-native values (symbolic inputs are expanded),
    so a config round-trips through its on-disk form losslessly and two
    identical configs produce byte-identical outputs.
    """

    command: str
    params: dict
    output_path: str | None = None
    precision: int = 6

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        data = json.loads(text)
        return cls(
            command=data["command"],
            params=data["params"],
            output_path=data.get("output_path"),
            precision=data.get("precision", 6),
        )


def _header(cfg: RunConfig, extra: dict | None = None) -> list[str]:
    lines = [f"# tool: asymrabi {__version__}", f"# command: {cfg.command}"]
    for key in sorted(cfg.params):
        lines.append(f"# param {key}: {cfg.params[key]!r}")
    lines.append(f"# precision: {cfg.precision}")
    for key, value in (extra or {}).items():
        lines.append(f"# {key}: {value}")
    return lines


def _write(cfg: RunConfig, lines: list[str]) -> None:
    text = "\n".join(lines) + "\n"
    if cfg.output_path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(cfg.output_path, "w", newline="\n") as fh:
            fh.write(text)


def _fmt(value: float, precision: int) -> str:
    return f"{value:.{precision}g}"


def _resolve_sweep(params: dict) -> tuple[ModelParams, str, np.ndarray]:
    """Split {epsilon, delta, g} into fixed params and the one swept grid."""
    swept = [k for k in ("epsilon", "delta", "g") if isinstance(params[k], list)]
    if len(swept) != 1:
        raise UsageError("exactly one of --eps/--delta/--g must be a lo:hi:step range")
    name = swept[0]
    lo, hi, step = params[name]
    grid = grid_points(lo, hi, step)
    fixed_kwargs = {k: params[k] for k in ("epsilon", "delta", "g") if k != name}
    fixed_kwargs[name] = float(grid[0])
    fixed = ModelParams(omega=params["omega"], **fixed_kwargs)
    return fixed, name, grid


def cmd_spectrum(cfg: RunConfig) -> int:
    p = cfg.params
    fixed, swept, grid = _resolve_sweep(p)
    levels = p["levels"]
    if levels < 1:
        raise UsageError("--levels must be >= 1")
    sweep = sweep_levels(fixed, swept, grid, K=max(levels, 2), tol=p["tol"])
    header = _header(cfg, {"swept": swept})
    header.append("swept_value," + ",".join(f"E{k+1}_rel" for k in range(levels)))
    for value, row in zip(sweep.grid, sweep.levels):
        cells = [_fmt(value, cfg.precision)]
        cells += [_fmt(e, cfg.precision) for e in row[:levels]]
        header.append(",".join(cells))
    _write(cfg, header)
    return EXIT_OK


def cmd_gapcurve(cfg: RunConfig) -> int:
    p = cfg.params
    fixed, swept, grid = _resolve_sweep(p)
    k = p["k"]
    if k < 1:
        raise UsageError("--k must be >= 1")
    sweep = sweep_levels(fixed, swept, grid, K=k + 1, tol=p["tol"])
    gaps = sweep.levels[:, k] - sweep.levels[:, k - 1]
    header = _header(cfg, {"swept": swept, "level_pair": f"{k},{k+1}"})
    header.append("swept_value,gap")
    for value, gap in zip(sweep.grid, gaps):
        header.append(f"{_fmt(value, cfg.precision)},{_fmt(gap, cfg.precision)}")
    _write(cfg, header)
    return EXIT_OK


def _auto_pair(fixed: ModelParams, swept: str, mid: float, tol: float) -> int:
    """Adjacent pair with the smallest gap at the bracket midpoint."""
    probe = dataclasses.replace(fixed, **{swept: mid})
    from .eigen import diagonalize_converged

    es = diagonalize_converged(probe, 16, tol)
    gaps = np.diff(es.energies[:16])
    return int(np.argmin(gaps)) + 1


def cmd_crossing(cfg: RunConfig) -> int:
    p = cfg.params
    lo, hi = p["bracket"]
    swept = p["swept"]
    fixed = ModelParams(
        delta=p["delta"], epsilon=p["epsilon"], omega=p["omega"], g=p["g"]
    )
    k = p["pair"]
    if k == "auto":
        k = _auto_pair(fixed, swept, 0.5 * (lo + hi), p["tol"])
    report = refine_crossing(fixed, swept, (lo, hi), k=int(k), tol=p["tol"])
    header = _header(cfg, {"swept": swept, "n_fock": report.n_fock})
    header.append("k,k_plus_1,swept_star,gap_at_star,certified,rel_energy")
    header.append(
        ",".join(
            [
                str(report.level_pair[0]),
                str(report.level_pair[1]),
                _fmt(report.g_star, 17),
                _fmt(report.gap_at_star, 17),
                str(report.certified).lower(),
                _fmt(report.rel_energy, 17),
            ]
        )
    )
    _write(cfg, header)
    return EXIT_OK


def _overlap_pipeline(cfg: RunConfig):
    p = cfg.params
    eps1, d1, g1 = p["p1"]
    eps2, d2, g2 = p["p2"]
    omega = p["omega"]
    pr = ModelParams(delta=d1, epsilon=eps1, omega=omega, g=g1)
    pc = ModelParams(delta=d2, epsilon=eps2, omega=omega, g=g2)
    er, ec = eigensystems_for_overlap(pr, pc, p["levels"], tol=p["tol"])
    m = overlap_matrix(er, ec, p["levels"])
    m = classify_zeros(m, threshold=p["threshold"])
    return m, er.n_fock


def _partition_lines(m) -> list[str]:
    part = find_partition(m)
    if not part.found:
        return ["# partition: NONE"]
    lines = ["# partition: FOUND"]
    fmt_groups = lambda groups: " | ".join(
        ",".join(str(i + 1) for i in g) for g in groups
    )
    lines.append(f"# groups_row: {fmt_groups(part.groups_row)}")
    lines.append(f"# groups_col: {fmt_groups(part.groups_col)}")
    lines.append(
        "# row_permutation: " + ",".join(str(i + 1) for i in part.row_permutation)
    )
    lines.append(
        "# col_permutation: " + ",".join(str(i + 1) for i in part.col_permutation)
    )
    if part.trivial:
        lines.append("# partition_trivial: true")
    return lines


def cmd_overlap(cfg: RunConfig) -> int:
    m, n_fock = _overlap_pipeline(cfg)
    header = _header(
        cfg,
        {
            "n_fock": n_fock,
            "zero_threshold": m.zero_threshold,
            "largest_ignored": m.largest_ignored,
            "smallest_retained": m.smallest_retained,
            "separation": m.separation,
            "classification_valid": str(m.classification_valid).lower(),
        },
    )
    if not m.classification_valid:
        header.append("# partition: UNCERTIFIED")
        header.append(format_overlap_table(m, precision=cfg.precision).rstrip("\n"))
        _write(cfg, header)
        print(
            "error: zero classification lacks a certified scale separation",
            file=sys.stderr,
        )
        return EXIT_UNCERTIFIED
    if cfg.params["partition"]:
        header += _partition_lines(m)
    header.append(format_overlap_table(m, precision=cfg.precision).rstrip("\n"))
    _write(cfg, header)
    return EXIT_OK


def cmd_partition(cfg: RunConfig) -> int:
    m, n_fock = _overlap_pipeline(cfg)
    header = _header(
        cfg,
        {
            "n_fock": n_fock,
            "zero_threshold": m.zero_threshold,
            "separation": m.separation,
        },
    )
    header += _partition_lines(m)
    _write(cfg, header)
    return EXIT_OK


def cmd_perturb(cfg: RunConfig) -> int:
    p = cfg.params
    m_idx, n_idx = p["pair"]
    lo, hi, step = p["g"]
    grid = grid_points(lo, hi, step)
    base = ModelParams(delta=p["delta"], epsilon=p["epsilon"], omega=p["omega"], g=0.0)
    header = _header(cfg, {"pair_mn": f"{m_idx},{n_idx}"})
    header.append("g,exact_gap,effective_splitting,k_lower")
    from .eigen import diagonalize_converged

    for g in grid:
        k = locate_exact_pair(base, m_idx, n_idx, float(g), tol=p["tol"])
        probe = dataclasses.replace(base, g=float(g))
        es = diagonalize_converged(probe, k + 1, p["tol"])
        exact = float(es.energies[k] - es.energies[k - 1])
        eff = effective_splitting(probe, m_idx, n_idx).splitting
        header.append(
            ",".join(
                [
                    _fmt(g, cfg.precision),
                    _fmt(exact, cfg.precision),
                    _fmt(eff, cfg.precision),
                    str(k),
                ]
            )
        )
    _write(cfg, header)
    return EXIT_OK


def cmd_scan(cfg: RunConfig) -> int:
    p = cfg.params
    eps = p["epsilon"]
    if isinstance(eps, list):
        lo, hi, step = eps
        eps_grid = grid_points(lo, hi, step)
    else:
        eps_grid = np.array([eps])
    results = epsilon_sweep(
        eps_grid,
        tuple(p["d_range"]),
        tuple(p["g_range"]),
        p["step"],
        p["levels"],
        tol=p["tol"],
        workers=p["workers"],
    )
    header = _header(
        cfg, {"truncation": f"adaptive doubling, tol {p['tol']:g}*omega"}
    )
    header.append("epsilon_over_omega,min_gap,argmin_delta,argmin_g,argmin_k")
    for r in results:
        header.append(
            ",".join(
                [
                    _fmt(r.epsilon_over_omega, cfg.precision),
                    _fmt(r.min_gap, cfg.precision),
                    _fmt(r.argmin[0], cfg.precision),
                    _fmt(r.argmin[1], cfg.precision),
                    str(r.argmin[2]),
                ]
            )
        )
    _write(cfg, header)
    return EXIT_OK


_COMMANDS = {
    "spectrum": cmd_spectrum,
    "gapcurve": cmd_gapcurve,
    "crossing": cmd_crossing,
    "overlap": cmd_overlap,
    "partition": cmd_partition,
    "perturb": cmd_perturb,
    "scan": cmd_scan,
}


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--omega", default="1", help="oscillator frequency (default 1)")
    sub.add_argument("--tol", type=float, default=DEFAULT_TOL,
                     help="truncation convergence tolerance in units of omega")
    sub.add_argument("--out", default=None, help="output file (default stdout)")
    sub.add_argument("--full-precision", action="store_true",
                     help="emit 17 significant digits instead of 6")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="asymrabi",
        description="Spectra, overlap partitions, and gap scans of the "
        "asymmetric quantum Rabi model.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    sp = subs.add_parser("spectrum", help="lowest levels along a parameter sweep")
    sp.add_argument("--eps", default="0")
    sp.add_argument("--delta", default="1")
    sp.add_argument("--g", default="0")
    sp.add_argument("--levels", type=int, default=10)
    _add_common(sp)

    gc = subs.add_parser("gapcurve", help="adjacent-level gap along a sweep")
    gc.add_argument("--eps", default="0")
    gc.add_argument("--delta", default="1")
    gc.add_argument("--g", default="0")
    gc.add_argument("--k", type=int, default=4, help="1-based lower level of the pair")
    _add_common(gc)

    cr = subs.add_parser("crossing", help="refine one gap minimum to a crossing")
    cr.add_argument("--eps", default="0")
    cr.add_argument("--delta", default="1")
    cr.add_argument("--g", default="0", help="fixed g when sweeping another parameter")
    cr.add_argument("--swept", choices=("g", "delta", "epsilon"), default="g")
    cr.add_argument("--bracket", required=True, help="lo:hi bracket for the minimum")
    cr.add_argument("--pair", default="auto",
                    help="1-based lower level of the pair, or 'auto'")
    _add_common(cr)

    for name, help_text in (
        ("overlap", "overlap table between two eigenbases"),
        ("partition", "symmetry partition search between two eigenbases"),
    ):
        ov = subs.add_parser(name, help=help_text)
        ov.add_argument("--p1", required=True, help="eps,delta,g of the row basis")
        ov.add_argument("--p2", required=True, help="eps,delta,g of the column basis")
        ov.add_argument("--levels", type=int, default=10)
        ov.add_argument("--threshold", type=float, default=1e-8,
                        help="zero classification threshold")
        if name == "overlap":
            ov.add_argument("--partition", action="store_true",
                            help="append the partition result to the table")
        _add_common(ov)

    pt = subs.add_parser("perturb", help="exact gap vs effective splitting over g")
    pt.add_argument("--eps", default="1")
    pt.add_argument("--delta", default="0.1")
    pt.add_argument("--pair", required=True, help="m,n of the effective pair")
    pt.add_argument("--g", required=True, help="lo:hi:step sweep of g")
    _add_common(pt)

    sc = subs.add_parser("scan", help="minimum-gap scan over the (delta, g) grid")
    sc.add_argument("--eps", default="1", help="bias value or lo:hi:step range")
    sc.add_argument("--d-range", default="0.1:3.1", help="lo:hi of delta/omega")
    sc.add_argument("--g-range", default="0.1:3.1", help="lo:hi of g/omega")
    sc.add_argument("--step", type=float, default=0.05)
    sc.add_argument("--levels", type=int, default=10)
    sc.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    _add_common(sc)

    rn = subs.add_parser("run", help="execute a saved run configuration")
    rn.add_argument("config", help="path to a RunConfig JSON file")

    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    precision = 17 if getattr(args, "full_precision", False) else 6
    cmd = args.command
    params: dict = {}
    if cmd in ("spectrum", "gapcurve", "crossing"):
        params["epsilon"] = parse_value_or_range(args.eps)
        params["delta"] = parse_value_or_range(args.delta)
        params["g"] = parse_value_or_range(args.g)
        params["omega"] = parse_value(args.omega)
        if cmd == "spectrum":
            params["levels"] = args.levels
        elif cmd == "gapcurve":
            params["k"] = args.k
        else:
            for key in ("epsilon", "delta", "g"):
                if isinstance(params[key], tuple):
                    raise UsageError("crossing takes scalar parameters plus --bracket")
            parts = args.bracket.split(":")
            if len(parts) != 2:
                raise UsageError(f"bracket must be lo:hi, got {args.bracket!r}")
            lo, hi = (parse_value(x) for x in parts)
            if not lo < hi:
                raise UsageError(f"bracket must satisfy lo < hi, got {args.bracket!r}")
            params["bracket"] = [lo, hi]
            params["swept"] = args.swept
            params["pair"] = args.pair if args.pair == "auto" else int(args.pair)
    elif cmd in ("overlap", "partition"):
        params["p1"] = list(parse_triple(args.p1))
        params["p2"] = list(parse_triple(args.p2))
        params["omega"] = parse_value(args.omega)
        params["levels"] = args.levels
        params["threshold"] = args.threshold
        params["partition"] = bool(getattr(args, "partition", False))
    elif cmd == "perturb":
        params["epsilon"] = parse_value(args.eps)
        params["delta"] = parse_value(args.delta)
        params["omega"] = parse_value(args.omega)
        m_str, n_str = args.pair.split(",")
        params["pair"] = [int(m_str), int(n_str)]
        params["g"] = list(parse_range(args.g))
    elif cmd == "scan":
        params["epsilon"] = parse_value_or_range(args.eps)
        lo, hi = (parse_value(x) for x in args.d_range.split(":"))
        params["d_range"] = [lo, hi]
        lo, hi = (parse_value(x) for x in args.g_range.split(":"))
        params["g_range"] = [lo, hi]
        params["step"] = args.step
        params["levels"] = args.levels
        params["workers"] = args.workers
        params["omega"] = 1.0
    params["tol"] = args.tol
    for key, value in list(params.items()):
        if isinstance(value, tuple):
            params[key] = list(value)
    return RunConfig(
        command=cmd,
        params=params,
        output_path=getattr(args, "out", None),
        precision=precision,
    )


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    try:
        if args.command == "run":
            with open(args.config) as fh:
                cfg = RunConfig.from_json(fh.read())
            if cfg.command not in _COMMANDS:
                raise UsageError(f"unknown command in config: {cfg.command!r}")
        else:
            cfg = _config_from_args(args)
        return _COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ScaleSeparationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNCERTIFIED
    except _NUMERICAL_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
