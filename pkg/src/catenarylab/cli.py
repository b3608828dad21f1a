"""Command-line front door.

Subcommands:
  solve      integrate one or more starting radii; write CSV (+ provenance
             JSON) and optional SVG figures
  classify   integrate and classify one (alpha, r0); write/print a JSON report
  sweep      classify a grid of (alpha, r0); JSON array + summary table
  phase      render a phase portrait SVG for one exponent
  check      run the verification suites; nonzero exit on any failure

Exit codes: 0 success, 1 usage error, 2 numerical failure or Unresolved,
3 I/O error.  Failures also emit one machine-readable JSON line on stderr.
Set CATENARY_LOG=debug|info|warning|error for logging verbosity.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

log = logging.getLogger("catenarylab")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_IO = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems exit 1, not argparse's 2
        raise UsageError(message)


def _parse_values(spec: str) -> list[float]:
    """Comma list ('0.2,0.4') or linspace spec ('0.1:0.9:5'); de-duplicated."""
    out: list[float] = []
    for piece in spec.split(","):
        piece = piece.strip()
        if not piece:
            continue
        if ":" in piece:
            parts = piece.split(":")
            if len(parts) != 3:
                raise UsageError(f"grid spec must be lo:hi:count, got {piece!r}")
            lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
            if count < 1:
                raise UsageError("grid count must be >= 1")
            out.extend(np.linspace(lo, hi, count).tolist())
        else:
            out.append(float(piece))
    seen, unique = set(), []
    for v in out:
        if v not in seen:
            seen.add(v)
            unique.append(v)
    if not unique:
        raise UsageError(f"no values in {spec!r}")
    return unique


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--span", type=float, default=None, help="half-range of the angle s")
    p.add_argument("--rel-tol", type=float, default=None)
    p.add_argument("--abs-tol", type=float, default=None)
    p.add_argument("--eps-unit", type=float, default=None, help="stop distance from r=1")
    p.add_argument("--eps-origin", type=float, default=None, help="stop distance from r=0")
    p.add_argument("--v-max", type=float, default=None, help="|r'| treated as blow-up")
    p.add_argument("--max-samples", type=int, default=None)
    p.add_argument("--ds-max", type=float, default=None, help="max sample spacing")


def _solver_config(args):
    from .trajectory import SolverConfig

    overrides = {}
    for name in ("span", "rel_tol", "abs_tol", "eps_unit", "eps_origin",
                 "v_max", "max_samples", "ds_max"):
        val = getattr(args, name, None)
        if val is not None:
            overrides[name] = val
    return SolverConfig(**overrides)


def build_parser() -> _Parser:
    parser = _Parser(prog="catenary-lab",
                     description="Extremal curves of the circle-weighted energy")
    parser.add_argument("--config", type=str, default=None,
                        help="JSON file of flag defaults (flags override)")
    sub = parser.add_subparsers(dest="command", required=True)
    registry: dict[str, argparse.ArgumentParser] = {}
    parser.subcommands = registry  # type: ignore[attr-defined]

    p = registry["solve"] = sub.add_parser("solve", help="integrate and write trajectory files")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--r0", type=str, required=True, help="value, comma list, or lo:hi:n grid")
    _add_solver_flags(p)
    p.add_argument("--out", type=str, default=".", help="output directory")
    p.add_argument("--svg", action=argparse.BooleanOptionalAction, default=True,
                   help="also render curve/radius SVG figures")

    p = registry["classify"] = sub.add_parser("classify", help="classify one starting radius")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--r0", type=float, required=True)
    _add_solver_flags(p)
    p.add_argument("--out", type=str, default=None, help="report path (stdout if omitted)")
    p.add_argument("--svg", action=argparse.BooleanOptionalAction, default=False,
                   help="render the classified curve next to the report")

    p = registry["sweep"] = sub.add_parser("sweep", help="classify a grid of (alpha, r0)")
    p.add_argument("--alpha", type=str, required=True, help="comma list or lo:hi:n")
    p.add_argument("--r0", type=str, required=True, help="comma list or lo:hi:n")
    _add_solver_flags(p)
    p.add_argument("--out", type=str, default=None, help="JSON array output path")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers")

    p = registry["phase"] = sub.add_parser("phase", help="render a phase portrait")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--seeds", type=str, default=None, help="starting radii for orbits")
    _add_solver_flags(p)
    p.add_argument("--u-max", type=float, default=3.0)
    p.add_argument("--out", type=str, default=None, help="SVG path (default phase_a<alpha>.svg)")

    p = registry["check"] = sub.add_parser("check", help="run verification suites")
    p.add_argument("--suite", type=str, default="all",
                   help="comma list of suite names, or 'all'")
    return parser


def _cmd_solve(args) -> int:
    from .dynamics import integrate
    from .model import PowerParams
    from .plots import curve_figure, radius_figure, save_figure
    from .storage import write_provenance_json, write_trajectory_csv

    params = PowerParams(args.alpha)
    cfg = _solver_config(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    trajectories = []
    for r0 in _parse_values(args.r0):
        traj = integrate(params, r0, cfg)
        trajectories.append(traj)
        stem = out / f"catenary_a{args.alpha:g}_r{r0:g}"
        csv_path = Path(f"{stem}.csv")
        write_trajectory_csv(traj, csv_path)
        write_provenance_json(traj, Path(f"{stem}.json"))
        log.info("alpha=%g r0=%g: %s, %d samples -> %s",
                 args.alpha, r0, traj.stop_reason.value, traj.n, csv_path)
        print(f"{csv_path}  stop={traj.stop_reason.value}  samples={traj.n}")
    if args.svg:
        from .plots import phase_figure

        base = out / f"catenary_a{args.alpha:g}"
        save_figure(curve_figure(trajectories), base.parent / (base.name + "_curve.svg"))
        save_figure(radius_figure(trajectories), base.parent / (base.name + "_radius.svg"))
        save_figure(phase_figure(params, trajectories=trajectories),
                    base.parent / (base.name + "_phase.svg"))
        print(f"{base}_curve.svg  {base}_radius.svg  {base}_phase.svg")
    return EXIT_OK


def _cmd_classify(args) -> int:
    from .classify import ClassifyConfig, Regime, classify
    from .model import PowerParams
    from .storage import report_to_dict, write_report_json

    params = PowerParams(args.alpha)
    report = classify(params, args.r0, ClassifyConfig(solver=_solver_config(args)))
    payload = report_to_dict(report)
    if args.out:
        write_report_json(report, args.out)
        print(args.out)
    else:
        print(json.dumps(payload, indent=2))
    if args.svg:
        from .dynamics import integrate
        from .plots import curve_figure, save_figure

        traj = integrate(params, args.r0, report.solver)
        target = Path(args.out or f"classify_a{args.alpha:g}_r{args.r0:g}.json")
        save_figure(curve_figure([traj]), target.with_suffix(".svg"))
    if report.regime is Regime.UNRESOLVED:
        log.warning("alpha=%g r0=%g unresolved: %s", args.alpha, args.r0, report.notes)
        return EXIT_NUMERICAL
    return EXIT_OK


def _sweep_point(task):
    alpha, r0, cfg = task
    from .classify import ClassifyConfig, classify
    from .model import PowerParams

    return classify(PowerParams(alpha), r0, ClassifyConfig(solver=cfg))


def _cmd_sweep(args) -> int:
    from .classify import Regime
    from .storage import atomic_write_text, report_to_dict

    cfg = _solver_config(args)
    alphas = _parse_values(args.alpha)
    radii = _parse_values(args.r0)
    tasks = [(a, r, cfg) for a in alphas for r in radii
             if r > 0.0 and r != 1.0 and abs(r - 1.0) > 2.0 * cfg.eps_unit]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            reports = list(pool.map(_sweep_point, tasks))
    else:
        reports = [_sweep_point(t) for t in tasks]
    reports.sort(key=lambda rep: (rep.alpha, rep.r0))
    for rep in reports:
        log.info("alpha=%g r0=%g -> %s", rep.alpha, rep.r0, rep.regime.value)

    header = f"{'alpha':>8} {'r0':>8} {'regime':<22} {'feature':>14} {'drift':>10}"
    print(header)
    print("-" * len(header))
    for rep in reports:
        feature = ""
        if rep.period is not None:
            feature = f"T={rep.period:.6g}"
        elif rep.blowup_angle is not None:
            feature = f"s1={rep.blowup_angle:.6g}"
        elif rep.orthogonality_defect is not None:
            feature = f"orth={rep.orthogonality_defect:.1e}"
        print(f"{rep.alpha:>8g} {rep.r0:>8g} {rep.regime.value:<22} "
              f"{feature:>14} {rep.conservation_drift:>10.2e}")
    if args.out:
        payload = [report_to_dict(rep) for rep in reports]
        atomic_write_text(args.out, json.dumps(payload, indent=2) + "\n")
        print(f"wrote {len(payload)} reports -> {args.out}")
    if any(rep.regime is Regime.UNRESOLVED for rep in reports):
        return EXIT_NUMERICAL
    return EXIT_OK


def _cmd_phase(args) -> int:
    from .model import PowerParams
    from .plots import phase_figure, save_figure

    params = PowerParams(args.alpha)
    seeds = _parse_values(args.seeds) if args.seeds else None
    fig = phase_figure(params, seeds=seeds, solver=_solver_config(args), u_max=args.u_max)
    out = args.out or f"phase_a{args.alpha:g}.svg"
    save_figure(fig, out)
    print(out)
    return EXIT_OK


def _cmd_check(args) -> int:
    from .checks import run_suite

    names = [n.strip() for n in args.suite.split(",") if n.strip()]
    try:
        results = run_suite(names)
    except KeyError as exc:
        raise UsageError(str(exc)) from exc
    for res in results:
        print(res.line())
    failed = [res for res in results if not res.passed]
    print(f"{len(results) - len(failed)}/{len(results)} suites passed")
    return EXIT_OK if not failed else EXIT_NUMERICAL


_COMMANDS = {
    "solve": _cmd_solve,
    "classify": _cmd_classify,
    "sweep": _cmd_sweep,
    "phase": _cmd_phase,
    "check": _cmd_check,
}


def _apply_config_file(parser: _Parser, argv: list[str]) -> None:
    """Defaults from --config JSON; explicit flags still win."""
    from .storage import load_run_config

    if "--config" not in argv:
        return
    idx = argv.index("--config")
    if idx + 1 >= len(argv):
        raise UsageError("--config needs a path")
    values = load_run_config(argv[idx + 1])
    known: set[str] = set()
    for subparser in parser.subcommands.values():
        known.update(a.dest for a in subparser._actions)  # noqa: SLF001
    unknown = set(values) - known
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    for subparser in parser.subcommands.values():
        actions = {a.dest: a for a in subparser._actions}  # noqa: SLF001
        subparser.set_defaults(**{k: v for k, v in values.items() if k in actions})
        for key in values:
            if key in actions:
                actions[key].required = False


def _error_json(message: str, code: int) -> None:
    print(json.dumps({"error": message, "exit_code": code}), file=sys.stderr)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    level = os.environ.get("CATENARY_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        _apply_config_file(parser, argv)
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        _error_json(str(exc), EXIT_USAGE)
        return EXIT_USAGE
    except ValueError as exc:
        _error_json(str(exc), EXIT_USAGE)
        return EXIT_USAGE
    except OSError as exc:
        _error_json(str(exc), EXIT_IO)
        return EXIT_IO
    except ArithmeticError as exc:
        _error_json(str(exc), EXIT_NUMERICAL)
        return EXIT_NUMERICAL


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
