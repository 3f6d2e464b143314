"""Command-line interface.

Exit codes: 0 success, 1 usage, 2 invalid model, 3 solver failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (BifrontError, DomainError, InconsistencyError, MalformedModelError,
                     RegimeError, ShootingError, StiffnessError)
from .limits import Regime, analyze, inviscid_profile
from .model import ModelSpec, fisher_burgers, power_model, pure_convection, validate
from .profile import reconstruct, residual_second_order
from .reduction import TOL_ENV, FrontProblem, Tolerances
from .speed import critical_speed

log = logging.getLogger("bifront")

EXIT_OK, EXIT_USAGE, EXIT_MODEL, EXIT_SOLVER = 0, 1, 2, 3
DISTANCE_WINDOW = (-0.4, 0.4)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (math.isfinite(value) and value > 0.0):
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return value


def _eps_list(text: str) -> list[float]:
    values = [_positive(t) for t in text.split(",") if t.strip()]
    if not values:
        raise argparse.ArgumentTypeError("empty eps list")
    if any(b >= a for a, b in zip(values, values[1:])):
        raise argparse.ArgumentTypeError("eps list must be strictly decreasing")
    return values


def tol_factor() -> float:
    raw = os.environ.get(TOL_ENV)
    if not raw:
        return 1.0
    try:
        factor = float(raw)
    except ValueError:
        raise UsageError(f"{TOL_ENV}={raw!r} is not a number") from None
    if not (math.isfinite(factor) and factor > 0.0):
        raise UsageError(f"{TOL_ENV} must be positive")
    return factor


def _tolerances() -> Tolerances:
    return Tolerances().scaled(tol_factor())


def _add_model_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("model")
    g.add_argument("--model", choices=["fisher-burgers", "power", "pure-convection"],
                   default="fisher-burgers")
    g.add_argument("--model-file", type=Path, help="JSON model description (overrides --model)")
    g.add_argument("--k", type=float, default=1.0, help="reaction scale")
    g.add_argument("--alpha", type=float, default=0.0, help="fisher-burgers: h = alpha s^2")
    g.add_argument("--p", type=float, default=1.0, help="power: f = k s^p (1 - s)")
    g.add_argument("--q", type=float, default=2.0, help="power: h = coef s^q")
    g.add_argument("--coef", type=float, default=1.0)


def build_model(args) -> ModelSpec:
    if args.model_file is not None:
        try:
            data = json.loads(args.model_file.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise MalformedModelError(f"cannot read {args.model_file}: {exc}") from exc
        model = ModelSpec.from_dict(data)
    elif args.model == "fisher-burgers":
        model = fisher_burgers(args.k, args.alpha)
    elif args.model == "power":
        model = power_model(args.p, args.q, args.k, args.coef)
    else:
        model = pure_convection()
    return model


def _checked_model(args) -> ModelSpec:
    model = build_model(args)
    problems = validate(model)
    if problems:
        raise ModelInvalid(problems)
    return model


class ModelInvalid(Exception):
    def __init__(self, violations):
        super().__init__("model violates its assumptions")
        self.violations = violations


def _emit(text: str, output: Path | None) -> None:
    if output is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        output.write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")


def _record_csv(record: dict) -> str:
    buf = io.StringIO()
    flat = {k: (json.dumps(v) if isinstance(v, (list, dict)) else v) for k, v in record.items()}
    writer = csv.DictWriter(buf, fieldnames=list(flat), lineterminator="\n")
    writer.writeheader()
    writer.writerow(flat)
    return buf.getvalue()


# -- subcommands ----------------------------------------------------------------

def cmd_critical_speed(args) -> int:
    model = _checked_model(args)
    tol = _tolerances()
    res = critical_speed(model, args.eps, args.tol_c * tol_factor(), tolerances=tol)
    record = res.to_record()
    if args.with_profile is not None:
        problem = FrontProblem(model, args.eps, res.bracket[1])
        prof = reconstruct(res.trajectory_at_c_star, problem, tolerances=tol)
        prof.to_csv(args.with_profile)
        record["profile_residual"] = residual_second_order(prof, model)
        record["profile_path"] = str(args.with_profile)
    text = json.dumps(record, sort_keys=True) if args.format == "json" else _record_csv(record)
    _emit(text, args.output)
    return EXIT_OK


def cmd_classify(args) -> int:
    model = _checked_model(args)
    analysis = analyze(model)
    record = analysis.to_record()
    if analysis.regime.regime is Regime.UNCLASSIFIED:
        record["note"] = "theorem hypotheses not satisfied"
    elif args.profile_csv is not None:
        z = np.linspace(args.z_min, args.z_max, args.n_points)
        analysis.limit_profile.to_csv(z, args.profile_csv)
    _emit(json.dumps(record, sort_keys=True, indent=2), args.output)
    return EXIT_OK


@dataclass
class SweepRow:
    epsilon: float
    c_star: float | None = None
    distance: float | None = None
    error: str = ""


def _sweep_one(model: ModelSpec, eps: float, tol_c: float, tol: Tolerances, limit) -> SweepRow:
    row = SweepRow(eps)
    try:
        res = critical_speed(model, eps, tol_c, tolerances=tol)
        row.c_star = res.c_star
        if limit is not None:
            prof = reconstruct(res.trajectory_at_c_star, FrontProblem(model, eps, res.bracket[1]),
                               tolerances=tol)
            z = np.linspace(*DISTANCE_WINDOW, 801)
            row.distance = float(np.max(np.abs(prof.v_at(z) - limit.value(z))))
    except BifrontError as exc:
        row.error = f"{type(exc).__name__}: {exc}"
    return row


def _fmt(x) -> str:
    return "" if x is None else f"{x:.10g}"


def sweep_table(rows: list[SweepRow], tol_c: float) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["epsilon", "c_star", "distance", "c_star_nonincreasing", "distance_decreasing", "error"])
    prev = None
    for row in rows:
        c_ok = d_ok = ""
        if prev is not None:
            if prev.c_star is not None and row.c_star is not None:
                c_ok = str(row.c_star <= prev.c_star + 2.0 * tol_c).lower()
            if prev.distance is not None and row.distance is not None:
                d_ok = str(row.distance < prev.distance).lower()
        writer.writerow([_fmt(row.epsilon), _fmt(row.c_star), _fmt(row.distance), c_ok, d_ok, row.error])
        prev = row
    return buf.getvalue()


def cmd_sweep(args) -> int:
    model = _checked_model(args)
    tol = _tolerances()
    tol_c = args.tol_c * tol_factor()
    try:
        limit = analyze(model).limit_profile
    except RegimeError:
        limit = None
    eps_list = args.eps_list
    if args.jobs > 1 and len(eps_list) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            futures = [pool.submit(_sweep_one, model, e, tol_c, tol, limit) for e in eps_list]
            rows = [f.result() for f in futures]
    else:
        rows = [_sweep_one(model, e, tol_c, tol, limit) for e in eps_list]
    _emit(sweep_table(rows, tol_c), args.output)
    return EXIT_OK


# Panels behind the four figures: (name, model factory, eps, plot inviscid curve).
FIGURE_PANELS = [
    ("fig1_alpha1", lambda: fisher_burgers(1.0, 1.0), 2e-3, False),
    ("fig1_alpha0.5", lambda: fisher_burgers(1.0, 0.5), 2e-3, False),
    ("fig1_alpha0.05", lambda: fisher_burgers(1.0, 0.05), 2e-3, False),
    ("fig1_alpha-0.05", lambda: fisher_burgers(1.0, -0.05), 2e-3, False),
    ("fig1_alpha-1_6", lambda: fisher_burgers(1.0, -1.0 / 6.0), 2e-3, False),
    ("fig1_alpha-0.5", lambda: fisher_burgers(1.0, -0.5), 2e-3, False),
    ("fig2_eps2e-3", lambda: fisher_burgers(1.0, 1.0), 2e-3, True),
    ("fig2_eps2e-4", lambda: fisher_burgers(1.0, 1.0), 2e-4, True),
    ("fig3_eps1e-2", lambda: power_model(1.0, 1.5), 1e-2, True),
    ("fig3_eps2e-3", lambda: power_model(1.0, 1.5), 2e-3, True),
    ("fig4_eps1e-1", lambda: power_model(2.0, 2.0), 1e-1, True),
    ("fig4_eps1e-2", lambda: power_model(2.0, 2.0), 1e-2, True),
]


def _figure_panel(name, model, eps, with_inviscid, outdir: Path, tol: Tolerances, tol_c: float) -> dict:
    entry = {"panel": name, "epsilon": eps, "model": model.to_dict()}
    try:
        res = critical_speed(model, eps, tol_c, tolerances=tol)
        entry["c_star"] = res.c_star
        prof = reconstruct(res.trajectory_at_c_star, FrontProblem(model, eps, res.bracket[1]),
                           tolerances=tol)
        path = outdir / f"{name}_profile.csv"
        prof.to_csv(path)
        entry["profile_csv"] = path.name
        if with_inviscid:
            inv = inviscid_profile(model, 0.0)
            z = prof.z_grid[(prof.z_grid >= -5.0) & (prof.z_grid <= 5.0)]
            ipath = outdir / f"{name}_inviscid.csv"
            with open(ipath, "w", encoding="utf-8", newline="") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(["z", "v"])
                for zi, vi in zip(z, inv.value(z)):
                    writer.writerow([f"{zi:.12g}", f"{vi:.12g}"])
            entry["inviscid_csv"] = ipath.name
    except BifrontError as exc:
        entry["error"] = f"{type(exc).__name__}: {exc}"
    return entry


def cmd_figures(args) -> int:
    outdir = args.outdir
    outdir.mkdir(parents=True, exist_ok=True)
    tol = _tolerances()
    tol_c = args.tol_c * tol_factor()
    panels = [p for p in FIGURE_PANELS if not args.only or p[0].startswith(tuple(args.only))]
    summary = [_figure_panel(name, factory(), eps, inv, outdir, tol, tol_c)
               for name, factory, eps, inv in panels]
    (outdir / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n",
                                         encoding="utf-8")
    for entry in summary:
        status = f"c*={entry['c_star']:.6g}" if "c_star" in entry else entry["error"]
        print(f"{entry['panel']:<18} {status}")
    return EXIT_OK


def cmd_verify(args) -> int:
    from .oracle import certify
    from .verify import run_checks

    records = certify(args.write)
    checks = run_checks(records)
    for chk in checks:
        flag = "PASS" if chk.passed else "FAIL"
        print(f"{flag} {chk.quantity_id}: computed={chk.computed:.12g} "
              f"reference={chk.reference:.12g} err={chk.error:.2e} tol={chk.tolerance:.1e}")
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} certified quantities agree")
    return EXIT_OK if failed == 0 else EXIT_SOLVER


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bifront", description="Critical fronts with Born-Infeld diffusion")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("critical-speed", help="minimal admissible speed for one eps")
    _add_model_args(p)
    p.add_argument("--eps", type=_positive, required=True)
    p.add_argument("--tol-c", type=_positive, default=1e-6)
    p.add_argument("--with-profile", type=Path, help="write the critical profile as z,v,dv CSV")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--output", type=Path)
    p.set_defaults(func=cmd_critical_speed)

    p = sub.add_parser("classify", help="regime and eps -> 0 limit analysis")
    _add_model_args(p)
    p.add_argument("--profile-csv", type=Path, help="write the limit profile as z,v,segment_tag CSV")
    p.add_argument("--z-min", type=float, default=-3.0)
    p.add_argument("--z-max", type=float, default=3.0)
    p.add_argument("--n-points", type=int, default=1201)
    p.add_argument("--output", type=Path)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("sweep", help="critical speed and distance to the limit along an eps list")
    _add_model_args(p)
    p.add_argument("--eps-list", type=_eps_list, required=True, help="comma separated, decreasing")
    p.add_argument("--tol-c", type=_positive, default=1e-6)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--output", type=Path)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("figures", help="CSV data behind the four figure sets")
    p.add_argument("--outdir", type=Path, required=True)
    p.add_argument("--tol-c", type=_positive, default=1e-6)
    p.add_argument("--only", nargs="*", help="panel name prefixes, e.g. fig3")
    p.set_defaults(func=cmd_figures)

    p = sub.add_parser("verify", help="recompute oracle values and compare with the library")
    p.add_argument("--write", type=Path, help="also store the certification records as JSON")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"bifront: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ModelInvalid as exc:
        report = {"error": "model validation failed",
                  "violations": [v.to_dict() for v in exc.violations]}
        print(json.dumps(report, indent=2), file=sys.stderr)
        return EXIT_MODEL
    except (MalformedModelError, DomainError) as exc:
        print(json.dumps({"error": "malformed model", "detail": str(exc)}), file=sys.stderr)
        return EXIT_MODEL
    except (InconsistencyError, StiffnessError, ShootingError, BifrontError) as exc:
        print(f"bifront: solver failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
