"""Command line front end.

    xoverdesign optimize   --config CFG [--criterion theta|tau] [--out design.json]
    xoverdesign verify     --config CFG [--design SPEC] [--out table.csv]
    xoverdesign sweep      --config CFG [--sequence-index I] [--grid N] [--out sweep.csv]
    xoverdesign oracle     --config CFG [--resolution R] [--out oracle.json]
    xoverdesign efficiency --config CFG --design-a SPEC --design-b SPEC

A design ``SPEC`` is ``uniform``, ``optimal``, a comma-separated list of
proportions, or the path of a JSON file written by ``optimize``.

Exit codes: 0 success, 2 invalid input, 3 numerical failure, 4 not optimal or
not converged.
"""

import argparse
import csv
import io
import json
import logging
from pathlib import Path
import sys

import numpy as np

from .config import ConfigError, load_config
from .criteria import Criterion, objective_sweep
from .design import CrossoverDesign
from .exceptions import DesignError, NumericalError
from .information import relative_d_efficiency
from .optimizer import grid_oracle, optimize
from .verifier import verify_optimality

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3
EXIT_NOT_OPTIMAL = 4

log = logging.getLogger("xoverdesign")


def _fmt(x):
    return "" if x is None or not np.isfinite(x) else repr(float(x))


def design_to_dict(design):
    return {"sequences": design.labels(),
            "proportions": [float(w) for w in design.proportions]}


def _parse_design(value, cfg, criterion):
    if value is None:
        return cfg.design()
    if value == "uniform":
        return CrossoverDesign.uniform(cfg.sequences)
    if value == "optimal":
        return optimize(cfg.sequences, cfg.spec, criterion, cfg.optimizer).design
    path = Path(value)
    if path.suffix.lower() == ".json" or path.exists():
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read design file {path}: {exc}") from exc
        data = data.get("design", data)
        labels = data.get("sequences", cfg.design().labels())
        if list(labels) != cfg.design().labels():
            raise ConfigError(
                f"design file sequences {labels} do not match config {cfg.design().labels()}")
        weights = data.get("proportions")
    else:
        try:
            weights = [float(x) for x in value.replace(";", ",").split(",") if x.strip()]
        except ValueError as exc:
            raise ConfigError(f"cannot parse proportions {value!r}") from exc
    try:
        return CrossoverDesign(cfg.sequences, weights)
    except DesignError as exc:
        raise ConfigError(f"design {value!r}: {exc}") from exc


def _criterion(args, cfg):
    return Criterion.parse(args.criterion) if args.criterion else cfg.criterion


def _write(path, text):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text, encoding="utf-8")


def cmd_optimize(args, cfg):
    criterion = _criterion(args, cfg)
    opts = cfg.optimizer
    if args.method:
        opts.method = args.method
    result = optimize(cfg.sequences, cfg.spec, criterion, opts)
    tol = args.tolerance if args.tolerance is not None else cfg.tolerance
    report = verify_optimality(result.design, cfg.spec, criterion, tol)
    print(f"method: {result.method}, iterations: {result.iterations}, "
          f"converged: {result.converged}")
    print(report.to_text())
    out = args.out or cfg.out
    if out:
        payload = {
            "criterion": criterion.value,
            "design": design_to_dict(result.design),
            "objective": result.objective_value,
            "iterations": result.iterations,
            "converged": result.converged,
            "method": result.method,
            "verification": {"optimal": report.optimal,
                             "max_violation": report.max_violation,
                             "tolerance": report.tolerance_used,
                             "table": report.rows()},
        }
        _write(out, json.dumps(payload, indent=2) + "\n")
    return EXIT_OK if result.converged and report.optimal else EXIT_NOT_OPTIMAL


def cmd_verify(args, cfg):
    criterion = _criterion(args, cfg)
    design = _parse_design(args.design, cfg, criterion)
    tol = args.tolerance if args.tolerance is not None else cfg.tolerance
    report = verify_optimality(design, cfg.spec, criterion, tol)
    print(report.to_text())
    if args.out:
        _write(args.out, report.to_csv())
    return EXIT_OK if report.optimal else EXIT_NOT_OPTIMAL


def sweep_csv(p_values, phi, deriv):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["p_i", "objective", "directional_derivative"])
    for row in zip(p_values, phi, deriv):
        writer.writerow([_fmt(x) for x in row])
    return buf.getvalue()


def cmd_sweep(args, cfg):
    criterion = _criterion(args, cfg)
    if args.grid < 2:
        raise ConfigError("--grid: need at least 2 points")
    p_values, phi, deriv = objective_sweep(
        cfg.sequences, cfg.spec, criterion, args.sequence_index - 1, args.grid,
        base=cfg.proportions)
    _write(args.out, sweep_csv(p_values, phi, deriv))
    return EXIT_OK


def cmd_oracle(args, cfg):
    criterion = _criterion(args, cfg)
    if not args.resolution > 0:
        raise ConfigError("--resolution: must be positive")
    design = grid_oracle(cfg.sequences, cfg.spec, criterion, args.resolution)
    report = verify_optimality(design, cfg.spec, criterion, cfg.tolerance)
    print(f"lattice resolution: {args.resolution:g}")
    for label, w in zip(design.labels(), design.proportions):
        print(f"{label:<10} {w:.12f}")
    print(f"objective: {report.objective_value:.12g}")
    if args.out:
        _write(args.out, json.dumps({"criterion": criterion.value,
                                     "resolution": args.resolution,
                                     "design": design_to_dict(design),
                                     "objective": report.objective_value}, indent=2) + "\n")
    return EXIT_OK


def cmd_efficiency(args, cfg):
    criterion = _criterion(args, cfg)
    a = _parse_design(args.design_a, cfg, criterion)
    b = _parse_design(args.design_b, cfg, criterion)
    eff_ab = relative_d_efficiency(a, b, cfg.spec, criterion)
    eff_ba = relative_d_efficiency(b, a, cfg.spec, criterion)
    print(f"criterion: {criterion.value}")
    print(f"efficiency(a relative to b): {eff_ab:.12g}")
    print(f"efficiency(b relative to a): {eff_ba:.12g}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="xoverdesign",
        description="Locally D-optimal crossover designs under GLMs with GEE information.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="YAML/JSON run configuration")
        p.add_argument("--criterion", choices=["theta", "tau"], default=None)
        p.add_argument("--out", default=None)
        p.add_argument("--tolerance", type=float, default=None,
                       help="verification tolerance on the sensitivity scale")
        return p

    p = common(sub.add_parser("optimize", help="compute optimal proportions"))
    p.add_argument("--method", choices=["multiplicative", "projected_gradient",
                                        "equivalence_newton"])
    p.set_defaults(func=cmd_optimize)

    p = common(sub.add_parser("verify", help="check a design with the equivalence theorem"))
    p.add_argument("--design", default=None, help="design SPEC (default: config proportions)")
    p.set_defaults(func=cmd_verify)

    p = common(sub.add_parser("sweep", help="objective and derivative along one proportion"))
    p.add_argument("--sequence-index", type=int, default=1, help="1-based sequence index")
    p.add_argument("--grid", type=int, default=1001)
    p.set_defaults(func=cmd_sweep)

    p = common(sub.add_parser("oracle", help="brute-force lattice search"))
    p.add_argument("--resolution", type=float, default=0.001)
    p.set_defaults(func=cmd_oracle)

    p = common(sub.add_parser("efficiency", help="relative D-efficiency of two designs"))
    p.add_argument("--design-a", required=True)
    p.add_argument("--design-b", required=True)
    p.set_defaults(func=cmd_efficiency)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
        return args.func(args, cfg)
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except DesignError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
