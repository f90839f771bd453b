"""
Command-line front end.

    sqinterf figure 3 --eta 0.3 --output fig3.csv
    sqinterf sweep --vary r2 --start 1.15 --stop 5 --step 0.05 --scheme su11 --detection direct
    sqinterf optimize r1 --n 1 4 10 100
    sqinterf range --scheme su2
    sqinterf oracle-check --cases 200

Exit codes: 0 success, 1 usage error, 2 validation or numerical failure.
Output is CSV on stdout unless ``--output`` names a file, which is then
written atomically.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from typing import Sequence

from . import analytic as an
from . import fock
from . import metrology as mt
from .figures import FIGURE_IDS, figure_csv, render_csv, write_atomic
from .schemes import ConfigError, Scheme, SchemeConfig

log = logging.getLogger(__name__)

EXIT_OK, EXIT_USAGE, EXIT_FAILURE = 0, 1, 2

SCHEME_ALIASES = {
    "su2": Scheme.SU2_HOMODYNE,
    "su11": None,  # resolved by --detection
    "su11-seeded": None,
    "su11-unseeded": Scheme.SU11_UNSEEDED_DIRECT,
    "su11-nondegenerate": Scheme.SU11_NONDEGENERATE,
}
# flag/file key -> SchemeConfig field
CONFIG_KEYS = {
    "r1": "r1",
    "r2": "r2",
    "mu": "mu",
    "eta": "eta",
    "alpha": "alpha",
    "psi": "psi",
    "dnd": "delta_n_d",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse exits with 2 by default
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def db_to_r(db: float) -> float:
    """Invert ``dB = 10 log10(e^{2r})``, keeping the sign."""
    return db * math.log(10.0) / 20.0


def read_config_file(path: str) -> dict[str, str]:
    """Flat ``key=value`` file; ``#`` starts a comment."""
    out: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}", line, "key=value syntax")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in CONFIG_KEYS and key not in ("scheme", "detection", "db"):
                raise ConfigError(key, value, f"known key ({', '.join(sorted(CONFIG_KEYS))}, scheme, detection, db)")
            out[key] = value
    return out


def resolve_scheme(name: str | None, detection: str | None) -> Scheme:
    if name is None:
        name = "su11" if detection == "direct" else "su2"
    key = name.strip().lower()
    if key in SCHEME_ALIASES:
        scheme = SCHEME_ALIASES[key]
        if scheme is None:
            return Scheme.SU11_SEEDED_DIRECT if detection == "direct" else Scheme.SU11_SEEDED_HOMODYNE
    else:
        try:
            scheme = Scheme(name.strip().upper())
        except ValueError:
            choices = sorted(SCHEME_ALIASES) + [s.value for s in Scheme]
            raise ConfigError("scheme", name, f"one of {choices}") from None
    if detection is not None and scheme.detection != detection and scheme is not Scheme.SU11_NONDEGENERATE:
        raise ConfigError("detection", detection, f"'{scheme.detection}' for scheme {scheme.value}")
    return scheme


def config_overrides(args: argparse.Namespace) -> dict[str, object]:
    """Merge the config file and flags (flags win) into SchemeConfig keyword arguments."""
    raw: dict[str, object] = {}
    if args.config:
        raw.update(read_config_file(args.config))
    for key in list(CONFIG_KEYS) + ["scheme", "detection"]:
        value = getattr(args, key, None)
        if value is not None:
            raw[key] = value
    use_db = bool(args.db) or str(raw.get("db", "")).lower() in ("1", "true", "yes")
    out: dict[str, object] = {}
    for key, field_name in CONFIG_KEYS.items():
        if key not in raw:
            continue
        try:
            value = float(raw[key])
        except (TypeError, ValueError):
            raise ConfigError(key, raw[key], "a number") from None
        if use_db and key in ("r1", "r2"):
            value = db_to_r(value)
        out[field_name] = value
    if "scheme" in raw or "detection" in raw:
        out["scheme"] = resolve_scheme(raw.get("scheme"), raw.get("detection"))
    return out


def build_config(args: argparse.Namespace) -> SchemeConfig:
    return SchemeConfig(**config_overrides(args))


def _emit(args: argparse.Namespace, text: str) -> None:
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        write_atomic(args.output, text)


def cmd_figure(args: argparse.Namespace) -> int:
    _emit(args, figure_csv(args.id, config_overrides(args)))
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    config = build_config(args)
    if args.step <= 0:
        raise UsageError("--step must be positive")
    grid = mt.frange(args.start, args.stop, args.step)
    outputs = ("dphi_min",) if args.no_range else ("dphi_min", "range")
    sweep = mt.SweepSpec(args.vary, grid, config, outputs, approx_n=args.approx_n)
    rows = mt.run_sweep(sweep)
    params = {"command": "sweep", **config.as_dict(), "vary": args.vary, "start": args.start,
              "stop": args.stop, "step": args.step, "approx_n": args.approx_n}
    cols = ("value", "phi0", "dphi_min", "dphi_min_over_snl", "range_width", "error")
    body = [(r.value, r.phi0, r.dphi_min, r.dphi_min_over_snl, r.range_width, r.error) for r in rows]
    _emit(args, render_csv(params, cols, body))
    return EXIT_OK


def cmd_optimize(args: argparse.Namespace) -> int:
    if args.target == "r1":
        budgets = args.n or [1.0, 4.0, 10.0, 100.0]
        body = []
        for n in budgets:
            opt = mt.optimize_r1(n)
            body.append((n, opt.r1, opt.dphi_min, an.heisenberg_exact(n)))
        params = {"command": "optimize", "target": "r1", "n": " ".join(f"{n:g}" for n in budgets)}
        _emit(args, render_csv(params, ("n", "r1", "dphi_min", "heisenberg_exact"), body))
        return EXIT_OK
    config = build_config(args)
    wp = mt.optimal_working_point(config, approx_n=args.approx_n)
    ref = an.snl_for(config, args.approx_n)
    params = {"command": "optimize", "target": "phi", **config.as_dict(), "approx_n": args.approx_n}
    cols = ("phi0", "dphi_min", "snl", "dphi_min_over_snl", "recovery_gain")
    _emit(args, render_csv(params, cols, [(wp.phi0, wp.dphi_min, ref, wp.dphi_min / ref, mt.recovery_gain(config))]))
    return EXIT_OK


def cmd_range(args: argparse.Namespace) -> int:
    config = build_config(args)
    res = mt.supersensitive_range(config, resolution=args.resolution, method=args.method, approx_n=args.approx_n)
    params = {"command": "range", **config.as_dict(), "method": args.method, "resolution": args.resolution,
              "approx_n": args.approx_n, "total_width": res.total_width, "split_by_peak": res.split_by_peak}
    body = [("interval", lo, hi, hi - lo) for lo, hi in res.intervals]
    body += [("peak_gap", lo, hi, hi - lo) for lo, hi in res.peak_gaps]
    body.append(("total", math.nan, math.nan, res.total_width))
    _emit(args, render_csv(params, ("kind", "lo", "hi", "width"), body))
    return EXIT_OK


def cmd_oracle_check(args: argparse.Namespace) -> int:
    report = fock.oracle_suite(args.cases, seed=args.seed, dim=args.dim, tol=args.tol)
    params = {"command": "oracle-check", "cases": args.cases, "seed": args.seed, "dim": args.dim, "tol": args.tol}
    body = [(i, c.num_modes, c.dim, c.error, "pass" if c.passed else "FAIL") for i, c in enumerate(report.cases)]
    _emit(args, render_csv(params, ("case", "modes", "dim", "error", "status"), body))
    status = "pass" if report.passed else "FAIL"
    print(
        f"oracle-check: {status} ({len(report.cases)} cases, max error {report.max_error:.3e}, "
        f"{report.elapsed:.1f} s)",
        file=sys.stderr,
    )
    return EXIT_OK if report.passed else EXIT_FAILURE


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    grp = p.add_argument_group("interferometer parameters")
    grp.add_argument("--r1", type=float, help="first squeeze factor (default 1.15)")
    grp.add_argument("--r2", type=float, help="second squeeze factor, opposite sign to r1 (default -3)")
    grp.add_argument("--mu", type=float, help="internal transmissivity (default 0.9)")
    grp.add_argument("--eta", type=float, help="detection efficiency (default 0.3)")
    grp.add_argument("--alpha", type=float, help="internal coherent amplitude (default 100)")
    grp.add_argument("--psi", type=float, help="seed phase offset, radians")
    grp.add_argument("--dnd", type=float, help="detector photon-number noise")
    grp.add_argument("--scheme", help="su2, su11, su11-unseeded, su11-nondegenerate or a full scheme name")
    grp.add_argument("--detection", choices=("homodyne", "direct"))
    grp.add_argument("--db", action="store_true", help="read --r1/--r2 in dB, 10 log10(e^{2r})")
    grp.add_argument("--config", help="key=value file; flags override it")
    p.add_argument("--output", "-o", help="CSV destination (default stdout)")


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sqinterf", description="Squeezing-assisted interferometer sensitivities.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("figure", help="data behind one of the sensitivity figures")
    p.add_argument("id", type=int, choices=FIGURE_IDS)
    _add_config_flags(p)
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("sweep", help="optimum sensitivity and range along one parameter")
    p.add_argument("--vary", required=True, choices=mt.SWEEP_PARAMS)
    p.add_argument("--start", type=float, required=True)
    p.add_argument("--stop", type=float, required=True)
    p.add_argument("--step", type=float, required=True)
    p.add_argument("--no-range", action="store_true", help="skip the supersensitive-range column")
    p.add_argument("--approx-n", action="store_true", help="normalise with N ~ alpha^2")
    _add_config_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("optimize", help="best r1 at a photon budget, or best working point")
    p.add_argument("target", choices=("r1", "phi"))
    p.add_argument("--n", type=float, nargs="+", help="photon budgets for target r1")
    p.add_argument("--approx-n", action="store_true")
    _add_config_flags(p)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("range", help="supersensitive phase intervals")
    p.add_argument("--method", choices=("auto", "closed_form", "scan"), default="auto")
    p.add_argument("--resolution", type=int, default=2001)
    p.add_argument("--approx-n", action="store_true")
    _add_config_flags(p)
    p.set_defaults(func=cmd_range)

    p = sub.add_parser("oracle-check", help="compare the Gaussian engine with the Fock-space oracle")
    p.add_argument("--cases", type=int, default=200)
    p.add_argument("--seed", type=int, default=20240517)
    p.add_argument("--dim", type=int, default=60)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--output", "-o", help="CSV destination (default stdout)")
    p.set_defaults(func=cmd_oracle_check)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"sqinterf: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigError, ValueError, ArithmeticError, mt.OptimizationError, fock.FockTruncationError, OSError) as exc:
        print(f"sqinterf: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
