"""Command-line front end: ``threetangle {curve,roof,sweep,validate,oracle}``.

Outputs are CSV (default) or a single JSON document with ``"schema": "v1"``.
Numbers are written with 12 significant digits, so identical invocations
give byte-identical files.

Exit codes: 0 pass, 1 validation failure, 2 I/O or usage error,
3 internal inconsistency (engine disagrees with a closed form in an exact
case, or the brute-force oracle undercuts an exact engine roof).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__, atlas, validation
from ._accel import max_threads
from .errors import ThreeTangleError
from .invariant import as_measure
from .oracle import DEFAULT_M, RESTARTS, brute_force_roof, gap_report
from .roofengine import characteristic_curve, roof
from .roofengine.curve import N_P, N_PHI

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_INCONSISTENT = 3

SCHEMA = "v1"
CLOSED_FORM_TOL = 1e-4

CURVE_HEADER = ["p", "phi", "value"]
MIN_CURVE_HEADER = ["p", "E_min", "argmin_phi"]
ROOF_HEADER = ["class", "traced_qubit", "measure", "cww_prefactor", "value", "status", "certificate",
               "lower_bound", "residual", "n_states", "closed_form", "closed_form_status", "variant",
               "closed_form_gap", "oracle", "oracle_gap"]
SWEEP_TAIL = ["sqrt_roof_sq", "tau3_roof", "sqrt_status", "tau3_status",
              "published_sqrt_sq", "published_tau3", "comparison_bound"]
VALIDATE_HEADER = ["status", "check", "metric", "tolerance", "detail"]
ORACLE_HEADER = ["m", "oracle", "engine", "gap", "inconsistent"]


class UsageError(Exception):
    pass


def parse_complex(text: str) -> complex:
    """``"0.3"``, ``"0.3+0.2i"``, ``"-1e-3-2i"``, ``"2i"``."""
    s = text.strip().replace(" ", "")
    try:
        return complex(s.replace("i", "j")) if s.endswith("i") else complex(float(s))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def fmt(x) -> str:
    """12 significant digits; complex values as ``re+imi``; ``None`` as an empty cell."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.12g}"
    if isinstance(x, complex):
        if x.imag == 0:
            return f"{x.real:.12g}"
        return f"{x.real:.12g}{x.imag:+.12g}i"
    return str(x)


def jsonable(x):
    if isinstance(x, dict):
        return {k: jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not np.isfinite(x):
            return None if np.isnan(x) else ("inf" if x > 0 else "-inf")
        return float(f"{x:.12g}")
    if isinstance(x, complex):
        return {"re": jsonable(x.real), "im": jsonable(x.imag)}
    if isinstance(x, np.integer):
        return int(x)
    return x


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def json_text(doc) -> str:
    return json.dumps(jsonable({"schema": SCHEMA, **doc}), indent=2) + "\n"


def emit(text: str, out: str | None):
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    Path(out).write_text(text)


# ---------------------------------------------------------------------------
# argument handling
# ---------------------------------------------------------------------------

def spec_from_args(args) -> atlas.ClassSpec:
    names = atlas.ARITY.get(args.class_id)
    if names is None:
        raise UsageError(f"--class must be 1..6, got {args.class_id}")
    given = {n: getattr(args, n) for n in "abcd" if getattr(args, n) is not None}
    extra = set(given) - set(names)
    if extra:
        raise UsageError(f"class {args.class_id} takes {', '.join(names)}; got --{' --'.join(sorted(extra))}")
    sweep = set(getattr(args, "ranges", {}) or {})
    missing = [n for n in names if n not in given and n not in sweep]
    if missing:
        raise UsageError(f"class {args.class_id} needs --{' --'.join(missing)}")
    return atlas.ClassSpec.create(args.class_id, **{n: given.get(n, 0.0) for n in names})


def measure_from_args(args):
    return as_measure(args.measure, args.cww_prefactor)


def _common(p: argparse.ArgumentParser, measure=True):
    p.add_argument("--class", dest="class_id", type=int, required=True, help="class 1..6")
    p.add_argument("--trace-qubit", type=int, default=None, help="qubit traced out (1..4)")
    for name in "abcd":
        p.add_argument(f"--{name}", type=parse_complex, default=None, help="complex as re[+imi]")
    if measure:
        p.add_argument("--measure", choices=["tau3", "sqrt-tau3"], default="tau3")
    p.add_argument("--np", dest="n_p", type=int, default=N_P, help="p grid size")
    p.add_argument("--nphi", dest="n_phi", type=int, default=N_PHI, help="phase grid size")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="output file (default stdout)")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--cww-prefactor", action="store_true", help="multiply tau3 by 4 (tau3(GHZ) = 1)")


def _default_qubit(spec, k):
    if k is not None:
        if k not in (1, 2, 3, 4):
            raise UsageError(f"--trace-qubit must be 1..4, got {k}")
        return k
    # first reduction with printed eigenstates, else qubit 4
    for q in (1, 2, 3, 4):
        if atlas.reduction(spec, q).kind == atlas.PRINTED:
            return q
    return 4


def _parse_range(text):
    try:
        name, rng = text.split("=", 1)
        start, stop, steps = rng.split(":")
        start, stop, steps = float(start), float(stop), int(steps)
    except ValueError:
        raise argparse.ArgumentTypeError(f"range must look like NAME=START:STOP:STEPS, got {text!r}") from None
    if name not in "abcd" or len(name) != 1:
        raise argparse.ArgumentTypeError(f"unknown parameter {name!r}")
    if steps < 1 or start > stop:
        raise argparse.ArgumentTypeError("need steps >= 1 and start <= stop")
    return name, (start, stop, steps)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_curve(args) -> int:
    spec = spec_from_args(args)
    k = _default_qubit(spec, args.trace_qubit)
    meas = measure_from_args(args)
    mix = atlas.reduced_mixture(spec, k)
    curve = characteristic_curve(mix, meas, args.n_p, args.n_phi)
    if args.format == "json":
        emit(json_text({"command": "curve", "class": spec.class_id, "params": spec.as_dict(), "traced_qubit": k,
                        "measure": meas.name, "cww_prefactor": meas.cww_prefactor, "p1": mix.p1,
                        "p_grid": curve.p_grid, "phi_grid": curve.phi_grid, "values": curve.values,
                        "min_curve": {"p": curve.p_grid, "E_min": curve.min_curve,
                                      "argmin_phi": curve.argmin_phi}}), args.out)
        return EXIT_OK
    surface = ((p, f, curve.values[i, j]) for i, p in enumerate(curve.p_grid) for j, f in enumerate(curve.phi_grid))
    minimum = zip(curve.p_grid, curve.min_curve, curve.argmin_phi)
    if args.out is None or args.out == "-":
        emit(csv_text(CURVE_HEADER, surface) + "\n" + csv_text(MIN_CURVE_HEADER, minimum), None)
    else:
        out = Path(args.out)
        emit(csv_text(CURVE_HEADER, surface), str(out))
        emit(csv_text(MIN_CURVE_HEADER, minimum), str(out.with_name(out.stem + "_min" + out.suffix)))
    return EXIT_OK


def cmd_roof(args) -> int:
    spec = spec_from_args(args)
    k = _default_qubit(spec, args.trace_qubit)
    meas = measure_from_args(args)
    mix = atlas.reduced_mixture(spec, k)
    res = roof(mix, meas, n_p=args.n_p, n_phi=args.n_phi)
    try:
        closed = atlas.closed_form_roof(spec, k, meas, args.variant, cww_prefactor=meas.cww_prefactor)
    except atlas.NoPrintedDataError:
        closed = None
    gap = None if closed is None else res.value - closed.value
    orc = None
    if args.oracle:
        orc = brute_force_roof(mix, meas, m=args.m, restarts=args.restarts, seed=args.seed).value
    ogap = None if orc is None else orc - res.value
    row = [spec.class_id, k, meas.name, meas.cww_prefactor, res.value, res.status, res.certificate,
           res.lower_bound, res.residual, len(res.decomposition),
           None if closed is None else closed.value, None if closed is None else closed.status,
           args.variant, gap, orc, ogap]
    if args.format == "json":
        doc = dict(zip(ROOF_HEADER, row))
        doc.update({"command": "roof", "params": spec.as_dict(), "p1": mix.p1,
                    "decomposition": [{"weight": w, "z": z} for w, z in res.decomposition]})
        emit(json_text(doc), args.out)
    else:
        emit(csv_text(ROOF_HEADER, [row]), args.out)
    inconsistent = (res.is_exact and closed is not None and closed.status == atlas.EXACT
                    and abs(gap) > CLOSED_FORM_TOL)
    if orc is not None and res.is_exact and ogap < -1e-6:
        inconsistent = True
    return EXIT_INCONSISTENT if inconsistent else EXIT_OK


@dataclass(frozen=True)
class SweepConfig:
    class_id: int
    traced_qubit: int
    fixed: dict
    ranges: dict
    n_p: int = N_P
    n_phi: int = N_PHI
    cww_prefactor: bool = False

    def points(self):
        names = atlas.ARITY[self.class_id]
        axes = []
        for n in names:
            if n in self.ranges:
                start, stop, steps = self.ranges[n]
                axes.append(np.linspace(start, stop, steps) if steps > 1 else np.array([start]))
            else:
                axes.append(np.array([self.fixed[n]]))
        grids = np.meshgrid(*axes, indexing="ij")
        return [tuple(g.flat[i] for g in grids) for i in range(grids[0].size)]


def sweep_row(cfg: SweepConfig, pars):
    spec = atlas.ClassSpec(cfg.class_id, pars)
    k = cfg.traced_qubit
    mix = atlas.reduced_mixture(spec, k)
    tau = as_measure("tau3", cfg.cww_prefactor)
    sq = as_measure("sqrt_tau3", cfg.cww_prefactor)
    rs = roof(mix, sq, n_p=cfg.n_p, n_phi=cfg.n_phi)
    rt = roof(mix, tau, n_p=cfg.n_p, n_phi=cfg.n_phi)

    def published(meas):
        try:
            v = atlas.closed_form_roof(spec, k, meas, atlas.PUBLISHED, cww_prefactor=cfg.cww_prefactor).value
        except atlas.NoPrintedDataError:
            return None
        return meas.to_tau_scale(v)

    scale = 1.0 if cfg.cww_prefactor else 0.25
    if cfg.class_id == 2:
        bound = atlas.class2_comparison_bound(spec, cfg.cww_prefactor)
    elif cfg.class_id == 5 and atlas.reduction(spec, k).case == "B":
        bound = scale * atlas.class5_bounds(spec)[1]
    else:
        bound = None
    return [*pars, rs.value ** 2, rt.value, rs.status, rt.status, published(sq), published(tau), bound]


def cmd_sweep(args) -> int:
    ranges = dict(args.ranges or [])
    args.ranges = ranges
    extra = set(ranges) - set(atlas.ARITY.get(args.class_id, ()))
    if extra:
        raise UsageError(f"class {args.class_id} has no parameter(s) {', '.join(sorted(extra))}")
    spec = spec_from_args(args)
    cfg = SweepConfig(spec.class_id, _default_qubit(spec, args.trace_qubit),
                      {n: v for n, v in spec.as_dict().items() if n not in ranges}, ranges,
                      args.n_p, args.n_phi, args.cww_prefactor)
    points = cfg.points()
    workers = max_threads()
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            rows = list(pool.map(lambda p: sweep_row(cfg, p), points))
    else:
        rows = [sweep_row(cfg, p) for p in points]
    header = [*atlas.ARITY[cfg.class_id], *SWEEP_TAIL]
    if args.format == "json":
        emit(json_text({"command": "sweep", "class": cfg.class_id, "traced_qubit": cfg.traced_qubit,
                        "cww_prefactor": cfg.cww_prefactor, "columns": header, "rows": rows}), args.out)
    else:
        emit(csv_text(header, rows), args.out)
    return EXIT_OK


def cmd_validate(args) -> int:
    weights = tuple(args.tau3_weights) if args.tau3_weights else validation.TAU3_WEIGHTS
    checks = validation.run_validation(args.seed, weights, args.restarts)
    rows = [(c.status, c.name, c.metric, c.tolerance, c.detail) for c in checks]
    if args.format == "json":
        text = json_text({"command": "validate", "seed": args.seed,
                          "checks": [dict(zip(VALIDATE_HEADER, r)) for r in rows],
                          "passed": validation.exit_status(checks) == 0})
    else:
        text = csv_text(VALIDATE_HEADER, rows)
    if args.out is not None and args.out != "-":
        emit(text, args.out)
    for c in checks:
        print(c.line(), file=sys.stderr if args.out in (None, "-") else sys.stdout)
    if args.out in (None, "-"):
        emit(text, None)
    return validation.exit_status(checks)


def cmd_oracle(args) -> int:
    spec = spec_from_args(args)
    k = _default_qubit(spec, args.trace_qubit)
    meas = measure_from_args(args)
    mix = atlas.reduced_mixture(spec, k)
    rows = gap_report(mix, meas, m_max=args.m_max, restarts=args.restarts, seed=args.seed)
    table = [(r.m, r.oracle, r.engine, r.gap, r.inconsistent) for r in rows]
    if args.format == "json":
        emit(json_text({"command": "oracle", "class": spec.class_id, "params": spec.as_dict(), "traced_qubit": k,
                        "measure": meas.name, "cww_prefactor": meas.cww_prefactor,
                        "rows": [dict(zip(ORACLE_HEADER, r)) for r in table]}), args.out)
    else:
        emit(csv_text(ORACLE_HEADER, table), args.out)
    return EXIT_INCONSISTENT if any(r.inconsistent for r in rows) else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="threetangle", description="Convex roofs of the threetangle "
                                     "for rank-2 reductions of four-qubit class states.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("curve", help="characteristic curves E(p, phi) and the minimal curve")
    _common(p)
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("roof", help="engine roof with closed-form comparison")
    _common(p)
    p.add_argument("--variant", choices=list(atlas.VARIANTS), default=atlas.CORRECTED,
                   help="closed form to compare with")
    p.add_argument("--oracle", action="store_true", help="also run the brute-force oracle")
    p.add_argument("--m", type=int, default=DEFAULT_M, help="oracle decomposition size")
    p.add_argument("--restarts", type=int, default=RESTARTS)
    p.set_defaults(func=cmd_roof)

    p = sub.add_parser("sweep", help="roofs over a parameter range")
    _common(p, measure=False)
    p.add_argument("--range", dest="ranges", action="append", type=_parse_range, metavar="NAME=START:STOP:STEPS")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("validate", help="run the validation suite")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--restarts", type=int, default=RESTARTS)
    p.add_argument("--tau3-weights", type=float, nargs=3, default=None, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("oracle", help="brute-force roof for m = 2..m-max against the engine")
    _common(p)
    p.add_argument("--m-max", type=int, default=DEFAULT_M)
    p.add_argument("--restarts", type=int, default=RESTARTS)
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except OSError as exc:
        print(f"threetangle: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ThreeTangleError, ValueError) as exc:
        print(f"threetangle: {exc}", file=sys.stderr)
        return EXIT_IO
    except ArithmeticError as exc:
        print(f"threetangle: internal inconsistency: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT


if __name__ == "__main__":
    sys.exit(main())
