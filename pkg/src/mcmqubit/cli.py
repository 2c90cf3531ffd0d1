"""Command-line front end.

    python3 -m mcmqubit families
    python3 -m mcmqubit compute --family tetrahedron --p 1
    python3 -m mcmqubit sweep --family two_noisy --p 1 --param theta --start 0.1 --stop 1.5 --steps 20
    python3 -m mcmqubit verify --ensemble states.json --tolerance 1e-6

Exit codes: 0 success, 2 bad input (parse or parameter failure), 3 a
degenerate state or a failed sweep row (the report is still written),
4 verification failure.

Sweep columns, in order: ``param, value, family, p, theta, n, status,
message, q_inc, complete``, then ``helstrom_error, usd_inconclusive`` for
two-state families, then for each state index ``k`` up to the largest
ensemble size ``q{k}, mu{k}, C{k}, t{k}, sigma{k}_x, sigma{k}_y, sigma{k}_z,
m{k}_x, m{k}_y, m{k}_z, a{k}, dual{k}, degenerate{k}``. Missing values are
empty in CSV and null in JSON. Floats are written with ``repr`` so files
parse back to the exact doubles.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .baselines import TwoStateProblem, helstrom_error, usd_inconclusive
from .ensemble import Ensemble
from .families import (
    DESCRIPTIONS,
    FAMILIES,
    EnsembleFormatError,
    FamilySpec,
    build,
    parse_ensemble,
    random_ensemble,
)
from .inconclusive import InconclusiveSolverError, minimize_inconclusive
from .mcm import TOL_PURITY, dual_gap, mcm_all
from .oracle import GridSpec, OracleError, brute_min_inconclusive, grid_max_confidence
from .qubit import depolarize, purity

EXIT_OK, EXIT_INPUT, EXIT_DEGENERATE, EXIT_VERIFY = 0, 2, 3, 4
DEFAULT_SEED = 20240501
STATE_FIELDS = ("q", "mu", "C", "t", "sigma_x", "sigma_y", "sigma_z", "m_x", "m_y", "m_z", "a", "dual", "degenerate")
HEAD_FIELDS = ("param", "value", "family", "p", "theta", "n", "status", "message", "q_inc", "complete")
TWO_STATE_FIELDS = ("helstrom_error", "usd_inconclusive")
DUAL_BAND = (-1e-9, 1e-8)


class InputError(Exception):
    pass


@dataclass(frozen=True)
class SweepSpec:
    param: str
    start: float
    stop: float
    steps: int
    family: FamilySpec | None = None
    ensemble: Ensemble | None = None
    fmt: str = "csv"

    def __post_init__(self):
        if self.steps < 2:
            raise ValueError("a sweep needs at least two steps")
        if (self.family is None) == (self.ensemble is None):
            raise ValueError("sweep either a family or an ensemble file")
        if self.family is not None and self.param not in FAMILIES[self.family.family]:
            raise ValueError(f"{self.family.family} has no parameter {self.param!r}; it takes {FAMILIES[self.family.family]}")
        if self.ensemble is not None and self.param != "p":
            raise ValueError("an ensemble file can only be swept in the depolarising visibility p")

    def values(self) -> list:
        vals = np.linspace(self.start, self.stop, self.steps)
        if self.param == "n":
            if np.any(vals != np.round(vals)):
                raise ValueError("an n sweep must land on integers")
            return [int(v) for v in vals]
        return [float(v) for v in vals]


def _floats(v):
    return None if v is None else [float(c) for c in v]


def analyse(ens: Ensemble) -> dict:
    """Maximum-confidence data for every state plus the optimal inconclusive completion."""
    results = mcm_all(ens)
    states = []
    for r in results:
        states.append({
            "index": r.index, "q": float(r.prior), "mu": float(r.mu), "C": float(r.confidence),
            "t": r.t, "sigma": _floats(r.sigma_bloch), "m_hat": _floats(r.m_hat),
            "a": 0.0, "dual": float(dual_gap(ens, r)), "degenerate": r.degenerate,
        })
    active = [r.index for r in results if not r.degenerate]
    if active:
        comp = minimize_inconclusive(ens, [results[k].m_hat for k in active])
        for k, a in zip(active, comp.weights):
            states[k]["a"] = float(a)
        q_inc, complete = comp.q_inc, comp.complete
    else:
        # no state can be singled out: the only sensible measurement is I
        q_inc, complete = 1.0, False
    return {"label": ens.label, "states": states, "q_inc": float(q_inc), "complete": complete,
            "degenerate": [s["index"] for s in states if s["degenerate"]]}


def two_state_baselines(ens: Ensemble) -> dict:
    q0, q1 = ens.priors
    out = {"helstrom_error": helstrom_error(TwoStateProblem(q0, q1, *ens.states)), "usd_inconclusive": None}
    pure = all(purity(s) >= 1 - TOL_PURITY for s in ens.states)
    if pure and np.linalg.norm(ens.blochs[0] - ens.blochs[1]) > 1e-9:
        out["usd_inconclusive"] = usd_inconclusive(q0, ens.states[0], q1, ens.states[1])
    return out


def _depolarized(ens: Ensemble, p: float) -> Ensemble:
    return Ensemble(ens.priors, tuple(depolarize(s, p) for s in ens.states), ens.label)


def sweep_row(job) -> dict:
    """One sweep row; ``job = (spec, value)``. Never raises: failures land in ``status``."""
    spec, value = job
    row = {"param": spec.param, "value": value}
    try:
        if spec.family is not None:
            fam = replace(spec.family, **{spec.param: value})
            ens = build(fam)
            row.update(family=fam.family, **{k: fam.params().get(k) for k in ("p", "theta", "n")})
        else:
            ens = _depolarized(spec.ensemble, value)
            row.update(family="file", p=value, theta=None, n=len(ens))
        report = analyse(ens)
        if len(ens) == 2:
            row.update(two_state_baselines(ens))
        row.update(status="degenerate" if report["degenerate"] else "ok", message="",
                   q_inc=report["q_inc"], complete=report["complete"], states=report["states"])
    except (ValueError, ArithmeticError, InconclusiveSolverError) as exc:
        row.update(status="error", message=f"{type(exc).__name__}: {exc}", states=[])
    return row


def flatten_row(row: dict, width: int, two_state: bool) -> dict:
    flat = {k: row.get(k) for k in HEAD_FIELDS}
    if two_state:
        flat.update({k: row.get(k) for k in TWO_STATE_FIELDS})
    states = row.get("states", [])
    for k in range(width):
        s = states[k] if k < len(states) else None
        vals = [None] * len(STATE_FIELDS)
        if s is not None:
            sig = s["sigma"] or [None] * 3
            m = s["m_hat"] or [None] * 3
            vals = [s["q"], s["mu"], s["C"], s["t"], *sig, *m, s["a"], s["dual"], s["degenerate"]]
        flat.update(dict(zip(_state_columns(k), vals)))
    return flat


def _state_columns(k):
    out = []
    for name in STATE_FIELDS:
        head, _, axis = name.partition("_")
        out.append(f"{head}{k}_{axis}" if axis else f"{head}{k}")
    return out


def sweep_columns(width: int, two_state: bool) -> list[str]:
    cols = list(HEAD_FIELDS) + (list(TWO_STATE_FIELDS) if two_state else [])
    for k in range(width):
        cols += _state_columns(k)
    return cols


def run_sweep(spec: SweepSpec, jobs: int = 1) -> tuple[list[str], list[dict]]:
    work = [(spec, v) for v in spec.values()]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(sweep_row, work))
    else:
        rows = [sweep_row(w) for w in work]
    width = max([len(r["states"]) for r in rows] + [0])
    if spec.family is not None:
        two_state = spec.family.family == "two_noisy"
    else:
        two_state = len(spec.ensemble) == 2
    flat = [flatten_row(r, width, two_state) for r in rows]
    return sweep_columns(width, two_state), flat


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def to_csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(r.get(c)) for c in columns])
    return buf.getvalue()


def read_csv(text: str) -> list[dict]:
    """Inverse of :func:`to_csv`: numbers become floats, empty cells ``None``."""
    out = []
    for rec in csv.DictReader(io.StringIO(text)):
        row = {}
        for k, v in rec.items():
            if v == "":
                row[k] = None
            elif v in ("true", "false"):
                row[k] = v == "true"
            else:
                try:
                    row[k] = float(v)
                except ValueError:
                    row[k] = v
        out.append(row)
    return out


def _json_safe(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    return obj


def _num(v, fmt="{:.10f}"):
    return "-" if v is None else fmt.format(v)


def _vec(v):
    return "-" if v is None else "(" + ", ".join(f"{c:+.6f}" for c in v) + ")"


def format_report(report: dict) -> str:
    lines = []
    if report.get("label"):
        lines.append(report["label"])
    lines.append(f"{'x':>3} {'q':>10} {'mu':>13} {'C*':>13} {'t':>13} {'sigma':>30} {'m_hat':>30} {'a':>13} {'dual':>11}")
    for s in report["states"]:
        flag = "  degenerate" if s["degenerate"] else ""
        lines.append(f"{s['index']:>3} {s['q']:>10.6f} {_num(s['mu']):>13} {_num(s['C']):>13} {_num(s['t']):>13} "
                     f"{_vec(s['sigma']):>30} {_vec(s['m_hat']):>30} {_num(s['a']):>13} {s['dual']:>11.2e}{flag}")
    lines.append(f"q_inc = {report['q_inc']:.10f}   complete = {report['complete']}")
    return "\n".join(lines) + "\n"


def report_csv(report: dict) -> str:
    cols = ["index", "q", "mu", "C", "t", "sigma_x", "sigma_y", "sigma_z", "m_x", "m_y", "m_z", "a", "dual",
            "degenerate", "q_inc", "complete"]
    rows = []
    for s in report["states"]:
        sig = s["sigma"] or [None] * 3
        m = s["m_hat"] or [None] * 3
        rows.append(dict(zip(cols, [s["index"], s["q"], s["mu"], s["C"], s["t"], *sig, *m, s["a"], s["dual"],
                                    s["degenerate"], report["q_inc"], report["complete"]])))
    return to_csv(cols, rows)


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _theta(args):
    return math.radians(args.theta) if args.degrees else args.theta


def load_ensemble(args) -> Ensemble:
    sources = [args.ensemble is not None, args.family is not None, args.random is not None]
    if sum(sources) != 1:
        raise InputError("give exactly one of --ensemble, --family or --random")
    if args.ensemble is not None:
        try:
            with open(args.ensemble, "rb") as fh:
                return parse_ensemble(fh.read())
        except OSError as exc:
            raise InputError(f"cannot read {args.ensemble}: {exc}") from exc
    if args.family is not None:
        return build(family_spec(args))
    if args.random < 1:
        raise InputError("--random needs a positive state count")
    return random_ensemble(args.random, args.seed, label=f"random(n={args.random}, seed={args.seed})")


def family_spec(args) -> FamilySpec:
    kw = {"family": args.family}
    if args.p is not None:
        kw["p"] = args.p
    if args.theta is not None:
        kw["theta"] = _theta(args)
    if args.n is not None:
        kw["n"] = args.n
    return FamilySpec(**kw)


def cmd_families(args) -> int:
    rows = [{"family": name, "params": " ".join(FAMILIES[name]), "description": DESCRIPTIONS[name]} for name in FAMILIES]
    if args.format == "json":
        _emit(json.dumps(rows, indent=2) + "\n", args.out)
    elif args.format == "csv":
        _emit(to_csv(["family", "params", "description"], rows), args.out)
    else:
        _emit("".join(f"{r['family']:<18} {r['params']:<8} {r['description']}\n" for r in rows), args.out)
    return EXIT_OK


def cmd_compute(args) -> int:
    ens = load_ensemble(args)
    report = analyse(ens)
    if args.index is not None:
        if not 0 <= args.index < len(ens):
            raise InputError(f"--index {args.index} out of range for {len(ens)} states")
        report["states"] = [report["states"][args.index]]
    if args.format == "json":
        _emit(json.dumps(_json_safe(report), indent=2) + "\n", args.out)
    elif args.format == "csv":
        _emit(report_csv(report), args.out)
    else:
        _emit(format_report(report), args.out)
    if report["degenerate"]:
        print(f"degenerate state(s) {report['degenerate']}: ensemble state equals the state of interest",
              file=sys.stderr)
        return EXIT_DEGENERATE
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.param is None:
        raise InputError("--param is required for a sweep")
    start, stop = args.start, args.stop
    if args.param == "theta" and args.degrees:
        start, stop = math.radians(start), math.radians(stop)
    if args.family is not None:
        base = {"family": args.family}
        # parameters not swept keep their flag values; the swept one is filled per row
        for name in FAMILIES.get(args.family, ()):
            if name != args.param and getattr(args, name) is not None:
                base[name] = _theta(args) if name == "theta" else getattr(args, name)
        try:
            fam = FamilySpec(**base)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
        spec = SweepSpec(args.param, start, stop, args.steps, family=fam, fmt=args.format)
    else:
        if args.ensemble is None:
            raise InputError("sweep needs --family or --ensemble")
        spec = SweepSpec(args.param, start, stop, args.steps, ensemble=load_ensemble(args), fmt=args.format)
    values = spec.values()
    if spec.family is not None:
        for v in values:
            replace(spec.family, **{spec.param: v})  # range check before any work
    columns, rows = run_sweep(spec, args.jobs)
    if args.format == "json":
        _emit(json.dumps(_json_safe({"columns": columns, "rows": rows}), indent=2) + "\n", args.out)
    else:
        _emit(to_csv(columns, rows), args.out)
    bad = [r["value"] for r in rows if r["status"] != "ok"]
    if bad:
        print(f"{len(bad)} row(s) flagged degenerate or failed at {args.param} = {bad}", file=sys.stderr)
        return EXIT_DEGENERATE
    return EXIT_OK


def verify(ens: Ensemble, tolerance: float, q_tolerance: float, grid: GridSpec) -> tuple[dict, list[str]]:
    """Compare the closed forms against the brute-force oracle.

    A state fails if the confidence gap, or the oracle's own resolution, exceeds
    ``tolerance`` (a tolerance finer than the grid can resolve cannot be
    certified), or if the dual residual leaves ``[-1e-9, 1e-8]``.
    """
    report = analyse(ens)
    failures = []
    for s in report["states"]:
        if s["degenerate"]:
            s.update(oracle=None, gap=None, resolution=None, verified="skipped")
            continue
        x = s["index"]
        found = grid_max_confidence(ens, x, grid)
        gap = abs(s["C"] - found.value)
        s.update(oracle=found.value, gap=gap, resolution=found.spread)
        reasons = []
        if gap > tolerance:
            reasons.append(f"confidence gap {gap:.3g} > {tolerance:.3g}")
        if found.spread > tolerance:
            reasons.append(f"grid resolution {found.spread:.3g} cannot certify {tolerance:.3g}")
        if not DUAL_BAND[0] <= s["dual"] <= DUAL_BAND[1]:
            reasons.append(f"dual residual {s['dual']:.3g} outside {DUAL_BAND}")
        s["verified"] = "ok" if not reasons else "; ".join(reasons)
        if reasons:
            failures.append(f"state {x}: " + "; ".join(reasons))

    active = [s for s in report["states"] if not s["degenerate"]]
    report["q_inc_oracle"] = None
    if 1 <= len(active) <= 3:
        try:
            _, q_brute = brute_min_inconclusive(ens, [s["m_hat"] for s in active])
        except OracleError as exc:
            failures.append(f"inconclusive oracle: {exc}")
        else:
            report["q_inc_oracle"] = q_brute
            if abs(q_brute - report["q_inc"]) > q_tolerance:
                failures.append(f"q_inc {report['q_inc']:.10g} vs oracle {q_brute:.10g}")
    report["failures"] = failures
    return report, failures


def cmd_verify(args) -> int:
    ens = load_ensemble(args)
    grid = GridSpec(resolution=args.resolution, iterations=args.iterations)
    report, failures = verify(ens, args.tolerance, args.q_tolerance, grid)
    if args.format == "json":
        _emit(json.dumps(_json_safe(report), indent=2) + "\n", args.out)
    else:
        cols = ["index", "C", "oracle", "gap", "resolution", "dual", "verified"]
        if args.format == "csv":
            _emit(to_csv(cols, report["states"]), args.out)
        else:
            lines = [f"{'x':>3} {'C*':>14} {'oracle':>14} {'gap':>10} {'resolution':>10} {'dual':>10}  verified"]
            for s in report["states"]:
                lines.append(f"{s['index']:>3} {_num(s['C'], '{:.12f}'):>14} {_num(s['oracle'], '{:.12f}'):>14} "
                             f"{_num(s['gap'], '{:.2e}'):>10} {_num(s['resolution'], '{:.2e}'):>10} "
                             f"{s['dual']:>10.2e}  {s['verified']}")
            if report["q_inc_oracle"] is not None:
                lines.append(f"q_inc = {report['q_inc']:.10f}   oracle = {report['q_inc_oracle']:.10f}")
            _emit("\n".join(lines) + "\n", args.out)
    if failures:
        for f in failures:
            print("verification failed: " + f, file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mcmqubit", description="Maximum-confidence measurements for qubit ensembles.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, source=True):
        p.add_argument("--format", choices=("table", "csv", "json"), default="table")
        p.add_argument("--out", help="write to this file instead of stdout")
        if source:
            p.add_argument("--ensemble", help="ensemble JSON file")
            p.add_argument("--family", choices=sorted(FAMILIES))
            p.add_argument("--random", type=int, help="random ensemble with this many states")
            p.add_argument("--seed", type=int, default=DEFAULT_SEED)
            p.add_argument("--p", type=float)
            p.add_argument("--theta", type=float)
            p.add_argument("--n", type=int)
            p.add_argument("--degrees", action="store_true", help="angles on the command line are in degrees")

    common(sub.add_parser("families", help="list built-in families"), source=False)

    p = sub.add_parser("compute", help="maximum-confidence measurement and inconclusive completion")
    common(p)
    p.add_argument("--index", type=int, help="report a single state (default: all)")

    p = sub.add_parser("sweep", help="tabulate a family over one parameter")
    common(p)
    p.set_defaults(format="csv")
    p.add_argument("--param", choices=("p", "theta", "n"))
    p.add_argument("--start", type=float, required=True)
    p.add_argument("--stop", type=float, required=True)
    p.add_argument("--steps", type=int, default=20)
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("verify", help="check closed forms against the brute-force oracle")
    common(p)
    p.add_argument("--tolerance", type=float, default=1e-6)
    p.add_argument("--q-tolerance", type=float, default=1e-5)
    p.add_argument("--resolution", type=int, default=GridSpec.resolution)
    p.add_argument("--iterations", type=int, default=GridSpec.iterations)
    return parser


COMMANDS = {"families": cmd_families, "compute": cmd_compute, "sweep": cmd_sweep, "verify": cmd_verify}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (InputError, EnsembleFormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
