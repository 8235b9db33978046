"""Command-line front end.

Every subcommand builds a :class:`RunConfig`, dispatches to the library and
emits JSON (validated against the shipped schemas) or CSV.  Without
``--output`` the artifact goes to stdout; with it the file is written
atomically and stdout carries a one-line summary.

Exit codes: 0 success, 2 invalid input, 3 no solution, 4 numerical failure
or a failed verification.
"""

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources

import jsonschema
import numpy as np

from . import __version__
from .action import ToralFamily, compactify, gauss_bonnet_weyl_check, volume_expansion_fit
from .black_holes import (beta_of_rplus, conformal_infinity, make_black_hole,
                          mass_of_rplus, masses_for_beta)
from .dehn_surgery import (FlatTorus2, cusp_limit_distance, fill_3d, fill_4d,
                           isometry_key, primitive_geodesics)
from .errors import (ConsistencyError, DomainError, FiberTypeError, InvalidMetricError,
                     NumericalFailure)
from .fg_expansion import BoundaryMetric, fg_coefficients, geodesic_compactification
from .linear_bach import check_polynomials
from .tensor_core import hyperbolic_ball, hyperbolic_cusp

__all__ = ["RunConfig", "run", "sweep", "main", "build_parser"]

EXIT_OK, EXIT_INVALID, EXIT_NO_SOLUTION, EXIT_NUMERICAL = 0, 2, 3, 4
OUTPUT_DIR_ENV = "AHEINSTEIN_OUTPUT_DIR"

SUBCOMMANDS = ("blackhole", "match-boundary", "fg", "renvol", "dehn", "bach", "sweep",
               "verify")

# reporting thresholds; overrides may only loosen them
DEFAULT_TOLERANCES = {
    "g1_norm": 1e-8,
    "trace_g3": 1e-6,
    "window_gap": 1e-4,
    "gauss_bonnet_gap": 1e-3,
    "matching_residual": 1e-12,
    "boundary_gap": 1e-8,
}

PARAMETERS = {
    "blackhole": {"n": int, "c": int, "m": float, "genus": int, "gram": "matrix"},
    "match-boundary": {"n": int, "c": int, "beta": float, "genus": int, "gram": "matrix"},
    "fg": {"family": str, "n": int, "c": int, "m": float, "genus": int, "gram": "matrix",
           "order": int},
    "renvol": {"family": str, "c": int, "m": float, "genus": int, "gram": "matrix",
               "gauss_bonnet": bool},
    "dehn": {"action": str, "gram": "matrix", "sigma": "pair", "beta2": float,
             "L_max": float, "window": "pair"},
    "bach": {"check_polynomials": bool, "draws": int},
    "sweep": {"kind": str, "c": int, "start": float, "stop": float, "count": int,
              "jobs": int},
    "verify": {"only": "ints"},
}


class InvalidInput(ValueError):
    pass


class NoSolution(RuntimeError):
    def __init__(self, message, payload=None):
        super().__init__(message)
        self.payload = payload


@dataclass
class RunConfig:
    subcommand: str
    parameters: dict = field(default_factory=dict)
    output: str = None
    format: str = "json"
    tolerances: dict = field(default_factory=dict)
    seed: int = 0

    KEYS = ("subcommand", "parameters", "output", "format", "tolerances", "seed")

    def __post_init__(self):
        if self.subcommand not in SUBCOMMANDS:
            raise InvalidInput(f"unknown subcommand {self.subcommand!r}")
        if self.format not in ("json", "csv"):
            raise InvalidInput("format must be json or csv")
        allowed = PARAMETERS[self.subcommand]
        unknown = set(self.parameters) - set(allowed)
        if unknown:
            raise InvalidInput(f"unknown parameters for {self.subcommand}: {sorted(unknown)}")
        self.parameters = {k: _coerce(k, v, allowed[k]) for k, v in self.parameters.items()
                           if v is not None}
        bad = set(self.tolerances) - set(DEFAULT_TOLERANCES)
        if bad:
            raise InvalidInput(f"unknown tolerance keys: {sorted(bad)}")
        for k, v in self.tolerances.items():
            if not float(v) >= DEFAULT_TOLERANCES[k]:
                raise InvalidInput(f"tolerance {k} may only be loosened "
                                   f"(default {DEFAULT_TOLERANCES[k]:g})")
        self.tolerances = {**DEFAULT_TOLERANCES,
                           **{k: float(v) for k, v in self.tolerances.items()}}
        if not isinstance(self.seed, int):
            raise InvalidInput("seed must be an integer")

    @classmethod
    def from_dict(cls, data):
        unknown = set(data) - set(cls.KEYS)
        if unknown:
            raise InvalidInput(f"unknown config keys: {sorted(unknown)}")
        if "subcommand" not in data:
            raise InvalidInput("config needs a subcommand")
        return cls(**data)


def _coerce(key, value, kind):
    try:
        if kind == "matrix":
            vals = _numbers(value)
            size = int(round(len(vals) ** 0.5))
            if size * size != len(vals):
                raise InvalidInput(f"{key} must be a square matrix in row-major order")
            G = np.array(vals, dtype=float).reshape(size, size)
            if not np.allclose(G, G.T) or np.any(np.linalg.eigvalsh(G) <= 0):
                raise InvalidInput(f"{key} must be symmetric positive definite")
            return G.tolist()
        if kind == "pair":
            vals = _numbers(value)
            if len(vals) != 2:
                raise InvalidInput(f"{key} must have two entries")
            return vals
        if kind == "ints":
            return [int(v) for v in _numbers(value)]
        if kind is bool:
            return bool(value)
        if kind is int:
            if isinstance(value, float) and not value.is_integer():
                raise ValueError
            return int(value)
        return kind(value)
    except InvalidInput:
        raise
    except (TypeError, ValueError) as exc:
        raise InvalidInput(f"bad value for {key}: {value!r}") from exc


def _numbers(value):
    if isinstance(value, str):
        items = [v.strip() for v in value.replace(";", ",").split(",") if v.strip()]
    else:
        items = np.asarray(value, dtype=object).reshape(-1).tolist()
    return [_number(v) for v in items]


def _number(v):
    if isinstance(v, str):
        try:
            return int(v)
        except ValueError:
            return float(v)
    return v if isinstance(v, (int, float)) else float(v)


# -- handlers ---------------------------------------------------------------

def _black_hole(p):
    c = p.get("c")
    if c is None or "m" not in p:
        raise InvalidInput("--c and --m are required")
    gram = np.array(p["gram"]) if "gram" in p else None
    return make_black_hole(p.get("n", 4), c, p["m"], genus=p.get("genus", 2), gram=gram)


def _compactification(p):
    family = p.get("family", "blackhole")
    if family == "ball":
        return geodesic_compactification(hyperbolic_ball(4), BoundaryMetric.round_sphere(1.0))
    if family == "cusp":
        gram = np.array(p.get("gram", np.eye(3).tolist()))
        return geodesic_compactification(hyperbolic_cusp(gram), BoundaryMetric.flat_torus(gram))
    if family == "blackhole":
        return compactify(_black_hole(p))
    raise InvalidInput("family must be ball, cusp or blackhole")


def cmd_blackhole(cfg):
    bh = _black_hole(cfg.parameters)
    out = {"schema": "blackhole/1", **bh.to_dict(),
           "euler_characteristic": bh.euler_characteristic,
           "boundary": conformal_infinity(bh).to_dict()}
    gram = np.array(cfg.parameters["gram"]) if "gram" in cfg.parameters else None
    rivals = masses_for_beta(bh.c, bh.beta, bh.dimension, cfg.parameters.get("genus", 2), gram)
    out["competitors"] = rivals.to_dict()["competitors"]
    return out, f"r_plus={bh.r_plus:.12g} beta={bh.beta:.12g}"


def cmd_match_boundary(cfg):
    p = cfg.parameters
    if "c" not in p or "beta" not in p:
        raise InvalidInput("--c and --beta are required")
    gram = np.array(p["gram"]) if "gram" in p else None
    comp = masses_for_beta(p["c"], p["beta"], p.get("n", 4), p.get("genus", 2), gram)
    out = {"schema": "match_boundary/1", "c": p["c"], "beta": p["beta"], **comp.to_dict(),
           "black_hole_count": len(comp.black_holes), "masses": comp.masses}
    if not comp.members:
        raise NoSolution("no filling with this boundary", out)
    note = "" if comp.black_holes else " (no black-hole branch)"
    return out, f"{len(comp.black_holes)} black holes, {len(comp.members)} competitors{note}"


def cmd_fg(cfg):
    p = cfg.parameters
    comp = _compactification(p)
    exp = fg_coefficients(comp, p.get("order", 3))
    out = {**exp.to_dict(), "schema": "fg_expansion/1"}
    tol = cfg.tolerances
    if exp.order >= 3:
        r = out["residuals"]
        out["pass"] = bool(r["g1_norm"] < tol["g1_norm"] and r["trace_g3"] < tol["trace_g3"])
    return out, f"order {exp.order}, remainder {exp.remainder_estimate:.2e}"


def cmd_renvol(cfg):
    p = cfg.parameters
    comp = _compactification(p)
    exp = volume_expansion_fit(comp)
    out = {"schema": "renvol/1", **exp.to_dict(),
           "window_ok": bool(exp.window_gap <= cfg.tolerances["window_gap"])}
    if p.get("gauss_bonnet"):
        chi = comp.source.params.get("chi")
        if chi is None:
            bh = _black_hole(p)
            chi = bh.euler_characteristic
        gbw = gauss_bonnet_weyl_check(comp, chi)
        out["gauss_bonnet"] = {k: gbw[k] for k in ("lhs", "rhs", "relative_gap", "chi",
                                                   "weyl_energy", "volume_bound_holds")}
        out["gauss_bonnet"]["pass"] = bool(gbw["relative_gap"] < cfg.tolerances["gauss_bonnet_gap"])
    return out, f"V_ren={exp.V_ren:.12g}"


def cmd_dehn(cfg):
    p = cfg.parameters
    action = p.get("action")
    torus = FlatTorus2(tuple(map(tuple, p.get("gram", [[1.0, 0.0], [0.0, 1.0]]))))
    if action == "enumerate":
        L_max = p.get("L_max")
        if L_max is None:
            raise InvalidInput("--L-max is required")
        rows = [{"p": s[0], "q": s[1], "length": ell,
                 "orbit": list(isometry_key(torus, s)[0])}
                for s, ell in primitive_geodesics(torus, L_max)]
        out = {"schema": "dehn_enumerate/1", "torus": torus.to_dict(), "L_max": L_max,
               "classes": rows}
        return out, f"{len(rows)} primitive classes"
    if action not in ("fill3d", "fill4d"):
        raise InvalidInput("dehn action must be fill3d, fill4d or enumerate")
    if "sigma" not in p:
        raise InvalidInput("--sigma is required")
    sigma = tuple(int(v) for v in p["sigma"])
    if action == "fill3d":
        f = fill_3d(torus, sigma)
    else:
        if "beta2" not in p:
            raise InvalidInput("--beta2 is required for fill4d")
        f = fill_4d(torus, sigma, p["beta2"])
    out = {"schema": "dehn/1", **f.to_dict(), "torus": torus.to_dict(),
           "isometry_key": [list(isometry_key(torus, sigma)[0])]}
    if "window" in p:
        out["cusp_limit_distance"] = cusp_limit_distance(f, p["window"])
        out["window"] = p["window"]
    tol = cfg.tolerances
    out["pass"] = bool(f.matching_residual <= tol["matching_residual"]
                       and f.boundary_gap <= tol["boundary_gap"])
    return out, f"L={f.L:.12g} R={f.R:.12g} core_length={f.core_length:.6g}"


def cmd_bach(cfg):
    p = cfg.parameters
    if not p.get("check_polynomials"):
        raise InvalidInput("bach needs --check-polynomials")
    rep = check_polynomials(seed=cfg.seed, draws=p.get("draws", 100))
    out = {"schema": "bach/1", **rep}
    k = rep["kernel_dimension"]
    summary = (f"{'PASS' if rep['passed'] else 'FAIL'} kernel {k['bach_gauge_scalar']} "
               f"(without scalar condition {k['bach_gauge']}), parameters {rep['parameter_count']}")
    return out, summary


def cmd_verify(cfg):
    from .verification import run_verify

    results = run_verify()
    only = cfg.parameters.get("only")
    if only:
        results = [r for r in results if r.number in only]
    out = {"schema": "verify/1", "passed": all(r.passed and r.within_budget for r in results),
           "results": [r.to_dict() for r in results],
           "lines": [r.line() for r in results]}
    ok = sum(r.passed and r.within_budget for r in results)
    return out, f"{ok}/{len(results)} checks passed"


# -- sweeps -----------------------------------------------------------------

SWEEP_HEADERS = {
    "beta": ["r_plus", "beta", "m"],
    "masses": ["beta", "branch_count", "m_small", "m_large"],
    "renvol": ["m", "V_ren", "window_gap"],
}


def _sweep_row(kind, c, x):
    if kind == "beta":
        try:
            return [x, beta_of_rplus(c, x), mass_of_rplus(c, x)]
        except DomainError:
            return [x, float("nan"), float("nan")]
    if kind == "masses":
        ms = masses_for_beta(c, x).masses
        return [x, len(ms), ms[0] if ms else float("nan"), ms[-1] if ms else float("nan")]
    exp = volume_expansion_fit(ToralFamily().member(x))
    return [x, exp.V_ren, exp.window_gap]


def _sweep_star(args):
    return _sweep_row(*args)


def sweep(cfg):
    """Rows in input order; parallel over points when ``jobs`` > 1."""
    p = cfg.parameters
    kind = p.get("kind")
    if kind not in SWEEP_HEADERS:
        raise InvalidInput(f"sweep kind must be one of {sorted(SWEEP_HEADERS)}")
    count = p.get("count", 0)
    if count < 2 or "start" not in p or "stop" not in p:
        raise InvalidInput("sweep needs --start, --stop and --count >= 2")
    c = p.get("c", 0 if kind == "renvol" else 1)
    xs = np.linspace(p["start"], p["stop"], count).tolist()
    tasks = [(kind, c, x) for x in xs]
    jobs = max(1, p.get("jobs", 1))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_star, tasks))
    else:
        rows = [_sweep_row(*t) for t in tasks]
    return SWEEP_HEADERS[kind], rows


def _fmt(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def cmd_sweep(cfg):
    header, rows = sweep(cfg)
    out = {"schema": "sweep/1", "header": header, "rows": rows}
    return out, f"{len(rows)} rows"


HANDLERS = {
    "blackhole": cmd_blackhole,
    "match-boundary": cmd_match_boundary,
    "fg": cmd_fg,
    "renvol": cmd_renvol,
    "dehn": cmd_dehn,
    "bach": cmd_bach,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
}

RENVOL_HEADER = ["family", "c", "m", "v0", "v2", "V_ren", "weyl_energy", "chi", "gap_3_7"]


def _renvol_row(p, payload):
    gbw = payload.get("gauss_bonnet", {})
    family = p.get("family", "blackhole")
    row = [family, p.get("c", ""), p.get("m", ""), payload["v0"], payload["v2"], payload["V_ren"]]
    return row + [gbw.get(k, "") for k in ("weyl_energy", "chi", "relative_gap")]


# -- emission ---------------------------------------------------------------

def _schema(name):
    text = resources.files("aheinstein").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if np.isfinite(v) else None
    return obj


def render(cfg, payload):
    """Text of the artifact for ``payload`` in the configured format."""
    if cfg.format == "csv":
        if cfg.subcommand == "sweep":
            return _csv_text(payload["header"], payload["rows"])
        if cfg.subcommand == "dehn" and "classes" in payload:
            rows = [[r["p"], r["q"], r["length"]] for r in payload["classes"]]
            return _csv_text(["p", "q", "length"], rows)
        if cfg.subcommand == "renvol":
            return _csv_text(RENVOL_HEADER, [_renvol_row(cfg.parameters, payload)])
        raise InvalidInput(f"csv output is not available for {cfg.subcommand}")
    data = _clean(payload)
    jsonschema.validate(data, _schema(data["schema"].split("/")[0]))
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def _resolve_output(path):
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not os.path.isabs(path):
        return os.path.join(base, path)
    return path


def write_atomic(path, text):
    path = _resolve_output(path)
    folder = os.path.dirname(os.path.abspath(path))
    os.makedirs(folder, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def run(cfg, stdout=None, stderr=None):
    """Execute ``cfg``; returns the exit status."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    status = EXIT_OK
    try:
        payload, summary = HANDLERS[cfg.subcommand](cfg)
        if cfg.subcommand == "verify" and not payload["passed"]:
            status = EXIT_NUMERICAL
    except NoSolution as exc:
        payload, summary, status = exc.payload, str(exc), EXIT_NO_SOLUTION
    except (InvalidInput, DomainError, FiberTypeError, InvalidMetricError) as exc:
        print(f"invalid input: {exc}", file=stderr)
        return EXIT_INVALID
    except (NumericalFailure, ConsistencyError) as exc:
        print(f"numerical failure: {exc}", file=stderr)
        return EXIT_NUMERICAL
    try:
        text = render(cfg, payload)
    except InvalidInput as exc:
        print(f"invalid input: {exc}", file=stderr)
        return EXIT_INVALID
    if cfg.output:
        path = write_atomic(cfg.output, text)
        print(f"{cfg.subcommand}: {summary} -> {path}", file=stdout)
    else:
        stdout.write(text)
    return status


# -- argument parsing -------------------------------------------------------

def _add_common(p):
    p.add_argument("--output", "-o", help="write the artifact here (atomically)")
    p.add_argument("--format", choices=("json", "csv"), help="default json (csv for sweep)")
    p.add_argument("--tol", action="append", default=[], metavar="KEY=VALUE",
                   help="loosen a reporting tolerance")
    p.add_argument("--seed", type=int, default=0)


def _add_family(p, with_family=True):
    if with_family:
        p.add_argument("--family", choices=("blackhole", "ball", "cusp"), default="blackhole")
    p.add_argument("--c", type=int, help="horizon curvature: +1, 0 or -1")
    p.add_argument("--m", type=float, help="mass parameter")
    p.add_argument("--genus", type=int)
    p.add_argument("--gram", help="flat fiber Gram matrix, row-major, comma separated")


def build_parser():
    parser = argparse.ArgumentParser(prog="aheinstein",
                                     description="AH Einstein metric toolkit")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--config", help="JSON run configuration (replaces flags)")
    sub = parser.add_subparsers(dest="subcommand")

    p = sub.add_parser("blackhole", help="horizon radius, period and boundary of a black hole")
    _add_family(p, with_family=False)
    p.add_argument("--n", type=int)
    _add_common(p)

    p = sub.add_parser("match-boundary", help="all fillings of S^1(beta) x Sigma")
    p.add_argument("--c", type=int)
    p.add_argument("--beta", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--genus", type=int)
    p.add_argument("--gram")
    _add_common(p)

    p = sub.add_parser("fg", help="FG coefficients of a geodesic compactification")
    _add_family(p)
    p.add_argument("--n", type=int)
    p.add_argument("--order", type=int)
    _add_common(p)

    p = sub.add_parser("renvol", help="renormalized volume and volume expansion")
    _add_family(p)
    p.add_argument("--gauss-bonnet", action="store_true", default=None)
    _add_common(p)

    p = sub.add_parser("dehn", help="Dehn fillings of a flat torus")
    p.add_argument("action", choices=("fill3d", "fill4d", "enumerate"))
    p.add_argument("--gram", help="torus Gram matrix, row-major (default 1,0,0,1)")
    p.add_argument("--sigma", help="primitive class p,q")
    p.add_argument("--beta2", type=float)
    p.add_argument("--L-max", dest="L_max", type=float)
    p.add_argument("--window", help="t window lo,hi for the cusp comparison")
    _add_common(p)

    p = sub.add_parser("bach", help="exact checks of the linearized Bach equation")
    p.add_argument("--check-polynomials", action="store_true", default=None)
    p.add_argument("--draws", type=int)
    _add_common(p)

    p = sub.add_parser("sweep", help="parameter sweeps as CSV")
    p.add_argument("--kind", choices=sorted(SWEEP_HEADERS), required=False)
    p.add_argument("--c", type=int)
    p.add_argument("--start", type=float)
    p.add_argument("--stop", type=float)
    p.add_argument("--count", type=int)
    p.add_argument("--jobs", type=int)
    _add_common(p)

    p = sub.add_parser("verify", help="run the identity suite")
    p.add_argument("--only", help="comma separated check numbers")
    _add_common(p)
    return parser


def _config_from_args(args):
    common = {"subcommand", "output", "format", "tol", "seed", "config"}
    params = {k: v for k, v in vars(args).items() if k not in common and v is not None}
    tolerances = {}
    for item in args.tol:
        key, sep, value = item.partition("=")
        if not sep:
            raise InvalidInput(f"tolerance override {item!r} must be KEY=VALUE")
        try:
            tolerances[key] = float(value)
        except ValueError as exc:
            raise InvalidInput(f"bad tolerance value in {item!r}") from exc
    fmt = args.format or ("csv" if args.subcommand == "sweep" else "json")
    return RunConfig(args.subcommand, params, args.output, fmt, tolerances, args.seed)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.config:
            with open(args.config) as fh:
                cfg = RunConfig.from_dict(json.load(fh))
        elif args.subcommand is None:
            parser.print_help(sys.stderr)
            return EXIT_INVALID
        else:
            cfg = _config_from_args(args)
    except (InvalidInput, OSError, json.JSONDecodeError, TypeError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
