"""Command-line interface: ``eval``, ``grid``, ``check`` and ``bench``.

Exit codes: 0 success, 1 configuration error, 2 pole, 3 unconverged series,
4 failed identity.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import multiprocessing
import sys
import time
from dataclasses import fields
from pathlib import Path

import jsonschema
import numpy as np

from .algebra import MultiIndex, Paravector
from .checks import SUITES, run_suite
from .errors import CliffordianError, ConfigError, NearPole, PoleOfCotan, Unconverged, ZeroNorm
from .lattice import Lattice, SumConfig, default_config, default_lattice
from .polynomials import eval_P, eval_S
from .trig import cos_cl, cotan_cl, exp_cl, sin_cl
from .weierstrass import ZetaTermForm, d0_p0, eta, p_alpha, p_alpha_direct, zeta

EXIT_OK, EXIT_CONFIG, EXIT_POLE, EXIT_UNCONVERGED, EXIT_IDENTITY = 0, 1, 2, 3, 4

FUNCTIONS = ("zeta", "p_alpha", "p_direct", "d0_p0", "eta", "exp", "sin", "cos", "cotan", "P", "S")
SERIES_FUNCTIONS = ("zeta", "p_alpha", "p_direct", "d0_p0", "eta")
GRID_HEADER = ["x0", "x1", "x2", "x3", "f0", "f1", "f2", "f3", "tail_bound", "flag"]

_VEC4 = {"type": "array", "items": {"type": "number"}, "minItems": 4, "maxItems": 4}
CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "function": {"enum": list(FUNCTIONS)},
        "rank": {"type": "integer", "minimum": 1, "maximum": 4},
        "lattice": {"type": "array", "items": _VEC4, "minItems": 1, "maxItems": 4},
        "alpha": {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 4, "maxItems": 4},
        "omega": _VEC4,
        "form": {"enum": [f.value for f in ZetaTermForm]},
        "sum": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "max_shells": {"type": "integer", "minimum": 1},
                "target_tol": {"type": "number", "exclusiveMinimum": 0},
                "pairing": {"type": "boolean"},
                "compensated": {"type": "boolean"},
                "pole_guard": {"type": "number", "exclusiveMinimum": 0},
                "engine": {"enum": ["auto", "direct", "hybrid"]},
                "near_shells": {"type": ["integer", "null"], "minimum": 1},
                "series_order": {"type": ["integer", "null"], "minimum": 1},
                "strict": {"type": "boolean"},
            },
        },
        "point": _VEC4,
        "grid": {
            "type": "object",
            "additionalProperties": False,
            "required": ["free", "ranges", "size"],
            "properties": {
                "free": {"type": "array", "items": {"type": "integer", "minimum": 0, "maximum": 3},
                         "minItems": 2, "maxItems": 2},
                "base": _VEC4,
                "ranges": {"type": "array", "minItems": 2, "maxItems": 2,
                           "items": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}},
                "size": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 2, "maxItems": 2},
            },
        },
        "check": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "suites": {"type": "array", "items": {"enum": sorted(SUITES)}},
                "points": {"type": "integer", "minimum": 1},
                "seed": {"type": "integer"},
            },
        },
        "bench": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "points": {"type": "integer", "minimum": 1},
                "shells": {"type": "array", "items": {"type": "integer", "minimum": 1}},
                "max_workers": {"type": "integer", "minimum": 1},
            },
        },
    },
}


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with the configuration code, keeping 2 for poles."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _floats(text: str, count: int | None = None) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise ConfigError(f"cannot parse numbers from {text!r}") from exc
    if count is not None and len(vals) != count:
        raise ConfigError(f"expected {count} comma-separated numbers, got {text!r}")
    return vals


def _ints(text: str, count: int) -> list[int]:
    vals = _floats(text, count)
    if any(v != int(v) for v in vals):
        raise ConfigError(f"expected integers, got {text!r}")
    return [int(v) for v in vals]


def build_job(args: argparse.Namespace) -> dict:
    """Merge the JSON config file with command-line overrides and validate."""
    job: dict = {}
    if args.config:
        try:
            job = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
    if args.function:
        job["function"] = args.function
    if args.rank is not None:
        job["rank"] = args.rank
    if args.lattice:
        job["lattice"] = [_floats(part, 4) for part in args.lattice.split(";") if part.strip()]
    if args.alpha:
        job["alpha"] = _ints(args.alpha, 4)
    if args.omega:
        job["omega"] = _floats(args.omega, 4)
    if args.form:
        job["form"] = args.form
    sum_cfg = dict(job.get("sum", {}))
    for key, value in (("max_shells", args.shells), ("target_tol", args.tol), ("engine", args.engine),
                       ("near_shells", args.near_shells), ("strict", args.strict)):
        if value is not None:
            sum_cfg[key] = value
    if sum_cfg:
        job["sum"] = sum_cfg
    cmd = args.command
    if cmd == "eval" and args.point:
        job["point"] = _floats(args.point, 4)
    if cmd == "grid":
        grid = dict(job.get("grid", {}))
        if args.free:
            grid["free"] = _ints(args.free, 2)
        if args.base:
            grid["base"] = _floats(args.base, 4)
        if args.ranges:
            r = _floats(args.ranges, 4)
            grid["ranges"] = [r[:2], r[2:]]
        if args.size:
            grid["size"] = _ints(args.size, 2)
        job["grid"] = grid
    if cmd == "check":
        check = dict(job.get("check", {}))
        if args.suite:
            check["suites"] = args.suite
        if args.points is not None:
            check["points"] = args.points
        if args.seed is not None:
            check["seed"] = args.seed
        job["check"] = check
    if cmd == "bench":
        bench = dict(job.get("bench", {}))
        if args.points is not None:
            bench["points"] = args.points
        if args.max_workers is not None:
            bench["max_workers"] = args.max_workers
        job["bench"] = bench
    try:
        jsonschema.validate(job, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"invalid config: {exc.message}") from exc
    return job


def job_lattice(job: dict) -> Lattice:
    if "lattice" in job:
        L = Lattice(tuple(Paravector.from_array(v) for v in job["lattice"]))
        if "rank" in job and job["rank"] != L.rank:
            raise ConfigError(f"rank {job['rank']} does not match the {L.rank} half-periods given")
        return L
    return default_lattice(job.get("rank", 4))


def job_config(job: dict, L: Lattice) -> SumConfig:
    known = {f.name for f in fields(SumConfig)}
    return default_config(L.rank, **{k: v for k, v in job.get("sum", {}).items() if k in known})


class Evaluator:
    """Picklable point evaluator returning ``(value, shells, tail_bound)``."""

    def __init__(self, job: dict):
        self.function = job.get("function", "zeta")
        self.needs_lattice = self.function in SERIES_FUNCTIONS
        self.L = job_lattice(job) if self.needs_lattice else None
        self.cfg = job_config(job, self.L) if self.needs_lattice else None
        self.alpha = MultiIndex.of(tuple(job.get("alpha", (3, 0, 0, 0))))
        self.form = ZetaTermForm(job.get("form", "collapsed"))
        self.omega = Paravector.from_array(job["omega"]) if "omega" in job else None
        if self.function == "eta" and self.omega is None:
            self.omega = self.L.half_periods[0]

    def __call__(self, x: Paravector) -> tuple[Paravector, int, float]:
        f = self.function
        if f == "zeta":
            r = zeta(self.L, x, self.cfg, self.form)
        elif f == "p_alpha":
            r = p_alpha(self.L, self.alpha, x, self.cfg)
        elif f == "p_direct":
            r = p_alpha_direct(self.L, x, self.cfg)
        elif f == "d0_p0":
            r = d0_p0(self.L, x, self.cfg)
        elif f == "eta":
            r = eta(self.L, x, self.omega, self.cfg)
        else:
            return _elementary(f, x, self.alpha), 0, 0.0
        return r.value, r.shells, r.tail_bound


def _elementary(f: str, x: Paravector, alpha: MultiIndex) -> Paravector:
    if f == "exp":
        return exp_cl(x)
    if f == "sin":
        return sin_cl(x)
    if f == "cos":
        return cos_cl(x)
    if f == "cotan":
        return cotan_cl(x)
    if f == "P":
        return eval_P(alpha, x)
    return eval_S(alpha, x)


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def cmd_eval(job: dict, out) -> int:
    if "point" not in job:
        raise ConfigError("eval needs a point (--point x0,x1,x2,x3)")
    ev = Evaluator(job)
    x = Paravector.from_array(job["point"])
    value, shells, bound = ev(x)
    record = {"function": ev.function, "point": list(x.as_tuple()), "value": list(value.as_tuple()),
              "shells": shells, "tail_bound": bound}
    out.write(json.dumps(record) + "\n")
    return EXIT_OK


def grid_points(grid: dict) -> list[Paravector]:
    """Row-major points: the first free coordinate is the slow index."""
    (i, j), (nx, ny) = grid["free"], grid["size"]
    if i == j:
        raise ConfigError("the two free coordinates must differ")
    (a0, a1), (b0, b1) = grid["ranges"]
    base = np.array(grid.get("base", [0.0] * 4), dtype=float)
    xs = np.linspace(a0, a1, nx) if nx > 1 else np.array([a0])
    ys = np.linspace(b0, b1, ny) if ny > 1 else np.array([b0])
    pts = []
    for u in xs:
        for v in ys:
            p = base.copy()
            p[i], p[j] = u, v
            pts.append(Paravector.from_array(p))
    return pts


_WORKER: Evaluator | None = None


def _init_worker(job: dict) -> None:
    global _WORKER
    _WORKER = Evaluator(job)


def _grid_row(x: Paravector) -> list[str]:
    assert _WORKER is not None
    try:
        value, _, bound = _WORKER(x)
        flag = "ok"
    except (NearPole, PoleOfCotan, ZeroNorm):
        value, bound, flag = Paravector(math.nan, math.nan, math.nan, math.nan), math.nan, "near_pole"
    except Unconverged as exc:
        value, bound, flag = exc.result.value, exc.result.tail_bound, "unconverged"
    return [_fmt(v) for v in x.as_tuple()] + [_fmt(v) for v in value.as_tuple()] + [_fmt(bound), flag]


def render_grid(job: dict, workers: int = 1) -> str:
    """Evaluate the grid and return the CSV text; independent of ``workers``."""
    pts = grid_points(job["grid"])
    _init_worker(job)
    if pts:
        _grid_row(pts[0])  # builds lattice caches before any fork
    if workers <= 1:
        rows = [_grid_row(p) for p in pts]
    else:
        ctx = multiprocessing.get_context("fork" if "fork" in multiprocessing.get_all_start_methods() else None)
        with ctx.Pool(workers, initializer=_init_worker, initargs=(job,)) as pool:
            rows = pool.map(_grid_row, pts, chunksize=max(1, len(pts) // (4 * workers)))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(GRID_HEADER)
    writer.writerows(rows)
    return buf.getvalue()


def cmd_grid(job: dict, out, workers: int = 1) -> int:
    out.write(render_grid(job, workers))
    return EXIT_OK


def cmd_check(job: dict, out, eta_sign: float = 1.0) -> int:
    check = job.get("check", {})
    suites = check.get("suites") or ["default"]
    shells = job.get("sum", {}).get("max_shells")
    reports = [run_suite(name, points=check.get("points", 3), shells=shells, seed=check.get("seed", 0),
                         eta_sign=eta_sign) for name in suites]
    all_pass = all(r["all_pass"] for r in reports)
    out.write(json.dumps({"version": reports[0]["version"], "suites": reports, "all_pass": all_pass}, indent=2) + "\n")
    return EXIT_OK if all_pass else EXIT_IDENTITY


def cmd_bench(job: dict, out) -> int:
    """Error against work for the summation variants, and grid throughput per worker count."""
    bench = job.get("bench", {})
    L = job_lattice(job)
    base = job_config(job, L).with_(strict=False, engine="direct")
    rng = np.random.default_rng(0)
    pts = [Paravector.from_array(rng.uniform(-0.5, 0.5, 4)) for _ in range(bench.get("points", 4))]
    shells = bench.get("shells") or sorted({max(1, base.max_shells // 4), max(1, base.max_shells // 2),
                                            base.max_shells})
    ref_cfg = base.with_(max_shells=2 * max(shells))
    refs = [zeta(L, x, ref_cfg).value.as_array() for x in pts]
    curves = []
    for pairing in (True, False):
        for compensated in (True, False):
            for K in shells:
                cfg = base.with_(max_shells=K, pairing=pairing, compensated=compensated)
                t0 = time.perf_counter()
                res = [zeta(L, x, cfg) for x in pts]
                dt = time.perf_counter() - t0
                err = max(float(np.linalg.norm(r.value.as_array() - ref)) for r, ref in zip(res, refs))
                curves.append({"pairing": pairing, "compensated": compensated, "shells": K,
                               "points_per_second": len(pts) / dt, "max_error_vs_reference": err,
                               "max_tail_bound": max(r.tail_bound for r in res)})
    scaling = []
    grid_job = dict(job, function="zeta", grid={"free": [0, 1], "ranges": [[-0.5, 0.5], [-0.5, 0.5]],
                                                 "size": [8, 8]})
    grid_job["sum"] = dict(job.get("sum", {}), strict=False)
    for w in range(1, bench.get("max_workers", 2) + 1):
        t0 = time.perf_counter()
        render_grid(grid_job, w)
        dt = time.perf_counter() - t0
        scaling.append({"workers": w, "points_per_second": 64 / dt})
    out.write(json.dumps({"lattice_rank": L.rank, "reference_shells": ref_cfg.max_shells,
                          "curves": curves, "workers": scaling}, indent=2) + "\n")
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cliffordian", description="Holomorphic Cliffordian functions in R(0,3).")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON job file; command-line flags override it")
    common.add_argument("--function", choices=FUNCTIONS)
    common.add_argument("--rank", type=int, help="rank of the default lattice (half-periods (pi/2) e_j)")
    common.add_argument("--lattice", help="half-periods as 'a,b,c,d;a,b,c,d;...'")
    common.add_argument("--alpha", help="multi-index a0,a1,a2,a3 for p_alpha, P and S")
    common.add_argument("--omega", help="half-period for eta")
    common.add_argument("--form", choices=[f.value for f in ZetaTermForm])
    common.add_argument("--shells", type=int, help="max_shells")
    common.add_argument("--tol", type=float, help="target_tol")
    common.add_argument("--engine", choices=["auto", "direct", "hybrid"])
    common.add_argument("--near-shells", type=int)
    common.add_argument("--strict", action=argparse.BooleanOptionalAction, default=None,
                        help="fail when the tail bound exceeds the target")
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--workers", type=int, default=1)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    p_eval = sub.add_parser("eval", parents=[common], help="evaluate at one point")
    p_eval.add_argument("--point")
    p_grid = sub.add_parser("grid", parents=[common], help="evaluate on a 2-D grid and write CSV")
    p_grid.add_argument("--free", help="indices of the two free coordinates, e.g. 0,1")
    p_grid.add_argument("--base", help="values of the frozen coordinates")
    p_grid.add_argument("--ranges", help="lo0,hi0,lo1,hi1")
    p_grid.add_argument("--size", help="n0,n1")
    p_check = sub.add_parser("check", parents=[common], help="run identity suites")
    p_check.add_argument("--suite", action="append", choices=sorted(SUITES))
    p_check.add_argument("--points", type=int)
    p_check.add_argument("--seed", type=int)
    p_check.add_argument("--broken-sign", action="store_true",
                         help="negative control: flip the sign of eta everywhere")
    p_bench = sub.add_parser("bench", parents=[common], help="timing and error-vs-work report")
    p_bench.add_argument("--points", type=int)
    p_bench.add_argument("--max-workers", type=int)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        job = build_job(args)
        if args.workers < 1:
            raise ConfigError("--workers must be at least 1")
        buf = io.StringIO()
        if args.command == "eval":
            code = cmd_eval(job, buf)
        elif args.command == "grid":
            code = cmd_grid(job, buf, args.workers)
        elif args.command == "check":
            code = cmd_check(job, buf, -1.0 if args.broken_sign else 1.0)
        else:
            code = cmd_bench(job, buf)
    except (NearPole, PoleOfCotan, ZeroNorm) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_POLE
    except Unconverged as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNCONVERGED
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CliffordianError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.out:
        Path(args.out).write_text(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return code


if __name__ == "__main__":
    sys.exit(main())
