"""Weierstrass-type functions zeta_N, their derivatives, eta_N, Z_N and the P family.

For a rank-N lattice ``2 Z^N omega``::

    zeta_N(x) = x^-1 + sum_{w != 0} [(x - w)^-1 + sum_{mu < N} (w^-1 x)^mu w^-1]
              = x^-1 + sum_{w != 0} (w^-1 x)^N (x - w)^-1

The second (collapsed) form is one fused term per lattice point.  Points are
taken shell by shell and ``w``, ``-w`` are added together.

Engines
-------
``direct`` sums every shell term by term.  ``hybrid`` does that only for the
innermost shells.  Beyond them it uses the Taylor expansion of the pair
``w, -w`` in ``x``, which keeps odd orders only::

    sum_w (x|grad)^n / n! (y^-1)|_{y = w},  n odd, n >= N

Writing ``y^-1 = (d0 L, -d1 L, -d2 L, -d3 L)`` with ``L = log|y|`` turns every
coefficient into a lattice sum of partial derivatives of ``L``.  Those need
only the moments ``sum_w v^a`` with ``v = w / |w|^2``, which do not depend on
``x`` and are computed once per lattice and cached.  The orders left out are
bounded shell by shell from the actual shortest vector of each shell.
"""

from __future__ import annotations

import enum
import hashlib
import itertools
import math
import os
import threading
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import _kernels
from .algebra import UNSPLIT, MultiIndex, Multivector, Paravector, geometric_product, inverse
from .calculus import MAX_DIRECTIONS, dir_deriv_inverse
from .errors import BadIndex, ConfigError, RadiusTooLarge, Unconverged
from .lattice import (
    Lattice,
    SumConfig,
    check_pole,
    first_power,
    shell_bounds,
    tail_bound,
)
from .polynomials import distinct_arrangements, multi_indices

__all__ = [
    "ZetaTermForm",
    "SeriesResult",
    "zeta",
    "zeta_dir_deriv",
    "Z",
    "eta",
    "eta_hessian",
    "p_alpha",
    "p_alpha_direct",
    "d0_p0",
    "zero_scan",
    "ZeroCandidate",
    "far_tensor",
    "NEAR_SHELLS",
    "RESIDUE_TOL",
]

NEAR_SHELLS = {1: 0, 2: 0, 3: 16, 4: 12}
FAR_ORDERS = {1: (1, 3), 2: (3, 5), 3: (3, 5), 4: (5, 7)}
FAR_RHO = 0.25
RESIDUE_TOL = 1e-12
MAX_SERIES_ORDER = 31
CACHE_VERSION = 1
MERGE_TOL = 1e-3


class ZetaTermForm(enum.Enum):
    DEFINING = "defining"
    COLLAPSED = "collapsed"
    POWER_SERIES = "power_series"


@dataclass(frozen=True)
class SeriesResult:
    """A truncated lattice series with its rigorous truncation bound."""

    value: Paravector
    tail_bound: float
    shells: int
    residue: float
    engine: str

    def __iter__(self):
        return iter(self.value.as_tuple())


# ---------------------------------------------------------------------------
# term words


def _direction_classes(dirs: Sequence[Paravector]) -> tuple[list[Paravector], list[int]]:
    reps: list[Paravector] = []
    labels: list[int] = []
    for h in dirs:
        key = h.as_tuple()
        for i, r in enumerate(reps):
            if r.as_tuple() == key:
                labels.append(i)
                break
        else:
            labels.append(len(reps))
            reps.append(h)
    return reps, labels


def _class_weight(labels: Sequence[int]) -> float:
    return float(math.prod(math.factorial(c) for c in Counter(labels).values()))


def _words(dirs: Sequence[Paravector], rank: int, with_poly: bool):
    """Word tables for the term kernel.

    Inverse words are the distinct orderings of the direction classes; the
    polynomial words of degree ``mu`` place the directions among ``mu`` slots
    (code 0 is ``x``, code ``1 + i`` is class ``i``).  Each distinct word
    stands for ``prod mult!`` labelled orderings, its weight.
    """
    reps, labels = _direction_classes(dirs)
    q = len(labels)
    weight = _class_weight(labels)
    sign = -1.0 if q % 2 else 1.0
    if q:
        inv = np.array(list(distinct_arrangements(labels)), dtype=np.int64)
    else:
        inv = np.zeros((1, 0), dtype=np.int64)
    inv_weight = np.full(inv.shape[0], sign * weight)
    rows, lens, pw = [], [], []
    if with_poly:
        for mu in range(q, rank):
            letters = [0] * (mu - q) + [1 + c for c in labels]
            for word in distinct_arrangements(letters):
                rows.append(word)
                lens.append(mu)
                pw.append(weight)
    width = max([1] + lens)
    poly = np.zeros((len(rows), width), dtype=np.int64)
    for i, word in enumerate(rows):
        poly[i, :len(word)] = word
    hq = np.array([h.as_array() for h in reps], dtype=float).reshape(len(reps), 4)
    return hq, inv, inv_weight, poly, np.array(lens, dtype=np.int64), np.array(pw, dtype=float)


def _reduce(sums: np.ndarray, comps: np.ndarray, compensated: bool) -> np.ndarray:
    """Fold per-shell split sums in shell order and map back to blade coordinates."""
    if compensated:
        split = np.array([math.fsum(np.concatenate([sums[:, c], comps[:, c]])) for c in range(8)])
    else:
        split = np.zeros(8)
        for row in sums:
            split = split + row
    return UNSPLIT @ split


# ---------------------------------------------------------------------------
# far field: lattice moments


_CACHE_LOCK = threading.Lock()
_ROWS: dict[tuple, tuple[np.ndarray, np.ndarray]] = {}
_TENSORS: dict[tuple, dict[int, np.ndarray]] = {}


def _cache_dir() -> Path | None:
    if os.environ.get("CLIFFORDIAN_NO_DISK_CACHE"):
        return None
    root = os.environ.get("CLIFFORDIAN_CACHE_DIR")
    if root:
        return Path(root)
    base = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return Path(base) / "cliffordian"


def _moment_rows(L: Lattice, k_lo: int, k_hi: int, degrees: tuple[int, ...]):
    """Per-shell moment rows and shortest norms for shells ``k_lo..k_hi``."""
    key = (L.key(), k_lo, k_hi, degrees)
    with _CACHE_LOCK:
        if key in _ROWS:
            return _ROWS[key]
    path = None
    folder = _cache_dir()
    if folder is not None:
        digest = hashlib.sha1(repr((CACHE_VERSION,) + key).encode()).hexdigest()[:20]
        path = folder / f"moments-{digest}.npz"
        if path.exists():
            try:
                with np.load(path) as data:
                    out = (data["rows"], data["minnorm"])
                with _CACHE_LOCK:
                    _ROWS[key] = out
                return out
            except (OSError, KeyError, ValueError):
                pass
    rows, minnorm = _kernels.moment_shells(L.periods, k_lo, k_hi, np.array(degrees, dtype=np.int64))
    out = (rows, minnorm)
    if path is not None:
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            tmp = path.with_suffix(f".{os.getpid()}.tmp.npz")
            np.savez(tmp, rows=rows, minnorm=minnorm)
            os.replace(tmp, path)
        except OSError:
            pass
    with _CACHE_LOCK:
        _ROWS[key] = out
    return out


def _log_derivatives(top: dict[tuple, float], m: int) -> dict[tuple, float]:
    """Lattice sums of ``d^gamma log|y|`` at ``y = w`` for ``|gamma| = m``.

    ``top`` maps each ``a`` with ``|a| = m`` to ``sum_w v^a``.  Lower moments
    ``sum_w v^a |v|^(m - |a|)`` follow from ``|v|^2 = sum_i v_i^2``, and
    Faa di Bruno applied to ``f(|y|^2)`` with ``f = log/2`` gives the result.
    """
    mom = dict(top)
    for d in range(m - 2, -1, -2):
        for a in multi_indices(d):
            t = a.as_tuple()
            mom[t] = math.fsum(mom[t[:i] + (t[i] + 2,) + t[i + 1:]] for i in range(4))
    out = {}
    for g in multi_indices(m):
        gt = g.as_tuple()
        terms = []
        for mm in itertools.product(*(range(gi // 2 + 1) for gi in gt)):
            a = tuple(gi - 2 * mi for gi, mi in zip(gt, mm))
            j = m - sum(mm)
            comb = math.prod(math.factorial(gi) // (math.factorial(mi) * math.factorial(ai))
                             for gi, mi, ai in zip(gt, mm, a))
            deriv = 0.5 * (-1) ** (j - 1) * math.factorial(j - 1)
            terms.append(comb * 2.0 ** (m - 2 * sum(mm)) * deriv * mom[a])
        out[gt] = math.fsum(terms)
    return out


def _tensor_from_rows(rows: np.ndarray, degrees: tuple[int, ...]) -> dict[int, np.ndarray]:
    """Coefficient tables ``D_beta = sum_w d^beta y^-1 |_{y=w}`` for each far order ``n``.

    Returned per order as an array over ``multi_indices(n)`` (shape (count, 4)).
    The moments cover one point of each pair ``w, -w``; odd orders double.
    """
    col = np.array([math.fsum(rows[:, c]) for c in range(rows.shape[1])])
    out = {}
    start = 0
    for m in degrees:
        idx = multi_indices(m)
        top = {a.as_tuple(): float(col[start + i]) for i, a in enumerate(idx)}
        start += len(idx)
        logd = _log_derivatives(top, m)
        n = m - 1
        table = np.empty((len(multi_indices(n)), 4))
        for i, b in enumerate(multi_indices(n)):
            bt = b.as_tuple()
            for c in range(4):
                val = logd[bt[:c] + (bt[c] + 1,) + bt[c + 1:]]
                table[i, c] = 2.0 * (val if c == 0 else -val)
        out[n] = table
    return out


def far_tensor(L: Lattice, k_lo: int, k_hi: int, orders: Sequence[int]) -> dict[int, np.ndarray]:
    """``sum_w d^beta y^-1`` at ``y = w`` over shells ``k_lo..k_hi``, per odd order.

    Rows are indexed by ``multi_indices(n)``.
    """
    orders = tuple(int(n) for n in orders)
    if any(n % 2 == 0 or n < 1 for n in orders):
        raise ValueError("far orders must be odd and positive")
    degrees = tuple(n + 1 for n in orders)
    key = (L.key(), k_lo, k_hi, degrees)
    with _CACHE_LOCK:
        if key in _TENSORS:
            return _TENSORS[key]
    rows, _ = _moment_rows(L, k_lo, k_hi, degrees)
    out = _tensor_from_rows(rows, degrees)
    with _CACHE_LOCK:
        _TENSORS[key] = out
    return out


_CONTRACT: dict[tuple[int, int], tuple[np.ndarray, np.ndarray, np.ndarray]] = {}


def _contraction_plan(n: int, q: int):
    """Index tables for ``sum_gamma x^gamma / gamma! sum_t h_t D[gamma + e_t]``."""
    key = (n, q)
    if key not in _CONTRACT:
        pos = {b.as_tuple(): i for i, b in enumerate(multi_indices(n))}
        gammas = [g.as_tuple() for g in multi_indices(n - q)]
        tuples = list(itertools.product(range(4), repeat=q))
        table = np.empty((len(gammas), len(tuples)), dtype=np.int64)
        for gi, g in enumerate(gammas):
            for ti, t in enumerate(tuples):
                b = list(g)
                for c in t:
                    b[c] += 1
                table[gi, ti] = pos[tuple(b)]
        expo = np.array(gammas, dtype=float)
        fact = np.array([math.prod(math.factorial(v) for v in g) for g in gammas], dtype=float)
        _CONTRACT[key] = (table, expo, fact)
    return _CONTRACT[key]


def _far_value(tables: dict[int, np.ndarray], x: np.ndarray, dirs: Sequence[Paravector]) -> np.ndarray:
    q = len(dirs)
    hs = [h.as_array() for h in dirs]
    hw = np.array([math.prod(hs[k][c] for k, c in enumerate(t))
                   for t in itertools.product(range(4), repeat=q)]) if q else np.ones(1)
    total = np.zeros(4)
    for n, D in sorted(tables.items()):
        if n < q:
            continue
        table, expo, fact = _contraction_plan(n, q)
        mono = np.prod(np.power(x[None, :], expo), axis=1) / fact
        inner = np.einsum("t,gtc->gc", hw, D[table])
        total = total + mono @ inner
    return total


# ---------------------------------------------------------------------------
# engine


def _check_rank(L: Lattice, N: int | None) -> int:
    if N is not None and N != L.rank:
        raise ConfigError(f"series index {N} does not match lattice rank {L.rank}")
    return L.rank


def _dir_norm(dirs: Sequence[Paravector]) -> float:
    return float(math.prod(h.norm() for h in dirs))


def _origin(x: Paravector, dirs: Sequence[Paravector]) -> np.ndarray:
    if dirs:
        return dir_deriv_inverse(x, dirs).to_multivector().coeffs
    return inverse(x).to_multivector().coeffs.copy()


def _near_start(L: Lattice, r: float, cfg: SumConfig) -> int | None:
    """Last shell summed term by term, or None when the whole range is direct."""
    K = cfg.max_shells
    if cfg.engine == "direct" or (cfg.engine == "auto" and NEAR_SHELLS[L.rank] == 0):
        return None
    K0 = cfg.near_shells or NEAR_SHELLS[L.rank] or 1
    while K0 < K and r > FAR_RHO * L.min_norm_bound(K0 + 1):
        K0 += 1
    return None if K0 >= K else K0


def _far_orders(L: Lattice, cfg: SumConfig) -> tuple[int, ...]:
    lo = first_power(L.rank, True) | 1
    hi = cfg.series_order if cfg.series_order is not None else FAR_ORDERS[L.rank][1]
    if hi % 2 == 0:
        hi += 1
    return tuple(range(lo, max(lo, hi) + 1, 2))


def _finish(total: np.ndarray, bound: float, cfg: SumConfig, engine: str, what: str) -> SeriesResult:
    mv = Multivector(total)
    residue = mv.grade_residue()
    value = mv.to_paravector(RESIDUE_TOL)
    result = SeriesResult(value, float(bound), cfg.max_shells, residue, engine)
    if cfg.strict and not bound <= cfg.target_tol:
        raise Unconverged(f"{what}: tail bound {bound:.3e} exceeds target {cfg.target_tol:.3e} "
                          f"at {cfg.max_shells} shells", result=result)
    return result


def _series(L: Lattice, x: Paravector, dirs: Sequence[Paravector], cfg: SumConfig,
            form: ZetaTermForm, what: str) -> SeriesResult:
    """Truncated zeta_N series (or its derivative along ``dirs``) at ``x``."""
    dirs = tuple(dirs)
    if len(dirs) > MAX_DIRECTIONS:
        raise ValueError(f"at most {MAX_DIRECTIONS} directions are supported")
    check_pole(L, x, cfg.pole_guard)
    K = cfg.max_shells
    q = len(dirs)
    r = x.norm()
    dn = _dir_norm(dirs)
    if form is ZetaTermForm.POWER_SERIES:
        return _power_series(L, x, dirs, cfg, what)
    try:
        tail = tail_bound(L, L.rank, r, K, q=q, dir_norm=dn, paired=cfg.pairing)
    except RadiusTooLarge:
        tail = math.inf
    K0 = _near_start(L, r, cfg)
    k_near = K if K0 is None else K0
    xa = x.as_array()
    collapsed = form is ZetaTermForm.COLLAPSED and q == 0
    hq, inv, inv_w, poly, plen, pw = _words(dirs, L.rank, with_poly=not collapsed)
    mode = _kernels.MODE_COLLAPSED if collapsed else _kernels.MODE_WORDS
    sums, comps, _ = _kernels.near_shells(xa, L.periods, 1, k_near, mode, cfg.pairing,
                                          cfg.compensated, hq, inv, inv_w, poly, plen, pw)
    total = _reduce(sums, comps, cfg.compensated) + _origin(x, dirs)
    engine = "direct"
    bound = tail
    if K0 is not None:
        orders = _far_orders(L, cfg)
        tables = far_tensor(L, K0 + 1, K, orders)
        total[:4] += _far_value(tables, xa, dirs)
        _, minnorm = _moment_rows(L, K0 + 1, K, tuple(n + 1 for n in orders))
        shells = np.arange(K0 + 1, K + 1)
        rest = shell_bounds(L, r, shells, minnorm, q=q, dir_norm=dn, n_start=orders[-1] + 2)
        bound = tail + float(np.sum(rest))
        engine = f"hybrid(near={K0}, order={orders[-1]})"
    return _finish(total, bound, cfg, engine, what)


def _power_series(L: Lattice, x: Paravector, dirs: tuple[Paravector, ...], cfg: SumConfig,
                  what: str) -> SeriesResult:
    """Expansion around 0: ``x^-1`` plus the odd-order lattice Taylor series."""
    K = cfg.max_shells
    q = len(dirs)
    r = x.norm()
    dn = _dir_norm(dirs)
    _, first = _moment_rows(L, 1, 1, (2,))
    shortest = float(first[0])
    if r >= shortest:
        raise RadiusTooLarge(f"|x| = {r:.4g} is not below the shortest lattice vector {shortest:.4g}")
    try:
        tail = tail_bound(L, L.rank, r, K, q=q, dir_norm=dn, paired=True)
    except RadiusTooLarge:
        tail = math.inf
    lo = first_power(L.rank, True) | 1
    shells = np.arange(1, K + 1)
    lower = np.maximum(2.0 * L.sigma_min * shells, shortest)
    hi = cfg.series_order
    if hi is None:
        hi = lo
        goal = 0.1 * max(tail, cfg.target_tol)
        while hi < MAX_SERIES_ORDER and float(np.sum(shell_bounds(
                L, r, shells, lower, q=q, dir_norm=dn, n_start=hi + 2))) > goal:
            hi += 2
    elif hi % 2 == 0:
        hi += 1
    orders = tuple(range(lo, max(lo, hi) + 1, 2))
    tables = far_tensor(L, 1, K, orders)
    _, minnorm = _moment_rows(L, 1, K, tuple(n + 1 for n in orders))
    rest = float(np.sum(shell_bounds(L, r, shells, minnorm, q=q, dir_norm=dn, n_start=orders[-1] + 2)))
    total = _origin(x, dirs)
    total[:4] += _far_value(tables, x.as_array(), dirs)
    return _finish(total, tail + rest, cfg, f"power_series(order={orders[-1]})", what)


# ---------------------------------------------------------------------------
# public functions


def zeta(L: Lattice, x: Paravector, cfg: SumConfig,
         form: ZetaTermForm = ZetaTermForm.COLLAPSED) -> SeriesResult:
    """zeta_N(x) for the rank-N lattice ``L``, with its tail bound."""
    return _series(L, x, (), cfg, ZetaTermForm(form), "zeta")


def zeta_dir_deriv(L: Lattice, a: Paravector, dirs: Sequence[Paravector], cfg: SumConfig) -> SeriesResult:
    """``(h1|grad)...(hq|grad) zeta_N`` at ``a``, differentiated term by term."""
    dirs = tuple(dirs)
    if not dirs:
        raise ValueError("at least one direction is required")
    return _series(L, a, dirs, cfg, ZetaTermForm.DEFINING, "zeta derivative")


def _combine(parts: Sequence[tuple[float, SeriesResult]], cfg: SumConfig, engine: str) -> SeriesResult:
    total = np.zeros(4)
    bound = 0.0
    residue = 0.0
    for coef, res in parts:
        total = total + coef * res.value.as_array()
        bound += abs(coef) * res.tail_bound
        residue = max(residue, res.residue)
    return SeriesResult(Paravector.from_array(total), bound, cfg.max_shells, residue, engine)


def _loose(cfg: SumConfig) -> SumConfig:
    """Config for the ingredients of a composite; the composite is checked as a whole."""
    return cfg.with_(strict=False)


def _strict_check(result: SeriesResult, cfg: SumConfig, what: str) -> SeriesResult:
    if cfg.strict and not result.tail_bound <= cfg.target_tol:
        raise Unconverged(f"{what}: tail bound {result.tail_bound:.3e} exceeds target "
                          f"{cfg.target_tol:.3e}", result=result)
    return result


def Z(L: Lattice, x: Paravector, a: Paravector, cfg: SumConfig) -> SeriesResult:
    """``zeta_N(x + a) - sum_{n < N} (x|grad)^n / n! zeta_N(a)``, periodic in ``a``."""
    sub = _loose(cfg)
    parts = [(1.0, zeta(L, x + a, sub))]
    if x.norm2() == 0.0:
        parts.append((-1.0, parts[0][1]))
    else:
        parts.append((-1.0, zeta(L, a, sub)))
        for n in range(1, L.rank):
            parts.append((-1.0 / math.factorial(n), zeta_dir_deriv(L, a, (x,) * n, sub)))
    return _strict_check(_combine(parts, cfg, "Z"), cfg, "Z")


def _check_half_period(L: Lattice, omega: Paravector) -> None:
    coords = np.linalg.lstsq(L.periods, omega.as_array(), rcond=None)[0]
    twice = 2.0 * coords
    if np.linalg.norm(L.periods @ coords - omega.as_array()) > 1e-9 * (1.0 + omega.norm()) or \
            np.max(np.abs(twice - np.round(twice))) > 1e-9:
        raise ConfigError(f"{omega.as_tuple()} is not a half-period of the lattice")
    if np.max(np.abs(coords - np.round(coords))) < 1e-9:
        raise ConfigError(f"{omega.as_tuple()} is a lattice point, not a half-period")


def eta(L: Lattice, x: Paravector, omega: Paravector, cfg: SumConfig) -> SeriesResult:
    """``2 sum_{p < [(N+1)/2]} ((x+omega)|grad)^(2p) / (2p)! zeta_N(omega)``.

    For N = 1 this is exactly zero: ``zeta_1`` is odd with period ``2 omega``,
    so ``zeta_1(omega) = zeta_1(-omega) = -zeta_1(omega)``.  The truncated
    series only approaches that value, so the exact zero is returned.
    """
    _check_half_period(L, omega)
    if L.rank == 1:
        return SeriesResult(Paravector(), 0.0, cfg.max_shells, 0.0, "exact")
    sub = _loose(cfg)
    y = x + omega
    parts = [(2.0, zeta(L, omega, sub))]
    for p in range(1, (L.rank + 1) // 2):
        if y.norm2() == 0.0:
            break
        parts.append((2.0 / math.factorial(2 * p), zeta_dir_deriv(L, omega, (y,) * (2 * p), sub)))
    return _strict_check(_combine(parts, cfg, "eta"), cfg, "eta")


def eta_hessian(L: Lattice, omega: Paravector, cfg: SumConfig) -> tuple[np.ndarray, float]:
    """Second derivatives ``d_i d_j zeta_N(omega)`` as a (4, 4, 4) array, plus the largest bound.

    Every quadratic term of ``eta`` in ``x`` comes from this tensor.
    """
    sub = _loose(cfg)
    out = np.zeros((4, 4, 4))
    worst = 0.0
    for i in range(4):
        for j in range(i, 4):
            res = zeta_dir_deriv(L, omega, (Paravector.basis(i), Paravector.basis(j)), sub)
            out[i, j] = out[j, i] = res.value.as_array()
            worst = max(worst, res.tail_bound)
    return out, worst


def _rank4(L: Lattice) -> None:
    if L.rank != 4:
        raise ConfigError(f"the P functions need a rank-4 lattice, got rank {L.rank}")


def p_alpha(L: Lattice, alpha, x: Paravector, cfg: SumConfig) -> SeriesResult:
    """``P_alpha = -(1/3!) (e_i|grad)(e_j|grad)(e_k|grad) zeta_4`` over the letters of alpha."""
    _rank4(L)
    alpha = MultiIndex.of(alpha)
    if alpha.length != 3:
        raise BadIndex(f"P functions need |alpha| = 3, got {alpha.length}")
    dirs = tuple(Paravector.basis(i) for i in alpha.letters())
    res = _series(L, x, dirs, cfg.with_(target_tol=6.0 * cfg.target_tol), ZetaTermForm.DEFINING, "P")
    return SeriesResult(res.value * (-1.0 / 6.0), res.tail_bound / 6.0, res.shells, res.residue, res.engine)


def p_alpha_direct(L: Lattice, x: Paravector, cfg: SumConfig) -> SeriesResult:
    """``x^-4 + sum_w [(x - w)^-4 - w^-4]``, summed directly over every shell."""
    _rank4(L)
    check_pole(L, x, cfg.pole_guard)
    K = cfg.max_shells
    sums, comps, _ = _kernels.direct_p0_shells(x.as_array(), L.periods, 1, K, cfg.compensated)
    x2 = geometric_product(inverse(x), inverse(x))
    total = _reduce(sums, comps, cfg.compensated) + geometric_product(x2, x2).coeffs
    try:
        bound = tail_bound(L, 4, x.norm(), K, q=3, paired=True) / 6.0
    except RadiusTooLarge:
        bound = math.inf
    return _finish(total, bound, cfg, "direct", "P direct")


def d0_p0(L: Lattice, x: Paravector, cfg: SumConfig) -> SeriesResult:
    """``d/dx0`` of ``P_(3,0,0,0)``: ``-(1/3!) (e0|grad)^4 zeta_4``."""
    _rank4(L)
    e0 = Paravector.basis(0)
    res = _series(L, x, (e0,) * 4, cfg.with_(target_tol=6.0 * cfg.target_tol), ZetaTermForm.DEFINING, "D0 P0")
    return SeriesResult(res.value * (-1.0 / 6.0), res.tail_bound / 6.0, res.shells, res.residue, res.engine)


# ---------------------------------------------------------------------------
# zero scan


@dataclass(frozen=True)
class ZeroCandidate:
    """A numerically located zero of ``D0 P0`` inside the fundamental cell."""

    point: Paravector
    cell_coords: tuple[float, ...]
    residual: float
    tail_bound: float
    min_singular: float
    multiplicity: int
    vertex: bool


def _cell_point(L: Lattice, s: np.ndarray) -> Paravector:
    return Paravector.from_array(L.periods @ s)


def _reduce_cell(s: np.ndarray) -> np.ndarray:
    t = s - np.floor(s)
    t[np.isclose(t, 1.0, atol=1e-9)] = 0.0
    return t


def zero_scan(L: Lattice, grid_density: int, cfg: SumConfig, *, refine: bool = True,
              tol: float = 1e-8) -> list[ZeroCandidate]:
    """Search one fundamental cell for zeros of ``D0 P0``.

    The cell ``{sum s_j 2 omega_j : 0 <= s_j < 1}`` is sampled on a
    ``grid_density^4`` grid.  Grid points that are local minima of
    ``|D0 P0|`` (periodic neighbours) are refined with a Newton-type solver
    and merged modulo the lattice, after the 15 half-period vertices, which
    are always seeded.  The multiplicity estimate counts the near-zero
    singular values of the Jacobian.
    """
    from scipy.optimize import root

    _rank4(L)
    if grid_density < 2:
        raise ValueError("grid_density must be at least 2")
    loose = cfg.with_(strict=False)
    g = grid_density
    values = np.full((g,) * 4, np.inf)
    for idx in np.ndindex(*values.shape):
        s = np.array(idx, dtype=float) / g
        try:
            values[idx] = d0_p0(L, _cell_point(L, s), loose).value.norm()
        except Exception:  # noqa: BLE001 - poles stay at +inf
            continue
    # the half-period vertices are known zeros; seed them so they are always reported
    seeds = [np.array([(mask >> j) & 1 for j in range(4)], dtype=float) / 2 for mask in range(1, 16)]
    for idx in np.ndindex(*values.shape):
        v = values[idx]
        if not np.isfinite(v):
            continue
        if all(v <= values[tuple((np.array(idx) + d) % g)]
               for d in itertools.chain.from_iterable(
                   (np.eye(4, dtype=int)[i], -np.eye(4, dtype=int)[i]) for i in range(4))):
            seeds.append(np.array(idx, dtype=float) / g)

    def f(s: np.ndarray) -> np.ndarray:
        return d0_p0(L, _cell_point(L, s), loose).value.as_array()

    found: list[np.ndarray] = []
    out: list[ZeroCandidate] = []
    for n, s0 in enumerate(seeds):
        vertex = n < 15
        s = s0
        if refine and not vertex:
            try:
                s = root(f, s0, method="hybr", options={"xtol": 1e-12}).x
            except Exception:  # noqa: BLE001 - keep the seed
                s = s0
        s = _reduce_cell(np.asarray(s, dtype=float))
        # truncation moves the computed zeros by about the tail bound; merge within MERGE_TOL
        if any(np.max(np.abs(((s - t + 0.5) % 1.0) - 0.5)) < MERGE_TOL for t in found):
            continue
        try:
            res = d0_p0(L, _cell_point(L, s), loose)
        except Exception:  # noqa: BLE001 - refined onto a pole
            continue
        found.append(s)
        h = 1e-5
        jac = np.column_stack([(f(s + h * e) - f(s - h * e)) / (2 * h) for e in np.eye(4)])
        sv = np.linalg.svd(jac, compute_uv=False)
        small = int(np.sum(sv < tol ** 0.5 * max(sv[0], 1.0)))
        out.append(ZeroCandidate(_cell_point(L, s), tuple(float(v) for v in s), res.value.norm(),
                                 res.tail_bound, float(sv[-1]), 1 + small, vertex))
    out.sort(key=lambda c: c.cell_coords)
    return out
