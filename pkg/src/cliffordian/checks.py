"""Identity suites: each identity is a residual measured against a tolerance.

Tolerances are ``SAFETY`` times the combined tail bounds of the series
evaluations involved, so a pass certifies the identity up to truncation.

The ``eta_published`` suite states the eta laws in their published form
(oddness in omega, evenness in x, the ``(x|grad)^2`` expansion, the value at
``x = omega`` and the three-term addition law).  Their quadratic parts pick up
the Hessian of ``zeta_4`` at a half-period, which is not zero, so these fail
on generic lattices.  The ``eta_laws`` suite checks the forms that follow from
quasi-periodicity alone.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from .algebra import Paravector
from .lattice import Lattice, SumConfig, default_config, default_lattice
from .oracles import (
    classical_cot_partial_fractions,
    classical_cot_tail_bound,
    classical_weierstrass_zeta,
    classical_zeta_tail_bound,
)
from .weierstrass import d0_p0, eta, p_alpha, p_alpha_direct, zeta, zeta_dir_deriv

__all__ = [
    "REPORT_VERSION",
    "SAFETY",
    "IdentityResult",
    "SUITES",
    "run_suite",
    "run_suites",
    "worst",
]

REPORT_VERSION = 1
SAFETY = 10.0
SLICE_TAU = complex(0.3, 1.1)


@dataclass(frozen=True)
class IdentityResult:
    name: str
    residual: float
    tolerance: float
    passed: bool

    def as_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        return d


def _identity(name: str, residual, bound: float, floor: float = 1e-12) -> IdentityResult:
    res = float(np.linalg.norm(np.asarray(residual, dtype=float)))
    tol = SAFETY * bound + floor
    return IdentityResult(name, res, tol, bool(res <= tol))


def _arr(r) -> np.ndarray:
    return r.value.as_array()


def _points(rng: np.random.Generator, count: int, radius: float) -> list[Paravector]:
    return [Paravector.from_array(rng.uniform(-radius, radius, 4)) for _ in range(count)]


def _cfg(rank: int, shells: int | None) -> SumConfig:
    over = {"strict": False}
    if shells is not None:
        over["max_shells"] = shells
    return default_config(rank, **over)


def _parity(rng, count, shells, eta_sign):
    out = []
    for N in range(1, 5):
        L, cfg = default_lattice(N), _cfg(N, shells)
        for i, x in enumerate(_points(rng, count, 0.6)):
            a, b = zeta(L, x, cfg), zeta(L, -x, cfg)
            out.append(_identity(f"zeta{N} odd #{i}", _arr(a) + _arr(b), a.tail_bound + b.tail_bound))
    return out


def _quasi_periodicity(rng, count, shells, eta_sign):
    out = []
    for N in range(1, 5):
        L, cfg = default_lattice(N), _cfg(N, shells)
        for j, om in enumerate(L.half_periods):
            for i, x in enumerate(_points(rng, count, 0.6)):
                a, b, e = zeta(L, x + 2 * om, cfg), zeta(L, x, cfg), eta(L, x, om, cfg)
                out.append(_identity(f"zeta{N}(x+2w{j + 1}) - zeta{N}(x) = eta #{i}",
                                     _arr(a) - _arr(b) - eta_sign * _arr(e),
                                     a.tail_bound + b.tail_bound + e.tail_bound))
                c = zeta(L, x - 2 * om, cfg)
                f = eta(L, x - 2 * om, om, cfg)
                out.append(_identity(f"zeta{N}(x-2w{j + 1}) = zeta{N}(x) - eta(x-2w) #{i}",
                                     _arr(c) - _arr(b) + eta_sign * _arr(f),
                                     b.tail_bound + c.tail_bound + f.tail_bound))
    return out


def _eta_pairs(rng, count):
    L = default_lattice(4)
    hp = L.half_periods
    pairs = []
    for _ in range(count):
        j, k = rng.choice(4, size=2, replace=False)
        pairs.append((Paravector.from_array(rng.uniform(-0.5, 0.5, 4)), hp[j], hp[k], j, k))
    return L, pairs


def _eta_laws(rng, count, shells, eta_sign):
    L, pairs = _eta_pairs(rng, count)
    cfg = _cfg(4, shells)
    out = []
    for i, (x, w1, w2, j, k) in enumerate(pairs):
        e = eta(L, x, w1, cfg)
        e_neg = eta(L, -x, -w1, cfg)
        out.append(_identity(f"eta(-x,-w) = -eta(x,w) #{i}", _arr(e_neg) + eta_sign * _arr(e),
                             e.tail_bound + e_neg.tail_bound))
        shifted = eta(L, x - 2 * w1, w1, cfg)
        minus = eta(L, x, -w1, cfg)
        out.append(_identity(f"eta(x,-w) = -eta(x-2w,w) #{i}", _arr(minus) + eta_sign * _arr(shifted),
                             minus.tail_bound + shifted.tail_bound))
        z, at = zeta(L, w1, cfg), eta(L, -w1, w1, cfg)
        out.append(_identity(f"eta(-w,w) = 2 zeta(w) #{i}", _arr(at) - eta_sign * 2 * _arr(z),
                             at.tail_bound + 2 * z.tail_bound))
        w12 = -w1 - w2
        a, b = eta(L, x, w12, cfg), eta(L, x - 2 * w1, -w2, cfg)
        out.append(_identity(f"eta(x,w12) = eta(x,-w1) + eta(x-2w1,-w2) #{i}",
                             _arr(a) - eta_sign * (_arr(minus) + _arr(b)),
                             a.tail_bound + minus.tail_bound + b.tail_bound))
    return out


def _eta_published(rng, count, shells, eta_sign):
    L, pairs = _eta_pairs(rng, count)
    cfg = _cfg(4, shells)
    out = []
    for i, (x, w1, w2, j, k) in enumerate(pairs):
        e = eta(L, x, w1, cfg)
        a = eta(L, x, -w1, cfg)
        out.append(_identity(f"(ii) eta(x,-w) = -eta(x,w) #{i}", _arr(a) + _arr(e), a.tail_bound + e.tail_bound))
        b = eta(L, -x, w1, cfg)
        out.append(_identity(f"(iii) eta(-x,w) = eta(x,w) #{i}", _arr(b) - _arr(e), b.tail_bound + e.tail_bound))
        c = eta(L, -x, -w1, cfg)
        out.append(_identity(f"(iv) eta(-x,-w) = -eta(x,w) #{i}", _arr(c) + _arr(e), c.tail_bound + e.tail_bound))
        z = zeta(L, w1, cfg)
        hess = zeta_dir_deriv(L, w1, (x, x), cfg) if x.norm2() else None
        quad = _arr(hess) if hess else np.zeros(4)
        qb = hess.tail_bound if hess else 0.0
        out.append(_identity(f"(v) eta(x,w) = 2 zeta(w) + (x|grad)^2 zeta(w) #{i}",
                             _arr(e) - 2 * _arr(z) - quad, e.tail_bound + 2 * z.tail_bound + qb))
        d = eta(L, w1, w1, cfg)
        out.append(_identity(f"(vi) eta(w,w) = 2 zeta(w) #{i}", _arr(d) - 2 * _arr(z),
                             d.tail_bound + 2 * z.tail_bound))
        f, g = eta(L, x, w2, cfg), eta(L, x, -w1 - w2, cfg)
        out.append(_identity(f"eta(x,w1) + eta(x,w2) + eta(x,w12) = 0 #{i}", _arr(e) + _arr(f) + _arr(g),
                             e.tail_bound + f.tail_bound + g.tail_bound))
    return out


def _p_family(rng, count, shells, eta_sign):
    L, cfg = default_lattice(4), _cfg(4, shells)
    out = []
    alphas = [(3, 0, 0, 0), (1, 1, 1, 0), (0, 2, 0, 1), (0, 0, 0, 3)]
    for i, x in enumerate(_points(rng, count, 0.6)):
        alpha = alphas[i % len(alphas)]
        p, m = p_alpha(L, alpha, x, cfg), p_alpha(L, alpha, -x, cfg)
        out.append(_identity(f"P{alpha} even #{i}", _arr(p) - _arr(m), p.tail_bound + m.tail_bound))
        for j, om in enumerate(L.half_periods):
            s = p_alpha(L, alpha, x + 2 * om, cfg)
            out.append(_identity(f"P{alpha} period 2w{j + 1} #{i}", _arr(s) - _arr(p), s.tail_bound + p.tail_bound))
        d, r = p_alpha_direct(L, x, cfg), p_alpha(L, (3, 0, 0, 0), x, cfg)
        out.append(_identity(f"P0 direct = derivative route #{i}", _arr(d) - _arr(r), d.tail_bound + r.tail_bound))
    return out


def _vertex_zeros(rng, count, shells, eta_sign):
    L, cfg = default_lattice(4), _cfg(4, shells)
    out = []
    for v in L.vertices():
        r = d0_p0(L, v, cfg)
        eps = tuple(int(round(c)) for c in np.linalg.solve(L.periods, 2 * v.as_array()))
        out.append(_identity(f"D0P0 at vertex {eps}", _arr(r), r.tail_bound))
    return out


def _oracles(rng, count, shells, eta_sign):
    out = []
    L1, c1 = default_lattice(1), _cfg(1, shells)
    for i, t in enumerate(rng.uniform(0.1, 1.4, count) * rng.choice([-1.0, 1.0], count)):
        r = zeta(L1, Paravector(float(t)), c1)
        o = classical_cot_partial_fractions(float(t), c1.max_shells)
        out.append(_identity(f"zeta1 = cot partial fractions #{i}", [r.value.x0 - o, *r.value.as_array()[1:]],
                             r.tail_bound + classical_cot_tail_bound(float(t), c1.max_shells)))
    tau = SLICE_TAU
    L2 = Lattice((Paravector(0.5), Paravector(tau.real / 2, tau.imag / 2)))
    c2 = _cfg(2, shells)
    for i in range(count):
        z = complex(*rng.uniform(-0.4, 0.4, 2))
        r = zeta(L2, Paravector(z.real, z.imag), c2)
        o = classical_weierstrass_zeta(z, 0.5, tau / 2, c2.max_shells)
        v = r.value
        out.append(_identity(f"zeta2 = classical zeta on slice #{i}", [v.x0 - o.real, v.v1 - o.imag, v.v2, v.v3],
                             r.tail_bound + classical_zeta_tail_bound(z, 0.5, tau / 2, c2.max_shells)))
    return out


Suite = Callable[[np.random.Generator, int, int | None, float], list[IdentityResult]]

SUITES: dict[str, list[Suite]] = {
    "parity": [_parity],
    "quasi_periodicity": [_quasi_periodicity],
    "eta_laws": [_eta_laws],
    "eta_published": [_eta_published],
    "p_family": [_p_family],
    "vertex_zeros": [_vertex_zeros],
    "oracles": [_oracles],
}
SUITES["default"] = [f for name in ("parity", "quasi_periodicity", "eta_laws", "p_family",
                                    "vertex_zeros", "oracles") for f in SUITES[name]]


def run_suite(name: str, *, points: int = 3, shells: int | None = None, seed: int = 0,
              eta_sign: float = 1.0) -> dict:
    """Run one suite and return the report as plain data.

    ``eta_sign = -1`` flips the sign convention of eta everywhere it enters,
    a negative control that must fail.
    """
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    rng = np.random.default_rng(seed)
    results: list[IdentityResult] = []
    for fn in SUITES[name]:
        results.extend(fn(rng, points, shells, eta_sign))
    return {
        "version": REPORT_VERSION,
        "suite": name,
        "identities": [r.as_dict() for r in results],
        "all_pass": all(r.passed for r in results),
    }


def run_suites(names, **kwargs) -> list[dict]:
    return [run_suite(n, **kwargs) for n in names]


def worst(report: dict) -> float:
    """Largest residual-to-tolerance ratio in a report."""
    return max((r["residual"] / r["tolerance"] for r in report["identities"]), default=0.0)

