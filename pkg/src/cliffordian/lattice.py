"""Period lattices ``2 Z^N omega`` in S+V, shell enumeration and tail bounds.

A point of the lattice is ``w = 2 (k1 omega_1 + ... + kN omega_N)``.  Points
are grouped into Chebyshev shells ``max |k_j| = k``; shell ``k`` holds
``(2k+1)^N - (2k-1)^N`` points and is closed under ``w -> -w``.

Bounds
------
For ``|x| <= r`` and ``rho = r/|w| < 1`` the collapsed term expands as
``-sum_{n >= N} (w^-1 x)^n w^-1``.  Paravector norms are multiplicative on
such products, so the q-th directional derivative along ``h_1..h_q`` of one
term is at most ``prod|h_i| sum_n n(n-1)..(n-q+1) rho^(n-q) / |w|^(q+1)``.
Adding ``w`` and ``-w`` removes the even powers.  Every shell point satisfies
``|w| >= 2 sigma k`` with ``sigma`` the smallest singular value of the
half-period matrix, which turns the per-term bound into a per-shell one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from . import _kernels
from .algebra import Paravector
from .errors import ConfigError, NearPole, RadiusTooLarge

__all__ = [
    "Lattice",
    "SumConfig",
    "default_config",
    "default_lattice",
    "shell_count",
    "shell_points",
    "series_majorant",
    "tail_bound",
    "shell_bounds",
    "check_pole",
    "first_power",
]

RANK_TOL = 1e-12
EXPLICIT_SHELLS = 2000
RHO_MAX = 0.5


@dataclass(frozen=True)
class Lattice:
    """Rank-N lattice generated by the doubled half-periods ``2 omega_j``."""

    half_periods: tuple[Paravector, ...]
    sigma_min: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        hp = tuple(p if isinstance(p, Paravector) else Paravector.from_array(p)
                   for p in self.half_periods)
        object.__setattr__(self, "half_periods", hp)
        if not 1 <= len(hp) <= 4:
            raise ConfigError(f"lattice rank must be 1..4, got {len(hp)}")
        mat = np.array([p.as_array() for p in hp]).T
        if not np.all(np.isfinite(mat)):
            raise ConfigError("half-periods must be finite")
        sv = np.linalg.svd(mat, compute_uv=False)
        if sv[-1] <= RANK_TOL * max(sv[0], 1.0):
            raise ConfigError("half-periods are linearly dependent")
        object.__setattr__(self, "sigma_min", float(sv[-1]))

    @classmethod
    def parse(cls, text: str) -> Lattice:
        """Build from ``"a,b,c,d;a,b,c,d;..."`` (one 4-tuple per half-period)."""
        try:
            parts = [p for p in text.split(";") if p.strip()]
            hp = []
            for part in parts:
                vals = [float(v) for v in part.split(",")]
                if len(vals) != 4:
                    raise ValueError(f"expected 4 components, got {len(vals)}")
                hp.append(Paravector(*vals))
        except ValueError as exc:
            raise ConfigError(f"bad lattice spec {text!r}: {exc}") from exc
        return cls(tuple(hp))

    @property
    def rank(self) -> int:
        return len(self.half_periods)

    @property
    def periods(self) -> np.ndarray:
        """4 x N matrix whose columns are the periods ``2 omega_j``."""
        return 2.0 * np.array([p.as_array() for p in self.half_periods]).T

    def key(self) -> tuple:
        return tuple(p.as_tuple() for p in self.half_periods)

    def point(self, k: Sequence[int]) -> Paravector:
        k = np.asarray(k, dtype=float)
        if k.shape != (self.rank,):
            raise ValueError(f"multi-index must have {self.rank} entries")
        return Paravector.from_array(self.periods @ k)

    def min_norm_bound(self, k: int) -> float:
        """Lower bound ``2 sigma k`` on ``|w|`` over shell ``k``."""
        return 2.0 * self.sigma_min * k

    def vertices(self) -> list[Paravector]:
        """The ``2^N - 1`` half-period vertices ``sum eps_j omega_j``, eps in {0,1}."""
        out = []
        for mask in range(1, 2 ** self.rank):
            v = np.zeros(4)
            for j, p in enumerate(self.half_periods):
                if mask >> j & 1:
                    v += p.as_array()
            out.append(Paravector.from_array(v))
        return out

    def nearest_point(self, x: Paravector) -> tuple[tuple[int, ...], float]:
        """Closest lattice point among the roundings of the least-squares index."""
        mat = self.periods
        coef, *_ = np.linalg.lstsq(mat, x.as_array(), rcond=None)
        base = np.floor(coef)
        best, best_d = None, math.inf
        for mask in range(2 ** self.rank):
            k = base + np.array([(mask >> j) & 1 for j in range(self.rank)])
            d = float(np.linalg.norm(mat @ k - x.as_array()))
            if d < best_d:
                best, best_d = tuple(int(v) for v in k), d
        return best, best_d


def default_lattice(rank: int) -> Lattice:
    """Half-periods ``(pi/2) e_0, ..., (pi/2) e_(N-1)``; rank 1 gives the cotangent lattice."""
    if not 1 <= rank <= 4:
        raise ConfigError(f"lattice rank must be 1..4, got {rank}")
    return Lattice(tuple(Paravector.basis(j) * (math.pi / 2) for j in range(rank)))


@dataclass(frozen=True)
class SumConfig:
    """Truncation and accumulation settings for a lattice series.

    ``near_shells`` and ``series_order`` only matter for the hybrid engine,
    which sums the innermost shells term by term and the rest through
    precomputed lattice moments; ``None`` picks them automatically.
    """

    max_shells: int = 60
    target_tol: float = 1e-2
    pairing: bool = True
    compensated: bool = True
    pole_guard: float = 1e-8
    engine: str = "auto"
    near_shells: int | None = None
    series_order: int | None = None
    strict: bool = True

    def __post_init__(self):
        if self.max_shells < 1:
            raise ConfigError("max_shells must be at least 1")
        if not self.target_tol > 0:
            raise ConfigError("target_tol must be positive")
        if not self.pole_guard > 0:
            raise ConfigError("pole_guard must be positive")
        if self.engine not in ("auto", "direct", "hybrid"):
            raise ConfigError(f"unknown engine {self.engine!r}")
        if self.near_shells is not None and self.near_shells < 1:
            raise ConfigError("near_shells must be at least 1")
        if self.series_order is not None and self.series_order < 1:
            raise ConfigError("series_order must be at least 1")

    def with_(self, **changes) -> SumConfig:
        return replace(self, **changes)


_DEFAULTS = {
    1: dict(max_shells=200, target_tol=1e-2),
    2: dict(max_shells=200, target_tol=1e-3),
    3: dict(max_shells=200, target_tol=2e-1),
    4: dict(max_shells=60, target_tol=5e-1),
}


def default_config(rank: int, **overrides) -> SumConfig:
    """Defaults per rank; the tolerances are sized to the rigorous tail bounds."""
    if rank not in _DEFAULTS:
        raise ConfigError(f"lattice rank must be 1..4, got {rank}")
    return SumConfig(**{**_DEFAULTS[rank], **overrides})


def shell_count(rank: int, k: int) -> int:
    return (2 * k + 1) ** rank - (2 * k - 1) ** rank


def shell_points(L: Lattice, k: int) -> list[tuple[tuple[int, ...], Paravector]]:
    """All points of shell ``k`` as ``(multi-index, w)``, each ``w`` followed by ``-w``."""
    if k < 1:
        raise ValueError("shell index must be at least 1")
    mat = L.periods
    out = []
    for idx in _kernels.shell_indices(L.rank, k):
        w = mat @ idx.astype(float)
        out.append((tuple(int(v) for v in idx), Paravector.from_array(w)))
        out.append((tuple(int(-v) for v in idx), Paravector.from_array(-w)))
    return out


def first_power(rank: int, paired: bool) -> int:
    """Lowest power of ``w^-1 x`` left in a term (or pair) of the series."""
    if paired and rank % 2 == 0:
        return rank + 1
    return rank


def series_majorant(rho: np.ndarray, n_start: int, step: int, q: int = 0) -> np.ndarray:
    """``sum_{n = n_start, n_start+step, ...} n(n-1)..(n-q+1) rho^(n-q)``, elementwise.

    Summation stops once terms are negligible and the rest is closed with a
    geometric bound, so the result is an upper bound.  ``inf`` for ``rho >= 1``.
    """
    rho = np.asarray(rho, dtype=float)
    out = np.zeros_like(rho)
    bad = rho >= 1.0
    r = np.where(bad, 0.0, rho)
    n = n_start
    while n < q:
        n += step
    total = np.zeros_like(r)
    for _ in range(200000):
        term = math.perm(n, q) * r ** (n - q)
        total += term
        nxt = n + step
        ratio = math.perm(nxt, q) / math.perm(n, q) * r ** step
        if np.all((ratio < 1.0) & (term <= 1e-18 * np.maximum(total, 1e-300))):
            total += term * ratio / (1.0 - ratio)
            break
        n = nxt
    else:
        total[:] = np.inf
    out[:] = total
    out[bad] = np.inf
    return out


def _majorant_terms(rank: int, paired: bool, q: int) -> tuple[int, int]:
    if paired:
        return first_power(rank, True) | 1, 2  # odd powers only
    return rank, 1


def shell_bounds(L: Lattice, r: float, shells: np.ndarray, min_norms: np.ndarray, *,
                 q: int = 0, dir_norm: float = 1.0, paired: bool = True,
                 n_start: int | None = None) -> np.ndarray:
    """Per-shell bound on the (derivative of the) series terms for given shells.

    ``min_norms`` are lower bounds on ``|w|`` in each shell.  ``n_start``
    overrides the first power kept, used for the remainder of a truncated
    power series (which keeps odd powers only).
    """
    shells = np.asarray(shells, dtype=int)
    mins = np.asarray(min_norms, dtype=float)
    if n_start is None:
        start, step = _majorant_terms(L.rank, paired, q)
    else:
        start, step = n_start, 2
    counts = np.array([shell_count(L.rank, int(k)) for k in shells], dtype=float)
    rho = r / mins
    return counts * dir_norm * series_majorant(rho, start, step, q) / mins ** (q + 1)


def tail_bound(L: Lattice, N: int, r: float, K: int, *, q: int = 0, dir_norm: float = 1.0,
               paired: bool = True) -> float:
    """Upper bound on the shells beyond ``K`` for every ``|x| <= r``.

    Shells ``K+1 .. K+2000`` are summed explicitly; the rest is closed by an
    integral comparison using that ``count(k)/k^(N-1)`` decreases in ``k``.
    Raises :class:`RadiusTooLarge` when ``r > |w|/2`` is possible beyond ``K``.
    """
    if N != L.rank:
        raise ConfigError(f"series index {N} does not match lattice rank {L.rank}")
    if K < 0:
        raise ValueError("K must be nonnegative")
    if r < 0:
        raise ValueError("radius must be nonnegative")
    lo = L.min_norm_bound(K + 1)
    if r > RHO_MAX * lo:
        raise RadiusTooLarge(f"radius {r:.4g} exceeds half the shortest vector bound {lo:.4g} beyond shell {K}")
    k_end = K + max(EXPLICIT_SHELLS, 10 * K)
    ks = np.arange(K + 1, k_end + 1)
    mins = 2.0 * L.sigma_min * ks
    explicit = float(np.sum(shell_bounds(L, r, ks, mins, q=q, dir_norm=dir_norm, paired=paired)))
    start, step = _majorant_terms(N, paired, q)
    n_eff = start
    while n_eff < q:
        n_eff += step
    p = n_eff + 2 - N
    c_end = shell_count(N, k_end) / k_end ** (N - 1)
    rho_end = r / mins[-1]
    if rho_end > 0.0:
        m_scaled = float(series_majorant(np.array([rho_end]), start, step, q)[0]) / rho_end ** (n_eff - q)
    else:
        m_scaled = float(math.perm(n_eff, q))
    amp = c_end * dir_norm * m_scaled * r ** (n_eff - q) / (2.0 * L.sigma_min) ** (n_eff + 1)
    closure = amp * k_end ** (1 - p) / (p - 1)
    return explicit + closure


def check_pole(L: Lattice, x: Paravector, guard: float) -> None:
    """Raise :class:`NearPole` if ``x`` is within ``guard`` of a lattice point."""
    k, d = L.nearest_point(x)
    if d < guard:
        raise NearPole(f"point {x.as_tuple()} lies within {d:.3e} of lattice point {k}", pole=k)
