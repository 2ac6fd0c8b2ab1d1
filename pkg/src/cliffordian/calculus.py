"""Directional derivatives, finite-difference oracles and the operator D Delta.

``(h|grad) f`` is the derivative of ``f`` at ``x`` along the paravector ``h``.
For the inverse map the iterated derivatives have the closed form::

    (h1|grad)...(hq|grad) x^-1 = (-1)^q sum_s x^-1 h_s1 x^-1 h_s2 ... h_sq x^-1

where ``s`` runs over all q! orderings of the directions.  Everything else in
this module is finite differences, used to check closed forms and to probe
``D Delta f = 0`` numerically.
"""

from __future__ import annotations

import itertools
import math
from typing import Callable, Sequence

import numpy as np

from .algebra import Multivector, Paravector, geometric_product, inverse
from .errors import AxisSingularity

__all__ = [
    "MAX_DIRECTIONS",
    "dir_deriv_inverse",
    "fd_dir_deriv",
    "apply_DDelta",
    "bilaplacian",
    "lemma2_lift",
    "default_fd_step",
]

MAX_DIRECTIONS = 6
DDELTA_STEP = 5e-2

Function = Callable[[Paravector], object]


def default_fd_step(x: Paravector) -> float:
    return 1e-3 * (1.0 + x.norm())


def _coeffs(value) -> np.ndarray:
    if isinstance(value, Paravector):
        return np.concatenate([value.as_array(), np.zeros(4)])
    if isinstance(value, Multivector):
        return np.array(value.coeffs)
    if hasattr(value, "value") and isinstance(value.value, Paravector):
        return _coeffs(value.value)  # SeriesResult and friends
    arr = np.asarray(value, dtype=float)
    if arr.shape == (4,):
        return np.concatenate([arr, np.zeros(4)])
    if arr.shape == (8,):
        return arr
    raise TypeError(f"cannot interpret {type(value).__name__} as a multivector")


def _check_dirs(dirs: Sequence[Paravector]) -> tuple[Paravector, ...]:
    dirs = tuple(dirs)
    if not dirs:
        raise ValueError("at least one direction is required")
    if len(dirs) > MAX_DIRECTIONS:
        raise ValueError(f"at most {MAX_DIRECTIONS} directions are supported")
    return dirs


def dir_deriv_inverse(x: Paravector, dirs: Sequence[Paravector]) -> Paravector:
    """Exact mixed directional derivative of ``x -> x^-1``.

    Raises :class:`ZeroNorm` at ``x = 0``.
    """
    dirs = _check_dirs(dirs)
    xinv = inverse(x).to_multivector()
    steps = [geometric_product(xinv, h) for h in dirs]  # x^-1 h_i
    total = np.zeros(8)
    for order in itertools.permutations(range(len(dirs))):
        acc = xinv
        for i in reversed(order):
            acc = geometric_product(steps[i], acc)
        total += acc.coeffs
    sign = -1.0 if len(dirs) % 2 else 1.0
    return Multivector(sign * total).to_paravector()


def fd_dir_deriv(f: Function, x: Paravector, dirs: Sequence[Paravector],
                 step: float | None = None) -> Multivector:
    """Central-difference mixed directional derivative, error O(step^2).

    Each direction contributes the half-step difference
    ``(g(x + h t/2) - g(x - h t/2)) / t``; the product of these operators is
    expanded over all sign patterns.
    """
    dirs = _check_dirs(dirs)
    if step is None:
        step = default_fd_step(x)
    if not step > 0:
        raise ValueError("step must be positive")
    base = x.as_array()
    hs = [h.as_array() for h in dirs]
    total = np.zeros(8)
    for signs in itertools.product((1.0, -1.0), repeat=len(dirs)):
        point = base + 0.5 * step * sum(s * h for s, h in zip(signs, hs))
        total += math.prod(signs) * _coeffs(f(Paravector.from_array(point)))
    return Multivector(total / step ** len(dirs))


def _laplacian_gradient(f: Function, x: Paravector, h: float) -> list[np.ndarray]:
    """``d_i Delta f`` for i = 0..3 by second-order central stencils."""
    base = x.as_array()
    cache: dict[tuple[int, int, int, int], np.ndarray] = {}

    def at(offsets: tuple[int, int, int, int]) -> np.ndarray:
        if offsets not in cache:
            cache[offsets] = _coeffs(f(Paravector.from_array(base + h * np.array(offsets))))
        return cache[offsets]

    def unit(i: int, a: int, j: int = 0, b: int = 0) -> tuple[int, int, int, int]:
        v = [0, 0, 0, 0]
        v[i] += a
        v[j] += b
        return tuple(v)

    out = []
    for i in range(4):
        acc = (at(unit(i, 2)) - 2 * at(unit(i, 1)) + 2 * at(unit(i, -1)) - at(unit(i, -2))) / (2 * h ** 3)
        for j in range(4):
            if j == i:
                continue
            plus = at(unit(i, 1, j, 1)) - 2 * at(unit(i, 1)) + at(unit(i, 1, j, -1))
            minus = at(unit(i, -1, j, 1)) - 2 * at(unit(i, -1)) + at(unit(i, -1, j, -1))
            acc = acc + (plus - minus) / (2 * h ** 3)
        out.append(acc)
    return out


def _ddelta_raw(f: Function, x: Paravector, h: float, side: str) -> np.ndarray:
    grads = _laplacian_gradient(f, x, h)
    total = np.zeros(8)
    for i, g in enumerate(grads):
        e = Paravector.basis(i)
        if side == "left":
            total += geometric_product(e, Multivector(g)).coeffs
        else:
            total += geometric_product(Multivector(g), e).coeffs
    return total


def apply_DDelta(f: Function, x: Paravector, step: float = DDELTA_STEP, *,
                 side: str = "left", richardson: bool = True) -> Multivector:
    """Finite-difference ``D Delta f`` with ``D = sum_i e_i d/dx_i``.

    ``side="right"`` applies the basis vectors on the right, the test for
    right holomorphy.  With ``richardson`` the O(step^2) stencil results at
    ``step`` and ``step/2`` are combined into an O(step^4) estimate.
    """
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    coarse = _ddelta_raw(f, x, step, side)
    if not richardson:
        return Multivector(coarse)
    fine = _ddelta_raw(f, x, step / 2, side)
    return Multivector((4.0 * fine - coarse) / 3.0)


def bilaplacian(u: Callable[[np.ndarray], float], x: np.ndarray, step: float = DDELTA_STEP,
                richardson: bool = True) -> float:
    """Finite-difference ``Delta^2 u`` of a scalar field on R^4."""
    x = np.asarray(x, dtype=float)

    def raw(h: float) -> float:
        def at(*pairs: tuple[int, int]) -> float:
            p = x.copy()
            for i, a in pairs:
                p[i] += a * h
            return float(u(p))

        total = 0.0
        for i in range(4):
            total += (at((i, 2)) - 4 * at((i, 1)) + 6 * at() - 4 * at((i, -1)) + at((i, -2))) / h ** 4
            for j in range(i + 1, 4):
                mixed = 0.0
                for a, wa in ((1, 1.0), (0, -2.0), (-1, 1.0)):
                    for b, wb in ((1, 1.0), (0, -2.0), (-1, 1.0)):
                        mixed += wa * wb * at((i, a), (j, b))
                total += 2 * mixed / h ** 4
        return total

    coarse = raw(step)
    if not richardson:
        return coarse
    return (4.0 * raw(step / 2) - coarse) / 3.0


def lemma2_lift(u: Callable[[float, float], float], v: Callable[[float, float], float],
                x: Paravector, axis_tol: float = 0.0) -> Paravector:
    """Lift a planar holomorphic ``u + i v`` to ``u(x0,t) + (xvec/t) v(x0,t)``, ``t = |xvec|``.

    On the real axis the vector term must vanish: ``v(x0, 0)`` has to be
    zero, otherwise :class:`AxisSingularity` is raised.
    """
    t = x.vector_norm()
    if t == 0.0:
        v0 = float(v(x.x0, 0.0))
        if abs(v0) > axis_tol:
            raise AxisSingularity(f"v(x0, 0) = {v0:.3e} does not vanish on the real axis")
        return Paravector(float(u(x.x0, 0.0)))
    s = float(v(x.x0, t)) / t
    return Paravector(float(u(x.x0, t)), x.v1 * s, x.v2 * s, x.v3 * s)
