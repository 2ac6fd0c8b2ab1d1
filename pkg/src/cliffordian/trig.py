"""Exponential and trigonometric holomorphic Cliffordian functions.

Write ``x = x0 + t n`` with ``t = |xvec|`` and ``n`` a unit vector.  Since
``n^2 = -1``, the slice ``x0 + R n`` is a copy of the complex plane, and each
function here is the lift ``u(x0, t) + n v(x0, t)`` of the planar function
``u + i v``.  The vector part is evaluated as ``xvec * (v / t)``, with the
ratio ``v / t`` taken from a short series when ``t`` is tiny, so the real
axis needs no special casing.
"""

from __future__ import annotations

import math

from .algebra import Multivector, Paravector, geometric_product
from .errors import PoleOfCotan, ZeroNorm

__all__ = ["exp_cl", "sin_cl", "cos_cl", "cotan_cl", "slice_square_sum", "SERIES_THRESHOLD", "COTAN_EPS"]

SERIES_THRESHOLD = 1e-4
COTAN_EPS = 1e-14


def _sinc(t: float) -> float:
    """sin(t)/t."""
    if t < SERIES_THRESHOLD:
        return 1.0 - t * t / 6.0
    return math.sin(t) / t


def _sinhc(t: float) -> float:
    """sinh(t)/t."""
    if t < SERIES_THRESHOLD:
        return 1.0 + t * t / 6.0
    return math.sinh(t) / t


def _lift(x: Paravector, u: float, v_over_t: float) -> Paravector:
    return Paravector(u, x.v1 * v_over_t, x.v2 * v_over_t, x.v3 * v_over_t)


def exp_cl(x: Paravector) -> Paravector:
    """e^x = e^{x0} (cos t + n sin t)."""
    t = x.vector_norm()
    scale = math.exp(x.x0)
    return _lift(x, scale * math.cos(t), scale * _sinc(t))


def sin_cl(x: Paravector) -> Paravector:
    """sin x = sin x0 cosh t + n cos x0 sinh t."""
    t = x.vector_norm()
    return _lift(x, math.sin(x.x0) * math.cosh(t), math.cos(x.x0) * _sinhc(t))


def cos_cl(x: Paravector) -> Paravector:
    """cos x = cos x0 cosh t - n sin x0 sinh t."""
    t = x.vector_norm()
    return _lift(x, math.cos(x.x0) * math.cosh(t), -math.sin(x.x0) * _sinhc(t))


def cotan_cl(x: Paravector, eps: float = COTAN_EPS) -> Paravector:
    """cos x (sin x)^-1, with the inverse taken on the right.

    Both factors lie on the slice of ``x`` and commute, so the operand order
    does not change the value.  Raises :class:`PoleOfCotan` on the zeros of
    ``sin x``, which are the real points ``k pi``.
    """
    s = sin_cl(x)
    try:
        s_inv = s.inverse(eps)
    except ZeroNorm as exc:
        raise PoleOfCotan(f"sin vanishes at {x.as_tuple()}") from exc
    return geometric_product(cos_cl(x), s_inv).to_paravector()


def slice_square_sum(x: Paravector) -> Multivector:
    """sin(x)^2 + cos(x)^2 computed with the geometric product."""
    s, c = sin_cl(x), cos_cl(x)
    return geometric_product(s, s) + geometric_product(c, c)
