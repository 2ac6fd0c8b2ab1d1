"""Classical complex-variable series used as independent test oracles.

Nothing here touches the Clifford algebra code: the arithmetic is Python
``complex`` and the shells, pairing and bounds are re-derived from scratch.
"""

from __future__ import annotations

import math

from .errors import NearPole

__all__ = [
    "classical_weierstrass_zeta",
    "classical_zeta_tail_bound",
    "classical_cot_partial_fractions",
    "classical_cot_tail_bound",
]

POLE_GUARD = 1e-8


def _sigma(w1: complex, w2: complex) -> float:
    """Smallest singular value of the real 2x2 matrix with columns w1, w2."""
    a, b, c, d = w1.real, w2.real, w1.imag, w2.imag
    s = a * a + b * b + c * c + d * d
    det = abs(a * d - b * c)
    if det == 0.0:
        raise ValueError("half-periods must be linearly independent over R")
    return math.sqrt(max(0.0, 0.5 * (s - math.sqrt(max(0.0, s * s - 4.0 * det * det)))))


def _half_shell(k: int):
    """One index of each pair on the square ``max(|m|, |n|) = k``: 4k of them."""
    for n in range(-k + 1, k + 1):
        yield k, n
    for m in range(k - 1, -k, -1):
        yield m, k
    yield k, -k


def classical_weierstrass_zeta(z: complex, w1: complex, w2: complex, K: int) -> complex:
    """Weierstrass zeta with half-periods ``w1, w2``, truncated after shell ``K``.

    The lattice is ``2 m w1 + 2 n w2``; shell ``k`` is ``max(|m|, |n|) = k``.
    The terms of ``w`` and ``-w`` are combined into ``2 z^3 / (w^2 (z^2 - w^2))``.
    """
    z = complex(z)
    _sigma(w1, w2)
    if abs(z) < POLE_GUARD:
        raise NearPole(f"z = {z} is a lattice point", pole=(0, 0))
    re, im = [], []
    for k in range(1, K + 1):
        for m, n in _half_shell(k):
            w = 2 * m * w1 + 2 * n * w2
            if min(abs(z - w), abs(z + w)) < POLE_GUARD:
                raise NearPole(f"z = {z} is a lattice point", pole=(m, n))
            t = 2 * z ** 3 / (w * w * (z * z - w * w))
            re.append(t.real)
            im.append(t.imag)
    head = 1 / z
    return complex(math.fsum(re + [head.real]), math.fsum(im + [head.imag]))


def classical_zeta_tail_bound(z: complex, w1: complex, w2: complex, K: int) -> float:
    """Bound on the shells beyond ``K`` when ``|z| <= sigma (K + 1)``.

    Shell ``k`` has ``4k`` pairs with ``|w| >= 2 sigma k``; for ``|z| <= |w|/2``
    a pair is at most ``(8/3)|z|^3/|w|^4``, and ``sum_{k>K} k^-3 <= 1/(2K^2)``.
    """
    sigma = _sigma(w1, w2)
    r = abs(complex(z))
    if K < 1 or r > sigma * (K + 1):
        return math.inf
    return r ** 3 / (3.0 * sigma ** 4 * K * K)


def classical_cot_partial_fractions(t: float, K: int) -> float:
    """``1/t + sum_{k=1..K} 2t / (t^2 - k^2 pi^2)``, converging to ``cot t``."""
    t = float(t)
    k_near = round(t / math.pi)
    if abs(t - k_near * math.pi) < POLE_GUARD:
        raise NearPole(f"t = {t} is a pole of cot", pole=(k_near,))
    terms = [1.0 / t]
    for k in range(1, K + 1):
        terms.append(2.0 * t / (t * t - (k * math.pi) ** 2))
    return math.fsum(terms)


def classical_cot_tail_bound(t: float, K: int) -> float:
    """Bound on ``sum_{k>K}`` for ``|t| <= K pi / 2``: ``8|t| / (3 pi^2 K)``."""
    t = abs(float(t))
    if K < 1 or t > K * math.pi / 2:
        return math.inf
    return 8.0 * t / (3.0 * math.pi ** 2 * K)
