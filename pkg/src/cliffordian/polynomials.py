"""Holomorphic Cliffordian polynomials P_alpha and singular functions S_beta.

For a multi-index alpha in N^4 the letters of alpha are the multiset
``{0^a0, 1^a1, 2^a2, 3^a3}``, letter ``i`` standing for the basis paravector
``e_i`` (``e_0 = 1``).  Both families are sums over the distinct
arrangements of that multiset::

    P_alpha(x) = sum_s (e_s1 x)(e_s2 x) ... (e_s(n-1) x) e_sn
    S_beta(x)  = sum_s (x^-1 e_s1)(x^-1 e_s2) ... (x^-1 e_sn) x^-1
"""

from __future__ import annotations

import math
from typing import Iterator

import numpy as np

from .algebra import (
    PARAVECTOR_TOL,
    MultiIndex,
    Multivector,
    Paravector,
    geometric_product,
    inverse,
)
from .errors import EmptyIndex, NotInvertible, ZeroNorm

__all__ = [
    "distinct_arrangements",
    "multiset_permutations",
    "multinomial",
    "multi_indices",
    "expand_P",
    "expand_S",
    "eval_P",
    "eval_S",
    "p_table",
    "generating_closed_form",
    "generating_partial_sum",
    "generating_check",
    "generating_tail_bound",
]

_BASIS = tuple(Paravector.basis(i).to_multivector() for i in range(4))


def _next_permutation(seq: list[int]) -> bool:
    """Advance ``seq`` in place to the next lexicographic arrangement."""
    i = len(seq) - 2
    while i >= 0 and seq[i] >= seq[i + 1]:
        i -= 1
    if i < 0:
        return False
    j = len(seq) - 1
    while seq[j] <= seq[i]:
        j -= 1
    seq[i], seq[j] = seq[j], seq[i]
    seq[i + 1:] = reversed(seq[i + 1:])
    return True


def distinct_arrangements(letters) -> Iterator[tuple[int, ...]]:
    """Each distinct ordering of a multiset of integers, lexicographically."""
    seq = sorted(letters)
    yield tuple(seq)
    while _next_permutation(seq):
        yield tuple(seq)


def multiset_permutations(alpha) -> Iterator[tuple[int, ...]]:
    """Distinct arrangements of the letters of ``alpha`` in lexicographic order.

    Letter ``i`` stands for ``e_i``.  Raises :class:`EmptyIndex` for ``|alpha| = 0``.
    """
    alpha = MultiIndex.of(alpha)
    if alpha.length == 0:
        raise EmptyIndex("multi-index of length zero has no letters")
    return distinct_arrangements(alpha.letters())


def multinomial(alpha) -> int:
    alpha = MultiIndex.of(alpha)
    return math.factorial(alpha.length) // alpha.factorial()


def multi_indices(k: int) -> list[MultiIndex]:
    """All alpha in N^4 with ``|alpha| = k``, in lexicographic order."""
    out = []
    for a0 in range(k, -1, -1):
        for a1 in range(k - a0, -1, -1):
            for a2 in range(k - a0 - a1, -1, -1):
                out.append(MultiIndex(a0, a1, a2, k - a0 - a1 - a2))
    return out


def expand_P(alpha, x: Paravector) -> Multivector:
    """P_alpha(x) in the full algebra, before projection to S+V."""
    xm = x.to_multivector()
    total = Multivector(np.zeros(8))
    for word in multiset_permutations(alpha):
        acc = _BASIS[word[-1]]
        for letter in reversed(word[:-1]):
            acc = geometric_product(geometric_product(_BASIS[letter], xm), acc)
        total = total + acc
    return total


def expand_S(beta, x: Paravector) -> Multivector:
    """S_beta(x) in the full algebra.  Raises :class:`ZeroNorm` at x = 0."""
    beta = MultiIndex.of(beta)
    xinv = inverse(x).to_multivector()
    if beta.length == 0:
        return xinv
    total = Multivector(np.zeros(8))
    for word in multiset_permutations(beta):
        acc = xinv
        for letter in reversed(word):
            acc = geometric_product(geometric_product(xinv, _BASIS[letter]), acc)
        total = total + acc
    return total


def eval_P(alpha, x: Paravector, tol: float = PARAVECTOR_TOL) -> Paravector:
    """P_alpha(x) by direct expansion over the distinct arrangements."""
    return expand_P(alpha, x).to_paravector(tol)


def eval_S(beta, x: Paravector, tol: float = PARAVECTOR_TOL) -> Paravector:
    """S_beta(x); ``S_0 = x^-1``.  Raises :class:`ZeroNorm` at the pole x = 0."""
    return expand_S(beta, x).to_paravector(tol)


def p_table(x: Paravector, K: int) -> dict[tuple[int, int, int, int], Multivector]:
    """All P_alpha(x) with ``1 <= |alpha| <= K`` via the first-letter recursion.

    Splitting the arrangements of alpha by their first letter gives
    ``P_alpha = sum_i e_i x P_(alpha - e_i)``, with ``P_(e_i) = e_i``.  This
    avoids the multinomial blow-up of direct enumeration at large ``|alpha|``.
    """
    xm = x.to_multivector()
    left = [geometric_product(_BASIS[i], xm) for i in range(4)]
    table: dict[tuple[int, int, int, int], Multivector] = {}
    for i in range(4):
        table[tuple(int(j == i) for j in range(4))] = _BASIS[i]
    for k in range(2, K + 1):
        for alpha in multi_indices(k):
            a = alpha.as_tuple()
            acc = Multivector(np.zeros(8))
            for i in range(4):
                if a[i]:
                    prev = a[:i] + (a[i] - 1,) + a[i + 1:]
                    acc = acc + geometric_product(left[i], table[prev])
            table[a] = acc
    return table


def _lam_power(lam: np.ndarray, alpha: tuple[int, ...]) -> float:
    out = 1.0
    for li, ai in zip(lam, alpha):
        out *= li ** ai
    return out


def generating_closed_form(lam, x: Paravector) -> Paravector:
    """(1 - lam x)^-1 lam, evaluated as the paravector inverse (lam^-1 - x)^-1."""
    lam_p = Paravector.from_array(lam)
    if lam_p.norm2() == 0.0:
        return Paravector()
    try:
        return inverse(inverse(lam_p) - x)
    except ZeroNorm as exc:
        raise NotInvertible("1 - lam x is not invertible") from exc


def generating_partial_sum(lam, x: Paravector, K: int) -> Paravector:
    """sum over 1 <= |alpha| <= K of P_alpha(x) lam_alpha."""
    if K < 1:
        raise ValueError("K must be at least 1")
    lam = np.asarray(lam, dtype=float).reshape(4)
    total = np.zeros(8)
    for alpha, value in p_table(x, K).items():
        total += value.coeffs * _lam_power(lam, alpha)
    return Multivector(total).to_paravector()


def generating_check(lam, x: Paravector, K: int) -> tuple[Paravector, Paravector]:
    """Return ``(closed form, partial sum to order K)`` for comparison."""
    return generating_closed_form(lam, x), generating_partial_sum(lam, x, K)


def generating_tail_bound(lam, x: Paravector, K: int) -> float:
    """Bound on the omitted terms: the order-n term is ``(lam x)^(n-1) lam``.

    Paravector norms are multiplicative on these products, so the tail past
    ``|alpha| = K`` is at most ``|lam| rho^K / (1 - rho)`` with ``rho = |lam||x|``.
    """
    lam_n = float(np.linalg.norm(np.asarray(lam, dtype=float)))
    rho = lam_n * x.norm()
    if rho >= 1.0:
        return math.inf
    return lam_n * rho ** K / (1.0 - rho)
