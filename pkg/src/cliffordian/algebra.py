"""Arithmetic in the Clifford algebra R_{0,3} and its paravector subspace.

Blades are stored in the fixed order ``1, e1, e2, e3, e12, e13, e23, e123``.
The multiplication table is generated from the anticommutation relations
``e_i e_j + e_j e_i = -2 delta_ij`` when the module is imported; nothing in it
is written by hand.

Besides the blade basis, the engine in :mod:`cliffordian._kernels` uses the
split form R_{0,3} = H + H.  The pseudoscalar ``e123`` is central with square
``+1``, so ``(1 +- e123)/2`` are central idempotents and each half is a copy
of the quaternions.  :data:`SPLIT` and :data:`UNSPLIT` convert between the two
coordinate systems.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import GradeLeak, ZeroNorm

__all__ = [
    "BLADES",
    "BLADE_MASKS",
    "GRADES",
    "Multivector",
    "Paravector",
    "MultiIndex",
    "geometric_product",
    "conjugate",
    "inverse",
    "sandwich_power",
    "cayley_table",
    "ZERO_NORM_EPS",
    "PARAVECTOR_TOL",
]

BLADES = ("1", "e1", "e2", "e3", "e12", "e13", "e23", "e123")
# bit i set <=> generator e_{i+1} present
BLADE_MASKS = (0b000, 0b001, 0b010, 0b100, 0b011, 0b101, 0b110, 0b111)
GRADES = tuple(bin(m).count("1") for m in BLADE_MASKS)
_INDEX_OF_MASK = {m: i for i, m in enumerate(BLADE_MASKS)}

ZERO_NORM_EPS = 1e-14
PARAVECTOR_TOL = 1e-12


def _reorder_sign(a: int, b: int) -> int:
    """Sign picked up by moving the generators of ``b`` past those of ``a``.

    Counts transpositions needed to sort the concatenated word, then applies
    ``e_i e_i = -1`` for every generator the two blades share.
    """
    swaps = 0
    shifted = a >> 1
    while shifted:
        swaps += bin(shifted & b).count("1")
        shifted >>= 1
    squares = bin(a & b).count("1")
    return -1 if (swaps + squares) % 2 else 1


def _build_tables() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    index = np.zeros((8, 8), dtype=np.int64)
    sign = np.zeros((8, 8), dtype=np.float64)
    for i, a in enumerate(BLADE_MASKS):
        for j, b in enumerate(BLADE_MASKS):
            index[i, j] = _INDEX_OF_MASK[a ^ b]
            sign[i, j] = _reorder_sign(a, b)
    # structure tensor: (a b)_k = sum_ij a_i b_j G[i, j, k]
    structure = np.zeros((8, 8, 8))
    for i in range(8):
        for j in range(8):
            structure[i, j, index[i, j]] = sign[i, j]
    return index, sign, structure


PRODUCT_INDEX, PRODUCT_SIGN, _STRUCTURE = _build_tables()
for _arr in (PRODUCT_INDEX, PRODUCT_SIGN, _STRUCTURE):
    _arr.setflags(write=False)


def cayley_table() -> list[list[tuple[int, str]]]:
    """Return the blade multiplication table as ``(sign, blade name)`` entries."""
    return [
        [(int(PRODUCT_SIGN[i, j]), BLADES[PRODUCT_INDEX[i, j]]) for j in range(8)]
        for i in range(8)
    ]


def _qmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a0, a1, a2, a3 = a
    b0, b1, b2, b3 = b
    return np.array([
        a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
        a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
        a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
        a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
    ])


def _build_split() -> tuple[np.ndarray, np.ndarray]:
    one = np.array([1.0, 0.0, 0.0, 0.0])
    qi = np.array([0.0, 1.0, 0.0, 0.0])
    qj = np.array([0.0, 0.0, 1.0, 0.0])
    qk = np.array([0.0, 0.0, 0.0, 1.0])
    # generator images in the (+, -) halves; e1 e2 e3 -> (+1, -1)
    gens = [(qi, qi), (qj, qj), (-qk, qk)]
    columns = []
    for mask in BLADE_MASKS:
        plus, minus = one, one
        for bit in range(3):
            if mask & (1 << bit):
                plus = _qmul(plus, gens[bit][0])
                minus = _qmul(minus, gens[bit][1])
        columns.append(np.concatenate([plus, minus]))
    split = np.array(columns).T
    return split, np.linalg.inv(split)


SPLIT, UNSPLIT = _build_split()
UNSPLIT = np.round(UNSPLIT * 2.0) / 2.0  # entries are exactly 0, +-1/2
SPLIT.setflags(write=False)
UNSPLIT.setflags(write=False)


def _as_coeffs(m) -> np.ndarray:
    if isinstance(m, Multivector):
        return m.coeffs
    if isinstance(m, Paravector):
        return m.to_multivector().coeffs
    if isinstance(m, (int, float)):
        c = np.zeros(8)
        c[0] = float(m)
        return c
    raise TypeError(f"cannot interpret {type(m).__name__} as a multivector")


class Multivector:
    """Immutable element of R_{0,3}: eight real coefficients over the blades."""

    __slots__ = ("_c",)

    def __init__(self, coeffs: Sequence[float]):
        c = np.array(coeffs, dtype=np.float64).reshape(8)
        c.setflags(write=False)
        self._c = c

    @classmethod
    def blade(cls, name: str, value: float = 1.0) -> Multivector:
        c = np.zeros(8)
        c[BLADES.index(name)] = value
        return cls(c)

    @classmethod
    def scalar(cls, value: float) -> Multivector:
        return cls.blade("1", value)

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    def __getitem__(self, key):
        if isinstance(key, str):
            return float(self._c[BLADES.index(key)])
        return self._c[key]

    def __iter__(self) -> Iterator[float]:
        return iter(self._c.tolist())

    def __repr__(self) -> str:
        terms = ", ".join(f"{b}={v:.6g}" for b, v in zip(BLADES, self._c) if v != 0.0)
        return f"Multivector({terms or '0'})"

    def __eq__(self, other) -> bool:
        try:
            return bool(np.array_equal(self._c, _as_coeffs(other)))
        except TypeError:
            return NotImplemented

    def __hash__(self) -> int:
        return hash(self._c.tobytes())

    def __add__(self, other) -> Multivector:
        try:
            return Multivector(self._c + _as_coeffs(other))
        except TypeError:
            return NotImplemented

    __radd__ = __add__

    def __sub__(self, other) -> Multivector:
        try:
            return Multivector(self._c - _as_coeffs(other))
        except TypeError:
            return NotImplemented

    def __rsub__(self, other) -> Multivector:
        try:
            return Multivector(_as_coeffs(other) - self._c)
        except TypeError:
            return NotImplemented

    def __neg__(self) -> Multivector:
        return Multivector(-self._c)

    def __mul__(self, other) -> Multivector:
        if isinstance(other, (int, float)):
            return Multivector(self._c * float(other))
        if isinstance(other, (Multivector, Paravector)):
            return geometric_product(self, other)
        return NotImplemented

    def __rmul__(self, other) -> Multivector:
        if isinstance(other, (int, float)):
            return Multivector(self._c * float(other))
        return NotImplemented

    def __truediv__(self, other) -> Multivector:
        if isinstance(other, (int, float)):
            return Multivector(self._c / float(other))
        return NotImplemented

    def grade(self, k: int) -> Multivector:
        mask = np.array([g == k for g in GRADES])
        return Multivector(np.where(mask, self._c, 0.0))

    def norm(self) -> float:
        return float(np.sqrt(np.dot(self._c, self._c)))

    def grade_residue(self) -> float:
        """Euclidean size of the grade-2 and grade-3 part."""
        return float(np.sqrt(np.dot(self._c[4:], self._c[4:])))

    def to_paravector(self, tol: float = PARAVECTOR_TOL) -> Paravector:
        """Project onto S+V, refusing if the discarded part exceeds tolerance.

        The threshold is ``tol * (1 + |result|)``.
        """
        residue = self.grade_residue()
        scale = 1.0 + float(np.sqrt(np.dot(self._c[:4], self._c[:4])))
        if not residue <= tol * scale:
            raise GradeLeak(f"grade-2/3 residue {residue:.3e} exceeds {tol * scale:.3e}")
        return Paravector(*self._c[:4].tolist())


@dataclass(frozen=True)
class Paravector:
    """Element ``x0 + v1 e1 + v2 e2 + v3 e3`` of S+V."""

    x0: float = 0.0
    v1: float = 0.0
    v2: float = 0.0
    v3: float = 0.0

    @classmethod
    def from_array(cls, a: Sequence[float]) -> Paravector:
        a0, a1, a2, a3 = (float(t) for t in a)
        return cls(a0, a1, a2, a3)

    @classmethod
    def basis(cls, i: int) -> Paravector:
        """The basis paravector e_i, with e_0 = 1."""
        c = [0.0] * 4
        c[i] = 1.0
        return cls(*c)

    def as_array(self) -> np.ndarray:
        return np.array([self.x0, self.v1, self.v2, self.v3])

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.x0, self.v1, self.v2, self.v3)

    def to_multivector(self) -> Multivector:
        return Multivector([self.x0, self.v1, self.v2, self.v3, 0, 0, 0, 0])

    @property
    def vector(self) -> Paravector:
        return Paravector(0.0, self.v1, self.v2, self.v3)

    def vector_norm(self) -> float:
        return math.sqrt(self.v1 * self.v1 + self.v2 * self.v2 + self.v3 * self.v3)

    def norm2(self) -> float:
        return self.x0 * self.x0 + self.v1 * self.v1 + self.v2 * self.v2 + self.v3 * self.v3

    def norm(self) -> float:
        return math.sqrt(self.norm2())

    def conjugate(self) -> Paravector:
        return Paravector(self.x0, -self.v1, -self.v2, -self.v3)

    def inverse(self, eps: float = ZERO_NORM_EPS) -> Paravector:
        return inverse(self, eps)

    def __add__(self, other):
        if isinstance(other, Paravector):
            return Paravector(self.x0 + other.x0, self.v1 + other.v1,
                              self.v2 + other.v2, self.v3 + other.v3)
        if isinstance(other, (int, float)):
            return Paravector(self.x0 + other, self.v1, self.v2, self.v3)
        if isinstance(other, Multivector):
            return self.to_multivector() + other
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Paravector):
            return Paravector(self.x0 - other.x0, self.v1 - other.v1,
                              self.v2 - other.v2, self.v3 - other.v3)
        if isinstance(other, (int, float)):
            return Paravector(self.x0 - other, self.v1, self.v2, self.v3)
        if isinstance(other, Multivector):
            return self.to_multivector() - other
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, (int, float)):
            return Paravector(other - self.x0, -self.v1, -self.v2, -self.v3)
        return NotImplemented

    def __neg__(self) -> Paravector:
        return Paravector(-self.x0, -self.v1, -self.v2, -self.v3)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            t = float(other)
            return Paravector(self.x0 * t, self.v1 * t, self.v2 * t, self.v3 * t)
        if isinstance(other, (Paravector, Multivector)):
            return geometric_product(self, other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return self * other
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, float)):
            return self * (1.0 / other)
        return NotImplemented


@dataclass(frozen=True)
class MultiIndex:
    """alpha = (a0, a1, a2, a3) in N^4."""

    a0: int = 0
    a1: int = 0
    a2: int = 0
    a3: int = 0

    def __post_init__(self):
        for v in self.as_tuple():
            if not isinstance(v, (int, np.integer)) or v < 0:
                raise ValueError(f"multi-index entries must be nonnegative integers, got {v!r}")

    @classmethod
    def of(cls, alpha) -> MultiIndex:
        if isinstance(alpha, MultiIndex):
            return alpha
        return cls(*(int(a) for a in alpha))

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.a0, self.a1, self.a2, self.a3)

    def __iter__(self):
        return iter(self.as_tuple())

    def __getitem__(self, i: int) -> int:
        return self.as_tuple()[i]

    @property
    def length(self) -> int:
        return self.a0 + self.a1 + self.a2 + self.a3

    def letters(self) -> tuple[int, ...]:
        """The multiset {0^a0, 1^a1, 2^a2, 3^a3} as a sorted tuple."""
        return tuple(i for i, a in enumerate(self.as_tuple()) for _ in range(a))

    def factorial(self) -> int:
        """alpha! = a0! a1! a2! a3!"""
        out = 1
        for a in self.as_tuple():
            out *= math.factorial(a)
        return out


def geometric_product(a, b) -> Multivector:
    ca = _as_coeffs(a)
    cb = _as_coeffs(b)
    return Multivector(np.einsum("i,j,ijk->k", ca, cb, _STRUCTURE))


def conjugate(x: Paravector) -> Paravector:
    return x.conjugate()


def inverse(x: Paravector, eps: float = ZERO_NORM_EPS) -> Paravector:
    """x^{-1} = x* / |x|^2; raises :class:`ZeroNorm` if ``|x| < eps``."""
    n2 = x.norm2()
    if not math.sqrt(n2) >= eps:
        raise ZeroNorm(f"cannot invert paravector of norm {math.sqrt(n2):.3e}")
    return Paravector(x.x0 / n2, -x.v1 / n2, -x.v2 / n2, -x.v3 / n2)


def sandwich_power(h: Paravector, x: Paravector, n: int, tol: float = PARAVECTOR_TOL) -> Paravector:
    """(h x)^n h evaluated in the full algebra and projected back to S+V."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    acc = h.to_multivector()
    hx = geometric_product(h, x)
    for _ in range(n):
        acc = geometric_product(hx, acc)
    return acc.to_paravector(tol)
