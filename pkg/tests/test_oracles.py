from __future__ import annotations

import math

import pytest

from cliffordian.errors import NearPole
from cliffordian.oracles import (
    classical_cot_partial_fractions,
    classical_cot_tail_bound,
    classical_weierstrass_zeta,
    classical_zeta_tail_bound,
)


def test_cot_partial_fractions():
    K = 2000
    for t in (math.pi / 4, math.pi / 2, 0.25, -1.1):
        got = classical_cot_partial_fractions(t, K)
        assert abs(got - math.cos(t) / math.sin(t)) <= classical_cot_tail_bound(t, K)
    assert classical_cot_partial_fractions(-0.7, 50) == -classical_cot_partial_fractions(0.7, 50)
    with pytest.raises(NearPole):
        classical_cot_partial_fractions(math.pi, 10)


def test_classical_zeta_oddness_and_pole():
    w1, w2 = 0.5, complex(0.15, 0.55)
    z = complex(0.11, -0.07)
    assert classical_weierstrass_zeta(-z, w1, w2, 30) == pytest.approx(-classical_weierstrass_zeta(z, w1, w2, 30))
    with pytest.raises(NearPole):
        classical_weierstrass_zeta(2 * w1, w1, w2, 5)


def test_classical_zeta_legendre_relation():
    # eta1 w2 - eta2 w1 = i pi / 2 for Im(w2/w1) > 0, with eta_j = zeta(w_j)
    w1, w2, K = 0.5, complex(0.15, 0.55), 400
    e1 = classical_weierstrass_zeta(w1, w1, w2, K)
    e2 = classical_weierstrass_zeta(w2, w1, w2, K)
    err = abs(e1 * w2 - e2 * w1 - 1j * math.pi / 2)
    bound = abs(w2) * classical_zeta_tail_bound(w1, w1, w2, K) + abs(w1) * classical_zeta_tail_bound(w2, w1, w2, K)
    assert err <= 10 * bound


def test_classical_zeta_quasi_period():
    w1, w2, K = 0.5, complex(0.15, 0.55), 300
    z = complex(0.1, 0.05)
    lhs = classical_weierstrass_zeta(z + 2 * w1, w1, w2, K) - classical_weierstrass_zeta(z, w1, w2, K)
    rhs = 2 * classical_weierstrass_zeta(w1, w1, w2, K)
    bound = (classical_zeta_tail_bound(z + 2 * w1, w1, w2, K) + classical_zeta_tail_bound(z, w1, w2, K)
             + 2 * classical_zeta_tail_bound(w1, w1, w2, K))
    assert abs(lhs - rhs) <= 10 * bound
