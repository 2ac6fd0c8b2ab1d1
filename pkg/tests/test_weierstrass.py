from __future__ import annotations

import math

import numpy as np
import pytest

from cliffordian.algebra import Paravector
from cliffordian.calculus import dir_deriv_inverse, fd_dir_deriv
from cliffordian.errors import BadIndex, NearPole, RadiusTooLarge, Unconverged
from cliffordian.lattice import Lattice, SumConfig, default_config, default_lattice, shell_points
from cliffordian.polynomials import eval_S, multi_indices
from cliffordian.weierstrass import (
    Z,
    ZetaTermForm,
    d0_p0,
    eta,
    far_tensor,
    p_alpha,
    p_alpha_direct,
    zero_scan,
    zeta,
    zeta_dir_deriv,
)


def arr(r):
    return r.value.as_array()


def test_far_tensor_matches_direct_lattice_sum():
    L = default_lattice(3)
    tables = far_tensor(L, 2, 3, (3, 5))
    for n in (3, 5):
        for i, beta in enumerate(multi_indices(n)[::5]):
            row = multi_indices(n).index(beta)
            direct = np.zeros(4)
            for k in (2, 3):
                for _, w in shell_points(L, k):
                    direct += (-1) ** n * beta.factorial() * eval_S(beta, w).as_array()
            assert np.allclose(tables[n][row], direct, rtol=1e-10, atol=1e-14)


@pytest.mark.parametrize("rank", [3, 4])
def test_hybrid_engine_matches_direct(rank):
    L = default_lattice(rank)
    x = Paravector(0.3, -0.2, 0.4, 0.1)
    direct = SumConfig(max_shells=10, engine="direct", strict=False)
    hybrid = direct.with_(engine="hybrid", near_shells=3)
    a, b = zeta(L, x, direct), zeta(L, x, hybrid)
    assert b.engine.startswith("hybrid")
    # the far series is truncated; its remainder is the excess of the hybrid bound
    assert np.linalg.norm(arr(a) - arr(b)) <= b.tail_bound - a.tail_bound + 1e-13
    fine = hybrid.with_(series_order=15)
    assert np.linalg.norm(arr(a) - arr(zeta(L, x, fine))) < 1e-12
    h = [Paravector(0.1, 0.7, -0.2, 0.3), Paravector(0.0, 0.0, 1.0, 0.5)]
    c, d = zeta_dir_deriv(L, x, h, direct), zeta_dir_deriv(L, x, h, fine)
    assert np.linalg.norm(arr(c) - arr(d)) < 1e-12


def test_defining_and_collapsed_forms_agree():
    for rank in (1, 2, 3, 4):
        L = default_lattice(rank)
        cfg = SumConfig(max_shells=8, engine="direct", strict=False)
        x = Paravector(0.4, 0.3, -0.2, 0.25)
        a = zeta(L, x, cfg, ZetaTermForm.COLLAPSED)
        b = zeta(L, x, cfg, ZetaTermForm.DEFINING)
        assert np.linalg.norm(arr(a) - arr(b)) <= 1e-12 * np.linalg.norm(arr(a))


def test_power_series_agrees_with_collapsed():
    L = default_lattice(2)
    cfg = default_config(2, strict=False)
    x = Paravector(0.5, 0.4, 0.2, -0.3)  # |x| < 0.5 * pi
    a = zeta(L, x, cfg)
    b = zeta(L, x, cfg, ZetaTermForm.POWER_SERIES)
    assert np.linalg.norm(arr(a) - arr(b)) <= 10 * (a.tail_bound + b.tail_bound)
    with pytest.raises(RadiusTooLarge):
        zeta(L, Paravector(3.2, 0.2, 0, 0), cfg, ZetaTermForm.POWER_SERIES)


def test_oddness_and_closure(rank4, cfg4):
    rng = np.random.default_rng(5)
    for _ in range(3):
        x = Paravector.from_array(rng.uniform(-1, 1, 4))
        a, b = zeta(rank4, x, cfg4), zeta(rank4, -x, cfg4)
        assert np.linalg.norm(arr(a) + arr(b)) <= 1e-12 * np.linalg.norm(arr(a))
        assert a.residue <= 1e-12 * np.linalg.norm(arr(a))


def test_derivative_single_term_is_shifted_inverse_derivative():
    # a rank-1 lattice with one shell: the only terms are x^-1 and the pair at +-w
    L = Lattice((Paravector(0.0, 2.0, 0.0, 0.0),))
    cfg = SumConfig(max_shells=1, engine="direct", strict=False)
    a, h = Paravector(0.3, 0.2, -0.1, 0.4), Paravector(0.5, 0.1, 0.3, -0.2)
    w = L.point((1,))
    expect = (dir_deriv_inverse(a, [h]).as_array() + dir_deriv_inverse(a - w, [h]).as_array()
              + dir_deriv_inverse(a + w, [h]).as_array())
    # degree-0 polynomial terms are constants and drop out
    assert np.allclose(arr(zeta_dir_deriv(L, a, [h], cfg)), expect)


def test_derivative_matches_finite_differences():
    L = default_lattice(4)
    cfg = SumConfig(max_shells=6, engine="direct", strict=False)
    x = Paravector(0.3, -0.2, 0.5, 0.1)
    h = [Paravector(0.1, 0.7, -0.2, 0.3), Paravector(0.0, 0.0, 1.0, 0.5)]
    exact = arr(zeta_dir_deriv(L, x, h, cfg))
    errs = [np.linalg.norm(fd_dir_deriv(lambda y: zeta(L, y, cfg), x, h, s).coeffs[:4] - exact)
            for s in (0.04, 0.02)]
    assert abs(math.log2(errs[0] / errs[1]) - 2.0) < 0.2


def test_errors(rank4, cfg4):
    with pytest.raises(NearPole):
        zeta(rank4, Paravector(math.pi, 0, 0, 0), cfg4)
    with pytest.raises(Unconverged) as exc:
        zeta(rank4, Paravector(0.3), default_config(4, target_tol=1e-12))
    assert exc.value.result.tail_bound > 1e-12
    with pytest.raises(BadIndex):
        p_alpha(rank4, (2, 0, 0, 0), Paravector(0.3), cfg4)


def test_Z_function():
    L = default_lattice(2)
    cfg = default_config(2, strict=False)
    x, a = Paravector(0.2, 0.1, 0, 0), Paravector(0.5, -0.3, 0.2, 0.1)
    base = Z(L, x, a, cfg)
    for om in L.half_periods:
        shifted = Z(L, x, a + 2 * om, cfg)
        assert np.linalg.norm(arr(shifted) - arr(base)) <= 10 * (base.tail_bound + shifted.tail_bound)
    assert np.linalg.norm(arr(Z(L, Paravector(), a, cfg))) == 0.0
    L1, c1 = default_lattice(1), default_config(1, strict=False)
    z1 = Z(L1, x, a, c1)
    assert np.allclose(arr(z1), arr(zeta(L1, x + a, c1)) - arr(zeta(L1, a, c1)))


def test_eta_low_ranks():
    L1, c1 = default_lattice(1), default_config(1, strict=False)
    assert np.linalg.norm(arr(eta(L1, Paravector(0.3, 0.1, 0, 0), L1.half_periods[0], c1))) < 1e-12
    L2, c2 = default_lattice(2), default_config(2, strict=False)
    om = L2.half_periods[1]
    twice = 2 * arr(zeta(L2, om, c2))
    for x in (Paravector(0.1), Paravector(0.3, -0.7, 0.2, 0.0)):
        assert np.allclose(arr(eta(L2, x, om, c2)), twice)


def test_eta_is_quadratic_in_x(rank4, cfg4):
    om = rank4.half_periods[2]
    x0, h = Paravector(0.1, 0.2, -0.1, 0.3), Paravector(0.3, -0.2, 0.1, 0.2)
    vals = [arr(eta(rank4, x0 + h * t, om, cfg4)) for t in range(4)]
    third = vals[3] - 3 * vals[2] + 3 * vals[1] - vals[0]
    assert np.linalg.norm(third) < 1e-10


def test_p_functions(rank4):
    cfg = default_config(4, strict=False, max_shells=20)
    x = Paravector(0.3, 0.2, -0.4, 0.1)
    a, b = p_alpha(rank4, (3, 0, 0, 0), x, cfg), p_alpha_direct(rank4, x, cfg)
    assert np.linalg.norm(arr(a) - arr(b)) <= 10 * (a.tail_bound + b.tail_bound)
    assert np.allclose(arr(p_alpha_direct(rank4, -x, cfg)), arr(b))
    # the x^-4 leading term dominates near the origin
    t = Paravector(1e-2, 0, 0, 0)
    assert arr(p_alpha(rank4, (3, 0, 0, 0), t, cfg))[0] == pytest.approx(1e8, rel=1e-6)


def test_d0_p0_pole_and_oddness(rank4, cfg4):
    x = Paravector(0.4, -0.3, 0.2, 0.5)
    assert np.allclose(arr(d0_p0(rank4, -x, cfg4)), -arr(d0_p0(rank4, x, cfg4)), atol=1e-12)
    for t in (1e-2, 1e-3):
        v = d0_p0(rank4, Paravector(t), cfg4).value
        assert v.x0 * t ** 5 == pytest.approx(-4.0, rel=1e-5)


def test_zero_scan_finds_vertices(rank4):
    cfg = default_config(4, strict=False, max_shells=16)
    cands = zero_scan(rank4, 2, cfg)
    vertices = [c for c in cands if c.vertex]
    assert len(vertices) == 15
    assert all(c.residual < 1e-3 for c in vertices)
    coords = [np.array(c.cell_coords) for c in cands]
    for s in coords:
        neg = (-s) % 1.0
        assert any(np.max(np.abs(((neg - t + 0.5) % 1.0) - 0.5)) < 1e-6 for t in coords)
