"""The twelve acceptance criteria, each at its stated tolerance and time budget.

Every test records one PASS/FAIL line, printed again in the terminal summary.
"""

from __future__ import annotations

import math
import time

import numpy as np

from cliffordian.algebra import BLADES, Multivector, Paravector, cayley_table, geometric_product
from cliffordian.calculus import apply_DDelta, dir_deriv_inverse, fd_dir_deriv
from cliffordian.checks import run_suite
from cliffordian.cli import main
from cliffordian.lattice import Lattice, SumConfig, default_config, default_lattice
from cliffordian.oracles import (
    classical_cot_partial_fractions,
    classical_cot_tail_bound,
    classical_weierstrass_zeta,
    classical_zeta_tail_bound,
)
from cliffordian.polynomials import (
    expand_P,
    expand_S,
    generating_closed_form,
    generating_partial_sum,
    generating_tail_bound,
    multi_indices,
    p_table,
)
from cliffordian.trig import cos_cl, cotan_cl, exp_cl, sin_cl
from cliffordian.weierstrass import d0_p0, eta, p_alpha, p_alpha_direct, zeta, zeta_dir_deriv


def arr(r) -> np.ndarray:
    return r.value.as_array()


def rel_residue(m: Multivector) -> float:
    return m.grade_residue() / max(m.norm(), 1e-300)


def blade_word_product(a: str, b: str) -> tuple[int, str]:
    """Product of two blades from generator words, sorting with e_i e_j = -e_j e_i and e_i^2 = -1."""
    word = [int(c) for c in a[1:]] + [int(c) for c in b[1:]]
    sign = 1
    for i in range(len(word)):
        for j in range(len(word) - 1 - i):
            if word[j] > word[j + 1]:
                word[j], word[j + 1] = word[j + 1], word[j]
                sign = -sign
    out: list[int] = []
    for g in word:
        if out and out[-1] == g:
            out.pop()
            sign = -sign
        else:
            out.append(g)
    return sign, ("e" + "".join(map(str, out))) if out else "1"


def fd_order(exact: np.ndarray, f, x, dirs, steps=(0.04, 0.02)) -> float:
    errs = [np.linalg.norm(fd_dir_deriv(f, x, dirs, s).coeffs[:4] - exact) for s in steps]
    return math.log2(errs[0] / errs[1])


def test_criterion_01_algebra_exactness(report):
    t0 = time.perf_counter()
    table = cayley_table()
    exact = all(table[i][j] == blade_word_product(a, b) for i, a in enumerate(BLADES) for j, b in enumerate(BLADES))
    rng = np.random.default_rng(101)
    worst = 0.0
    for _ in range(10_000):
        a, b, c = (Multivector(v) for v in rng.normal(size=(3, 8)))
        lhs = geometric_product(geometric_product(a, b), c).coeffs
        rhs = geometric_product(a, geometric_product(b, c)).coeffs
        scale = a.norm() * b.norm() * c.norm()
        worst = max(worst, float(np.max(np.abs(lhs - rhs))) / scale)
    dt = time.perf_counter() - t0
    ok = exact and worst <= 1e-12 and dt < 1.0
    report(1, ok, f"cayley exact={exact}, worst associativity {worst:.2e} (<=1e-12), {dt:.2f}s (<1s)")
    assert ok


def test_criterion_02_closure(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(102)
    worst = {}

    def note(key, value):
        worst[key] = max(worst.get(key, 0.0), value)

    rand = lambda: Paravector.from_array(rng.normal(size=4))  # noqa: E731
    for _ in range(250):
        h, x, n = rand(), rand(), int(rng.integers(0, 8))
        acc = h.to_multivector()
        for _ in range(n):
            acc = geometric_product(geometric_product(h, x), acc)
        note("(hx)^n h", rel_residue(acc))
    for _ in range(250):
        alpha = tuple(int(v) for v in rng.multinomial(int(rng.integers(1, 6)), [0.25] * 4))
        note("P_alpha", rel_residue(expand_P(alpha, rand())))
    for _ in range(250):
        beta = tuple(int(v) for v in rng.multinomial(int(rng.integers(0, 5)), [0.25] * 4))
        note("S_beta", rel_residue(expand_S(beta, rand())))
    small = SumConfig(max_shells=3, engine="direct", strict=False)
    L4 = default_lattice(4)
    alphas = multi_indices(3)
    for i in range(250):
        x = Paravector.from_array(rng.uniform(-1, 1, 4))
        if i % 2:
            N = 1 + i % 4
            r = zeta(default_lattice(N), x, small)
            note(f"zeta_N", r.residue / np.linalg.norm(arr(r)))
        else:
            r = p_alpha(L4, alphas[i % 20], x, small)
            note("P functions", r.residue / max(np.linalg.norm(arr(r)), 1e-300))
    dt = time.perf_counter() - t0
    ok = max(worst.values()) <= 1e-12 and dt < 10
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    report(2, ok, f"1000 inputs, worst relative residue: {detail} (<=1e-12), {dt:.1f}s (<10s)")
    assert ok


def test_criterion_03_generating_function(report):
    """50 random (lam, x) over the whole stated domain |lam||x| <= 0.5, truncated at K = 12."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(103)
    errs, bounds, rhos = [], [], []
    for _ in range(50):
        x = Paravector.from_array(rng.uniform(-1, 1, 4))
        rho = rng.uniform(0.0, 0.5)
        d = rng.normal(size=4)
        lam = d / np.linalg.norm(d) * rho / x.norm()
        exact = generating_closed_form(lam, x).as_array()
        approx = generating_partial_sum(lam, x, 12).as_array()
        errs.append(float(np.linalg.norm(exact - approx)))
        bounds.append(generating_tail_bound(lam, x, 12))
        rhos.append(rho)
    dt = time.perf_counter() - t0
    within_bound = all(e <= b * (1 + 1e-9) + 1e-15 for e, b in zip(errs, bounds))
    n_ok = sum(e <= 1e-5 for e in errs)
    ok = n_ok == 50 and dt < 10
    worst = int(np.argmax(errs))
    report(3, ok, f"{n_ok}/50 within 1e-5; worst error {errs[worst]:.2e} at rho={rhos[worst]:.3f}; "
                  f"all within geometric tail bound: {within_bound}; {dt:.1f}s (<10s)")
    assert within_bound
    assert ok


def test_criterion_04_basis_counting(report):
    x = Paravector(0.3, -0.1, 0.2, 0.4)
    table = p_table(x, 6)
    counts = [sum(1 for a in table if sum(a) == k) for k in range(1, 7)]
    expect = [math.comb(k + 3, 3) for k in range(1, 7)]
    ok = counts == expect and [len(multi_indices(k)) for k in range(1, 7)] == expect
    report(4, ok, f"counts {counts} vs C(k+3,3) {expect}")
    assert ok


def test_criterion_05_exact_derivatives_vs_finite_differences(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(105)
    orders = []
    for i in range(20):
        x = Paravector.from_array(rng.uniform(0.3, 1.2, 4) * rng.choice([-1, 1], 4))
        q = 1 + i % 3
        dirs = [Paravector.from_array(rng.normal(size=4)) for _ in range(q)]
        orders.append(fd_order(dir_deriv_inverse(x, dirs).as_array(), lambda y: y.inverse(), x, dirs))
        N = 1 + i % 4
        L = default_lattice(N)
        cfg = SumConfig(max_shells=4, engine="direct", strict=False)
        exact = arr(zeta_dir_deriv(L, x, dirs, cfg))
        orders.append(fd_order(exact, lambda y: zeta(L, y, cfg), x, dirs))
    dt = time.perf_counter() - t0
    ok = all(abs(o - 2.0) <= 0.2 for o in orders) and dt < 30
    report(5, ok, f"observed orders in [{min(orders):.3f}, {max(orders):.3f}] (2.0 +- 0.2), {dt:.1f}s (<30s)")
    assert ok


def test_criterion_06_trigonometric_oracle(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(106)
    ts = rng.uniform(0.05, math.pi - 0.05, 20) * rng.choice([-1, 1], 20)
    cot_err = max(abs(cotan_cl(Paravector(float(t))).x0 - math.cos(t) / math.sin(t)) for t in ts)
    L1, cfg = default_lattice(1), default_config(1, strict=False)
    ratios = []
    for t in ts:
        r = zeta(L1, Paravector(float(t)), cfg)
        o = classical_cot_partial_fractions(float(t), cfg.max_shells)
        tol = 10 * (r.tail_bound + classical_cot_tail_bound(float(t), cfg.max_shells))
        ratios.append(np.linalg.norm([r.value.x0 - o, r.value.v1, r.value.v2, r.value.v3]) / tol)
    dt = time.perf_counter() - t0
    ok = cot_err <= 1e-10 and max(ratios) <= 1.0 and dt < 30
    report(6, ok, f"cotan vs cot max error {cot_err:.1e} (<=1e-10); zeta_1 vs partial fractions worst "
                  f"residual/tolerance {max(ratios):.1e}; {dt:.1f}s (<30s)")
    assert ok


def test_criterion_07_complex_slice_oracle(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(107)
    tau = complex(0.3, 1.1)
    L = Lattice((Paravector(0.5), Paravector(tau.real / 2, tau.imag / 2)))
    cfg = default_config(2, strict=False)
    worst, worst_tol = 0.0, 0.0
    ok = True
    for _ in range(20):
        z = complex(*rng.uniform(-0.45, 0.45, 2))
        r = zeta(L, Paravector(z.real, z.imag), cfg)
        o = classical_weierstrass_zeta(z, 0.5, tau / 2, cfg.max_shells)
        v = r.value
        res = float(np.linalg.norm([v.x0 - o.real, v.v1 - o.imag, v.v2, v.v3]))
        tol = 10 * (r.tail_bound + classical_zeta_tail_bound(z, 0.5, tau / 2, cfg.max_shells))
        ok &= res <= tol
        worst, worst_tol = max(worst, res), max(worst_tol, tol)
    dt = time.perf_counter() - t0
    ok = ok and dt < 60
    report(7, ok, f"20 points, worst residual {worst:.1e}, largest tolerance {worst_tol:.1e}; {dt:.1f}s (<60s)")
    assert ok


def test_criterion_08_quasi_periodicity(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(108)
    ok = True
    parts = []
    for N in range(1, 5):
        L, cfg = default_lattice(N), default_config(N, strict=False)
        worst_ratio, worst_res = 0.0, 0.0
        for om in L.half_periods:
            for _ in range(10):
                x = Paravector.from_array(rng.uniform(-1, 1, 4))
                a, b, e = zeta(L, x + 2 * om, cfg), zeta(L, x, cfg), eta(L, x, om, cfg)
                res = float(np.linalg.norm(arr(a) - arr(b) - arr(e)))
                tol = 10 * (a.tail_bound + b.tail_bound + e.tail_bound)
                if N == 4:
                    tol = min(tol, 1e-3)
                worst_ratio = max(worst_ratio, res / tol)
                worst_res = max(worst_res, res)
        ok &= worst_ratio <= 1.0
        parts.append(f"N={N} worst {worst_res:.1e} ({worst_ratio:.2f} of tol)")
    dt = time.perf_counter() - t0
    ok = ok and dt < 300
    report(8, ok, "; ".join(parts) + f"; {dt:.0f}s (<300s)")
    assert ok


def test_criterion_09_eta_laws(report):
    t0 = time.perf_counter()
    rep = run_suite("eta_published", points=20, seed=109)
    dt = time.perf_counter() - t0
    laws: dict[str, list] = {}
    for r in rep["identities"]:
        key = r["name"].split(" #")[0].split(" ")[0]
        key = key if key.startswith("(") else "addition"
        laws.setdefault(key, []).append(r)
    summary = ", ".join(f"{k} {sum(r['pass'] for r in v)}/{len(v)} "
                        f"(max residual {max(r['residual'] for r in v):.1e})" for k, v in laws.items())
    ok = rep["all_pass"] and dt < 120
    report(9, ok, f"{summary}; {dt:.0f}s (<120s)")
    assert ok


def test_criterion_10_p_family(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(110)
    L, cfg = default_lattice(4), default_config(4, strict=False)
    worst = {"even": 0.0, "periodic": 0.0, "direct": 0.0, "vertex": 0.0}
    for alpha in multi_indices(3):
        x = Paravector.from_array(rng.uniform(-0.8, 0.8, 4))
        p, m = p_alpha(L, alpha, x, cfg), p_alpha(L, alpha, -x, cfg)
        worst["even"] = max(worst["even"], np.linalg.norm(arr(p) - arr(m)) / (10 * (p.tail_bound + m.tail_bound)))
        for om in L.half_periods:
            s = p_alpha(L, alpha, x + 2 * om, cfg)
            worst["periodic"] = max(worst["periodic"],
                                    np.linalg.norm(arr(s) - arr(p)) / (10 * (s.tail_bound + p.tail_bound)))
    for _ in range(3):
        x = Paravector.from_array(rng.uniform(-0.8, 0.8, 4))
        d, r = p_alpha_direct(L, x, cfg), p_alpha(L, (3, 0, 0, 0), x, cfg)
        worst["direct"] = max(worst["direct"], np.linalg.norm(arr(d) - arr(r)) / (10 * (d.tail_bound + r.tail_bound)))
    for v in L.vertices():
        r = d0_p0(L, v, cfg)
        worst["vertex"] = max(worst["vertex"], np.linalg.norm(arr(r)) / (10 * r.tail_bound))
    dt = time.perf_counter() - t0
    ok = max(worst.values()) <= 1.0 and dt < 300
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    report(10, ok, f"worst residual/tolerance: {detail}; 20 alphas, 15 vertices; {dt:.0f}s (<300s)")
    assert ok


def test_criterion_11_holomorphy(report):
    t0 = time.perf_counter()
    cases = [
        ("P(3,2,1,1)", lambda y: expand_P((3, 2, 1, 1), y), Paravector(0.3, -0.2, 0.4, 0.1), 2e-1),
        ("exp", exp_cl, Paravector(0.3, 0.2, -0.4, 0.1), 5e-2),
        ("sin", sin_cl, Paravector(0.3, 0.2, -0.4, 0.1), 5e-2),
        ("cos", cos_cl, Paravector(0.3, 0.2, -0.4, 0.1), 5e-2),
        ("cotan", cotan_cl, Paravector(1.0, 0.3, -0.2, 0.1), 1e-2),
    ]
    for N in range(1, 5):
        L, cfg = default_lattice(N), default_config(N, strict=False)
        cases.append((f"zeta_{N}", lambda y, L=L, cfg=cfg: zeta(L, y, cfg), Paravector(0.7, 0.4, -0.5, 0.3), 1e-2))
    ok = True
    parts = []
    for name, f, x, h in cases:
        coarse = apply_DDelta(f, x, h, richardson=False).coeffs
        fine = apply_DDelta(f, x, h / 2, richardson=False).coeffs
        value = float(np.linalg.norm((4.0 * fine - coarse) / 3.0))
        order = math.log2(np.linalg.norm(coarse) / np.linalg.norm(fine))
        ok &= value <= 1e-5 and abs(order - 2.0) <= 0.2
        parts.append(f"{name} {value:.1e}/o{order:.2f}")
    dt = time.perf_counter() - t0
    ok = ok and dt < 60
    report(11, ok, "DDelta/order: " + ", ".join(parts) + f"; {dt:.0f}s (<60s)")
    assert ok


def test_criterion_12_grid_determinism(report, tmp_path):
    t0 = time.perf_counter()
    outputs = []
    for workers in (1, 2, 8):
        path = tmp_path / f"grid{workers}.csv"
        code = main(["grid", "--function", "zeta", "--rank", "2", "--shells", "40", "--no-strict",
                     "--free", "0,1", "--ranges=-1.3,1.3,-1.3,1.3", "--size", "64,64",
                     "--workers", str(workers), "--out", str(path)])
        assert code == 0
        outputs.append(path.read_bytes())
    dt = time.perf_counter() - t0
    rows = outputs[0].count(b"\n") - 1
    ok = outputs[0] == outputs[1] == outputs[2] and rows == 64 * 64 and dt < 120
    report(12, ok, f"{rows} rows, identical for 1/2/8 workers: {outputs[0] == outputs[1] == outputs[2]}; "
                   f"{dt:.0f}s (<120s)")
    assert ok
