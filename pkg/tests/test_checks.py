from __future__ import annotations

import json

from cliffordian.checks import run_suite, worst


def _shape_ok(report):
    assert set(report) == {"version", "suite", "identities", "all_pass"}
    for r in report["identities"]:
        assert set(r) == {"name", "residual", "tolerance", "pass"}
    json.dumps(report)


def test_vertex_zero_report_lists_fifteen():
    rep = run_suite("vertex_zeros", shells=20)
    _shape_ok(rep)
    assert len(rep["identities"]) == 15
    assert rep["all_pass"]


def test_valid_eta_laws_pass_and_broken_sign_fails():
    good = run_suite("eta_laws", points=1, shells=20)
    _shape_ok(good)
    assert good["all_pass"]
    bad = run_suite("eta_laws", points=1, shells=20, eta_sign=-1.0)
    assert not bad["all_pass"]
    assert worst(bad) > 1.0
    assert all(r["residual"] > 0 for r in bad["identities"] if not r["pass"])


def test_published_eta_laws_report_their_residuals():
    rep = run_suite("eta_published", points=1, shells=20)
    names = [r["name"] for r in rep["identities"]]
    assert any(n.startswith("(iv)") for n in names)
    by = {r["name"].split(" ")[0]: r for r in rep["identities"]}
    assert by["(iv)"]["pass"]
    # (vi) fails by the Hessian term: eta(w,w) - 2 zeta(w) = 2 (w|grad)^2 zeta(w)
    assert not by["(vi)"]["pass"]


def test_oracle_suite():
    rep = run_suite("oracles", points=2)
    assert rep["all_pass"]
