"""Acceptance criteria, one test per criterion.

Each test records a one-line verdict; the lines are printed in the pytest
terminal summary (see conftest.py) and when this file is run as a script.
"""

import time

import numpy as np
import pytest
import sympy as sp

from algebroid import forms as fm
from algebroid.gauge import (GeneralizedConnection, MatterField, action_gauge, check_gauge_invariance,
                             curvature_decomposition, lambda_coefficients, scalar_tau)
from algebroid.gluing import check_cocycles, check_global_family, perturb, transport
from algebroid.integrate import (check_trace_commutation, inner_integrate,
                                 predicted_commutation_defect, inner_d_commutation_residual, volume_form)
from algebroid.liealg import killing_form, preset
from algebroid.metric import (AlgebroidMetric, InnerDegenerateError, InnerMetric, MetricTriple, assemble_metric,
                              decompose_metric, h_pair, hodge_star, scalar_product_contraction)
from algebroid.integrate import integrate_A
from algebroid.symcore import ChartBox, Polynomial, random_polynomial

RESULTS: list = []
UNIT = ChartBox((0, 0), (1, 1))


def verdict(number, title, ok, detail):
    line = f"criterion {number:>2} [{'PASS' if ok else 'FAIL'}] {title}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def pure(L, m, rng, p, kind="scalar", A=None, max_degree=2):
    bideg = [(r, p - r) for r in range(p + 1) if r <= m and p - r <= L.dim]
    w = fm.random_form(L, m, rng, kind, bidegrees=bideg, max_degree=max_degree)
    return fm.MixedForm(L, m, A, kind, w.terms, w.rep) if A is not None else w


def spd(rng, k):
    B = rng.normal(size=(k, k))
    return B @ B.T + k * np.eye(k)


def test_criterion_01_nilpotency():
    start = time.perf_counter()
    worst, count = 0.0, 0
    for name in ("su2", "gl(2)"):
        L = preset(name)
        for seed in range(20):
            rng = np.random.default_rng(seed)
            kind = "scalar" if seed % 2 == 0 else "adjoint"
            w = fm.random_form(L, 2, rng, kind, max_r=2, max_s=2, max_degree=3)
            worst = max(worst, fm.total_d(fm.total_d(w)).max_abs())
            count += 1
    elapsed = time.perf_counter() - start
    verdict(1, "d^2 = 0", worst <= 1e-9 and elapsed < 10,
            f"{count} forms, max residual {worst:.2e}, {elapsed:.2f} s")


def test_criterion_02_hodge_involution():
    rng = np.random.default_rng(2)
    worst = 0.0
    for m, name in ((2, "abelian(1)"), (2, "su2")):
        L = preset(name)
        n = L.dim
        t = MetricTriple(spd(rng, m), InnerMetric(spd(rng, n)), fm.random_one_form(n, m, rng))
        for p in range(m + n + 1):
            for kind in ("scalar", "adjoint"):
                w = pure(L, m, rng, p, kind, A=t.A_dot)
                back = hodge_star(hodge_star(w, t), t)
                res = (back - w.scale((-1) ** ((m + n - p) * p))).max_abs() / max(1.0, w.max_abs())
                worst = max(worst, res)
    verdict(2, "star star = (-1)^((m+n-p)p)", worst <= 1e-9, f"(m,n) in {{(2,1),(2,3)}}, all p, max residual {worst:.2e}")


def test_criterion_03_volume_normalization():
    rng = np.random.default_rng(3)
    L = preset("su2")
    h = InnerMetric(spd(rng, 3))
    vol = volume_form(h, fm.random_one_form(3, 2, rng), L)
    one = inner_integrate(vol, h)
    err = abs(one.component().constant_term() - 1.0) + (one - one.part(0, 0)).max_abs()
    sub = 0.0
    import itertools
    for s in range(3):
        for J in itertools.combinations(range(3), s):
            for r in range(3):
                for I in itertools.combinations(range(2), r):
                    g = fm.Form(L, 2, "scalar", {(I, J, 0): Polynomial.constant(2, 1.0)})
                    sub = max(sub, inner_integrate(g, h).max_abs())
    verdict(3, "inner integral of the volume form", err <= 1e-12 and sub == 0,
            f"|int - 1| = {err:.2e}, sub-maximal max {sub:.1e}")


def test_criterion_04_commutation():
    rng = np.random.default_rng(4)
    su2 = preset("su2")
    h = InnerMetric(-killing_form(su2))
    worst = 0.0
    for _ in range(10):
        w = fm.random_form(su2, 2, rng, "scalar", max_r=2, max_s=3, max_degree=3)
        worst = max(worst, inner_d_commutation_residual(w, h).max_abs())
    aff = preset("affine2")
    ha = InnerMetric(np.diag([1.0, 2.0]))
    gap, defect = 0.0, 0.0
    for _ in range(10):
        w = fm.random_form(aff, 2, rng, "scalar", max_r=2, max_s=2, max_degree=3)
        res = inner_d_commutation_residual(w, ha)
        pred = predicted_commutation_defect(w, ha)
        gap = max(gap, (res - pred).max_abs())
        defect = max(defect, res.max_abs())
    ok = worst <= 1e-9 and gap <= 1e-9 and defect > 1e-3
    verdict(4, "inner integration commutes with d", ok,
            f"su2 residual {worst:.2e}; affine2 defect {defect:.3f} matches prediction to {gap:.2e}")


def test_criterion_05_trace_integration():
    rng = np.random.default_rng(5)
    L = preset("gl(2)")
    h = InnerMetric(spd(rng, 4))
    worst = 0.0
    for _ in range(10):
        w = fm.random_form(L, 2, rng, "adjoint", max_r=1, max_s=4, max_degree=3, density=0.3)
        worst = max(worst, check_trace_commutation(w, h).records[0].residual)
    verdict(5, "trace integration commutes with d", worst <= 1e-9, f"gl(2), 10 forms, max residual {worst:.2e}")


def test_criterion_06_gluing(identity_data, rotation_data, heisenberg_data):
    rng = np.random.default_rng(6)
    worst = 0.0
    for data in (identity_data, rotation_data, heisenberg_data):
        rep = check_cocycles(data, 1e-9, 5)
        worst = max([worst] + [r.residual for r in rep.records])
        for kind in ("scalar", "adjoint"):
            base = fm.random_form(data.algebra, 2, rng, kind, max_r=2, max_s=2, max_degree=2)
            fam = {k: base if k == "U" else transport(base, data, (k, "U")) for k in data.atlas.charts}
            fr = check_global_family(fam, data, 1e-9, 5)
            worst = max([worst] + [r.residual for r in fr.records])
    broken = check_cocycles(perturb(rotation_data, ("V", "W"), 1e-4 * np.eye(3)), 1e-9, 5)
    located = {r.location for r in broken.failures()}
    found = bool(located) and all("V" in l and "W" in l for l in located if l.count(",") == 1)
    verdict(6, "cocycles and family gluing", worst <= 1e-9 and found,
            f"3 atlases, max residual {worst:.2e}; broken overlap flagged at {sorted(located)}")


def test_criterion_07_metric_round_trip():
    rng = np.random.default_rng(7)
    m, n = 2, 3
    worst = 0.0
    for _ in range(10):
        t = MetricTriple(spd(rng, m), InnerMetric(spd(rng, n)), fm.random_one_form(n, m, rng))
        t2 = decompose_metric(assemble_metric(t))
        worst = max(worst, np.max(np.abs(t2.g - t.g)), np.max(np.abs(t2.h.h - t.h.h)), (t2.A_dot - t.A_dot).max_abs())
        # a metric built directly from its blocks, without going through assemble
        g, h = spd(rng, m), spd(rng, n)
        B = [[random_polynomial(m, 2, rng) for _ in range(m)] for _ in range(n)]
        hinv = np.linalg.inv(h)
        E = [[None] * (m + n) for _ in range(m + n)]
        for mu in range(m):
            for nu in range(m):
                acc = Polynomial.constant(m, g[mu, nu])
                for a in range(n):
                    for b in range(n):
                        acc = acc + (B[a][mu] * B[b][nu]).scale(hinv[a, b])
                E[mu][nu] = acc
            for a in range(n):
                E[mu][m + a] = E[m + a][mu] = B[a][mu]
        for a in range(n):
            for b in range(n):
                E[m + a][m + b] = Polynomial.constant(m, h[a, b])
        G = AlgebroidMetric(E, m, n)
        G2 = assemble_metric(decompose_metric(G))
        worst = max(worst, max((p - q).max_abs() for r1, r2 in zip(G.entries, G2.entries) for p, q in zip(r1, r2)))
    pull = np.zeros((m + n, m + n))
    pull[:m, :m] = spd(rng, m)
    try:
        decompose_metric(AlgebroidMetric(pull.tolist(), m, n))
        raised = False
    except InnerDegenerateError:
        raised = True
    verdict(7, "metric decomposition round trip", worst <= 1e-9 and raised,
            f"10 triples each way, max residual {worst:.2e}; pullback metric rejected: {raised}")


def test_criterion_08_gauge_invariance():
    start = time.perf_counter()
    L = preset("su2")
    h = -killing_form(L)
    lo, hi = np.inf, -np.inf
    ok = True
    for seed in range(5):
        rng = np.random.default_rng(800 + seed)
        A_dot = fm.random_one_form(3, 2, rng, max_degree=1)
        tau = [[random_polynomial(2, 1, rng) + (1.0 if a == b else 0.0) for a in range(3)] for b in range(3)]
        c = GeneralizedConnection(L, fm.random_one_form(3, 2, rng, max_degree=1), tau, A_dot)
        phi = MatterField([random_polynomial(2, 1, rng, complex_coeffs=True) for _ in range(2)],
                          np.array(L.matrix_realization), np.eye(2))
        xi = [random_polynomial(2, 1, rng) for _ in range(3)]
        rep = check_gauge_invariance(c, phi, xi, MetricTriple(np.eye(2), InnerMetric(h), A_dot), UNIT)
        ok &= rep.passed
        ratios = [r.detail["ratio"] for r in rep.records]
        lo, hi = min(lo, min(ratios)), max(hi, max(ratios))
    elapsed = time.perf_counter() - start
    verdict(8, "two-scale gauge invariance", ok and elapsed < 60,
            f"5 seeds x 5 quantities, ratios in [{lo:.4f}, {hi:.4f}], {elapsed:.2f} s")


def test_criterion_09_yang_mills_reduction():
    L = preset("abelian(1)")
    x1, x2 = sp.symbols("x1 x2")
    A = {(0, 0): x2, (0, 1): sp.Integer(0)}
    F12 = sp.diff(A[(0, 1)], x1) - sp.diff(A[(0, 0)], x2)
    # g = I, h = 1: g^{μρ}g^{νσ}F_{μν}F_{ρσ} = 2 F12^2
    lam1 = (-1) ** 1 * sp.factorial(0) * sp.factorial(1)
    expected = complex(sp.Rational(1, 4) * lam1 * sp.integrate(2 * F12 ** 2, (x1, 0, 1), (x2, 0, 1)))
    Ahat = fm.SpatialOneForm([[Polynomial.variable(2, 1), Polynomial.zero(2)]], 2)
    c = GeneralizedConnection(L, Ahat, scalar_tau(1, 2, 0.0), fm.SpatialOneForm.zero(1, 2))
    S = action_gauge(c, MetricTriple(np.eye(2), InnerMetric(np.eye(1)), c.A_dot), UNIT)
    err = abs(S["value"] - expected)
    lam = lambda_coefficients(4, 3)
    verdict(9, "Yang-Mills reduction", err <= 1e-9 and lam == (-12, 12, -24),
            f"S = {S['value'].real:.12f} vs {expected.real:.12f}; lambda(4,3) = {lam}")


def test_criterion_10_higgs_signature():
    rng = np.random.default_rng(10)
    L = preset("su2")
    h = InnerMetric(-killing_form(L))
    zero = fm.SpatialOneForm.zero(3, 2)
    c0 = GeneralizedConnection(L, zero, scalar_tau(3, 2), zero)
    cb = curvature_decomposition(c0)
    w_max = max(p.max_abs() for blk in cb.W for row in blk for p in row)

    def dtau_term(A_dot):
        # vacuum: τ = Id with the induced connection Â + τ(Ȧ) held at zero
        c = GeneralizedConnection(L, A_dot.scale(-1.0), scalar_tau(3, 2), A_dot)
        res = action_gauge(c, MetricTriple(np.eye(2), h, A_dot), UNIT)
        return res["terms"]["dtau"], curvature_decomposition(c)

    A_dot = fm.random_one_form(3, 2, rng, max_degree=1)
    t1, cb1 = dtau_term(A_dot)
    t2, _ = dtau_term(A_dot.scale(2.0))
    w1 = max(p.max_abs() for blk in cb1.W for row in blk for p in row)
    ratio = t2 / t1
    ok = w_max == 0 and w1 == 0 and abs(t1) > 1e-6 and abs(t2 - 4 * t1) <= 1e-9
    verdict(10, "Higgs mass pattern", ok,
            f"W max {w_max:.1e}; Dtau term {t1.real:.6f} -> {t2.real:.6f} (ratio {ratio.real:.12f})")


def test_criterion_11_pipeline_consistency():
    rng = np.random.default_rng(11)
    L = preset("su2")
    worst = 0.0
    for k in range(10):
        t = MetricTriple(spd(rng, 2), InnerMetric(-killing_form(L)), fm.random_one_form(3, 2, rng))
        kind = "adjoint" if k % 2 else "scalar"
        w, e = pure(L, 2, rng, 1, kind, A=t.A_dot), pure(L, 2, rng, 1, kind, A=t.A_dot)
        lhs = scalar_product_contraction(w, e, t, UNIT)
        pair = h_pair(w, hodge_star(e, t), t.h.h)
        rhs = integrate_A(pair, t, UNIT)
        worst = max(worst, abs(lhs - rhs))
    verdict(11, "contraction formula vs Hodge pipeline", worst <= 1e-9, f"10 degree-1 pairs, max |diff| {worst:.2e}")


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q"]))
