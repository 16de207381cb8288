import itertools
from math import factorial

import numpy as np
import pytest

from algebroid import forms as fm
from algebroid.forms import permutation_sign
from algebroid.gluing import transport, transport_connection
from algebroid.liealg import killing_form, preset
from algebroid.metric import (AlgebroidMetric, InnerDegenerateError, InnerMetric, MetricError, MetricTriple,
                              assemble_metric, decompose_metric, h_pair, hodge_star, hodge_star_bruteforce,
                              is_killing, scalar_product_contraction)
from algebroid.integrate import integrate_A
from algebroid.symcore import ChartBox, Polynomial

BOX = ChartBox((0, 0), (1, 1))


def pure(L, m, rng, p, kind="scalar", A=None, max_degree=2):
    bideg = [(r, p - r) for r in range(p + 1) if r <= m and p - r <= L.dim]
    w = fm.random_form(L, m, rng, kind, bidegrees=bideg, max_degree=max_degree)
    if A is not None:
        return fm.MixedForm(L, m, A, kind, w.terms, w.rep)
    return w


def random_triple(L, m, rng, spd=True):
    n = L.dim
    B = rng.normal(size=(m, m))
    g = B @ B.T + m * np.eye(m) if spd else B + B.T
    H = rng.normal(size=(n, n))
    h = H @ H.T + n * np.eye(n)
    return MetricTriple(g, InnerMetric(h), fm.random_one_form(n, m, rng))


# h_pair


def test_h_pair_zero_forms(su2):
    x = Polynomial.variable(2, 0)
    w = fm.tensor(fm.scalar(su2, 2, x), [1, 2, 0])
    e = fm.tensor(fm.scalar(su2, 2), [0, 1, 1])
    h = -killing_form(su2)
    assert h_pair(w, e, h) == fm.scalar(su2, 2, x.scale(4.0))


def test_h_pair_example(su2):
    w = fm.tensor(fm.dx(su2, 2, 0), [1, 0, 0])
    e = fm.tensor(fm.dx(su2, 2, 1), [1, 0, 0])
    assert h_pair(w, e, killing_form(su2)) == fm.dx(su2, 2, 0, 1).scale(-2.0)


@pytest.mark.parametrize("p,q", [(1, 2), (2, 1), (1, 1), (0, 3), (2, 2)])
def test_h_pair_graded_symmetry(su2, rng, p, q):
    h = -killing_form(su2)
    w, e = pure(su2, 2, rng, p, "adjoint"), pure(su2, 2, rng, q, "adjoint")
    assert (h_pair(w, e, h) - h_pair(e, w, h).scale((-1) ** (p * q))).max_abs() < 1e-9


def test_h_pair_module_linearity(su2, rng):
    h = -killing_form(su2)
    f = pure(su2, 2, rng, 1)
    w, e = pure(su2, 2, rng, 1, "adjoint"), pure(su2, 2, rng, 1, "adjoint")
    lhs = h_pair(fm.wedge(f, w), e, h)
    rhs = fm.wedge(f, h_pair(w, e, h))
    assert (lhs - rhs).max_abs() < 1e-9


def test_h_pair_matches_permutation_sum(su2, rng):
    """Oracle: evaluate both factors on permuted vectors and sum over S_{p+q}."""
    h = np.array([[1.0, 0.5, 0], [0.5, 2.0, 0], [0, 0, 3.0]])
    p, q = 1, 2
    w, e = pure(su2, 2, rng, p, "adjoint"), pure(su2, 2, rng, q, "adjoint")
    x = np.array([0.3, 0.7])
    vecs = rng.normal(size=(p + q, 5))
    expected = 0j
    for perm in itertools.permutations(range(p + q)):
        a = w.evaluate(x, vecs[list(perm[:p])])
        b = e.evaluate(x, vecs[list(perm[p:])])
        expected += permutation_sign(perm) * (a @ h @ b)
    expected /= factorial(p) * factorial(q)
    got = h_pair(w, e, h).evaluate(x, vecs)[0]
    assert got == pytest.approx(expected, abs=1e-9)


# ad-invariance of the pairing


@pytest.mark.parametrize("p1,p2,q", [(1, 1, 1), (0, 2, 1), (1, 2, 0)])
def test_killing_bracket_invariance(su2, rng, p1, p2, q):
    h = killing_form(su2)
    eta = pure(su2, 2, rng, q, "adjoint")
    w1, w2 = pure(su2, 2, rng, p1, "adjoint"), pure(su2, 2, rng, p2, "adjoint")
    lhs = h_pair(fm.bracket(eta, w1), w2, h) + h_pair(w1, fm.bracket(eta, w2), h).scale((-1) ** (q * p1))
    assert lhs.max_abs() < 1e-9


@pytest.mark.parametrize("p", [0, 1, 2])
def test_killing_differential_compatibility(su2, rng, p):
    h = killing_form(su2)
    w, e = pure(su2, 2, rng, p, "adjoint"), pure(su2, 2, rng, 1, "adjoint")
    lhs = fm.total_d(h_pair(w, e, h))
    rhs = h_pair(fm.total_d(w), e, h) + h_pair(w, fm.total_d(e), h).scale((-1) ** p)
    assert (lhs - rhs).max_abs() < 1e-9


def test_differential_compatibility_fails_for_non_killing(su2, rng):
    h = np.diag([1.0, 1.0, 2.0])
    assert not is_killing(h, su2)
    w, e = pure(su2, 2, rng, 1, "adjoint"), pure(su2, 2, rng, 1, "adjoint")
    lhs = fm.total_d(h_pair(w, e, h))
    rhs = h_pair(fm.total_d(w), e, h) - h_pair(w, fm.total_d(e), h)
    assert (lhs - rhs).max_abs() > 1e-6


# Hodge star


def test_star_of_one(su2):
    t = MetricTriple(np.diag([1.0, 4.0]), InnerMetric(np.diag([1.0, 2.0, 3.0])), None)
    one = fm.mixed(su2, 2, t.A_dot, terms={((), (), 0): Polynomial.constant(2, 1.0)})
    star = hodge_star(one, t)
    coef = factorial(2) * factorial(3) * 2.0 * np.sqrt(6.0)
    assert star.terms.keys() == {((0, 1), (0, 1, 2), 0)}
    assert star.component((0, 1), (0, 1, 2)).constant_term() == pytest.approx(coef)


def test_star_dx1_euclidean(su2):
    t = MetricTriple(np.eye(2), InnerMetric(np.eye(3)), None)
    w = fm.mixed(su2, 2, t.A_dot, terms={((0,), (), 0): Polynomial.constant(2, 1.0)})
    star = hodge_star(w, t)
    assert set(star.terms) == {((1,), (0, 1, 2), 0)}


@pytest.mark.parametrize("mn", [(2, 1), (2, 3), (3, 3)])
def test_double_star(mn, rng):
    m, n = mn
    L = preset("su2") if n == 3 else preset("abelian(1)")
    t = random_triple(L, m, rng)
    for p in range(m + n + 1):
        w = pure(L, m, rng, p, A=t.A_dot, max_degree=1)
        back = hodge_star(hodge_star(w, t), t)
        assert (back - w.scale((-1) ** ((m + n - p) * p))).max_abs() < 1e-9 * (1 + w.max_abs())


@pytest.mark.parametrize("p", [1, 2, 3])
def test_star_matches_bruteforce(su2, rng, p):
    t = random_triple(su2, 2, rng, spd=False)
    w = pure(su2, 2, rng, p, "adjoint", A=t.A_dot)
    assert (hodge_star(w, t) - hodge_star_bruteforce(w, t)).max_abs() < 1e-9


def test_star_rejects_theta_basis(su2, rng):
    t = random_triple(su2, 2, rng)
    with pytest.raises(fm.FormError):
        hodge_star(pure(su2, 2, rng, 1), t)


def test_star_commutes_with_transport(rotation_data, rng):
    data = rotation_data
    L = data.algebra
    h = InnerMetric(-killing_form(L))
    g = np.array([[2.0, 0.3], [0.3, 1.0]])
    A_U = fm.random_one_form(3, 2, rng)
    A_V = transport_connection(A_U, data, ("V", "U"))
    tU, tV = MetricTriple(g, h, A_U), MetricTriple(g, h, A_V)
    w_U = pure(L, 2, rng, 2, "adjoint", A=A_U)
    w_V = fm.to_mixed(transport(w_U, data, ("V", "U")), A_V)
    lhs = transport(hodge_star(w_U, tU), data, ("V", "U"))
    rhs = fm.from_mixed(hodge_star(w_V, tV))
    assert (lhs - rhs).max_abs() < 1e-9


# contraction formula


def test_contraction_zero(su2, rng):
    t = random_triple(su2, 2, rng)
    z = fm.mixed(su2, 2, t.A_dot)
    assert scalar_product_contraction(z, z, t, BOX) == 0


def test_contraction_constant_zero_forms(su2, rng):
    t = random_triple(su2, 2, rng)
    one = fm.mixed(su2, 2, t.A_dot, terms={((), (), 0): Polynomial.constant(2, 2.0)})
    lhs = scalar_product_contraction(one, one, t, BOX)
    rhs = integrate_A(fm.wedge(one, hodge_star(one, t)), t.h, BOX)
    assert lhs == pytest.approx(rhs, abs=1e-9)
    assert lhs == pytest.approx((-1) ** 3 * 2 * 6 * 4.0 * t.sqrt_abs_g, abs=1e-9)


def test_contraction_sign_in_odd_sector(su2, rng):
    """(1,1) sector at m = 2: the literal sign flips, the pipeline does not."""
    t = random_triple(su2, 2, rng)
    w = fm.MixedForm(su2, 2, t.A_dot, "scalar", pure(su2, 2, rng, 2).part(1, 1).terms)
    pipeline = integrate_A(fm.wedge(w, hodge_star(w, t)), t.h, BOX)
    assert scalar_product_contraction(w, w, t, BOX, literal_sign=False) == pytest.approx(pipeline, abs=1e-9)
    assert scalar_product_contraction(w, w, t, BOX) == pytest.approx(-pipeline, abs=1e-9)


# decomposition


def test_decomposition_round_trip(su2, rng):
    for _ in range(5):
        t = random_triple(su2, 2, rng)
        t2 = decompose_metric(assemble_metric(t))
        assert np.allclose(t2.g, t.g) and np.allclose(t2.h.h, t.h.h)
        assert (t2.A_dot - t.A_dot).max_abs() < 1e-9


def test_pullback_metric_is_inner_degenerate(su2):
    m, n = 2, 3
    E = np.zeros((m + n, m + n))
    E[:m, :m] = np.eye(m)
    with pytest.raises(InnerDegenerateError, match="kernel"):
        decompose_metric(AlgebroidMetric(E.tolist(), m, n))


def test_degenerate_inner_metric_names_kernel():
    with pytest.raises(InnerDegenerateError) as exc:
        InnerMetric(np.diag([1.0, 0.0, 2.0]))
    assert np.allclose(np.abs(exc.value.kernel), [0, 1, 0])


def test_non_symmetric_rejected():
    with pytest.raises(MetricError):
        InnerMetric([[1.0, 2.0], [0.0, 1.0]])
