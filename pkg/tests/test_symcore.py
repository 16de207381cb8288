import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from algebroid.symcore import ChartBox, Polynomial, as_poly, coordinates, random_polynomial, poly_matmul, poly_identity


def test_arithmetic_and_pruning():
    x, y = coordinates(2)
    p = (x + y) * (x - y)
    assert p == x * x - y * y
    assert (p - p).is_zero()
    assert (x.scale(1e-16) + y).terms == y.terms


def test_partial_and_integral():
    x, y = coordinates(2)
    p = x * x * y + 3
    assert p.partial(0) == (x * y).scale(2)
    assert p.partial(1) == x * x
    box = ChartBox((0, 0), (1, 2))
    # ∫∫ x^2 y dx dy = 1/3 * 2 = 2/3, plus 3 * area
    assert p.integrate_box(box) == pytest.approx(2 / 3 + 6)


def test_evaluation_vectorized():
    x, y = coordinates(2)
    p = x * y + y.scale(2j)
    pts = np.array([[1.0, 2.0], [0.5, -1.0]])
    assert np.allclose(p(pts), [2 + 4j, -0.5 - 2j])
    assert p((1.0, 2.0)) == pytest.approx(2 + 4j)


def test_records_round_trip(rng):
    p = random_polynomial(3, 3, rng, complex_coeffs=True)
    assert Polynomial.from_records(3, p.to_records()) == p


def test_as_poly_forms():
    assert as_poly(2, 1) == Polynomial.constant(1, 2)
    assert as_poly([1, 2], 1) == Polynomial.constant(1, 1 + 2j)
    with pytest.raises(TypeError):
        as_poly(object(), 1)


def test_box_lattice_and_intersection():
    a, b = ChartBox((0, 0), (2, 1)), ChartBox((1, 0), (3, 1))
    assert a.intersect(b) == ChartBox((1, 0), (2, 1))
    assert a.lattice(5).shape == (25, 2)
    assert ChartBox((0,), (1,)).intersect(ChartBox((2,), (3,))) is None


def test_matrix_helpers():
    x, _ = coordinates(2)
    M = [[x, Polynomial.constant(2, 1)], [Polynomial.zero(2), x]]
    I = poly_identity(2, 2)
    assert poly_matmul(M, I) == M


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_product_rule(seed):
    rng = np.random.default_rng(seed)
    p, q = random_polynomial(2, 3, rng), random_polynomial(2, 3, rng)
    lhs = (p * q).partial(1)
    rhs = p.partial(1) * q + p * q.partial(1)
    assert (lhs - rhs).max_abs() < 1e-10
