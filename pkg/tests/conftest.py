import numpy as np
import pytest

from algebroid.gluing import Atlas, atiyah_transitions, constant_transitions, identity_transitions
from algebroid.liealg import preset
from algebroid.symcore import ChartBox, Polynomial, coordinates, poly_matmul


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)


@pytest.fixture
def su2():
    return preset("su2")


def two_chart_atlas(L, m=2):
    charts = {"U": ChartBox((0.0,) * (m - 1) + (0.0,), (2.0,) + (1.0,) * (m - 1)),
              "V": ChartBox((1.0,) + (0.0,) * (m - 1), (3.0,) + (1.0,) * (m - 1))}
    return Atlas(L, charts, {("U", "V"): None, ("V", "U"): None})


def three_chart_atlas(L, m=2):
    lo = (0.0,) * m
    charts = {"U": ChartBox(lo, (2.0,) * m), "V": ChartBox((0.5,) * m, (2.5,) * m),
              "W": ChartBox((1.0,) * m, (3.0,) * m)}
    pairs = [("U", "V"), ("V", "W"), ("U", "W")]
    overlaps = {}
    for i, j in pairs:
        overlaps[(i, j)] = None
        overlaps[(j, i)] = None
    return Atlas(L, charts, overlaps)


def rotation_e3(angle):
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]])


def heisenberg_element(m, a, b, c):
    """exp(aX + bY + cZ) as a polynomial matrix, with a, b, c polynomials."""
    one, zero = Polynomial.constant(m, 1.0), Polynomial.zero(m)
    return [[one, a, c + (a * b).scale(0.5)], [zero, one, b], [zero, zero, one]]


@pytest.fixture
def identity_data(su2):
    return identity_transitions(three_chart_atlas(su2))


@pytest.fixture
def rotation_data(su2):
    atlas = three_chart_atlas(su2)
    angles = {("U", "V"): 0.3, ("V", "W"): -0.7}
    angles[("U", "W")] = angles[("U", "V")] + angles[("V", "W")]
    G = {}
    for (i, j), t in angles.items():
        G[(i, j)] = rotation_e3(t)
        G[(j, i)] = rotation_e3(-t)
    return constant_transitions(atlas, G)


def build_heisenberg_data():
    L = preset("heisenberg3")
    atlas = three_chart_atlas(L)
    x1, x2 = coordinates(2)
    # coboundary g_ij = u_i u_j^{-1}, so the triple condition holds by construction
    u = {"U": (x1, x2.scale(0.5), x1 * x2), "V": (x2, x1.scale(-1.0), x1.scale(0.3)),
         "W": (x1 + x2, Polynomial.constant(2, 0.2), x2 * x2)}

    def elem(k, sign):
        a, b, c = (p.scale(sign) for p in u[k])
        return heisenberg_element(2, a, b, c)

    coc = {}
    for (i, j) in atlas.overlaps:
        coc[(i, j)] = (poly_matmul(elem(i, 1), elem(j, -1)), poly_matmul(elem(j, 1), elem(i, -1)))
    return atiyah_transitions(atlas, coc)


@pytest.fixture
def heisenberg_data():
    return build_heisenberg_data()


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
