import numpy as np
import pytest

from algebroid import forms as fm
from algebroid.gluing import (Atlas, GluingError, check_cocycles, check_connection_family, check_global_family,
                              check_inner_metric_family, check_inner_orientable, form_residual, perturb,
                              transport, transport_connection)
from algebroid.forms import FormError
from algebroid.symcore import ChartBox

DATA = ["identity_data", "rotation_data", "heisenberg_data"]


@pytest.mark.parametrize("name", DATA)
def test_cocycles_pass(name, request):
    data = request.getfixturevalue(name)
    rep = check_cocycles(data)
    assert rep.passed, [r.to_dict() for r in rep.failures()]
    names = {r.name for r in rep.records}
    assert {"inverse", "automorphism", "derivative_compatibility", "triple_G", "triple_chi"} <= names


def test_broken_cocycle_is_located(rotation_data):
    bad = perturb(rotation_data, ("U", "V"), 1e-3 * np.eye(3))
    rep = check_cocycles(bad)
    assert not rep.passed
    locs = {r.location for r in rep.failures()}
    assert any("U" in l and "V" in l for l in locs)
    assert all(r.passed for r in rep.records if "W" in r.location and "V" not in r.location)


def _glued_family(data, make):
    base = make()
    return {k: (base if k == "U" else transport(base, data, (k, "U"))) for k in data.atlas.charts}


@pytest.mark.parametrize("name", DATA)
@pytest.mark.parametrize("kind", ["scalar", "adjoint"])
def test_form_family_gluing(name, kind, request, rng):
    data = request.getfixturevalue(name)
    L = data.algebra
    fam = _glued_family(data, lambda: fm.random_form(L, 2, rng, kind, max_r=1, max_s=2, max_degree=2))
    rep = check_global_family(fam, data)
    assert rep.passed, [r.to_dict() for r in rep.failures()]


@pytest.mark.parametrize("name", DATA)
def test_transport_commutes_with_d(name, request, rng):
    data = request.getfixturevalue(name)
    for key, box in data.atlas.overlaps.items():
        w = fm.random_form(data.algebra, 2, rng, "adjoint", max_r=1, max_s=1)
        diff = transport(fm.total_d(w), data, key) - fm.total_d(transport(w, data, key))
        assert form_residual(diff, box.lattice(5)) < 1e-9


@pytest.mark.parametrize("name", DATA)
def test_connection_family(name, request, rng):
    data = request.getfixturevalue(name)
    A = fm.random_one_form(data.algebra.dim, 2, rng)
    fam = {k: (A if k == "U" else transport_connection(A, data, (k, "U"))) for k in data.atlas.charts}
    assert check_connection_family(fam, data).passed


def test_inner_metric_family(rotation_data):
    h = 2 * np.eye(3)
    fam = {k: h for k in rotation_data.atlas.charts}
    assert check_inner_metric_family(fam, rotation_data).passed


def test_orientability(rotation_data, heisenberg_data):
    assert check_inner_orientable(rotation_data)
    assert check_inner_orientable(heisenberg_data)


def test_unknown_overlap(rotation_data):
    with pytest.raises(GluingError):
        rotation_data[("U", "Z")]


def test_atlas_rejects_unknown_chart(su2):
    with pytest.raises(GluingError):
        Atlas(su2, {"U": ChartBox((0, 0), (1, 1))}, {("U", "X"): None, ("X", "U"): None})


def test_atlas_rejects_one_sided_overlap(su2):
    charts = {"U": ChartBox((0, 0), (2, 1)), "V": ChartBox((1, 0), (3, 1))}
    with pytest.raises(GluingError):
        Atlas(su2, charts, {("U", "V"): None})


def test_rep_transport_unsupported(rotation_data, su2):
    w = fm.tensor(fm.scalar(su2, 2), [1, 0], "rep", np.array(su2.matrix_realization))
    with pytest.raises(FormError):
        transport(w, rotation_data, ("U", "V"))
