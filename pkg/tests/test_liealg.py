import numpy as np
import pytest

from algebroid.liealg import (LieAlgebra, LieAlgebraError, adjoint_traces, from_config, from_matrices,
                              jacobi_residual, killing_form, preset, realization_residual)


@pytest.mark.parametrize("name", ["su2", "abelian(3)", "heisenberg3", "affine2", "gl(2)", "sl(2)", "gl(3)"])
def test_presets_are_lie_algebras(name):
    L = preset(name)
    assert jacobi_residual(L) < 1e-12
    assert realization_residual(L) < 1e-12


def test_su2_killing_form():
    assert np.allclose(killing_form(preset("su2")), -2 * np.eye(3))


def test_su2_bracket_matches_levi_civita():
    L = preset("su2")
    assert np.allclose(L.bracket([1, 0, 0], [0, 1, 0]), [0, 0, 1])


def test_unimodularity_flags():
    assert preset("su2").is_unimodular()
    assert preset("heisenberg3").is_unimodular()
    assert preset("gl(2)").is_unimodular()
    aff = preset("affine2")
    assert not aff.is_unimodular()
    # tr ad_{E2} = -1 for [E1, E2] = E1
    assert np.allclose(adjoint_traces(aff), [0, -1])


def test_semisimplicity():
    assert preset("su2").is_semisimple()
    assert not preset("heisenberg3").is_semisimple()


def test_jacobi_violation_rejected():
    C = np.zeros((3, 3, 3))
    C[0, 1, 1], C[1, 0, 1] = 1, -1
    C[1, 2, 0], C[2, 1, 0] = 1, -1
    C[0, 2, 2], C[2, 0, 2] = 1, -1
    with pytest.raises(LieAlgebraError):
        LieAlgebra(C)


def test_antisymmetry_violation_rejected():
    C = np.zeros((2, 2, 2))
    C[0, 1, 0] = 1
    with pytest.raises(LieAlgebraError):
        LieAlgebra(C)


def test_config_round_trip():
    L = preset("heisenberg3")
    L2 = from_config(L.to_config())
    assert np.allclose(L.C, L2.C)
    assert L2.basis_labels == ("X", "Y", "Z")


def test_from_matrices_recovers_su2():
    L = preset("su2")
    L2 = from_matrices(L.matrix_realization)
    assert np.allclose(L.C, L2.C)


def test_unknown_preset():
    with pytest.raises(LieAlgebraError):
        preset("e8")
