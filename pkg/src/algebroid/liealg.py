"""Finite-dimensional Lie algebras given by structure constants.

Convention: ``C[a, b, c]`` is C^c_ab, so that [E_a, E_b] = sum_c C^c_ab E_c.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

JACOBI_TOL = 1e-12
SEMISIMPLE_TOL = 1e-9


class LieAlgebraError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class LieAlgebra:
    C: np.ndarray
    basis_labels: tuple = ()
    matrix_realization: tuple | None = None
    name: str = "custom"
    _ad: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        C = np.array(self.C, dtype=complex)
        if C.ndim != 3 or len(set(C.shape)) != 1:
            raise LieAlgebraError(f"structure constants must have shape (n, n, n), got {C.shape}")
        if not np.array_equal(C, -C.transpose(1, 0, 2)):
            raise LieAlgebraError("structure constants are not antisymmetric in the lower indices")
        C.setflags(write=False)
        object.__setattr__(self, "C", C)
        n = C.shape[0]
        labels = tuple(self.basis_labels) or tuple(f"E{a + 1}" for a in range(n))
        if len(labels) != n:
            raise LieAlgebraError(f"{len(labels)} basis labels for a {n}-dimensional algebra")
        object.__setattr__(self, "basis_labels", labels)
        if self.matrix_realization is not None:
            mats = tuple(np.array(M, dtype=complex) for M in self.matrix_realization)
            if len(mats) != n:
                raise LieAlgebraError(f"{len(mats)} realization matrices for dimension {n}")
            for M in mats:
                M.setflags(write=False)
            object.__setattr__(self, "matrix_realization", mats)
        # ad[a] is the matrix of ad_{E_a}: (ad_a)[c, b] = C^c_ab
        ad = np.ascontiguousarray(C.transpose(0, 2, 1))
        ad.setflags(write=False)
        object.__setattr__(self, "_ad", ad)
        jac = jacobi_residual(self)
        if jac > JACOBI_TOL:
            raise LieAlgebraError(f"Jacobi identity fails (residual {jac:.3e})")
        if self.matrix_realization is not None:
            res = realization_residual(self)
            if res > JACOBI_TOL:
                raise LieAlgebraError(f"matrix realization is not a representation (residual {res:.3e})")

    @property
    def dim(self) -> int:
        return self.C.shape[0]

    @property
    def ad_matrices(self) -> np.ndarray:
        return self._ad

    def bracket(self, x, y) -> np.ndarray:
        return np.einsum("abc,a,b->c", self.C, np.asarray(x, complex), np.asarray(y, complex))

    def killing_form(self) -> np.ndarray:
        return killing_form(self)

    def is_unimodular(self) -> bool:
        return is_unimodular(self)

    def is_semisimple(self) -> bool:
        return abs(np.linalg.det(killing_form(self))) > SEMISIMPLE_TOL

    def adjoint_matrix(self, xi) -> np.ndarray:
        return adjoint_matrix(self, xi)

    def trace_functional(self) -> np.ndarray:
        """Trace of each realization matrix; requires a matrix realization."""
        if self.matrix_realization is None:
            raise LieAlgebraError(f"algebra {self.name!r} has no matrix realization, so no trace functional")
        return np.array([np.trace(M) for M in self.matrix_realization])

    def realize(self, coeffs) -> np.ndarray:
        """Matrix sum_a coeffs[a] * rho(E_a)."""
        if self.matrix_realization is None:
            raise LieAlgebraError(f"algebra {self.name!r} has no matrix realization")
        return np.tensordot(np.asarray(coeffs, complex), np.array(self.matrix_realization), axes=1)

    def to_config(self) -> dict:
        entries = []
        n = self.dim
        for a, b, c in itertools.product(range(n), repeat=3):
            v = self.C[a, b, c]
            if a < b and v != 0:
                entries.append({"a": a + 1, "b": b + 1, "c": c + 1, "re": v.real, "im": v.imag})
        cfg = {"dim": n, "C": entries, "labels": list(self.basis_labels), "name": self.name}
        if self.matrix_realization is not None:
            cfg["matrix_realization"] = [_matrix_to_config(M) for M in self.matrix_realization]
        return cfg


def _matrix_to_config(M: np.ndarray) -> list:
    return [[[v.real, v.imag] for v in row] for row in M]


def _matrix_from_config(rows) -> np.ndarray:
    def val(v):
        if isinstance(v, (list, tuple)):
            return complex(v[0], v[1] if len(v) > 1 else 0.0)
        return complex(v)

    return np.array([[val(v) for v in row] for row in rows], dtype=complex)


def jacobi_residual(L: LieAlgebra) -> float:
    C = L.C
    # sum_d C^d_ab C^e_dc + cyclic
    t = np.einsum("abd,dce->abce", C, C)
    res = t + t.transpose(1, 2, 0, 3) + t.transpose(2, 0, 1, 3)
    return float(np.max(np.abs(res))) if res.size else 0.0


def realization_residual(L: LieAlgebra) -> float:
    mats = np.array(L.matrix_realization)
    comm = np.einsum("aij,bjk->abik", mats, mats) - np.einsum("bij,ajk->abik", mats, mats)
    rhs = np.einsum("abc,cik->abik", L.C, mats)
    return float(np.max(np.abs(comm - rhs))) if comm.size else 0.0


def killing_form(L: LieAlgebra) -> np.ndarray:
    """k_ab = sum_{c,d} C^d_ac C^c_bd = tr(ad_a ad_b)."""
    return np.einsum("acd,bdc->ab", L.C, L.C)


def is_unimodular(L: LieAlgebra, tol: float = JACOBI_TOL) -> bool:
    return bool(np.all(np.abs(adjoint_traces(L)) <= tol))


def adjoint_traces(L: LieAlgebra) -> np.ndarray:
    """tr(ad_{E_a}) = sum_b C^b_ab for each a."""
    return np.einsum("abb->a", L.C)


def adjoint_matrix(L: LieAlgebra, xi) -> np.ndarray:
    """(ad_xi)^c_a = sum_d C^c_da xi^d, returned as an array indexed [c, a]."""
    xi = np.asarray(xi, dtype=complex)
    if xi.shape != (L.dim,):
        raise ValueError(f"expected a vector of length {L.dim}, got shape {xi.shape}")
    return np.einsum("dac,d->ca", L.C, xi)


def from_matrices(mats: Sequence[np.ndarray], name: str = "custom", labels=(), tol: float = 1e-10) -> LieAlgebra:
    """Structure constants of the span of ``mats`` under the commutator."""
    mats = [np.asarray(M, dtype=complex) for M in mats]
    n = len(mats)
    basis = np.array([M.ravel() for M in mats]).T
    C = np.zeros((n, n, n), dtype=complex)
    for a in range(n):
        for b in range(a + 1, n):
            comm = (mats[a] @ mats[b] - mats[b] @ mats[a]).ravel()
            coef, *_ = np.linalg.lstsq(basis, comm, rcond=None)
            if np.max(np.abs(basis @ coef - comm), initial=0.0) > tol:
                raise LieAlgebraError(f"span of matrices is not closed under the commutator ({a}, {b})")
            coef[np.abs(coef) < 1e-13] = 0
            C[a, b] = coef
            C[b, a] = -coef
    return LieAlgebra(C, tuple(labels), tuple(mats), name)


def _levi_civita3() -> np.ndarray:
    eps = np.zeros((3, 3, 3))
    for (a, b, c), s in (((0, 1, 2), 1), ((1, 2, 0), 1), ((2, 0, 1), 1),
                         ((0, 2, 1), -1), ((2, 1, 0), -1), ((1, 0, 2), -1)):
        eps[a, b, c] = s
    return eps


def _elementary(p: int, i: int, j: int) -> np.ndarray:
    M = np.zeros((p, p), dtype=complex)
    M[i, j] = 1
    return M


def preset(name: str, p: int | None = None) -> LieAlgebra:
    """Named algebras: su2, abelian(n), heisenberg3, affine2, gl(p), sl(p).

    ``name`` may carry its parameter inline, e.g. ``"gl(2)"`` or ``"abelian(3)"``.
    """
    key = name.strip().lower().replace(" ", "")
    if "(" in key:
        key, arg = key.rstrip(")").split("(", 1)
        p = int(arg)
    if key == "su2":
        sigma = [np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]]), np.array([[1, 0], [0, -1]])]
        mats = tuple(-0.5j * s for s in sigma)
        return LieAlgebra(_levi_civita3(), ("E1", "E2", "E3"), mats, "su2")
    if key == "abelian":
        n = 1 if p is None else p
        if n < 1:
            raise LieAlgebraError("abelian algebra needs dimension >= 1")
        mats = tuple(_elementary(n, a, a) for a in range(n))
        return LieAlgebra(np.zeros((n, n, n)), (), mats, f"abelian({n})")
    if key == "heisenberg3":
        C = np.zeros((3, 3, 3))
        C[0, 1, 2], C[1, 0, 2] = 1, -1
        mats = (_elementary(3, 0, 1), _elementary(3, 1, 2), _elementary(3, 0, 2))
        return LieAlgebra(C, ("X", "Y", "Z"), mats, "heisenberg3")
    if key == "affine2":
        C = np.zeros((2, 2, 2))
        C[0, 1, 0], C[1, 0, 0] = 1, -1
        mats = (_elementary(2, 0, 1), _elementary(2, 1, 1))
        return LieAlgebra(C, ("E1", "E2"), mats, "affine2")
    if key in ("gl", "sl"):
        if p is None or p < 2:
            raise LieAlgebraError(f"{key}(p) needs p >= 2")
        if key == "gl":
            idx = [(i, j) for i in range(p) for j in range(p)]
            mats = [_elementary(p, i, j) for i, j in idx]
            labels = [f"E{i + 1}{j + 1}" for i, j in idx]
        else:
            idx = [(i, j) for i in range(p) for j in range(p) if i != j]
            mats = [_elementary(p, i, j) for i, j in idx]
            labels = [f"E{i + 1}{j + 1}" for i, j in idx]
            for k in range(p - 1):
                mats.append(_elementary(p, k, k) - _elementary(p, k + 1, k + 1))
                labels.append(f"H{k + 1}")
        return from_matrices(mats, f"{key}({p})", labels)
    raise LieAlgebraError(f"unknown preset {name!r}")


def from_config(cfg: dict) -> LieAlgebra:
    """Build from ``{preset: name[, p]}`` or ``{dim, C: [{a, b, c, re, im}], matrix_realization}``.

    Indices in the config are 1-based; antisymmetry is completed automatically.
    """
    if "preset" in cfg:
        return preset(str(cfg["preset"]), cfg.get("p"))
    if "dim" not in cfg:
        raise LieAlgebraError("algebra config needs 'preset' or 'dim'")
    n = int(cfg["dim"])
    C = np.zeros((n, n, n), dtype=complex)
    for e in cfg.get("C", []):
        a, b, c = int(e["a"]) - 1, int(e["b"]) - 1, int(e["c"]) - 1
        v = complex(e.get("re", 0.0), e.get("im", 0.0))
        if a == b and v != 0:
            raise LieAlgebraError(f"C^{c + 1}_{a + 1}{b + 1} must vanish by antisymmetry")
        C[a, b, c] = v
        C[b, a, c] = -v
    mats = cfg.get("matrix_realization")
    if mats is not None:
        mats = tuple(_matrix_from_config(M) for M in mats)
    return LieAlgebra(C, tuple(cfg.get("labels", ())), mats, cfg.get("name", "custom"))
