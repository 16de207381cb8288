"""Atlases, transition data, transport of local forms and cocycle checks.

For a directed overlap (i, j) the transition stores

* ``G``: the matrix of α^i_j, with α^i_j(E_a) = G[b][a] E_b;
* ``chi``: the g-valued 1-form χ_ij, so that inner parts change as
  γ^i = α^i_j(γ^j) + χ_ij(X).

Every identity is sampled on a deterministic lattice of each overlap box.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .forms import Form, FormError, MixedForm, SpatialOneForm, from_mixed, substitute_inner
from .liealg import LieAlgebra
from .report import Report
from .symcore import (ChartBox, Polynomial, as_poly, poly_identity, poly_matmul, poly_matrix,
                      poly_matrix_eval, poly_matrix_partial)

DEFAULT_TOL = 1e-9
DEFAULT_LATTICE = 5


class GluingError(ValueError):
    pass


@dataclass
class Atlas:
    algebra: LieAlgebra
    charts: dict
    overlaps: dict = field(default_factory=dict)

    def __post_init__(self):
        self.charts = {k: (v if isinstance(v, ChartBox) else ChartBox(*v)) for k, v in self.charts.items()}
        dims = {b.dim for b in self.charts.values()}
        if len(dims) > 1:
            raise GluingError(f"charts have different dimensions: {sorted(dims)}")
        ov = {}
        for (i, j), box in self.overlaps.items():
            for k in (i, j):
                if k not in self.charts:
                    raise GluingError(f"overlap ({i}, {j}) references unknown chart {k!r}")
            if box is None:
                box = self.charts[i].intersect(self.charts[j])
                if box is None:
                    raise GluingError(f"charts {i!r} and {j!r} do not intersect")
            elif not isinstance(box, ChartBox):
                box = ChartBox(*box)
            if not (self.charts[i].contains(box) and self.charts[j].contains(box)):
                raise GluingError(f"overlap box of ({i}, {j}) is not contained in both charts")
            ov[(i, j)] = box
        for (i, j) in list(ov):
            if (j, i) not in ov:
                raise GluingError(f"overlap ({i}, {j}) is registered without ({j}, {i})")
        self.overlaps = ov

    @property
    def m(self) -> int:
        return next(iter(self.charts.values())).dim

    def triples(self):
        """Ordered triples (i, j, k) of distinct charts with all three overlaps registered."""
        keys = sorted(self.charts, key=str)
        for i, j, k in itertools.permutations(keys, 3):
            if (i, j) in self.overlaps and (j, k) in self.overlaps and (i, k) in self.overlaps:
                box = self.overlaps[(i, j)].intersect(self.overlaps[(j, k)])
                box = box and box.intersect(self.overlaps[(i, k)])
                if box is not None:
                    yield (i, j, k), box


@dataclass
class Transition:
    G: list
    chi: SpatialOneForm


@dataclass
class TransitionData:
    atlas: Atlas
    transitions: dict

    def __post_init__(self):
        n, m = self.atlas.algebra.dim, self.atlas.m
        clean = {}
        for key, t in self.transitions.items():
            if key not in self.atlas.overlaps:
                raise GluingError(f"transition given for unregistered overlap {key}")
            if not isinstance(t, Transition):
                t = Transition(*t)
            G = poly_matrix(t.G, m)
            if len(G) != n or any(len(r) != n for r in G):
                raise GluingError(f"G on overlap {key} must be {n}x{n}")
            chi = t.chi if isinstance(t.chi, SpatialOneForm) else SpatialOneForm(t.chi, m)
            if (chi.n, chi.m) != (n, m):
                raise GluingError(f"chi on overlap {key} must be {n}x{m}")
            clean[key] = Transition(G, chi)
        missing = set(self.atlas.overlaps) - set(clean)
        if missing:
            raise GluingError(f"no transition data for overlaps {sorted(missing, key=str)}")
        self.transitions = clean

    @property
    def algebra(self) -> LieAlgebra:
        return self.atlas.algebra

    def __getitem__(self, key) -> Transition:
        try:
            return self.transitions[key]
        except KeyError:
            raise GluingError(f"overlap {key} is not registered") from None


def identity_transitions(atlas: Atlas) -> TransitionData:
    n, m = atlas.algebra.dim, atlas.m
    return TransitionData(atlas, {
        key: Transition(poly_identity(n, m), SpatialOneForm.zero(n, m)) for key in atlas.overlaps
    })


def constant_transitions(atlas: Atlas, G: Mapping) -> TransitionData:
    """Constant automorphisms with χ = 0; ``G`` maps (i, j) to a numeric matrix."""
    n, m = atlas.algebra.dim, atlas.m
    out = {}
    for (i, j) in atlas.overlaps:
        if (i, j) in G:
            M = np.asarray(G[(i, j)], dtype=complex)
        else:
            M = np.linalg.inv(np.asarray(G[(j, i)], dtype=complex))
        out[(i, j)] = Transition(poly_matrix(M.tolist(), m), SpatialOneForm.zero(n, m))
    return TransitionData(atlas, out)


# transport


def transport(omega: Form, data: TransitionData, key) -> Form:
    """α̂^i_j: carries a form on chart j to chart i over the overlap ``key = (i, j)``.

    Inner generators pull back through θ_j^b = G^j_i[b][a] θ_i^a + χ_ji[b][μ] dx^μ,
    dx generators are unchanged, adjoint values are rotated by G^i_j.
    Mixed forms are first rewritten in the θ basis.
    """
    i, j = key
    if isinstance(omega, MixedForm):
        omega = from_mixed(omega)
    fwd, back = data[(i, j)], data[(j, i)]
    if omega.kind == "rep":
        raise FormError("transport of representation-valued forms needs the representation's transition maps")
    value_map = fwd.G if omega.kind == "adjoint" else None
    return substitute_inner(omega, back.G, back.chi.comps, value_map=value_map)


def transport_connection(A_j: SpatialOneForm, data: TransitionData, key) -> SpatialOneForm:
    """Ordinary connection glued with the inhomogeneous shift A_i = G^i_j A_j + χ_ij."""
    t = data[key]
    return A_j.act(t.G) + t.chi


def transport_inner_metric(h_i, data: TransitionData, key, point) -> np.ndarray:
    """h^j = (G^i_j)^T h^i G^i_j at a point, for ``key = (i, j)``."""
    G = poly_matrix_eval(data[key].G, point)[0]
    return G.T @ np.asarray(h_i, dtype=complex) @ G


# residual helpers


def _matrix_residual(M, pts) -> float:
    vals = poly_matrix_eval(M, pts)
    return float(np.max(np.abs(vals))) if vals.size else 0.0


def _mat_sub(A, B):
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def _ad_of(L: LieAlgebra, vec) -> list:
    """Polynomial matrix ad(v)[c][b] = Σ_d C^c_db v^d."""
    n = L.dim
    m = vec[0].num_vars
    out = []
    for c in range(n):
        row = []
        for b in range(n):
            acc = Polynomial.zero(m)
            for d in range(n):
                if L.C[d, b, c] != 0:
                    acc = acc + vec[d].scale(L.C[d, b, c])
            row.append(acc)
        out.append(row)
    return out


def form_residual(omega: Form, pts) -> float:
    if not omega.terms:
        return 0.0
    return float(max(np.max(np.abs(p(pts))) for p in omega.terms.values()))


def _one_form_residual(A: SpatialOneForm, pts) -> float:
    return float(max((np.max(np.abs(p(pts))) for row in A.comps for p in row), default=0.0))


def field_strength_of(L: LieAlgebra, A: SpatialOneForm) -> list:
    """F[a][μ][ν] = ∂_μ A^a_ν − ∂_ν A^a_μ + C^a_bc A^b_μ A^c_ν as polynomials."""
    n, m = A.n, A.m
    F = [[[Polynomial.zero(m) for _ in range(m)] for _ in range(m)] for _ in range(n)]
    for a in range(n):
        for mu in range(m):
            for nu in range(mu + 1, m):
                val = A[a, nu].partial(mu) - A[a, mu].partial(nu)
                for b in range(n):
                    for c in range(n):
                        if L.C[b, c, a] != 0:
                            val = val + (A[b, mu] * A[c, nu]).scale(L.C[b, c, a])
                F[a][mu][nu] = val
                F[a][nu][mu] = -val
    return F


# checks


def check_cocycles(data: TransitionData, tol: float = DEFAULT_TOL, per_axis: int = DEFAULT_LATTICE) -> Report:
    """Inverse, χ-inverse, triple composition and automorphism identities on every overlap.

    Also checks ∂_μ G = −ad(χ_μ) G and flatness of χ, which transport needs in
    order to commute with d̂ for non-constant transitions.
    """
    L = data.algebra
    n, m = L.dim, data.atlas.m
    rep = Report("check-cocycles")
    seen = set()
    for (i, j), box in sorted(data.atlas.overlaps.items(), key=lambda kv: str(kv[0])):
        pts = box.lattice(per_axis)
        fwd, back = data[(i, j)], data[(j, i)]
        loc = f"({i},{j})"
        GG = poly_matmul(fwd.G, back.G)
        rep.add("inverse", _matrix_residual(_mat_sub(GG, poly_identity(n, m)), pts), tol, loc)
        rep.add("chi_inverse", _one_form_residual(back.chi.act(fwd.G) + fwd.chi, pts), tol, loc)
        # automorphism: G[C(x, y)] = C(Gx, Gy) on basis pairs
        Gv = poly_matrix_eval(fwd.G, pts)
        left = np.einsum("kdc,abc->kabd", Gv, L.C)
        right = np.einsum("kea,kfb,efd->kabd", Gv, Gv, L.C)
        rep.add("automorphism", float(np.max(np.abs(left - right), initial=0.0)), tol, loc)
        # compatibility with d
        worst = 0.0
        for mu in range(m):
            dG = poly_matrix_partial(fwd.G, mu)
            adG = poly_matmul(_ad_of(L, [fwd.chi[a, mu] for a in range(n)]), fwd.G)
            worst = max(worst, _matrix_residual([[p + q for p, q in zip(r1, r2)] for r1, r2 in zip(dG, adG)], pts))
        rep.add("derivative_compatibility", worst, tol, loc)
        F = field_strength_of(L, fwd.chi)
        flat = max((np.max(np.abs(F[a][mu][nu](pts))) for a in range(n) for mu in range(m) for nu in range(m)),
                   default=0.0)
        rep.add("chi_flatness", float(flat), tol, loc)
        seen.add((i, j))
    for (i, j, k), box in data.atlas.triples():
        pts = box.lattice(per_axis)
        loc = f"({i},{j},{k})"
        Gij, Gjk, Gik = data[(i, j)].G, data[(j, k)].G, data[(i, k)].G
        rep.add("triple_G", _matrix_residual(_mat_sub(poly_matmul(Gij, Gjk), Gik), pts), tol, loc)
        chi = data[(j, k)].chi.act(Gij) + data[(i, j)].chi - data[(i, k)].chi
        rep.add("triple_chi", _one_form_residual(chi, pts), tol, loc)
    return rep


def check_global_family(family: Mapping, data: TransitionData, tol: float = DEFAULT_TOL,
                        per_axis: int = DEFAULT_LATTICE) -> Report:
    """Checks α̂^i_j(ω_j) = ω_i on every directed overlap."""
    rep = Report("check-global-family")
    for (i, j), box in sorted(data.atlas.overlaps.items(), key=lambda kv: str(kv[0])):
        if i not in family or j not in family:
            raise GluingError(f"family has no form on chart {i if i not in family else j!r}")
        wi = family[i]
        if isinstance(wi, MixedForm):
            wi = from_mixed(wi)
        diff = transport(family[j], data, (i, j)) - wi
        rep.add("family_gluing", form_residual(diff, box.lattice(per_axis)), tol, f"({i},{j})")
    return rep


def check_connection_family(family: Mapping, data: TransitionData, tol: float = DEFAULT_TOL,
                            per_axis: int = DEFAULT_LATTICE) -> Report:
    rep = Report("check-connection-family")
    for (i, j), box in sorted(data.atlas.overlaps.items(), key=lambda kv: str(kv[0])):
        diff = transport_connection(family[j], data, (i, j)) - family[i]
        rep.add("connection_gluing", _one_form_residual(diff, box.lattice(per_axis)), tol, f"({i},{j})")
    return rep


def check_inner_metric_family(family: Mapping, data: TransitionData, tol: float = DEFAULT_TOL,
                              per_axis: int = DEFAULT_LATTICE) -> Report:
    """h^j = G^T h^i G and det h^j = det(G)^2 det h^i at lattice points."""
    rep = Report("check-inner-metric-family")
    for (i, j), box in sorted(data.atlas.overlaps.items(), key=lambda kv: str(kv[0])):
        hi, hj = np.asarray(family[i], complex), np.asarray(family[j], complex)
        Gs = poly_matrix_eval(data[(i, j)].G, box.lattice(per_axis))
        res = max(float(np.max(np.abs(G.T @ hi @ G - hj))) for G in Gs)
        dres = max(abs(np.linalg.det(hj) - np.linalg.det(G) ** 2 * np.linalg.det(hi)) for G in Gs)
        rep.add("inner_metric_gluing", res, tol, f"({i},{j})")
        rep.add("determinant_gluing", float(dres), tol, f"({i},{j})")
    return rep


def check_inner_orientable(data: TransitionData, per_axis: int = DEFAULT_LATTICE, tol: float = DEFAULT_TOL) -> bool:
    """True when det G is real and positive at every sampled overlap point."""
    for key, box in data.atlas.overlaps.items():
        dets = np.linalg.det(poly_matrix_eval(data[key].G, box.lattice(per_axis)))
        if np.any(dets.real <= 0) or np.any(np.abs(dets.imag) > tol):
            return False
    return True


# group cocycles


def _project(L: LieAlgebra, mats) -> tuple[list, float]:
    """Coefficients of polynomial matrices in the realization basis, with the span residual."""
    basis = np.array([M.ravel() for M in L.matrix_realization]).T
    pinv = np.linalg.pinv(basis)
    flat = [p for row in mats for p in row]
    m = flat[0].num_vars
    coeffs = []
    for a in range(L.dim):
        acc = Polynomial.zero(m)
        for k, p in enumerate(flat):
            if pinv[a, k] != 0 and not p.is_zero():
                acc = acc + p.scale(pinv[a, k])
        coeffs.append(acc)
    # residual of the reconstruction, coefficient-wise
    resid = 0.0
    for k, p in enumerate(flat):
        rec = Polynomial.zero(m)
        for a in range(L.dim):
            if basis[k, a] != 0:
                rec = rec + coeffs[a].scale(basis[k, a])
        resid = max(resid, (rec - p).max_abs())
    return coeffs, resid


def adjoint_of_group_element(L: LieAlgebra, g, g_inv, span_tol: float = 1e-9) -> list:
    """Matrix of Ad_g in the algebra basis: g E_a g^{-1} = G[b][a] E_b."""
    m = _num_vars(g, g_inv)
    g, g_inv = poly_matrix(g, m), poly_matrix(g_inv, m)
    cols = []
    for a, E in enumerate(L.matrix_realization):
        conj = poly_matmul(poly_matmul(g, poly_matrix(E.tolist(), m)), g_inv)
        coeffs, res = _project(L, conj)
        if res > span_tol:
            raise GluingError(f"conjugation by g leaves the span of the realization (residual {res:.3e})")
        cols.append(coeffs)
    return [[cols[a][b] for a in range(L.dim)] for b in range(L.dim)]


def maurer_cartan(L: LieAlgebra, g, g_inv, span_tol: float = 1e-9) -> SpatialOneForm:
    """χ = g d(g^{-1}) expanded in the algebra basis."""
    m = _num_vars(g, g_inv)
    g, g_inv = poly_matrix(g, m), poly_matrix(g_inv, m)
    comps = [[None] * m for _ in range(L.dim)]
    for mu in range(m):
        coeffs, res = _project(L, poly_matmul(g, poly_matrix_partial(g_inv, mu)))
        if res > span_tol:
            raise GluingError(f"g d(g^-1) leaves the span of the realization (residual {res:.3e})")
        for a in range(L.dim):
            comps[a][mu] = coeffs[a]
    return SpatialOneForm(comps, m)


def _num_vars(*mats) -> int:
    for M in mats:
        for row in M:
            for v in row:
                if isinstance(v, Polynomial):
                    return v.num_vars
    raise GluingError("cannot infer the base dimension from numeric group elements; pass Polynomials")


def check_group_inverse(g, g_inv, pts) -> float:
    m = _num_vars(g, g_inv)
    prod = poly_matmul(poly_matrix(g, m), poly_matrix(g_inv, m))
    return _matrix_residual(_mat_sub(prod, poly_identity(len(prod), m)), pts)


def atiyah_transitions(atlas: Atlas, cocycle: Mapping, tol: float = DEFAULT_TOL,
                       per_axis: int = DEFAULT_LATTICE) -> TransitionData:
    """Transition data G = Ad_{g_ij}, χ_ij = g_ij d(g_ij^{-1}) from a group cocycle.

    ``cocycle`` maps (i, j) to ``(g_ij, g_ij_inverse)``; a missing reverse
    direction is filled in by swapping the pair.
    """
    L = atlas.algebra
    if L.matrix_realization is None:
        raise GluingError("group cocycles need an algebra with a matrix realization")
    out = {}
    for key, box in atlas.overlaps.items():
        if key in cocycle:
            g, g_inv = cocycle[key]
        elif key[::-1] in cocycle:
            g_inv, g = cocycle[key[::-1]]
        else:
            raise GluingError(f"no group element supplied for overlap {key}")
        m = atlas.m
        g, g_inv = poly_matrix(g, m), poly_matrix(g_inv, m)
        res = check_group_inverse(g, g_inv, box.lattice(per_axis))
        if res > tol:
            raise GluingError(f"supplied inverse on overlap {key} fails g g^-1 = 1 (residual {res:.3e})")
        out[key] = Transition(adjoint_of_group_element(L, g, g_inv), maurer_cartan(L, g, g_inv))
    return TransitionData(atlas, out)


def perturb(data: TransitionData, key, delta) -> TransitionData:
    """Copy of ``data`` with a numeric matrix added to G on one overlap (for negative controls)."""
    m = data.atlas.m
    trans = dict(data.transitions)
    t = trans[key]
    G = [[p + as_poly(complex(delta[b][a]), m) for a, p in enumerate(row)] for b, row in enumerate(t.G)]
    trans[key] = Transition(G, t.chi)
    return TransitionData(data.atlas, trans)
