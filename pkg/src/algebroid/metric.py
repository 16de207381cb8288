"""Inner metrics, metric triples, the h-pairing of forms and the Hodge star.

The metric on the algebroid is written in the local basis (∂_μ ⊕ 0, 0 ⊕ E_a).
It is equivalent to a triple (g, h, Ȧ): a base metric, an inner metric and
the g-valued 1-form of the orthogonal ordinary connection, via

    ĝ = [[g + Aᵀ h A, −Aᵀ h], [−h A, h]].
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import factorial

import numpy as np

from .forms import Form, FormError, MixedForm, SpatialOneForm, permutation_sign, wedge
from .liealg import LieAlgebra, killing_form
from .symcore import ChartBox, Polynomial, as_poly

DEGENERACY_TOL = 1e-9


class MetricError(ValueError):
    pass


class InnerDegenerateError(MetricError):
    def __init__(self, kernel: np.ndarray):
        self.kernel = kernel
        vec = ", ".join(f"{c:.6g}" for c in kernel)
        super().__init__(f"metric is inner-degenerate: h has kernel direction ({vec})")


def _sqrt_abs_det(M: np.ndarray) -> float:
    return float(np.sqrt(abs(np.linalg.det(M)))) if M.size else 1.0


class InnerMetric:
    """Constant complex symmetric matrix h_ab on the kernel."""

    def __init__(self, h, require_nondegenerate: bool = True):
        h = np.array(h, dtype=complex)
        if h.ndim != 2 or h.shape[0] != h.shape[1]:
            raise MetricError(f"inner metric must be square, got shape {h.shape}")
        if not np.allclose(h, h.T, atol=1e-12):
            raise MetricError("inner metric must be symmetric")
        h.setflags(write=False)
        self.h = h
        self.det = complex(np.linalg.det(h)) if h.size else 1.0
        self.nondegenerate = abs(self.det) > DEGENERACY_TOL
        if require_nondegenerate and not self.nondegenerate:
            raise InnerDegenerateError(_kernel_direction(h))
        self.sqrt_abs_det = _sqrt_abs_det(h)
        self.inv = np.linalg.inv(h) if self.nondegenerate else None

    @classmethod
    def killing(cls, L: LieAlgebra) -> "InnerMetric":
        k = killing_form(L)
        if abs(np.linalg.det(k)) <= DEGENERACY_TOL:
            raise MetricError(f"Killing form of {L.name} is degenerate; the algebra is not semi-simple")
        return cls(k)

    @property
    def n(self) -> int:
        return self.h.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.h, dtype=dtype)


def _kernel_direction(M: np.ndarray) -> np.ndarray:
    _, _, vh = np.linalg.svd(M)
    v = vh[-1].conj()
    k = int(np.argmax(np.abs(v)))
    v = v / v[k] * abs(v[k])
    v[np.abs(v) < 1e-12] = 0
    return v.real if np.allclose(v.imag, 0) else v


@dataclass
class MetricTriple:
    g: np.ndarray
    h: InnerMetric
    A_dot: SpatialOneForm

    def __post_init__(self):
        g = np.array(self.g, dtype=float if np.isrealobj(self.g) else complex)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise MetricError(f"base metric must be square, got shape {g.shape}")
        if not np.allclose(g, g.T, atol=1e-12):
            raise MetricError("base metric must be symmetric")
        self.g = g
        if not isinstance(self.h, InnerMetric):
            self.h = InnerMetric(self.h)
        if self.A_dot is None:
            self.A_dot = SpatialOneForm.zero(self.h.n, g.shape[0])
        if (self.A_dot.n, self.A_dot.m) != (self.h.n, g.shape[0]):
            raise MetricError(f"background connection has shape {self.A_dot.n}x{self.A_dot.m}, "
                              f"expected {self.h.n}x{g.shape[0]}")

    @property
    def m(self) -> int:
        return self.g.shape[0]

    @property
    def n(self) -> int:
        return self.h.n

    @property
    def g_det(self) -> float:
        return float(np.real(np.linalg.det(self.g)))

    @property
    def sqrt_abs_g(self) -> float:
        return _sqrt_abs_det(self.g)

    @property
    def g_inv(self) -> np.ndarray:
        if abs(np.linalg.det(self.g)) <= DEGENERACY_TOL:
            raise MetricError("base metric is degenerate")
        return np.linalg.inv(self.g)


class AlgebroidMetric:
    """(m+n)×(m+n) symmetric matrix of polynomials in the basis (∂_μ, E_a)."""

    def __init__(self, entries, m: int, n: int):
        size = m + n
        rows = [[as_poly(v, m) for v in row] for row in entries]
        if len(rows) != size or any(len(r) != size for r in rows):
            raise MetricError(f"metric matrix must be {size}x{size}")
        for i in range(size):
            for j in range(i + 1, size):
                if (rows[i][j] - rows[j][i]).max_abs() > 1e-12:
                    raise MetricError(f"metric matrix is not symmetric at ({i}, {j})")
        self.entries = rows
        self.m, self.n = m, n

    def evaluate(self, x) -> np.ndarray:
        return np.array([[p(x) for p in row] for row in self.entries], dtype=complex)

    def block(self, rows: slice, cols: slice) -> list:
        return [r[cols] for r in self.entries[rows]]


def assemble_metric(t: MetricTriple) -> AlgebroidMetric:
    m, n = t.m, t.n
    A = t.A_dot
    h = t.h.h
    # hA[b][mu] = h_ba A^a_mu
    hA = [[_lin(h[b], [A[a, mu] for a in range(n)], m) for mu in range(m)] for b in range(n)]
    size = m + n
    E = [[Polynomial.zero(m)] * size for _ in range(size)]
    for mu in range(m):
        for nu in range(m):
            acc = Polynomial.constant(m, t.g[mu, nu])
            for a in range(n):
                acc = acc + A[a, mu] * hA[a][nu]
            E[mu][nu] = acc
        for b in range(n):
            E[mu][m + b] = -hA[b][mu]
            E[m + b][mu] = -hA[b][mu]
    for a in range(n):
        for b in range(n):
            E[m + a][m + b] = Polynomial.constant(m, h[a, b])
    return AlgebroidMetric(E, m, n)


def _lin(coeffs, polys, m) -> Polynomial:
    acc = Polynomial.zero(m)
    for c, p in zip(coeffs, polys):
        if c != 0:
            acc = acc + p.scale(c)
    return acc


def decompose_metric(G: AlgebroidMetric, tol: float = 1e-9) -> MetricTriple:
    """Recover (g, h, Ȧ) from an inner-non-degenerate metric with constant g and h blocks."""
    m, n = G.m, G.n
    hs = G.block(slice(m, m + n), slice(m, m + n))
    if any(not p.is_constant() for row in hs for p in row):
        raise MetricError("inner block of the metric is not constant on the chart")
    h = np.array([[p.constant_term() for p in row] for row in hs], dtype=complex)
    if n and abs(np.linalg.det(h)) <= DEGENERACY_TOL:
        raise InnerDegenerateError(_kernel_direction(h))
    hinv = np.linalg.inv(h)
    B = G.block(slice(m, m + n), slice(0, m))
    A = SpatialOneForm([[_lin(-hinv[a], [B[b][mu] for b in range(n)], m) for mu in range(m)]
                        for a in range(n)], m)
    g = np.zeros((m, m), dtype=complex)
    for mu in range(m):
        for nu in range(m):
            p = G.entries[mu][nu]
            for a in range(n):
                p = p - A[a, mu] * _lin(h[a], [A[b, nu] for b in range(n)], m)
            nonconst = Polynomial(m, {e: c for e, c in p.terms.items() if sum(e) > 0})
            if nonconst.max_abs() > tol:
                raise MetricError(f"base block g[{mu},{nu}] is not constant after removing the connection part")
            g[mu, nu] = p.constant_term()
    if np.allclose(g.imag, 0, atol=tol):
        g = g.real
    return MetricTriple(g, InnerMetric(h), A)


def is_killing(h, L: LieAlgebra, tol: float = 1e-9) -> bool:
    """ad-invariance h([ξ,x],y) + h(x,[ξ,y]) = 0 on basis elements."""
    H = np.asarray(h, dtype=complex)
    ad = L.ad_matrices
    res = np.einsum("acb,cd->abd", ad, H) + np.einsum("bc,acd->abd", H, ad)
    return bool(np.max(np.abs(res), initial=0.0) <= tol)


def killing_residual(h, L: LieAlgebra) -> float:
    H = np.asarray(h, dtype=complex)
    ad = L.ad_matrices
    res = np.einsum("acb,cd->abd", ad, H) + np.einsum("bc,acd->abd", H, ad)
    return float(np.max(np.abs(res), initial=0.0))


def h_pair(omega: Form, eta: Form, h=None, conjugate: bool = False) -> Form:
    """Scalar form h_ab ω^a ∧ η^b; plain wedge for scalar-valued inputs.

    With ``conjugate=True`` the first argument's coefficients are conjugated
    (sesquilinear pairing).
    """
    if omega.kind != eta.kind:
        raise FormError(f"cannot pair {omega.kind} with {eta.kind} forms")
    if conjugate:
        omega = omega._like({k: p.conj() for k, p in omega.terms.items()})
    if omega.kind == "scalar":
        return wedge(omega, eta)
    if h is None:
        raise MetricError("valued forms need a pairing matrix")
    H = np.asarray(h, dtype=complex)
    vd = omega.value_dim
    if H.shape != (vd, vd):
        raise MetricError(f"pairing matrix has shape {H.shape}, value space has dimension {vd}")
    total = None
    for a in range(vd):
        wa = omega.value_component(a)
        if wa.is_zero():
            continue
        for b in range(vd):
            if H[a, b] == 0:
                continue
            term = wedge(wa, eta.value_component(b)).scale(H[a, b])
            total = term if total is None else total + term
    if total is None:
        return omega._like({}, "scalar")
    return total


# Hodge star


def _check_background(omega: MixedForm, t: MetricTriple, tol: float = 1e-12):
    if not isinstance(omega, MixedForm):
        raise FormError("the Hodge star acts on forms written in the mixed basis")
    if not omega.A.equals(t.A_dot, tol):
        raise FormError("form is not written in the mixed basis of the triple's connection")
    if omega.m != t.m or omega.n != t.n:
        raise FormError("form and metric dimensions differ")


def _complement(idx: tuple, size: int) -> tuple:
    s = set(idx)
    return tuple(k for k in range(size) if k not in s)


def _minor(M: np.ndarray, rows: tuple, cols: tuple) -> complex:
    if not rows:
        return 1.0
    return complex(np.linalg.det(M[np.ix_(rows, cols)]))


def hodge_star(omega: MixedForm, t: MetricTriple) -> MixedForm:
    """Local Hodge star on a mixed-basis form of pure degree p.

    With full antisymmetric components c = w / (r! s!) for the stored ascending
    coefficient w, the ascending coefficient of dx^K ∧ q^L is

        (−1)^{s(m−r)} √|h| √|g| (m−r)!(n−s)!/(r! s!) ε_{ĪK} ε_{J̄L} Σ_{M,N} w_{MN} det g^{M Ī} det h^{N J̄}

    where Ī, J̄ are the complements of K, L. ⋆⋆ = (−1)^{(m+n−p)p} holds when
    det g and det h are positive; in general the factor |det|/det appears.
    """
    _check_background(omega, t)
    omega.degree()
    m, n = t.m, t.n
    ginv, hinv = t.g_inv, t.h.inv
    if hinv is None:
        raise InnerDegenerateError(_kernel_direction(t.h.h))
    vol = t.h.sqrt_abs_det * t.sqrt_abs_g
    out: dict = {}
    minors_g: dict = {}
    minors_h: dict = {}
    for (M, N, v), w in omega.terms.items():
        r, s = len(M), len(N)
        pref = (-1) ** (s * (m - r)) * vol * factorial(m - r) * factorial(n - s) / (factorial(r) * factorial(s))
        for Ib in itertools.combinations(range(m), r):
            dg = minors_g.setdefault((M, Ib), _minor(ginv, M, Ib))
            if dg == 0:
                continue
            K = _complement(Ib, m)
            eK = permutation_sign(Ib + K)
            for Jb in itertools.combinations(range(n), s):
                dh = minors_h.setdefault((N, Jb), _minor(hinv, N, Jb))
                if dh == 0:
                    continue
                Lc = _complement(Jb, n)
                coef = pref * eK * permutation_sign(Jb + Lc) * dg * dh
                key = (K, Lc, v)
                val = w.scale(coef)
                out[key] = out[key] + val if key in out else val
    return omega._like(out)


def hodge_star_bruteforce(omega: MixedForm, t: MetricTriple) -> MixedForm:
    """Direct transcription of the index sum with Levi-Civita symbols (slow; for checks)."""
    _check_background(omega, t)
    m, n = t.m, t.n
    ginv, hinv = t.g_inv, t.h.inv
    vol = t.h.sqrt_abs_det * t.sqrt_abs_g
    # full antisymmetric components
    full: dict = {}
    for (M, N, v), w in omega.terms.items():
        r, s = len(M), len(N)
        for pm in itertools.permutations(range(r)):
            for pn in itertools.permutations(range(s)):
                mu = tuple(M[k] for k in pm)
                a = tuple(N[k] for k in pn)
                sgn = permutation_sign(pm) * permutation_sign(pn)
                full[(mu, a, v)] = w.scale(sgn / (factorial(r) * factorial(s)))
    out: dict = {}
    for (mu, a, v), c in full.items():
        r, s = len(mu), len(a)
        for nu in itertools.permutations(range(m)):
            for b in itertools.permutations(range(n)):
                coef = (-1) ** (s * (m - r)) / (factorial(r) * factorial(s)) * vol
                coef *= permutation_sign(nu) * permutation_sign(b)
                for k in range(r):
                    coef *= ginv[mu[k], nu[k]]
                for k in range(s):
                    coef *= hinv[a[k], b[k]]
                if coef == 0:
                    continue
                K, Lc = nu[r:], b[s:]
                sk, sl = permutation_sign(K), permutation_sign(Lc)
                key = (tuple(sorted(K)), tuple(sorted(Lc)), v)
                val = c.scale(coef * sk * sl)
                out[key] = out[key] + val if key in out else val
    return omega._like(out)


def scalar_product_contraction(omega: MixedForm, eta: MixedForm, t: MetricTriple, box: ChartBox,
                               value_metric=None, literal_sign: bool = True) -> complex:
    """Contraction formula for (ω, η) = ⟨ω, ⋆η⟩ integrated over ``box``.

    Evaluates (−1)^n Σ_{r+s=p} σ (m−r)!(n−s)! ω^a_{μ…a…} η_a^{μ…a…} √|g| with
    σ = (−1)^{s(m−r)} when ``literal_sign`` is set, σ = 1 otherwise. The Hodge
    pipeline reproduces σ = 1; the two agree whenever s(m−r) is even for every
    contributing bidegree.
    """
    _check_background(omega, t)
    _check_background(eta, t)
    p = omega.degree()
    if eta.degree() != p and eta.terms and omega.terms:
        raise FormError("scalar product needs forms of the same degree")
    if omega.kind != eta.kind:
        raise FormError("forms have different value kinds")
    m, n = t.m, t.n
    ginv, hinv = t.g_inv, t.h.inv
    if omega.kind == "scalar":
        H = np.ones((1, 1))
    elif value_metric is not None:
        H = np.asarray(value_metric, dtype=complex)
    elif omega.kind == "adjoint":
        H = t.h.h
    else:
        raise MetricError("representation-valued forms need an explicit value metric")
    density = Polynomial.zero(m)
    for (M, N, a), w in omega.terms.items():
        r, s = len(M), len(N)
        sigma = (-1) ** (s * (m - r)) if literal_sign else 1
        weight = sigma * factorial(m - r) * factorial(n - s) / (factorial(r) * factorial(s))
        for (M2, N2, b), u in eta.terms.items():
            if len(M2) != r or len(N2) != s or H[a, b] == 0:
                continue
            c = weight * H[a, b] * _minor(ginv, M, M2) * _minor(hinv, N, N2)
            if c != 0:
                density = density + (w * u).scale(c)
    return (-1) ** n * t.sqrt_abs_g * density.integrate_box(box)
