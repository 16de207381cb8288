"""Bigraded forms on a trivialized transitive Lie algebroid.

A local form is a finite sum of terms ``f(x) dx^I ∧ θ^J ⊗ e_v`` where ``I`` and
``J`` are strictly increasing index tuples and ``e_v`` runs over a basis of
the value space (a single slot for scalar forms, the Lie algebra basis for
adjoint-valued forms, a representation space otherwise). The dx generators
always come first in the stored monomial; moving a θ past a dx costs a sign.

:class:`MixedForm` stores the same data against the mixed basis
``q^a = A^a − θ^a`` of a background connection ``A``.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Mapping, Sequence

import numpy as np

from .liealg import LieAlgebra
from .symcore import Polynomial, as_poly, random_polynomial

VALUE_KINDS = ("scalar", "adjoint", "rep")


class FormError(ValueError):
    pass


def merge_sign(a: tuple, b: tuple):
    """Sign and sorted union for moving the generators of ``b`` behind ``a``.

    Returns ``(0, None)`` when the tuples share an index.
    """
    if not a:
        return 1, b
    if not b:
        return 1, a
    sa = set(a)
    if any(x in sa for x in b):
        return 0, None
    inv = sum(1 for x in a for y in b if x > y)
    return (-1 if inv % 2 else 1), tuple(sorted(a + b))


def permutation_sign(seq: Sequence[int]) -> int:
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
            elif seq[i] == seq[j]:
                return 0
    return sign


class Form:
    """Immutable bigraded form with polynomial coefficients.

    ``terms`` maps ``(I, J, v)`` to a :class:`Polynomial`; ``I`` indexes dx
    generators (0-based), ``J`` indexes θ generators and ``v`` the value slot.
    """

    __slots__ = ("algebra", "m", "kind", "rep", "terms")

    def __init__(self, algebra: LieAlgebra, m: int, kind: str = "scalar",
                 terms: Mapping | None = None, rep=None):
        if kind not in VALUE_KINDS:
            raise FormError(f"unknown value kind {kind!r}")
        self.algebra = algebra
        self.m = int(m)
        self.kind = kind
        if kind == "rep":
            if rep is None:
                if algebra.matrix_realization is None:
                    raise FormError("rep-valued forms need representation matrices")
                rep = algebra.matrix_realization
            rep = np.array(rep, dtype=complex)
            if rep.ndim != 3 or rep.shape[0] != algebra.dim or rep.shape[1] != rep.shape[2]:
                raise FormError(f"representation matrices have shape {rep.shape}")
            rep.setflags(write=False)
        else:
            rep = None
        self.rep = rep
        n, vd = algebra.dim, self.value_dim
        clean = {}
        for (I, J, v), f in (terms or {}).items():
            I, J = tuple(I), tuple(J)
            if list(I) != sorted(set(I)) or list(J) != sorted(set(J)):
                raise FormError(f"multi-indices must be strictly increasing: {I}, {J}")
            if I and not 0 <= I[0] <= I[-1] < self.m:
                raise FormError(f"dx index out of range in {I}")
            if J and not 0 <= J[0] <= J[-1] < n:
                raise FormError(f"inner index out of range in {J}")
            if not 0 <= v < vd:
                raise FormError(f"value index {v} out of range for dimension {vd}")
            f = as_poly(f, self.m)
            if not f.is_zero():
                clean[(I, J, int(v))] = f
        self.terms = clean

    @classmethod
    def _raw(cls, like: "Form", terms: dict, kind: str | None = None, **extra) -> "Form":
        f = object.__new__(cls)
        f.algebra, f.m = like.algebra, like.m
        f.kind = like.kind if kind is None else kind
        f.rep = like.rep if f.kind == "rep" else None
        f.terms = {k: p for k, p in terms.items() if not p.is_zero()}
        for name, val in extra.items():
            setattr(f, name, val)
        return f

    def _like(self, terms: dict, kind: str | None = None) -> "Form":
        return Form._raw(self, terms, kind)

    # basic properties

    @property
    def n(self) -> int:
        return self.algebra.dim

    @property
    def value_dim(self) -> int:
        if self.kind == "scalar":
            return 1
        if self.kind == "adjoint":
            return self.algebra.dim
        return self.rep.shape[1]

    def bidegrees(self) -> set:
        return {(len(I), len(J)) for I, J, _ in self.terms}

    def degrees(self) -> set:
        return {r + s for r, s in self.bidegrees()}

    def degree(self) -> int:
        """Total degree of a homogeneous form (0 for the zero form)."""
        ds = self.degrees()
        if len(ds) > 1:
            raise FormError(f"form is not of pure degree: {sorted(ds)}")
        return ds.pop() if ds else 0

    def is_zero(self) -> bool:
        return not self.terms

    def max_abs(self) -> float:
        return max((p.max_abs() for p in self.terms.values()), default=0.0)

    def component(self, I=(), J=(), v: int = 0) -> Polynomial:
        return self.terms.get((tuple(I), tuple(J), v), Polynomial.zero(self.m))

    def part(self, r: int | None = None, s: int | None = None) -> "Form":
        """Restriction to the given dx-degree and/or inner degree."""
        return self._like({
            k: p for k, p in self.terms.items()
            if (r is None or len(k[0]) == r) and (s is None or len(k[1]) == s)
        })

    def value_component(self, v: int) -> "Form":
        """Scalar form carrying the ``v``-th value coefficient."""
        return self._like({(I, J, 0): p for (I, J, w), p in self.terms.items() if w == v}, "scalar")

    def _check_compatible(self, other: "Form"):
        if not isinstance(other, Form):
            raise TypeError(f"expected a Form, got {type(other).__name__}")
        if other.algebra is not self.algebra and not np.array_equal(other.algebra.C, self.algebra.C):
            raise FormError("forms live over different Lie algebras")
        if other.m != self.m:
            raise FormError(f"base dimensions differ: {self.m} vs {other.m}")
        if type(self) is not type(other):
            raise FormError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if isinstance(self, MixedForm) and not self.A.equals(other.A):
            raise FormError("mixed forms refer to different background connections")

    # linear structure

    def __add__(self, other: "Form") -> "Form":
        self._check_compatible(other)
        if other.kind != self.kind:
            raise FormError(f"cannot add {self.kind} and {other.kind} forms")
        out = dict(self.terms)
        for k, p in other.terms.items():
            out[k] = out[k] + p if k in out else p
        return self._like(out)

    def __neg__(self) -> "Form":
        return self._like({k: -p for k, p in self.terms.items()})

    def __sub__(self, other: "Form") -> "Form":
        return self + (-other)

    def scale(self, c) -> "Form":
        """Multiply by a number or a polynomial function."""
        if isinstance(c, Polynomial):
            return self._like({k: p * c for k, p in self.terms.items()})
        c = complex(c)
        return self._like({k: p.scale(c) for k, p in self.terms.items()})

    __rmul__ = scale

    def __eq__(self, other) -> bool:
        if not isinstance(other, Form):
            return NotImplemented
        return (type(self) is type(other) and self.kind == other.kind and self.m == other.m
                and self.terms == other.terms)

    __hash__ = None

    def __repr__(self) -> str:
        return f"{type(self).__name__}(kind={self.kind}, m={self.m}, n={self.n}, terms={len(self.terms)})"

    def __xor__(self, other: "Form") -> "Form":
        return wedge(self, other)

    # evaluation

    def evaluate(self, x, vectors: Sequence) -> np.ndarray:
        """Value of the form at point ``x`` on vectors of length m + n.

        Each vector lists its dx components first, then its inner components.
        Uses the determinant convention (α∧β)(X, Y) = α(X)β(Y) − α(Y)β(X).
        Only the part of matching total degree contributes.
        """
        return evaluate_form(self, x, vectors)

    # serialization

    def to_dict(self) -> dict:
        vd = self.value_dim
        grouped: dict = {}
        for (I, J, v), p in self.terms.items():
            grouped.setdefault((I, J), {})[v] = p
        entries = []
        for (I, J) in sorted(grouped):
            vals = grouped[(I, J)]
            entries.append({
                "dx": [i + 1 for i in I],
                "theta": [j + 1 for j in J],
                "value": [vals[v].to_records() if v in vals else [] for v in range(vd)],
            })
        out = {"value_kind": self.kind, "m": self.m, "terms": entries}
        if self.kind == "rep":
            out["value_dim"] = vd
        return out


class MixedForm(Form):
    """Form written against the mixed basis q^a = A^a − θ^a of a background ``A``."""

    __slots__ = ("A",)

    def __init__(self, algebra: LieAlgebra, m: int, A: "SpatialOneForm", kind: str = "scalar",
                 terms: Mapping | None = None, rep=None):
        super().__init__(algebra, m, kind, terms, rep)
        if A.m != m or A.n != algebra.dim:
            raise FormError(f"background connection has shape {A.n}x{A.m}, expected {algebra.dim}x{m}")
        self.A = A

    def _like(self, terms: dict, kind: str | None = None) -> "MixedForm":
        return MixedForm._raw(self, terms, kind, A=self.A)

    def __repr__(self) -> str:
        return f"MixedForm(kind={self.kind}, m={self.m}, n={self.n}, terms={len(self.terms)})"


class SpatialOneForm:
    """Lie-algebra valued 1-form A = A^a_μ dx^μ ⊗ E_a on a chart.

    ``comps[a][mu]`` holds the polynomial A^a_μ.
    """

    __slots__ = ("n", "m", "comps")

    def __init__(self, comps: Sequence[Sequence], m: int | None = None):
        rows = [list(r) for r in comps]
        if m is None:
            if not rows or not rows[0]:
                raise FormError("cannot infer base dimension from an empty component table")
            m = len(rows[0])
        self.m, self.n = int(m), len(rows)
        if any(len(r) != self.m for r in rows):
            raise FormError("ragged component table for a spatial 1-form")
        self.comps = tuple(tuple(as_poly(v, self.m) for v in r) for r in rows)

    @classmethod
    def zero(cls, n: int, m: int) -> "SpatialOneForm":
        return cls([[0] * m for _ in range(n)], m)

    @classmethod
    def from_form(cls, form: Form) -> "SpatialOneForm":
        if form.kind != "adjoint" or (form.terms and form.bidegrees() != {(1, 0)}):
            raise FormError("expected an adjoint-valued form of bidegree (1, 0)")
        comps = [[Polynomial.zero(form.m)] * form.m for _ in range(form.n)]
        for ((mu,), _, a), p in form.terms.items():
            comps[a][mu] = p
        return cls(comps, form.m)

    def __getitem__(self, idx) -> Polynomial:
        a, mu = idx
        return self.comps[a][mu]

    def to_form(self, algebra: LieAlgebra) -> Form:
        if algebra.dim != self.n:
            raise FormError(f"1-form has {self.n} components, algebra has dimension {algebra.dim}")
        terms = {((mu,), (), a): self.comps[a][mu] for a in range(self.n) for mu in range(self.m)}
        return Form(algebra, self.m, "adjoint", terms)

    def _zip(self, other, op) -> "SpatialOneForm":
        if (other.n, other.m) != (self.n, self.m):
            raise FormError("shape mismatch between spatial 1-forms")
        return SpatialOneForm([[op(self.comps[a][mu], other.comps[a][mu]) for mu in range(self.m)]
                               for a in range(self.n)], self.m)

    def __add__(self, other):
        return self._zip(other, lambda p, q: p + q)

    def __sub__(self, other):
        return self._zip(other, lambda p, q: p - q)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c) -> "SpatialOneForm":
        return SpatialOneForm([[p * c for p in row] for row in self.comps], self.m)

    def act(self, M) -> "SpatialOneForm":
        """Apply an n×n matrix (numbers or polynomials) to the value index."""
        out = []
        for b in range(len(M)):
            row = []
            for mu in range(self.m):
                acc = Polynomial.zero(self.m)
                for a in range(self.n):
                    acc = acc + self.comps[a][mu] * M[b][a]
                row.append(acc)
            out.append(row)
        return SpatialOneForm(out, self.m)

    def equals(self, other: "SpatialOneForm", tol: float = 0.0) -> bool:
        if other is self:
            return True
        if (other.n, other.m) != (self.n, self.m):
            return False
        return (self - other).max_abs() <= tol

    def max_abs(self) -> float:
        return max((p.max_abs() for row in self.comps for p in row), default=0.0)

    def evaluate(self, x) -> np.ndarray:
        """Array A[a, mu] at the point x."""
        return np.array([[p(x) for p in row] for row in self.comps], dtype=complex)

    def to_records(self) -> list:
        return [[p.to_records() for p in row] for row in self.comps]

    @classmethod
    def from_records(cls, rows, m: int) -> "SpatialOneForm":
        return cls([[as_poly(v, m) for v in row] for row in rows], m)

    def __repr__(self) -> str:
        return f"SpatialOneForm(n={self.n}, m={self.m})"


# constructors


def scalar(algebra: LieAlgebra, m: int, f=1.0) -> Form:
    return Form(algebra, m, "scalar", {((), (), 0): f})


def dx(algebra: LieAlgebra, m: int, *mus: int) -> Form:
    """Scalar monomial dx^{μ1} ∧ ... (0-based indices, any order)."""
    sign = permutation_sign(mus)
    if sign == 0:
        return Form(algebra, m)
    return Form(algebra, m, "scalar", {(tuple(sorted(mus)), (), 0): sign})


def theta(algebra: LieAlgebra, m: int, *idx: int) -> Form:
    """Scalar monomial θ^{a1} ∧ ... (0-based indices, any order)."""
    sign = permutation_sign(idx)
    if sign == 0:
        return Form(algebra, m)
    return Form(algebra, m, "scalar", {((), tuple(sorted(idx)), 0): sign})


def tensor(form: Form, vector, kind: str = "adjoint", rep=None) -> Form:
    """Scalar form ⊗ constant (or polynomial) value vector."""
    if form.kind != "scalar":
        raise FormError("tensor expects a scalar-valued form")
    out = {}
    for (I, J, _), p in form.terms.items():
        for v, c in enumerate(vector):
            c = as_poly(c, form.m)
            if not c.is_zero():
                out[(I, J, v)] = p * c
    if isinstance(form, MixedForm):
        res = MixedForm._raw(form, out, kind, A=form.A)
    else:
        res = Form._raw(form, out, kind)
    if kind == "rep":
        res.rep = np.array(rep if rep is not None else form.algebra.matrix_realization, dtype=complex)
        res.rep.setflags(write=False)
    return res


# products


def wedge(omega: Form, eta: Form) -> Form:
    """Graded-commutative product; at least one factor must be scalar-valued."""
    omega._check_compatible(eta)
    if omega.kind != "scalar" and eta.kind != "scalar":
        raise FormError(f"wedge of {omega.kind} and {eta.kind} forms is not defined; use bracket")
    kind = eta.kind if omega.kind == "scalar" else omega.kind
    base = eta if omega.kind == "scalar" else omega
    out: dict = {}
    for (I1, J1, v1), p in omega.terms.items():
        for (I2, J2, v2), q in eta.terms.items():
            key_sign = _product_key(I1, J1, I2, J2)
            if key_sign is None:
                continue
            sign, I, J = key_sign
            key = (I, J, v1 + v2)
            val = p * q if sign > 0 else -(p * q)
            out[key] = out[key] + val if key in out else val
    return base._like(out, kind)


def _product_key(I1, J1, I2, J2):
    si, I = merge_sign(I1, I2)
    if not si:
        return None
    sj, J = merge_sign(J1, J2)
    if not sj:
        return None
    sign = si * sj * (-1 if (len(J1) * len(I2)) % 2 else 1)
    return sign, I, J


def bracket(omega: Form, eta: Form) -> Form:
    """Graded bracket [ω, η]^c = C^c_ab ω^a ∧ η^b of adjoint-valued forms."""
    omega._check_compatible(eta)
    if omega.kind != "adjoint" or eta.kind != "adjoint":
        raise FormError("bracket needs two adjoint-valued forms")
    C = omega.algebra.C
    n = omega.n
    out: dict = {}
    for (I1, J1, a), p in omega.terms.items():
        for (I2, J2, b), q in eta.terms.items():
            coeffs = C[a, b]
            if not coeffs.any():
                continue
            key_sign = _product_key(I1, J1, I2, J2)
            if key_sign is None:
                continue
            sign, I, J = key_sign
            pq = p * q
            for c in range(n):
                if coeffs[c] != 0:
                    key = (I, J, c)
                    val = pq.scale(sign * coeffs[c])
                    out[key] = out[key] + val if key in out else val
    return omega._like(out)


def act(xi, form: Form) -> Form:
    """Pointwise action of a constant or polynomial algebra element on the values.

    Adjoint values get [ξ, ·], rep values get ρ(ξ), scalars are unchanged.
    """
    if form.kind == "scalar":
        return form
    xi = [as_poly(c, form.m) for c in xi]
    mats = form.algebra.ad_matrices if form.kind == "adjoint" else form.rep
    out: dict = {}
    for (I, J, v), p in form.terms.items():
        for a, xa in enumerate(xi):
            if xa.is_zero():
                continue
            col = mats[a][:, v]
            for w in np.nonzero(col)[0]:
                key = (I, J, int(w))
                val = (p * xa).scale(col[w])
                out[key] = out[key] + val if key in out else val
    return form._like(out)


# differentials


def de_rham_d(omega: Form) -> Form:
    """d acting on the polynomial coefficients, dx^μ placed in front."""
    if isinstance(omega, MixedForm):
        raise FormError("de_rham_d acts on forms in the θ basis; convert with from_mixed first")
    out: dict = {}
    for (I, J, v), p in omega.terms.items():
        for mu in range(omega.m):
            if mu in I:
                continue
            dp = p.partial(mu)
            if dp.is_zero():
                continue
            pos = sum(1 for i in I if i < mu)
            key = (tuple(sorted(I + (mu,))), J, v)
            val = -dp if pos % 2 else dp
            out[key] = out[key] + val if key in out else val
    return omega._like(out)


def _s_theta_monomial(C: np.ndarray, J: tuple) -> dict:
    """s(θ^J) as a map from inner multi-index to coefficient."""
    n = C.shape[0]
    out: dict = {}
    for k, c in enumerate(J):
        rest_before, rest_after = J[:k], J[k + 1:]
        sk = -1 if k % 2 else 1
        for a in range(n):
            for b in range(a + 1, n):
                coef = C[a, b, c]
                if coef == 0:
                    continue
                # θ^{J<k} ∧ (−C θ^a θ^b) ∧ θ^{J>k}
                s1, mid = merge_sign(rest_before, (a, b))
                if not s1:
                    continue
                s2, full = merge_sign(mid, rest_after)
                if not s2:
                    continue
                out[full] = out.get(full, 0) - sk * s1 * s2 * coef
    return {k: v for k, v in out.items() if v != 0}


def chevalley_s(omega: Form) -> Form:
    """Chevalley-Eilenberg differential with values in scalars, g or the representation.

    On generators s θ^c = −½ C^c_ab θ^a ∧ θ^b; valued forms pick up θ^a ∧ ω ⊗ ρ(E_a)v,
    so that (s v)(ξ) = [ξ, v] on adjoint 0-cochains.
    """
    if isinstance(omega, MixedForm):
        raise FormError("chevalley_s acts on forms in the θ basis; convert with from_mixed first")
    C = omega.algebra.C
    n = omega.n
    cache: dict = {}
    out: dict = {}

    def add(key, val):
        out[key] = out[key] + val if key in out else val

    for (I, J, v), p in omega.terms.items():
        if J not in cache:
            cache[J] = _s_theta_monomial(C, J)
        sI = -1 if len(I) % 2 else 1
        for J2, coef in cache[J].items():
            add((I, J2, v), p.scale(sI * coef))
    if omega.kind != "scalar":
        mats = omega.algebra.ad_matrices if omega.kind == "adjoint" else omega.rep
        for (I, J, v), p in omega.terms.items():
            sI = -1 if len(I) % 2 else 1
            for a in range(n):
                col = mats[a][:, v]
                nz = np.nonzero(col)[0]
                if not len(nz):
                    continue
                sj, J2 = merge_sign((a,), J)
                if not sj:
                    continue
                for w in nz:
                    add((I, J2, int(w)), p.scale(sI * sj * col[w]))
    return omega._like(out)


def total_d(omega: Form) -> Form:
    """d̂ = d + s. Mixed forms are converted to the θ basis and back."""
    if isinstance(omega, MixedForm):
        return to_mixed(total_d(from_mixed(omega)), omega.A)
    return de_rham_d(omega) + chevalley_s(omega)


# linear substitution of inner generators


def substitute_inner(omega: Form, M, P, value_map=None, target: type = Form, A=None) -> Form:
    """Replace each inner generator y^b by Σ_a M[b][a] z^a + Σ_μ P[b][μ] dx^μ.

    ``M`` and ``P`` hold numbers or polynomials. ``value_map`` optionally
    multiplies the value vector by a matrix of numbers or polynomials.
    """
    m, n = omega.m, omega.n
    Mp = [[as_poly(M[b][a], m) for a in range(n)] for b in range(n)]
    Pp = [[as_poly(P[b][mu], m) for mu in range(m)] for b in range(n)]
    # images of generators as dicts (I, J) -> poly, each a 1-form
    gen = []
    for b in range(n):
        img = {}
        for a in range(n):
            if not Mp[b][a].is_zero():
                img[((), (a,))] = Mp[b][a]
        for mu in range(m):
            if not Pp[b][mu].is_zero():
                img[((mu,), ())] = Pp[b][mu]
        gen.append(img)

    cache: dict = {(): {((), ()): Polynomial.constant(m, 1.0)}}

    def image(J):
        if J in cache:
            return cache[J]
        prev = image(J[:-1])
        last = gen[J[-1]]
        res: dict = {}
        for (I1, J1), p in prev.items():
            for (I2, J2), q in last.items():
                ks = _product_key(I1, J1, I2, J2)
                if ks is None:
                    continue
                sign, I, JJ = ks
                val = p * q if sign > 0 else -(p * q)
                res[(I, JJ)] = res[(I, JJ)] + val if (I, JJ) in res else val
        cache[J] = {k: v for k, v in res.items() if not v.is_zero()}
        return cache[J]

    if value_map is not None:
        vd = omega.value_dim
        Vp = [[as_poly(value_map[w][v], m) for v in range(vd)] for w in range(vd)]
    out: dict = {}
    for (I, J, v), p in omega.terms.items():
        for (I2, J2), q in image(J).items():
            si, II = merge_sign(I, I2)
            if not si:
                continue
            base = p * q if si > 0 else -(p * q)
            if value_map is None:
                targets = ((v, base),)
            else:
                targets = ((w, base * Vp[w][v]) for w in range(vd) if not Vp[w][v].is_zero())
            for w, val in targets:
                key = (II, J2, w)
                out[key] = out[key] + val if key in out else val
    if target is MixedForm:
        return MixedForm._raw(omega, out, A=A)
    return Form._raw(omega, out)


def _identity_minus(n):
    return [[-1.0 if a == b else 0.0 for a in range(n)] for b in range(n)]


def to_mixed(omega: Form, A: SpatialOneForm) -> MixedForm:
    """Rewrite a θ-basis form in the mixed basis via θ^a = A^a − q^a."""
    if isinstance(omega, MixedForm):
        raise FormError("form is already in a mixed basis")
    if A.n != omega.n or A.m != omega.m:
        raise FormError(f"background connection has shape {A.n}x{A.m}, expected {omega.n}x{omega.m}")
    return substitute_inner(omega, _identity_minus(omega.n), A.comps, target=MixedForm, A=A)


def from_mixed(omega: MixedForm) -> Form:
    """Rewrite a mixed-basis form in the θ basis via q^a = A^a − θ^a."""
    if not isinstance(omega, MixedForm):
        raise FormError("from_mixed expects a MixedForm")
    return substitute_inner(omega, _identity_minus(omega.n), omega.A.comps, target=Form)


def mixed(algebra: LieAlgebra, m: int, A: SpatialOneForm, kind: str = "scalar", terms=None, rep=None) -> MixedForm:
    return MixedForm(algebra, m, A, kind, terms, rep)


# evaluation on vectors


def evaluate_form(omega: Form, x, vectors: Sequence) -> np.ndarray:
    vecs = np.array(vectors, dtype=complex).reshape(len(vectors), -1) if len(vectors) else np.zeros((0, omega.m + omega.n))
    p = len(vecs)
    if vecs.shape[1] != omega.m + omega.n:
        raise FormError(f"vectors must have length m + n = {omega.m + omega.n}")
    out = np.zeros(omega.value_dim, dtype=complex)
    for (I, J, v), f in omega.terms.items():
        if len(I) + len(J) != p:
            continue
        cols = list(I) + [omega.m + j for j in J]
        val = np.linalg.det(vecs[:, cols].T) if p else 1.0
        out[v] += f(x) * val
    return out


# serialization


def form_from_dict(d: Mapping, algebra: LieAlgebra, m: int | None = None, rep=None,
                   A: SpatialOneForm | None = None) -> Form:
    kind = d.get("value_kind", "scalar")
    m = int(d.get("m", m if m is not None else 0))
    terms = {}
    for t in d.get("terms", []):
        I = tuple(sorted(int(i) - 1 for i in t.get("dx", [])))
        J = tuple(sorted(int(j) - 1 for j in t.get("theta", [])))
        sign = permutation_sign([int(i) for i in t.get("dx", [])]) * permutation_sign([int(j) for j in t.get("theta", [])])
        if sign == 0:
            continue
        vals = t.get("value", [])
        if kind == "scalar" and vals and not isinstance(vals[0], list):
            vals = [vals]
        for v, rec in enumerate(vals):
            p = as_poly(rec, m)
            if sign < 0:
                p = -p
            if not p.is_zero():
                key = (I, J, v)
                terms[key] = terms[key] + p if key in terms else p
    if A is not None:
        return MixedForm(algebra, m, A, kind, terms, rep)
    return Form(algebra, m, kind, terms, rep)


# random corpora


def random_form(algebra: LieAlgebra, m: int, rng: np.random.Generator, kind: str = "scalar",
                max_r: int | None = None, max_s: int | None = None, max_degree: int = 3,
                density: float = 0.5, bidegrees: Iterable | None = None,
                complex_coeffs: bool = False, rep=None) -> Form:
    """Random form whose components are random polynomials of bounded degree."""
    n = algebra.dim
    max_r = m if max_r is None else min(max_r, m)
    max_s = n if max_s is None else min(max_s, n)
    allowed = None if bidegrees is None else {tuple(b) for b in bidegrees}
    proto = Form(algebra, m, kind, rep=rep)
    vd = proto.value_dim
    terms = {}
    for r in range(max_r + 1):
        for s in range(max_s + 1):
            if allowed is not None and (r, s) not in allowed:
                continue
            for I in itertools.combinations(range(m), r):
                for J in itertools.combinations(range(n), s):
                    for v in range(vd):
                        if rng.random() < density:
                            p = random_polynomial(m, max_degree, rng, 0.5, complex_coeffs)
                            if not p.is_zero():
                                terms[(I, J, v)] = p
    return Form(algebra, m, kind, terms, proto.rep)


def random_one_form(n: int, m: int, rng: np.random.Generator, max_degree: int = 2,
                    density: float = 0.6, complex_coeffs: bool = False) -> SpatialOneForm:
    return SpatialOneForm([[random_polynomial(m, max_degree, rng, density, complex_coeffs)
                            for _ in range(m)] for _ in range(n)], m)


def top_inner(n: int) -> tuple:
    return tuple(range(n))
