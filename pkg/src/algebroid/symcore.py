"""Sparse multivariate polynomials with complex coefficients, and box integration.

Polynomials are the coefficient ring for every form in the package. Spatial
dependence is kept polynomial so that partial derivatives are exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

PRUNE_TOL = 1e-14


def _prune(terms: dict) -> dict:
    return {e: c for e, c in terms.items() if abs(c.real) + abs(c.imag) >= PRUNE_TOL}


class Polynomial:
    """Immutable sparse polynomial in ``num_vars`` chart coordinates.

    ``terms`` maps exponent tuples to complex coefficients.
    """

    __slots__ = ("num_vars", "terms", "_arrays")

    def __init__(self, num_vars: int, terms: Mapping[tuple, complex] | None = None):
        self.num_vars = int(num_vars)
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(int(k) for k in e)
            if len(e) != self.num_vars:
                raise ValueError(f"exponent {e} has length {len(e)}, expected {self.num_vars}")
            if any(k < 0 for k in e):
                raise ValueError(f"negative exponent in {e}")
            clean[e] = clean.get(e, 0j) + complex(c)
        self.terms = _prune(clean)
        self._arrays = None

    @classmethod
    def _raw(cls, num_vars: int, terms: dict) -> "Polynomial":
        # trusted constructor: keys already valid tuples
        p = object.__new__(cls)
        p.num_vars = num_vars
        p.terms = _prune(terms)
        p._arrays = None
        return p

    # constructors

    @classmethod
    def zero(cls, num_vars: int) -> "Polynomial":
        return cls._raw(num_vars, {})

    @classmethod
    def constant(cls, num_vars: int, c: complex) -> "Polynomial":
        return cls._raw(num_vars, {(0,) * num_vars: complex(c)})

    @classmethod
    def variable(cls, num_vars: int, mu: int) -> "Polynomial":
        if not 0 <= mu < num_vars:
            raise IndexError(f"coordinate index {mu} out of range for {num_vars} variables")
        e = [0] * num_vars
        e[mu] = 1
        return cls._raw(num_vars, {tuple(e): 1.0 + 0j})

    @classmethod
    def monomial(cls, exponents: Sequence[int], c: complex = 1.0) -> "Polynomial":
        return cls(len(exponents), {tuple(exponents): c})

    # inspection

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self.terms)

    def constant_term(self) -> complex:
        return self.terms.get((0,) * self.num_vars, 0j)

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def max_abs(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def __repr__(self) -> str:
        if not self.terms:
            return "Polynomial(0)"
        parts = []
        for e, c in sorted(self.terms.items()):
            mono = "*".join(f"x{i + 1}^{k}" if k > 1 else f"x{i + 1}" for i, k in enumerate(e) if k)
            parts.append(f"({c:.6g})" + (f"*{mono}" if mono else ""))
        return "Polynomial(" + " + ".join(parts) + ")"

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self.num_vars == other.num_vars and self.terms == other.terms
        if isinstance(other, (int, float, complex)):
            return self == Polynomial.constant(self.num_vars, other) if other else not self.terms
        return NotImplemented

    def __hash__(self):
        return hash((self.num_vars, frozenset(self.terms.items())))

    # arithmetic

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.num_vars != self.num_vars:
                raise ValueError(f"dimension mismatch: {self.num_vars} vs {other.num_vars} variables")
            return other
        if isinstance(other, (int, float, complex, np.number)):
            return Polynomial.constant(self.num_vars, complex(other))
        raise TypeError(f"cannot combine Polynomial with {type(other).__name__}")

    def __add__(self, other) -> "Polynomial":
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0j) + c
        return Polynomial._raw(self.num_vars, out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial._raw(self.num_vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "Polynomial":
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0j) - c
        return Polynomial._raw(self.num_vars, out)

    def __rsub__(self, other) -> "Polynomial":
        return (-self) + other

    def scale(self, c: complex) -> "Polynomial":
        c = complex(c)
        if c == 0:
            return Polynomial._raw(self.num_vars, {})
        return Polynomial._raw(self.num_vars, {e: v * c for e, v in self.terms.items()})

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, (int, float, complex, np.number)):
            return self.scale(other)
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0j) + c1 * c2
        return Polynomial._raw(self.num_vars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Polynomial":
        out = Polynomial.constant(self.num_vars, 1.0)
        for _ in range(int(k)):
            out = out * self
        return out

    def conj(self) -> "Polynomial":
        return Polynomial._raw(self.num_vars, {e: c.conjugate() for e, c in self.terms.items()})

    # calculus

    def partial(self, mu: int) -> "Polynomial":
        return poly_partial(self, mu)

    def integrate_box(self, box: "ChartBox") -> complex:
        return poly_integrate_box(self, box)

    # evaluation

    def _as_arrays(self):
        if self._arrays is None:
            if self.terms:
                exps = np.array(list(self.terms.keys()), dtype=np.int64)
                coeffs = np.array(list(self.terms.values()), dtype=complex)
            else:
                exps = np.zeros((0, self.num_vars), dtype=np.int64)
                coeffs = np.zeros(0, dtype=complex)
            self._arrays = (exps, coeffs)
        return self._arrays

    def __call__(self, points) -> np.ndarray | complex:
        """Evaluate at one point (shape ``(m,)``) or many (shape ``(k, m)``)."""
        pts = np.asarray(points, dtype=float)
        single = pts.ndim == 1
        pts = np.atleast_2d(pts)
        if pts.shape[1] != self.num_vars:
            raise ValueError(f"points have {pts.shape[1]} coordinates, expected {self.num_vars}")
        exps, coeffs = self._as_arrays()
        if not len(coeffs):
            vals = np.zeros(len(pts), dtype=complex)
        else:
            mono = np.prod(pts[:, None, :] ** exps[None, :, :], axis=2)
            vals = mono @ coeffs
        return complex(vals[0]) if single else vals

    # serialization

    def to_records(self) -> list[dict]:
        return [
            {"exponents": list(e), "coeff": [c.real, c.imag]}
            for e, c in sorted(self.terms.items())
        ]

    @classmethod
    def from_records(cls, num_vars: int, records: Iterable[Mapping]) -> "Polynomial":
        terms: dict = {}
        for rec in records:
            e = tuple(rec["exponents"])
            c = rec["coeff"]
            if isinstance(c, (list, tuple)):
                c = complex(c[0], c[1] if len(c) > 1 else 0.0)
            terms[e] = terms.get(e, 0j) + complex(c)
        return cls(num_vars, terms)


@dataclass(frozen=True)
class ChartBox:
    """Axis-aligned box ``prod [lower[mu], upper[mu]]`` standing for a chart domain."""

    lower: tuple
    upper: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lower)
        hi = tuple(float(v) for v in self.upper)
        if len(lo) != len(hi):
            raise ValueError("lower and upper bounds differ in length")
        if any(a >= b for a, b in zip(lo, hi)):
            raise ValueError(f"empty box: lower {lo} must be < upper {hi}")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dim(self) -> int:
        return len(self.lower)

    @classmethod
    def unit(cls, dim: int) -> "ChartBox":
        return cls((0.0,) * dim, (1.0,) * dim)

    def volume(self) -> float:
        return float(np.prod(np.subtract(self.upper, self.lower)))

    def contains(self, other: "ChartBox", tol: float = 1e-12) -> bool:
        return all(
            a - tol <= c and d <= b + tol
            for a, b, c, d in zip(self.lower, self.upper, other.lower, other.upper)
        )

    def intersect(self, other: "ChartBox") -> "ChartBox | None":
        lo = tuple(max(a, c) for a, c in zip(self.lower, other.lower))
        hi = tuple(min(b, d) for b, d in zip(self.upper, other.upper))
        if any(a >= b for a, b in zip(lo, hi)):
            return None
        return ChartBox(lo, hi)

    def lattice(self, per_axis: int = 5) -> np.ndarray:
        """Deterministic sample grid with ``per_axis`` points per coordinate, shape ``(per_axis**dim, dim)``."""
        axes = [np.linspace(a, b, per_axis) for a, b in zip(self.lower, self.upper)]
        grid = np.meshgrid(*axes, indexing="ij")
        return np.stack([g.ravel() for g in grid], axis=1)


def poly_mul(p: Polynomial, q: Polynomial) -> Polynomial:
    if p.num_vars != q.num_vars:
        raise ValueError(f"dimension mismatch: {p.num_vars} vs {q.num_vars} variables")
    return p * q


def poly_partial(p: Polynomial, mu: int) -> Polynomial:
    if not 0 <= mu < p.num_vars:
        raise IndexError(f"coordinate index {mu} out of range for {p.num_vars} variables")
    out: dict = {}
    for e, c in p.terms.items():
        k = e[mu]
        if k == 0:
            continue
        e2 = e[:mu] + (k - 1,) + e[mu + 1:]
        out[e2] = out.get(e2, 0j) + c * k
    return Polynomial._raw(p.num_vars, out)


def poly_integrate_box(p: Polynomial, box: ChartBox) -> complex:
    """Exact integral of ``p`` over ``box`` via monomial antiderivatives."""
    if box.dim != p.num_vars:
        raise ValueError(f"box has dimension {box.dim}, polynomial has {p.num_vars} variables")
    total = 0j
    for e, c in p.terms.items():
        f = 1.0
        for k, a, b in zip(e, box.lower, box.upper):
            f *= (b ** (k + 1) - a ** (k + 1)) / (k + 1)
        total += c * f
    return total


def coordinates(num_vars: int) -> list[Polynomial]:
    """The coordinate functions ``x^1 .. x^m``."""
    return [Polynomial.variable(num_vars, mu) for mu in range(num_vars)]


def as_poly(value, num_vars: int) -> Polynomial:
    """Coerce numbers, record lists or polynomials to a :class:`Polynomial`."""
    if isinstance(value, Polynomial):
        if value.num_vars != num_vars:
            raise ValueError(f"dimension mismatch: {value.num_vars} vs {num_vars} variables")
        return value
    if isinstance(value, (int, float, complex, np.number)):
        return Polynomial.constant(num_vars, complex(value))
    if isinstance(value, (list, tuple)) and len(value) == 2 and all(
        isinstance(v, (int, float)) for v in value
    ):
        return Polynomial.constant(num_vars, complex(value[0], value[1]))
    if isinstance(value, (list, tuple)):
        return Polynomial.from_records(num_vars, value)
    raise TypeError(f"cannot interpret {value!r} as a polynomial")


def random_polynomial(num_vars: int, max_degree: int, rng: np.random.Generator,
                      density: float = 0.6, complex_coeffs: bool = False) -> Polynomial:
    """Random polynomial with integer-free uniform coefficients in [-1, 1]."""
    terms = {}
    for e in _exponents_up_to(num_vars, max_degree):
        if rng.random() < density:
            c = rng.uniform(-1, 1)
            if complex_coeffs:
                c = complex(c, rng.uniform(-1, 1))
            terms[e] = c
    return Polynomial(num_vars, terms)


def _exponents_up_to(num_vars: int, max_degree: int):
    if num_vars == 0:
        yield ()
        return
    for k in range(max_degree + 1):
        for rest in _exponents_up_to(num_vars - 1, max_degree - k):
            yield (k,) + rest


# matrices of polynomials, stored as nested lists


def poly_matrix(rows, num_vars: int) -> list[list[Polynomial]]:
    return [[as_poly(v, num_vars) for v in row] for row in rows]


def poly_identity(size: int, num_vars: int) -> list[list[Polynomial]]:
    return [[Polynomial.constant(num_vars, 1.0 if i == j else 0.0) for j in range(size)] for i in range(size)]


def poly_matmul(A, B) -> list[list[Polynomial]]:
    """Product of two matrices whose entries are polynomials or numbers."""
    inner = len(B)
    if any(len(row) != inner for row in A):
        raise ValueError("inner dimensions do not match")
    out = []
    for row in A:
        new = []
        for j in range(len(B[0])):
            acc = None
            for k in range(inner):
                a, b = row[k], B[k][j]
                if isinstance(a, Polynomial) and a.is_zero() or isinstance(b, Polynomial) and b.is_zero():
                    continue
                t = a * b
                acc = t if acc is None else acc + t
            new.append(acc)
        out.append(new)
    m = _matrix_vars(A, B)
    return [[as_poly(0 if v is None else v, m) for v in row] for row in out]


def _matrix_vars(*mats) -> int:
    for M in mats:
        for row in M:
            for v in row:
                if isinstance(v, Polynomial):
                    return v.num_vars
    raise ValueError("cannot infer the number of variables from numeric matrices")


def poly_matrix_partial(M, mu: int) -> list[list[Polynomial]]:
    return [[p.partial(mu) for p in row] for row in M]


def poly_matrix_eval(M, points) -> np.ndarray:
    """Evaluate a polynomial matrix at points of shape ``(k, m)``; returns ``(k, rows, cols)``."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    rows = [[(p(pts) if isinstance(p, Polynomial) else np.full(len(pts), complex(p))) for p in row] for row in M]
    return np.moveaxis(np.array(rows, dtype=complex), 2, 0)


def poly_matrix_to_records(M) -> list:
    return [[p.to_records() for p in row] for row in M]
