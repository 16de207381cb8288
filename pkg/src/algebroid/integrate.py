"""Inner integration, the volume form, integration over a chart, and the
commutation of inner integration with the differential.

Sign conventions for the volume form and the θ/q coefficient identification
live here and nowhere else:

* ω_{h,q} = (−1)^n √|h| q^1 ∧ … ∧ q^n;
* the inner integral of ω is the factor of √|h| θ^1 ∧ … ∧ θ^n, equivalently
  (−1)^n times the factor of √|h| q^1 ∧ … ∧ q^n;
* the ε section pairs by ⟨E_1 ∧ … ∧ E_n, q^1 ∧ … ∧ q^n⟩ = 1.

√|h| is folded into the coefficients rather than carried as a separate factor.
"""

from __future__ import annotations

import numpy as np

from .forms import Form, FormError, MixedForm, SpatialOneForm, de_rham_d, from_mixed, total_d, wedge
from .liealg import LieAlgebra, adjoint_traces
from .metric import InnerMetric, MetricTriple
from .report import Report
from .symcore import ChartBox, Polynomial, as_poly

DEFAULT_TOL = 1e-9


def _inner_metric(h) -> InnerMetric:
    if isinstance(h, MetricTriple):
        return h.h
    if isinstance(h, InnerMetric):
        return h
    return InnerMetric(h)


def volume_form(h, A: SpatialOneForm, algebra: LieAlgebra) -> MixedForm:
    """ω_{h,q} = (−1)^n √|h| q^1 ∧ … ∧ q^n in the mixed basis of ``A``."""
    h = _inner_metric(h)
    n = algebra.dim
    return MixedForm(algebra, A.m, A, "scalar", {((), tuple(range(n)), 0): (-1) ** n * h.sqrt_abs_det})


def epsilon_section(h) -> complex:
    """Coefficient of E_1 ∧ … ∧ E_n in ε = (−1)^n √|h|^{-1} E_1 ∧ … ∧ E_n."""
    h = _inner_metric(h)
    return (-1) ** h.n / h.sqrt_abs_det


def contract_epsilon(omega: Form, h) -> Form:
    """i_ε ω using ⟨E_1 ∧ … ∧ E_n, q^1 ∧ … ∧ q^n⟩ = 1."""
    eps = epsilon_section(h)
    n = omega.n
    top = tuple(range(n))
    if isinstance(omega, MixedForm):
        terms = {(I, (), v): p.scale(eps) for (I, J, v), p in omega.terms.items() if J == top}
    else:
        # the q-top coefficient equals (−1)^n times the θ-top coefficient
        terms = {(I, (), v): p.scale(eps * (-1) ** n) for (I, J, v), p in omega.terms.items() if J == top}
    return Form._raw(omega, terms)


def inner_integrate(omega: Form, h) -> Form:
    """Factor of √|h| θ^1 ∧ … ∧ θ^n in ω, as a de Rham form on the chart.

    Terms below maximal inner degree contribute nothing. Values are kept.
    """
    h = _inner_metric(h)
    n = omega.n
    if h.n != n:
        raise FormError(f"inner metric has size {h.n}, algebra has dimension {n}")
    top = tuple(range(n))
    scale = 1.0 / h.sqrt_abs_det
    if isinstance(omega, MixedForm):
        scale *= (-1) ** n
    terms = {(I, (), v): p.scale(scale) for (I, J, v), p in omega.terms.items() if J == top}
    return Form._raw(omega, terms)


def integrate_A(omega: Form, h, box: ChartBox) -> complex:
    """∫_A ω = ∫_box ∫_inner ω for scalar-valued ω."""
    if omega.kind != "scalar":
        raise FormError("integration over the algebroid is defined for scalar-valued forms; use the trace version")
    if box.dim != omega.m:
        raise FormError(f"box has dimension {box.dim}, base has {omega.m}")
    spatial = inner_integrate(omega, h)
    return spatial.component(tuple(range(omega.m)), (), 0).integrate_box(box)


def inner_integrate_trace(omega: Form, h, algebra: LieAlgebra | None = None) -> Form:
    """tr ∘ ∫_inner for forms valued in a matrix algebra such as gl(p)."""
    if omega.kind != "adjoint":
        raise FormError("trace integration expects adjoint-valued forms")
    L = algebra or omega.algebra
    traces = L.trace_functional()
    spatial = inner_integrate(omega, h)
    out: dict = {}
    for (I, J, v), p in spatial.terms.items():
        if traces[v] == 0:
            continue
        key = (I, J, 0)
        val = p.scale(traces[v])
        out[key] = out[key] + val if key in out else val
    return Form._raw(spatial, out, "scalar")


def integrate_trace(omega: Form, h, box: ChartBox) -> complex:
    spatial = inner_integrate_trace(omega, h)
    return spatial.component(tuple(range(omega.m)), (), 0).integrate_box(box)


def _theta_basis(omega: Form) -> Form:
    return from_mixed(omega) if isinstance(omega, MixedForm) else omega


def inner_d_commutation_residual(omega: Form, h) -> Form:
    """∫_inner d̂ω − d ∫_inner ω as a spatial form."""
    w = _theta_basis(omega)
    return inner_integrate(total_d(w), h) - de_rham_d(inner_integrate(w, h))


def predicted_commutation_defect(omega: Form, h) -> Form:
    """Defect predicted from s(θ^{a_1…a_{n−1}}) = (−1)^n tr(C_{a_n}) θ^{a_1…a_n}.

    ``a_n`` is the missing index, placed last before sorting. Computed from the
    structure constants directly, without calling the differential.
    """
    w = _theta_basis(omega)
    if w.kind != "scalar":
        raise FormError("the defect formula is stated for scalar-valued forms")
    h = _inner_metric(h)
    n = w.n
    traces = adjoint_traces(w.algebra)
    out: dict = {}
    for (I, J, v), p in w.terms.items():
        if len(J) != n - 1:
            continue
        missing = next(a for a in range(n) if a not in J)
        # moving a_n from the end into place crosses the larger indices
        sort_sign = (-1) ** sum(1 for j in J if j > missing)
        # s passes the dx block with (−1)^{|I|}
        coef = (-1) ** len(I) * (-1) ** n * traces[missing] * sort_sign / h.sqrt_abs_det
        if coef == 0:
            continue
        key = (I, (), 0)
        val = p.scale(coef)
        out[key] = out[key] + val if key in out else val
    return Form._raw(w, out)


def check_inner_d_commutation(omega: Form, h, tol: float = DEFAULT_TOL) -> Report:
    """Residual of ∫_inner d̂ = d ∫_inner, and its distance from the predicted defect."""
    rep = Report("inner-d-commutation")
    res = inner_d_commutation_residual(omega, h)
    pred = predicted_commutation_defect(omega, h)
    unimodular = bool(np.allclose(adjoint_traces(omega.algebra), 0))
    if unimodular:
        rep.add("commutation", res.max_abs(), tol)
    rep.add("predicted_defect", (res - pred).max_abs(), tol)
    rep.extra.update({"unimodular": unimodular, "residual": res.max_abs(), "predicted": pred.max_abs()})
    return rep


def check_trace_commutation(omega: Form, h, tol: float = DEFAULT_TOL) -> Report:
    """Residual of ∫^tr_inner d̂ω = d ∫^tr_inner ω."""
    w = _theta_basis(omega)
    rep = Report("trace-commutation")
    res = inner_integrate_trace(total_d(w), h) - de_rham_d(inner_integrate_trace(w, h))
    rep.add("trace_commutation", res.max_abs(), tol)
    return rep


def scalar_product(omega: Form, eta: Form, h, box: ChartBox) -> complex:
    """⟨ω, η⟩ = ∫_A ω ∧ η for scalar-valued forms (bilinear, no conjugation)."""
    return integrate_A(wedge(omega, eta), h, box)


def spatial_to_function(omega: Form) -> Polynomial:
    """Coefficient of a spatial 0-form."""
    if any(I or J for I, J, _ in omega.terms):
        raise FormError("expected a function (degree-0 spatial form)")
    return omega.component((), (), 0) if omega.terms else as_poly(0, omega.m)
