"""Project configuration: loading, validation and canonical re-emission.

Configs are JSON, or YAML for ``.yaml``/``.yml`` files. Polynomials may be
written as numbers, ``[re, im]`` pairs, record lists
``[{exponents, coeff}]``, or arithmetic strings in ``x1 … xm`` such as
``"2*x1*x2 - 0.5j"``. Chart, index and matrix conventions are 1-based in
files where they refer to basis elements.
"""

from __future__ import annotations

import ast
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .forms import Form, SpatialOneForm, form_from_dict
from .gluing import Atlas, GluingError, Transition, TransitionData, atiyah_transitions
from .liealg import LieAlgebra, LieAlgebraError, from_config as algebra_from_config, killing_form
from .metric import InnerMetric, MetricError, MetricTriple
from .symcore import ChartBox, Polynomial, as_poly

DEFAULT_TOLERANCE = 1e-9
DEFAULT_LATTICE = 5
DEFAULT_SEED = 0


class ConfigError(ValueError):
    """Schema errors, each prefixed with the path of the offending key."""

    def __init__(self, errors):
        self.errors = list(errors) if not isinstance(errors, str) else [errors]
        super().__init__("; ".join(self.errors))


# polynomial expressions


_BINOPS = {ast.Add: lambda a, b: a + b, ast.Sub: lambda a, b: a - b, ast.Mult: lambda a, b: a * b}


def parse_poly_expr(text: str, m: int) -> Polynomial:
    """Parse ``+ - * **`` expressions in x1..xm with numeric (possibly complex) constants."""
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"cannot parse polynomial {text!r}: {exc.msg}") from None

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float, complex)):
            return Polynomial.constant(m, node.value)
        if isinstance(node, ast.Name):
            name = node.id
            if name.startswith("x") and name[1:].isdigit():
                k = int(name[1:])
                if 1 <= k <= m:
                    return Polynomial.variable(m, k - 1)
            raise ValueError(f"unknown variable {name!r} (expected x1..x{m})")
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            if type(node.op) in _BINOPS:
                return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
            if isinstance(node.op, ast.Pow) and isinstance(node.right, ast.Constant) \
                    and isinstance(node.right.value, int) and node.right.value >= 0:
                return ev(node.left) ** node.right.value
            if isinstance(node.op, ast.Div) and isinstance(node.right, ast.Constant):
                return ev(node.left).scale(1.0 / node.right.value)
        raise ValueError(f"unsupported syntax in polynomial {text!r}")

    return ev(tree)


def to_poly(value, m: int) -> Polynomial:
    if isinstance(value, str):
        return parse_poly_expr(value, m)
    return as_poly(value, m)


def to_complex(value) -> complex:
    if isinstance(value, (list, tuple)):
        return complex(value[0], value[1] if len(value) > 1 else 0.0)
    if isinstance(value, str):
        return complex(value.replace(" ", ""))
    return complex(value)


def to_matrix(rows) -> np.ndarray:
    M = np.array([[to_complex(v) for v in row] for row in rows], dtype=complex)
    return M.real if np.allclose(M.imag, 0) else M


def poly_table(rows, m: int) -> list:
    return [[to_poly(v, m) for v in row] for row in rows]


def _box(d) -> ChartBox:
    if isinstance(d, dict):
        return ChartBox(tuple(d["lower"]), tuple(d["upper"]))
    lo, hi = d
    return ChartBox(tuple(lo), tuple(hi))


def _box_dict(b: ChartBox) -> dict:
    return {"lower": list(b.lower), "upper": list(b.upper)}


def _poly_out(p: Polynomial):
    return p.to_records()


def _complex_out(z):
    z = complex(z)
    return z.real if z.imag == 0 else [z.real, z.imag]


# project config


@dataclass
class ProjectConfig:
    raw: dict
    algebra: LieAlgebra
    m: int
    atlas: Atlas | None = None
    transitions: TransitionData | None = None
    metric: MetricTriple | None = None
    connection: dict | None = None
    matter: dict | None = None
    forms: dict = field(default_factory=dict)
    box: ChartBox | None = None
    tolerance: float = DEFAULT_TOLERANCE
    lattice: int = DEFAULT_LATTICE
    seed: int = DEFAULT_SEED
    options: dict = field(default_factory=dict)

    def require(self, *sections: str):
        missing = [s for s in sections if getattr(self, s, None) in (None, {})]
        if missing:
            raise ConfigError([f"{s}: section required by this command" for s in missing])

    def to_dict(self) -> dict:
        """Canonical form: every polynomial as records, every matrix explicit."""
        out: dict = {"algebra": self.algebra.to_config(), "base_dim": self.m,
                     "tolerance": self.tolerance, "lattice": self.lattice, "seed": self.seed}
        if self.atlas is not None:
            out["atlas"] = {
                "charts": {str(k): _box_dict(b) for k, b in self.atlas.charts.items()},
                "overlaps": [{"pair": [str(i), str(j)], "box": _box_dict(b)}
                             for (i, j), b in sorted(self.atlas.overlaps.items(), key=str)],
            }
            if self.transitions is not None:
                out["atlas"]["transitions"] = [
                    {"pair": [str(i), str(j)],
                     "G": [[_poly_out(p) for p in row] for row in t.G],
                     "chi": t.chi.to_records()}
                    for (i, j), t in sorted(self.transitions.transitions.items(), key=str)
                ]
        if self.metric is not None:
            out["metric"] = {
                "g": [[_complex_out(v) for v in row] for row in self.metric.g],
                "h": [[_complex_out(v) for v in row] for row in self.metric.h.h],
                "A_dot": self.metric.A_dot.to_records(),
            }
        if self.connection is not None:
            out["connection"] = {
                "A_hat": self.connection["A_hat"].to_records(),
                "tau": [[_poly_out(p) for p in row] for row in self.connection["tau"]],
            }
        if self.matter is not None:
            out["matter"] = {
                "phi": [_poly_out(p) for p in self.matter["phi"]],
                "rep": [[[_complex_out(v) for v in row] for row in R] for R in self.matter["rep"]],
                "h_E": [[_complex_out(v) for v in row] for row in self.matter["h_E"]],
                "pairing_kind": self.matter["pairing_kind"],
            }
        if self.forms:
            out["forms"] = {k: v.to_dict() for k, v in self.forms.items()}
        if self.box is not None:
            out["box"] = _box_dict(self.box)
        if self.options:
            out["options"] = dict(self.options)
        return out


def load_file(path) -> dict:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError([f"{path}: cannot read file ({exc.strerror})"]) from None
    try:
        if p.suffix.lower() in (".yaml", ".yml"):
            data = yaml.safe_load(text)
        else:
            data = json.loads(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise ConfigError([f"{path}: not valid structured text ({exc})"]) from None
    if not isinstance(data, dict):
        raise ConfigError([f"{path}: top level must be a mapping"])
    return data


def parse_config(source) -> ProjectConfig:
    """Load and validate a config from a path or an already parsed mapping."""
    raw = source if isinstance(source, dict) else load_file(source)
    errors: list[str] = []

    def guard(path, fn, *args):
        try:
            return fn(*args)
        except ConfigError as exc:
            errors.extend(f"{path}.{e}" for e in exc.errors)
        except (LieAlgebraError, GluingError, MetricError, ValueError, KeyError, TypeError, IndexError) as exc:
            msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
            errors.append(f"{path}: {'missing key ' if isinstance(exc, KeyError) else ''}{msg}")
        return None

    if "algebra" not in raw:
        raise ConfigError(["algebra: missing section"])
    L = guard("algebra", algebra_from_config, raw["algebra"])
    if L is None:
        raise ConfigError(errors)
    m = raw.get("base_dim")
    if m is None:
        m = _infer_base_dim(raw)
    if not isinstance(m, int) or m < 1:
        raise ConfigError([f"base_dim: expected a positive integer, got {m!r}"])
    n = L.dim
    opts = raw.get("options", {}) or {}
    cfg = ProjectConfig(raw=raw, algebra=L, m=m,
                        tolerance=float(raw.get("tolerance", opts.get("tolerance", DEFAULT_TOLERANCE))),
                        lattice=int(raw.get("lattice", opts.get("lattice", DEFAULT_LATTICE))),
                        seed=int(raw.get("seed", opts.get("seed", DEFAULT_SEED))),
                        options={k: v for k, v in opts.items() if k not in ("tolerance", "lattice", "seed")})

    if "atlas" in raw:
        res = guard("atlas", _parse_atlas, raw["atlas"], L, m)
        if res is not None:
            cfg.atlas, cfg.transitions = res
    if "metric" in raw:
        cfg.metric = guard("metric", _parse_metric, raw["metric"], L, m)
    if "connection" in raw:
        cfg.connection = guard("connection", _parse_connection, raw["connection"], n, m)
    if "matter" in raw:
        cfg.matter = guard("matter", _parse_matter, raw["matter"], L, m)
    if "box" in raw:
        cfg.box = guard("box", _box, raw["box"])
        if cfg.box is not None and cfg.box.dim != m:
            errors.append(f"box: dimension {cfg.box.dim} does not match base_dim {m}")
    for name, fd in (raw.get("forms") or {}).items():
        A = None
        if fd.get("basis") == "mixed" or fd.get("mixed"):
            if cfg.metric is None:
                errors.append(f"forms.{name}: mixed-basis forms need a metric section")
                continue
            A = cfg.metric.A_dot
        f = guard(f"forms.{name}", _parse_form, fd, L, m, A)
        if f is not None:
            cfg.forms[name] = f
    if errors:
        raise ConfigError(errors)
    return cfg


def _infer_base_dim(raw) -> int | None:
    atlas = raw.get("atlas") or {}
    for c in (atlas.get("charts") or {}).values():
        return len(c["lower"] if isinstance(c, dict) else c[0])
    metric = raw.get("metric") or {}
    if "g" in metric:
        return len(metric["g"])
    if "box" in raw:
        b = raw["box"]
        return len(b["lower"] if isinstance(b, dict) else b[0])
    return None


def _parse_form(fd: dict, L: LieAlgebra, m: int, A) -> Form:
    terms = []
    for t in fd.get("terms", []):
        vals = t.get("value", [])
        conv = [to_poly(v, m).to_records() for v in vals] if isinstance(vals, list) else [to_poly(vals, m).to_records()]
        terms.append({**t, "value": conv})
    d = {"value_kind": fd.get("value_kind", "scalar"), "m": m, "terms": terms}
    return form_from_dict(d, L, m, A=A)


def _parse_atlas(d: dict, L: LieAlgebra, m: int):
    errors = []
    charts = {}
    for k, b in (d.get("charts") or {}).items():
        try:
            charts[str(k)] = _box(b)
        except (ValueError, KeyError, TypeError) as exc:
            errors.append(f"charts.{k}: {exc}")
    if not charts:
        errors.append("charts: at least one chart is required")
    overlaps = {}
    for idx, o in enumerate(d.get("overlaps") or []):
        pair = tuple(str(p) for p in o.get("pair", ()))
        if len(pair) != 2:
            errors.append(f"overlaps[{idx}].pair: expected two chart ids")
            continue
        for p in pair:
            if p not in charts:
                errors.append(f"overlaps[{idx}].pair: unknown chart {p!r}")
        box = _box(o["box"]) if "box" in o else None
        overlaps[pair] = box
        if o.get("symmetric", True) and pair[::-1] not in overlaps:
            overlaps[pair[::-1]] = box
    if errors:
        raise ConfigError(errors)
    for b in charts.values():
        if b.dim != m:
            raise ConfigError([f"charts: chart dimension {b.dim} does not match base_dim {m}"])
    atlas = Atlas(L, charts, overlaps)
    data = None
    if "transitions" in d:
        trans = {}
        for idx, t in enumerate(d["transitions"]):
            pair = tuple(str(p) for p in t["pair"])
            if pair not in atlas.overlaps:
                raise ConfigError([f"transitions[{idx}].pair: overlap {pair} is not registered"])
            trans[pair] = Transition(poly_table(t["G"], m), SpatialOneForm(poly_table(t["chi"], m), m))
        for (i, j) in atlas.overlaps:
            if (i, j) not in trans and (j, i) in trans:
                raise ConfigError([f"transitions: missing reverse direction ({i}, {j})"])
        data = TransitionData(atlas, trans)
    elif "group_cocycle" in d:
        coc = {}
        for t in d["group_cocycle"]:
            pair = tuple(str(p) for p in t["pair"])
            coc[pair] = (poly_table(t["g"], m), poly_table(t["g_inv"], m))
        data = atiyah_transitions(atlas, coc)
    elif d.get("identity", False) or not overlaps:
        from .gluing import identity_transitions
        data = identity_transitions(atlas)
    return atlas, data


def _parse_metric(d: dict, L: LieAlgebra, m: int) -> MetricTriple:
    n = L.dim
    if "g" not in d:
        raise ConfigError(["g: missing key"])
    g = to_matrix(d["g"])
    if g.shape != (m, m):
        raise ConfigError([f"g: expected {m}x{m}, got {g.shape}"])
    h = d.get("h", "killing")
    if isinstance(h, str):
        if h.lower() != "killing":
            raise ConfigError([f"h: unknown keyword {h!r}"])
        k = killing_form(L)
        if abs(np.linalg.det(k)) <= 1e-9:
            raise ConfigError([f"h: Killing form of {L.name} is degenerate"])
        h = k.real if np.allclose(k.imag, 0) else k
    else:
        h = to_matrix(h)
    if np.shape(h) != (n, n):
        raise ConfigError([f"h: expected {n}x{n}, got {np.shape(h)}"])
    if abs(np.linalg.det(g)) <= 1e-9:
        raise ConfigError(["g: base metric is degenerate"])
    A = SpatialOneForm(poly_table(d["A_dot"], m), m) if "A_dot" in d else SpatialOneForm.zero(n, m)
    if (A.n, A.m) != (n, m):
        raise ConfigError([f"A_dot: expected {n}x{m} table, got {A.n}x{A.m}"])
    return MetricTriple(g, InnerMetric(h), A)


def _parse_connection(d: dict, n: int, m: int) -> dict:
    A_hat = SpatialOneForm(poly_table(d["A_hat"], m), m) if "A_hat" in d else SpatialOneForm.zero(n, m)
    if (A_hat.n, A_hat.m) != (n, m):
        raise ConfigError([f"A_hat: expected {n}x{m} table"])
    tau = d.get("tau", 0)
    if isinstance(tau, (int, float, str)) and not isinstance(tau, str) or tau in ("identity", "zero"):
        c = {"identity": 1.0, "zero": 0.0}.get(tau, tau)
        tau = [[c if a == b else 0 for a in range(n)] for b in range(n)]
    tau = poly_table(tau, m)
    if len(tau) != n or any(len(r) != n for r in tau):
        raise ConfigError([f"tau: expected {n}x{n} table"])
    return {"A_hat": A_hat, "tau": tau}


def _parse_matter(d: dict, L: LieAlgebra, m: int) -> dict:
    rep = d.get("rep", "realization")
    if isinstance(rep, str):
        if L.matrix_realization is None:
            raise ConfigError(["rep: algebra has no matrix realization"])
        rep = np.array(L.matrix_realization)
    else:
        rep = np.array([to_matrix(R) for R in rep], dtype=complex)
    if rep.ndim != 3 or rep.shape[0] != L.dim:
        raise ConfigError([f"rep: expected {L.dim} square matrices"])
    k = rep.shape[1]
    phi = [to_poly(p, m) for p in d.get("phi", [0] * k)]
    if len(phi) != k:
        raise ConfigError([f"phi: expected {k} components"])
    h_E = to_matrix(d.get("h_E", np.eye(k).tolist()))
    if h_E.shape != (k, k):
        raise ConfigError([f"h_E: expected {k}x{k}"])
    kind = d.get("pairing_kind", "sesquilinear")
    if kind not in ("sesquilinear", "bilinear"):
        raise ConfigError([f"pairing_kind: expected sesquilinear or bilinear, got {kind!r}"])
    return {"phi": phi, "rep": rep, "h_E": h_E, "pairing_kind": kind}
