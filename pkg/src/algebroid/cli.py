"""Command line entry point.

Every command loads a project config, runs the matching module-level checks
and emits a report. Exit status is 0 when every check passes, 1 when one
fails and 2 on configuration or usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np
import yaml

from . import forms as fm
from .config import ConfigError, ProjectConfig, parse_config, poly_table, to_poly
from .gauge import (GaugeError, GeneralizedConnection, MatterField, action_report, check_gauge_invariance,
                    conjugated_field_strength, curvature_consistency, curvature_decomposition, field_strength,
                    finite_gauge, induced_connection)
from .gluing import (GluingError, check_cocycles, check_inner_orientable, form_residual, transport)
from .integrate import check_inner_d_commutation, inner_integrate, integrate_A
from .liealg import jacobi_residual, adjoint_traces, realization_residual
from .metric import MetricError, h_pair, hodge_star, hodge_star_bruteforce, scalar_product_contraction
from .forms import FormError
from .report import Report
from .symcore import ChartBox, random_polynomial

COMMANDS = ("check-algebra", "check-gluing", "hodge", "integrate", "curvature", "action",
            "gauge-test", "finite-gauge")


class UsageError(Exception):
    pass


# helpers


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (complex, np.complexfloating)):
        z = complex(x)
        return z.real if z.imag == 0 else {"re": z.real, "im": z.imag}
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def _box(cfg: ProjectConfig) -> ChartBox:
    if cfg.box is not None:
        return cfg.box
    if cfg.atlas is not None and len(cfg.atlas.charts) == 1:
        return next(iter(cfg.atlas.charts.values()))
    return ChartBox.unit(cfg.m)


def _connection(cfg: ProjectConfig) -> GeneralizedConnection:
    cfg.require("connection", "metric")
    return GeneralizedConnection(cfg.algebra, cfg.connection["A_hat"], cfg.connection["tau"], cfg.metric.A_dot)


def _matter(cfg: ProjectConfig):
    if cfg.matter is None:
        return None
    d = cfg.matter
    return MatterField(d["phi"], d["rep"], d["h_E"], d["pairing_kind"] == "sesquilinear")


def _pick_form(cfg: ProjectConfig, rng, mixed: bool):
    name = cfg.options.get("form")
    if name is not None:
        if name not in cfg.forms:
            raise ConfigError([f"options.form: no form named {name!r}"])
        return name, cfg.forms[name]
    if cfg.forms:
        name = sorted(cfg.forms)[0]
        return name, cfg.forms[name]
    degree = int(cfg.options.get("degree", 1))
    kind = cfg.options.get("value_kind", "scalar")
    bideg = [(r, degree - r) for r in range(degree + 1) if r <= cfg.m and degree - r <= cfg.algebra.dim]
    w = fm.random_form(cfg.algebra, cfg.m, rng, kind, bidegrees=bideg, max_degree=2)
    if mixed:
        cfg.require("metric")
        w = fm.MixedForm(cfg.algebra, cfg.m, cfg.metric.A_dot, kind, w.terms)
    return f"random(seed={cfg.seed}, degree={degree})", w


def _xi(cfg: ProjectConfig, rng) -> list:
    if "xi" in cfg.options:
        xi = [to_poly(v, cfg.m) for v in cfg.options["xi"]]
        if len(xi) != cfg.algebra.dim:
            raise ConfigError([f"options.xi: expected {cfg.algebra.dim} components"])
        return xi
    return [random_polynomial(cfg.m, 2, rng) for _ in range(cfg.algebra.dim)]


class Context:
    def __init__(self, cfg: ProjectConfig, out: Path | None):
        self.cfg = cfg
        self.out = out
        self.rng = np.random.default_rng(cfg.seed)

    def artifact(self, rep: Report, name: str, data) -> object:
        """Write a form file when an output directory is set; otherwise return the data inline."""
        data = _jsonable(data)
        if self.out is None:
            return data
        self.out.mkdir(parents=True, exist_ok=True)
        path = self.out / f"{rep.command}_{name}.json"
        path.write_text(json.dumps(data, indent=1, sort_keys=True) + "\n")
        rep.artifacts.append(str(path))
        return str(path)


# commands


def cmd_check_algebra(ctx: Context) -> Report:
    cfg = ctx.cfg
    L = cfg.algebra
    rep = Report("check-algebra")
    rep.add("jacobi", jacobi_residual(L), cfg.tolerance)
    if L.matrix_realization is not None:
        rep.add("realization", realization_residual(L), cfg.tolerance)
    count = int(cfg.options.get("samples", 5))
    for k in range(count):
        for kind in ("scalar", "adjoint"):
            w = fm.random_form(L, cfg.m, ctx.rng, kind, max_r=2, max_s=2)
            rep.add("d_squared", fm.total_d(fm.total_d(w)).max_abs(), cfg.tolerance, f"{kind}#{k}")
    rep.extra.update({"algebra": L.name, "dim": L.dim, "unimodular": L.is_unimodular(),
                      "semisimple": L.is_semisimple(), "killing_form": L.killing_form(),
                      "adjoint_traces": adjoint_traces(L), "seed": cfg.seed})
    return rep


def cmd_check_gluing(ctx: Context) -> Report:
    cfg = ctx.cfg
    cfg.require("atlas")
    if cfg.transitions is None:
        raise ConfigError(["atlas: transitions or group_cocycle required"])
    data = cfg.transitions
    rep = check_cocycles(data, cfg.tolerance, cfg.lattice)
    rep.command = "check-gluing"
    orientable = check_inner_orientable(data, cfg.lattice, cfg.tolerance)
    rep.extra["inner_orientable"] = orientable
    # transport commutes with the differential on seeded random forms
    for key, box in sorted(data.atlas.overlaps.items(), key=str):
        w = fm.random_form(cfg.algebra, cfg.m, ctx.rng, "adjoint", max_r=1, max_s=1, max_degree=2)
        diff = transport(fm.total_d(w), data, key) - fm.total_d(transport(w, data, key))
        rep.add("transport_commutes_with_d", form_residual(diff, box.lattice(cfg.lattice)),
                cfg.tolerance, f"({key[0]},{key[1]})")
    rep.extra["seed"] = cfg.seed
    return rep


def cmd_hodge(ctx: Context) -> Report:
    cfg = ctx.cfg
    cfg.require("metric")
    t = cfg.metric
    name, w = _pick_form(cfg, ctx.rng, mixed=True)
    if not isinstance(w, fm.MixedForm):
        w = fm.to_mixed(w, t.A_dot)
    rep = Report("hodge")
    star = hodge_star(w, t)
    p = w.degree()
    m, n = t.m, t.n
    sign = (-1) ** ((m + n - p) * p)
    rep.add("bruteforce_agreement", (star - hodge_star_bruteforce(w, t)).max_abs(), cfg.tolerance)
    rep.add("involution", (hodge_star(star, t) - w.scale(sign)).max_abs(), cfg.tolerance, sign=sign)
    if w.kind != "rep":
        box = _box(cfg)
        literal = bool(cfg.options.get("literal_sign", False))
        lhs = scalar_product_contraction(w, w, t, box, literal_sign=literal)
        pair = h_pair(w, star, t.h.h) if w.kind == "adjoint" else fm.wedge(w, star)
        rhs = integrate_A(pair, t, box)
        rep.add("contraction_vs_pipeline", abs(lhs - rhs), cfg.tolerance, literal_sign=literal)
    rep.extra.update({"form": name, "degree": p, "star": ctx.artifact(rep, "star", star.to_dict()),
                      "seed": cfg.seed})
    return rep


def cmd_integrate(ctx: Context) -> Report:
    cfg = ctx.cfg
    cfg.require("metric")
    t = cfg.metric
    name, w = _pick_form(cfg, ctx.rng, mixed=False)
    rep = check_inner_d_commutation(w, t.h, cfg.tolerance)
    rep.command = "integrate"
    spatial = inner_integrate(w, t.h)
    total = integrate_A(w, t.h, _box(cfg)) if w.kind == "scalar" else None
    rep.extra.update({"form": name, "inner_integral": ctx.artifact(rep, "inner_integral", spatial.to_dict()),
                      "total": total, "seed": cfg.seed})
    return rep


def cmd_curvature(ctx: Context) -> Report:
    cfg = ctx.cfg
    c = _connection(cfg)
    cb = curvature_decomposition(c, cfg.metric)
    rep = Report("curvature")
    rep.add("assembly_consistency", curvature_consistency(c), cfg.tolerance)

    def recs(block):
        if isinstance(block, list):
            return [recs(b) for b in block]
        return block.to_records()

    blocks = {k: recs(v) for k, v in cb.blocks().items()}
    blocks["F"] = recs(cb.F)
    rep.extra["curvature"] = ctx.artifact(rep, "blocks", blocks)
    return rep


def cmd_action(ctx: Context) -> Report:
    cfg = ctx.cfg
    c = _connection(cfg)
    phi = _matter(cfg)
    rep = Report("action")
    res = action_report(phi, c, cfg.metric, _box(cfg))
    if phi is not None:
        rep.add("matter_compatibility", phi.compatibility_residual(), cfg.tolerance)
    imag = abs(complex(res["sum"]).imag)
    rep.extra.update({"terms": res["terms"], "sum": res["sum"], "omitted": res["omitted"],
                      "reality": {"imag": imag, "real_within_tolerance": imag <= cfg.tolerance}})
    return rep


def cmd_gauge_test(ctx: Context) -> Report:
    cfg = ctx.cfg
    c = _connection(cfg)
    phi = _matter(cfg)
    xi = _xi(cfg, ctx.rng)
    eps = float(cfg.options.get("eps", 1e-3))
    rep = check_gauge_invariance(c, phi, xi, cfg.metric, _box(cfg), eps)
    rep.extra.update({"eps": eps, "xi": [p.to_records() for p in xi], "seed": cfg.seed})
    return rep


def cmd_finite_gauge(ctx: Context) -> Report:
    cfg = ctx.cfg
    c = _connection(cfg)
    if "u" not in cfg.options or "u_inv" not in cfg.options:
        raise ConfigError(["options.u: finite-gauge needs options.u and options.u_inv"])
    u, u_inv = poly_table(cfg.options["u"], cfg.m), poly_table(cfg.options["u_inv"], cfg.m)
    L = cfg.algebra
    A = induced_connection(c)
    Au = finite_gauge(A, u, u_inv, L, cfg.tolerance)
    lhs = field_strength(Au, L)
    rhs = conjugated_field_strength(field_strength(A, L), u, u_inv, L)
    res = max((lhs[a][mu][nu] - rhs[a][mu][nu]).max_abs()
              for a in range(L.dim) for mu in range(cfg.m) for nu in range(cfg.m))
    rep = Report("finite-gauge")
    rep.add("field_strength_covariance", res, cfg.tolerance)
    rep.extra["A_u"] = ctx.artifact(rep, "connection", Au.to_records())
    return rep


HANDLERS = {
    "check-algebra": cmd_check_algebra,
    "check-gluing": cmd_check_gluing,
    "hodge": cmd_hodge,
    "integrate": cmd_integrate,
    "curvature": cmd_curvature,
    "action": cmd_action,
    "gauge-test": cmd_gauge_test,
    "finite-gauge": cmd_finite_gauge,
}


# output


def human_summary(rep: Report, duration: float) -> str:
    lines = [f"{rep.command}: {'PASS' if rep.passed else 'FAIL'}  ({duration:.3f} s)"]
    if rep.records:
        w = max(len(r.name) for r in rep.records)
        lw = max([len(r.location) for r in rep.records] + [8])
        lines.append(f"  {'check':<{w}}  {'location':<{lw}}  {'residual':>11}  {'threshold':>11}  result")
        for r in rep.records:
            lines.append(f"  {r.name:<{w}}  {r.location:<{lw}}  {r.residual:11.3e}  {r.threshold:11.3e}  "
                         f"{'pass' if r.passed else 'FAIL'}")
    for path in rep.artifacts:
        lines.append(f"  wrote {path}")
    return "\n".join(lines)


def machine_report(rep: Report, yaml_style: bool = False) -> str:
    data = _jsonable(rep.to_dict())
    if yaml_style:
        return yaml.safe_dump(data, sort_keys=True)
    return json.dumps(data, indent=1, sort_keys=True) + "\n"


def run(command: str, config, seed: int | None = None, tolerance: float | None = None,
        out: str | Path | None = None) -> Report:
    """Load ``config`` (path or mapping) and run one command; raises ConfigError on bad input."""
    if command not in HANDLERS:
        raise UsageError(f"unknown command {command!r}; choose from {', '.join(COMMANDS)}")
    cfg = config if isinstance(config, ProjectConfig) else parse_config(config)
    if seed is not None:
        cfg.seed = seed
    if tolerance is not None:
        cfg.tolerance = tolerance
    ctx = Context(cfg, Path(out) if out is not None else None)
    try:
        return HANDLERS[command](ctx)
    except (GluingError, MetricError, FormError, GaugeError) as exc:
        raise ConfigError([f"{command}: {exc}"]) from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="algebroid", description="Checks for transitive Lie algebroid gauge models.")
    p.add_argument("command", help=f"one of: {', '.join(COMMANDS)}")
    p.add_argument("--config", required=True, help="JSON or YAML project config")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--tolerance", type=float, help="override the config tolerance")
    p.add_argument("--out", help="directory for the report and form files")
    p.add_argument("--format", choices=("human", "machine", "both"), default="human")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    if args.command not in HANDLERS:
        parser.print_usage(sys.stderr)
        print(f"algebroid: error: unknown command {args.command!r}; choose from {', '.join(COMMANDS)}",
              file=sys.stderr)
        return 2
    start = time.perf_counter()
    try:
        rep = run(args.command, args.config, args.seed, args.tolerance, args.out)
    except ConfigError as exc:
        print("configuration error:", file=sys.stderr)
        for e in exc.errors:
            print(f"  {e}", file=sys.stderr)
        return 2
    duration = time.perf_counter() - start
    yaml_style = Path(args.config).suffix.lower() in (".yaml", ".yml")
    text = machine_report(rep, yaml_style)
    if args.out is not None:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        path = out / f"{args.command}_report.{'yaml' if yaml_style else 'json'}"
        path.write_text(text)
    if args.format in ("human", "both"):
        print(human_summary(rep, duration))
    if args.format in ("machine", "both") and args.out is None:
        sys.stdout.write(text)
    return 0 if rep.passed else 1


if __name__ == "__main__":
    sys.exit(main())
