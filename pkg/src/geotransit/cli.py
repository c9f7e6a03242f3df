"""geotransit command line: verify | torus | build-2mm | borromean | plot."""
import argparse
import json
import sys
from dataclasses import dataclass

import numpy as np

from . import jsonio
from .errors import GeoTransitError

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


@dataclass(frozen=True)
class Config:
    tol: float = 1e-9
    seed: int = 0
    dim: int = 3
    out: str = None

    def __post_init__(self):
        if not (self.tol > 0):
            raise ValueError("tol must be positive")
        if self.dim not in (2, 3):
            raise ValueError("dim must be 2 or 3")


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def _write(text, path):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _t_grid(args):
    if args.t_steps < 1:
        raise InputError("--t-steps must be at least 1")
    if args.t_min > args.t_max:
        raise InputError("--t-min exceeds --t-max")
    return [float(t) for t in np.linspace(args.t_min, args.t_max, args.t_steps)]


# ---------------------------------------------------------------- verify

def _check(name, value, limit):
    value = float(value)
    return {"name": name, "value": value, "limit": float(limit),
            "passed": bool(np.isfinite(value) and value <= limit)}


def _slice_elem(rng, s):
    """Random product of slice-preserving factors diag(e^u, e^-u) and
    c I + d J kappa (these fix x3 = 0)."""
    from .geom import GroupElem
    J = np.array([[0.0, -1.0], [1.0, 0.0]])
    g = GroupElem.identity(s)
    for _ in range(4):
        u, w = 0.5 * rng.normal(), 0.5 * rng.normal()
        d = GroupElem.from_arrays(np.diag([np.exp(u), np.exp(-u)]), None, s)
        if s > 0:
            f = GroupElem.from_arrays(np.cosh(w) * np.eye(2), np.sinh(w) / s * J, s)
        elif s < 0:
            f = GroupElem.from_arrays(np.cos(w) * np.eye(2), np.sin(w) / abs(s) * J, s)
        else:
            f = GroupElem.from_arrays(np.eye(2), w * J, s)
        g = g @ d @ f
    return g


def _proj_err(a, b):
    return min(np.abs(a - b).max(), np.abs(a + b).max()) / max(1.0, np.abs(b).max())


def verify_suite(cfg):
    """Property suite; residual-type checks are held to cfg.tol."""
    from .geom import eta, random_group_elem, to_projective4
    from .reps import Presentation, Representation, h1_dimension, relation_residual
    from .scenarios import (TORUS_HP_B, borromean_rep, build_2mm, torus_printed, torus_rep,
                            torus_scenario, transition_2mm)

    tol = cfg.tol
    dim = cfg.dim
    rng = np.random.default_rng(cfg.seed)
    checks = []

    def draw(s):
        return random_group_elem(rng, s) if dim == 3 else _slice_elem(rng, s)

    worst_eta, worst_hom = 0.0, 0.0
    for s in (1.0, 0.5, -0.5, -1.0):
        Q = eta(s, dim)
        for _ in range(50):
            g, h = draw(s), draw(s)
            mg = to_projective4(g, dim).m
            worst_eta = max(worst_eta, np.abs(mg.T @ Q @ mg - Q).max()
                            / max(1.0, np.abs(mg).max() ** 2))
            worst_hom = max(worst_hom, _proj_err(to_projective4(g @ h, dim).m,
                                                 mg @ to_projective4(h, dim).m))
    checks.append(_check("eta_preservation", worst_eta, tol))
    checks.append(_check("homomorphism", worst_hom, tol))

    rep = torus_scenario()
    a_p, b_p = torus_printed(0.01)
    r = torus_rep(0.01)
    err = max(np.abs(to_projective4(r.images["a"], 2).m - a_p).max(),
              np.abs(to_projective4(r.images["b"], 2).m - b_p).max())
    checks.append(_check("torus_printed", err, tol))
    checks.append(_check("torus_hp_commutator", rep.extra["hp_commutator_error"], tol))
    checks.append(_check("torus_hp_b", np.abs(np.array(rep.extra["hp_b"]) - TORUS_HP_B).max(),
                         tol))
    checks.append(_check("torus_angle_rate", abs(rep.extra["angle_rate"] + 2), 1e-3))

    for m in (5, 6, 7):
        rpt = build_2mm(m, 1.0, strict=False)
        checks.append(_check(f"two_mm_{m}_residual", rpt.worst()[1], tol))
        checks.append(_check(f"two_mm_{m}_ordering",
                             0.0 if all(rpt.ordering.values()) else 1.0, 0.5))
    rpt = build_2mm(5, 1.0)
    tr = transition_2mm(rpt, (-1e-3, 1e-3), limit_ts=())
    phi = abs(rpt.phi)
    for row in tr.rows:
        if row.kind == "cone_angle":
            checks.append(_check("regen_cone_rate",
                                 abs((2 * np.pi - row.value) / row.t - phi), 0.05 * phi))
        else:
            checks.append(_check("regen_mass", abs(row.value - rpt.phi * row.t), 1e-8))
        checks.append(_check(f"regen_residual_{row.t:+g}", row.residual, tol))

    for br in ("T", "R"):
        b = borromean_rep(2.0, 2.2, br)
        checks.append(_check(f"borromean_{br}", relation_residual(b.rep), tol))

    F2 = Presentation(("a", "b"))
    rho = Representation.from_matrices(F2, 1.0, [np.array([[2.0, 1.0], [1.0, 1.0]]),
                                                  np.array([[3.0, 0.0], [3.0, 1 / 3.0]])])
    checks.append(_check("h1_free_group", abs(h1_dimension(F2, rho).dim - 3), 0.5))
    return {"passed": all(c["passed"] for c in checks), "tol": tol, "seed": cfg.seed,
            "dim": dim, "checks": checks}


# ---------------------------------------------------------------- commands

def cmd_verify(args, cfg):
    report = verify_suite(cfg)
    sys.stdout.write(jsonio.dumps(report))
    return EXIT_OK if report["passed"] else EXIT_FAIL


def _emit_report(report, cfg, args, extra=None):
    from .svg import render
    doc = {"rows": report.to_json(), "extra": report.extra}
    if extra:
        doc.update(extra)
    _write(jsonio.dumps(doc), cfg.out)
    if getattr(args, "svg", None):
        _write(render([(r.t, r.rep) for r in report.rows]), args.svg)


def cmd_torus(args, cfg):
    from .scenarios import torus_scenario
    grid = _t_grid(args)
    _emit_report(torus_scenario(grid), cfg, args)
    return EXIT_OK


def cmd_2mm(args, cfg):
    from .scenarios import build_2mm, transition_2mm
    rpt = build_2mm(args.m, args.theta_dot)
    grid = _t_grid(args)
    tr = transition_2mm(rpt, grid, limit_ts=())
    head = rpt.to_json()
    head.pop("representation")
    _emit_report(tr, cfg, args, {"construction": head})
    return EXIT_OK


def cmd_borromean(args, cfg):
    from .scenarios import borromean_flexibility, borromean_rep
    rep = borromean_rep(args.la, args.lb, args.branch)
    doc = {"borromean": rep.to_json()}
    if args.epsilon is not None:
        grid = _t_grid(args)
        doc["flexibility"] = borromean_flexibility(args.epsilon, grid).to_json()
    _write(jsonio.dumps(doc), cfg.out)
    return EXIT_OK


def cmd_plot(args, cfg):
    from .svg import render_report_json
    try:
        with open(args.report, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read report: {exc}") from exc
    try:
        text = render_report_json(doc)
    except (GeoTransitError, KeyError, TypeError, ValueError) as exc:
        raise InputError(f"not a transition report: {exc}") from exc
    _write(text, args.output or cfg.out)
    return EXIT_OK


def build_parser():
    p = _Parser(prog="geotransit", description=__doc__)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.add_argument("--config", default=None, help="JSON file with tol/seed/dim/out")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("verify")

    def grid(sp, lo, hi, n):
        sp.add_argument("--t-min", type=float, default=lo)
        sp.add_argument("--t-max", type=float, default=hi)
        sp.add_argument("--t-steps", type=int, default=n)
        sp.add_argument("--svg", default=None, help="also write an SVG figure")

    t = sub.add_parser("torus")
    grid(t, -1e-2, 1e-2, 5)
    b = sub.add_parser("build-2mm")
    b.add_argument("--m", type=int, default=5)
    b.add_argument("--theta-dot", type=float, default=1.0)
    grid(b, -1e-3, 1e-3, 3)
    br = sub.add_parser("borromean")
    br.add_argument("--la", type=float, default=2.0)
    br.add_argument("--lb", type=float, default=2.2)
    br.add_argument("--branch", choices=("T", "R"), default="R")
    br.add_argument("--epsilon", type=float, default=None)
    grid(br, -1e-3, 1e-3, 3)
    pl = sub.add_parser("plot")
    pl.add_argument("report")
    pl.add_argument("--output", default=None)
    return p


def _config(args):
    vals = {"tol": args.tol, "seed": args.seed, "dim": args.dim, "out": args.out}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                obj = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"bad config: {exc}") from exc
        if not isinstance(obj, dict) or set(obj) - set(vals):
            raise InputError("config must be an object with keys tol, seed, dim, out")
        vals.update(obj)
    try:
        return Config(float(vals["tol"]), int(vals["seed"]), int(vals["dim"]), vals["out"])
    except (TypeError, ValueError) as exc:
        raise InputError(str(exc)) from exc


COMMANDS = {"verify": cmd_verify, "torus": cmd_torus, "build-2mm": cmd_2mm,
            "borromean": cmd_borromean, "plot": cmd_plot}


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        cfg = _config(args)
        return COMMANDS[args.command](args, cfg)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except GeoTransitError as exc:
        print(f"{exc.name}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
