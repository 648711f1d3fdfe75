"""Command-line interface: trajectories, period/action tables, verification.

Subcommands
-----------
trajectory   flow a start point and export t, x, y, z, u, v, w, j, h rows
periods      closed-form period table over a (j, h) grid
actions      action/period table with oracle adjudication columns
verify       JSON verification report; exit 1 when any record fails
map-image    SVG sketch of the momentum-map image

Exit codes: 0 success, 1 verification failure, 2 usage or domain errors.
All numeric output uses 17 significant digits; outputs are deterministic for
fixed flags and seed.
"""

from __future__ import annotations

import argparse
import ast
import math
import sys

import numpy as np

from .action_angle import action_A2, period_generators, period_scale_variants
from .dynamics_general import flow_H_point
from .dynamics_quadratic import fiber_params, gamma_phase, joint_flow_from_point, section_start_point
from .errors import SphpendError
from .oracle import DEFAULT_CONFIG, IntegratorConfig, build_report, measure_period
from .phase_space import PhasePoint, Potential, Stratum, classify, momentum_map, project
from . import viz

_G = "{:.17g}".format


# ---------------------------------------------------------------------------
# expression potentials

_BIN_OPS = {ast.Add: lambda a, b: a + b,
            ast.Sub: lambda a, b: a - b,
            ast.Mult: lambda a, b: a * b,
            ast.Div: lambda a, b: a / b,
            ast.Pow: lambda a, b: a ** b}
_UNARY_OPS = {ast.UAdd: lambda a: a, ast.USub: lambda a: -a}


def _compile_expr(text: str):
    """Compile an arithmetic expression in z (+, -, *, /, ^, constants)."""
    tree = ast.parse(text.replace("^", "**"), mode="eval")

    def ev(node, z):
        if isinstance(node, ast.Expression):
            return ev(node.body, z)
        if isinstance(node, ast.BinOp) and type(node.op) in _BIN_OPS:
            return _BIN_OPS[type(node.op)](ev(node.left, z), ev(node.right, z))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY_OPS:
            return _UNARY_OPS[type(node.op)](ev(node.operand, z))
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "z":
            return z
        raise ValueError(f"unsupported syntax in potential expression: {ast.dump(node)}")

    ev(tree, 0.0)  # fail fast on bad syntax
    return lambda z: ev(tree, z)


def _resolve_potential(args) -> Potential:
    if getattr(args, "potential", None):
        if not getattr(args, "dpotential", None):
            raise SphpendError("--potential requires --dpotential (no symbolic differentiation)")
        pot = Potential(v=_compile_expr(args.potential),
                        dv=_compile_expr(args.dpotential),
                        name=args.potential)
        pot.validate()
        return pot
    return Potential.quadratic()


# ---------------------------------------------------------------------------
# helpers

def _write(path: str, text: str) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(text)


def _start_point(args, potential: Potential) -> PhasePoint:
    if args.x0:
        vals = [float(s) for s in args.x0.split(",")]
        if len(vals) != 6:
            raise SphpendError("--x0 needs 6 comma-separated reals")
        return project(vals)
    if args.j is None or args.h is None:
        raise SphpendError("give a start: either --j and --h, or --x0")
    if classify(args.j, args.h) is Stratum.OUTSIDE:
        raise SphpendError(f"(j, h) = ({args.j}, {args.h}) outside momentum image")
    if 2.0 * args.h - args.j ** 2 < 0.0:
        raise SphpendError("no section point below the image boundary")
    return section_start_point(args.j, args.h)


def _grid(args) -> tuple[list[float], list[float]]:
    n = args.samples
    j_vals = list(np.linspace(-args.j_max, args.j_max, n))
    h_vals = list(np.linspace(args.h_min, args.h_max, n))
    return j_vals, h_vals


# ---------------------------------------------------------------------------
# subcommands

def cmd_trajectory(args) -> int:
    potential = _resolve_potential(args)
    p0 = _start_point(args, potential)
    mv = momentum_map(p0, potential)
    if mv.stratum is Stratum.OUTSIDE:
        raise SphpendError("start point outside momentum image")
    n = max(int(args.samples), 1)
    times = [args.t_max * i / n for i in range(n + 1)] if args.t_max != 0.0 else [0.0]
    quadratic = potential.is_quadratic and mv.stratum is Stratum.REGULAR

    rows = []
    states = []
    if quadratic:
        params = fiber_params(mv.j, mv.h)
        for t in times:
            pt = joint_flow_from_point(p0, 0.0, t)
            gam = gamma_phase(t, p0.z, p0.w, params)
            states.append(pt.as_array())
            rows.append([t, *pt.as_array(), mv.j, mv.h, params.k, params.ell, gam])
        header = "t,x,y,z,u,v,w,j,h,k,ell,gamma"
    else:
        pt = p0
        prev_t = 0.0
        for t in times:
            pt = flow_H_point(pt, t - prev_t, potential)
            prev_t = t
            mvt = momentum_map(pt, potential)
            states.append(pt.as_array())
            rows.append([t, *pt.as_array(), mvt.j, mvt.h])
        header = "t,x,y,z,u,v,w,j,h"

    if args.format == "svg":
        _write(args.out, viz.trajectory_svg(times, states))
    else:
        lines = [header] + [",".join(_G(v) for v in row) for row in rows]
        _write(args.out, "\n".join(lines) + "\n")
    return 0


def _period_row(j: float, h: float) -> dict:
    st = classify(j, h)
    row = {"j": j, "h": h, "stratum": st.value, "k": "", "ell": "",
           "S": "", "T": "", "rank": ""}
    if st is Stratum.REGULAR:
        params = fiber_params(j, h)
        lat = period_generators(j, h)
        row.update({"k": params.k, "ell": params.ell, "S": lat.S, "T": lat.T, "rank": 2})
    elif st is Stratum.ELLIPTIC_BOUNDARY:
        row["rank"] = 1
    return row


def cmd_periods(args) -> int:
    j_vals, h_vals = _grid(args)
    cols = ["j", "h", "stratum", "k", "ell", "S", "T", "rank"]
    lines = [",".join(cols)]
    for h in h_vals:
        for j in j_vals:
            row = _period_row(j, h)
            lines.append(",".join(_G(row[c]) if isinstance(row[c], float) else str(row[c])
                                  for c in cols))
    _write(args.out, "\n".join(lines) + "\n")
    return 0


_ACTION_COLS = ["j", "h", "k", "ell", "S_formula", "T_formula",
                "S_oracle", "T_oracle", "A2", "discrepancy_flag"]


def _action_row(j: float, h: float, tol: float, cfg: IntegratorConfig) -> dict:
    st = classify(j, h)
    row = {c: "" for c in _ACTION_COLS}
    row.update({"j": j, "h": h})
    if st is Stratum.REGULAR:
        params = fiber_params(j, h)
        S_f, T_f = period_scale_variants(j, h)["validated"]
        S_o, T_o = measure_period(j, h, Potential.quadratic(), cfg)
        flag = int(abs(T_f - T_o) / abs(T_o) > tol or abs(S_f - S_o) / max(1.0, abs(S_o)) > tol)
        row.update({"k": params.k, "ell": params.ell, "S_formula": S_f, "T_formula": T_f,
                    "S_oracle": S_o, "T_oracle": T_o, "A2": action_A2(j, h),
                    "discrepancy_flag": flag})
    elif st is Stratum.ELLIPTIC_BOUNDARY:
        row["discrepancy_flag"] = 0  # rank-1 lattice: nothing to compare
    else:
        row["discrepancy_flag"] = ""
    return row


def cmd_actions(args) -> int:
    cfg = IntegratorConfig(projection_interval=DEFAULT_CONFIG.projection_interval)
    if args.j is not None and args.h is not None:
        cells = [(args.j, args.h)]
        j_vals = h_vals = None
    else:
        j_vals, h_vals = _grid(args)
        cells = [(j, h) for h in h_vals for j in j_vals]
    if args.format == "svg":
        t_map = []
        for (j, h) in cells:
            row = _period_row(j, h)
            t_map.append(row["T"] if isinstance(row["T"], float) else math.nan)
        if j_vals is None:
            raise SphpendError("svg heatmap needs a grid, not a single fiber")
        _write(args.out, viz.period_heatmap_svg(j_vals, h_vals, t_map))
        return 0
    lines = [",".join(_ACTION_COLS)]
    for (j, h) in cells:
        row = _action_row(j, h, args.tol, cfg)
        lines.append(",".join(_G(row[c]) if isinstance(row[c], float) else str(row[c])
                              for c in _ACTION_COLS))
    _write(args.out, "\n".join(lines) + "\n")
    return 0


_DEFAULT_VERIFY_GRID = [
    (j, h)
    for h in (0.45, 0.8, 1.15, 1.5, 1.85)
    for j in (-0.8, -0.4, 0.0, 0.4, 0.8)
]


def _sample_fibers(n: int, seed: int) -> list[tuple[float, float]]:
    """Uniform regular values in the fixed window, clear of singular bands."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        j = float(rng.uniform(-1.2, 1.2))
        h = float(rng.uniform(0.05, 2.0))
        if h < 0.5 * j * j + 1e-3:
            continue
        if math.hypot(j, h - 1.0) < 1e-3:
            continue
        out.append((j, h))
    return out


def cmd_verify(args) -> int:
    fibers = _sample_fibers(args.samples, args.seed) if args.samples else list(_DEFAULT_VERIFY_GRID)
    report = build_report(fibers, seed=args.seed, period_rel_tol=args.tol)
    if args.convention != "validated":
        key = {"root-ratio": "T_alt_rel_discrepancy"}.get(args.convention)
        for rec in report.records:
            if rec.get("stratum") != "regular":
                continue
            if key is not None:
                rec["pass"] = rec.get(key, math.inf) <= args.tol
            else:  # axisymmetric convention exists only on the j = 0 axis
                t_alt, t_orc = rec.get("T_alt_axisymmetric"), rec.get("T_oracle")
                if t_alt is not None and t_orc:
                    rec["pass"] = abs(t_alt - t_orc) / abs(t_orc) <= args.tol
    text = report.to_json() + "\n"
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    return 0 if report.all_pass else 1


def cmd_map_image(args) -> int:
    _write(args.out, viz.map_image_svg())
    return 0


# ---------------------------------------------------------------------------
# parser

def _add_grid_flags(sp, default_samples: int) -> None:
    sp.add_argument("--samples", type=int, default=default_samples)
    sp.add_argument("--j-max", type=float, default=1.2)
    sp.add_argument("--h-min", type=float, default=0.05)
    sp.add_argument("--h-max", type=float, default=2.0)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sphpend", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    tr = sub.add_parser("trajectory", help="flow a start point and export the path")
    tr.add_argument("--quadratic", action="store_true", help="quadratic height potential (default)")
    tr.add_argument("--potential", help="expression for V(z), e.g. 'z^4'")
    tr.add_argument("--dpotential", help="expression for V'(z), e.g. '4*z^3'")
    tr.add_argument("--j", type=float)
    tr.add_argument("--h", type=float)
    tr.add_argument("--x0", help="6 comma-separated ambient coordinates")
    tr.add_argument("--t-max", type=float, required=True)
    tr.add_argument("--samples", type=int, default=400)
    tr.add_argument("--format", choices=("csv", "svg"), default="csv")
    tr.add_argument("--out", required=True)
    tr.set_defaults(func=cmd_trajectory)

    pe = sub.add_parser("periods", help="closed-form period table over a grid")
    _add_grid_flags(pe, 5)
    pe.add_argument("--out", required=True)
    pe.set_defaults(func=cmd_periods)

    ac = sub.add_parser("actions", help="action table with oracle adjudication")
    ac.add_argument("--j", type=float)
    ac.add_argument("--h", type=float)
    _add_grid_flags(ac, 5)
    ac.add_argument("--tol", type=float, default=1e-6)
    ac.add_argument("--format", choices=("csv", "svg"), default="csv")
    ac.add_argument("--out", required=True)
    ac.set_defaults(func=cmd_actions)

    ve = sub.add_parser("verify", help="run the oracle verification report")
    ve.add_argument("--samples", type=int, default=0,
                    help="random fibers instead of the default 5x5 grid")
    ve.add_argument("--seed", type=int, default=0)
    ve.add_argument("--tol", type=float, default=1e-6)
    ve.add_argument("--convention", choices=("validated", "root-ratio", "axisymmetric"),
                    default="validated",
                    help="which period convention the pass/fail asserts")
    ve.add_argument("--out")
    ve.set_defaults(func=cmd_verify)

    mi = sub.add_parser("map-image", help="SVG sketch of the momentum-map image")
    mi.add_argument("--out", required=True)
    mi.set_defaults(func=cmd_map_image)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SphpendError as exc:
        print(f"sphpend: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"sphpend: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
