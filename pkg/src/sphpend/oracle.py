"""Independent numerical ground truth for the closed-form machinery.

Nothing in the measurement functions here uses elliptic integrals or the
closed-form flows: trajectories come from adaptive Runge-Kutta integration of
the ambient equations

    dq/dt = p,    dp/dt = -V'(z) e_z + lambda q,    lambda = z V'(z) - |p|^2

(the multiplier keeps the motion on the sphere with tangent momentum), with a
periodic orthogonal re-projection onto the constraints.  Periods come from a
Poincare return map on the section {z = 0, dz/dt > 0}, rotation numbers from
an unwrapped azimuth accumulator, action values from the canonical one-form
integrated along measured cycles, and commutation checks from central finite
differences in an orthonormal tangent frame.

``build_report`` is the comparison harness: it runs the closed-form modules
side by side with these measurements and emits a machine-readable record per
fiber, including the alternative period conventions under adjudication.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.linalg import null_space

from .errors import QuadratureFailure, SectionMissed, StepFailure, StratumError
from .phase_space import (
    PhasePoint,
    Potential,
    Stratum,
    classify,
    momentum_map,
    project,
)

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class IntegratorConfig:
    """Tolerances and projection cadence of the reference integrator."""

    rtol: float = 1e-11
    atol: float = 1e-12
    max_step: float = math.inf
    projection_interval: float = 0.5  # re-project the constraints each chunk

    def __post_init__(self):
        if self.rtol <= 0 or self.atol <= 0 or self.projection_interval <= 0:
            raise ValueError("tolerances and projection interval must be positive")


DEFAULT_CONFIG = IntegratorConfig()


def _ambient_rhs(potential: Potential):
    dv = potential.dv

    def rhs(t, y):
        x, yy, z, u, v, w = y[:6]
        p2 = u * u + v * v + w * w
        g = dv(z)
        lam = z * g - p2
        out = np.empty_like(y)
        out[0:3] = (u, v, w)
        out[3:6] = (lam * x, lam * yy, lam * z - g)
        return out

    return rhs


def _augmented_rhs(potential: Potential, j0: float):
    base = _ambient_rhs(potential)

    def rhs(t, y):
        out = np.empty_like(y)
        out[:6] = base(t, y[:6])
        rho_sq = y[0] * y[0] + y[1] * y[1]
        out[6] = j0 / rho_sq if j0 != 0.0 else 0.0  # unwrapped azimuth
        out[7] = y[3] ** 2 + y[4] ** 2 + y[5] ** 2  # integral of |p|^2
        return out

    return rhs


def _project_inplace(y: np.ndarray) -> None:
    q = y[0:3]
    q /= np.linalg.norm(q)
    y[3:6] -= (q @ y[3:6]) * q


def integrate_reference(
    p: PhasePoint, potential: Potential, t: float, cfg: IntegratorConfig = DEFAULT_CONFIG
) -> PhasePoint:
    """Flow p by time t with the constrained reference integrator."""
    if t == 0.0:
        return p
    rhs = _ambient_rhs(potential)
    y = p.as_array()
    direction = math.copysign(1.0, t)
    remaining = abs(t)
    t_now = 0.0
    while remaining > 0.0:
        step = min(cfg.projection_interval, remaining)
        sol = solve_ivp(
            rhs,
            (t_now, t_now + direction * step),
            y,
            method="DOP853",
            rtol=cfg.rtol,
            atol=cfg.atol,
            max_step=cfg.max_step,
            dense_output=False,
        )
        if sol.status != 0:
            raise StepFailure(f"reference integrator failed: {sol.message}")
        y = sol.y[:, -1].copy()
        _project_inplace(y)
        t_now += direction * step
        remaining -= step
    return PhasePoint.from_array(y)


def _section_return(
    j: float, h: float, potential: Potential, cfg: IntegratorConfig
) -> tuple[float, np.ndarray]:
    """First return to {z = 0, dz/dt > 0} from the canonical section start.

    Returns the refined return time and the augmented state there (ambient
    coordinates, unwrapped azimuth, integral of |p|^2).
    """
    if classify(j, h) is not Stratum.REGULAR:
        raise StratumError(f"return map needs a regular fiber, not ({j}, {h})")
    ell = math.sqrt(2.0 * h - j * j)
    y = np.array([1.0, 0.0, 0.0, 0.0, j, ell, 0.0, 0.0])
    rhs = _augmented_rhs(potential, j)

    def rising_z(t, yy):
        return yy[2]

    rising_z.direction = 1

    horizon = 20.0
    t_now = 0.0
    budget = 2000.0  # generous cap; regular periods here are O(1..30)
    while t_now < budget:
        chunk = min(cfg.projection_interval, horizon)
        sol = solve_ivp(
            rhs,
            (t_now, t_now + chunk),
            y,
            method="DOP853",
            rtol=cfg.rtol,
            atol=cfg.atol,
            max_step=cfg.max_step,
            events=rising_z,
            dense_output=False,
        )
        if sol.status == -1:
            raise StepFailure(f"reference integrator failed: {sol.message}")
        hits = [te for te in sol.t_events[0] if te > 1e-9]
        if hits:
            return hits[0], sol.y_events[0][0]
        y = sol.y[:, -1].copy()
        _project_inplace(y[:8])
        t_now += chunk
    raise SectionMissed(f"no section return within t = {budget} on (j, h) = ({j}, {h})")


def measure_period(
    j: float, h: float, potential: Potential, cfg: IntegratorConfig = DEFAULT_CONFIG
) -> tuple[float, float]:
    """Measured lattice generator (S, T) of the fiber over (j, h).

    T is the first return time to the section; S is minus the unwrapped
    azimuth swept during the return, which is the representative that closes
    the joint flow exactly (no modular reduction is applied).
    """
    T, y_end = _section_return(j, h, potential, cfg)
    return -y_end[6], T


def loop_action(j: float, h: float, cfg: IntegratorConfig = DEFAULT_CONFIG) -> float:
    """Canonical one-form integrated over the measured return cycle, / 2 pi.

    The cycle closes the energy flow by time T with the rotation by S; along
    it  (1/2pi) oint p . dq  =  (S j + integral_0^T |p|^2 dt) / 2 pi.
    Quadratic potential (the action coordinates live there).
    """
    T, y_end = _section_return(j, h, Potential.quadratic(), cfg)
    S = -y_end[6]
    return (S * j + y_end[7]) / (2.0 * math.pi)


# ---------------------------------------------------------------------------
# finite-difference Poisson bracket

def _tangent_frame(p: PhasePoint) -> np.ndarray:
    """Orthonormal basis (6 x 4) of the tangent space of the constraint set."""
    q, mom = p.position, p.momentum
    jac = np.zeros((2, 6))
    jac[0, :3] = 2.0 * q
    jac[1, :3] = mom
    jac[1, 3:] = q
    basis = null_space(jac)
    if basis.shape != (6, 4):
        raise ValueError("constraint Jacobian is degenerate")
    return basis


def _omega_ambient(a: np.ndarray, b: np.ndarray) -> float:
    return float(a[:3] @ b[3:] - b[:3] @ a[3:])


def poisson_bracket_fd(p: PhasePoint, potential: Potential, step: float = 1e-5) -> float:
    """{J, H} at p from finite differences restricted to the constraint set.

    Central differences of J and H along a tangent frame (displaced points are
    re-projected onto the constraints), the restricted two-form assembled from
    the ambient one, and the bracket evaluated as dH(X_J).  Vanishes up to the
    finite-difference error for any axisymmetric potential.
    """
    basis = _tangent_frame(p)
    omega = np.zeros((4, 4))
    for a in range(4):
        for b in range(a + 1, 4):
            omega[a, b] = _omega_ambient(basis[:, a], basis[:, b])
            omega[b, a] = -omega[a, b]

    x0 = p.as_array()

    def both(y) -> np.ndarray:
        pt = project(y)
        mv = momentum_map(pt, potential)
        return np.array([mv.j, mv.h])

    grads = np.zeros((2, 4))
    for a in range(4):
        plus = both(x0 + step * basis[:, a])
        minus = both(x0 - step * basis[:, a])
        grads[:, a] = (plus - minus) / (2.0 * step)

    # omega(X_f, .) = df  =>  omega^T X_f = df
    x_j = np.linalg.solve(omega.T, grads[0])
    return float(grads[1] @ x_j)


# ---------------------------------------------------------------------------
# quadrature oracle for the elliptic kernel

def quadrature_elliptic(kind: str, args: tuple) -> float:
    """Adaptive quadrature of the defining integrands of the elliptic kernel.

    kind: "F" (gamma, k) | "K" (k,) | "Pi" (gamma, n, k) | "Pi_complete" (n, k).
    """
    if kind == "F":
        gamma, k = args
        n = 0.0
    elif kind == "K":
        (k,) = args
        gamma, n = 0.5 * math.pi, 0.0
    elif kind == "Pi":
        gamma, n, k = args
    elif kind == "Pi_complete":
        n, k = args
        gamma = 0.5 * math.pi
    else:
        raise ValueError(f"unknown integral kind {kind!r}")

    def integrand(t: float) -> float:
        s2 = math.sin(t) ** 2
        return 1.0 / ((1.0 - n * s2) * math.sqrt(1.0 - k * k * s2))

    out = quad(integrand, 0.0, gamma, limit=300, epsabs=1e-13, epsrel=1e-13, full_output=1)
    val, err = out[0], out[1]
    if err > 1e-10 * max(1.0, abs(val)):
        raise QuadratureFailure(f"elliptic quadrature error {err:.2e} for {kind}{args}")
    return val


# ---------------------------------------------------------------------------
# verification report

@dataclass
class VerificationReport:
    """Machine-readable fiber-by-fiber comparison of formulas vs measurements."""

    schema_version: int
    seed: int
    tolerances: dict
    records: list = field(default_factory=list)

    @property
    def all_pass(self) -> bool:
        return all(r.get("pass", False) for r in self.records)

    def to_json(self) -> str:
        payload = {
            "schema_version": self.schema_version,
            "seed": self.seed,
            "tolerances": self.tolerances,
            "records": self.records,
        }
        return json.dumps(payload, indent=2, sort_keys=True, default=_jsonable)


def _flow_comparison(j: float, h: float, T: float, cfg: IntegratorConfig, n_samples: int = 8) -> float:
    """Max ambient distance between the closed-form flow and the integrator."""
    from .dynamics_quadratic import joint_flow_from_point, section_start_point

    p0 = section_start_point(j, h)
    worst = 0.0
    for i in range(1, n_samples + 1):
        t = T * i / n_samples
        a = joint_flow_from_point(p0, 0.0, t).as_array()
        b = integrate_reference(p0, Potential.quadratic(), t, cfg).as_array()
        worst = max(worst, float(np.max(np.abs(a - b))))
    return worst


def build_report(
    fibers: list[tuple[float, float]],
    cfg: IntegratorConfig = DEFAULT_CONFIG,
    seed: int = 0,
    period_rel_tol: float = 1e-6,
    flow_tol: float = 1e-7,
    bracket_tol: float = 1e-6,
    action_tol: float = 1e-5,
) -> VerificationReport:
    """Run period, flow, action and bracket comparisons over the given fibers.

    Errors on individual fibers are recorded, never raised.  Output is
    deterministic for fixed inputs.
    """
    from .action_angle import action_A2, period_scale_variants
    from .dynamics_quadratic import fiber_params, joint_flow_from_point, section_start_point

    report = VerificationReport(
        schema_version=SCHEMA_VERSION,
        seed=seed,
        tolerances={
            "period_rel": period_rel_tol,
            "flow": flow_tol,
            "bracket": bracket_tol,
            "action": action_tol,
        },
    )
    quadratic = Potential.quadratic()
    action_offset = None
    for (j, h) in fibers:
        rec: dict = {"j": j, "h": h}
        try:
            stratum = classify(j, h)
            rec["stratum"] = stratum.value
            if stratum is Stratum.ELLIPTIC_BOUNDARY:
                rec.update({"lattice_rank": 1, "generator": [1.0, 0.0], "pass": True})
                report.records.append(rec)
                continue
            if stratum is not Stratum.REGULAR:
                rec.update({"pass": False, "error": f"stratum {stratum.value} not comparable"})
                report.records.append(rec)
                continue

            params = fiber_params(j, h)
            rec.update({"k": params.k, "ell": params.ell, "lattice_rank": 2})

            variants = period_scale_variants(j, h)
            S_f, T_f = variants["validated"]
            S_a, T_a = variants["root_ratio_modulus"]
            rec["S_formula"], rec["T_formula"] = S_f, T_f
            rec["S_alt_general"], rec["T_alt_general"] = S_a, T_a
            rec["T_alt_axisymmetric"] = variants["axisymmetric_special"]

            S_o, T_o = measure_period(j, h, quadratic, cfg)
            rec["S_oracle"], rec["T_oracle"] = S_o, T_o
            rec["T_rel_discrepancy"] = abs(T_f - T_o) / abs(T_o)
            rec["S_discrepancy"] = abs(S_f - S_o) / max(1.0, abs(S_o))
            rec["T_alt_rel_discrepancy"] = abs(T_a - T_o) / abs(T_o)
            period_pass = (
                rec["T_rel_discrepancy"] <= period_rel_tol
                and rec["S_discrepancy"] <= period_rel_tol
            )

            rec["flow_max_distance"] = _flow_comparison(j, h, T_o, cfg)
            flow_pass = rec["flow_max_distance"] <= flow_tol

            rec["A2"] = action_A2(j, h)
            rec["loop_action"] = loop_action(j, h, cfg)
            diff = rec["loop_action"] - rec["A2"]
            rec["action_offset"] = diff
            if action_offset is None:
                action_offset = diff
                action_pass = True
            else:
                action_pass = abs(diff - action_offset) <= action_tol
            rec["action_offset_spread"] = abs(diff - action_offset)

            p0 = section_start_point(j, h)
            p1 = joint_flow_from_point(p0, 0.4, 0.37 * T_o)
            rec["bracket_max"] = max(
                abs(poisson_bracket_fd(p0, quadratic)),
                abs(poisson_bracket_fd(p1, quadratic)),
            )
            bracket_pass = rec["bracket_max"] <= bracket_tol

            rec["discrepancy_flag"] = not period_pass
            rec["pass"] = period_pass and flow_pass and action_pass and bracket_pass
        except Exception as exc:  # aggregate, never abort the sweep
            rec["error"] = f"{type(exc).__name__}: {exc}"
            rec["pass"] = False
        report.records.append(rec)
    return report
