"""Closed-form flows for the quadratic potential V(z) = z^2.

With sigma = z^2 the radial quadrature reduces to a cubic, whose roots fix
every coefficient below.  Writing D = sqrt((1 - h)^2 + 2 j^2),

    sigma_-  = (1 + h - D)/2 = ell^2 / (1 + h + D)     (z^2 at the turning point)
    sigma_+  = (1 + h + D)/2                           (complementary root)
    k        = sigma_- / sigma_+                       (root ratio)
    kappa    = sqrt(k)                                 (elliptic modulus)
    omega    = sqrt(1 + h + D) = sqrt(2 sigma_+)       (phase rate)
    ell      = sqrt(2 h - j^2)                         (|w| at the equator)

and the flow closes as

    z(t)     = sqrt(sigma_-) sn(xi_0 + omega t, kappa)
    theta(t) = theta_0 + (j / omega) [PI(am(xi), sigma_-, kappa)]_{xi_0}^{xi(t)}

with PI extended quasi-periodically.  The Jacobi phase xi absorbs both the
turning points and the equator crossings, so no branch bookkeeping is needed.

A widely quoted variant of these formulas uses the root ratio k itself as the
modulus, time scale 2^(1/4) sqrt(k^3 ell) and characteristic k ell / sqrt(2).
That variant does not reproduce the reference ODE integration (its small-
oscillation period does not limit to pi sqrt(2)); the forms above do, to the
integrator's accuracy.  ``period_scale_variants`` in :mod:`sphpend.action_angle`
exposes the variant values so reports can show the discrepancy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .elliptic import (
    ellint_F,
    ellint_K,
    ellint_Pi,
    jacobi_am,
    jacobi_sn_cn_dn,
)
from .errors import DomainError, StratumError
from .phase_space import (
    Chart,
    ChartPoint,
    PhasePoint,
    Potential,
    Stratum,
    classify,
    from_chart,
)

_ARCSIN_SLACK = 1e-12  # tolerated overshoot of |arcsin argument| past 1


@dataclass(frozen=True)
class QuadraticFiberParams:
    """Derived constants of one regular fiber of the quadratic system."""

    j: float
    h: float
    k: float            # root ratio sigma_-/sigma_+; the squared modulus
    ell: float          # sqrt(2h - j^2)
    kappa: float        # elliptic modulus sqrt(k)
    n_char: float       # characteristic of the third-kind integrals = sigma_-
    sigma_minus: float  # z^2 at the turning point
    sigma_plus: float
    omega: float        # Jacobi phase advance per unit time

    @property
    def time_scale(self) -> float:
        return 1.0 / self.omega

    @property
    def z_max(self) -> float:
        return math.sqrt(self.sigma_minus)

    @property
    def quarter_period(self) -> float:
        return ellint_K(self.kappa) / self.omega


def fiber_params(j: float, h: float) -> QuadraticFiberParams:
    """Fiber constants; only regular fibers have them."""
    if classify(j, h) is not Stratum.REGULAR:
        raise StratumError(f"(j, h) = ({j}, {h}) is not a regular value")
    D = math.hypot(1.0 - h, math.sqrt(2.0) * j)
    s = 1.0 + h + D
    ell_sq = 2.0 * h - j * j
    # k = (1 + h - D)/(1 + h + D) rewritten with the conjugate to avoid the
    # cancellation near the boundary stratum where D ~ 1 + h
    k = 2.0 * ell_sq / (s * s)
    sigma_minus = ell_sq / s
    return QuadraticFiberParams(
        j=j,
        h=h,
        k=k,
        ell=math.sqrt(ell_sq),
        kappa=math.sqrt(k),
        n_char=sigma_minus,
        sigma_minus=sigma_minus,
        sigma_plus=0.5 * s,
        omega=math.sqrt(s),
    )


def _theta_phase(xi: float, params: QuadraticFiberParams) -> float:
    """Azimuth accumulator: PI(am(xi, kappa), sigma_-, kappa), extended."""
    return ellint_Pi(jacobi_am(xi, params.kappa), params.n_char, params.kappa)


def _initial_phase(z0: float, w0: float, params: QuadraticFiberParams) -> float:
    """Jacobi phase xi_0 with z(0) = z0 and sign(z'(0)) = sign(w0)."""
    arg = z0 / params.z_max
    if abs(arg) > 1.0 + _ARCSIN_SLACK:
        raise DomainError(f"z = {z0} outside the allowed band |z| <= {params.z_max}")
    arg = min(1.0, max(-1.0, arg))
    u = ellint_F(math.asin(arg), params.kappa)
    if w0 >= 0.0:
        return u
    return 2.0 * ellint_K(params.kappa) - u


def gamma_phase(t: float, z0: float, w0: float, params: QuadraticFiberParams) -> float:
    """Jacobi amplitude gamma(t) along the flow started at (z0, w0)."""
    xi = _initial_phase(z0, w0, params) + params.omega * t
    return jacobi_am(xi, params.kappa)


def R_eps_closed(t: float, rho0: float, params: QuadraticFiberParams, eps: int) -> float:
    """Cylindrical radius rho(t) for the flow with rho(0) = rho0, branch eps.

    eps = sign(d rho/dt) at t = 0.  The closed form is smooth across turning
    points and equator crossings; eps only selects the initial branch.
    """
    sig0 = 1.0 - rho0 * rho0
    arg = sig0 / params.sigma_minus
    if arg > 1.0 + _ARCSIN_SLACK:
        raise DomainError(f"rho = {rho0} outside the allowed band of the fiber")
    g0 = math.asin(math.sqrt(min(arg, 1.0)))
    u = ellint_F(g0, params.kappa) - eps * params.omega * t
    sn, _, _ = jacobi_sn_cn_dn(u, params.kappa)
    return math.sqrt(max(1.0 - params.sigma_minus * sn * sn, 0.0))


def _flow_cartesian(
    z0: float, w0: float, theta0: float, params: QuadraticFiberParams, s: float, t: float
) -> PhasePoint:
    """Evaluate the joint flow and rebuild the ambient point.

    theta0 is the initial azimuth of the position (of the momentum when the
    start sits at a pole, which happens only on j = 0 fibers).
    """
    p = params
    if p.j == 0.0 and p.h > 1.0:
        # meridian great circle through the poles: the polar angle is the
        # Jacobi amplitude itself, position (cn cos a, cn sin a, sn)
        xi0 = _initial_phase(z0, w0, p)
        _, cn0, _ = jacobi_sn_cn_dn(xi0, p.kappa)
        alpha = theta0 + s
        if cn0 < -1e-12:
            alpha += math.pi  # phase placement put the signed radius negative
        xi = xi0 + p.omega * t
        sn, cn, dn = jacobi_sn_cn_dn(xi, p.kappa)
        psidot = p.omega * dn
        return PhasePoint(
            cn * math.cos(alpha),
            cn * math.sin(alpha),
            sn,
            -psidot * sn * math.cos(alpha),
            -psidot * sn * math.sin(alpha),
            psidot * cn,
        )
    xi0 = _initial_phase(z0, w0, p)
    xi = xi0 + p.omega * t
    sn, cn, dn = jacobi_sn_cn_dn(xi, p.kappa)
    z = p.z_max * sn
    w = p.z_max * p.omega * cn * dn
    rho = math.sqrt(1.0 - z * z)
    if p.j != 0.0:
        theta = theta0 + (p.j / p.omega) * (_theta_phase(xi, p) - _theta_phase(xi0, p))
    else:
        theta = theta0
    theta += s
    ct, st = math.cos(theta), math.sin(theta)
    rhodot = -z * w / rho
    jr = p.j / rho
    return PhasePoint(rho * ct, rho * st, z, rhodot * ct - jr * st, rhodot * st + jr * ct, w)


def joint_flow_quadratic(init: ChartPoint, s: float, t: float) -> PhasePoint:
    """Joint flow by (s, t) of a chart point on a regular fiber of V = z^2."""
    if init.chart is Chart.EQUATOR:
        raise StratumError("start the closed-form flow from a north/south chart point")
    p0 = from_chart(init)
    return joint_flow_from_point(p0, s, t)


def joint_flow_from_point(p0: PhasePoint, s: float, t: float) -> PhasePoint:
    """Joint flow by (s, t) started from an ambient point on a regular fiber."""
    j = p0.x * p0.v - p0.y * p0.u
    h = 0.5 * (p0.u ** 2 + p0.v ** 2 + p0.w ** 2) + p0.z ** 2
    params = fiber_params(j, h)
    rho0 = math.hypot(p0.x, p0.y)
    if rho0 > 1e-12:
        theta0 = math.atan2(p0.y, p0.x)
    else:
        # start at a pole (j = 0, h > 1): azimuth of the meridian plane from
        # the horizontal velocity, oriented so the polar angle increases
        theta0 = math.atan2(-p0.v, -p0.u) if p0.z > 0 else math.atan2(p0.v, p0.u)
    return _flow_cartesian(p0.z, p0.w, theta0, params, s, t)


def section_trajectory(j: float, h: float, t: float) -> tuple[float, float]:
    """(rho, theta) at time t along the flow from the equatorial section point.

    The start is (1, 0, 0) with momentum (0, j, ell): rho_0 = 1, theta_0 = 0,
    rising branch.  theta is the unwrapped azimuth.
    """
    p = fiber_params(j, h)
    xi = p.omega * t
    sn, _, _ = jacobi_sn_cn_dn(xi, p.kappa)
    rho = math.sqrt(max(1.0 - p.sigma_minus * sn * sn, 0.0))
    theta = (p.j / p.omega) * _theta_phase(xi, p) if p.j != 0.0 else 0.0
    return rho, theta


def section_start_point(j: float, h: float) -> PhasePoint:
    """The canonical section point (1, 0, 0, 0, j, sqrt(2h - j^2))."""
    ell_sq = 2.0 * h - j * j
    if ell_sq < 0.0:
        raise StratumError(f"(j, h) = ({j}, {h}) outside the momentum-map image")
    return PhasePoint(1.0, 0.0, 0.0, 0.0, j, math.sqrt(ell_sq))


def quadratic_trajectory_extras(p0: PhasePoint, t: float) -> tuple[PhasePoint, float]:
    """Flowed point together with the Jacobi amplitude gamma(t) (for exports)."""
    j = p0.x * p0.v - p0.y * p0.u
    h = 0.5 * (p0.u ** 2 + p0.v ** 2 + p0.w ** 2) + p0.z ** 2
    params = fiber_params(j, h)
    gam = gamma_phase(t, p0.z, p0.w, params)
    return joint_flow_from_point(p0, 0.0, t), gam


QUADRATIC = Potential.quadratic()
