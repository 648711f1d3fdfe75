"""Hamiltonian vector fields and quadrature flows for an admissible potential.

In the polar charts the energy flow reduces to one-dimensional quadratures on
the cylindrical radius.  On the fiber (j, h),

    eta^2 = j^2 + 2 (1 - rho^2) (h - Vt(rho)),            Vt(rho) = V(+-sqrt(1-rho^2))
    d rho / dt = eps sqrt((1 - rho^2) W(rho)) / rho,      W = 2 rho^2 (h - Vt) - j^2
    d theta / dt = j / rho^2

with eps = sign(cos(phi - theta)).  For admissible potentials W is strictly
increasing on [0, 1] with W(1) = 2h - j^2 > 0 on regular fibers, so each
hemisphere contributes a single monotone branch [rho_min, 1]: the flow is a
chain of quarter-branches separated by turning points (eps flips) and equator
crossings (chart switches, continued through the Cartesian anchor).

Both the branch time and the azimuth increment have inverse-square-root
endpoint singularities (at W = 0 and at rho = 1).  Substituting
rho = a + (b - a) sin^2(u) removes both at once, leaving smooth integrands.

The angle phi is never integrated: it is reconstructed from the invariants via
sin(delta) = j / (rho eta) and the branch sign, which sidesteps arcsin branch
bookkeeping entirely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .errors import (
    BranchExhausted,
    ChartDomainError,
    NearSingularFiber,
    OutsideFiber,
    QuadratureFailure,
    StratumError,
)
from .phase_space import (
    Chart,
    ChartPoint,
    PhasePoint,
    Potential,
    Stratum,
    classify,
    from_chart,
    momentum_map,
    to_chart,
)

_QUAD_OPTS = dict(limit=120, epsabs=1e-12, epsrel=1e-11, full_output=1)


def _quad(f, lo: float, hi: float) -> tuple[float, float]:
    out = quad(f, lo, hi, **_QUAD_OPTS)
    return out[0], out[1]


# ---------------------------------------------------------------------------
# vector fields

def rhs_H(c: ChartPoint, potential: Potential) -> np.ndarray:
    """(d rho, d eta, d theta, d phi)/dt of the energy flow in a polar chart."""
    if c.chart is Chart.EQUATOR:
        raise ChartDomainError("energy flow is integrated in polar charts only")
    rho, eta = c.rho, c.eta
    if rho == 0.0:
        raise ChartDomainError("theta rate undefined at rho = 0")
    d = c.delta
    sd, cd = math.sin(d), math.cos(d)
    one = 1.0 - rho * rho
    wslope = potential.weighted_profile_slope(rho, c.chart)  # (1-rho^2) Vt'(rho)
    # grouped so that d eta/dt stays finite as eta -> 0
    q_eta = rho * eta * eta * (1.0 - (rho * sd) ** 2) / one + wslope
    if eta == 0.0:
        raise ChartDomainError("phi rate undefined at eta = 0")
    q = q_eta / eta
    return np.array([eta * cd, -q_eta * cd, eta * sd / rho, q * sd])


def vector_fields(c: ChartPoint, potential: Potential) -> tuple[np.ndarray, np.ndarray]:
    """Hamiltonian vector fields (X_J, X_H) at a polar chart point."""
    xj = np.array([0.0, 0.0, 1.0, 1.0])
    return xj, rhs_H(c, potential)


# ---------------------------------------------------------------------------
# fiber geometry: one monotone branch per hemisphere

@lru_cache(maxsize=256)
def _fiber_geometry(potential: Potential, chart: Chart, j: float, h: float) -> "_BranchGeometry":
    return _BranchGeometry(potential, chart, j, h)


class _BranchGeometry:
    """Quadratures on the monotone radial branch [rho_min, 1] of one hemisphere."""

    def __init__(self, potential: Potential, chart: Chart, j: float, h: float):
        self.potential = potential
        self.chart = chart
        self.j = j
        self.h = h
        vt = lambda r: potential.profile(r, chart)
        self._w = lambda r: 2.0 * r * r * (h - vt(r)) - j * j
        if j != 0.0:
            self.rho_min = brentq(self._w, 0.0, 1.0, xtol=1e-15, rtol=8.9e-16)
        else:
            g = lambda r: h - vt(r)
            if g(0.0) >= 0.0:
                raise OutsideFiber("j = 0 band reaches the pole; use the meridian path")
            self.rho_min = brentq(g, 0.0, 1.0, xtol=1e-15, rtol=8.9e-16)
        self.quarter_time, t_err = _quad(self._time_integrand, 0.0, 0.5 * math.pi)
        if t_err > 1e-8 * max(1.0, self.quarter_time):
            raise QuadratureFailure(f"branch-time quadrature error {t_err:.2e}")
        if j != 0.0:
            self.quarter_theta, q_err = _quad(self._theta_integrand, 0.0, 0.5 * math.pi)
            if q_err > 1e-8 * max(1.0, abs(self.quarter_theta)):
                raise QuadratureFailure(f"azimuth quadrature error {q_err:.2e}")
        else:
            self.quarter_theta = 0.0

    # rho = a + (1 - a) sin^2 u maps u in [0, pi/2] onto [rho_min, 1];
    # then 1 - rho = (1 - a) cos^2 u exactly, killing the cancellation at
    # the equator endpoint
    def _rho_of_u(self, u: float) -> float:
        a = self.rho_min
        return a + (1.0 - a) * math.sin(u) ** 2

    def _u_of_rho(self, rho: float) -> float:
        a = self.rho_min
        arg = (rho - a) / (1.0 - a)
        return math.asin(math.sqrt(min(max(arg, 0.0), 1.0)))

    def _radical(self, u: float) -> float:
        """(1 - rho^2) W(rho) evaluated cancellation-free at the endpoints."""
        r = self._rho_of_u(u)
        one_m_r = (1.0 - self.rho_min) * math.cos(u) ** 2
        return one_m_r * (1.0 + r) * self._w(r)

    def _time_integrand(self, u: float) -> float:
        val = self._radical(u)
        if val <= 0.0:
            return 0.0
        r = self._rho_of_u(u)
        return r / math.sqrt(val) * (1.0 - self.rho_min) * math.sin(2.0 * u)

    def _theta_integrand(self, u: float) -> float:
        val = self._radical(u)
        if val <= 0.0:
            return 0.0
        r = self._rho_of_u(u)
        return self.j / (r * math.sqrt(val)) * (1.0 - self.rho_min) * math.sin(2.0 * u)

    def _partial_time(self, u: float) -> float:
        return _quad(self._time_integrand, 0.0, u)[0]

    def _partial_theta(self, u: float) -> float:
        return _quad(self._theta_integrand, 0.0, u)[0]

    def time_from_min(self, rho: float) -> float:
        """Time along the branch from rho_min up to rho."""
        return self._partial_time(self._u_of_rho(rho))

    def theta_from_min(self, rho: float) -> float:
        """Azimuth increment along the branch from rho_min up to rho."""
        if self.j == 0.0:
            return 0.0
        return self._partial_theta(self._u_of_rho(rho))

    def rho_at_time(self, target: float) -> float:
        """Inverse of time_from_min on [0, quarter_time]."""
        target = min(max(target, 0.0), self.quarter_time)
        u = brentq(
            lambda uu: self._partial_time(uu) - target,
            0.0,
            0.5 * math.pi,
            xtol=1e-13,
            rtol=8.9e-16,
        )
        return self._rho_of_u(u)

    def eta_of(self, rho: float) -> float:
        vt = self.potential.profile(rho, self.chart)
        return math.sqrt(max(self.j ** 2 + 2.0 * (1.0 - rho * rho) * (self.h - vt), 0.0))


# ---------------------------------------------------------------------------
# flow state

@dataclass(frozen=True)
class FlowState:
    """Polar-chart point plus the radial branch sign eps = sign(cos delta)."""

    c: ChartPoint
    eps: int
    j: float
    h: float

    @classmethod
    def from_phase_point(cls, p: PhasePoint, potential: Potential) -> "FlowState":
        if p.z == 0.0:
            raise ChartDomainError("start the flow off the equator (z != 0)")
        chart = Chart.NORTH if p.z > 0.0 else Chart.SOUTH
        c = to_chart(p, chart)
        cd = math.cos(c.delta)
        eps = 1 if cd >= 0.0 else -1
        mv = momentum_map(p, potential)
        return cls(c=c, eps=eps, j=mv.j, h=mv.h)

    def to_phase_point(self) -> PhasePoint:
        return from_chart(self.c)

    def fiber_residual(self, potential: Potential) -> float:
        """|eta^2 - j^2 - 2 (1 - rho^2)(h - Vt(rho))|."""
        rho, eta = self.c.rho, self.c.eta
        vt = potential.profile(rho, self.c.chart)
        return abs(eta ** 2 - self.j ** 2 - 2.0 * (1.0 - rho ** 2) * (self.h - vt))


def _other(chart: Chart) -> Chart:
    return Chart.SOUTH if chart is Chart.NORTH else Chart.NORTH


def _state_from(chart: Chart, rho: float, eps: int, theta: float, j: float, h: float,
                geom: _BranchGeometry) -> FlowState:
    rho = min(rho, math.nextafter(1.0, 0.0))
    eta = geom.eta_of(rho)
    sin_d = 0.0 if eta == 0.0 or rho == 0.0 else max(-1.0, min(1.0, j / (rho * eta)))
    cos_d = eps * math.sqrt(max(1.0 - sin_d * sin_d, 0.0))
    delta = math.atan2(sin_d, cos_d)
    theta = math.remainder(theta, 2.0 * math.pi)
    c = ChartPoint(chart, rho, eta, theta, theta + delta)
    return FlowState(c=c, eps=eps, j=j, h=h)


# ---------------------------------------------------------------------------
# flows

def flow_J(s0: FlowState, s: float) -> FlowState:
    """Rotation flow: advances both azimuths by s, exactly 2 pi periodic."""
    c = s0.c
    theta = math.remainder(c.theta + s, 2.0 * math.pi)
    phi = math.remainder(c.phi + s, 2.0 * math.pi)
    return replace(s0, c=ChartPoint(c.chart, c.a, c.b, theta, phi))


def _guard_fiber(j: float, h: float) -> None:
    st = classify(j, h)
    if st is Stratum.OUTSIDE:
        raise OutsideFiber(f"(j, h) = ({j}, {h}) outside the momentum-map image")
    if st is not Stratum.REGULAR:
        raise NearSingularFiber(f"(j, h) = ({j}, {h}) within the singular-stratum band")


def flow_H(s0: FlowState, t: float, potential: Potential) -> FlowState:
    """Energy flow by time t, following the quadrature branch by branch."""
    _guard_fiber(s0.j, s0.h)
    if t == 0.0:
        return s0
    if t < 0.0:
        # H is even in the momenta: reverse, flow forward, reverse back
        p = s0.to_phase_point()
        rev = PhasePoint(p.x, p.y, p.z, -p.u, -p.v, -p.w)
        out = flow_H(FlowState.from_phase_point(rev, potential), -t, potential)
        q = out.to_phase_point()
        back = PhasePoint(q.x, q.y, q.z, -q.u, -q.v, -q.w)
        return FlowState.from_phase_point(back, potential)

    j, h = s0.j, s0.h
    if j == 0.0 and h > potential.v(1.0):
        return _meridian_flow(s0.to_phase_point(), t, potential, h)

    return _march(s0.c.chart, s0.c.rho, s0.eps, s0.c.theta, t, potential, j, h)


def flow_H_point(p: PhasePoint, t: float, potential: Potential) -> PhasePoint:
    """Energy flow of an ambient point; accepts equator starts (z = 0)."""
    if p.z != 0.0:
        return flow_H(FlowState.from_phase_point(p, potential), t, potential).to_phase_point()
    mv = momentum_map(p, potential)
    _guard_fiber(mv.j, mv.h)
    if t == 0.0:
        return p
    if t < 0.0:
        rev = PhasePoint(p.x, p.y, p.z, -p.u, -p.v, -p.w)
        q = flow_H_point(rev, -t, potential)
        return PhasePoint(q.x, q.y, q.z, -q.u, -q.v, -q.w)
    if mv.j == 0.0 and mv.h > potential.v(1.0):
        return _meridian_flow(p, t, potential, mv.h).to_phase_point()
    # crossing the equator into the hemisphere the momentum points at
    chart = Chart.NORTH if p.w > 0.0 else Chart.SOUTH
    theta = math.atan2(p.y, p.x)
    out = _march(chart, 1.0, -1, theta, t, potential, mv.j, mv.h)
    return out.to_phase_point()


def joint_flow_point(p: PhasePoint, s: float, t: float, potential: Potential) -> PhasePoint:
    """Joint flow of an ambient point: energy flow by t, then rotation by s."""
    q = flow_H_point(p, t, potential)
    c, sn = math.cos(s), math.sin(s)
    return PhasePoint(
        c * q.x - sn * q.y, sn * q.x + c * q.y, q.z,
        c * q.u - sn * q.v, sn * q.u + c * q.v, q.w,
    )


def _march(chart: Chart, rho: float, eps: int, theta: float, t: float,
           potential: Potential, j: float, h: float) -> FlowState:
    geom = _fiber_geometry(potential, chart, j, h)
    if rho < geom.rho_min - 1e-12:
        raise OutsideFiber(f"rho = {rho} below the allowed band of the fiber")
    remaining = t
    # position within the branch, measured as time from the turning point
    base = geom.quarter_time if rho >= 1.0 else geom.time_from_min(rho)
    theta_base = geom.quarter_theta if rho >= 1.0 else geom.theta_from_min(rho)
    for _ in range(10 ** 6):
        if eps < 0:
            if remaining < base:
                rho_t = geom.rho_at_time(base - remaining)
                theta += theta_base - geom.theta_from_min(rho_t)
                rho = rho_t
                break
            # descend to the turning point, reflect
            remaining -= base
            theta += theta_base
            rho, eps, base, theta_base = geom.rho_min, 1, 0.0, 0.0
        else:
            seg = geom.quarter_time - base
            if remaining < seg:
                rho_t = geom.rho_at_time(base + remaining)
                theta += geom.theta_from_min(rho_t) - theta_base
                rho = rho_t
                break
            # ascend to the equator, cross into the other hemisphere
            remaining -= seg
            theta += geom.quarter_theta - theta_base
            chart = _other(chart)
            geom = _fiber_geometry(potential, chart, j, h)
            rho, eps = 1.0, -1
            base, theta_base = geom.quarter_time, geom.quarter_theta
    else:
        raise BranchExhausted("flow did not terminate; time span too long")
    return _state_from(chart, rho, eps, theta, j, h, geom)


def _meridian_flow(p: PhasePoint, t: float, potential: Potential, h: float) -> FlowState:
    """j = 0 with enough energy to pass the poles: great-circle rotation."""
    rho0 = math.hypot(p.x, p.y)
    alpha = math.atan2(p.y, p.x) if rho0 > 1e-12 else (
        math.atan2(-p.v, -p.u) if p.z > 0 else math.atan2(p.v, p.u)
    )
    psi0 = math.atan2(p.z, rho0)
    psidot0 = p.w * rho0 + (-p.u * math.cos(alpha) - p.v * math.sin(alpha)) * p.z
    if psidot0 < 0.0:
        alpha += math.pi
        psi0 = math.pi - psi0
    speed = lambda psi: math.sqrt(2.0 * (h - potential.v(math.sin(psi))))
    integrand = lambda psi: 1.0 / speed(psi)

    def time_to(psi: float) -> float:
        return _quad(integrand, psi0, psi)[0]

    period = _quad(integrand, 0.0, 2.0 * math.pi)[0]
    loops = math.floor(t / period)
    rem = t - loops * period
    psi_t = brentq(lambda ps: time_to(ps) - rem, psi0, psi0 + 2.0 * math.pi,
                   xtol=1e-13, rtol=8.9e-16)
    sp, cp = math.sin(psi_t), math.cos(psi_t)
    pd = speed(psi_t)
    pt = PhasePoint(
        cp * math.cos(alpha), cp * math.sin(alpha), sp,
        -pd * sp * math.cos(alpha), -pd * sp * math.sin(alpha), pd * cp,
    )
    if abs(pt.z) < 1e-12:
        # keep the result off the chart seam
        pt = PhasePoint(pt.x, pt.y, math.copysign(1e-12, pt.w if pt.w else 1.0),
                        pt.u, pt.v, pt.w)
    return FlowState.from_phase_point(pt, potential)


def joint_flow(s0: FlowState, s: float, t: float, potential: Potential) -> FlowState:
    """Composition of the rotation flow by s and the energy flow by t."""
    return flow_J(flow_H(s0, t, potential), s)


# ---------------------------------------------------------------------------
# single-branch radial solution

def R_eps(t: float, rho0: float, j: float, h: float, potential: Potential, eps: int) -> float:
    """rho(t) on a single monotone branch (north profile).

    Valid while the motion stays between the turning point and the equator;
    crossing either raises BranchExhausted.
    """
    _guard_fiber(j, h)
    geom = _fiber_geometry(potential, Chart.NORTH, j, h)
    if not geom.rho_min - 1e-12 <= rho0 <= 1.0:
        raise OutsideFiber(f"rho0 = {rho0} outside [{geom.rho_min}, 1]")
    base = geom.time_from_min(rho0)
    target = base + eps * t
    if target < -1e-12:
        raise BranchExhausted("time passes the turning point")
    if target > geom.quarter_time + 1e-12:
        raise BranchExhausted("time passes the equator crossing")
    return geom.rho_at_time(target)
