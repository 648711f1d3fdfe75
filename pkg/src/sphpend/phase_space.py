"""Constrained phase space of the spherical pendulum and its coordinate charts.

The phase space is the set of (x, y, z, u, v, w) in R^6 with

    x^2 + y^2 + z^2 = 1          (unit sphere)
    x u + y v + z w = 0          (momentum tangent to the sphere)

carrying the restriction of the ambient two-form dx^du + dy^dv + dz^dw.

Three charts cover it:

* North (z > 0) and South (z < 0), coordinates (rho, eta, theta, phi):
      (x, y) = rho (cos theta, sin theta),   z = +-sqrt(1 - rho^2)
      (u, v) = eta (cos phi, sin phi),       w = -+ rho eta cos(delta) / sqrt(1 - rho^2)
  with delta = phi - theta (upper sign North, lower South).
* Equator (|z| < 1, cos(delta) != 0), coordinates (z, w, theta, phi):
      (x, y) = sqrt(1 - z^2) (cos theta, sin theta)
      (u, v) = -z w / (sqrt(1 - z^2) cos delta) (cos phi, sin phi)
  used only for conversions; no flow is integrated in it.

The conserved pair is the vertical angular momentum and the mechanical energy

    J = x v - y u,    H = (u^2 + v^2 + w^2) / 2 + V(z),

whose joint values stratify into Regular / EllipticBoundary / FocusFocus /
Outside (classification is for the quadratic potential V = z^2, for which the
image is {h >= j^2/2} with the isolated singular value (0, 1)).
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ChartDomainError, DegenerateInput, InvalidPotential

# Hard classification band around the singular strata; the period formulas
# blow up exactly on them, so stay clear rather than evaluate garbage.
STRATUM_TOL = 1e-10

_SIGDIG = "{:.17g}"


class Chart(enum.Enum):
    NORTH = "north"
    SOUTH = "south"
    EQUATOR = "equator"


class Stratum(enum.Enum):
    REGULAR = "regular"
    ELLIPTIC_BOUNDARY = "elliptic_boundary"
    FOCUS_FOCUS = "focus_focus"
    OUTSIDE = "outside"


@dataclass(frozen=True)
class PhasePoint:
    """A point of the constrained phase space, stored in ambient coordinates."""

    x: float
    y: float
    z: float
    u: float
    v: float
    w: float

    def __post_init__(self):
        sphere = abs(self.x ** 2 + self.y ** 2 + self.z ** 2 - 1.0)
        tangency = abs(self.x * self.u + self.y * self.v + self.z * self.w)
        if sphere > 1e-10 or tangency > 1e-10:
            raise ValueError(
                f"constraint violation: |q.q - 1| = {sphere:.3e}, |q.p| = {tangency:.3e}"
            )

    @classmethod
    def from_array(cls, arr) -> "PhasePoint":
        return cls(*(float(a) for a in arr))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z, self.u, self.v, self.w])

    @property
    def position(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    @property
    def momentum(self) -> np.ndarray:
        return np.array([self.u, self.v, self.w])

    def constraint_residuals(self) -> tuple[float, float]:
        q, p = self.position, self.momentum
        return abs(float(q @ q) - 1.0), abs(float(q @ p))

    def to_json_str(self) -> str:
        fields = ((n, getattr(self, n)) for n in ("x", "y", "z", "u", "v", "w"))
        return "{" + ", ".join(f'"{n}": {_SIGDIG.format(v)}' for n, v in fields) + "}"

    @classmethod
    def from_json_str(cls, text: str) -> "PhasePoint":
        d = json.loads(text)
        return cls(*(float(d[n]) for n in ("x", "y", "z", "u", "v", "w")))

    def to_csv_row(self) -> str:
        return ",".join(
            _SIGDIG.format(getattr(self, n)) for n in ("x", "y", "z", "u", "v", "w")
        )


@dataclass(frozen=True)
class ChartPoint:
    """Chart identifier plus the four chart coordinates.

    For North/South the coordinate slots hold (rho, eta, theta, phi); for the
    Equator chart they hold (z, w, theta, phi).
    """

    chart: Chart
    a: float
    b: float
    theta: float
    phi: float

    def __post_init__(self):
        if self.chart in (Chart.NORTH, Chart.SOUTH):
            if not 0.0 <= self.a < 1.0:
                raise ChartDomainError(f"rho = {self.a} outside [0, 1)")
            if self.b < 0.0:
                raise ChartDomainError(f"eta = {self.b} negative")
        else:
            if not -1.0 < self.a < 1.0:
                raise ChartDomainError(f"z = {self.a} outside (-1, 1)")
            if math.cos(self.phi - self.theta) == 0.0:
                raise ChartDomainError("cos(phi - theta) = 0 in equator chart")

    @property
    def rho(self) -> float:
        if self.chart is Chart.EQUATOR:
            raise ChartDomainError("rho undefined in equator chart")
        return self.a

    @property
    def eta(self) -> float:
        if self.chart is Chart.EQUATOR:
            raise ChartDomainError("eta undefined in equator chart")
        return self.b

    @property
    def z(self) -> float:
        if self.chart is not Chart.EQUATOR:
            raise ChartDomainError("z is a derived quantity outside the equator chart")
        return self.a

    @property
    def w(self) -> float:
        if self.chart is not Chart.EQUATOR:
            raise ChartDomainError("w is a derived quantity outside the equator chart")
        return self.b

    @property
    def delta(self) -> float:
        return self.phi - self.theta

    def coords(self) -> np.ndarray:
        return np.array([self.a, self.b, self.theta, self.phi])


@dataclass(frozen=True)
class Potential:
    """Axisymmetric potential profile V(z) with its derivative.

    Both callables are supplied explicitly; nothing is differentiated
    numerically.  ``validate`` enforces the admissibility used by the
    stratification: unimodal on [-1, 1] with V(0) = 0 and V(+-1) = 1.
    """

    v: Callable[[float], float]
    dv: Callable[[float], float]
    name: str = "custom"

    @staticmethod
    def quadratic() -> "Potential":
        return _QUADRATIC

    @property
    def is_quadratic(self) -> bool:
        return self.name == "quadratic"

    def profile(self, rho: float, chart: Chart) -> float:
        """V along the chart, i.e. V(+-sqrt(1 - rho^2))."""
        zt = math.sqrt(max(1.0 - rho * rho, 0.0))
        return self.v(zt if chart is Chart.NORTH else -zt)

    def weighted_profile_slope(self, rho: float, chart: Chart) -> float:
        """(1 - rho^2) * d/drho V(+-sqrt(1 - rho^2)); smooth through rho = 1."""
        zt = math.sqrt(max(1.0 - rho * rho, 0.0))
        if chart is Chart.NORTH:
            return -rho * zt * self.dv(zt)
        return rho * zt * self.dv(-zt)

    def validate(self, grid_step: float = 1e-3) -> None:
        zs = np.arange(-1.0, 1.0 + grid_step / 2, grid_step)
        vals = np.array([self.v(z) for z in zs])
        if abs(self.v(0.0)) > 1e-9 or abs(self.v(1.0) - 1.0) > 1e-9 or abs(self.v(-1.0) - 1.0) > 1e-9:
            raise InvalidPotential("normalization requires V(0) = 0 and V(+-1) = 1")
        neg = zs <= 0.0
        if np.any(np.diff(vals[neg]) >= 0.0):
            raise InvalidPotential("V must be strictly decreasing on [-1, 0]")
        if np.any(np.diff(vals[~neg | (zs == 0.0)]) <= 0.0):
            raise InvalidPotential("V must be strictly increasing on [0, 1]")
        # spot-check that dv matches v
        for z in (-0.73, -0.2, 0.31, 0.86):
            fd = (self.v(z + 1e-6) - self.v(z - 1e-6)) / 2e-6
            if abs(fd - self.dv(z)) > 1e-4 * max(1.0, abs(fd)):
                raise InvalidPotential(f"dv inconsistent with v near z = {z}")


_QUADRATIC = Potential(v=lambda z: z * z, dv=lambda z: 2.0 * z, name="quadratic")


@dataclass(frozen=True)
class MomentumValue:
    j: float
    h: float
    stratum: Stratum


def project(raw) -> PhasePoint:
    """Nearest constrained point: normalize the position, strip the radial
    momentum component.  Idempotent."""
    arr = np.asarray(raw, dtype=float)
    if arr.shape != (6,):
        raise DegenerateInput("expected 6 ambient coordinates")
    q, p = arr[:3], arr[3:]
    norm = float(np.linalg.norm(q))
    if norm < 1e-8:
        raise DegenerateInput(f"position norm {norm:.3e} too small to normalize")
    q = q / norm
    p = p - float(q @ p) * q
    return PhasePoint(*q, *p)


def classify(j: float, h: float) -> Stratum:
    """Stratum of a momentum value (quadratic-potential semantics).

    The image is {h >= j^2/2}; its boundary parabola carries circle fibers and
    (0, 1) is the isolated singular value.  Values within ``STRATUM_TOL`` of a
    singular stratum are assigned to it.
    """
    gap = h - 0.5 * j * j
    if gap < -STRATUM_TOL:
        return Stratum.OUTSIDE
    if abs(gap) <= STRATUM_TOL:
        return Stratum.ELLIPTIC_BOUNDARY
    if math.hypot(j, h - 1.0) <= STRATUM_TOL:
        return Stratum.FOCUS_FOCUS
    return Stratum.REGULAR


def momentum_map(p: PhasePoint, potential: Potential) -> MomentumValue:
    j = p.x * p.v - p.y * p.u
    h = 0.5 * (p.u ** 2 + p.v ** 2 + p.w ** 2) + potential.v(p.z)
    return MomentumValue(j=j, h=h, stratum=classify(j, h))


def to_chart(p: PhasePoint, chart: Chart) -> ChartPoint:
    if chart is Chart.NORTH and p.z <= 0.0:
        raise ChartDomainError(f"z = {p.z} not in north chart (z > 0)")
    if chart is Chart.SOUTH and p.z >= 0.0:
        raise ChartDomainError(f"z = {p.z} not in south chart (z < 0)")
    theta = math.atan2(p.y, p.x) if (p.x, p.y) != (0.0, 0.0) else 0.0
    phi = math.atan2(p.v, p.u) if (p.u, p.v) != (0.0, 0.0) else 0.0
    if chart is Chart.EQUATOR:
        if abs(p.z) >= 1.0:
            raise ChartDomainError("|z| = 1 not in equator chart")
        if (p.u, p.v) == (0.0, 0.0):
            phi = theta  # any phi works when (u, v) = 0; keep cos(delta) != 0
        elif math.cos(phi - theta) == 0.0:
            raise ChartDomainError("cos(phi - theta) = 0: equator chart singular here")
        return ChartPoint(Chart.EQUATOR, p.z, p.w, theta, phi)
    rho = math.hypot(p.x, p.y)
    eta = math.hypot(p.u, p.v)
    return ChartPoint(chart, rho, eta, theta, phi)


def from_chart(c: ChartPoint) -> PhasePoint:
    if c.chart is Chart.EQUATOR:
        z, w = c.a, c.b
        rho = math.sqrt(1.0 - z * z)
        cd = math.cos(c.delta)
        if cd == 0.0:
            raise ChartDomainError("cos(phi - theta) = 0 in equator chart")
        pref = -z * w / (rho * cd)
        return PhasePoint(
            rho * math.cos(c.theta),
            rho * math.sin(c.theta),
            z,
            pref * math.cos(c.phi),
            pref * math.sin(c.phi),
            w,
        )
    rho, eta = c.a, c.b
    zt = math.sqrt(1.0 - rho * rho)
    sign = 1.0 if c.chart is Chart.NORTH else -1.0
    w = -sign * rho * eta * math.cos(c.delta) / zt
    return PhasePoint(
        rho * math.cos(c.theta),
        rho * math.sin(c.theta),
        sign * zt,
        eta * math.cos(c.phi),
        eta * math.sin(c.phi),
        w,
    )


def symplectic_matrix(c: ChartPoint) -> np.ndarray:
    """Coefficient matrix M of the chart two-form: omega(t1, t2) = t1^T M t2.

    Pullback of the ambient form through the chart parameterization.  Note the
    equator-chart dz^dtheta coefficient is w tan(delta); the (1 + z^2)/(1 - z^2)
    prefactor sometimes quoted for it does not survive direct computation.
    """
    M = np.zeros((4, 4))
    if c.chart in (Chart.NORTH, Chart.SOUTH):
        rho, eta = c.a, c.b
        if rho == 0.0:
            raise ChartDomainError("chart two-form degenerate at rho = 0")
        d = c.delta
        one = 1.0 - rho * rho
        M[0, 1] = math.cos(d) / one
        M[0, 2] = rho * rho * eta * math.sin(d) / one
        M[0, 3] = -eta * math.sin(d) / one
        M[1, 2] = -rho * math.sin(d)
        M[2, 3] = rho * eta * math.cos(d)
    else:
        z, w = c.a, c.b
        d = c.delta
        cd = math.cos(d)
        if cd == 0.0:
            raise ChartDomainError("chart two-form singular at cos(delta) = 0")
        td = math.tan(d)
        M[0, 1] = 1.0 / (1.0 - z * z)
        M[0, 2] = w * td
        M[1, 2] = z * td
        M[2, 3] = -z * w / (cd * cd)
    return M - M.T


def symplectic_eval(c: ChartPoint, t1, t2) -> float:
    """Evaluate the chart two-form on two tangent 4-vectors."""
    t1 = np.asarray(t1, dtype=float)
    t2 = np.asarray(t2, dtype=float)
    return float(t1 @ symplectic_matrix(c) @ t2)
