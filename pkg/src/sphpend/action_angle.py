"""Period lattice, action and angle coordinates for the quadratic potential.

On a regular fiber the rotation flow and the energy flow commute; the set of
(s, t) pairs whose joint flow is the identity on the fiber forms a rank-2
lattice generated by (2 pi, 0) and (S, T), where (with the fiber constants of
:mod:`sphpend.dynamics_quadratic`)

    T = 4 K(kappa) / omega
    S = -4 j PI(sigma_-, kappa) / omega

These are the oracle-validated forms: the reference integrator reproduces them
to its own accuracy, and T limits to pi sqrt(2) for small oscillations.  The
circulating variants with modulus k and scale 2^(1/4) sqrt(k^3 ell) are kept
available in ``period_scale_variants`` purely for comparison reports.

Actions: A1 = j, and A2 integrates the closed one-form (S dJ + T dH) / 2 pi
along the straight path from the singular value (0, 1) to (j, h), so that
grad A2 = (S, T) / 2 pi.  A2 is even in j and continuous, but has a kink on
the half line {j = 0, h > 1}: S jumps by -4 pi across it, which is the
monodromy of the doubly pinched fiber over (0, 1).

Angles: alpha1 = s - S t / T, alpha2 = 2 pi t / T, with (s, t) the section
times relative to the base point (1, 0, 0, 0, j, sqrt(2h - j^2)) and the zero
section being the upper (w > 0) half of the fiber over (1, 0, 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from .dynamics_quadratic import QuadraticFiberParams, fiber_params
from .elliptic import (
    K_GUARD,
    ellint_F,
    ellint_K,
    ellint_Pi,
    ellint_Pi_complete,
    ellint_Pi_complete_from_complement,
)
from .errors import DomainError, QuadratureFailure, StratumError
from .phase_space import PhasePoint, Potential, Stratum, classify, momentum_map

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class PeriodLattice:
    """Return-time lattice of one fiber: generators (1, 0) and (S, T)/2 pi."""

    j: float
    h: float
    rank: int
    S: float | None
    T: float | None

    @property
    def generators(self) -> list[tuple[float, float]]:
        if self.rank == 1:
            return [(1.0, 0.0)]
        return [(1.0, 0.0), (self.S / TWO_PI, self.T / TWO_PI)]


@dataclass(frozen=True)
class ActionAngleCoords:
    A1: float
    A2: float
    alpha1: float
    alpha2: float


def _periods_raw(j: float, h: float) -> tuple[float, float]:
    """Periods without stratum classification; stable arbitrarily close to the
    j = 0 axis where the characteristic complement 1 - n ~ j^2 underflows a
    direct subtraction."""
    D = math.hypot(1.0 - h, math.sqrt(2.0) * j)
    s = 1.0 + h + D
    ell_sq = 2.0 * h - j * j
    kappa = math.sqrt(2.0 * ell_sq) / s
    if kappa > K_GUARD:
        raise DomainError("modulus inside the k -> 1 guard band")
    omega = math.sqrt(s)
    T = 4.0 * ellint_K(kappa) / omega
    if j == 0.0:
        return 0.0, T
    if h <= 1.0:
        one_m_n = ((1.0 - h) + D + j * j) / s
    else:
        one_m_n = (2.0 * j * j / (D + h - 1.0) + j * j) / s
    S = -4.0 * j * ellint_Pi_complete_from_complement(one_m_n, kappa) / omega
    return S, T


def _periods_from_params(p: QuadraticFiberParams) -> tuple[float, float]:
    return _periods_raw(p.j, p.h)


def period_generators(j: float, h: float) -> PeriodLattice:
    """The period lattice over (j, h); rank 1 on the boundary stratum."""
    st = classify(j, h)
    if st is Stratum.ELLIPTIC_BOUNDARY:
        return PeriodLattice(j=j, h=h, rank=1, S=None, T=None)
    if st is not Stratum.REGULAR:
        raise StratumError(f"no period lattice at (j, h) = ({j}, {h}), stratum {st.value}")
    S, T = _periods_from_params(fiber_params(j, h))
    return PeriodLattice(j=j, h=h, rank=2, S=S, T=T)


def period_scale_variants(j: float, h: float) -> dict:
    """Shipped periods next to the circulating alternative conventions.

    ``root_ratio_modulus`` uses the root ratio k directly as the modulus with
    time scale 2^(1/4) sqrt(k^3 ell) and characteristic k ell / sqrt(2);
    ``axisymmetric_special`` is the j = 0 form 4 sqrt(2h) K(h^(-+1/2)).  Both
    disagree with the reference integrator; they are reported, not shipped.
    """
    p = fiber_params(j, h)
    S, T = _periods_from_params(p)
    pref = 2.0 ** 0.25 * math.sqrt(p.k ** 3 * p.ell)
    n_alt = p.k * p.ell / math.sqrt(2.0)
    alt_T = 4.0 * pref * ellint_K(p.k)
    alt_S = -4.0 * j * pref * ellint_Pi_complete(n_alt, p.k) if j != 0.0 and n_alt < 1.0 else 0.0
    special_T = None
    if j == 0.0:
        mod = math.sqrt(h) if h < 1.0 else 1.0 / math.sqrt(h)
        special_T = 4.0 * math.sqrt(2.0 * h) * ellint_K(mod)
    return {
        "validated": (S, T),
        "root_ratio_modulus": (alt_S, alt_T),
        "axisymmetric_special": special_T,
    }


# ---------------------------------------------------------------------------
# action A2

@lru_cache(maxsize=4096)
def action_A2(j: float, h: float) -> float:
    """Second action: path integral of (S dJ + T dH)/2 pi from (0, 1) to (j, h).

    The straight path J_tau = j tau, H_tau = 1 + (h - 1) tau stays inside the
    regular region for tau in (0, 1]; the tau = 0 endpoint carries a
    logarithmic singularity of T which the substitution tau = xi^2 softens to
    an integrable xi log xi.
    """
    if classify(j, h) is not Stratum.REGULAR:
        raise StratumError(f"A2 defined on regular fibers only, not ({j}, {h})")

    def integrand(xi: float) -> float:
        tau = xi * xi
        try:
            S_t, T_t = _periods_raw(j * tau, 1.0 + (h - 1.0) * tau)
        except DomainError:
            return 0.0  # tau below the modulus guard; the limit of the term is 0
        return (j * S_t + (h - 1.0) * T_t) / TWO_PI * 2.0 * xi

    out = quad(integrand, 0.0, 1.0, limit=200, epsabs=1e-11, epsrel=1e-11, full_output=1)
    val, err = out[0], out[1]
    if err > 1e-9 * max(1.0, abs(val)):
        raise QuadratureFailure(f"A2 path quadrature error {err:.2e}")
    return val


# ---------------------------------------------------------------------------
# section times and angles

def _require_regular(p: PhasePoint) -> QuadraticFiberParams:
    mv = momentum_map(p, Potential.quadratic())
    if mv.stratum is not Stratum.REGULAR:
        raise StratumError(f"point lies on stratum {mv.stratum.value}")
    return fiber_params(mv.j, mv.h)


def _section_pieces(p: PhasePoint, params: QuadraticFiberParams):
    """(F(g), PI(g), K, PI_c, theta, w-branch) shared by times and angles."""
    g = math.asin(min(1.0, max(-1.0, p.z / params.z_max)))
    Fg = ellint_F(g, params.kappa)
    Pg = ellint_Pi(g, params.n_char, params.kappa) if params.j != 0.0 else 0.0
    K = ellint_K(params.kappa)
    Pc = ellint_Pi_complete(params.n_char, params.kappa) if params.j != 0.0 else 0.0
    theta = math.atan2(p.y, p.x)
    return Fg, Pg, K, Pc, theta


def section_times(p: PhasePoint) -> tuple[float, float]:
    """Times (s, t) flowing the section point of the fiber onto p.

    Representatives are reduced to t in [0, T) and s in [0, 2 pi).  Points
    with w = 0 belong to the w >= 0 branch.  At the poles (reachable only on
    j = 0 fibers) the position azimuth is replaced by the momentum azimuth.
    """
    params = _require_regular(p)
    S, T = _periods_from_params(params)
    rho = math.hypot(p.x, p.y)
    if rho < 1e-9:
        # j = 0, h > 1 fiber through the poles; the canonical trajectory is
        # the meridian with azimuth 0, reaching the north pole at T/4 moving
        # in the -x direction and the south pole at 3T/4 moving in +x
        phi = math.atan2(p.v, p.u)
        if p.z > 0.0:
            t = 0.25 * T
            s = phi - math.pi
        else:
            t = 0.75 * T
            s = phi
    else:
        Fg, Pg, _, _, theta = _section_pieces(p, params)
        if p.w >= 0.0:
            t = Fg / params.omega
            s = theta - (params.j / params.omega) * Pg
        else:
            t = 0.5 * T - Fg / params.omega
            s = theta + 0.5 * S + (params.j / params.omega) * Pg
    # reduce by the lattice: (s, t) ~ (s + S, t + T) ~ (s + 2 pi, t)
    shift = math.floor(t / T)
    t -= shift * T
    s -= shift * S
    return s % TWO_PI, t


def angles(p: PhasePoint) -> tuple[float, float]:
    """Angle coordinates (alpha1, alpha2) of p, both in [0, 2 pi)."""
    params = _require_regular(p)
    rho = math.hypot(p.x, p.y)
    if rho < 1e-9:
        S, T = _periods_from_params(params)
        s, t = section_times(p)
        return (s - S * t / T) % TWO_PI, (TWO_PI * t / T) % TWO_PI
    Fg, Pg, K, Pc, theta = _section_pieces(p, params)
    jw = params.j / params.omega
    if p.w >= 0.0:
        a1 = theta - jw * (Pg - Pc * Fg / K)
        a2 = 0.5 * math.pi * Fg / K
    else:
        a1 = theta + jw * (Pg - Pc * Fg / K)
        a2 = math.pi - 0.5 * math.pi * Fg / K
    return a1 % TWO_PI, a2 % TWO_PI


def action_angle_coords(p: PhasePoint) -> ActionAngleCoords:
    """Full action-angle tuple (A1, A2, alpha1, alpha2) at p."""
    mv = momentum_map(p, Potential.quadratic())
    a1, a2 = angles(p)
    return ActionAngleCoords(A1=mv.j, A2=action_A2(mv.j, mv.h), alpha1=a1, alpha2=a2)


# ---------------------------------------------------------------------------
# monodromy: continuation of the lattice around the singular value

@dataclass(frozen=True)
class MonodromyResult:
    """Outcome of continuing the lattice basis around a closed loop.

    The continued second generator returns as the original one plus
    ``shear`` copies of (1, 0); ``matrix`` is the integer change of basis
    [[1, shear], [0, 1]] and ``raw_matrix`` the same entries as measured
    before rounding (off-diagonal from the straddled jump of S/2 pi, lower
    diagonal from the jump of T/2 pi, which must continue smoothly).
    """

    matrix: np.ndarray
    raw_matrix: np.ndarray
    shear: int


def monodromy_transition(
    loop_values: list[tuple[float, float]],
    period_fn=None,
    straddle: float = 1e-6,
) -> MonodromyResult:
    """Continue (S/2pi, T/2pi) along a closed loop of regular values.

    ``loop_values`` must start and end at the same (j, h).  ``period_fn`` maps
    (j, h) to (S, T); defaults to the closed-form generators, but a return-map
    measurement can be passed in to make the continuation fully empirical.
    The continued branch differs from the pointwise formula by integer
    multiples of 2 pi in S; each detected branch jump is re-measured with a
    tight straddle of the crossing to recover the shear before rounding.
    """
    if period_fn is None:
        period_fn = lambda j, h: _periods_from_params(fiber_params(j, h))
    vals = [period_fn(j, h) for (j, h) in loop_values]
    shear = 0
    ds_raw = 0.0
    dt_raw = 0.0
    for i in range(1, len(loop_values)):
        # integer correction that keeps the continued branch continuous
        m = round((vals[i - 1][0] - vals[i][0]) / TWO_PI)
        if m != 0:
            (j0, h0), (j1, h1) = loop_values[i - 1], loop_values[i]
            # locate the crossing of {j = 0} along the segment
            frac = j0 / (j0 - j1) if j0 != j1 else 0.5
            hc = h0 + frac * (h1 - h0)
            side = math.copysign(straddle, j0) if j0 != 0.0 else straddle
            before = period_fn(side, hc)
            after = period_fn(-side, hc)
            ds_raw += (before[0] - after[0]) / TWO_PI
            dt_raw += (before[1] - after[1]) / TWO_PI
            shear += m
    matrix = np.array([[1, shear], [0, 1]], dtype=int)
    raw = np.array([[1.0, ds_raw], [dt_raw, 1.0]])
    return MonodromyResult(matrix=matrix, raw_matrix=raw, shear=shear)


def focus_loop(radius_j: float = 0.4, radius_h: float = 0.35, n: int = 48) -> list[tuple[float, float]]:
    """An elliptical loop of regular values encircling the singular value (0, 1).

    Sample angles are offset by half a step so no sample lands exactly on the
    j = 0 axis, where the lattice branch is discontinuous.
    """
    pts = []
    for i in range(n + 1):
        ang = TWO_PI * (i + 0.5) / n
        pts.append((radius_j * math.cos(ang), 1.0 + radius_h * math.sin(ang)))
    return pts
