"""Elliptic integrals of the first and third kinds and Jacobi amplitude functions.

Everything is built on Carlson's symmetric forms R_F, R_C, R_J evaluated by the
duplication theorem, which stays accurate uniformly in the modulus, including
close to k = 1 where the period formulas downstream need it.

Conventions (modulus, not parameter):

    F(gamma, k)      = integral_0^gamma (1 - k^2 sin^2 t)^(-1/2) dt
    K(k)             = F(pi/2, k)
    Pi(gamma, n, k)  = integral_0^gamma [(1 - n sin^2 t) sqrt(1 - k^2 sin^2 t)]^(-1) dt
    Pi(n, k)         = Pi(pi/2, n, k)
    am(f, k)         = the inverse of F in gamma, extended to all real f
    sn(f, k)         = sin(am(f, k)),   cn(f, k) = cos(am(f, k))

The argument named ``k`` is always the modulus that appears squared inside the
square root; no parameter-m interface is exposed.

Incomplete integrals are extended beyond |gamma| <= pi/2 by quasi-periodicity:
F(gamma + pi, k) = F(gamma, k) + 2 K(k), and likewise for Pi with 2 Pi(n, k).
"""

from __future__ import annotations

import csv
import math
import os

from .errors import DomainError

# Complete integrals and inversion refuse moduli inside this band below 1;
# downstream period formulas divide by the results.
K_GUARD = 1.0 - 1e-12

# Duplication stops once relative deviations are below this; the tail series
# then contributes O(errtol^6), far below double precision.
_ERRTOL = 5e-4

_DEBUG_PATH = os.environ.get("SPHPEND_ELLIPTIC_DEBUG")


def _debug_dump(func: str, args: tuple, result: float) -> None:
    with open(_DEBUG_PATH, "a", newline="") as fh:
        csv.writer(fh).writerow([func, *(f"{a:.17g}" for a in args), f"{result:.17g}"])


def _rf(x: float, y: float, z: float) -> float:
    """Carlson R_F(x, y, z), args nonnegative, at most one zero."""
    xn, yn, zn = x, y, z
    A = (xn + yn + zn) / 3.0
    # scale-aware convergence threshold
    for _ in range(200):
        if A != 0.0 and max(abs(A - xn), abs(A - yn), abs(A - zn)) < _ERRTOL * abs(A):
            break
        sx, sy, sz = math.sqrt(xn), math.sqrt(yn), math.sqrt(zn)
        lam = sx * sy + sx * sz + sy * sz
        xn = 0.25 * (xn + lam)
        yn = 0.25 * (yn + lam)
        zn = 0.25 * (zn + lam)
        A = (xn + yn + zn) / 3.0
    X = (A - xn) / A
    Y = (A - yn) / A
    Z = -(X + Y)
    E2 = X * Y - Z * Z
    E3 = X * Y * Z
    return (
        1.0
        - E2 / 10.0
        + E3 / 14.0
        + E2 * E2 / 24.0
        - 3.0 * E2 * E3 / 44.0
        - 5.0 * E2 ** 3 / 208.0
        + 3.0 * E3 * E3 / 104.0
        + E2 * E2 * E3 / 16.0
    ) / math.sqrt(A)


def _rc(x: float, y: float) -> float:
    """Carlson R_C(x, y) for x >= 0, y > 0 (no principal-value branch)."""
    if y <= 0.0:
        raise DomainError("R_C requires y > 0 here")
    if x == y:
        return 1.0 / math.sqrt(x)
    if x == 0.0:
        return 0.5 * math.pi / math.sqrt(y)
    if x < y:
        d = y - x
        return math.atan(math.sqrt(d / x)) / math.sqrt(d)
    d = x - y
    s = math.sqrt(d / x)
    if s < 0.5:
        return (math.log1p(s) - math.log1p(-s)) / (2.0 * math.sqrt(d))
    return math.log((math.sqrt(x) + math.sqrt(d)) / math.sqrt(y)) / math.sqrt(d)


def _rc1p(e: float) -> float:
    """R_C(1, 1 + e) for e > -1."""
    if abs(e) < 1e-4:
        # Taylor tail; next term ~ e^5
        return 1.0 + e * (-1.0 / 3.0 + e * (0.2 + e * (-1.0 / 7.0 + e / 9.0)))
    return _rc(1.0, 1.0 + e)


def _rj(x: float, y: float, z: float, p: float) -> float:
    """Carlson R_J(x, y, z, p), args nonnegative (one of x,y,z may be 0), p > 0."""
    xn, yn, zn, pn = x, y, z, p
    A = (xn + yn + zn + 2.0 * pn) / 5.0
    delta = (pn - xn) * (pn - yn) * (pn - zn)
    fac = 1.0
    total = 0.0
    for _ in range(200):
        if A != 0.0 and max(
            abs(A - xn), abs(A - yn), abs(A - zn), abs(A - pn)
        ) < _ERRTOL * abs(A):
            break
        sx, sy, sz = math.sqrt(xn), math.sqrt(yn), math.sqrt(zn)
        sp = math.sqrt(pn)
        lam = sx * sy + sx * sz + sy * sz
        dn = (sp + sx) * (sp + sy) * (sp + sz)
        en = delta / (dn * dn)
        total += fac / dn * _rc1p(en)
        fac *= 0.25
        delta /= 64.0
        xn = 0.25 * (xn + lam)
        yn = 0.25 * (yn + lam)
        zn = 0.25 * (zn + lam)
        pn = 0.25 * (pn + lam)
        A = (xn + yn + zn + 2.0 * pn) / 5.0
    X = (A - xn) / A
    Y = (A - yn) / A
    Z = (A - zn) / A
    P = -0.5 * (X + Y + Z)
    E2 = X * Y + X * Z + Y * Z - 3.0 * P * P
    E3 = X * Y * Z + 2.0 * E2 * P + 4.0 * P ** 3
    E4 = (2.0 * X * Y * Z + E2 * P + 3.0 * P ** 3) * P
    E5 = X * Y * Z * P * P
    series = (
        1.0
        - 3.0 * E2 / 14.0
        + E3 / 6.0
        + 9.0 * E2 * E2 / 88.0
        - 3.0 * E4 / 22.0
        - 9.0 * E2 * E3 / 52.0
        + 3.0 * E5 / 26.0
    )
    return 6.0 * total + fac * series / (A * math.sqrt(A))


def _check_modulus(k: float, complete: bool) -> None:
    if not 0.0 <= k:
        raise DomainError(f"modulus k = {k} must be nonnegative")
    if complete:
        if k > K_GUARD:
            raise DomainError(f"modulus k = {k} inside the k -> 1 guard band")
    elif k > 1.0:
        raise DomainError(f"modulus k = {k} exceeds 1")


def ellint_K(k: float) -> float:
    """Complete elliptic integral of the first kind K(k)."""
    _check_modulus(k, complete=True)
    res = _rf(0.0, (1.0 - k) * (1.0 + k), 1.0)
    if _DEBUG_PATH:
        _debug_dump("K", (k,), res)
    return res


def ellint_F(gamma: float, k: float) -> float:
    """Incomplete elliptic integral of the first kind F(gamma, k).

    For |gamma| > pi/2 uses F(gamma + m*pi, k) = F(gamma, k) + 2 m K(k).
    """
    if abs(gamma) <= 0.5 * math.pi + 1e-14:
        _check_modulus(k, complete=False)
        m = 0
        r = gamma
    else:
        _check_modulus(k, complete=True)
        m = math.floor((gamma + 0.5 * math.pi) / math.pi)
        r = gamma - m * math.pi
    s = math.sin(r)
    if k * abs(s) >= 1.0:
        if k * abs(s) > 1.0 or abs(abs(r) - 0.5 * math.pi) > 1e-14:
            raise DomainError("integrand pole: k^2 sin^2 gamma reaches 1 on the range")
        raise DomainError("F(pi/2, 1) diverges")
    c2 = math.cos(r) ** 2
    res = s * _rf(c2, 1.0 - (k * s) ** 2, 1.0)
    if m:
        res += 2.0 * m * ellint_K(k)
    if _DEBUG_PATH:
        _debug_dump("F", (gamma, k), res)
    return res


def ellint_Pi_complete(n: float, k: float) -> float:
    """Complete elliptic integral of the third kind Pi(n, k), n < 1."""
    _check_modulus(k, complete=True)
    if n >= 1.0:
        raise DomainError(f"characteristic n = {n} must be < 1")
    y = (1.0 - k) * (1.0 + k)
    res = _rf(0.0, y, 1.0)
    if n != 0.0:
        res += n / 3.0 * _rj(0.0, y, 1.0, 1.0 - n)
    if _DEBUG_PATH:
        _debug_dump("Pi_complete", (n, k), res)
    return res


def ellint_Pi_complete_from_complement(n_complement: float, k: float) -> float:
    """Pi(n, k) with n = 1 - n_complement supplied via its complement.

    Avoids the catastrophic loss of the tiny 1 - n when the characteristic
    approaches 1 (periods near the j = 0 axis need exactly this regime).
    """
    _check_modulus(k, complete=True)
    if n_complement <= 0.0:
        raise DomainError(f"characteristic complement {n_complement} must be > 0")
    y = (1.0 - k) * (1.0 + k)
    n = 1.0 - n_complement
    res = _rf(0.0, y, 1.0)
    if n != 0.0:
        res += n / 3.0 * _rj(0.0, y, 1.0, n_complement)
    return res


def ellint_Pi(gamma: float, n: float, k: float) -> float:
    """Incomplete elliptic integral of the third kind Pi(gamma, n, k).

    Extended beyond |gamma| <= pi/2 with period 2 Pi(n, k) per half turn.
    """
    if abs(gamma) <= 0.5 * math.pi + 1e-14:
        _check_modulus(k, complete=False)
        m = 0
        r = gamma
    else:
        _check_modulus(k, complete=True)
        if n >= 1.0:
            raise DomainError("characteristic n >= 1 with winding gamma")
        m = math.floor((gamma + 0.5 * math.pi) / math.pi)
        r = gamma - m * math.pi
    s = math.sin(r)
    s2 = s * s
    if n * s2 >= 1.0:
        raise DomainError("characteristic pole: n sin^2 gamma reaches 1 on the range")
    if k * abs(s) >= 1.0:
        if k * abs(s) > 1.0 or abs(abs(r) - 0.5 * math.pi) > 1e-14:
            raise DomainError("integrand pole: k^2 sin^2 gamma reaches 1 on the range")
        raise DomainError("Pi(pi/2, n, 1) diverges")
    c2 = math.cos(r) ** 2
    y = 1.0 - (k * s) ** 2
    res = s * _rf(c2, y, 1.0)
    if n != 0.0:
        res += n / 3.0 * s * s2 * _rj(c2, y, 1.0, 1.0 - n * s2)
    if m:
        res += 2.0 * m * ellint_Pi_complete(n, k)
    if _DEBUG_PATH:
        _debug_dump("Pi", (gamma, n, k), res)
    return res


def jacobi_am(f: float, k: float) -> float:
    """Jacobi amplitude: the strictly increasing gamma with F(gamma, k) = f."""
    _check_modulus(k, complete=True)
    if f == 0.0:
        return 0.0
    K = ellint_K(k)
    m = math.floor((f + K) / (2.0 * K))
    r = f - 2.0 * m * K
    # invert F on the principal branch; F' = 1/sqrt(1 - k^2 sin^2) >= 1
    if k < 0.9:
        g = r * 0.5 * math.pi / K
    else:
        # Gudermannian seed, exact as k -> 1
        g = 2.0 * math.atan(math.exp(r)) - 0.5 * math.pi
    g = min(max(g, -0.5 * math.pi), 0.5 * math.pi)
    lo, hi = -0.5 * math.pi, 0.5 * math.pi
    for _ in range(60):
        s = math.sin(g)
        resid = ellint_F(g, k) - r
        if resid > 0.0:
            hi = min(hi, g)
        else:
            lo = max(lo, g)
        step = -resid * math.sqrt(max(1.0 - (k * s) ** 2, 0.0))
        if abs(step) < 1e-16 * max(1.0, abs(g)):
            g += step
            break
        g_new = g + step
        if not lo <= g_new <= hi:
            g_new = 0.5 * (lo + hi)
        if g_new == g:
            break
        g = g_new
    res = m * math.pi + g
    if _DEBUG_PATH:
        _debug_dump("am", (f, k), res)
    return res


def jacobi_sn(f: float, k: float) -> float:
    """Jacobi elliptic sine sn(f, k) = sin(am(f, k))."""
    return math.sin(jacobi_am(f, k))


def jacobi_cn(f: float, k: float) -> float:
    """Jacobi elliptic cosine cn(f, k) = cos(am(f, k))."""
    return math.cos(jacobi_am(f, k))


def jacobi_sn_cn_dn(f: float, k: float) -> tuple[float, float, float]:
    """sn, cn and dn = sqrt(1 - k^2 sn^2) from a single amplitude inversion."""
    g = jacobi_am(f, k)
    s = math.sin(g)
    return s, math.cos(g), math.sqrt(max(1.0 - (k * s) ** 2, 0.0))
