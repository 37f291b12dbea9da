"""Airy function Ai and its derivative, plus the negative real zeros.

Maclaurin series near the origin, Poincare asymptotic expansions further out.
"""
from __future__ import annotations

import math

import numpy as np

AI0 = 3.0 ** (-2.0 / 3.0) / math.gamma(2.0 / 3.0)
AIP0 = -(3.0 ** (-1.0 / 3.0)) / math.gamma(1.0 / 3.0)

DOMAIN = 20.0
POS_SPLIT = 5.5
# Truncated oscillatory expansion at |z| = 5.5 is only good to ~1e-8, so the
# series is kept out to 7 on the negative axis (cancellation there costs ~1e-11).
NEG_SPLIT = 7.0

_SQRT_PI = math.sqrt(math.pi)


class DomainTooLarge(ValueError):
    pass


def _uv_coeffs(n: int = 40):
    u = [1.0]
    for k in range(1, n):
        u.append(u[-1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216 * k))
    v = [1.0] + [-(6 * k + 1) / (6 * k - 1) * u[k] for k in range(1, n)]
    return u, v


_U, _V = _uv_coeffs()


def _maclaurin(z: float):
    z3 = z * z * z
    f = fp = 0.0
    g = gp = 0.0
    tf, tg = 1.0, z          # terms of f, g
    tfp, tgp = 0.0, 1.0      # terms of f', g'
    k = 0
    while True:
        f += tf
        g += tg
        fp += tfp
        gp += tgp
        k += 1
        tf *= z3 / ((3 * k - 1) * (3 * k))
        tg *= z3 / ((3 * k) * (3 * k + 1))
        tfp = z * z / 2.0 if k == 1 else tfp * z3 / ((3 * k - 3) * (3 * k - 1))
        tgp *= z3 / ((3 * k) * (3 * k - 2))
        if max(abs(tf), abs(tg), abs(tfp), abs(tgp)) < 1e-18 * max(1.0, abs(f), abs(g)):
            break
    ai = AI0 * f + AIP0 * g
    aip = AI0 * fp + AIP0 * gp
    return ai, aip


def _truncate(terms):
    """Sum an asymptotic series up to (not including) its smallest term."""
    total = 0.0
    prev = math.inf
    for t in terms:
        if abs(t) >= prev:
            break
        total += t
        prev = abs(t)
        if prev < 1e-17:
            break
    return total


def _asym_positive(z: float):
    zeta = 2.0 / 3.0 * z**1.5
    su = _truncate([(-1) ** k * _U[k] / zeta**k for k in range(len(_U))])
    sv = _truncate([(-1) ** k * _V[k] / zeta**k for k in range(len(_V))])
    e = math.exp(-zeta) / (2 * _SQRT_PI)
    return e * su / z**0.25, -e * sv * z**0.25


def _asym_negative(z: float):
    x = -z
    zeta = 2.0 / 3.0 * x**1.5
    phase = zeta - math.pi / 4
    n = len(_U) // 2
    ue = _truncate([(-1) ** k * _U[2 * k] / zeta ** (2 * k) for k in range(n)])
    uo = _truncate([(-1) ** k * _U[2 * k + 1] / zeta ** (2 * k + 1) for k in range(n)])
    ve = _truncate([(-1) ** k * _V[2 * k] / zeta ** (2 * k) for k in range(n)])
    vo = _truncate([(-1) ** k * _V[2 * k + 1] / zeta ** (2 * k + 1) for k in range(n)])
    c, s = math.cos(phase), math.sin(phase)
    ai = (c * ue + s * uo) / (_SQRT_PI * x**0.25)
    aip = x**0.25 * (s * ve - c * vo) / _SQRT_PI
    return ai, aip


def _airy_scalar(z: float):
    if not math.isfinite(z) or abs(z) > DOMAIN:
        raise DomainTooLarge(f"|z| = {abs(z):g} exceeds the supported domain {DOMAIN:g}")
    if z > POS_SPLIT:
        return _asym_positive(z)
    if z < -NEG_SPLIT:
        return _asym_negative(z)
    return _maclaurin(z)


def airy_value_and_derivative(z):
    """Return (Ai(z), Ai'(z)) for real |z| <= 20; arrays are handled elementwise."""
    if np.ndim(z) == 0:
        return _airy_scalar(float(z))
    za = np.asarray(z, dtype=float)
    ai = np.empty_like(za)
    aip = np.empty_like(za)
    for idx, val in np.ndenumerate(za):
        ai[idx], aip[idx] = _airy_scalar(float(val))
    return ai, aip


def _t(n):
    return 3.0 * np.pi * (4.0 * np.asarray(n, dtype=float) - 1.0) / 8.0


def asymptotic_zero(n):
    """a_n = -T(3 pi (4n-1)/8) with the standard large-t series for T."""
    t = _t(n)
    t2 = t ** -2.0
    T = t ** (2.0 / 3.0) * (1 + t2 * (5 / 48 + t2 * (-5 / 36 + t2 * (77125 / 82944
                                                                  - t2 * 108056875 / 6967296))))
    return -T


def leading_zero(n):
    """Crude large-n form -(3 pi n / 2)^(2/3)."""
    return -(1.5 * np.pi * np.asarray(n, dtype=float)) ** (2.0 / 3.0)


def asymptotic_derivative_at_zero(n):
    """Ai'(a_n) from its large-t expansion."""
    n = np.asarray(n)
    t = _t(n)
    t2 = t ** -2.0
    U = t ** (1.0 / 6.0) / _SQRT_PI * (1 + t2 * (5 / 48 + t2 * (-1525 / 4608
                                                                 + t2 * 2397875 / 6635520)))
    return np.where(n % 2 == 1, 1.0, -1.0) * U


def airy_zero(n: int, tol: float = 1e-14) -> float:
    """n-th negative zero of Ai.

    Newton polish from the asymptotic seed while the zero lies inside the
    evaluator's domain; beyond it the asymptotic series alone is already
    accurate far below 1e-10.
    """
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    z = float(asymptotic_zero(n))
    if z < -DOMAIN:
        return z
    for _ in range(50):
        ai, aip = _airy_scalar(z)
        step = ai / aip
        z -= step
        if abs(step) < tol * max(1.0, abs(z)):
            break
    return z


def airy_zeros(n_max: int) -> np.ndarray:
    """a_1..a_{n_max} as an array (vectorized asymptotic tail)."""
    n = np.arange(1, n_max + 1)
    out = asymptotic_zero(n)
    head = min(n_max, _N_NEWTON)
    out[:head] = _HEAD[:head]
    return out


def derivative_at_zero(n: int) -> float:
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    a = airy_zero(n)
    if a >= -DOMAIN:
        return _airy_scalar(a)[1]
    return float(asymptotic_derivative_at_zero(n))


_N_NEWTON = int(np.sum(asymptotic_zero(np.arange(1, 200)) >= -DOMAIN))
_HEAD = np.array([airy_zero(k) for k in range(1, _N_NEWTON + 1)])
