"""Single atom in a box of half-width 1 with a central barrier of half-width p.

Units: eps = hbar^2 pi^2 / (8 m L^2) = 1 and L = 1, so E = (4/pi^2) K_a^2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

ODD = "odd"
EVEN = "even"
SYMMETRIES = (ODD, EVEN)

RESIDUAL_TOL = 1e-10
MAX_NEWTON = 50
SEAM_TOL = 1e-8


class ContinuationStall(RuntimeError):
    """Newton polish failed even after the step was refined to the minimum size."""


@dataclass(frozen=True)
class GasBoxParams:
    p: float = 0.01
    epsilon: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.p < 1.0:
            raise ValueError(f"p must lie in (0, 1), got {self.p}")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")


@dataclass(frozen=True)
class Eigenstate:
    symmetry: str
    level: int
    V: float
    K_a: float
    p: float

    @property
    def energy(self) -> float:
        return energy_from_wavenumber(self.K_a)

    @property
    def kappa_sq(self) -> float:
        """K_b^2 when positive (E > V), -K_c^2 when negative."""
        return self.K_a**2 - math.pi**2 * self.V / 4.0


def _check_symmetry(symmetry: str) -> None:
    if symmetry not in SYMMETRIES:
        raise ValueError(f"symmetry must be 'odd' or 'even', got {symmetry!r}")


def _check_level(l: int) -> None:
    if int(l) != l or l < 1:
        raise ValueError(f"level must be a positive integer, got {l}")


def energy_from_wavenumber(K_a: float) -> float:
    return 4.0 * K_a**2 / math.pi**2


def wavenumber_from_energy(E: float) -> float:
    return 0.5 * math.pi * math.sqrt(E)


def unperturbed_energy(symmetry: str, l: int) -> float:
    """Infinite square well levels: odd 4l^2, even (2l-1)^2."""
    _check_symmetry(symmetry)
    _check_level(l)
    if symmetry == ODD:
        return 4.0 * l * l
    return float((2 * l - 1) ** 2)


def unperturbed_wavenumber(symmetry: str, l: int) -> float:
    _check_symmetry(symmetry)
    _check_level(l)
    return l * math.pi if symmetry == ODD else (2 * l - 1) * math.pi / 2.0


def exact_seam_wavenumber(l: int, p: float) -> float:
    """Even-symmetry solution with E = V exactly."""
    return (2 * l - 1) * math.pi / (2.0 * (1.0 - p))


# Entire functions of u = kappa^2. For u < 0 they continue to cosh/sinh,
# so a single expression covers E > V, E = V and E < V.

def _series_ok(u, p):
    return abs(u) * p * p < 1e-3


def _c(u: float, p: float) -> float:
    if u > 0:
        return math.cos(math.sqrt(u) * p)
    return math.cosh(math.sqrt(-u) * p)


def _s(u: float, p: float) -> float:
    if _series_ok(u, p):
        x = -u * p * p
        return p * (1 + x / 6 + x * x / 120 + x**3 / 5040 + x**4 / 362880)
    if u > 0:
        k = math.sqrt(u)
        return math.sin(k * p) / k
    k = math.sqrt(-u)
    return math.sinh(k * p) / k


def _ds(u: float, p: float) -> float:
    if _series_ok(u, p):
        x = -u * p * p
        return -p**3 * (1 / 6 + 2 * x / 120 + 3 * x * x / 5040 + 4 * x**3 / 362880)
    return (p * _c(u, p) - _s(u, p)) / (2.0 * u)


def _dc(u: float, p: float) -> float:
    return -0.5 * p * _s(u, p)


def _g(u: float, p: float) -> float:
    # kappa * sin(kappa p), smooth through u = 0
    return u * _s(u, p)


def _dg(u: float, p: float) -> float:
    return 0.5 * (_s(u, p) + p * _c(u, p))


def _residual_parts(symmetry: str, K_a: float, V: float, p: float):
    theta = K_a * (1.0 - p)
    u = K_a * K_a - math.pi**2 * V / 4.0
    sn, cs = math.sin(theta), math.cos(theta)
    c, s = _c(u, p), _s(u, p)
    dc, ds = _dc(u, p), _ds(u, p)
    du_dV = -math.pi**2 / 4.0
    if symmetry == ODD:
        # sin(theta) cos(kp) + K_a cos(theta) sin(kp)/k
        f = sn * c + K_a * cs * s
        f_u = sn * dc + K_a * cs * ds
        f_K = ((1 - p) * cs * c + cs * s - K_a * (1 - p) * sn * s) + f_u * 2 * K_a
    else:
        # cos(theta) cos(kp) - sin(theta) k sin(kp) / K_a
        g, dg = _g(u, p), _dg(u, p)
        f = cs * c - sn * g / K_a
        f_u = cs * dc - sn * dg / K_a
        f_K = (-(1 - p) * sn * c - (1 - p) * cs * g / K_a + sn * g / K_a**2) + f_u * 2 * K_a
    return f, f_K, f_u * du_dV


def continuity_residual(symmetry: str, K_a: float, V: float, p: float = 0.01) -> float:
    """Residual of the matching conditions at X = -p; zero at an eigenvalue.

    The same expression is used whether E is above, at or below V, so the
    residual is continuous (indeed analytic) across the E = V seam.
    """
    _check_symmetry(symmetry)
    if K_a <= 0:
        raise ValueError("K_a must be positive")
    if V < 0:
        raise ValueError("V must be non-negative")
    return _residual_parts(symmetry, K_a, V, p)[0]


def theta_bracket(symmetry: str, l: int) -> tuple[float, float]:
    """Interval of theta = K_a(1-p) that contains exactly one root for all V >= 0."""
    if symmetry == ODD:
        return (l - 0.5) * math.pi, l * math.pi
    return (l - 1) * math.pi, l * math.pi


def _in_bracket(symmetry, l, K_a, p):
    lo, hi = theta_bracket(symmetry, l)
    theta = K_a * (1 - p)
    return lo < theta <= hi if symmetry == ODD else lo < theta < hi


def _newton(symmetry, l, K0, V, p):
    K = K0
    for _ in range(MAX_NEWTON):
        f, f_K, _ = _residual_parts(symmetry, K, V, p)
        if abs(f) < RESIDUAL_TOL:
            return K
        if f_K == 0 or not math.isfinite(f_K):
            return None
        K = K - f / f_K
        if not (K > 0 and _in_bracket(symmetry, l, K, p)):
            return None
    f = _residual_parts(symmetry, K, V, p)[0]
    return K if abs(f) < RESIDUAL_TOL else None


def _continuation_grid(V: float, growth: float = 1.3, v_start: float = 1e-3) -> list[float]:
    if V <= 0:
        return []
    pts = []
    v = min(V, v_start)
    while v < V:
        pts.append(v)
        v *= growth
    pts.append(V)
    return pts


def _snap(symmetry, l, K, V, p):
    if symmetry == EVEN:
        K_exact = exact_seam_wavenumber(l, p)
        if abs(energy_from_wavenumber(K_exact) - V) < SEAM_TOL:
            return K_exact
    return K


def continue_levels(symmetry: str, l: int, V_values, p: float = 0.01,
                    min_step: float = 1e-12) -> list[Eigenstate]:
    """Follow one level from V = 0 through the increasing values V_values.

    Predictor dK/dV = -f_V/f_K, Newton corrector, step halving on failure or
    when the corrector jumps out of the level's own bracket.
    """
    _check_symmetry(symmetry)
    _check_level(l)
    GasBoxParams(p=p)
    V_values = [float(v) for v in V_values]
    if any(v < 0 for v in V_values):
        raise ValueError("V must be non-negative")
    if any(b < a for a, b in zip(V_values, V_values[1:])):
        raise ValueError("V_values must be nondecreasing")

    K = unperturbed_wavenumber(symmetry, l)
    V_cur = 0.0
    out = []
    for target in V_values:
        waypoints = [v for v in _continuation_grid(target) if v > V_cur]
        for v_next in waypoints:
            while V_cur < v_next:
                dV = v_next - V_cur
                while True:
                    f, f_K, f_V = _residual_parts(symmetry, K, V_cur, p)
                    K_pred = K - f_V / f_K * dV
                    if K_pred <= 0 or not _in_bracket(symmetry, l, K_pred, p):
                        K_pred = K
                    K_new = _newton(symmetry, l, K_pred, V_cur + dV, p)
                    if K_new is not None:
                        break
                    dV *= 0.5
                    if dV < min_step * max(1.0, V_cur):
                        raise ContinuationStall(
                            f"{symmetry} l={l}: no convergence near V={V_cur:.6g}")
                K = K_new
                V_cur = V_cur + dV if V_cur + dV < v_next else v_next
        K = _snap(symmetry, l, K, target, p)
        out.append(Eigenstate(symmetry, int(l), target, K, p))
    return out


def solve_eigenvalue(symmetry: str, l: int, V: float, p: float = 0.01) -> Eigenstate:
    """Eigenstate at barrier height V, continued from the V = 0 level."""
    return continue_levels(symmetry, l, [V], p)[0]


def kc_p(V: float, p: float) -> float:
    """K_c p = d sqrt(2 m V) / hbar written in eps units."""
    return 0.5 * math.pi * math.sqrt(V) * p


def limit_energy(l: int, p: float = 0.01) -> float:
    return (2.0 * l / (1.0 - p)) ** 2


def hba_energy(symmetry: str, l: int, V: float, p: float = 0.01) -> float:
    """High-barrier asymptotic energy (evaluated regardless of whether V >> E)."""
    _check_symmetry(symmetry)
    _check_level(l)
    if V <= 0:
        raise ValueError("V must be positive")
    Kc = 0.5 * math.pi * math.sqrt(V)
    tail = 2.0 * math.exp(-2.0 * Kc * p)
    sgn = -1.0 if symmetry == ODD else 1.0
    return limit_energy(l, p) * (1.0 - 2.0 * (1.0 + sgn * tail) / (Kc * (1.0 - p)))


def hba_splitting(l: int, V: float, p: float = 0.01) -> float:
    if V <= 0:
        raise ValueError("V must be positive")
    Kc = 0.5 * math.pi * math.sqrt(V)
    return (4.0 * l / (1.0 - p)) ** 2 * math.exp(-2.0 * Kc * p) / (Kc * (1.0 - p))


def zurek_energy(l: int, V: float, p: float = 0.01) -> tuple[float, float]:
    """(E_Z, Delta_Z); the pair is E_Z + Delta_Z (odd) and E_Z - Delta_Z (even)."""
    if V <= 0:
        raise ValueError("V must be positive")
    _check_level(l)
    E_Z = limit_energy(l, p)
    delta = (4.0 / (1.0 - p)) ** 2 * math.exp(-2.0 * kc_p(V, p)) / math.pi
    return E_Z, delta


def _inner_sq_odd(u, p):
    # int_{-p}^{p} (sin(kX)/k)^2 dX = (2kp - sin 2kp) / (2 k^3)
    if _series_ok(u, p):
        x = -u * p * p
        return p**3 * (2 / 3 + 2 * x / 15 + 4 * x * x / 315 + 2 * x**3 / 2835)
    if u > 0:
        k = math.sqrt(u)
        return (2 * k * p - math.sin(2 * k * p)) / (2 * k**3)
    k = math.sqrt(-u)
    return (math.sinh(2 * k * p) - 2 * k * p) / (2 * k**3)


def _inner_sq_even(u, p):
    # int_{-p}^{p} cos^2(kX) dX = p + sin(2kp)/(2k)
    return p + _c(u, p) * _s(u, p)


def _amplitudes(state: Eigenstate):
    p, K = state.p, state.K_a
    theta = K * (1 - p)
    u = state.kappa_sq
    c, s = _c(u, p), _s(u, p)
    if state.symmetry == ODD:
        # match at X=-p: sin(theta) = -B s, K cos(theta) = B c
        B = -math.sin(theta) / s if abs(s) * K > abs(c) else K * math.cos(theta) / c
        inner = B * B * _inner_sq_odd(u, p)
    else:
        B = math.sin(theta) / c
        inner = B * B * _inner_sq_even(u, p)
    outer = (1 - p) / 2 - math.sin(2 * theta) / (4 * K)
    norm = math.sqrt(2 * outer + inner)
    return B, norm


def wavefunction(state: Eigenstate, X):
    """Normalized amplitude on [-1, 1]; scalar or array X."""
    Xa = np.asarray(X, dtype=float)
    if np.any(np.abs(Xa) > 1 + 1e-12):
        raise ValueError("X must lie in [-1, 1]")
    p, K = state.p, state.K_a
    u = state.kappa_sq
    B, norm = _amplitudes(state)
    sign = -1.0 if state.symmetry == ODD else 1.0

    out = np.empty_like(Xa)
    left = Xa <= -p
    right = Xa >= p
    mid = ~(left | right)
    out[left] = np.sin(K * (1 + Xa[left]))
    out[right] = sign * np.sin(K * (1 - Xa[right]))
    xm = Xa[mid]
    if u > 0:
        k = math.sqrt(u)
        inner = np.sin(k * xm) / k if state.symmetry == ODD else np.cos(k * xm)
    elif u < 0:
        k = math.sqrt(-u)
        inner = np.sinh(k * xm) / k if state.symmetry == ODD else np.cosh(k * xm)
    else:
        inner = xm.copy() if state.symmetry == ODD else np.ones_like(xm)
    out[mid] = B * inner
    out /= norm
    return float(out) if out.ndim == 0 else out


def norm_by_quadrature(state: Eigenstate) -> float:
    p = state.p
    f = lambda x: wavefunction(state, x) ** 2
    total = 0.0
    for a, b in ((-1.0, -p), (-p, p), (p, 1.0)):
        val, _ = integrate.quad(f, a, b, epsabs=1e-13, epsrel=1e-12, limit=200)
        total += val
    return total
