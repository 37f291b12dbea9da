"""Quantum weight resting on a floor in a uniform gravitational field.

Eigen-energies E_n = (h - a_n H) Mg with a_n the Airy zeros, shelf splitting
amplitudes, and thermal averages (closed forms alongside brute-force sums).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .airy import airy_zero, airy_zeros, leading_zero

BOLTZMANN_CUTOFF = 1e-12
_LOG_CUTOFF = -math.log(BOLTZMANN_CUTOFF)


@dataclass(frozen=True)
class WeightParams:
    Mg: float = 1.0
    H: float = 1.0
    T_W: float = 100.0
    # shelf insertion treated as costing no work (stated modeling assumption)
    negligible_shelf_work: bool = True

    def __post_init__(self):
        if self.Mg <= 0 or self.H <= 0 or self.T_W <= 0:
            raise ValueError("Mg, H and T_W must be positive")

    @property
    def MgH(self) -> float:
        return self.Mg * self.H


@dataclass(frozen=True)
class ShelfSplit:
    n: int
    h: float
    alpha: float
    beta: float


def weight_energy(n: int, h: float, params: WeightParams) -> float:
    if h < 0:
        raise ValueError("h must be non-negative")
    return (h - airy_zero(n) * params.H) * params.Mg


def level_count(params: WeightParams) -> int:
    """Levels needed before e^{(a_n - a_1) MgH / T_W} drops below the cutoff."""
    span = _LOG_CUTOFF * params.T_W / params.MgH + abs(airy_zero(1))
    # invert a_n ~ -(3 pi n / 2)^(2/3) and pad
    return int(span**1.5 / (1.5 * math.pi)) + 10


def _alpha_sq(n, h, H):
    n = np.asarray(n, dtype=float)
    x = 1.0 - (2.0 / (3.0 * np.pi * n)) ** (2.0 / 3.0) * (h / H)
    # below the cutoff level the whole state lies under the shelf
    cut = n < (2.0 / (3.0 * np.pi)) * (h / H) ** 1.5
    return np.where(cut | (x <= 0), 0.0, np.sqrt(np.clip(x, 0.0, None)))


def alpha_above(n: int, h: float, params: WeightParams) -> float:
    """Amplitude of eigenstate n lying above a shelf at height h."""
    if int(n) != n or n < 1:
        raise ValueError("n must be a positive integer")
    if h < 0:
        raise ValueError("h must be non-negative")
    return float(np.sqrt(_alpha_sq(n, h, params.H)))


def shelf_split(n: int, h: float, params: WeightParams) -> ShelfSplit:
    a = alpha_above(n, h, params)
    return ShelfSplit(int(n), float(h), a, math.sqrt(max(0.0, 1.0 - a * a)))


def node_height(m: int, n: int, params: WeightParams, exact: bool = True) -> float:
    """Height of the m-th node (counted from the top) of eigenstate n."""
    if not 1 <= m <= n:
        raise ValueError("need 1 <= m <= n")
    if exact:
        return (airy_zero(m) - airy_zero(n)) * params.H
    return float(leading_zero(m) - leading_zero(n)) * params.H


def p_above_shelf(h: float, params: WeightParams) -> float:
    """P_1 = exp(-Mg h / T_W)."""
    if h < 0:
        raise ValueError("h must be non-negative")
    return math.exp(-params.Mg * h / params.T_W)


def _levels(params: WeightParams):
    a = airy_zeros(level_count(params))
    logw = a * params.MgH / params.T_W
    logw -= logw[0]
    keep = logw > -_LOG_CUTOFF
    return np.arange(1, a.size + 1)[keep], a[keep], np.exp(logw[keep])


def p_above_shelf_numeric(h: float, params: WeightParams) -> float:
    """Sum of Boltzmann weights times alpha_n(h)^2, normalized by Z_W0."""
    n, _, w = _levels(params)
    return float(np.sum(w * _alpha_sq(n, h, params.H)) / np.sum(w))


def z_w0_closed(params: WeightParams) -> float:
    return (params.T_W / params.MgH) ** 1.5 / (2.0 * math.sqrt(math.pi))


def weight_thermal_moments(h: float, params: WeightParams) -> dict:
    """Closed forms and brute-force sums for the weight raised to height h."""
    if h < 0:
        raise ValueError("h must be non-negative")
    T, Mg = params.T_W, params.Mg
    _, a, w = _levels(params)
    E = (h - a * params.H) * Mg
    # w is relative to the n=1 term; restore absolute scale for Z
    Z_num = float(np.sum(w) * math.exp(-E[0] / T))
    pn = w / w.sum()
    mean = float(pn @ E)
    var = float(pn @ (E - mean) ** 2)
    ke = float(pn @ (-(a * params.H) * Mg / 3.0))  # virial: KE_n = (E_n - Mgh)/3
    closed = {
        "Z_W1": math.exp(-Mg * h / T) * z_w0_closed(params),
        "mean_E": Mg * h + 1.5 * T,
        "var_E": 1.5 * T * T,
        "mean_KE": 0.5 * T,
        "mean_PE": T + Mg * h,
    }
    numeric = {
        "Z_W1": Z_num,
        "mean_E": mean,
        "var_E": var,
        "mean_KE": ke,
        "mean_PE": mean - ke,
    }
    return {"closed": closed, "numeric": numeric}


def weight_entropy_numeric(h: float, params: WeightParams) -> float:
    """-sum p ln p of the thermal level populations (height independent)."""
    _, _, w = _levels(params)
    pn = w / w.sum()
    return float(-np.sum(pn * np.log(pn)))


def conditional_energies(h: float, params: WeightParams) -> dict:
    """Mean energy of the weight found above / below a shelf at h (h = 0 raised)."""
    if h <= 0:
        raise ValueError("h must be positive")
    T = params.T_W
    x = params.Mg * h / T
    e_above = 1.5 * T + params.Mg * h
    e_below = 1.5 * T - params.Mg * h * math.exp(-x) / -math.expm1(-x)
    return {"E_above": e_above, "E_below": e_below}
