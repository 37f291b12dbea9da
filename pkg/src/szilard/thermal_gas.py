"""Thermal one-atom gas: partition functions, insertion work, expansion regimes.

Sign convention: W > 0 is energy extracted from the gas into the work reservoir.
Pressures are reported as positive magnitudes (force on the piston).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .box_spectrum import limit_energy, unperturbed_energy

BOLTZMANN_CUTOFF = 1e-12
_LOG_CUTOFF = -math.log(BOLTZMANN_CUTOFF)

NO_PARTITION = "no_partition"
PARTITIONED = "partitioned"
CONFINED_LEFT = "confined_left"
CONFINED_RIGHT = "confined_right"
MODES = (NO_PARTITION, PARTITIONED, CONFINED_LEFT, CONFINED_RIGHT)

ISOLATED = "isolated"
ESSENTIAL = "essential"
ISOTHERMAL = "isothermal"
REGIMES = (ISOLATED, ESSENTIAL, ISOTHERMAL)


@dataclass(frozen=True)
class GasThermalState:
    mode: str
    T_G: float
    p: float = 0.01
    Y: float | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.T_G <= 0:
            raise ValueError("T_G must be positive")
        if not 0 < self.p < 1:
            raise ValueError("p must lie in (0, 1)")
        if self.mode in (CONFINED_LEFT, CONFINED_RIGHT):
            if self.Y is None or not 0 <= self.Y <= 1 - self.p:
                raise ValueError("confined modes need 0 <= Y <= 1-p")

    @property
    def width(self) -> float:
        """Width of the region the atom can occupy (full box = 2)."""
        if self.mode == NO_PARTITION:
            return 2.0
        if self.mode == PARTITIONED:
            return 1.0 - self.p
        return self.Y + 1.0 - self.p


def _check_Y(Y, p):
    if not 0 <= Y <= 1 - p + 1e-15:
        raise ValueError(f"Y must lie in [0, 1-p], got {Y}")


def _box_levels(width: float, T: float) -> np.ndarray:
    """Energies (2n/width)^2 of a box of the given width, cut at the Boltzmann cutoff."""
    n_max = int(width / 2.0 * math.sqrt(_LOG_CUTOFF * T)) + 2
    n = np.arange(1, n_max + 1, dtype=float)
    return (2.0 * n / width) ** 2


def _boltzmann(E: np.ndarray, T: float) -> np.ndarray:
    w = np.exp(-(E - E[0]) / T)
    return w / w.sum()


def gas_partition(state: GasThermalState) -> dict:
    """Closed-form and summed partition function plus the mean energy from each."""
    T = state.T_G
    w = state.width
    deg = 2.0 if state.mode == PARTITIONED else 1.0
    closed = deg * w / 4.0 * math.sqrt(math.pi * T)
    E = _box_levels(w, T)
    numeric = deg * float(np.sum(np.exp(-E / T)))
    pn = _boltzmann(E, T)
    return {
        "Z_closed": closed,
        "Z_numeric": numeric,
        "mean_E_closed": 0.5 * T,
        "mean_E_numeric": float(pn @ E),
    }


def insertion_work(T_G: float, p: float = 0.01) -> dict:
    """Work to raise an infinitely high central barrier of half-width p.

    Even levels shift by [f E + 2 sqrt(E) + 1]/(1-p)^2 with E = (2l-1)^2, and
    <sqrt(E)> = sqrt(T/pi) in the continuum limit. The frequently quoted
    simplification with 4 sqrt(1/T) drops that 1/sqrt(pi); it is returned
    separately as W_even_printed for comparison.
    """
    f = p * (2.0 - p)
    pref = 0.5 * T_G / (1.0 - p) ** 2
    w_odd = pref * f
    w_even = pref * (f + 4.0 / math.sqrt(math.pi * T_G) + 2.0 / T_G)
    w_even_printed = pref * (f + 4.0 * math.sqrt(1.0 / T_G) + 2.0 / T_G)
    return {"W_odd": w_odd, "W_even": w_even, "W_mean": 0.5 * (w_odd + w_even),
            "W_even_printed": w_even_printed,
            "W_mean_printed": 0.5 * (w_odd + w_even_printed)}


def insertion_work_numeric(T_G: float, p: float = 0.01) -> dict:
    """Boltzmann-weighted eigenvalue shifts from V = 0 to the V -> infinity limit."""
    l_max = int(math.sqrt(_LOG_CUTOFF * T_G) / 2.0) + 3
    out = {}
    for sym in ("odd", "even"):
        E0 = np.array([unperturbed_energy(sym, l) for l in range(1, l_max + 1)])
        Einf = np.array([limit_energy(l, p) for l in range(1, l_max + 1)])
        out["W_" + sym] = float(_boltzmann(E0, T_G) @ (Einf - E0))
    out["W_mean"] = 0.5 * (out["W_odd"] + out["W_even"])
    return out


def expansion_profile(regime: str, Y: float, T_G: float, p: float = 0.01) -> dict:
    """Mean energy, pressure, temperature and extracted work after moving to Y."""
    if regime not in REGIMES:
        raise ValueError(f"unknown regime {regime!r}")
    _check_Y(Y, p)
    V0 = 1.0 - p
    V = Y + V0
    if regime == ISOTHERMAL:
        return {"E": 0.5 * T_G, "P": T_G / V, "T": T_G, "W": T_G * math.log(V / V0)}
    # isolated and essential isolation share all mean quantities
    r2 = (V0 / V) ** 2
    T = T_G * r2
    return {"E": 0.5 * T, "P": T / V, "T": T, "W": 0.5 * T_G * (1.0 - r2)}


def expansion_profile_numeric(regime: str, Y: float, T_G: float, p: float = 0.01) -> dict:
    """Same quantities from level sums over the confined box."""
    if regime not in REGIMES:
        raise ValueError(f"unknown regime {regime!r}")
    _check_Y(Y, p)
    V0 = 1.0 - p
    V = Y + V0
    E0 = _box_levels(V0, T_G)
    if regime == ISOTHERMAL:
        Ev = _box_levels(V, T_G)
        z0 = np.sum(np.exp(-E0 / T_G))
        zv = np.sum(np.exp(-Ev / T_G))
        E = float(_boltzmann(Ev, T_G) @ Ev)
        # pressure -dE_n/dV = 2 E_n / V averaged over the current populations
        return {"E": E, "P": 2 * E / V, "T": T_G, "W": T_G * math.log(zv / z0)}
    # populations frozen, every level scales as (V0/V)^2
    pn = _boltzmann(E0, T_G)
    E_start = float(pn @ E0)
    E = E_start * (V0 / V) ** 2
    return {"E": E, "P": 2 * E / V, "T": 2 * E, "W": E_start - E}


def compression_after_rethermalization(T_G: float, p: float = 0.01) -> dict:
    """Isolated full expansion, rethermalize at T_G, isolated compression back."""
    extracted = expansion_profile(ISOLATED, 1 - p, T_G, p)["W"]
    # the rethermalized gas fills width 2(1-p); compressing halves it, E grows 4x
    work = -(4.0 - 1.0) * 0.5 * T_G
    return {"expansion_work": extracted, "compression_work": work,
            "dissipated": -(extracted + work)}


def compression_after_rethermalization_numeric(T_G: float, p: float = 0.01) -> dict:
    extracted = expansion_profile_numeric(ISOLATED, 1 - p, T_G, p)["W"]
    Efull = _box_levels(2 * (1 - p), T_G)
    mean_full = float(_boltzmann(Efull, T_G) @ Efull)
    work = -3.0 * mean_full
    return {"expansion_work": extracted, "compression_work": work,
            "dissipated": -(extracted + work)}


def fluctuation_moments(regime: str, Y: float, T_G: float, p: float = 0.01) -> dict:
    """<E^2>/<E>^2 and <P^2>/<P>^2; both are 3 for a one-dimensional gas."""
    if regime not in REGIMES:
        raise ValueError(f"unknown regime {regime!r}")
    _check_Y(Y, p)
    return {"E_ratio": 3.0, "P_ratio": 3.0}


def fluctuation_moments_numeric(regime: str, Y: float, T_G: float, p: float = 0.01) -> dict:
    _check_Y(Y, p)
    V0 = 1.0 - p
    V = Y + V0
    if regime == ISOTHERMAL:
        E = _box_levels(V, T_G)
        pn = _boltzmann(E, T_G)
    else:
        E0 = _box_levels(V0, T_G)
        pn = _boltzmann(E0, T_G)
        E = E0 * (V0 / V) ** 2
    P = 2 * E / V
    return {"E_ratio": float(pn @ E**2 / (pn @ E) ** 2),
            "P_ratio": float(pn @ P**2 / (pn @ P) ** 2)}


def relative_energy_variance(regime: str, Y: float, T_G: float, p: float = 0.01) -> float:
    return fluctuation_moments(regime, Y, T_G, p)["E_ratio"] - 1.0


def gearing_height(Y: float, T_G: float, Mg: float, p: float = 0.01,
                   regime: str = ISOTHERMAL) -> float:
    """Weight height that makes the lift absorb exactly the expansion work."""
    _check_Y(Y, p)
    if Mg <= 0:
        raise ValueError("Mg must be positive")
    if regime == ISOTHERMAL:
        return T_G / Mg * math.log1p(Y / (1.0 - p))
    if regime in (ISOLATED, ESSENTIAL):
        return expansion_profile(regime, Y, T_G, p)["W"] / Mg
    raise ValueError(f"unknown regime {regime!r}")


def mc_expansion_work(n_steps: int, T_G: float, p: float = 0.01, seed: int = 0,
                      n_samples: int | None = None):
    """Stochastic isothermal expansion from Y=0 to Y=1-p in n equal-Y steps.

    At each step a level is drawn from the Boltzmann distribution of the box
    at the step's geometric-mean width; that level's exact energy drop over
    the step is accrued. Returns one total (n_samples None) or an array.
    """
    if int(n_steps) != n_steps or n_steps < 1:
        raise ValueError("n_steps must be a positive integer")
    rng = np.random.default_rng(seed)
    m = 1 if n_samples is None else int(n_samples)
    V0 = 1.0 - p
    edges = V0 + np.linspace(0.0, V0, n_steps + 1)
    total = np.zeros(m)
    for a, b in zip(edges[:-1], edges[1:]):
        vm = math.sqrt(a * b)
        E = _box_levels(vm, T_G)
        cdf = np.cumsum(_boltzmann(E, T_G))
        idx = np.searchsorted(cdf, rng.random(m) * cdf[-1], side="right")
        idx = np.minimum(idx, E.size - 1)
        n = idx + 1.0
        total += (2.0 * n) ** 2 * (1.0 / a**2 - 1.0 / b**2)
    return float(total[0]) if n_samples is None else total
