"""Cycle-level model of the two-weight engine: weights, reversals, energy flow.

Energies are in units of k T_G ln 2 unless stated otherwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

NORM_TOL = 1e-12


class AsymmetricReset(ValueError):
    """The stationary-mixture formula needs m_b == m_c."""


class StationaryNonConvergence(ArithmeticError):
    pass


@dataclass(frozen=True)
class ResetUnitary:
    """Squared magnitudes of the reset operation's first row."""
    m_a: float
    m_b: float
    m_c: float

    def __post_init__(self):
        for name in ("m_a", "m_b", "m_c"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        if abs(self.m_a + self.m_b + self.m_c - 1.0) > 1e-9:
            raise ValueError("unitarity requires m_a + m_b + m_c = 1")

    @classmethod
    def symmetric(cls, m_a: float) -> "ResetUnitary":
        r = 0.5 * (1.0 - m_a)
        return cls(m_a, r, r)


@dataclass(frozen=True)
class EngineParams:
    T_G: float
    T_W: float
    reset: ResetUnitary

    def __post_init__(self):
        if self.T_G <= 0 or self.T_W <= 0:
            raise ValueError("temperatures must be positive")

    @property
    def P1(self) -> float:
        return 0.5 ** (self.T_G / self.T_W)

    @classmethod
    def from_p1(cls, P1: float, reset: ResetUnitary, T_W: float = 1.0) -> "EngineParams":
        if not 0.0 < P1 < 1.0:
            raise ValueError("P1 must lie in (0, 1) to map onto temperatures")
        return cls(T_W * math.log(P1) / math.log(0.5), T_W, reset)


@dataclass(frozen=True)
class CycleWeights:
    w1: float
    w2: float
    w3: float
    w4: float
    w5: float
    w6: float

    @property
    def raising(self):
        return self.w1, self.w2, self.w3

    @property
    def lowering(self):
        return self.w4, self.w5, self.w6


@dataclass(frozen=True)
class FlowStats:
    P_r: float
    P_l: float
    N_r: float
    N_l: float
    delta_E: float | None = None


def _unpack(params_or_p1, reset=None):
    if isinstance(params_or_p1, EngineParams):
        return params_or_p1.P1, params_or_p1.reset
    P1 = float(params_or_p1)
    if not 0.0 <= P1 <= 1.0:
        raise ValueError("P1 must lie in [0, 1]")
    if reset is None:
        raise ValueError("reset is required when passing P1 directly")
    return P1, reset


def cycle_weights(params, reset: ResetUnitary | None = None) -> CycleWeights:
    """w1..w3 at the end of a raising cycle, w4..w6 at the end of a lowering one.

    Accepts EngineParams or (P1, ResetUnitary) so the closed endpoints P1 in
    {0, 1} can be evaluated directly.
    """
    P1, r = _unpack(params, reset)
    w1 = 1.0 - 0.5 * P1 * (1.0 + r.m_a)
    w2 = 0.5 * P1 * (1.0 - r.m_b)
    w3 = 0.5 * P1 * (1.0 - r.m_c)
    w4 = (1.0 - 2.0 * P1) + P1 * P1 * (1.0 + r.m_a)
    w5 = P1 - P1 * P1 * (1.0 - r.m_b)
    w6 = P1 - P1 * P1 * (1.0 - r.m_c)
    return CycleWeights(w1, w2, w3, w4, w5, w6)


def _inv(x):
    return math.inf if x == 0 else 1.0 / x


def reversal_and_lengths(params, reset: ResetUnitary | None = None) -> FlowStats:
    P1, r = _unpack(params, reset)
    P_r = 0.5 * P1 * (1.0 + r.m_a)
    P_l = (1.0 - 2.0 * P1) + P1 * P1 * (1.0 + r.m_a)
    return FlowStats(P_r, P_l, _inv(P_r), _inv(P_l))


def energy_flow_closed(P1, m_a):
    """Mean T_G -> T_W flow per cycle in k T_G ln 2 units; numpy-broadcasting."""
    P1 = np.asarray(P1, dtype=float)
    m_a = np.asarray(m_a, dtype=float)
    pr = 0.5 * P1 * (1.0 + m_a)
    num = (1.0 - 2.0 * P1) * (1.0 - pr)
    den = (1.0 - 2.0 * P1) + (1.0 + 2.0 * P1) * pr
    out = num / den
    return float(out) if out.ndim == 0 else out


def energy_flow(params, reset: ResetUnitary | None = None) -> float:
    P1, r = _unpack(params, reset)
    return energy_flow_closed(P1, r.m_a)


def flow_stats(params, reset: ResetUnitary | None = None) -> FlowStats:
    fs = reversal_and_lengths(params, reset)
    return FlowStats(fs.P_r, fs.P_l, fs.N_r, fs.N_l, energy_flow(params, reset))


def flow_from_lengths(fs: FlowStats) -> float:
    """(N_r - N_l)/(N_r + N_l), written with reversal probabilities so it stays finite."""
    return (fs.P_l - fs.P_r) / (fs.P_l + fs.P_r)


def stationary_mix(params, reset: ResetUnitary | None = None,
                   tol: float = 1e-10, max_iter: int = 200) -> float:
    """Long-run fraction of cycles on the raising branch, w4/(2 w2 + w4)."""
    P1, r = _unpack(params, reset)
    if abs(r.m_b - r.m_c) > 1e-12:
        raise AsymmetricReset("stationary mixture is derived for m_b == m_c")
    w = cycle_weights(P1, r)
    den = 2.0 * w.w2 + w.w4
    if den == 0:
        raise StationaryNonConvergence("degenerate update (w2 = w4 = 0)")
    fixed = w.w4 / den
    # w' = w w1 + (1 - w) w4, from both ends of [0, 1]
    for start in (0.0, 1.0):
        x = start
        for _ in range(max_iter):
            x_new = w.w4 + x * (w.w1 - w.w4)
            if abs(x_new - fixed) < tol:
                break
            x = x_new
        else:
            raise StationaryNonConvergence(
                f"update does not settle at P1={P1}, m_a={r.m_a} (w1-w4 = {w.w1 - w.w4})")
    return fixed


def _geometric_runs(rng, prob, size):
    if prob >= 1.0:
        return np.ones(size, dtype=np.int64)
    return rng.geometric(prob, size=size)


def mc_engine(params, n_cycles: int, seed: int = 0, reset: ResetUnitary | None = None,
              n_batches: int = 100) -> dict:
    """Two-state renewal simulation; raising contributes +1, lowering -1.

    The chain alternates raising and lowering runs whose lengths are
    geometric with the reversal probabilities, starting on the raising side.
    """
    if n_cycles < 1:
        raise ValueError("n_cycles must be positive")
    P1, r = _unpack(params, reset)
    fs = reversal_and_lengths(P1, r)
    rng = np.random.default_rng(seed)

    steps = np.empty(0, dtype=np.int8)
    if fs.P_r == 0.0:
        steps = np.ones(n_cycles, dtype=np.int8)
    else:
        chunks = []
        total = 0
        while total < n_cycles:
            # enough run pairs to cover the remainder on average, with margin
            mean_pair = fs.N_r + (fs.N_l if fs.P_l > 0 else n_cycles)
            k = int((n_cycles - total) / mean_pair) + 16
            up = _geometric_runs(rng, fs.P_r, k)
            down = (_geometric_runs(rng, fs.P_l, k) if fs.P_l > 0
                    else np.full(k, n_cycles, dtype=np.int64))
            lengths = np.column_stack([up, down]).ravel()
            signs = np.tile(np.array([1, -1], dtype=np.int8), k)
            seq = np.repeat(signs, lengths)
            chunks.append(seq)
            total += seq.size
        steps = np.concatenate(chunks)[:n_cycles]

    flows = steps.astype(float)
    nb = max(2, min(n_batches, n_cycles))
    batches = np.array_split(flows, nb)
    means = np.array([b.mean() for b in batches])
    raising = np.array([(b > 0).mean() for b in batches])
    return {
        "mean_flow": float(flows.mean()),
        "stderr": float(means.std(ddof=1) / math.sqrt(nb)),
        "fraction_raising": float((flows > 0).mean()),
        "fraction_stderr": float(raising.std(ddof=1) / math.sqrt(nb)),
        "seed": seed,
        "n_cycles": int(n_cycles),
    }
