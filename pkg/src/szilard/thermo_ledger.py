"""Entropy and free-energy bookkeeping for the engine (k_B = 1, nats).

Mixing algebra for orthogonal subensembles, the gas and weight functionals,
stage-by-stage ledgers of the raising and lowering cycles, and the cycle
totals plotted as surfaces over (P1, m_a).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import xlogy

from .engine_cycle import EngineParams, ResetUnitary, cycle_weights
from .quantum_weight import WeightParams

PROB_TOL = 1e-9
LN2 = math.log(2.0)


class ProbabilityMismatch(ValueError):
    pass


class _Undefined:
    """Marker for a free energy that has no meaning at that stage."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "UNDEFINED"

    def __str__(self):
        return "undefined"


UNDEFINED = _Undefined()


@dataclass(frozen=True)
class Subensemble:
    p: float
    F: float | None = None
    S: float | None = None
    E: float | None = None
    T: float | None = None

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("probability must lie in [0, 1]")
        if None not in (self.F, self.S, self.E, self.T):
            if abs(self.E - (self.F + self.T * self.S)) > 1e-9 * max(1.0, abs(self.E)):
                raise ValueError("E = F + T S violated")


def _plnp(p):
    return xlogy(p, p)


def _check_probs(ps):
    ps = np.asarray(ps, dtype=float)
    if np.any(ps < 0) or abs(ps.sum() - 1.0) > PROB_TOL:
        raise ProbabilityMismatch(f"probabilities sum to {ps.sum():.12g}, expected 1")
    return ps


def mix_entropy(subs) -> float:
    """S = sum p_i S_i - sum p_i ln p_i, with 0 ln 0 = 0."""
    ps = _check_probs([s.p for s in subs])
    S = np.array([s.S for s in subs], dtype=float)
    return float(ps @ S - _plnp(ps).sum())


def mix_free_energy(subs, T: float) -> float:
    """F = sum p_i F_i + T sum p_i ln p_i."""
    ps = _check_probs([s.p for s in subs])
    F = np.array([s.F for s in subs], dtype=float)
    return float(ps @ F + T * _plnp(ps).sum())


def free_energy_from_subensembles(F_list, T: float) -> float:
    """-T ln sum exp(-F_i/T), the equilibrium mixture."""
    F = np.asarray(F_list, dtype=float)
    m = F.min()
    return float(m - T * math.log(np.exp(-(F - m) / T).sum()))


def equilibrium_probabilities(F_list, T: float) -> np.ndarray:
    F = np.asarray(F_list, dtype=float)
    w = np.exp(-(F - F.min()) / T)
    return w / w.sum()


def subensemble_free_energy(F: float, p: float, T: float) -> float:
    """F_a = F - T ln p_a."""
    if not 0.0 < p <= 1.0:
        raise ValueError("p must lie in (0, 1]")
    return F - T * math.log(p)


def prob_from_free_energy(F: float, F_a: float, T: float) -> float:
    """p_a = exp((F - F_a)/T)."""
    return math.exp((F - F_a) / T)


def noneq_free_energy(p_list, F_list, T: float) -> float:
    """F' = sum p'_a (F_a + T ln p'_a) for an arbitrary weighting p'."""
    ps = _check_probs(p_list)
    F = np.asarray(F_list, dtype=float)
    return float(ps @ F + T * _plnp(ps).sum())


def entropy_engine_delta(S: float, T1: float, T2: float) -> float:
    """Free energy gained by moving entropy S from temperature T1 to T2: -S (T2 - T1)."""
    return -S * (T2 - T1)


# one-atom gas and weight functionals

def gas_base(T_G: float) -> tuple[float, float]:
    """(S_G0, F_G0) of the unpartitioned gas in the continuum limit."""
    S = 0.5 * (1.0 + math.log(math.pi * T_G) - 2.0 * LN2)
    F = 0.5 * T_G * (2.0 * LN2 - math.log(math.pi * T_G))
    return S, F


def gas_thermo(Y: float, T_G: float, p: float = 0.01) -> dict:
    """Gas confined to one side with the piston at Y (ln(1-p)-order terms dropped)."""
    if not 0.0 <= Y <= 1.0 - p + 1e-15:
        raise ValueError("Y must lie in [0, 1-p]")
    S0, F0 = gas_base(T_G)
    r = 2.0 / (Y + 1.0 - p)
    return {"S": S0 - math.log(r), "F": F0 + T_G * math.log(r), "E": 0.5 * T_G}


def weight_thermo(h: float, T_W: float, params: WeightParams | None = None) -> dict:
    """Thermal weight raised to h: S independent of h, F = F(0) + Mg h."""
    if h < 0:
        raise ValueError("h must be non-negative")
    wp = params or WeightParams(T_W=T_W)
    x = T_W / wp.MgH
    c = math.log(2.0 * math.sqrt(math.pi))
    S = 1.5 * (1.0 + math.log(x)) - c
    F = -T_W * (1.5 * math.log(x) - c) + wp.Mg * h
    return {"S": S, "F": F, "E": 1.5 * T_W + wp.Mg * h}


# cycle totals, vectorized over P1 and the reset magnitudes

def _weights_arrays(P1, m_a, m_b, m_c):
    P1 = np.asarray(P1, dtype=float)
    w1 = 1.0 - 0.5 * P1 * (1.0 + m_a)
    w2 = 0.5 * P1 * (1.0 - m_b)
    w3 = 0.5 * P1 * (1.0 - m_c)
    w4 = (1.0 - 2.0 * P1) + P1 * P1 * (1.0 + m_a)
    w5 = P1 - P1 * P1 * (1.0 - m_b)
    w6 = P1 - P1 * P1 * (1.0 - m_c)
    return w1, w2, w3, w4, w5, w6


def cycle_totals(P1, m_a, m_b, m_c) -> dict:
    """dS_R, dS_L, dS_L_total (with the free-expansion ln 2), dF_R/T_W, dF_L/T_W."""
    P1 = np.asarray(P1, dtype=float)
    w1, w2, w3, w4, w5, w6 = _weights_arrays(P1, m_a, m_b, m_c)
    sr = _plnp(w1) + _plnp(w2) + _plnp(w3)
    sl = _plnp(w4) + _plnp(w5) + _plnp(w6)
    dS_R = -LN2 - xlogy(w1, P1) - sr
    dF_R = sr - xlogy(w2 + w3, P1)
    dS_L = xlogy(w5 + w6, P1) - sl
    dF_L = xlogy(w4, P1) + sl
    out = {"dS_R": dS_R, "dF_R": dF_R, "dS_L": dS_L, "dS_L_total": dS_L + LN2, "dF_L": dF_L}
    if np.ndim(P1) == 0 and np.ndim(m_a) == 0:
        return {k: float(v) for k, v in out.items()}
    return out


def slice_resets(m_a, slice_name: str):
    """(m_b, m_c) on the two plotted slices: c-magnitude zero, or b = c."""
    m_a = np.asarray(m_a, dtype=float)
    if slice_name == "mc_zero":
        return 1.0 - m_a, np.zeros_like(m_a)
    if slice_name == "mb_eq_mc":
        half = 0.5 * (1.0 - m_a)
        return half, half
    raise ValueError(f"unknown slice {slice_name!r}")


# stage ledgers

TG_BATH = "T_G bath"
GAS = "gas"
PISTON = "piston"
WEIGHT1 = "weight 1"
WEIGHT2 = "weight 2"
TW_BATH = "T_W bath"
COLUMNS = (TG_BATH, GAS, PISTON, WEIGHT1, WEIGHT2, TW_BATH)


def group(*cols) -> str:
    return "+".join(cols)


@dataclass
class LedgerRow:
    """One stage; keys are column groups (correlated subsystems share a key)."""
    stage: str
    energy: dict
    entropy: dict
    free_energy: dict
    bath_entropy: dict
    notes: tuple = ()

    @property
    def total_energy(self) -> float:
        return float(sum(self.energy.values()))

    @property
    def total_entropy(self) -> float:
        return float(sum(self.entropy.values()))

    @property
    def total_free_energy(self):
        vals = list(self.free_energy.values())
        if any(v is UNDEFINED for v in vals):
            return UNDEFINED
        return float(sum(vals))


@dataclass
class Ledger:
    rows: list
    totals: dict = field(default_factory=dict)

    def row(self, stage: str) -> LedgerRow:
        for r in self.rows:
            if r.stage == stage:
                return r
        raise KeyError(stage)


@dataclass(frozen=True)
class LedgerConfig:
    weight: WeightParams | None = None
    S_P: float = 0.0
    F_P: float = 0.0
    Y_mid: float = 0.5  # piston position of the mid-expansion row (gas width 1 + Y)


SHELF_NOTE = "shelf insertion assumed reversible with negligible work"


def _setup(params: EngineParams, cfg: LedgerConfig):
    T_G, T_W = params.T_G, params.T_W
    wp = cfg.weight or WeightParams(T_W=T_W)
    if wp.T_W != T_W:
        wp = WeightParams(Mg=wp.Mg, H=wp.H, T_W=T_W,
                          negligible_shelf_work=wp.negligible_shelf_work)
    S_G0, F_G0 = gas_base(T_G)
    w0 = weight_thermo(0.0, T_W, wp)
    h_T = T_G * LN2 / wp.Mg
    wT = weight_thermo(h_T, T_W, wp)
    return T_G, T_W, wp, S_G0, F_G0, w0, wT, h_T


def raising_ledger(params: EngineParams, config: LedgerConfig | None = None) -> Ledger:
    cfg = config or LedgerConfig()
    T_G, T_W, wp, S_G0, F_G0, w0, wT, h_T = _setup(params, cfg)
    P1 = params.P1
    w = cycle_weights(params)
    mgh = wp.Mg * h_T
    block = group(PISTON, WEIGHT1, WEIGHT2)
    rows = []

    rows.append(LedgerRow(
        "a",
        {GAS: 0.5 * T_G, PISTON: 0.0, WEIGHT1: w0["E"], WEIGHT2: w0["E"]},
        {GAS: S_G0, PISTON: cfg.S_P, WEIGHT1: w0["S"], WEIGHT2: w0["S"]},
        {GAS: F_G0, PISTON: cfg.F_P, WEIGHT1: w0["F"], WEIGHT2: w0["F"]},
        {TG_BATH: 0.0, TW_BATH: 0.0}))

    # mid-expansion: gas, piston and the rising weight are correlated across two
    # temperatures, so no free energy can be assigned
    Y = cfg.Y_mid
    heat = T_G * math.log(1.0 + Y)
    gm = gas_thermo(Y, T_G, p=0.0)
    allg = group(GAS, PISTON, WEIGHT1, WEIGHT2)
    rows.append(LedgerRow(
        "b (mid-expansion)",
        {TG_BATH: -heat, allg: 0.5 * T_G + 2 * w0["E"] + heat},
        {TG_BATH: -math.log(1.0 + Y), allg: gm["S"] + cfg.S_P + 2 * w0["S"] + LN2},
        {allg: UNDEFINED},
        {TG_BATH: -math.log(1.0 + Y), TW_BATH: 0.0}))

    # end of expansion: one weight raised by h_T, which one is correlated with the piston
    raised = [Subensemble(0.5, S=cfg.S_P + wT["S"] + w0["S"], F=cfg.F_P + wT["F"] + w0["F"])] * 2
    rows.append(LedgerRow(
        "b",
        {TG_BATH: -T_G * LN2, GAS: 0.5 * T_G, block: 2 * w0["E"] + mgh},
        {TG_BATH: -LN2, GAS: S_G0, block: mix_entropy(raised)},
        {GAS: F_G0, block: mix_free_energy(raised, T_W)},
        {TG_BATH: -LN2, TW_BATH: 0.0}))
    for stage in ("c", "d", "e"):
        prev = rows[-1]
        rows.append(LedgerRow(stage, dict(prev.energy), dict(prev.entropy),
                              dict(prev.free_energy), dict(prev.bath_entropy),
                              (SHELF_NOTE,)))

    # stage f: w1 -> both weights on the floor, energy M g h_T dissipated to T_W
    floor = {"S": cfg.S_P + 2 * w0["S"], "F": cfg.F_P + 2 * w0["F"]}
    up = {"S": cfg.S_P + wT["S"] + w0["S"], "F": cfg.F_P + wT["F"] + w0["F"]}
    parts = [Subensemble(w.w1, S=floor["S"], F=floor["F"]),
             Subensemble(w.w2, S=up["S"], F=up["F"]),
             Subensemble(w.w3, S=up["S"], F=up["F"])]
    bath_S = w.w1 * mgh / T_W
    rows.append(LedgerRow(
        "f",
        {TG_BATH: -T_G * LN2, GAS: 0.5 * T_G, block: 2 * w0["E"] + (w.w2 + w.w3) * mgh,
         TW_BATH: w.w1 * mgh},
        {TG_BATH: -LN2, GAS: S_G0, block: mix_entropy(parts), TW_BATH: bath_S},
        {GAS: F_G0, block: noneq_free_energy([s.p for s in parts], [s.F for s in parts], T_W)},
        {TG_BATH: -LN2, TW_BATH: bath_S},
        (SHELF_NOTE,)))

    tot = cycle_totals(P1, params.reset.m_a, params.reset.m_b, params.reset.m_c)
    return Ledger(rows, {"dS_R": tot["dS_R"], "dF_R": tot["dF_R"] * T_W,
                         "dF_stage_b": -T_W * math.log(2.0 * P1)})


def lowering_ledger(params: EngineParams, config: LedgerConfig | None = None) -> Ledger:
    cfg = config or LedgerConfig()
    T_G, T_W, wp, S_G0, F_G0, w0, wT, h_T = _setup(params, cfg)
    P1 = params.P1
    w = cycle_weights(params)
    mgh = wp.Mg * h_T
    block = group(PISTON, WEIGHT1, WEIGHT2)
    rows = []

    rows.append(LedgerRow(
        "a",
        {GAS: 0.5 * T_G, PISTON: 0.0, WEIGHT1: wT["E"], WEIGHT2: w0["E"]},
        {GAS: S_G0, PISTON: cfg.S_P, WEIGHT1: wT["S"], WEIGHT2: w0["S"]},
        {GAS: F_G0, PISTON: cfg.F_P, WEIGHT1: wT["F"], WEIGHT2: w0["F"]},
        {TG_BATH: 0.0, TW_BATH: 0.0}))

    # mid-compression: the falling weight drives the piston, F undefined
    Y = cfg.Y_mid
    heat = T_G * math.log(2.0 / (1.0 + Y))
    gm = gas_thermo(Y, T_G, p=0.0)
    allg = group(GAS, PISTON, WEIGHT1, WEIGHT2)
    rows.append(LedgerRow(
        "b (mid-compression)",
        {TG_BATH: heat, allg: 0.5 * T_G + 2 * w0["E"] + mgh - heat},
        {TG_BATH: math.log(2.0 / (1.0 + Y)), allg: gm["S"] + cfg.S_P + 2 * w0["S"]},
        {allg: UNDEFINED},
        {TG_BATH: math.log(2.0 / (1.0 + Y)), TW_BATH: 0.0}))

    g1 = gas_thermo(0.0, T_G, p=0.0)
    rows.append(LedgerRow(
        "b",
        {TG_BATH: T_G * LN2, GAS: 0.5 * T_G, PISTON: 0.0, WEIGHT1: w0["E"], WEIGHT2: w0["E"]},
        {TG_BATH: LN2, GAS: g1["S"], PISTON: cfg.S_P, WEIGHT1: w0["S"], WEIGHT2: w0["S"]},
        {GAS: g1["F"], PISTON: cfg.F_P, WEIGHT1: w0["F"], WEIGHT2: w0["F"]},
        {TG_BATH: LN2, TW_BATH: 0.0}))
    prev = rows[-1]
    rows.append(LedgerRow("c", dict(prev.energy), dict(prev.entropy),
                          dict(prev.free_energy), dict(prev.bath_entropy), (SHELF_NOTE,)))
    # piston withdrawn, the gas expands freely into the whole box
    rows.append(LedgerRow(
        "d",
        dict(prev.energy),
        {**prev.entropy, GAS: S_G0},
        {**prev.free_energy, GAS: F_G0},
        dict(prev.bath_entropy), (SHELF_NOTE,)))
    prev = rows[-1]
    rows.append(LedgerRow("e", dict(prev.energy), dict(prev.entropy),
                          dict(prev.free_energy), dict(prev.bath_entropy), (SHELF_NOTE,)))

    # stage f: weights found raised in the w5, w6 portions drew M g h_T from T_W
    floor = {"S": cfg.S_P + 2 * w0["S"], "F": cfg.F_P + 2 * w0["F"]}
    up = {"S": cfg.S_P + wT["S"] + w0["S"], "F": cfg.F_P + wT["F"] + w0["F"]}
    parts = [Subensemble(w.w4, S=floor["S"], F=floor["F"]),
             Subensemble(w.w5, S=up["S"], F=up["F"]),
             Subensemble(w.w6, S=up["S"], F=up["F"])]
    drawn = (w.w5 + w.w6) * mgh
    rows.append(LedgerRow(
        "f",
        {TG_BATH: T_G * LN2, GAS: 0.5 * T_G, block: 2 * w0["E"] + drawn, TW_BATH: -drawn},
        {TG_BATH: LN2, GAS: S_G0, block: mix_entropy(parts), TW_BATH: -drawn / T_W},
        {GAS: F_G0, block: noneq_free_energy([s.p for s in parts], [s.F for s in parts], T_W)},
        {TG_BATH: LN2, TW_BATH: -drawn / T_W},
        (SHELF_NOTE,)))

    tot = cycle_totals(P1, params.reset.m_a, params.reset.m_b, params.reset.m_c)
    return Ledger(rows, {"dS_L": tot["dS_L"], "dS_total_lowering": tot["dS_L_total"],
                         "dF_L": tot["dF_L"] * T_W})
