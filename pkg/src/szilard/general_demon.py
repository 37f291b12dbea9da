"""Two-subensemble demon with imperfect resetting (energies in units of k T_G).

A raising cycle moves heat out of the T_G bath into the T_W system and
leaves the weight in subensemble A or B; when the two thermal subensembles
overlap (tau = T_G/T_W < 1) the auxiliary cannot always be reset and the
machine reverses into lowering cycles that pump heat back.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

PROB_TOL = 1e-12


class RegimeViolation(ValueError):
    pass


class InfeasibleSplit(ValueError):
    pass


@dataclass(frozen=True)
class DemonParams:
    p_A: float
    tau: float

    def __post_init__(self):
        if not 0.0 < self.p_A < 1.0:
            raise ValueError("p_A must lie in (0, 1)")
        if not self.tau > 0.0:
            raise ValueError("tau must be positive")

    @property
    def p_B(self) -> float:
        return 1.0 - self.p_A

    @property
    def perfect_correlation(self) -> bool:
        """tau >= 1: the subensembles never overlap and reset is exact."""
        return self.tau >= 1.0


@dataclass(frozen=True)
class DemonFlow:
    P_R: float
    P_L: float
    N_R: float
    N_L: float
    Q_R: float
    Q_1: float
    Q_2: float
    Q_L: float
    Q: float
    Q_L_printed: float = math.nan

    @property
    def q_l_residual(self) -> float:
        """Transition-level Q_L minus the rearranged closed form."""
        return self.Q_L - self.Q_L_printed


def fluctuation_relation(p1: float, T1: float, T2: float) -> float:
    """p2 with p1^T1 = p2^T2."""
    if not 0.0 < p1 <= 1.0:
        raise ValueError("p1 must lie in (0, 1]")
    if T1 <= 0 or T2 <= 0:
        raise ValueError("temperatures must be positive")
    return p1 ** (T1 / T2)


def demon_probs(params: DemonParams) -> dict:
    """Thermal subensemble probabilities of the weight and their overlaps."""
    if params.perfect_correlation:
        raise RegimeViolation("tau >= 1 has no overlap; use the perfect-correlation branch")
    a = params.p_A ** params.tau
    b = params.p_B ** params.tau
    ab = a + b - 1.0
    if ab <= 0.0:
        raise RegimeViolation(f"p_alpha + p_beta = {a + b} <= 1 with tau < 1")
    return {"p_alpha": a, "p_beta": b, "p_alphabeta": ab,
            "p_alpha_prime": 1.0 - b, "p_beta_prime": 1.0 - a}


def _q_raise(pA: float, pB: float) -> float:
    return -(pA * math.log(pA) + pB * math.log(pB))


def demon_flow(params: DemonParams) -> DemonFlow:
    pA, pB, t = params.p_A, params.p_B, params.tau
    Q_R = _q_raise(pA, pB)
    if params.perfect_correlation:
        nan = math.nan
        return DemonFlow(0.0, nan, math.inf, nan, Q_R, nan, nan, nan, Q_R)

    pr = demon_probs(params)
    ab, ap, bp = pr["p_alphabeta"], pr["p_alpha_prime"], pr["p_beta_prime"]
    sA, sB = pA ** (1.0 - t), pB ** (1.0 - t)
    s = sA + sB
    lnA, lnB = math.log(pA), math.log(pB)

    P_R = ab * s
    P_L = ab
    N_R = 1.0 / P_R
    N_L = s * N_R

    # first lowering cycle inherits the subensemble of the reversing raise
    pA1 = sA / s
    Q_1 = -(pA1 * lnA + (1.0 - pA1) * lnB)
    pA2 = ap / (ap + bp)
    Q_2 = -(pA2 * lnA + (1.0 - pA2) * lnB)
    Q_L = ab * Q_1 + (ap + bp) * Q_2
    Q_L_printed = -((pA - pB + sB) * lnA + (pB - pA + sA) * lnB) / s

    Q = (N_R * Q_R - N_L * Q_L) / (N_R + N_L)
    return DemonFlow(P_R, P_L, N_R, N_L, Q_R, Q_1, Q_2, Q_L, Q, Q_L_printed)


def demon_q_closed(p_A, tau):
    """Long-run flow per cycle, numpy-broadcasting over tau in (0, 1)."""
    pA = np.asarray(p_A, dtype=float)
    t = np.asarray(tau, dtype=float)
    pB = 1.0 - pA
    sA, sB = pA ** (1.0 - t), pB ** (1.0 - t)
    out = ((sB - pB) * np.log(pA) + (sA - pA) * np.log(pB)) / (sA + sB + 1.0)
    return float(out) if out.ndim == 0 else out


def _geometric(rng, prob, size):
    if prob >= 1.0:
        return np.ones(size, dtype=np.int64)
    return rng.geometric(prob, size=size)


def mc_demon(params: DemonParams, n_cycles: int, seed: int = 0,
             n_batches: int = 100) -> dict:
    """Simulate the raising / lowering-A / lowering-B chain cycle by cycle.

    Raising cycles draw subensemble X with probability p_X and carry -ln p_X;
    the raise reverses with probability p_ab/p_(alpha|beta) and the first
    lowering cycle stays in X. Every lowering cycle carries +ln p_X and moves
    on to lowering-A, lowering-B or raising with p_alpha', p_beta', p_ab.
    Runs are drawn whole so the chain is generated with array operations.
    """
    if n_cycles < 10_000:
        raise ValueError("n_cycles must be at least 1e4")
    rng = np.random.default_rng(seed)
    pA, pB = params.p_A, params.p_B
    lnA, lnB = math.log(pA), math.log(pB)

    if params.perfect_correlation:
        isA = rng.random(n_cycles) < pA
        flows = -np.where(isA, lnA, lnB)
        return _summarize(flows, n_batches, seed, n_cycles,
                          {"first_lowering_A": math.nan, "first_lowering_A_stderr": math.nan,
                           "n_reversals": 0, "visits_LA": 0, "visits_LB": 0})

    pr = demon_probs(params)
    a, b, ab = pr["p_alpha"], pr["p_beta"], pr["p_alphabeta"]
    ap, bp = pr["p_alpha_prime"], pr["p_beta_prime"]
    P_R = ab * (pA / a + pB / b)
    P_L = ab
    # subensemble of a raising cycle, given that it continues / reverses
    cont_A = pA * ap / a / (1.0 - P_R) if P_R < 1.0 else 0.0
    rev_A = pA * ab / a / P_R
    low_A = ap / (ap + bp) if ap + bp > 0 else 0.0

    flows_parts, firstA_parts, LA, LB = [], [], 0, 0
    total = 0
    while total < n_cycles:
        k = int((n_cycles - total) / (1.0 / P_R + 1.0 / P_L)) + 16
        up = _geometric(rng, P_R, k)
        down = _geometric(rng, P_L, k)

        # raising cycles: last one of each run is the reversing cycle
        nu = int(up.sum())
        last_up = np.zeros(nu, dtype=bool)
        last_up[np.cumsum(up) - 1] = True
        u = rng.random(nu)
        xA_up = np.where(last_up, u < rev_A, u < cont_A)
        f_up = -np.where(xA_up, lnA, lnB)

        # lowering cycles: first one of each run inherits the reversing X
        nd = int(down.sum())
        first_down = np.zeros(nd, dtype=bool)
        starts = np.concatenate(([0], np.cumsum(down)[:-1]))
        first_down[starts] = True
        xA_down = rng.random(nd) < low_A
        inherit = xA_up[last_up]
        xA_down[starts] = inherit
        f_down = np.where(xA_down, lnA, lnB)

        # interleave runs: up_1, down_1, up_2, down_2, ...
        lengths = np.column_stack([up, down]).ravel()
        is_up = np.tile([True, False], k)
        seq_is_up = np.repeat(is_up, lengths)
        flows = np.empty(nu + nd)
        flows[seq_is_up] = f_up
        flows[~seq_is_up] = f_down
        keep = min(flows.size, n_cycles - total)

        # statistics restricted to cycles that survive truncation
        lowA = np.empty(nu + nd, dtype=bool)
        lowA[~seq_is_up] = xA_down
        firsts = np.zeros(nu + nd, dtype=bool)
        firsts[np.flatnonzero(~seq_is_up)[starts]] = True
        sel_low = ~seq_is_up[:keep]
        LA += int((lowA[:keep] & sel_low).sum())
        LB += int((~lowA[:keep] & sel_low).sum())
        firstA_parts.append(lowA[:keep][firsts[:keep]])

        flows_parts.append(flows[:keep])
        total += keep

    flows = np.concatenate(flows_parts)
    firstA = np.concatenate(firstA_parts)
    m = firstA.size
    fa = float(firstA.mean()) if m else math.nan
    extra = {
        "first_lowering_A": fa,
        "first_lowering_A_stderr": math.sqrt(fa * (1 - fa) / m) if m else math.nan,
        "n_reversals": int(m),
        "visits_LA": LA,
        "visits_LB": LB,
    }
    return _summarize(flows, n_batches, seed, n_cycles, extra)


def _summarize(flows, n_batches, seed, n_cycles, extra):
    nb = max(2, min(n_batches, flows.size))
    means = np.array([b.mean() for b in np.array_split(flows, nb)])
    out = {"mean_Q": float(flows.mean()),
           "stderr": float(means.std(ddof=1) / math.sqrt(nb)),
           "seed": seed, "n_cycles": int(n_cycles)}
    out.update(extra)
    return out


def carnot_bounds(params: DemonParams, split, T_W: float = 1.0) -> dict:
    """Work extracted when the weight subensembles are re-expanded to p'' before reset.

    split = (p_alpha'', p_beta''). Energies in units of k with T_G = tau T_W.
    tau >= 1 is the engine branch, tau < 1 the compression (pump) branch.
    """
    pa2, pb2 = (float(x) for x in split)
    if pa2 <= 0 or pb2 <= 0:
        raise ValueError("split probabilities must be positive")
    if pa2 + pb2 > 1.0 + PROB_TOL:
        raise InfeasibleSplit(f"p_alpha'' + p_beta'' = {pa2 + pb2} > 1")
    pA, pB = params.p_A, params.p_B
    T_G = params.tau * T_W
    plnp = pA * math.log(pA) + pB * math.log(pB)
    Q = -T_G * plnp
    dF = Q + T_W * (pA * math.log(pa2) + pB * math.log(pb2))
    bound = (T_W - T_G) * plnp
    carnot = 1.0 - T_W / T_G
    return {"dF_G": dF, "bound": bound, "Q": Q, "efficiency": dF / Q,
            "carnot_efficiency": carnot, "dissipated": -T_W * (pA * math.log(pa2) + pB * math.log(pb2)),
            "branch": "engine" if params.tau >= 1.0 else "pump"}
