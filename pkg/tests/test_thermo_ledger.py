import math

import numpy as np
import pytest
from scipy.optimize import minimize

from szilard import thermo_ledger as tl
from szilard.engine_cycle import EngineParams, ResetUnitary
from szilard.quantum_weight import WeightParams
from szilard.thermal_gas import expansion_profile

LN2 = math.log(2)
Sub = tl.Subensemble


def test_subensemble_invariants():
    Sub(0.3, F=1.0, S=2.0, E=1.0 + 3.0 * 2.0, T=3.0)
    with pytest.raises(ValueError):
        Sub(0.3, F=1.0, S=2.0, E=5.0, T=3.0)
    with pytest.raises(ValueError):
        Sub(1.5)


def test_mix_entropy_examples():
    assert tl.mix_entropy([Sub(1.0, S=2.5), Sub(0.0, S=9.0)]) == pytest.approx(2.5)
    assert tl.mix_entropy([Sub(0.5, S=1.0), Sub(0.5, S=1.0)]) == pytest.approx(1.0 + LN2)
    assert tl.mix_entropy([Sub(1 / 3, S=0.7)] * 3) == pytest.approx(0.7 + math.log(3))
    with pytest.raises(tl.ProbabilityMismatch):
        tl.mix_entropy([Sub(0.5, S=1.0), Sub(0.4, S=1.0)])


def test_mixing_inequality_random():
    rng = np.random.default_rng(3)
    for _ in range(300):
        n = rng.integers(2, 6)
        p = rng.dirichlet(np.ones(n))
        S = rng.normal(size=n) * 3
        s = tl.mix_entropy([Sub(float(a), S=float(b)) for a, b in zip(p, S)])
        assert S.min() - 1e-12 <= s <= S.max() + math.log(n) + 1e-12
        assert s >= p @ S - 1e-12


def test_mix_free_energy_forms():
    assert tl.mix_free_energy([Sub(0.5, F=2.0), Sub(0.5, F=2.0)], 3.0) == pytest.approx(2.0 - 3.0 * LN2)
    T = 1.7
    F = np.array([0.2, 1.1, -0.4])
    p = tl.equilibrium_probabilities(F, T)
    fmix = tl.mix_free_energy([Sub(float(a), F=float(b)) for a, b in zip(p, F)], T)
    assert fmix == pytest.approx(-T * math.log(np.exp(-F / T).sum()), rel=1e-12)
    assert tl.free_energy_from_subensembles(F, T) == pytest.approx(fmix, rel=1e-12)
    assert np.all(fmix <= F)


def test_subensemble_roundtrip():
    for F, p, T in ((1.0, 0.3, 2.0), (-4.0, 0.999, 0.1), (0.0, 1.0, 5.0)):
        Fa = tl.subensemble_free_energy(F, p, T)
        assert tl.prob_from_free_energy(F, Fa, T) == pytest.approx(p, abs=1e-12)
        assert Fa >= F
    assert tl.subensemble_free_energy(2.0, 1.0, 3.0) == 2.0


def test_noneq_free_energy():
    assert tl.noneq_free_energy([1.0, 0.0], [1.3, 5.0], 2.0) == pytest.approx(1.3)
    F1, T = 0.8, 1.5
    val = tl.noneq_free_energy([0.9, 0.1], [F1, F1], T)
    assert val == pytest.approx(F1 + T * (0.9 * math.log(0.9) + 0.1 * math.log(0.1)))
    assert val > F1 - T * LN2
    F = [0.2, 1.1, -0.4]
    peq = tl.equilibrium_probabilities(F, T)
    assert tl.noneq_free_energy(peq, F, T) == pytest.approx(tl.free_energy_from_subensembles(F, T))


def test_noneq_minimum_by_optimization():
    rng = np.random.default_rng(4)
    for _ in range(4):
        F = rng.normal(size=3)
        T = rng.uniform(0.5, 2.0)

        def obj(x):
            p = np.exp(x) / np.exp(x).sum()
            return tl.noneq_free_energy(p, F, T)

        res = minimize(obj, np.zeros(3), method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": 5000})
        assert res.fun == pytest.approx(tl.free_energy_from_subensembles(F, T), abs=1e-8)
        p_opt = np.exp(res.x) / np.exp(res.x).sum()
        np.testing.assert_allclose(p_opt, tl.equilibrium_probabilities(F, T), atol=1e-4)
        for _ in range(20):
            p = rng.dirichlet(np.ones(3))
            assert tl.noneq_free_energy(p, F, T) >= res.fun - 1e-12


def test_gas_thermo():
    T, p = 3.0, 0.01
    S0, F0 = tl.gas_base(T)
    full = tl.gas_thermo(1 - p, T, p)
    assert full["S"] == pytest.approx(S0, abs=0.011) and full["F"] == pytest.approx(F0, abs=0.011 * T)
    assert tl.gas_thermo(0.0, T, p)["F"] == pytest.approx(F0 + T * LN2, abs=0.011 * T)
    for Y in (0.0, 0.3, 0.8):
        g = tl.gas_thermo(Y, T, p)
        bath = -math.log((Y + 1 - p) / 2)
        assert g["S"] + bath == pytest.approx(S0, abs=1e-12)
        W = expansion_profile("isothermal", Y, T, p)["W"]
        assert g["F"] + W == pytest.approx(F0 + T * math.log(2 / (1 - p)), abs=1e-12)
    with pytest.raises(ValueError):
        tl.gas_thermo(1.5, T, p)


def test_gas_base_from_level_sums():
    # S = ln Z + <E>/T of the full box at large T
    T = 1e6
    n = np.arange(1, 20000)
    E = n.astype(float) ** 2
    w = np.exp(-E / T)
    Z = w.sum()
    S = math.log(Z) + (w @ E) / Z / T
    assert tl.gas_base(T)[0] == pytest.approx(S, abs=2e-3)


def test_weight_thermo():
    wp = WeightParams(T_W=7.0)
    hT = 2.0 * LN2  # gearing for T_G = 2, Mg = 1
    a, b = tl.weight_thermo(0.0, 7.0, wp), tl.weight_thermo(hT, 7.0, wp)
    assert b["F"] - a["F"] == pytest.approx(2.0 * LN2)
    assert tl.weight_thermo(5 * 7.0, 7.0, wp)["S"] == a["S"]
    for x in (a, b):
        assert x["E"] - x["F"] == pytest.approx(7.0 * x["S"], rel=1e-12)
    with pytest.raises(ValueError):
        tl.weight_thermo(-1.0, 7.0, wp)


def test_entropy_engine_delta():
    assert tl.entropy_engine_delta(LN2, 2.0, 1.0) == pytest.approx(LN2)
    assert tl.entropy_engine_delta(1.3, 4.0, 4.0) == 0.0
    S, T1, T2 = 0.9, 5.0, 2.0
    W = tl.entropy_engine_delta(S, T1, T2)
    assert W / (S * T1) == pytest.approx(1 - T2 / T1)


def test_cycle_total_examples():
    t = tl.cycle_totals(1.0, 1.0, 0.0, 0.0)
    assert t["dS_R"] == pytest.approx(0.0, abs=1e-12)
    t = tl.cycle_totals(0.0, 0.3, 0.35, 0.35)
    assert t["dS_L"] == 0.0 and t["dS_L_total"] == pytest.approx(LN2)
    t = tl.cycle_totals(0.5, 0.2, 0.4, 0.4)
    assert t["dS_R"] > 0


@pytest.mark.parametrize("slice_name", ["mc_zero", "mb_eq_mc"])
def test_positivity_surfaces(slice_name):
    P1 = np.linspace(0, 1, 101)[:, None]
    ma = np.linspace(0, 1, 101)[None, :]
    mb, mc = tl.slice_resets(ma, slice_name)
    t = tl.cycle_totals(P1, ma, mb, mc)
    assert np.all(t["dS_R"] >= -1e-9)
    assert np.all(t["dS_L"] >= -1e-9)
    assert np.all(t["dS_L_total"] >= LN2 - 1e-9)
    assert np.all(t["dF_R"] <= 1e-9)
    assert np.all(t["dF_L"] <= 1e-9)


def test_slice_resets():
    mb, mc = tl.slice_resets(np.array([0.2]), "mb_eq_mc")
    assert mb[0] == mc[0] == pytest.approx(0.4)
    with pytest.raises(ValueError):
        tl.slice_resets(0.2, "diagonal")


def _params(rng):
    m = rng.dirichlet([1, 1, 1])
    return EngineParams(rng.uniform(0.1, 10), rng.uniform(0.1, 10), ResetUnitary(*m))


def test_ledgers_conserve_energy():
    rng = np.random.default_rng(5)
    for _ in range(100):
        p = _params(rng)
        for led in (tl.raising_ledger(p), tl.lowering_ledger(p)):
            E = [r.total_energy for r in led.rows]
            assert max(E) - min(E) < 1e-9


def test_ledger_totals_match_closed_forms():
    rng = np.random.default_rng(6)
    for _ in range(50):
        p = _params(rng)
        R, L = tl.raising_ledger(p), tl.lowering_ledger(p)
        assert R.row("f").total_entropy - R.row("a").total_entropy == pytest.approx(R.totals["dS_R"], abs=1e-9)
        assert R.row("f").total_free_energy - R.row("a").total_free_energy == pytest.approx(R.totals["dF_R"], abs=1e-9)
        assert L.row("f").total_entropy - L.row("a").total_entropy == pytest.approx(
            L.totals["dS_total_lowering"], abs=1e-9)
        assert L.row("f").total_free_energy - L.row("a").total_free_energy == pytest.approx(L.totals["dF_L"], abs=1e-9)
        dFb = R.row("b").total_free_energy - R.row("a").total_free_energy
        assert dFb == pytest.approx(-(p.T_W - p.T_G) * LN2, abs=1e-9)
        assert R.totals["dF_stage_b"] == pytest.approx(dFb, abs=1e-9)


def test_ledger_undefined_marker():
    p = EngineParams(1.0, 2.0, ResetUnitary.symmetric(0.5))
    for led in (tl.raising_ledger(p), tl.lowering_ledger(p)):
        mid = led.rows[1]
        assert mid.total_free_energy is tl.UNDEFINED
        assert all(isinstance(v, float) or v is tl.UNDEFINED for v in mid.free_energy.values())
        assert str(tl.UNDEFINED) == "undefined"
        assert any(tl.SHELF_NOTE in r.notes for r in led.rows)
    with pytest.raises(KeyError):
        tl.raising_ledger(p).row("z")


def test_ledger_bath_entropy_mid_expansion():
    # gas + T_G bath entropy is constant through the isothermal expansion
    p = EngineParams(1.0, 2.0, ResetUnitary.symmetric(0.5))
    R = tl.raising_ledger(p)
    S = [r.total_entropy for r in R.rows[:3]]
    assert max(S) - min(S) < 1e-12
