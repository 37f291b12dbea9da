import math

import numpy as np
import pytest

from szilard import general_demon as gd
from szilard.engine_cycle import ResetUnitary, energy_flow

D = gd.DemonParams


def test_params():
    with pytest.raises(ValueError):
        D(0.0, 0.5)
    with pytest.raises(ValueError):
        D(0.5, 0.0)
    assert D(0.3, 0.5).p_B == pytest.approx(0.7)
    assert D(0.3, 1.5).perfect_correlation


def test_fluctuation_relation():
    assert gd.fluctuation_relation(0.5, 3.0, 3.0) == 0.5
    assert gd.fluctuation_relation(0.1, 2.0, 1.0) == pytest.approx(0.01)
    tau = 0.37
    assert gd.fluctuation_relation(0.5, tau, 1.0) == pytest.approx(0.5 ** tau)
    # colder second system: rarer fluctuation
    assert gd.fluctuation_relation(0.3, 2.0, 1.0) < 0.3 < gd.fluctuation_relation(0.3, 1.0, 2.0)
    p2 = gd.fluctuation_relation(0.2, 1.3, 0.7)
    assert p2 ** 0.7 == pytest.approx(0.2 ** 1.3)
    with pytest.raises(ValueError):
        gd.fluctuation_relation(0.0, 1.0, 1.0)


def test_demon_probs():
    pr = gd.demon_probs(D(0.5, 0.5))
    assert pr["p_alpha"] == pytest.approx(0.70711, abs=1e-5)
    assert pr["p_alphabeta"] == pytest.approx(0.41421, abs=1e-5)
    rng = np.random.default_rng(1)
    for _ in range(100):
        pr = gd.demon_probs(D(rng.uniform(0.01, 0.99), rng.uniform(0.01, 0.99)))
        assert pr["p_alpha_prime"] == pytest.approx(1 - pr["p_beta"])
        s = pr["p_alpha_prime"] + pr["p_beta_prime"] + pr["p_alphabeta"]
        assert s == pytest.approx(1.0, abs=1e-14)
        assert all(0 <= v <= 1 for v in pr.values())
    assert gd.demon_probs(D(0.4, 1 - 1e-9))["p_alphabeta"] < 1e-8
    with pytest.raises(gd.RegimeViolation):
        gd.demon_probs(D(0.4, 1.2))


def test_worked_point():
    f = gd.demon_flow(D(0.5, 0.5))
    assert f.Q == pytest.approx(-0.11893, abs=1e-4)
    assert f.Q == pytest.approx(-0.11892525474274158, abs=1e-14)
    assert f.N_L / f.N_R == pytest.approx(math.sqrt(2))
    assert f.Q_R == pytest.approx(math.log(2))


def test_flow_identities():
    rng = np.random.default_rng(2)
    for _ in range(100):
        p = D(rng.uniform(0.01, 0.99), rng.uniform(0.01, 0.99))
        f = gd.demon_flow(p)
        pr = gd.demon_probs(p)
        assert f.P_R == pytest.approx(pr["p_alphabeta"] * (p.p_A / pr["p_alpha"] + p.p_B / pr["p_beta"]))
        assert f.N_L >= f.N_R
        assert f.Q == pytest.approx((f.N_R * f.Q_R - f.N_L * f.Q_L) / (f.N_R + f.N_L))
        assert f.Q == pytest.approx(gd.demon_q_closed(p.p_A, p.tau), abs=1e-13)
        assert abs(f.q_l_residual) < 1e-12
        assert f.Q <= 1e-12
        # reversal dominance
        assert pr["p_alphabeta"] / pr["p_alpha"] >= pr["p_alphabeta"]
        assert f.P_R >= f.P_L


def test_q_grid_nonpositive():
    g = np.linspace(0.01, 0.99, 50)
    assert np.all(gd.demon_q_closed(g[:, None], g[None, :]) <= 1e-12)


def test_q_tau_limit():
    assert abs(gd.demon_flow(D(0.3, 1e-6)).Q) < 1e-4
    qs = [abs(gd.demon_flow(D(0.3, t)).Q) for t in (0.1, 0.01, 0.001)]
    assert qs[0] > qs[1] > qs[2]


def test_perfect_correlation_branch():
    f = gd.demon_flow(D(0.3, 2.0))
    assert f.Q == f.Q_R and f.N_R == math.inf and math.isnan(f.Q_L)
    r = gd.mc_demon(D(0.3, 2.0), 10**5, seed=1)
    assert abs(r["mean_Q"] - f.Q) < 3 * r["stderr"]


def test_szilard_reduction_sign():
    # p_A = p_B = 1/2 matches the engine with P1 = (1/2)^tau; flows agree in sign
    for tau in (0.2, 0.5, 0.9):
        q = gd.demon_flow(D(0.5, tau)).Q
        for ma in (0.0, 0.5, 1.0):
            e = energy_flow(0.5 ** tau, ResetUnitary.symmetric(ma))
            assert np.sign(q) == np.sign(e) == -1


def test_mc_worked_point():
    f = gd.demon_flow(D(0.5, 0.5))
    r = gd.mc_demon(D(0.5, 0.5), 10**6, seed=11)
    assert abs(r["mean_Q"] - f.Q) < 3 * r["stderr"]
    # symmetric case: both lowering subensembles equally visited; visits are
    # serially correlated, so compare replicate seeds rather than a binomial sd
    diffs = []
    for seed in range(20):
        x = gd.mc_demon(D(0.5, 0.5), 10**5, seed=100 + seed)
        diffs.append((x["visits_LA"] - x["visits_LB"]) / (x["visits_LA"] + x["visits_LB"]))
    diffs = np.array(diffs)
    assert abs(diffs.mean()) < 3 * diffs.std(ddof=1) / math.sqrt(diffs.size)


def test_mc_first_lowering_frequency():
    p = D(0.25, 0.4)
    r = gd.mc_demon(p, 10**6, seed=12)
    s = p.p_A ** 0.6 + p.p_B ** 0.6
    assert abs(r["first_lowering_A"] - p.p_A ** 0.6 / s) < 3 * r["first_lowering_A_stderr"]
    assert abs(r["mean_Q"] - gd.demon_flow(p).Q) < 3 * r["stderr"]


def test_mc_validation_and_determinism():
    with pytest.raises(ValueError):
        gd.mc_demon(D(0.5, 0.5), 100)
    assert gd.mc_demon(D(0.3, 0.3), 10**4, seed=5) == gd.mc_demon(D(0.3, 0.3), 10**4, seed=5)


def test_carnot_optimum_and_bound():
    rng = np.random.default_rng(3)
    for tau in (0.4, 1.0, 2.5):
        p = D(0.35, tau)
        opt = gd.carnot_bounds(p, (p.p_A, p.p_B))
        assert opt["dF_G"] == pytest.approx(opt["bound"], abs=1e-12)
        for _ in range(100):
            x = rng.uniform(0.01, 0.99)
            k = rng.uniform(0.5, 1.0) if tau >= 1 else 1.0
            r = gd.carnot_bounds(p, (k * x, k * (1 - x)))
            assert r["dF_G"] < r["bound"] or abs(x - p.p_A) < 1e-9


def test_carnot_efficiencies():
    eng = gd.carnot_bounds(D(0.3, 2.0), (0.3, 0.7))
    assert eng["efficiency"] == pytest.approx(1 - 1 / 2.0)
    pump = gd.carnot_bounds(D(0.3, 0.5), (0.3, 0.7))
    W = -pump["dF_G"]
    assert W / pump["Q"] == pytest.approx(1 / 0.5 - 1)
    eq = gd.carnot_bounds(D(0.3, 1.0), (0.3, 0.7))
    assert eq["dF_G"] == pytest.approx(0.0, abs=1e-15)
    assert gd.carnot_bounds(D(0.3, 1.0), (0.5, 0.5))["dF_G"] < 0
    with pytest.raises(gd.InfeasibleSplit):
        gd.carnot_bounds(D(0.3, 2.0), (0.6, 0.6))
