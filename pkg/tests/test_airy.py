import math

import numpy as np
import pytest
from scipy import special
from scipy.integrate import solve_ivp

import szilard.airy as A


def test_values_at_zero():
    ai, aip = A.airy_value_and_derivative(0.0)
    assert ai == pytest.approx(0.3550280539, abs=1e-10)
    assert ai == pytest.approx(3 ** (-2 / 3) / math.gamma(2 / 3), abs=1e-14)
    assert aip == pytest.approx(-0.2588194038, abs=1e-10)


def test_against_scipy_on_domain():
    z = np.linspace(-20, 20, 4001)
    ai, aip = A.airy_value_and_derivative(z)
    ref = special.airy(z)
    assert np.max(np.abs(ai - ref[0])) < 1e-10
    assert np.max(np.abs(aip - ref[1])) < 1e-10


def test_against_ode_integration():
    # integrate Ai'' = z Ai backwards from z = 0 using the series start values
    ai0, aip0 = A.airy_value_and_derivative(0.0)
    sol = solve_ivp(lambda z, y: [y[1], z * y[0]], (0.0, -8.0), [ai0, aip0],
                    rtol=1e-12, atol=1e-14, dense_output=True)
    for z in (-1.0, -4.5, -8.0):
        assert A.airy_value_and_derivative(z)[0] == pytest.approx(sol.sol(z)[0], abs=1e-9)


def test_branch_seams_are_continuous():
    for s in (A.POS_SPLIT, -A.NEG_SPLIT):
        d = 1e-9
        lo = A.airy_value_and_derivative(s - d)
        hi = A.airy_value_and_derivative(s + d)
        # remove the smooth change across the 2d gap before comparing
        assert abs(hi[0] - lo[0] - 2 * d * lo[1]) < 1e-10
        assert abs(hi[1] - lo[1] - 2 * d * s * lo[0]) < 1e-10


def test_domain():
    with pytest.raises(A.DomainTooLarge):
        A.airy_value_and_derivative(20.5)
    with pytest.raises(A.DomainTooLarge):
        A.airy_value_and_derivative(np.array([0.0, -21.0]))


def test_first_zero():
    a1 = A.airy_zero(1)
    assert a1 == pytest.approx(-2.33811, abs=1e-5)
    assert a1 == pytest.approx(-2.338107410459767, abs=1e-13)
    assert abs(A.airy_value_and_derivative(a1)[0]) < 1e-10


def test_zeros_against_scipy():
    ref = special.ai_zeros(2000)[0]
    ours = A.airy_zeros(2000)
    assert np.max(np.abs(ours - ref)) < 1e-10
    assert np.all(np.diff(ours) < 0)
    for n in (1, 5, 19):
        assert abs(A.airy_value_and_derivative(A.airy_zero(n))[0]) < 1e-10


def test_large_index_zero():
    # beyond the evaluator domain the refined asymptotic series is used
    n = 10**6
    t = 3 * math.pi * (4 * n - 1) / 8
    crude = -t ** (2 / 3)
    assert A.airy_zero(n) == pytest.approx(crude, rel=1e-10)
    assert A.airy_zero(n) == pytest.approx(A.asymptotic_zero(n), rel=1e-15)


def test_tenth_zero_and_leading_form():
    a10 = A.airy_zero(10)
    assert a10 == pytest.approx(-12.828776752865757, abs=1e-11)
    # the crude -(3 pi n / 2)^(2/3) form converges only slowly
    rel = [abs(A.airy_zero(n) / A.leading_zero(n) - 1) for n in (10, 100, 1000)]
    assert rel[0] == pytest.approx(0.0167, abs=5e-4)
    assert rel[0] > rel[1] > rel[2]


def test_derivative_at_zero():
    ref = special.ai_zeros(100)[3]
    for n in (1, 7, 19, 20, 50, 100):
        assert A.derivative_at_zero(n) == pytest.approx(ref[n - 1], abs=1e-10)
