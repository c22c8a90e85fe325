"""Simultaneous-approximation formulas and the weight construction."""

import math
import random

import pytest

from limsupdim.dimnum import s_level
from limsupdim.dioph import (
    DiophInstance,
    WeightVector,
    dim_W,
    dim_corollary,
    inner_min,
    optimal_weight_details,
    optimal_weights,
    weight_level_spec,
    zeta,
    zeta_rows,
)
from limsupdim.psi import ExponentVector

from conftest import random_exponents


def EV(*xs):
    return ExponentVector.of(xs)


# ---------------------------------------------------------------------------
# zeta and dim_W
# ---------------------------------------------------------------------------


def test_zeta_examples():
    for tau in (0.5, 1, 2, 5):
        assert zeta(EV(tau, "inf"), 1) == pytest.approx(3 / (1 + tau))
    t = EV(1, 2)
    assert zeta(t, 1) == pytest.approx(1.5)
    assert zeta(t, 2) == pytest.approx(4 / 3)
    lam = 0.7
    t3 = EV(lam, lam, lam)
    for i in (1, 2, 3):
        assert zeta(t3, i) == pytest.approx(4 / (1 + lam))
    # extension: infinite coordinate reports #L
    assert zeta(EV(1, "inf"), 2) == 1.0
    with pytest.raises(ValueError):
        zeta(t, 3)


def test_dim_W_examples():
    assert dim_W(DiophInstance(2, (EV(2, "inf"),))) == pytest.approx(1.0)
    assert dim_W(DiophInstance(2, (EV(5, "inf"),))) == pytest.approx(0.5)
    assert dim_W(DiophInstance(2, (EV(1, 2),))) == pytest.approx(4 / 3)
    # power-log style pair (tau1 >= tau2, tau1 + tau2 > 1)
    for t1, t2 in ((2, 1), (3, 0.5), (1, 1)):
        want = min((3 + t1 - t2) / (1 + t1), 3 / (1 + t2))
        assert dim_W(DiophInstance(2, (EV(t1, t2),))) == pytest.approx(want)
    with pytest.raises(ValueError):
        dim_W(DiophInstance(2, ()))


def test_dim_W_sup_over_multiple_points():
    inst = DiophInstance(2, (EV(2, "inf"), EV(1, 2), EV("inf", "inf")))
    assert dim_W(inst) == pytest.approx(4 / 3)
    assert inner_min(EV("inf", "inf")) == 0.0


def test_ww_agreement_all_finite():
    rng = random.Random(11)
    for _ in range(300):
        d = rng.randint(1, 4)
        t = [rng.expovariate(0.7) + 0.01 for _ in range(d)]
        if sum(t) <= 1:
            continue
        got = dim_W(DiophInstance(d, (EV(*t),)))
        want = min(min(zeta(EV(*t), i) for i in range(1, d + 1)), float(d))
        assert got == pytest.approx(want, abs=1e-12)


def test_dim_corollary():
    for d, tau in ((1, 2.0), (2, 0.8), (3, 0.5)):
        lam = (tau,) * d
        if d * tau > 1:
            assert dim_corollary(lam) == pytest.approx((d + 1) / (1 + tau))
    assert dim_corollary((1, 2)) == pytest.approx(4 / 3)
    assert dim_corollary(("inf", "inf")) == 0.0
    # zero components leave L but still enter the sums of other levels
    assert dim_corollary((0.0, 2.0)) == pytest.approx(min(1.0, (3 + 2) / 3))


def test_zeta_rows_diagnostics():
    rows = zeta_rows(DiophInstance(2, (EV(1, 2),)))
    assert rows[0]["n_finite"] == 2
    assert rows[0]["inner_min"] == pytest.approx(4 / 3)


# ---------------------------------------------------------------------------
# optimal weights
# ---------------------------------------------------------------------------


def test_weights_case1():
    det = optimal_weight_details(EV(2, 3))
    assert det.case == 1
    assert det.weights.a == (1.5, 1.5)
    spec = weight_level_spec(det.weights)
    vals = [s_level(spec, i) for i in (1, 2)]
    assert vals == pytest.approx([1.0, 1.0])
    assert min(vals) == pytest.approx(min(zeta(EV(2, 3), i) for i in (1, 2)))


def test_weights_case2_example():
    t = EV(0.2, 3)
    det = optimal_weight_details(t)
    assert det.case == 2
    assert det.t_K == pytest.approx(3.0)
    assert det.t_star == pytest.approx(0.8)
    assert det.weights.a == pytest.approx((1.2, 1.8))
    spec = weight_level_spec(det.weights)
    assert s_level(spec, 1) == pytest.approx(2.0)  # equals d below the threshold
    assert s_level(spec, 2) == pytest.approx(1.45)
    assert min(s_level(spec, i) for i in (1, 2)) == pytest.approx(
        min(zeta(t, i) for i in (1, 2))
    )


def test_weights_preconditions():
    with pytest.raises(ValueError):
        optimal_weights(EV(0.2, "inf"))  # finite sum 0.2 < 1
    with pytest.raises(ValueError):
        optimal_weights(EV("inf", "inf"))  # empty L
    bad = EV(0.5, 0.4)  # sum below 1
    with pytest.raises(ValueError):
        optimal_weights(bad)


def test_weight_vector_invariant_gate():
    with pytest.raises(ValueError):
        WeightVector(a=(0.9, 2.1), t=EV(2, 2))
    with pytest.raises(ValueError):
        WeightVector(a=(1.5, 1.6), t=EV(2, 2))  # sum != d+1


def _draw_accepted(rng):
    while True:
        t = random_exponents(rng)
        L = t.L
        if not L:
            continue
        if sum(t.t[i - 1].finite for i in L) >= 1.0:
            return t


def test_weight_certificate_500():
    rng = random.Random(909)
    n_case2 = 0
    for _ in range(500):
        t = _draw_accepted(rng)
        det = optimal_weight_details(t)
        a = det.weights.a
        d = t.d
        # the weight window, exactly
        assert all(ai >= 1.0 for ai in a)
        for ai, ti in zip(a, t.t):
            if ti.is_finite:
                assert ai <= 1.0 + ti.finite + 1e-12
        assert abs(sum(a) - (d + 1)) <= 1e-12
        spec = weight_level_spec(det.weights)
        lvl = min(s_level(spec, i) for i in t.L)
        zmin = min(zeta(t, i) for i in t.L)
        assert abs(lvl - zmin) <= 1e-10
        if det.case == 2:
            n_case2 += 1
            assert det.t_star > 0
            for i in t.L:
                ti = t.t[i - 1].finite
                if ti < det.t_K:
                    assert s_level(spec, i) == pytest.approx(float(d), abs=1e-12)
                    assert zeta(t, i) > float(d)
            zK = min(
                zeta(t, i)
                for i in t.L
                if t.t[i - 1].finite == det.t_K
            )
            assert zK <= d + 1e-12
    assert n_case2 >= 50  # both branches genuinely exercised


def test_dim_W_monotone_in_each_exponent():
    base = [0.8, 1.5, 0.6]
    grid = [0.1 * k for k in range(1, 40)]
    for axis in range(3):
        prev = math.inf
        for val in grid:
            t = list(base)
            t[axis] = val
            cur = dim_W(DiophInstance(3, (EV(*t),)))
            assert cur <= prev + 1e-12
            prev = cur


def test_zeta_tied_components_contribute_zero():
    # strict inequality in the sum: equal exponents add nothing
    t = EV(2, 2)
    assert zeta(t, 1) == pytest.approx(1.0)
    assert zeta(t, 2) == pytest.approx(1.0)
    t3 = EV(1, 1, 3)
    assert zeta(t3, 1) == pytest.approx(2.0)  # (4 + 0) / 2
    assert zeta(t3, 3) == pytest.approx((4 + 2 + 2) / 4)
