"""Shrinking-target formulas for diagonal torus maps."""

import math
import random

import pytest

from limsupdim.dimnum import LevelSpec, s_level
from limsupdim.psi import ExponentVector
from limsupdim.tori import TorusSystem, dim_torus, torus_inner_min, xi, xi_rows


def EV(*xs):
    return ExponentVector.of(xs)


LOG2, LOG3, LOG6 = math.log(2), math.log(3), math.log(6)


def test_system_gate():
    with pytest.raises(ValueError):
        TorusSystem((2, 1.0))
    TorusSystem((-2, 3))  # negative eigenvalues enter through |beta|


def test_xi_branches():
    sysm = TorusSystem((2, 3))
    tau = 1.0  # >= log(3/2): K1 empty branch
    assert xi(sysm, EV(tau, "inf"), 1) == pytest.approx(LOG6 / (LOG2 + tau))
    tau = 0.2  # < log(3/2): K1 = {2}
    assert xi(sysm, EV(tau, "inf"), 1) == pytest.approx(1 + LOG2 / (LOG2 + tau))
    e = math.e
    sys_e = TorusSystem((e, e))
    assert xi(sys_e, EV(0, 0), 1) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        xi(sysm, EV(1, "inf"), 2)


def test_dim_torus_examples():
    sysm = TorusSystem((2, 3))
    for tau in (0.1, 0.5, 1.0, 2.0, 5.0):
        want = min(1.0, LOG6 / (LOG2 + tau))
        assert dim_torus(sysm, [EV(tau, "inf")]) == pytest.approx(want, abs=1e-12)
    assert dim_torus(sysm, [EV(LOG3, "inf")]) == pytest.approx(1.0, abs=1e-12)
    assert dim_torus(TorusSystem((2, 2)), [EV(0, 0)]) == pytest.approx(2.0)
    assert torus_inner_min(sysm, EV("inf", "inf")) == 0.0
    with pytest.raises(ValueError):
        dim_torus(sysm, [])


def test_crossover_continuity():
    sysm = TorusSystem((2, 3))
    taus = [LOG3 + 0.02 * (k - 50) for k in range(101)]
    vals = [dim_torus(sysm, [EV(t, "inf")]) for t in taus]
    for t, v in zip(taus, vals):
        if t <= LOG3:
            assert v == pytest.approx(1.0, abs=1e-12)
    for a, b in zip(vals, vals[1:]):
        assert b <= a + 1e-12
        assert a - b < 0.03  # no jumps on the 0.02 grid


def test_reduction_to_dimensional_number():
    e = math.e
    sysm = TorusSystem((e, e, e))
    rng = random.Random(37)
    for _ in range(200):
        t = [rng.expovariate(1.0) for _ in range(3)]
        spec = LevelSpec.of((1, 1, 1), (1, 1, 1), [1 + x for x in t])
        tv = EV(*t)
        for i in (1, 2, 3):
            assert xi(sysm, tv, i) == pytest.approx(s_level(spec, i), abs=1e-12)


def test_permutation_equivariance():
    rng = random.Random(41)
    for _ in range(100):
        beta = [rng.uniform(1.5, 6) for _ in range(3)]
        t = [rng.expovariate(1.0) if rng.random() > 0.3 else "inf" for _ in range(3)]
        perm = list(range(3))
        rng.shuffle(perm)
        a = dim_torus(TorusSystem(tuple(beta)), [EV(*t)])
        b = dim_torus(
            TorusSystem(tuple(beta[p] for p in perm)),
            [EV(*(t[p] for p in perm))],
        )
        assert a == pytest.approx(b, abs=1e-12)


def test_xi_rows_diagnostics():
    sysm = TorusSystem((2, 3))
    rows = xi_rows(sysm, [EV(0.2, "inf")])
    assert rows[0]["K1"] == (2,)
    assert rows[0]["K2"] == (1,)
    assert rows[0]["K3"] == ()
