"""Dimensional-number engine: frozen examples and the property suites."""

import random

import pytest

from limsupdim.dimnum import (
    IndexSplit,
    LevelSpec,
    PartitionVariant,
    index_split,
    partition_at,
    s0,
    s0_bruteforce,
    s0_resonant,
    s_at,
    s_bar_level,
    s_level,
)
from limsupdim.extreal import INF, ext

from conftest import random_spec

VARIANTS = list(PartitionVariant)


# ---------------------------------------------------------------------------
# index split and partitions
# ---------------------------------------------------------------------------


def test_index_split_examples():
    assert index_split((ext(2), INF)) == IndexSplit(L=(1,), Linf=(2,))
    assert index_split((ext(3), ext(4))) == IndexSplit(L=(1, 2), Linf=())
    assert index_split((INF, INF, ext(1.5))) == IndexSplit(L=(3,), Linf=(1, 2))
    with pytest.raises(ValueError):
        index_split(())


def test_partition_examples():
    spec = LevelSpec.of((1, 1), (1.5, 1.5), (3, 4))
    part = partition_at(spec, 3)
    assert (part.K1, part.K2, part.K3) == ((), (1,), (2,))

    tie = LevelSpec.of((1, 1), (1, 1), (2, 2))
    default = partition_at(tie, 2)
    hat = partition_at(tie, 2, PartitionVariant.HAT)
    assert default.K2 == (1, 2)
    assert hat.K2 == ()

    inf_spec = LevelSpec.of((1, 1), (1, 1), (2, INF))
    part = partition_at(inf_spec, INF)
    assert (part.K1, part.K2, part.K3) == ((), (1,), (2,))

    with pytest.raises(ValueError):
        partition_at(spec, 0)


# ---------------------------------------------------------------------------
# s(u, v, A) and the levels
# ---------------------------------------------------------------------------


def test_s_at_hand_values():
    spec = LevelSpec.of((1, 1), (1.5, 1.5), (3, 4))
    assert s_at(spec, 3) == pytest.approx(1.0, abs=1e-15)
    assert s_at(LevelSpec.of((1, 1), (1, 1), (2, INF)), INF) == pytest.approx(1.0)
    spec3 = LevelSpec.of((1, 1), (1.2, 1.8), (1.2, 4))
    assert s_at(spec3, 1.2) == pytest.approx(2.0, abs=1e-15)
    with pytest.raises(ValueError):
        s_at(spec, -1)


def test_levels_hand_values():
    spec = LevelSpec.of((1, 1), (1.5, 1.5), (3, 4))
    assert s_level(spec, 2) == pytest.approx((1 - 1.5 / 4) + (1 - 2.5 / 4))
    assert s_level(spec, 2) == pytest.approx(1.0)
    inf_spec = LevelSpec.of((1, 1), (1, 1), (2, INF))
    assert s_level(inf_spec, 2) == pytest.approx(1.0)
    spec3 = LevelSpec.of((1, 1), (1.2, 1.8), (1.2, 4))
    assert s_level(spec3, 2) == pytest.approx(1.45)
    with pytest.raises(ValueError):
        s_level(spec, 3)
    with pytest.raises(ValueError):
        s_bar_level(spec, 0)


def test_s0_examples():
    assert s0(LevelSpec.of((1, 1), (1.5, 1.5), (3, 4))) == pytest.approx(1.0)
    assert s0(LevelSpec.of((1, 1), (1, 1), (2, INF))) == pytest.approx(1.0)
    assert s0(LevelSpec.of((1, 1), (1.2, 1.8), (1.2, 4))) == pytest.approx(1.45)


def test_s0_single_factor_u_equals_v():
    spec = LevelSpec.of((1,), (0.7,), (0.7,))
    assert s0(spec) == pytest.approx(1.0)
    assert s0_bruteforce(spec) == pytest.approx(1.0)


def test_s0_all_infinite_is_zero():
    spec = LevelSpec.of((1, 2), (1, 1), (INF, INF))
    assert s0(spec) == 0.0
    assert s0_bruteforce(spec) == 0.0


def test_bruteforce_enumeration_example():
    spec = LevelSpec.of((1, 1), (1, 1), (2, INF))
    # A in {1, 2, inf}: s = 2*1/1=2 at A=1... enumerate by hand:
    # A=1: K2 empty, K3={1,2}: 1/1 + 1/1 = 2; A=2: (1-1/2) + 1/2 = 1; A=inf: 1
    assert s_at(spec, 1) == pytest.approx(2.0)
    assert s_at(spec, 2) == pytest.approx(1.0)
    assert s0_bruteforce(spec) == pytest.approx(1.0)


def test_invalid_specs():
    with pytest.raises(ValueError):
        LevelSpec.of((1,), (1, 1), (2, 2))
    with pytest.raises(ValueError):
        LevelSpec.of((1, 1), (1, 1), (0.5, 2))  # u > v
    with pytest.raises(ValueError):
        LevelSpec.of((0, 1), (1, 1), (2, 2))  # delta must be positive
    with pytest.raises(ValueError):
        LevelSpec.of((1, 1), (1, INF), (2, INF))  # u must be finite


# ---------------------------------------------------------------------------
# property suites (criterion set 2 uses the same seeds)
# ---------------------------------------------------------------------------


def test_variant_equality_including_ties():
    rng = random.Random(101)
    checked = 0
    for _ in range(1000):
        spec = random_spec(rng)
        levels = {ext(x) for x in spec.u} | set(spec.v)
        for A in levels:
            vals = [s_at(spec, A, var) for var in VARIANTS]
            assert max(vals) - min(vals) <= 1e-12
            checked += 1
    # engineered ties: u_k = A and v_k = A at the same cut
    tie = LevelSpec.of((1, 1, 1), (1.5, 2.0, 1.0), (2.0, 3.0, 2.0))
    for A in (1.0, 1.5, 2.0, 3.0):
        vals = [s_at(tie, A, var) for var in VARIANTS]
        assert max(vals) - min(vals) <= 1e-12
    assert checked >= 1000


def test_oracle_equality_prop4():
    rng = random.Random(202)
    for i in range(1200):
        spec = random_spec(rng, force_inf=i % 3)
        assert abs(s0(spec) - s0_bruteforce(spec)) <= 1e-12


def test_bound_chain():
    rng = random.Random(303)
    for _ in range(1000):
        spec = random_spec(rng)
        total = sum(spec.delta)
        v0 = s0(spec)
        for k in range(1, spec.p + 1):
            lvl = s_level(spec, k)
            assert v0 <= lvl + 1e-12
            assert lvl <= total + 1e-12


def test_scaling_invariance():
    rng = random.Random(404)
    for _ in range(1000):
        spec = random_spec(rng)
        for c in (0.1, 1.0, 7.3):
            scaled = spec.scaled(c)
            for i in range(1, spec.p + 1):
                assert abs(s_level(scaled, i) - s_level(spec, i)) <= 1e-12
            assert abs(s0(scaled) - s0(spec)) <= 1e-12


def _v_of_n(spec: LevelSpec, n: float):
    return tuple(ext(n) if x.is_infinite else x for x in spec.v)


def test_continuity_in_v():
    """min-level continuity along v(n): infinite components sent to n."""
    rng = random.Random(505)
    for _ in range(200):
        spec = random_spec(rng, force_inf=1)
        target = s0(spec)
        split = spec.split()
        # constants of the exact n^-1 rate bound
        C = sum(spec.delta[i - 1] * spec.u[i - 1] for i in split.Linf) + sum(
            spec.delta[i - 1] * (spec.v[i - 1].finite - spec.u[i - 1])
            for i in split.L
        )
        n0 = max(
            [spec.u[i - 1] for i in range(1, spec.p + 1)]
            + [spec.v[i - 1].finite for i in split.L]
        )
        for n in (10, 100, 1000, 10**4, 10**5, 10**6):
            if n <= n0:
                continue
            approx = LevelSpec.of(spec.delta, spec.u, _v_of_n(spec, n))
            got = min(s_level(approx, i) for i in range(1, spec.p + 1))
            assert abs(got - target) <= C / n + 1e-12
        approx = LevelSpec.of(spec.delta, spec.u, _v_of_n(spec, 10**6))
        got = min(s_level(approx, i) for i in range(1, spec.p + 1))
        assert abs(got - target) <= 1e-3


def test_level_lower_semicontinuity_and_sbar_convergence():
    rng = random.Random(606)
    for _ in range(200):
        spec = random_spec(rng, force_inf=1)
        split = spec.split()
        n0 = max(
            [spec.u[i - 1] for i in range(1, spec.p + 1)]
            + [spec.v[i - 1].finite for i in split.L]
        )
        C = sum(spec.delta) * (n0 + 1.0)
        for n in (10**3, 10**4, 10**5):
            if n <= n0:
                continue
            approx = LevelSpec.of(spec.delta, spec.u, _v_of_n(spec, n))
            for i in range(1, spec.p + 1):
                assert s_level(approx, i) >= s_level(spec, i) - C / n
                # s-bar levels converge exactly once n clears the level set
                assert s_bar_level(approx, i) == pytest.approx(
                    s_bar_level(spec, i), abs=1e-14
                )


def test_resonant_examples_and_kappa_zero():
    assert s0_resonant(LevelSpec.of((1,), (1,), (2,)), 0.5) == pytest.approx(0.75)
    # kappa -> 1: theta_i tends to the K1 u K2 delta mass at each level
    spec = LevelSpec.of((1, 1), (1, 2), (2, 3))
    val = s0_resonant(spec, 1 - 1e-12)
    assert val == pytest.approx(1.0, abs=1e-9)

    rng = random.Random(707)
    for _ in range(300):
        s = random_spec(rng)
        assert s0_resonant(s, 0.0) == s0(s)
    with pytest.raises(ValueError):
        s0_resonant(spec, 1.0)
    with pytest.raises(ValueError):
        s0_resonant(spec, -0.1)


def _exact_s_at(delta, u, v, A):
    """Independent exact-rational evaluation of the cut-level expression.

    v entries are Fractions or None (infinite); A is a Fraction or None.
    """
    from fractions import Fraction

    p = len(delta)
    if A is None:
        return sum(delta[k] for k in range(p) if v[k] is not None)
    total = Fraction(0)
    for k in range(p):
        if u[k] > A:
            total += delta[k]
        elif v[k] is not None and v[k] <= A:
            total += delta[k] * (1 - Fraction(v[k] - u[k], 1) / A)
        else:
            total += delta[k] * u[k] / A
    return total


def test_exact_rational_cross_check():
    """Float engine against an exact Fraction evaluator on rational specs."""
    from fractions import Fraction

    rng = random.Random(4242)
    for _ in range(300):
        p = rng.randint(1, 4)
        delta = [Fraction(rng.randint(1, 12), 4) for _ in range(p)]
        u = [Fraction(rng.randint(1, 20), 4) for _ in range(p)]
        v = [
            None if rng.random() < 0.25 else u[k] + Fraction(rng.randint(0, 16), 4)
            for k in range(p)
        ]
        spec = LevelSpec.of(
            [float(d) for d in delta],
            [float(x) for x in u],
            [INF if x is None else ext(float(x)) for x in v],
        )
        levels = sorted({x for x in u} | {x for x in v if x is not None})
        for A in levels:
            want = _exact_s_at(delta, u, v, A)
            assert s_at(spec, float(A)) == pytest.approx(float(want), abs=1e-12)
        exact_levels = [_exact_s_at(delta, u, v, v[k]) for k in range(p)]
        want_s0 = float(min(exact_levels + [_exact_s_at(delta, u, v, None)]))
        assert s0(spec) == pytest.approx(want_s0, abs=1e-12)


def test_epsilon_perturbation_continuity():
    """s0(u, (1 +/- eps) v) tends to s0(u, v) as eps -> 0."""
    rng = random.Random(808)
    for _ in range(100):
        spec = random_spec(rng)
        # keep a margin so (1 - eps) v still dominates u
        if any(
            x.is_finite and x.finite < 1.01 * spec.u[i]
            for i, x in enumerate(spec.v)
        ):
            continue
        base = s0(spec)
        prev = None
        for eps in (1e-2, 1e-4, 1e-6):
            for sign in (+1, -1):
                factor = 1.0 + sign * eps
                stretched = LevelSpec.of(
                    spec.delta,
                    spec.u,
                    [x if x.is_infinite else ext(factor * x.finite) for x in spec.v],
                )
                diff = abs(s0(stretched) - base)
                assert diff <= sum(spec.delta) * 3 * eps + 1e-12
            prev = diff


def test_u_shrink_equals_v_stretch():
    """Shrinking u by (1 - eps) equals stretching v by 1/(1 - eps), by the
    scaling invariance of the dimensional number."""
    rng = random.Random(818)
    for _ in range(200):
        spec = random_spec(rng)
        eps = rng.uniform(1e-6, 0.2)
        c = 1.0 / (1.0 - eps)
        shrunk_u = LevelSpec.of(
            spec.delta, [(1.0 - eps) * x for x in spec.u], spec.v
        )
        stretched_v = LevelSpec.of(
            spec.delta,
            spec.u,
            [x if x.is_infinite else ext(c * x.finite) for x in spec.v],
        )
        assert s0(shrunk_u) == pytest.approx(s0(stretched_v), abs=1e-11)
