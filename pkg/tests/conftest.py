"""Shared sampling helpers for the property suites.

The randomized spec distribution is fixed here once: delta_i ~ U[0.25, 3],
u_i ~ U[0.1, 5], v_i = u_i + Exp(1) or infinity with probability 1/4.
Seeds are pinned in the tests that use them.
"""

import random

import pytest

from limsupdim.dimnum import LevelSpec
from limsupdim.extreal import INF, ext
from limsupdim.psi import ExponentVector

P_INF = 0.25


def random_spec(rng: random.Random, p: int | None = None, force_inf: int = 0) -> LevelSpec:
    p = p or rng.randint(1, 4)
    delta = [rng.uniform(0.25, 3.0) for _ in range(p)]
    u = [rng.uniform(0.1, 5.0) for _ in range(p)]
    v = []
    for i in range(p):
        if i < force_inf or rng.random() < P_INF:
            v.append(INF)
        else:
            v.append(ext(u[i] + rng.expovariate(1.0)))
    if force_inf:
        rng.shuffle(v)
        # reconcile u <= v after the shuffle (inf dominates everything)
        v = [x if x.is_infinite else ext(max(float(x), u[i])) for i, x in enumerate(v)]
    return LevelSpec.of(delta, u, v)


def random_exponents(rng: random.Random, d: int | None = None) -> ExponentVector:
    """Exponent draws mixing zeros, finite values and infinities."""
    d = d or rng.randint(1, 4)
    t = []
    for _ in range(d):
        roll = rng.random()
        if roll < 0.1:
            t.append(ext(0.0))
        elif roll < 0.3:
            t.append(INF)
        else:
            t.append(ext(rng.expovariate(0.8)))
    return ExponentVector.of(t)


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)
