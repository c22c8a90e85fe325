"""Dimensional-number engine.

Given per-factor regularity exponents ``delta``, enlargement exponents ``u``
and shrinking exponents ``v`` (possibly infinite), this module evaluates the
piecewise cut-level expression ``s(u, v, A)``, the level values at ``A = v_i``
and ``A = u_i``, and their minimum ``s0(u, v)`` -- the dimension lower bound
produced by the mass-transference machinery.  A brute-force evaluator over
every meaningful cut level serves as an independent oracle for ``s0``, and a
``kappa``-scaled variant covers resonant-set neighbourhoods.

Factor indices are 1-based throughout, matching the usual mathematical
convention for the level operations.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

from .extreal import INF, ExtLike, ExtReal, ext

__all__ = [
    "LevelSpec",
    "IndexSplit",
    "Partition",
    "PartitionVariant",
    "index_split",
    "partition_at",
    "s_at",
    "s_level",
    "s_bar_level",
    "s0",
    "s0_bruteforce",
    "s0_resonant",
]


@dataclass(frozen=True)
class IndexSplit:
    """Finite / infinite index split of a vector of extended reals (1-based)."""

    L: tuple[int, ...]
    Linf: tuple[int, ...]


def index_split(v: Sequence[ExtLike]) -> IndexSplit:
    """Split indices into those with finite and infinite components."""
    if len(v) == 0:
        raise ValueError("index_split needs a nonempty vector")
    vals = [ext(x) for x in v]
    L = tuple(i for i, x in enumerate(vals, start=1) if x.is_finite)
    Linf = tuple(i for i, x in enumerate(vals, start=1) if x.is_infinite)
    return IndexSplit(L=L, Linf=Linf)


@dataclass(frozen=True)
class LevelSpec:
    """The triple (delta, u, v) feeding every dimensional-number formula.

    Requires len(delta) == len(u) == len(v) >= 1, all delta_i > 0, all u_i
    finite and > 0, and u_i <= v_i componentwise.
    """

    delta: tuple[float, ...]
    u: tuple[float, ...]
    v: tuple[ExtReal, ...]
    p: int = field(init=False)

    def __post_init__(self) -> None:
        delta = tuple(float(d) for d in self.delta)
        u = tuple(float(x) for x in self.u)
        v = tuple(ext(x) for x in self.v)
        if not (len(delta) == len(u) == len(v)) or len(delta) == 0:
            raise ValueError("delta, u, v must share a common positive length")
        if any(d <= 0 or math.isinf(d) or math.isnan(d) for d in delta):
            raise ValueError("every delta_i must be finite and > 0")
        if any(x <= 0 or math.isinf(x) or math.isnan(x) for x in u):
            raise ValueError("every u_i must be finite and > 0")
        for i, (ui, vi) in enumerate(zip(u, v), start=1):
            if vi < ui:
                raise ValueError(f"u_{i} = {ui} exceeds v_{i} = {vi}")
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "p", len(delta))

    @staticmethod
    def of(
        delta: Sequence[float],
        u: Sequence[float],
        v: Sequence[ExtLike],
    ) -> "LevelSpec":
        return LevelSpec(tuple(delta), tuple(u), tuple(ext(x) for x in v))

    def split(self) -> IndexSplit:
        return index_split(self.v)

    def scaled(self, c: float) -> "LevelSpec":
        """Scale u and v by c > 0 (c * inf stays inf); delta is untouched."""
        if c <= 0:
            raise ValueError("scale factor must be > 0")
        return LevelSpec(
            self.delta,
            tuple(c * x for x in self.u),
            tuple(INF if x.is_infinite else ext(c * x.finite) for x in self.v),
        )


class PartitionVariant(enum.Enum):
    """Tie-handling variants for the cut-level index partition.

    DEFAULT puts {u_k > A} in K1 and {v_k <= A} in K2.  TILDE additionally
    moves the ties {u_k = A} into K1 and drops {v_k = A} from K2; HAT only
    drops {v_k = A} from K2.  All three give the same s(u, v, A).
    """

    DEFAULT = "default"
    TILDE = "tilde"
    HAT = "hat"


@dataclass(frozen=True)
class Partition:
    K1: tuple[int, ...]
    K2: tuple[int, ...]
    K3: tuple[int, ...]
    level: ExtReal
    variant: PartitionVariant = PartitionVariant.DEFAULT


def partition_at(
    spec: LevelSpec,
    A: ExtLike,
    variant: PartitionVariant = PartitionVariant.DEFAULT,
) -> Partition:
    """Partition {1..p} into (K1, K2, K3) at cut level A > 0."""
    A = ext(A)
    if A == 0:
        raise ValueError("cut level A must be > 0")
    k1 = set()
    k2 = set()
    for k in range(1, spec.p + 1):
        uk = ext(spec.u[k - 1])
        vk = spec.v[k - 1]
        in_k1 = uk > A
        in_k2 = vk.is_finite and vk <= A
        if variant is PartitionVariant.TILDE and uk == A:
            in_k1 = True
        if variant in (PartitionVariant.TILDE, PartitionVariant.HAT):
            if vk.is_finite and vk == A:
                in_k2 = False
        if in_k1:
            k1.add(k)
        elif in_k2:
            k2.add(k)
    k3 = tuple(k for k in range(1, spec.p + 1) if k not in k1 and k not in k2)
    return Partition(
        K1=tuple(sorted(k1)),
        K2=tuple(sorted(k2)),
        K3=k3,
        level=A,
        variant=variant,
    )


def s_at(
    spec: LevelSpec,
    A: ExtLike,
    variant: PartitionVariant = PartitionVariant.DEFAULT,
) -> float:
    """Evaluate the cut-level expression s(u, v, A) for A > 0.

    Finite A:  sum over K1 of delta_k
             + sum over K2 of delta_k * (1 - (v_k - u_k)/A)
             + sum over K3 of delta_k * u_k / A.
    Infinite A: sum of delta_k over the finite-v indices.
    """
    A = ext(A)
    if A == 0:
        raise ValueError("cut level A must be > 0")
    if A.is_infinite:
        return sum(spec.delta[i - 1] for i in spec.split().L)
    part = partition_at(spec, A, variant)
    a = A.finite
    total = 0.0
    for k in part.K1:
        total += spec.delta[k - 1]
    for k in part.K2:
        vk = spec.v[k - 1].finite
        total += spec.delta[k - 1] * (1.0 - (vk - spec.u[k - 1]) / a)
    for k in part.K3:
        total += spec.delta[k - 1] * spec.u[k - 1] / a
    return total


def _check_index(spec: LevelSpec, i: int) -> None:
    if not 1 <= i <= spec.p:
        raise ValueError(f"factor index {i} out of range 1..{spec.p}")


def s_level(spec: LevelSpec, i: int) -> float:
    """s(u, v, i) := s(u, v, A) at A = v_i."""
    _check_index(spec, i)
    return s_at(spec, spec.v[i - 1])


def s_bar_level(spec: LevelSpec, i: int) -> float:
    """s-bar(u, v, i) := s(u, v, A) at A = u_i (always the finite branch)."""
    _check_index(spec, i)
    return s_at(spec, ext(spec.u[i - 1]))


def s0(spec: LevelSpec) -> float:
    """The dimensional number: min over 1 <= i <= p of s(u, v, i).

    Equivalently min{ min over finite-v levels, sum of delta over finite-v
    indices }.  With every v_i infinite the value is 0 (the empty sum).
    """
    return min(s_level(spec, i) for i in range(1, spec.p + 1))


def s0_bruteforce(spec: LevelSpec) -> float:
    """Independent oracle for s0: scan every cut level in {u_i} | {v_i}.

    Evaluates s(u, v, A) at every A in the full level set plus the finite-v
    delta sum, and returns the minimum.  That the result equals s0 (i.e. the
    u-levels never go below it) is exactly the oracle property under test.
    """
    split = spec.split()
    cap = sum(spec.delta[i - 1] for i in split.L)
    values = [cap]
    levels = {ext(x) for x in spec.u} | set(spec.v)
    for A in levels:
        values.append(s_at(spec, A))
    return min(values)


def s0_resonant(spec: LevelSpec, kappa: float) -> float:
    """The kappa-scaled dimensional number for resonant-set neighbourhoods.

    For each finite-v level i the K2/K3 contributions are damped by
    (1 - kappa); the minimum is taken against the finite-v delta sum.
    At kappa = 0 this is exactly s0.
    """
    if not 0 <= kappa < 1:
        raise ValueError("kappa must lie in [0, 1)")
    split = spec.split()
    cap = sum(spec.delta[i - 1] for i in split.L)
    best = cap
    for i in split.L:
        vi = spec.v[i - 1].finite
        part = partition_at(spec, spec.v[i - 1])
        theta = 0.0
        for k in part.K1:
            theta += spec.delta[k - 1]
        for k in part.K2:
            vk = spec.v[k - 1].finite
            theta += spec.delta[k - 1] * (
                1.0 - (1.0 - kappa) * (vk - spec.u[k - 1]) / vi
            )
        for k in part.K3:
            theta += (1.0 - kappa) * spec.delta[k - 1] * spec.u[k - 1] / vi
        best = min(best, theta)
    return best
