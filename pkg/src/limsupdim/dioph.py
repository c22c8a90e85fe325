"""Simultaneous-approximation dimension layer.

Computes the per-coordinate dimension contributions zeta_i(t), the sup-min
dimension of W_d(Psi) over a supplied accumulation set, its single-point
corollary, and the explicit weight vector that certifies the lower bound:
with unit regularity exponents, u = a and v = 1 + t, the minimal level value
of the dimensional number coincides with the minimal zeta_i(t).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .dimnum import LevelSpec, s_level
from .extreal import INF, ExtReal, ext
from .psi import ExponentVector

__all__ = [
    "DiophInstance",
    "WeightVector",
    "zeta",
    "inner_min",
    "dim_W",
    "dim_corollary",
    "WeightDetails",
    "optimal_weight_details",
    "optimal_weights",
    "weight_level_spec",
    "zeta_rows",
]

_SUM_TOL = 1e-12


@dataclass(frozen=True)
class DiophInstance:
    """Ambient dimension d plus a finite accumulation set (or sampled grid)."""

    d: int
    U: tuple[ExponentVector, ...]

    def __post_init__(self) -> None:
        if self.d < 1:
            raise ValueError("d must be >= 1")
        U = tuple(self.U)
        if any(t.d != self.d for t in U):
            raise ValueError("every exponent vector must have length d")
        object.__setattr__(self, "U", U)


@dataclass(frozen=True)
class WeightVector:
    """Weights a with 1 <= a_i <= 1 + t_i and sum(a) = d + 1."""

    a: tuple[float, ...]
    t: ExponentVector

    def __post_init__(self) -> None:
        if len(self.a) != self.t.d:
            raise ValueError("weight/exponent length mismatch")
        for i, (ai, ti) in enumerate(zip(self.a, self.t), start=1):
            if ai < 1.0:
                raise ValueError(f"a_{i} = {ai} below 1")
            if ti.is_finite and ai > 1.0 + ti.finite + _SUM_TOL:
                raise ValueError(f"a_{i} = {ai} exceeds 1 + t_{i}")
        total = sum(self.a)
        if abs(total - (len(self.a) + 1)) > _SUM_TOL * len(self.a):
            raise ValueError(f"weights must sum to d + 1, got {total}")


def zeta(t: ExponentVector, i: int) -> float:
    """zeta_i(t) for 1-based i; equals #L(t) when t_i is infinite."""
    d = t.d
    if not 1 <= i <= d:
        raise ValueError(f"index {i} out of range 1..{d}")
    ti = t.t[i - 1]
    if ti.is_infinite:
        return float(len(t.L))
    num = d + 1.0
    for tk in t.t:
        if tk < ti:  # strict, so only finite t_k contribute
            num += ti.finite - tk.finite
    return num / (1.0 + ti.finite)


def inner_min(t: ExponentVector) -> float:
    """min{ min over finite levels of zeta_i(t), #L(t) }; 0 when L is empty."""
    L = t.L
    if not L:
        return 0.0
    return min(min(zeta(t, i) for i in L), float(len(L)))


def dim_W(inst: DiophInstance) -> float:
    """sup over the supplied accumulation set of the inner min."""
    if not inst.U:
        raise ValueError("accumulation set must be nonempty")
    return max(inner_min(t) for t in inst.U)


def dim_corollary(lam: Sequence[ExtReal | float | str]) -> float:
    """Single-limit specialisation; indices with lambda_i = 0 leave L.

    zeta_i(lambda) itself still follows the strict-sum definition, so zero
    components contribute to the sums of the surviving levels.
    """
    t = ExponentVector.of(list(lam))
    L = tuple(i for i in t.L if t.t[i - 1] > 0)
    if not L:
        return 0.0
    return min(min(zeta(t, i) for i in L), float(len(L)))


def weight_level_spec(weights: WeightVector) -> LevelSpec:
    """The (delta=1, u=a, v=1+t) spec the weight certificate is checked on."""
    t = weights.t
    v = tuple(INF if x.is_infinite else ext(1.0 + x.finite) for x in t.t)
    return LevelSpec.of((1.0,) * t.d, weights.a, v)


@dataclass(frozen=True)
class WeightDetails:
    weights: WeightVector
    case: int  # 1: flat choice; 2: threshold construction
    t_K: float | None = None
    t_star: float | None = None


def optimal_weight_details(t: ExponentVector) -> WeightDetails:
    """Weights realising min zeta via the dimensional number, with the
    internals of the construction exposed.

    Preconditions: L(t) nonempty and sum of the finite exponents >= 1
    (otherwise the subspace bound #L(t) applies and no weights are needed).

    If every exponent exceeds 1/d the flat choice a_i = 1 + 1/d works.
    Otherwise take the smallest threshold t_K among the finite exponents
    t_j that satisfy t_j >= (1 - sum of smaller exponents) / #{t_i >= t_j},
    put t* = that quotient at t_K, and use a_i = 1 + t_i below the threshold
    and a_i = 1 + t* at or above it.
    """
    d = t.d
    L = t.L
    if not L:
        raise ValueError("optimal_weights needs at least one finite exponent")
    finite_sum = sum(t.t[i - 1].finite for i in L)
    if finite_sum < 1.0:
        raise ValueError(
            "sum of finite exponents is below 1; use the subspace bound #L(t)"
        )

    if all(x > ext(1.0 / d) for x in t.t):
        a = tuple(1.0 + 1.0 / d for _ in range(d))
        return WeightDetails(weights=WeightVector(a=a, t=t), case=1)

    def smaller_sum(tj: float) -> float:
        return sum(x.finite for x in t.t if x.is_finite and x < tj)

    def geq_count(tj: float) -> int:
        return sum(1 for x in t.t if x >= ext(tj))

    thresholds = []
    for j in L:
        tj = t.t[j - 1].finite
        if tj >= (1.0 - smaller_sum(tj)) / geq_count(tj):
            thresholds.append(tj)
    if not thresholds:  # ruled out by finite_sum >= 1; kept as a hard guard
        raise ValueError("threshold set is empty despite the sum condition")
    t_K = min(thresholds)
    t_star = (1.0 - smaller_sum(t_K)) / geq_count(t_K)
    if not t_star > 0:
        raise ValueError(f"computed t* = {t_star} is not positive")
    a = tuple(
        1.0 + x.finite if (x.is_finite and x < t_K) else 1.0 + t_star for x in t.t
    )
    return WeightDetails(
        weights=WeightVector(a=a, t=t), case=2, t_K=t_K, t_star=t_star
    )


def optimal_weights(t: ExponentVector) -> WeightVector:
    """The weight vector of optimal_weight_details."""
    return optimal_weight_details(t).weights


def optimal_level_min(t: ExponentVector) -> tuple[float, float]:
    """(min level value of the certificate spec, min zeta over L(t))."""
    weights = optimal_weights(t)
    spec = weight_level_spec(weights)
    lvl = min(s_level(spec, i) for i in t.L)
    zmin = min(zeta(t, i) for i in t.L)
    return lvl, zmin


def zeta_rows(inst: DiophInstance) -> list[dict]:
    """Per-t diagnostics: the zeta vector, #L and the inner min."""
    rows = []
    for t in inst.U:
        zvec = [zeta(t, i) for i in range(1, inst.d + 1)]
        rows.append(
            {
                "t": tuple(repr(x) for x in t.t),
                "zeta": tuple(zvec),
                "n_finite": len(t.L),
                "inner_min": inner_min(t),
            }
        )
    return rows
