"""Candidate rectangle suppliers for the Cantor construction.

A ball system serves stage-indexed families of "big" rectangles (exponents
u) together with the per-stage shrinking exponents v_{i,n}.  Stages are
ordered by their dyadic scale k; the selection cutoff G is a stage index.

Two implementations: an explicit finite list (the type the unit tests build
by hand) and a dyadic-grid system whose centers at scale k sit on a grid
finer than the rectangle radius, so the union of every stage's rectangles
covers the cube outright and the full-measure hypothesis is certified by
construction rather than sampled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from ..dimnum import LevelSpec
from ..extreal import ExtReal, ext
from .geometry import Frac, Rect, RectKind, WeightedRectangle, pow2

__all__ = [
    "Candidate",
    "BallSystem",
    "ExplicitBallSystem",
    "DyadicGridSystem",
    "canonical_grid_system",
]


@dataclass(frozen=True)
class Candidate:
    """A big rectangle plus the data the shrinking step needs."""

    big: WeightedRectangle
    v: tuple[Fraction, ...]
    k: int
    stage: int


class BallSystem:
    """Interface: per-factor data plus lazy stage-local candidate queries."""

    p: int
    u: tuple[Fraction, ...]
    delta: tuple[float, ...]

    def num_stages(self) -> int | None:
        """Number of stages, or None when unbounded (lazily generated)."""
        raise NotImplementedError

    def stage_scale(self, g: int) -> int:
        """Dyadic scale k of stage g >= 1; non-decreasing in g."""
        raise NotImplementedError

    def stage_w(self, g: int) -> Fraction:
        """max_i v_{i,n} over stage g (used by the w > j cutoff)."""
        return max(self.stage_v(g))

    def stage_v(self, g: int) -> tuple[Fraction, ...]:
        """The shrinking exponents shared by stage g's rectangles."""
        raise NotImplementedError

    def is_uniform_grid(self, g: int) -> bool:
        """True when stage g is a full translation-invariant grid."""
        return False

    def grid_spacing(self, g: int) -> Fraction:
        raise NotImplementedError

    def candidates_in(self, g: int, window: Rect) -> Iterator[Candidate]:
        """Stage-g candidates whose centers lie in the closed window,
        in lexicographic center order."""
        raise NotImplementedError

    def level_spec(self) -> LevelSpec:
        """The (delta, u, v-limit) spec whose s0 the construction targets."""
        raise NotImplementedError


def _require_integral(k: int, e: Fraction, what: str) -> None:
    if (k * Fraction(e)).denominator != 1:
        raise ValueError(f"{what}: k * exponent = {k}*{e} must be integral")


@dataclass
class ExplicitBallSystem(BallSystem):
    """A finite, explicitly stored sequence; each index n is its own stage.

    Scales must be non-decreasing and every v_{i,n} must exceed u_i (drop the
    offending prefix before constructing).  k_n * u_i and k_n * v_{i,n} must
    be integral so radii stay exact.
    """

    p: int
    u: tuple[Fraction, ...]
    delta: tuple[float, ...]
    centers: tuple[tuple[Fraction, ...], ...]
    radii_log2: tuple[int, ...]
    v_seq: tuple[tuple[Fraction, ...], ...]
    v_limit: tuple[ExtReal, ...] = ()

    def __post_init__(self) -> None:
        n = len(self.centers)
        if not (n == len(self.radii_log2) == len(self.v_seq)):
            raise ValueError("centers, radii_log2, v_seq must share a length")
        if any(len(c) != self.p for c in self.centers):
            raise ValueError("center arity mismatch")
        for a, b in zip(self.radii_log2, self.radii_log2[1:]):
            if b < a:
                raise ValueError("scales k_n must be non-decreasing")
        if any(k < 1 for k in self.radii_log2):
            raise ValueError("scales must be >= 1")
        for k, v in zip(self.radii_log2, self.v_seq):
            for i, (ui, vi) in enumerate(zip(self.u, v)):
                if not vi > ui:
                    raise ValueError(f"v_{i+1},n = {vi} must exceed u_{i+1} = {ui}")
                _require_integral(k, ui, "u")
                _require_integral(k, vi, "v")
        if not self.v_limit:
            self.v_limit = tuple(ext(float(v)) for v in self.v_seq[-1])

    @classmethod
    def from_sequences(
        cls,
        p: int,
        u,
        delta,
        centers,
        radii_log2,
        v_seq,
        v_limit=(),
    ) -> "ExplicitBallSystem":
        """Build after dropping the finite prefix where some v_{i,n} <= u_i."""
        u = tuple(Fraction(x) for x in u)
        start = 0
        for n, v in enumerate(v_seq):
            if all(Fraction(x) > ui for x, ui in zip(v, u)):
                start = n
                break
        else:
            raise ValueError("every entry violates v_{i,n} > u_i")
        return cls(
            p=p,
            u=u,
            delta=tuple(delta),
            centers=tuple(centers[start:]),
            radii_log2=tuple(radii_log2[start:]),
            v_seq=tuple(tuple(Fraction(x) for x in v) for v in v_seq[start:]),
            v_limit=tuple(v_limit),
        )

    def num_stages(self) -> int | None:
        return len(self.centers)

    def stage_scale(self, g: int) -> int:
        return self.radii_log2[g - 1]

    def stage_v(self, g: int) -> tuple[Fraction, ...]:
        return self.v_seq[g - 1]

    def candidates_in(self, g: int, window: Rect) -> Iterator[Candidate]:
        c = self.centers[g - 1]
        if window.contains_point(c):
            k = self.radii_log2[g - 1]
            big = WeightedRectangle(
                center=c,
                scale=pow2(-k),
                exps=self.u,
                kind=RectKind.BIG,
                n_key=(g,),
            )
            yield Candidate(big=big, v=self.v_seq[g - 1], k=k, stage=g)

    def level_spec(self) -> LevelSpec:
        return LevelSpec.of(self.delta, tuple(float(x) for x in self.u), self.v_limit)


@dataclass
class DyadicGridSystem(BallSystem):
    """Stage g: scale k(g) = k_start + stride*(g-1); centers on the grid
    (2^-(k u_min + 1)) Z^p; shrinking exponents v_i(k) = v_i - 1/k for
    finite limits and k/2 for infinite ones.

    Grid spacing is half the rectangle radius, so each stage covers the
    cube and the full-measure hypothesis holds by construction.
    """

    p: int
    u: tuple[Fraction, ...]
    delta: tuple[float, ...]
    v_lim: tuple[ExtReal, ...]
    approach: str = "below"  # finite v_i(k) = v_i -/+ 1/k
    k_start: int = 0  # 0 = derive
    stride: int = 0  # 0 = derive
    max_stage: int = 4096

    def __post_init__(self) -> None:
        self.u = tuple(Fraction(x) for x in self.u)
        self.v_lim = tuple(ext(x) for x in self.v_lim)
        if len(self.u) != self.p or len(self.v_lim) != self.p or len(self.delta) != self.p:
            raise ValueError("u, delta, v_lim must have length p")
        if any(float(d) != 1.0 for d in self.delta):
            raise ValueError("the simulator fixes delta_i = 1 (Lebesgue factors)")
        if self.approach not in ("below", "above"):
            raise ValueError("approach must be 'below' or 'above'")
        if self.stride == 0:
            denoms = [Fraction(x).denominator for x in self.u]
            denoms += [
                Fraction(v.finite).denominator for v in self.v_lim if v.is_finite
            ]
            denoms.append(2)  # the k/2 rule for infinite directions
            s = 1
            for d in denoms:
                s = s * d // math.gcd(s, d)
            self.stride = s
        if self.k_start == 0:
            k = self.stride
            while not self._stage_ok(k):
                k += self.stride
            self.k_start = k

    def _v_of_k(self, k: int) -> tuple[Fraction, ...]:
        sign = -1 if self.approach == "below" else 1
        out = []
        for v in self.v_lim:
            if v.is_infinite:
                out.append(Fraction(k, 2))
            else:
                out.append(Fraction(v.finite) + sign * Fraction(1, k))
        return tuple(out)

    def _stage_ok(self, k: int) -> bool:
        vs = self._v_of_k(k)
        return all(v > u for u, v in zip(self.u, vs)) and all(
            (k * e).denominator == 1 for e in list(self.u) + list(vs)
        )

    def num_stages(self) -> int | None:
        return self.max_stage

    def stage_scale(self, g: int) -> int:
        return self.k_start + self.stride * (g - 1)

    def stage_v(self, g: int) -> tuple[Fraction, ...]:
        return self._v_of_k(self.stage_scale(g))

    def is_uniform_grid(self, g: int) -> bool:
        return True

    def grid_spacing(self, g: int) -> Fraction:
        # half the SMALLEST rectangle radius, so each stage covers the cube
        k = self.stage_scale(g)
        e = k * max(self.u)
        return pow2(-(int(e) + 1))

    def candidates_in(self, g: int, window: Rect) -> Iterator[Candidate]:
        k = self.stage_scale(g)
        v = self._v_of_k(k)
        scale = pow2(-k)
        spacing = self.grid_spacing(g)
        ranges = []
        for i in range(self.p):
            lo = window.center[i] - window.radii[i]
            hi = window.center[i] + window.radii[i]
            lo = max(lo, Fraction(0))
            hi = min(hi, Fraction(1))
            a = -((-lo) // spacing) if lo > 0 else 0
            b = hi // spacing
            ranges.append((int(a), int(b)))

        def rec(prefix: tuple[int, ...], axis: int):
            if axis == self.p:
                yield prefix
                return
            a, b = ranges[axis]
            for j in range(a, b + 1):
                yield from rec(prefix + (j,), axis + 1)

        for idx in rec((), 0):
            center = tuple(spacing * j for j in idx)
            yield Candidate(
                big=WeightedRectangle(
                    center=center,
                    scale=scale,
                    exps=self.u,
                    kind=RectKind.BIG,
                    n_key=(g,) + idx,
                ),
                v=v,
                k=k,
                stage=g,
            )

    def level_spec(self) -> LevelSpec:
        return LevelSpec.of(self.delta, tuple(float(x) for x in self.u), self.v_lim)


def canonical_grid_system(
    p: int = 2,
    u: Sequence[Frac | float] = (Fraction(3, 2), Fraction(3, 2)),
    v_lim: Sequence[object] = (3, 4),
    max_stage: int = 4096,
) -> DyadicGridSystem:
    """The stock simulator instance: p factors on [0,1], Lebesgue, delta=1."""
    return DyadicGridSystem(
        p=p,
        u=tuple(Fraction(x) for x in u),
        delta=(1.0,) * p,
        v_lim=tuple(ext(x) for x in v_lim),
        max_stage=max_stage,
    )
