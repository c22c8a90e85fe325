"""Exact axis-aligned geometry for the Cantor-set simulator.

Deep construction levels live at scales like 2^-63 where float centers would
collapse distinct balls, so every coordinate is a Fraction and every radius
an exact rational.  Max norm throughout: balls are boxes, rectangles are
products of intervals.  Disjointness is tested on open interiors (shared
faces are measure-null), containment on closed boxes.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

__all__ = [
    "Frac",
    "frac_pow",
    "pow2",
    "log2_exact",
    "Rect",
    "ball",
    "RectKind",
    "WeightedRectangle",
    "BallLattice",
    "ge_scaled_pow5",
]

Frac = Fraction


def pow2(e: int) -> Fraction:
    """Exact 2^e for integer e of either sign."""
    if e >= 0:
        return Fraction(1 << e, 1)
    return Fraction(1, 1 << (-e))


def log2_exact(x: Fraction) -> int | None:
    """The integer e with x = 2^e, or None if x is not a power of two."""
    if x <= 0:
        return None
    num, den = x.numerator, x.denominator
    if num == 1:
        e = den.bit_length() - 1
        return -e if (1 << e) == den else None
    if den == 1:
        e = num.bit_length() - 1
        return e if (1 << e) == num else None
    return None


def frac_pow(base: Fraction, exp: Fraction) -> Fraction:
    """base**exp when the result is rational; raises otherwise.

    Supports integer exponents for any base, and fractional exponents when
    the base is a power of two and the resulting 2-exponent is integral.
    """
    exp = Fraction(exp)
    if exp.denominator == 1:
        return base ** int(exp)
    e2 = log2_exact(base)
    if e2 is not None:
        out = e2 * exp
        if out.denominator == 1:
            return pow2(int(out))
    raise ValueError(f"{base}**{exp} is not an exact rational")


def ge_scaled_pow5(lhs: Fraction, exp: Fraction, rhs: Fraction) -> bool:
    """Exact test of lhs >= 5**exp * rhs for lhs, rhs >= 0 and exp >= 0."""
    if lhs < 0 or rhs < 0:
        raise ValueError("comparison requires nonnegative operands")
    exp = Fraction(exp)
    a, b = exp.numerator, exp.denominator
    return lhs**b >= 5**a * rhs**b


@dataclass(frozen=True)
class Rect:
    """Product of closed intervals [c_i - r_i, c_i + r_i]."""

    center: tuple[Fraction, ...]
    radii: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.center) != len(self.radii) or not self.center:
            raise ValueError("center/radii length mismatch")
        if any(r <= 0 for r in self.radii):
            raise ValueError("radii must be positive")

    @property
    def p(self) -> int:
        return len(self.center)

    def dilated(self, factor: Fraction | int) -> "Rect":
        f = Fraction(factor)
        return Rect(self.center, tuple(r * f for r in self.radii))

    def contains_rect(self, other: "Rect") -> bool:
        return all(
            abs(oc - c) <= r - orr
            for c, r, oc, orr in zip(self.center, self.radii, other.center, other.radii)
        )

    def contains_point(self, x: Sequence[Fraction]) -> bool:
        return all(abs(xi - c) <= r for c, r, xi in zip(self.center, self.radii, x))

    def overlaps_open(self, other: "Rect") -> bool:
        """True iff the open interiors intersect."""
        return all(
            abs(oc - c) < r + orr
            for c, r, oc, orr in zip(self.center, self.radii, other.center, other.radii)
        )

    def meets_closed(self, other: "Rect") -> bool:
        return all(
            abs(oc - c) <= r + orr
            for c, r, oc, orr in zip(self.center, self.radii, other.center, other.radii)
        )

    def volume(self) -> Fraction:
        out = Fraction(1)
        for r in self.radii:
            out *= 2 * r
        return out


def ball(center: Sequence[Fraction], r: Fraction) -> Rect:
    """Max-norm ball: the box with equal radii."""
    return Rect(tuple(Fraction(c) for c in center), (Fraction(r),) * len(center))


class RectKind(enum.Enum):
    BIG = "big"  # exponents u
    SHRUNK = "shrunk"  # exponents v(G, B, k)


@dataclass(frozen=True)
class WeightedRectangle:
    """A rectangle with per-factor radius scale**exps_i.

    ``scale`` plays the role of r_n; for dyadic scales 2^-k the property
    ``k`` recovers the exponent.  Construction fails unless every radius is
    an exact rational, which the ball systems arrange by keeping k * exps_i
    integral.
    """

    center: tuple[Fraction, ...]
    scale: Fraction
    exps: tuple[Fraction, ...]
    kind: RectKind
    n_key: tuple = ()
    radii: tuple[Fraction, ...] = field(init=False)

    def __post_init__(self) -> None:
        if len(self.center) != len(self.exps) or not self.center:
            raise ValueError("center/exps length mismatch")
        if not 0 < self.scale < 1:
            raise ValueError("scale must lie in (0, 1)")
        if any(e <= 0 for e in self.exps):
            raise ValueError("exponents must be positive")
        radii = tuple(frac_pow(self.scale, e) for e in self.exps)
        object.__setattr__(self, "radii", radii)

    @property
    def p(self) -> int:
        return len(self.center)

    @property
    def k(self) -> int:
        e = log2_exact(self.scale)
        if e is None:
            raise ValueError("scale is not a dyadic 2^-k")
        return -e

    def rect(self) -> Rect:
        return Rect(self.center, self.radii)

    def rho_radius(self) -> Fraction:
        """Radius in the rescaled product metric: scale**min(exps)."""
        return frac_pow(self.scale, min(self.exps))

    def rho_sep_from(self, other: "WeightedRectangle", factor: int = 5) -> bool:
        """True iff the factor-dilations in the rescaled metric have disjoint
        interiors.  Axis i of the dilation has radius factor**(e_i/e_min)
        times the rectangle's radius there."""
        if self.exps != other.exps:
            raise ValueError("metric comparison needs equal exponent vectors")
        u_min = min(self.exps)
        for i in range(self.p):
            q = self.exps[i] / u_min
            gap = abs(self.center[i] - other.center[i])
            rsum = self.radii[i] + other.radii[i]
            # gap >= factor**q * rsum, exactly
            a, b = Fraction(q).numerator, Fraction(q).denominator
            if gap**b >= factor**a * rsum**b:
                return True
        return False


@dataclass(frozen=True)
class BallLattice:
    """An axis-aligned lattice of equal balls: origin + j*step per axis.

    The packing C(R) of a shrunk rectangle is stored this way instead of as
    explicit balls; counts can run into the billions while the object stays
    O(1).  Steps are identical across axes (10r by construction).
    """

    origin: tuple[Fraction, ...]
    step: Fraction
    counts: tuple[int, ...]
    radius: Fraction

    def __post_init__(self) -> None:
        if len(self.origin) != len(self.counts):
            raise ValueError("origin/counts length mismatch")
        if any(c < 1 for c in self.counts):
            raise ValueError("counts must be >= 1")
        if self.step <= 0 or self.radius <= 0:
            raise ValueError("step and radius must be positive")

    @property
    def p(self) -> int:
        return len(self.origin)

    def size(self) -> int:
        n = 1
        for c in self.counts:
            n *= c
        return n

    def center(self, idx: Sequence[int]) -> tuple[Fraction, ...]:
        return tuple(o + self.step * j for o, j in zip(self.origin, idx))

    def ball_at(self, idx: Sequence[int]) -> Rect:
        return ball(self.center(idx), self.radius)

    def bounding_rect(self) -> Rect:
        cs = []
        rs = []
        for o, c in zip(self.origin, self.counts):
            lo = o - self.radius
            hi = o + self.step * (c - 1) + self.radius
            cs.append((lo + hi) / 2)
            rs.append((hi - lo) / 2)
        return Rect(tuple(cs), tuple(rs))

    def _axis_range(self, axis: int, lo: Fraction, hi: Fraction) -> tuple[int, int]:
        """Index window [a, b) of centers with [center-r, center+r] within
        distance reach of [lo, hi]; empty when a >= b."""
        if hi < lo:
            return (0, 0)
        o, n = self.origin[axis], self.counts[axis]
        # smallest j with o + j*step >= lo  (ceil division on Fractions)
        num = lo - o
        a = max(0, -((-num) // self.step) if num > 0 else 0)
        a = int(a)
        num2 = hi - o
        if num2 < 0:
            return (0, 0)
        b = min(n - 1, int(num2 // self.step))
        if a > b:
            return (0, 0)
        return (a, b + 1)

    def range_meeting(self, query: Rect) -> tuple[tuple[int, int], ...]:
        """Per-axis index windows of balls whose closed box meets the query."""
        out = []
        for i in range(self.p):
            lo = query.center[i] - query.radii[i] - self.radius
            hi = query.center[i] + query.radii[i] + self.radius
            out.append(self._axis_range(i, lo, hi))
        return tuple(out)

    def range_inside(self, query: Rect) -> tuple[tuple[int, int], ...]:
        """Per-axis index windows of balls fully inside the closed query."""
        out = []
        for i in range(self.p):
            lo = query.center[i] - query.radii[i] + self.radius
            hi = query.center[i] + query.radii[i] - self.radius
            out.append(self._axis_range(i, lo, hi))
        return tuple(out)

    @staticmethod
    def window_size(ranges: tuple[tuple[int, int], ...]) -> int:
        n = 1
        for a, b in ranges:
            n *= max(0, b - a)
        return n

    def iter_indices(self, limit: int | None = None) -> Iterator[tuple[int, ...]]:
        def rec(prefix: tuple[int, ...], axis: int):
            if axis == self.p:
                yield prefix
                return
            for j in range(self.counts[axis]):
                yield from rec(prefix + (j,), axis + 1)

        it = rec((), 0)
        if limit is None:
            yield from it
        else:
            for count, idx in enumerate(it):
                if count >= limit:
                    return
                yield idx
