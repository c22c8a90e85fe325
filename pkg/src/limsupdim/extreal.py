"""Nonnegative extended reals: the value domain of exponents.

The dimension formulas evaluate expressions like ``u_k / A`` where the cut
level ``A`` may be infinite.  We want ``finite / inf == 0`` and a clean total
order, without relying on IEEE semantics (``0 * inf`` is NaN there), so the
infinity is an explicit tagged value rather than ``float("inf")`` smuggled
into arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Union

__all__ = ["ExtReal", "INF", "ext"]

ExtLike = Union["ExtReal", int, float, Fraction, str]


@total_ordering
@dataclass(frozen=True)
class ExtReal:
    """A nonnegative real or +infinity.

    ``finite`` holds the payload for finite values and is ``None`` for the
    infinite value.  Finite payloads must be >= 0 and not NaN.
    """

    finite: float | None

    def __post_init__(self) -> None:
        if self.finite is not None:
            x = float(self.finite)
            if math.isnan(x) or math.isinf(x):
                raise ValueError("finite payload must be an ordinary number")
            if x < 0:
                raise ValueError(f"extended real must be >= 0, got {x}")
            object.__setattr__(self, "finite", x + 0.0)  # normalise -0.0

    # -- constructors ------------------------------------------------------

    @staticmethod
    def of(value: ExtLike) -> "ExtReal":
        if isinstance(value, ExtReal):
            return value
        if isinstance(value, str):
            if value.strip().lower() in ("inf", "infinity", "+inf", "oo"):
                return INF
            return ExtReal(float(value))
        if isinstance(value, float) and math.isinf(value):
            return INF
        return ExtReal(float(value))

    # -- predicates --------------------------------------------------------

    @property
    def is_finite(self) -> bool:
        return self.finite is not None

    @property
    def is_infinite(self) -> bool:
        return self.finite is None

    # -- order -------------------------------------------------------------

    def __lt__(self, other: ExtLike) -> bool:
        o = ExtReal.of(other)
        if self.is_infinite:
            return False
        if o.is_infinite:
            return True
        return self.finite < o.finite

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, (ExtReal, int, float, Fraction)):
            return NotImplemented
        o = ExtReal.of(other)
        return self.finite == o.finite

    def __hash__(self) -> int:
        return hash(self.finite)

    # -- arithmetic used by the formulas ------------------------------------

    def __add__(self, other: ExtLike) -> "ExtReal":
        o = ExtReal.of(other)
        if self.is_infinite or o.is_infinite:
            return INF
        return ExtReal(self.finite + o.finite)

    __radd__ = __add__

    def __mul__(self, other: ExtLike) -> "ExtReal":
        o = ExtReal.of(other)
        if self.is_infinite or o.is_infinite:
            if self == 0 or o == 0:
                raise ValueError("0 * inf is undefined for extended reals")
            return INF
        return ExtReal(self.finite * o.finite)

    __rmul__ = __mul__

    def divided_by(self, denom: ExtLike) -> float:
        """Quotient ``self / denom`` as a float; finite/inf is 0 by convention."""
        d = ExtReal.of(denom)
        if self.is_infinite:
            if d.is_infinite:
                raise ValueError("inf / inf is undefined for extended reals")
            return math.inf
        if d.is_infinite:
            return 0.0
        if d.finite == 0:
            raise ZeroDivisionError("division by zero cut level")
        return self.finite / d.finite

    def __float__(self) -> float:
        return math.inf if self.is_infinite else self.finite

    def __repr__(self) -> str:
        return "inf" if self.is_infinite else repr(self.finite)


INF = ExtReal(None)


def ext(value: ExtLike) -> ExtReal:
    """Shorthand constructor, accepts numbers or the token ``"inf"``."""
    return ExtReal.of(value)
