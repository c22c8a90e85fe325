"""Parametric approximation functions and their exponent limits.

Each family knows how to evaluate itself pointwise, how to evaluate
``-log psi(x)`` stably (the quantity every exponent computation actually
needs; direct evaluation underflows long before the logarithm misbehaves),
and what the exact accumulation set of its exponent sequence is.  The
dimension pipeline consumes the exact limits; the numeric sampler exists to
cross-check them and to expose the convergence rate.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

from .extreal import INF, ExtLike, ExtReal, ext

__all__ = [
    "ExponentVector",
    "LimitMode",
    "AccumulationSet",
    "PsiFamily",
    "PowerLaw",
    "PowerLog",
    "StretchedExp",
    "GeometricExp",
    "BlockSchedule",
    "BlockAlternate",
    "ExponentSamples",
    "sample_exponents",
    "PsiParseError",
    "parse_psi",
]


@dataclass(frozen=True)
class ExponentVector:
    """A point t in (R+ u {inf})^d of Diophantine accumulation data."""

    t: tuple[ExtReal, ...]

    def __post_init__(self) -> None:
        vals = tuple(ext(x) for x in self.t)
        if len(vals) == 0:
            raise ValueError("exponent vector must be nonempty")
        object.__setattr__(self, "t", vals)

    @staticmethod
    def of(values: Sequence[ExtLike]) -> "ExponentVector":
        return ExponentVector(tuple(ext(x) for x in values))

    @property
    def d(self) -> int:
        return len(self.t)

    @cached_property
    def L(self) -> tuple[int, ...]:
        """1-based indices with finite exponent (cached)."""
        return tuple(i for i, x in enumerate(self.t, start=1) if x.is_finite)

    def __iter__(self):
        return iter(self.t)

    def __repr__(self) -> str:
        return "(" + ",".join(repr(x) for x in self.t) + ")"


class LimitMode(enum.Enum):
    """Normalisation of the exponent sequence: -log psi(n) / log n or / n."""

    LOG_N = "logn"
    LINEAR = "linear"


@dataclass(frozen=True)
class AccumulationSet:
    """Exact accumulation points of an exponent sequence.

    ``points`` are the endpoints when ``interval`` is set.  ``hull`` marks the
    block-alternating case, where we only certify the conservative interval
    hull of the two one-family limits, not the precise shape.
    """

    points: tuple[ExtReal, ...]
    interval: bool = False
    hull: bool = False

    def grid(self, n: int = 64) -> tuple[ExtReal, ...]:
        """The points themselves, or an n-point grid over the interval hull."""
        if not self.interval:
            return self.points
        lo, hi = self.points[0], self.points[-1]
        if hi.is_infinite:
            finite = [x for x in self.points if x.is_finite]
            base = float(lo.finite) if lo.is_finite else 1.0
            top = max([base] + [f.finite for f in finite]) + 1.0
            pts = [ext(base + (top - base) * j / (n - 2)) for j in range(n - 1)]
            return tuple(pts) + (INF,)
        lo_f, hi_f = lo.finite, hi.finite
        return tuple(ext(lo_f + (hi_f - lo_f) * j / (n - 1)) for j in range(n))


class PsiFamily:
    """Base of the closed family set; all instances are immutable."""

    def eval(self, x: float) -> float:
        """psi(x) for x >= 2.  May underflow to 0.0 for extreme arguments;
        exponent work should go through neg_log_eval instead."""
        self._check_domain(x)
        nl = self.neg_log_eval(x)
        if nl > 700.0:
            return 0.0
        return math.exp(-nl)

    def neg_log_eval(self, x: float) -> float:
        raise NotImplementedError

    def exponent_limit(self, mode: LimitMode) -> AccumulationSet:
        raise NotImplementedError

    @staticmethod
    def _check_domain(x: float) -> None:
        if x < 2:
            raise ValueError(f"psi families are defined on x >= 2, got {x}")


@dataclass(frozen=True)
class PowerLaw(PsiFamily):
    """psi(x) = x^-tau with tau > 0."""

    tau: float

    def __post_init__(self) -> None:
        if not self.tau > 0:
            raise ValueError("PowerLaw needs tau > 0")

    def neg_log_eval(self, x: float) -> float:
        self._check_domain(x)
        return self.tau * math.log(x)

    def exponent_limit(self, mode: LimitMode) -> AccumulationSet:
        if mode is LimitMode.LOG_N:
            return AccumulationSet((ext(self.tau),))
        return AccumulationSet((ext(0),))


@dataclass(frozen=True)
class PowerLog(PsiFamily):
    """psi(x) = x^-tau (log x)^-sigma.

    Requires tau > 0 and, when sigma < 0, tau*log(2) + sigma >= 0 so the
    function stays non-increasing from the domain start x = 2.
    """

    tau: float
    sigma: float

    def __post_init__(self) -> None:
        if not self.tau > 0:
            raise ValueError("PowerLog needs tau > 0")
        if self.sigma < 0 and self.tau * math.log(2) + self.sigma < 0:
            raise ValueError(
                "PowerLog with sigma < 0 needs tau*log(2) + sigma >= 0 "
                "to be non-increasing on [2, inf)"
            )

    def neg_log_eval(self, x: float) -> float:
        self._check_domain(x)
        return self.tau * math.log(x) + self.sigma * math.log(math.log(x))

    def exponent_limit(self, mode: LimitMode) -> AccumulationSet:
        if mode is LimitMode.LOG_N:
            return AccumulationSet((ext(self.tau),))
        return AccumulationSet((ext(0),))


@dataclass(frozen=True)
class StretchedExp(PsiFamily):
    """psi(x) = exp(-c x^k) with c, k > 0."""

    c: float
    k: float

    def __post_init__(self) -> None:
        if not (self.c > 0 and self.k > 0):
            raise ValueError("StretchedExp needs c > 0 and k > 0")

    def neg_log_eval(self, x: float) -> float:
        self._check_domain(x)
        try:
            return self.c * x**self.k
        except OverflowError:
            return math.inf

    def exponent_limit(self, mode: LimitMode) -> AccumulationSet:
        if mode is LimitMode.LOG_N:
            return AccumulationSet((INF,))
        if self.k == 1:
            return AccumulationSet((ext(self.c),))
        if self.k > 1:
            return AccumulationSet((INF,))
        return AccumulationSet((ext(0),))


@dataclass(frozen=True)
class GeometricExp(PsiFamily):
    """psi(n) = |beta|^-n * rate(n): geometric targets for torus orbits.

    Only the linear exponent normalisation is meaningful here.
    """

    beta: float
    rate: PsiFamily

    def __post_init__(self) -> None:
        if not abs(self.beta) > 1:
            raise ValueError("GeometricExp needs |beta| > 1")

    def neg_log_eval(self, x: float) -> float:
        self._check_domain(x)
        return x * math.log(abs(self.beta)) + self.rate.neg_log_eval(x)

    def exponent_limit(self, mode: LimitMode) -> AccumulationSet:
        if mode is LimitMode.LOG_N:
            raise ValueError("GeometricExp only supports the linear mode")
        inner = self.rate.exponent_limit(LimitMode.LINEAR)
        shift = math.log(abs(self.beta))
        pts = tuple(
            INF if x.is_infinite else ext(shift + x.finite) for x in inner.points
        )
        return AccumulationSet(pts, interval=inner.interval, hull=inner.hull)


@dataclass(frozen=True)
class BlockSchedule:
    """Doubly-exponential blocks: block j covers [2^(g^j), 2^(g^(j+1)))."""

    growth: float = 2.0

    def __post_init__(self) -> None:
        if not self.growth > 1:
            raise ValueError("block growth must be > 1")

    def block_index(self, x: float) -> int:
        if x < 2:
            raise ValueError("blocks start at x = 2")
        return max(0, int(math.floor(math.log(math.log2(x)) / math.log(self.growth))))

    def block_start(self, j: int) -> float:
        return 2.0 ** (self.growth**j)


@dataclass(frozen=True)
class BlockAlternate(PsiFamily):
    """Alternate two families across doubly-exponential blocks.

    Raw alternation can jump upward at block boundaries, so the value is
    clamped by the running minimum at each boundary; this keeps psi
    non-increasing while the exponent sequence sweeps between the two
    one-family limits.
    """

    f: PsiFamily
    g: PsiFamily
    blocks: BlockSchedule = field(default_factory=BlockSchedule)

    def _active(self, j: int) -> PsiFamily:
        return self.f if j % 2 == 0 else self.g

    def _boundary_neg_log(self, j: int) -> float:
        # -log of the running-min clamp at the start of block j
        m = self._active(0).neg_log_eval(2.0)
        for i in range(1, j + 1):
            b = self.blocks.block_start(i)
            m = max(m, self._active(i - 1).neg_log_eval(b))
        return m

    def neg_log_eval(self, x: float) -> float:
        self._check_domain(x)
        j = self.blocks.block_index(x)
        return max(self._active(j).neg_log_eval(x), self._boundary_neg_log(j))

    def exponent_limit(self, mode: LimitMode) -> AccumulationSet:
        sets = [self.f.exponent_limit(mode), self.g.exponent_limit(mode)]
        pts: list[ExtReal] = []
        for s in sets:
            pts.extend(s.points)
        lo = min(pts)
        hi = max(pts)
        if lo == hi:
            return AccumulationSet((lo,))
        return AccumulationSet((lo, hi), interval=True, hull=True)


@dataclass(frozen=True)
class ExponentSamples:
    """Sampled exponent vectors with an overflow-saturation marker."""

    mode: LimitMode
    cap: float
    rows: tuple[tuple[int, tuple[float, ...]], ...]
    saturated: bool


def sample_exponents(
    fs: Sequence[PsiFamily],
    mode: LimitMode,
    N: int,
    num: int = 48,
    cap: float = 1e4,
) -> ExponentSamples:
    """Exponent vectors at geometrically spaced n <= N.

    Values above ``cap`` are reported as ``cap`` and flag the result as
    saturated; that is the numeric signature of an infinite exponent limit.
    """
    if N < 10:
        raise ValueError("need N >= 10 to sample exponent sequences")
    ns: list[int] = []
    steps = max(2, num)
    for j in range(steps):
        n = round(2.0 * (N / 2.0) ** (j / (steps - 1)))
        if not ns or n > ns[-1]:
            ns.append(int(n))
    rows = []
    saturated = False
    for n in ns:
        denom = math.log(n) if mode is LimitMode.LOG_N else float(n)
        vec = []
        for f in fs:
            nl = f.neg_log_eval(float(n))
            val = nl / denom
            if val > cap or math.isinf(val):
                val = cap
                saturated = True
            vec.append(val)
        rows.append((n, tuple(vec)))
    return ExponentSamples(mode=mode, cap=cap, rows=tuple(rows), saturated=saturated)


# ---------------------------------------------------------------------------
# Text grammar:  pow:tau=2 | powlog:tau=1,sigma=2 | sexp:c=1,k=2
#                geom:beta=2,rate=<spec> | alt:[<spec>|<spec>]
# ---------------------------------------------------------------------------


class PsiParseError(ValueError):
    """Malformed family text; carries the 0-based position of the problem."""

    def __init__(self, message: str, text: str, pos: int) -> None:
        super().__init__(f"{message} at position {pos}: {text!r}")
        self.text = text
        self.pos = pos


def _parse_kv(body: str, text: str, offset: int) -> dict[str, float]:
    out: dict[str, float] = {}
    pos = offset
    if not body:
        raise PsiParseError("expected key=value arguments", text, pos)
    for part in body.split(","):
        if "=" not in part:
            raise PsiParseError(f"expected key=value, got {part!r}", text, pos)
        key, val = part.split("=", 1)
        key = key.strip()
        try:
            out[key] = float(val)
        except ValueError:
            raise PsiParseError(f"bad numeric value {val!r}", text, pos + len(key) + 1)
        pos += len(part) + 1
    return out


def _require(args: dict[str, float], keys: set[str], text: str, offset: int) -> None:
    missing = keys - set(args)
    extra = set(args) - keys
    if missing:
        raise PsiParseError(f"missing argument(s) {sorted(missing)}", text, offset)
    if extra:
        raise PsiParseError(f"unknown argument(s) {sorted(extra)}", text, offset)


def _parse_at(text: str, offset: int) -> PsiFamily:
    sub = text[offset:]
    if ":" not in sub:
        raise PsiParseError("expected 'name:arguments'", text, offset)
    name, body = sub.split(":", 1)
    body_off = offset + len(name) + 1
    name = name.strip().lower()
    if name == "pow":
        args = _parse_kv(body, text, body_off)
        _require(args, {"tau"}, text, body_off)
        return PowerLaw(tau=args["tau"])
    if name == "powlog":
        args = _parse_kv(body, text, body_off)
        _require(args, {"tau", "sigma"}, text, body_off)
        return PowerLog(tau=args["tau"], sigma=args["sigma"])
    if name == "sexp":
        args = _parse_kv(body, text, body_off)
        _require(args, {"c", "k"}, text, body_off)
        return StretchedExp(c=args["c"], k=args["k"])
    if name == "geom":
        marker = ",rate="
        idx = body.find(marker)
        if idx < 0:
            raise PsiParseError("geom needs 'beta=...,rate=<spec>'", text, body_off)
        head = _parse_kv(body[:idx], text, body_off)
        _require(head, {"beta"}, text, body_off)
        rate = _parse_at(text, body_off + idx + len(marker))
        return GeometricExp(beta=head["beta"], rate=rate)
    if name == "alt":
        if not body.startswith("[") or not body.endswith("]"):
            raise PsiParseError("alt needs '[<spec>|<spec>]'", text, body_off)
        inner = body[1:-1]
        bar = _split_top_level_bar(inner)
        if bar is None:
            raise PsiParseError("alt needs a top-level '|'", text, body_off + 1)
        # parse the two halves against their own text so positions stay local
        lhs_text, rhs_text = inner[:bar], inner[bar + 1 :]
        lhs = _parse_at(lhs_text, 0)
        rhs = _parse_at(rhs_text, 0)
        return BlockAlternate(f=lhs, g=rhs)
    raise PsiParseError(f"unknown family {name!r}", text, offset)


def _split_top_level_bar(s: str) -> int | None:
    depth = 0
    for i, ch in enumerate(s):
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        elif ch == "|" and depth == 0:
            return i
    return None


def parse_psi(text: str) -> PsiFamily:
    """Parse one family spec, e.g. ``pow:tau=2`` or ``alt:[pow:tau=1|pow:tau=3]``."""
    if not text.strip():
        raise PsiParseError("empty family spec", text, 0)
    return _parse_at(text.strip(), 0)
