"""Independent numerical evidence for the dimension formulas.

Three estimators, deliberately unrelated to the closed-form evaluators:

* a Monte-Carlo check that the window-restricted rational-rectangle union
  has (near-)full Lebesgue measure, with a Wilson confidence interval;
* dyadic box counting of the rational-rectangle set, either over a fixed
  denominator window (the raw union; its counts drift towards the ambient
  dimension as the grid outresolves the window) or with the denominator
  window matched to the grid scale, which tracks the limsup covering cost
  and is what the dimension regressions use;
* a natural-cover exponent: bisection for the s at which the covering cost
  of the stage rectangles flips between decaying and growing tails.

Everything is deterministic under a fixed seed and budget-guarded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
import numpy as np

from .psi import LimitMode, PsiFamily

__all__ = [
    "FullMeasureConfig",
    "FullMeasureResult",
    "lemma_full_measure",
    "BoxCountConfig",
    "BoxCountResult",
    "boxcount_dimension",
    "cover_exponent",
]

_WILSON_Z99 = 2.5758293035489004


# ---------------------------------------------------------------------------
# Monte-Carlo full measure
# ---------------------------------------------------------------------------


@dataclass
class FullMeasureConfig:
    """Window [q_ell / M, q_ell] of denominators with M = 4^(d+1).

    ``variant`` picks the rectangle radii: "union" uses the uniform radius
    (Mtilde / q_ell)^a_i; "sharp" uses the finer per-denominator radius
    1 / (q * q_ell^(a_i - 1)) from which the union bound is derived.
    ``q_window`` selects the denominator range: "main" is [q_ell/M, q_ell]
    (the set under test); "low" is [1, q_ell/M) (the complementary small
    denominators, whose sharp-radius union must stay under half).
    """

    d: int
    a: tuple[float, ...]
    q_ell: int
    samples: int = 100_000
    seed: int = 20240601
    variant: str = "union"
    q_window: str = "main"
    work_budget: float = 5e9
    M: int = field(init=False)
    Mtilde: float = field(init=False)

    def __post_init__(self) -> None:
        self.a = tuple(float(x) for x in self.a)
        if self.d < 1 or len(self.a) != self.d:
            raise ValueError("need d >= 1 weights a_1..a_d")
        if any(ai < 1.0 for ai in self.a):
            raise ValueError("every a_i must be >= 1")
        if abs(sum(self.a) - (self.d + 1)) > 1e-12:
            raise ValueError(f"weights must sum to d + 1, got {sum(self.a)}")
        self.M = 4 ** (self.d + 1)
        self.Mtilde = max(self.M ** (1.0 / ai) for ai in self.a)
        if self.q_ell < self.M:
            raise ValueError(f"q_ell must be >= M = {self.M}")
        if self.variant not in ("union", "sharp"):
            raise ValueError("variant must be 'union' or 'sharp'")
        if self.q_window not in ("main", "low"):
            raise ValueError("q_window must be 'main' or 'low'")
        n_q = self.q_ell - self.q_ell // self.M + 1
        if float(n_q) * float(self.samples) > self.work_budget:
            raise ValueError(
                f"work {n_q} denominators x {self.samples} samples exceeds "
                f"the budget {self.work_budget:g}"
            )


@dataclass
class FullMeasureResult:
    fraction: float
    ci_low: float
    ci_high: float
    hits: int
    samples: int
    config: FullMeasureConfig

    def as_dict(self) -> dict:
        return {
            "fraction": self.fraction,
            "ci99_low": self.ci_low,
            "ci99_high": self.ci_high,
            "hits": self.hits,
            "samples": self.samples,
            "d": self.config.d,
            "a": list(self.config.a),
            "q_ell": self.config.q_ell,
            "variant": self.config.variant,
            "q_window": self.config.q_window,
            "seed": self.config.seed,
        }


def _wilson(hits: int, n: int, z: float = _WILSON_Z99) -> tuple[float, float]:
    if n == 0:
        return (0.0, 1.0)
    phat = hits / n
    denom = 1 + z * z / n
    center = (phat + z * z / (2 * n)) / denom
    half = z * math.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / denom
    return (max(0.0, center - half), min(1.0, center + half))


def lemma_full_measure(cfg: FullMeasureConfig) -> FullMeasureResult:
    """Fraction of uniform points falling in the window-restricted union.

    A point x is a hit when some q in [q_ell / M, q_ell] has ||q x_i|| within
    the per-variant radius times q for every coordinate.  Points are retired
    as soon as they hit, and the scan runs from the largest q down, where the
    union-variant thresholds are widest.
    """
    rng = np.random.default_rng(cfg.seed)
    x = rng.random((cfg.samples, cfg.d))
    active = np.arange(cfg.samples)
    if cfg.q_window == "main":
        q_lo, q_hi = cfg.q_ell // cfg.M, cfg.q_ell
    else:
        q_lo, q_hi = 1, max(1, cfg.q_ell // cfg.M - 1)
    base = np.array(
        [(cfg.Mtilde / cfg.q_ell) ** ai for ai in cfg.a]
    )  # union radius
    abar = np.array([ai - 1.0 for ai in cfg.a])
    hits = 0
    for q in range(q_hi, q_lo - 1, -1):
        if active.size == 0:
            break
        if cfg.variant == "union":
            thr = np.minimum(q * base, 0.5)
        else:
            thr = np.minimum(cfg.q_ell**-abar, 0.5)
        if np.all(thr >= 0.5):
            hits += active.size
            active = active[:0]
            break
        frac = (q * x[active]) % 1.0
        dist = np.minimum(frac, 1.0 - frac)
        hit = np.all(dist <= thr, axis=1)
        hits += int(hit.sum())
        active = active[~hit]
    frac_hit = hits / cfg.samples
    lo, hi = _wilson(hits, cfg.samples)
    return FullMeasureResult(
        fraction=frac_hit,
        ci_low=lo,
        ci_high=hi,
        hits=hits,
        samples=cfg.samples,
        config=cfg,
    )


# ---------------------------------------------------------------------------
# box counting
# ---------------------------------------------------------------------------


@dataclass
class BoxCountConfig:
    """Raster of the stage-rectangle union on dyadic grids 2^-m.

    mode "fixed": the union over the whole window [Q0, Q] at every m (the
    raw set; counts saturate towards ambient dimension once the grid
    outresolves the window).  mode "matched": at each m the window is
    [Q(m)/window_factor, Q(m)] with Q(m) = 2^(m / (1 + tau_max)) clamped to
    [Q0, Q], which keeps cell size and rectangle size in step.
    """

    psi: tuple[PsiFamily, ...]
    Q0: int
    Q: int
    m_min: int
    m_max: int
    fit_window: int = 4
    mode: str = "matched"
    window_factor: float = 2.0
    cell_budget: float = 4e7

    def __post_init__(self) -> None:
        self.psi = tuple(self.psi)
        if not 2 <= self.Q0 <= self.Q:
            raise ValueError("need 2 <= Q0 <= Q")
        if not self.m_min < self.m_max:
            raise ValueError("need m_min < m_max")
        if len(self.psi) not in (1, 2):
            raise ValueError("box counting supports d = 1 or 2")
        if self.mode not in ("fixed", "matched"):
            raise ValueError("mode must be 'fixed' or 'matched'")

    @property
    def d(self) -> int:
        return len(self.psi)


@dataclass
class BoxCountResult:
    estimate: float
    counts: list[tuple[int, int]]  # (m, N(m))
    fit_ms: list[int]
    mode: str

    def as_dict(self) -> dict:
        return {
            "estimate": self.estimate,
            "counts": [list(c) for c in self.counts],
            "fit_ms": self.fit_ms,
            "mode": self.mode,
        }


def _stage_cells(
    cfg: BoxCountConfig, q_lo: int, q_hi: int, m: int
) -> np.ndarray:
    """Distinct occupied cells (flattened int64 keys) of the stage union.

    A stage is a full product grid of rectangles, so its occupied cells are
    the cross product of the per-axis occupied cell sets.  Chunks are merged
    into a running sorted-unique array to keep peak memory near the final
    count.
    """
    d = cfg.d
    scale = float(2**m)
    merged = np.empty(0, dtype=np.int64)
    pending: list[np.ndarray] = []
    pending_size = 0
    for q in range(q_lo, q_hi + 1):
        radii = [f.eval(float(max(q, 2))) / q for f in cfg.psi]
        per_axis = []
        for i in range(d):
            p = np.arange(q + 1, dtype=np.float64)
            lo = np.floor((p / q - radii[i]) * scale).astype(np.int64)
            hi = np.floor((p / q + radii[i]) * scale).astype(np.int64)
            np.clip(lo, 0, 2**m - 1, out=lo)
            np.clip(hi, 0, 2**m - 1, out=hi)
            width = int((hi - lo).max()) + 1
            cells = lo[:, None] + np.arange(width)[None, :]
            cells = np.minimum(cells, hi[:, None])
            per_axis.append(np.unique(cells.ravel()))
        if d == 1:
            keys = per_axis[0]
        else:
            keys = (per_axis[0][:, None] * (2**m) + per_axis[1][None, :]).ravel()
        pending.append(keys)
        pending_size += keys.size
        if pending_size >= 4_000_000:
            merged = np.union1d(merged, np.concatenate(pending))
            pending, pending_size = [], 0
            if merged.size > cfg.cell_budget:
                raise MemoryError(
                    f"grid memory over budget at m={m}: "
                    f"{merged.size} > {cfg.cell_budget:g}"
                )
    if pending:
        merged = np.union1d(merged, np.concatenate(pending))
    if merged.size > cfg.cell_budget:
        raise MemoryError(
            f"grid memory over budget at m={m}: {merged.size} > {cfg.cell_budget:g}"
        )
    return merged


def _matched_taus(cfg: BoxCountConfig) -> list[float]:
    taus = []
    for f in cfg.psi:
        acc = f.exponent_limit(LimitMode.LOG_N)
        pts = [x for x in acc.points if x.is_finite]
        if not pts or acc.interval:
            raise ValueError(
                "matched-window counting needs a finite single-point decay "
                "exponent per factor; use mode='fixed'"
            )
        taus.append(pts[0].finite)
    return taus


def boxcount_dimension(cfg: BoxCountConfig) -> BoxCountResult:
    """Least-squares slope of log2 N(m) against m over the fit window."""
    counts: list[tuple[int, int]] = []
    if cfg.mode == "fixed":
        for m in range(cfg.m_min, cfg.m_max + 1):
            cells = _stage_cells(cfg, cfg.Q0, cfg.Q, m)
            if cells.size == 0:
                raise ValueError(
                    "empty raster: every rectangle is below one cell at Q0"
                )
            counts.append((m, int(cells.size)))
    else:
        taus = _matched_taus(cfg)
        t_max = max(taus)
        for m in range(cfg.m_min, cfg.m_max + 1):
            q_hi = int(2.0 ** (m / (1.0 + t_max)))
            q_hi = max(cfg.Q0, min(cfg.Q, q_hi))
            q_lo = max(cfg.Q0, int(q_hi / cfg.window_factor))
            cells = _stage_cells(cfg, q_lo, q_hi, m)
            if cells.size == 0:
                raise ValueError("empty raster in the matched window")
            counts.append((m, int(cells.size)))
    ms = [m for m, _ in counts]
    fit_ms = ms[-cfg.fit_window :]
    xs = np.array(fit_ms, dtype=float)
    ys = np.array([math.log2(n) for m, n in counts[-cfg.fit_window :]])
    slope = float(np.polyfit(xs, ys, 1)[0])
    return BoxCountResult(estimate=slope, counts=counts, fit_ms=fit_ms, mode=cfg.mode)


# ---------------------------------------------------------------------------
# natural-cover exponent
# ---------------------------------------------------------------------------


def _cover_log_cost(cfg: BoxCountConfig, q: float, s: float) -> float:
    """log of q^d times the cheapest per-rectangle covering cost at q.

    Each rectangle may be covered by cubes of any of its side lengths; the
    cost of side i is prod_j max(1, side_j / side_i) * side_i^s and the
    cheapest side wins.  All in logs so stretched-exponential sides work.
    """
    d = cfg.d
    L = [f.neg_log_eval(q) + math.log(q) for f in cfg.psi]  # -log side_j
    best = math.inf
    for i in range(d):
        cost = sum(max(0.0, L[i] - L[j]) for j in range(d)) - s * L[i]
        best = min(best, cost)
    return d * math.log(q) + best


def _cover_tail_slope(cfg: BoxCountConfig, s: float, npts: int = 33) -> float:
    """d log T / d log q fitted over the top half of a geometric q-grid."""
    qs = np.geomspace(cfg.Q0, cfg.Q, npts)
    half = qs[npts // 2 :]
    xs = np.log(half)
    ys = np.array([_cover_log_cost(cfg, float(q), s) for q in half])
    return float(np.polyfit(xs, ys, 1)[0])


def cover_exponent(cfg: BoxCountConfig, tol: float = 1e-4) -> float:
    """Bisection for the s where the covering-cost tail flips sign.

    The per-q cost q^d cost(q, s) has tail slope falling in s; the returned
    s makes that slope -1 (the summability threshold).  A heuristic
    upper-bound indicator, not a certificate.
    """
    lo, hi = 0.0, cfg.d + 1.0
    slope_lo = _cover_tail_slope(cfg, lo)
    slope_hi = _cover_tail_slope(cfg, hi)
    if not (slope_lo >= -1.0 >= slope_hi):
        raise ValueError(
            f"bisection non-bracketing: tail slopes {slope_lo:.3f} at s=0 "
            f"and {slope_hi:.3f} at s={hi}"
        )
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _cover_tail_slope(cfg, mid) >= -1.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
