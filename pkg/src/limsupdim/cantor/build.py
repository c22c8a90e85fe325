"""Finite-depth construction of the nested ball levels and their measure.

Per parent ball: select a separated, measure-dense family of big rectangles
(K_{G,B}), shrink each to its group exponents, pack the shrunk rectangle
with an equal-radius ball lattice (C(R)), and split the parent's mass
share-proportionally.  Levels whose lattices run into the thousands are not
instantiated per ball: children are built once for a probe ball, validated
as exact translates on two more probes, and attached as a template that the
mass queries translate on the fly.

Desk-scale departures from the idealised construction (cutoff epsilon
attainability, packing-ratio ceilings for separated families) are recorded
per level in the build report instead of silently weakening anything.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from ..dimnum import s0 as dimnum_s0
from .geometry import (
    BallLattice,
    Rect,
    RectKind,
    WeightedRectangle,
    ball,
    frac_pow,
    pow2,
)
from .system import BallSystem, Candidate

__all__ = [
    "PackingError",
    "InsufficientDepthError",
    "BuildConfig",
    "KgbResult",
    "ShrinkResult",
    "rectangle_cover_select",
    "kgb_select",
    "shrink_group",
    "pack_balls",
    "cr_count_ratio",
    "LevelGroup",
    "LevelReport",
    "CantorTree",
    "build_levels",
    "validate_tree",
]


class PackingError(RuntimeError):
    """The candidate family cannot certify the measure hypothesis here."""


class InsufficientDepthError(RuntimeError):
    """The stored stage sequence ran out before the cutoffs were met."""


@dataclass
class BuildConfig:
    stop_ratio: float | None = None  # kept-mass target; default 0.5 * 5^-p
    c_pack: float | None = None  # packing floor; default 5^-p / 50
    coverage_min: float = 0.4
    max_rect_to_ball: float = 2.0 / 3.0  # cap on rectangle/ball size ratio
    max_scale_bands: int = 3  # distinct dyadic scales per selection
    max_candidates: int = 100_000
    max_kept: int = 65_536
    explicit_threshold: int = 64  # lattice size above which children template
    strict_eps: bool = False
    per_level: dict | None = None  # level -> BuildConfig overrides

    def for_level(self, level: int) -> "BuildConfig":
        if self.per_level and level in self.per_level:
            return self.per_level[level]
        return self

    def resolved(self, p: int) -> "BuildConfig":
        cfg = BuildConfig(**self.__dict__)
        if cfg.stop_ratio is None:
            cfg.stop_ratio = 0.5 * 5.0**-p
        if cfg.c_pack is None:
            cfg.c_pack = 5.0**-p / 50.0
        return cfg


# ---------------------------------------------------------------------------
# covering selection
# ---------------------------------------------------------------------------


def rectangle_cover_select(
    rects: Sequence[WeightedRectangle], u: Sequence[Fraction]
) -> list[WeightedRectangle]:
    """Greedy separated subfamily in the rescaled product metric.

    Rectangles are processed by decreasing metric radius (ties broken by
    center lexicographic order) and kept when their 5-dilations in that
    metric miss every kept dilation.  The kept family is disjoint and its
    dilations by 5**(max u / min u) cover the union of the input family.
    """
    u = tuple(Fraction(x) for x in u)
    for r in rects:
        if r.exps != u:
            raise ValueError("mixed exponent vectors in covering selection")
    order = sorted(rects, key=lambda r: (-r.rho_radius(), r.center))
    kept: list[WeightedRectangle] = []
    for cand in order:
        if all(cand.rho_sep_from(k, 5) for k in kept):
            kept.append(cand)
    return kept


# ---------------------------------------------------------------------------
# K_{G,B}
# ---------------------------------------------------------------------------


@dataclass
class KgbResult:
    kept: list[Candidate]
    packing_ratio: float
    coverage: float
    stages_used: list[int]
    budget_hit: bool


def _sep_stride(threshold_exp: Fraction, h2: Fraction, spacing: Fraction) -> int:
    """Smallest m with m*spacing >= 5**threshold_exp * h2, exactly."""
    a, b = Fraction(threshold_exp).numerator, Fraction(threshold_exp).denominator
    x = h2 / spacing
    m = max(1, math.ceil(5.0 ** (a / b) * float(x)))
    while m > 1 and (m - 1) ** b >= 5**a * x**b:
        m -= 1
    while m**b < 5**a * x**b:
        m += 1
    return m


def _stage_window(B: Rect, radii: tuple[Fraction, ...]) -> Rect | None:
    """Center window for stage candidates that meet (1/2)B and sit in (2/3)B."""
    half = []
    for rho, h in zip(B.radii, radii):
        w = min(rho / 2 + h, Fraction(2, 3) * rho - h)
        if w < 0:
            return None
        half.append(w)
    return Rect(B.center, tuple(hw if hw > 0 else Fraction(1, 10**30) for hw in half))


def _grid_sublattice(
    sys: BallSystem, g: int, B: Rect, window: Rect
) -> list[Candidate]:
    """Analytic greedy outcome on a full grid stage: the separated sublattice
    anchored at the window's lexicographically first grid point."""
    spacing = sys.grid_spacing(g)
    k = sys.stage_scale(g)
    scale = pow2(-k)
    u = sys.u
    u_min = min(u)
    radii = tuple(frac_pow(scale, e) for e in u)
    idx_ranges = []
    strides = []
    for i in range(sys.p):
        lo = window.center[i] - window.radii[i]
        hi = window.center[i] + window.radii[i]
        lo = max(lo, Fraction(0))
        hi = min(hi, Fraction(1))
        a = -((-lo) // spacing) if lo > 0 else 0
        b = hi // spacing
        if a > b:
            return []
        idx_ranges.append((int(a), int(b)))
        strides.append(_sep_stride(u[i] / u_min, 2 * radii[i], spacing))

    out: list[Candidate] = []

    def rec(prefix: tuple[int, ...], axis: int):
        if axis == sys.p:
            out.append(prefix)
            return
        a, b = idx_ranges[axis]
        j = a
        while j <= b:
            rec(prefix + (j,), axis + 1)
            j += strides[axis]

    rec((), 0)
    cands = []
    for idx in out:
        center = tuple(spacing * j for j in idx)
        cand = Candidate(
            big=WeightedRectangle(
                center=center,
                scale=scale,
                exps=u,
                kind=RectKind.BIG,
                n_key=(g,) + idx,
            ),
            v=tuple(sys.stage_v(g)),
            k=k,
            stage=g,
        )
        cands.append(cand)
    return cands


def _coverage_estimate(
    sys: BallSystem, stages: Sequence[int], B: Rect, grid: int = 8
) -> float:
    """Fraction of a test grid in (1/2)B covered by some stage candidate."""
    if not stages:
        return 0.0
    if all(sys.is_uniform_grid(g) for g in stages):
        # spacing at most the smallest rectangle radius: full cover by design
        return 1.0
    half = B.dilated(Fraction(1, 2))
    pts = []

    def rec(prefix: tuple[Fraction, ...], axis: int):
        if axis == B.p:
            pts.append(prefix)
            return
        c, r = half.center[axis], half.radii[axis]
        for j in range(grid):
            x = c - r + (2 * r) * Fraction(2 * j + 1, 2 * grid)
            rec(prefix + (x,), axis + 1)

    rec((), 0)
    hit = 0
    rects = []
    for g in stages:
        window = _stage_window(B, _stage_radii(sys, g))
        if window is None:
            continue
        for cand in sys.candidates_in(g, window):
            rects.append(cand.big.rect())
    for x in pts:
        if any(r.contains_point(x) for r in rects):
            hit += 1
    return hit / len(pts)


def _stage_radii(sys: BallSystem, g: int) -> tuple[Fraction, ...]:
    scale = pow2(-sys.stage_scale(g))
    return tuple(frac_pow(scale, e) for e in sys.u)


def kgb_select(
    B: Rect,
    G: int,
    sys: BallSystem,
    config: BuildConfig | None = None,
) -> KgbResult:
    """Separated, measure-dense rectangle family inside (2/3)B.

    Walks stages g >= G (largest rectangles first), keeps candidates whose
    metric 5-dilations miss everything kept so far, and stops once the kept
    mass reaches the configured share of mu(B).  Raises PackingError when no
    candidates exist or the packing floor is missed.
    """
    cfg = (config or BuildConfig()).resolved(sys.p)
    n_stages = sys.num_stages()
    vol_B = float(B.volume())
    kept: list[Candidate] = []
    kept_vol = 0.0
    stages_used: list[int] = []
    bands: set[int] = set()
    budget_hit = False
    g = G
    seen_any = False
    while n_stages is None or g <= n_stages:
        k_here = sys.stage_scale(g)
        if kept and k_here not in bands:
            # entering a finer scale band: only continue if the floor is
            # still unmet and the band budget allows it
            if kept_vol >= cfg.c_pack * vol_B or len(bands) >= cfg.max_scale_bands:
                break
        radii_g = _stage_radii(sys, g)
        if any(h > cfg.max_rect_to_ball * min(B.radii) for h in radii_g):
            g += 1
            continue
        window = _stage_window(B, radii_g)
        if window is None:  # rectangles too large for (2/3)B at this stage
            g += 1
            continue
        stage_new: list[Candidate] = []
        if sys.is_uniform_grid(g) and not kept:
            stage_new = _grid_sublattice(sys, g, B, window)
            seen_any = seen_any or bool(stage_new)
        else:
            n_seen = 0
            for cand in sys.candidates_in(g, window):
                n_seen += 1
                seen_any = True
                if n_seen > cfg.max_candidates:
                    budget_hit = True
                    break
                if all(
                    cand.big.rho_sep_from(other.big, 5)
                    for other in kept + stage_new
                ):
                    stage_new.append(cand)
                    if len(kept) + len(stage_new) > cfg.max_kept:
                        budget_hit = True
                        break
        if stage_new:
            stages_used.append(g)
            bands.add(k_here)
            for cand in stage_new:
                kept.append(cand)
                kept_vol += float(cand.big.rect().volume())
        if kept_vol >= cfg.stop_ratio * vol_B or budget_hit:
            break
        g += 1
    if not kept:
        if not seen_any:
            raise PackingError("empty candidate set: no stage rectangle meets B")
        raise PackingError("no separated subfamily found within budgets")
    ratio = kept_vol / vol_B
    coverage = _coverage_estimate(sys, stages_used, B)
    if ratio < cfg.c_pack:
        raise PackingError(
            f"packing ratio {ratio:.4g} below floor {cfg.c_pack:.4g}"
            + (" (budget hit)" if budget_hit else "")
        )
    if coverage < cfg.coverage_min:
        raise PackingError(
            f"candidate coverage {coverage:.3f} below {cfg.coverage_min}: "
            "the system does not certify the full-measure hypothesis here"
        )
    return KgbResult(
        kept=kept,
        packing_ratio=ratio,
        coverage=coverage,
        stages_used=stages_used,
        budget_hit=budget_hit,
    )


# ---------------------------------------------------------------------------
# shrinking and packing
# ---------------------------------------------------------------------------


@dataclass
class ShrinkResult:
    pairs: list[tuple[Candidate, WeightedRectangle]]
    tables: dict[int, tuple[tuple[Fraction, ...], Fraction]]  # k -> (v_vec, w)


def shrink_group(kept: Sequence[Candidate]) -> ShrinkResult:
    """Group kept rectangles by dyadic scale and shrink with the group maxima.

    v_i(G, B, k) is the max of v_{i,n} over the scale-k group; w(G, B, k) is
    the largest of those.  Each big rectangle gets exactly one shrunk twin.
    """
    if not kept:
        raise ValueError("shrink_group needs a nonempty selection")
    by_k: dict[int, list[Candidate]] = {}
    for cand in kept:
        by_k.setdefault(cand.k, []).append(cand)
    tables: dict[int, tuple[tuple[Fraction, ...], Fraction]] = {}
    for k, group in by_k.items():
        p = group[0].big.p
        v_vec = tuple(max(c.v[i] for c in group) for i in range(p))
        tables[k] = (v_vec, max(v_vec))
    pairs = []
    for cand in kept:
        v_vec, _w = tables[cand.k]
        shrunk = WeightedRectangle(
            center=cand.big.center,
            scale=cand.big.scale,
            exps=v_vec,
            kind=RectKind.SHRUNK,
            n_key=cand.big.n_key,
        )
        pairs.append((cand, shrunk))
    return ShrinkResult(pairs=pairs, tables=tables)


def pack_balls(R: WeightedRectangle, w: Fraction) -> BallLattice:
    """Lattice packing of R by balls of radius scale**w at step 10r.

    Consecutive centers sit 10r apart, so the 5-dilations have disjoint
    interiors while the 25-dilations cover R.  Requires w at least every
    exponent of R (the balls must fit) and dyadic scale k >= 1.
    """
    w = Fraction(w)
    if R.kind is not RectKind.SHRUNK:
        raise ValueError("pack_balls expects a shrunk rectangle")
    if R.k < 1:
        raise ValueError("dyadic scale must be >= 1")
    if any(w < e for e in R.exps):
        raise ValueError(f"w = {w} is below a rectangle exponent {max(R.exps)}")
    r = frac_pow(R.scale, w)
    step = 10 * r
    counts = []
    origin = []
    for c, h in zip(R.center, R.radii):
        n = 1 + int((2 * h - 2 * r) // step)
        counts.append(n)
        origin.append(c - h + r)
    return BallLattice(origin=tuple(origin), step=step, counts=tuple(counts), radius=r)


def cr_count_ratio(
    lattice: BallLattice,
    R: WeightedRectangle,
    w: Fraction,
    delta: Sequence[float],
) -> float:
    """#C(R) against the volume-comparison target prod 2^(k (w - v_i) delta_i)."""
    k = R.k
    target = 1.0
    for e, d in zip(R.exps, delta):
        target *= 2.0 ** (float(k * (Fraction(w) - e)) * float(d))
    return lattice.size() / target


# ---------------------------------------------------------------------------
# the level tree
# ---------------------------------------------------------------------------


@dataclass
class LevelGroup:
    """One shrunk rectangle's ball lattice at some level, plus bookkeeping.

    ``children`` maps a lattice index to the next level's groups; for large
    lattices ``template`` holds the children of index (0,...,0) instead and
    instances are obtained by translation.
    """

    level: int
    parent_center: tuple[Fraction, ...]
    parent_radius: Fraction
    big: WeightedRectangle | None
    shrunk: WeightedRectangle | None
    lattice: BallLattice
    k: int
    v_vec: tuple[Fraction, ...]
    w: Fraction
    share: float
    ball_weight: float
    children: dict[tuple[int, ...], list["LevelGroup"]] | None = None
    template: list["LevelGroup"] | None = None
    _fbox: tuple | None = None

    def float_box(self) -> tuple:
        """Cached outward-rounded float bounds of the big rectangle (or the
        lattice at the root), used as a cheap prefilter in mass queries."""
        if self._fbox is None:
            rect = self.big.rect() if self.big is not None else self.lattice.bounding_rect()
            lo = tuple(float(c - r) - 1e-300 for c, r in zip(rect.center, rect.radii))
            hi = tuple(float(c + r) + 1e-300 for c, r in zip(rect.center, rect.radii))
            self._fbox = (lo, hi)
        return self._fbox

    def children_of(
        self, idx: tuple[int, ...]
    ) -> Iterator[tuple["LevelGroup", tuple[Fraction, ...] | None]]:
        """(child group, extra offset) pairs for the ball at ``idx``.

        The offset is None for explicitly stored children (no translation)
        and the exact lattice displacement for template instances."""
        if self.children is not None:
            for child in self.children.get(idx, ()):
                yield child, None
        elif self.template is not None:
            base = self.lattice.center(tuple(0 for _ in idx))
            here = self.lattice.center(idx)
            off = tuple(h - b for h, b in zip(here, base))
            for child in self.template:
                yield child, off

    def is_leaf(self) -> bool:
        return self.children is None and self.template is None


@dataclass
class LevelReport:
    level: int
    G: int
    scales: list[int]
    n_groups: int
    n_balls: int
    mass: float
    max_ratio: float
    eps_required: float
    eps_ok: bool
    min_packing: float
    min_coverage: float
    cr_ratio_range: tuple[float, float]


@dataclass
class CantorTree:
    system: BallSystem
    eps: float
    depth: int
    root: LevelGroup
    reports: list[LevelReport]
    config: BuildConfig

    def s0(self) -> float:
        return dimnum_s0(self.system.level_spec())

    def level_mass(self, level: int) -> float:
        total = 0.0
        for group, mult, _off in self._groups_at(level):
            total += group.share * mult
        return total

    def _groups_at(
        self, level: int
    ) -> Iterator[tuple[LevelGroup, int, tuple[Fraction, ...]]]:
        """(group, instance multiplicity, representative offset) at a level."""

        def rec(group: LevelGroup, mult: int, off):
            if group.level == level:
                yield group, mult, off
                return
            if group.children is not None:
                for idx, kids in group.children.items():
                    for kid in kids:
                        yield from rec(kid, mult, off)
            elif group.template is not None:
                for kid in group.template:
                    yield from rec(kid, mult * group.lattice.size(), off)

        yield from rec(self.root, 1, tuple(Fraction(0) for _ in range(self.system.p)))

    def iter_balls(
        self, level: int, limit: int | None = None
    ) -> Iterator[tuple[tuple[float, ...], float, float, tuple, tuple]]:
        """(center, radius, weight, key, parent id) rows for dumps.

        The key is the rectangle provenance plus the lattice index; the
        parent id is the parent ball's (center, radius).  Template levels
        dump their representative instances, and ``limit`` caps the rows.
        """
        count = 0
        for group, _mult, _off in self._groups_at(level):
            parent = tuple(float(x) for x in group.parent_center) + (
                float(group.parent_radius),
            )
            for idx in group.lattice.iter_indices():
                if limit is not None and count >= limit:
                    return
                c = tuple(float(x) for x in group.lattice.center(idx))
                key = (group.big.n_key if group.big else ()) + idx
                yield c, float(group.lattice.radius), group.ball_weight, key, parent
                count += 1

    def mass_in(self, query: Rect) -> float:
        """Deepest-level mass estimate of a query box: the summed weights of
        deepest balls meeting it, computed by descent with early aggregation
        of balls fully inside the query.

        Exact geometry decides membership; a float bounding-box prefilter
        (conservatively inflated) prunes the sibling loops first.
        """
        p = self.system.p
        qcf = tuple(float(c) for c in query.center)
        qrf = tuple(float(r) for r in query.radii)

        def box_misses(child: LevelGroup, foff) -> bool:
            lo, hi = child.float_box()
            rb = float(child.lattice.radius)
            for i in range(p):
                c = qcf[i] - foff[i]
                slack = qrf[i] + rb + 1e-12 + 1e-9 * abs(c)
                if c - slack > hi[i] or c + slack < lo[i]:
                    return True
            return False

        def rec(group: LevelGroup, off, foff) -> float:
            shifted = (
                query
                if off is None
                else Rect(tuple(c - o for c, o in zip(query.center, off)), query.radii)
            )
            lat = group.lattice
            meet = lat.range_meeting(shifted)
            n_meet = BallLattice.window_size(meet)
            if n_meet == 0:
                return 0.0
            if group.is_leaf():
                return group.ball_weight * n_meet
            inside = lat.range_inside(shifted)
            n_inside = BallLattice.window_size(inside)
            total = group.ball_weight * n_inside
            for idx in _shell_indices(meet, inside):
                for child, extra in group.children_of(idx):
                    if extra is None:
                        nf = foff
                        noff = off
                    else:
                        nf = tuple(f + float(e) for f, e in zip(foff, extra))
                        noff = (
                            extra
                            if off is None
                            else tuple(o + e for o, e in zip(off, extra))
                        )
                    if box_misses(child, nf):
                        continue
                    total += rec(child, noff, nf)
            return total

        return rec(self.root, None, (0.0,) * p)


def _shell_indices(
    meet: tuple[tuple[int, int], ...], inside: tuple[tuple[int, int], ...]
) -> Iterator[tuple[int, ...]]:
    """Indices in the meet window but not the inside window."""

    def rec(prefix: tuple[int, ...], axis: int, all_inside: bool):
        if axis == len(meet):
            if not all_inside:
                yield prefix
            return
        a, b = meet[axis]
        ia, ib = inside[axis]
        for j in range(a, b):
            yield from rec(prefix + (j,), axis + 1, all_inside and ia <= j < ib)

    yield from rec((), 0, True)


def validate_tree(
    tree: "CantorTree", rng=None, pair_samples: int = 200
) -> dict:
    """Structural invariants of a built tree, checked exactly.

    Nesting (ball lattice inside shrunk inside big inside (2/3) parent) is
    verified for every stored group; separation of sibling balls and of
    sibling rectangles on sampled pairs.  Returns counters; raises
    AssertionError on the first violation.
    """
    import random as _random

    rng = rng or _random.Random(99)
    n_nesting = 0
    n_sep = 0

    def walk(group: LevelGroup):
        nonlocal n_nesting, n_sep
        parent = ball(group.parent_center, group.parent_radius)
        if group.big is not None:
            big = group.big.rect()
            shrunk = group.shrunk.rect()
            bound = group.lattice.bounding_rect()
            assert parent.dilated(Fraction(2, 3)).contains_rect(big), "big in (2/3)B"
            assert big.contains_rect(shrunk), "shrunk in big"
            assert shrunk.contains_rect(bound), "lattice in shrunk"
            n_nesting += 1
        # sibling balls inside one lattice: sampled pairs
        lat = group.lattice
        if lat.size() > 1:
            for _ in range(min(pair_samples, 20)):
                i1 = tuple(rng.randrange(c) for c in lat.counts)
                i2 = tuple(rng.randrange(c) for c in lat.counts)
                if i1 == i2:
                    continue
                b1, b2 = lat.ball_at(i1), lat.ball_at(i2)
                assert not b1.dilated(5).overlaps_open(b2.dilated(5)), "5r balls"
                # a ball meeting both siblings must be larger than either
                gap = max(
                    abs(a - b) - ra - rb
                    for a, ra, b, rb in zip(
                        b1.center, b1.radii, b2.center, b2.radii
                    )
                )
                assert gap / 2 > max(b1.radii[0], b2.radii[0]), "meeting radius"
                n_sep += 1
        # children grouped by their common parent ball
        if group.children is not None:
            batches = list(group.children.values())
        elif group.template is not None:
            batches = [list(group.template)]
        else:
            batches = []
        for kids in batches:
            # sibling big rectangles inside one parent ball
            for a in range(len(kids)):
                for b in range(a + 1, min(len(kids), a + 6)):
                    ra, rb = kids[a].big.rect(), kids[b].big.rect()
                    assert not ra.dilated(5).overlaps_open(rb.dilated(5)), "5r rects"
                    n_sep += 1
            # balls from different sibling rectangles
            for a in range(min(len(kids), 4)):
                for b in range(a + 1, min(len(kids), 4)):
                    la, lb = kids[a].lattice, kids[b].lattice
                    ia = tuple(rng.randrange(c) for c in la.counts)
                    ib = tuple(rng.randrange(c) for c in lb.counts)
                    ba, bb = la.ball_at(ia), lb.ball_at(ib)
                    assert not ba.dilated(5).overlaps_open(bb.dilated(5)), "cross 5r"
                    n_sep += 1
            for kid in kids:
                walk(kid)

    walk(tree.root)
    return {"nesting_checked": n_nesting, "separation_checked": n_sep}


# ---------------------------------------------------------------------------
# the builder
# ---------------------------------------------------------------------------


def _make_groups_for_ball(
    center: tuple[Fraction, ...],
    radius: Fraction,
    weight: float,
    level: int,
    G: int,
    sys: BallSystem,
    cfg: BuildConfig,
    stats: dict,
) -> list[LevelGroup]:
    B = ball(center, radius)
    kgb = kgb_select(B, G, sys, cfg)
    stats["min_packing"] = min(stats["min_packing"], kgb.packing_ratio)
    stats["min_coverage"] = min(stats["min_coverage"], kgb.coverage)
    stats["scales"].update(c.k for c in kgb.kept)
    shrink = shrink_group(kgb.kept)
    denom = sum(float(c.big.rect().volume()) for c in kgb.kept)
    groups = []
    for cand, shrunk in shrink.pairs:
        v_vec, w = shrink.tables[cand.k]
        lattice = pack_balls(shrunk, w)
        ratio = cr_count_ratio(lattice, shrunk, w, sys.delta)
        lo, hi = stats["cr_range"]
        stats["cr_range"] = (min(lo, ratio), max(hi, ratio))
        share = weight * float(cand.big.rect().volume()) / denom
        groups.append(
            LevelGroup(
                level=level,
                parent_center=center,
                parent_radius=radius,
                big=cand.big,
                shrunk=shrunk,
                lattice=lattice,
                k=cand.k,
                v_vec=v_vec,
                w=w,
                share=share,
                ball_weight=share / lattice.size(),
            )
        )
    return groups


def _group_signature(groups: list[LevelGroup], base: tuple[Fraction, ...]):
    """Translation-invariant summary used to validate template reuse."""
    sig = []
    for g in sorted(groups, key=lambda g: g.big.center):
        sig.append(
            (
                tuple(c - b for c, b in zip(g.big.center, base)),
                g.big.scale,
                g.big.exps,
                g.k,
                g.v_vec,
                g.w,
                g.lattice.counts,
                g.lattice.step,
                g.lattice.radius,
                tuple(o - b for o, b in zip(g.lattice.origin, base)),
                round(g.share, 15),
            )
        )
    return tuple(sig)


def _min_stage_w(sys: BallSystem, threshold: int) -> int:
    """First stage from which every later stage satisfies w > threshold."""
    n = sys.num_stages()
    limit = n if n is not None else 10_000
    ok_from = None
    for g in range(limit, 0, -1):
        if sys.stage_w(g) > threshold:
            ok_from = g
        else:
            break
    if ok_from is None:
        raise InsufficientDepthError(
            f"no stored stage satisfies the cutoff w > {threshold}"
        )
    return ok_from


def build_levels(
    sys: BallSystem,
    depth: int,
    eps: float,
    b0: Rect | None = None,
    config: BuildConfig | None = None,
) -> CantorTree:
    """Build the nested levels to the requested depth.

    The per-level cutoff stage is the smallest one satisfying the w > j
    display; the mass-ratio display is evaluated against it and reported as
    the epsilon it actually achieves (with strict_eps the build fails when
    the nominal epsilon is unattainable within the stored stages).
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if not eps > 0:
        raise ValueError("the measure-ratio cutoff needs eps > 0")
    cfg = (config or BuildConfig()).resolved(sys.p)
    if b0 is None:
        half = Fraction(1, 2)
        b0 = ball((half,) * sys.p, half)
    root = LevelGroup(
        level=0,
        parent_center=b0.center,
        parent_radius=b0.radii[0],
        big=None,
        shrunk=None,
        lattice=BallLattice(
            origin=b0.center,
            step=2 * b0.radii[0],
            counts=(1,) * sys.p,
            radius=b0.radii[0],
        ),
        k=0,
        v_vec=(),
        w=Fraction(0),
        share=1.0,
        ball_weight=1.0,
    )
    tree = CantorTree(
        system=sys, eps=eps, depth=depth, root=root, reports=[], config=cfg
    )

    frontier: list[tuple[LevelGroup, int]] = [(root, 1)]  # (group, multiplicity)
    for level in range(1, depth + 1):
        threshold = max(level - 1, 1)
        G_w = _min_stage_w(sys, threshold)
        max_ratio = max(
            g.ball_weight / (2.0 * float(g.lattice.radius)) ** sys.p
            for g, _ in frontier
        )
        # stage scale needed for the mass-ratio display at nominal eps
        k_at_G = sys.stage_scale(G_w)
        eps_required = (
            0.0 if max_ratio <= 1.0 else math.log2(max_ratio) / k_at_G
        )
        eps_ok = eps_required <= eps
        if not eps_ok and cfg.strict_eps:
            need_k = math.log2(max_ratio) / eps
            raise InsufficientDepthError(
                f"level {level}: ratio display needs scale k >= {need_k:.0f} "
                f"at eps = {eps}; not attainable at desk scale"
            )
        G = G_w
        level_cfg = cfg.for_level(level).resolved(sys.p)
        stats = {
            "min_packing": math.inf,
            "min_coverage": math.inf,
            "scales": set(),
            "cr_range": (math.inf, -math.inf),
        }
        next_frontier: list[tuple[LevelGroup, int]] = []
        n_groups = 0
        n_balls = 0
        for group, mult in frontier:
            size = group.lattice.size()
            if size <= cfg.explicit_threshold:
                group.children = {}
                for idx in group.lattice.iter_indices():
                    kids = _make_groups_for_ball(
                        group.lattice.center(idx),
                        group.lattice.radius,
                        group.ball_weight,
                        level,
                        G,
                        sys,
                        level_cfg,
                        stats,
                    )
                    group.children[idx] = kids
                    for kid in kids:
                        next_frontier.append((kid, mult))
                        n_groups += mult
                        n_balls += mult * kid.lattice.size()
            else:
                probe_idx = [
                    tuple(0 for _ in range(sys.p)),
                    tuple(
                        min(1, c - 1) if axis == 0 else 0
                        for axis, c in enumerate(group.lattice.counts)
                    ),
                    tuple(c - 1 for c in group.lattice.counts),
                ]
                builds = []
                for idx in probe_idx:
                    builds.append(
                        (
                            idx,
                            _make_groups_for_ball(
                                group.lattice.center(idx),
                                group.lattice.radius,
                                group.ball_weight,
                                level,
                                G,
                                sys,
                                level_cfg,
                                stats,
                            ),
                        )
                    )
                sig0 = _group_signature(builds[0][1], group.lattice.center(probe_idx[0]))
                for idx, kids in builds[1:]:
                    if _group_signature(kids, group.lattice.center(idx)) != sig0:
                        raise PackingError(
                            "template validation failed: children are not "
                            "exact translates across the lattice"
                        )
                group.template = builds[0][1]
                for kid in group.template:
                    next_frontier.append((kid, mult * size))
                    n_groups += mult * size
                    n_balls += mult * size * kid.lattice.size()
        mass = sum(g.share * m for g, m in next_frontier)
        tree.reports.append(
            LevelReport(
                level=level,
                G=G,
                scales=sorted(stats["scales"]),
                n_groups=n_groups,
                n_balls=n_balls,
                mass=mass,
                max_ratio=max_ratio,
                eps_required=eps_required,
                eps_ok=eps_ok,
                min_packing=stats["min_packing"],
                min_coverage=stats["min_coverage"],
                cr_ratio_range=stats["cr_range"],
            )
        )
        frontier = next_frontier
    return tree
