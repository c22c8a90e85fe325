"""Finite-depth simulator of the nested-rectangle Cantor construction."""

from .audit import AuditReport, holder_audit
from .build import (
    BuildConfig,
    CantorTree,
    InsufficientDepthError,
    KgbResult,
    LevelGroup,
    LevelReport,
    PackingError,
    ShrinkResult,
    build_levels,
    cr_count_ratio,
    kgb_select,
    pack_balls,
    rectangle_cover_select,
    shrink_group,
    validate_tree,
)
from .geometry import BallLattice, Rect, RectKind, WeightedRectangle, ball, pow2
from .system import (
    BallSystem,
    Candidate,
    DyadicGridSystem,
    ExplicitBallSystem,
    canonical_grid_system,
)

__all__ = [
    "AuditReport",
    "holder_audit",
    "BuildConfig",
    "CantorTree",
    "InsufficientDepthError",
    "KgbResult",
    "LevelGroup",
    "LevelReport",
    "PackingError",
    "ShrinkResult",
    "build_levels",
    "cr_count_ratio",
    "kgb_select",
    "pack_balls",
    "rectangle_cover_select",
    "shrink_group",
    "validate_tree",
    "BallLattice",
    "Rect",
    "RectKind",
    "WeightedRectangle",
    "ball",
    "pow2",
    "BallSystem",
    "Candidate",
    "DyadicGridSystem",
    "ExplicitBallSystem",
    "canonical_grid_system",
]
