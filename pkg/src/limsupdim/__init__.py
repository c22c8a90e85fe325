"""Hausdorff dimensions of limsup sets of rectangles, at formula level and
at desk scale.

The package has three layers: closed-form dimension evaluators (dimensional
numbers, simultaneous-approximation and shrinking-target formulas), the
constructive machinery behind their lower bounds (optimal weights, covering
selections, a finite-depth Cantor-measure simulator), and independent
numerical cross-checks (Monte-Carlo full-measure estimates, box counting,
natural-cover exponents).
"""

from .extreal import INF, ExtReal, ext

__version__ = "0.1.0"
__all__ = ["INF", "ExtReal", "ext", "__version__"]
