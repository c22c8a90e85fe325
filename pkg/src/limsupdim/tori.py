"""Shrinking-target dimensions for diagonal torus endomorphisms.

For T = diag(beta_1, ..., beta_d) with every |beta_i| > 1 and target radii
decaying like exp(-n t_i), the dimension of the hit-infinitely-often set is a
sup-min over the accumulation set of per-coordinate values xi_i(t).  Negative
eigenvalues enter only through log|beta_i|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .psi import ExponentVector

__all__ = ["TorusSystem", "xi", "torus_inner_min", "dim_torus", "xi_rows"]


@dataclass(frozen=True)
class TorusSystem:
    """Eigenvalues of the diagonal transformation, all of modulus > 1."""

    beta: tuple[float, ...]
    log_abs_beta: tuple[float, ...] = field(init=False)

    def __post_init__(self) -> None:
        beta = tuple(float(b) for b in self.beta)
        if not beta:
            raise ValueError("need at least one eigenvalue")
        if any(abs(b) <= 1 for b in beta):
            raise ValueError("every eigenvalue must have modulus > 1")
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "log_abs_beta", tuple(math.log(abs(b)) for b in beta))

    @property
    def d(self) -> int:
        return len(self.beta)


def _partition(sys: TorusSystem, t: ExponentVector, i: int):
    """K1: log|beta_k| > log|beta_i| + t_i;  K2: finite k with
    log|beta_k| + t_k <= log|beta_i| + t_i;  K3: the rest."""
    ti = t.t[i - 1].finite
    cut = sys.log_abs_beta[i - 1] + ti
    K1, K2, K3 = [], [], []
    for k in range(1, sys.d + 1):
        lb = sys.log_abs_beta[k - 1]
        tk = t.t[k - 1]
        if lb > cut:
            K1.append(k)
        elif tk.is_finite and lb + tk.finite <= cut:
            K2.append(k)
        else:
            K3.append(k)
    return K1, K2, K3, cut


def xi(sys: TorusSystem, t: ExponentVector, i: int) -> float:
    """xi_i(t) for 1-based i in the finite-exponent index set."""
    if not 1 <= i <= sys.d or t.d != sys.d:
        raise ValueError("index/dimension mismatch")
    if t.t[i - 1].is_infinite:
        raise ValueError(f"xi_{i} needs a finite exponent t_{i}")
    K1, K2, K3, cut = _partition(sys, t, i)
    total = float(len(K1))
    for k in K2:
        total += 1.0 - t.t[k - 1].finite / cut
    for k in K3:
        total += sys.log_abs_beta[k - 1] / cut
    return total


def torus_inner_min(sys: TorusSystem, t: ExponentVector) -> float:
    """min{ min over finite levels of xi_i(t), #L(t) }; 0 when L is empty."""
    L = t.L
    if not L:
        return 0.0
    return min(min(xi(sys, t, i) for i in L), float(len(L)))


def dim_torus(sys: TorusSystem, U: Sequence[ExponentVector]) -> float:
    """sup over the supplied accumulation set of the inner min.

    Valid for any eigenvalue moduli > 1; with negative eigenvalues the
    underlying dimension statement additionally needs non-increasing target
    radii, which a bare accumulation set cannot certify.
    """
    U = tuple(U)
    if not U:
        raise ValueError("accumulation set must be nonempty")
    if any(t.d != sys.d for t in U):
        raise ValueError("every exponent vector must have length d")
    return max(torus_inner_min(sys, t) for t in U)


def xi_rows(sys: TorusSystem, U: Sequence[ExponentVector]) -> list[dict]:
    """Per-(t, i) diagnostics: the three index classes and term values."""
    rows = []
    for t in U:
        for i in t.L:
            K1, K2, K3, cut = _partition(sys, t, i)
            term1 = float(len(K1))
            term2 = sum(1.0 - t.t[k - 1].finite / cut for k in K2)
            term3 = sum(sys.log_abs_beta[k - 1] / cut for k in K3)
            rows.append(
                {
                    "t": tuple(repr(x) for x in t.t),
                    "i": i,
                    "K1": tuple(K1),
                    "K2": tuple(K2),
                    "K3": tuple(K3),
                    "cut": cut,
                    "term_K1": term1,
                    "term_K2": term2,
                    "term_K3": term3,
                    "xi": term1 + term2 + term3,
                }
            )
    return rows
