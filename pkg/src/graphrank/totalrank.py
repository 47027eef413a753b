"""Damping-free ranking: the damped fixed point averaged over all
damping factors, computed as a nonnegative coefficient series.

Averaging the fixed point uniformly over the damping factor weights the
t-th matrix power of the start vector by ``1/(t+1) - 1/(t+2)``. The
weights are positive, strictly decreasing, sum to one, and telescope:
after T terms the remaining mass is exactly ``1/(T+1)``. Because every
term is a nonnegative stochastic vector scaled by its weight, that tail
is also the exact L1 truncation error, which makes the reported bound
certified rather than heuristic. The price is that tight tolerances are
expensive (T grows like 1/tol); the quadrature module is the designated
route below roughly 1e-6.

The series converges for any column-stochastic matrix, including
periodic ones where the plain power sequence has no limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .graph_io import TransitionMatrix, _as_start_values, matvec
from .pagerank import RankMethod, RankResult

__all__ = [
    "SeriesConfig",
    "coefficient",
    "partial_mass",
    "terms_for_tolerance",
    "series_sum",
]


def coefficient(t: int) -> float:
    """Weight of the t-th power term.

    Computed in product form ``1 / ((t+1)(t+2))`` to avoid the
    cancellation the difference form suffers at large t.
    """
    if t < 0:
        raise ValidationError("term index must be nonnegative")
    return 1.0 / ((t + 1.0) * (t + 2.0))


def partial_mass(terms: int) -> float:
    """Exact L1 mass of the first ``terms`` coefficients (telescoping sum)."""
    if terms < 1:
        raise ValidationError("terms must be at least 1")
    return terms / (terms + 1.0)


def terms_for_tolerance(tol: float) -> int:
    """Smallest T whose tail ``1/(T+1)`` is at most ``tol``."""
    if not 0.0 < tol < 1.0:
        raise ValidationError("tolerance must lie in (0, 1)")
    terms = max(1, math.ceil(1.0 / tol) - 1)
    while 1.0 / (terms + 1.0) > tol:
        terms += 1
    return terms


@dataclass(frozen=True)
class SeriesConfig:
    """Truncation policy for the coefficient series."""

    tol: float = 1e-4
    max_terms: int = 10_000_000
    renormalize: bool = True

    def __post_init__(self):
        if not 0.0 < self.tol < 1.0:
            raise ValidationError("tol must lie in (0, 1)")
        if self.max_terms < 1:
            raise ValidationError("max_terms must be at least 1")


def series_sum(matrix: TransitionMatrix, teleport, config: SeriesConfig | None = None) -> RankResult:
    """Truncated coefficient series with one matvec per term.

    The truncation depth is the smallest T with tail ``1/(T+1) <= tol``,
    capped at ``max_terms``; ``error_bound`` is that exact tail. The raw
    partial sum has L1 mass ``partial_mass(T)``; with ``renormalize`` the
    vector is rescaled by its own L1 norm and the result flagged
    accordingly. When the cap bites, the best partial sum comes back with
    ``converged=False`` and its correspondingly larger bound.

    Terms are accumulated in ascending order with a single accumulator;
    they decrease monotonically, so compensated summation buys nothing at
    the tolerances this route is meant for.
    """
    cfg = config if config is not None else SeriesConfig()
    start = _as_start_values(teleport, matrix.n)

    wanted = terms_for_tolerance(cfg.tol)
    terms = min(wanted, cfg.max_terms)

    total = np.zeros_like(start)
    power_vec = start.copy()
    for t in range(terms):
        total += coefficient(t) * power_vec
        power_vec = matvec(matrix, power_vec)

    bound = 1.0 / (terms + 1.0)
    renormalized = False
    if cfg.renormalize:
        mass = float(np.abs(total).sum())
        if mass > 0.0:
            total = total / mass
            renormalized = True
    return RankResult(
        total,
        RankMethod.SERIES,
        terms,
        bound,
        renormalized=renormalized,
        converged=terms == wanted,
    )
