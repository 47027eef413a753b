"""Damped random-walk ranking via three interchangeable routes.

The damped update ``x <- alpha * H x + (1 - alpha) * o0`` contracts the
L1 distance between iterates by alpha per step, which is what turns a
step-size threshold into a certified distance to the fixed point. The
three routes here (recursion, its unrolled expansion, and a direct dense
solve of the fixed-point system) exist to validate each other; the
recursion is the production path for sparse graphs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import SingularMatrixError, ValidationError
from .graph_io import TransitionMatrix, _as_start_values, matvec

__all__ = [
    "DampingFactor",
    "RankMethod",
    "RankResult",
    "default_max_iter",
    "power_iteration",
    "unrolled_form",
    "dense_solve",
]

# Stopping rules and error bounds divide by both alpha and 1 - alpha.
_ENDPOINT_MARGIN = 1e-12


@dataclass(frozen=True)
class DampingFactor:
    """Damping factor strictly inside (0, 1).

    Values within 1e-12 of either endpoint are rejected to keep the
    contraction bounds finite.
    """

    alpha: float

    def __post_init__(self):
        alpha = float(self.alpha)
        if not (alpha > _ENDPOINT_MARGIN and 1.0 - alpha > _ENDPOINT_MARGIN):
            raise ValidationError(
                f"damping factor must lie strictly inside (0, 1), got {self.alpha!r}"
            )
        object.__setattr__(self, "alpha", alpha)


class RankMethod(Enum):
    POWER_ITERATION = "power"
    UNROLLED = "unrolled"
    DENSE_SOLVE = "dense"
    SERIES = "series"
    QUADRATURE = "quadrature"
    CLOSED_FORM = "closed_form"


@dataclass(frozen=True)
class RankResult:
    """Rank vector plus method metadata.

    ``error_bound`` semantics depend on the method: certified L1 distance
    to the fixed point for the power iteration, the exact L1 series tail
    for the coefficient series, the linear-system residual for the dense
    solve, and clearly-labelled heuristics for quadrature and the dense
    closed form. ``converged`` is False when an iteration or term cap was
    hit before the requested tolerance; the vector is then the best
    iterate and ``error_bound`` its (larger) certified bound.
    """

    vector: np.ndarray
    method: RankMethod
    iterations_or_terms: int
    error_bound: float
    renormalized: bool = False
    converged: bool = True

    def __post_init__(self):
        if self.iterations_or_terms < 0:
            raise ValidationError("iterations_or_terms must be nonnegative")
        if not (self.error_bound >= 0.0):
            raise ValidationError("error_bound must be nonnegative")


def _as_damping(alpha) -> DampingFactor:
    return alpha if isinstance(alpha, DampingFactor) else DampingFactor(float(alpha))


def default_max_iter(alpha, tol: float) -> int:
    """A-priori geometric iteration bound for the power method, plus slack."""
    a = _as_damping(alpha).alpha
    if tol <= 0.0:
        raise ValidationError("tolerance must be positive")
    return math.ceil(math.log(tol * (1.0 - a)) / math.log(a)) + 10


def power_iteration(
    matrix: TransitionMatrix,
    teleport,
    alpha,
    tol: float = 1e-10,
    max_iter: int | None = None,
) -> RankResult:
    """Iterate the damped update until the step certifies the tolerance.

    Stops once the L1 step size drops to ``tol * (1 - alpha) / alpha``;
    by the contraction argument the returned iterate is then within
    ``tol`` of the fixed point, and ``error_bound`` records the exact
    certificate ``alpha / (1 - alpha) * ||last step||_1``. Hitting
    ``max_iter`` first returns the best iterate with ``converged=False``.
    """
    a = _as_damping(alpha).alpha
    if tol <= 0.0:
        raise ValidationError("tolerance must be positive")
    if max_iter is None:
        max_iter = default_max_iter(a, tol)
    if max_iter < 1:
        raise ValidationError("max_iter must be at least 1")
    start = _as_start_values(teleport, matrix.n)

    threshold = tol * (1.0 - a) / a
    hold = (1.0 - a) * start
    x = start.copy()
    step = math.inf
    for iteration in range(1, max_iter + 1):
        x_next = a * matvec(matrix, x) + hold
        step = float(np.abs(x_next - x).sum())
        x = x_next
        if step <= threshold:
            return RankResult(x, RankMethod.POWER_ITERATION, iteration, a / (1.0 - a) * step)
    return RankResult(
        x, RankMethod.POWER_ITERATION, max_iter, a / (1.0 - a) * step, converged=False
    )


def unrolled_form(matrix: TransitionMatrix, teleport, alpha, steps: int) -> np.ndarray:
    """Evaluate the unrolled t-step update directly.

    Returns the damped t-th power of the start vector plus the damped
    partial geometric sum, using one matvec per step (a running power
    vector and an accumulator). ``steps=0`` returns the start vector
    (empty-sum convention). This is a test oracle for the recursion, not
    the recommended production path.
    """
    a = _as_damping(alpha).alpha
    if steps < 0:
        raise ValidationError("steps must be nonnegative")
    power_vec = _as_start_values(teleport, matrix.n).copy()
    acc = np.zeros_like(power_vec)
    for _ in range(steps):
        acc += power_vec
        power_vec = a * matvec(matrix, power_vec)
    return power_vec + (1.0 - a) * acc


def dense_solve(dense, teleport, alpha) -> RankResult:
    """Solve the fixed-point system ``(I - alpha M) x = (1 - alpha) o0``.

    Direct LAPACK solve (LU with partial pivoting); intended for desk
    scale, roughly n <= 2000. ``error_bound`` is the L1 residual of the
    returned solution. A singular system (impossible for column-stochastic
    M with alpha < 1, but reachable with general user matrices) raises
    :class:`SingularMatrixError`.
    """
    M = np.asarray(dense, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
        raise ValidationError("dense matrix must be square and nonempty")
    if not np.all(np.isfinite(M)):
        raise ValidationError("dense matrix has non-finite entries")
    a = _as_damping(alpha).alpha
    start = _as_start_values(teleport, M.shape[0])

    system = np.eye(M.shape[0]) - a * M
    rhs = (1.0 - a) * start
    try:
        x = np.linalg.solve(system, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError(f"fixed-point system is singular: {exc}") from exc
    residual = float(np.abs(system @ x - rhs).sum())
    return RankResult(x, RankMethod.DENSE_SOLVE, 0, residual)
