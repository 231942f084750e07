"""Finite-dimensional Hilbert space helpers and the fixed-point iteration engine.

Vectors are plain numpy arrays of any shape. Complex arrays are treated as
elements of the underlying real space, so the inner product is the real
part of the Hermitian one. A product vector is an array whose leading axis
indexes the blocks; its inner product is the sum of blockwise products.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Literal, Optional

import numpy as np

__all__ = [
    "DivergenceError",
    "FixedPointOperator",
    "InsufficientDataError",
    "IterationTrace",
    "StoppingCriterion",
    "estimate_linear_rate",
    "identity",
    "inner",
    "iterate",
    "norm",
]

Map = Callable[[np.ndarray], np.ndarray]
StopKind = Literal["dr-shadow-gap", "map-residual", "max-iterations"]


class DivergenceError(ArithmeticError):
    """Raised when an iterate acquires a non-finite coordinate."""

    def __init__(self, message: str, last_finite: np.ndarray, iteration: int):
        super().__init__(message)
        self.last_finite = last_finite
        self.iteration = iteration


class InsufficientDataError(ValueError):
    """Raised when a trace is too short for rate estimation."""


def inner(x, y) -> float:
    """Real inner product of two vectors (or product vectors) of equal shape."""
    x = np.asarray(x)
    y = np.asarray(y)
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {y.shape}")
    return float(np.vdot(x, y).real)


def norm(x) -> float:
    x = np.asarray(x)
    return float(np.sqrt(np.vdot(x, x).real))


def identity(x: np.ndarray) -> np.ndarray:
    return x


@dataclass(frozen=True)
class FixedPointOperator:
    """A self-map of a product space together with the maps used to monitor it.

    Attributes
    ----------
    apply : callable
        One step of the iteration, ``x_{n+1} = apply(x_n)``.
    project_v : callable
        The constraint-side map (``Q_V`` or ``P_C``). Used by the stopping rules.
    project_w : callable
        The projector onto the averaging subspace (``P_W`` or ``P_D``).
    shadow : callable, optional
        Extracts the candidate solution from an iterate.
    name : str
        Label used in reports.
    """

    apply: Map
    project_v: Map = identity
    project_w: Map = identity
    shadow: Optional[Callable[[np.ndarray], np.ndarray]] = None
    name: str = "operator"

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.apply(x)


@dataclass(frozen=True)
class StoppingCriterion:
    kind: StopKind = "map-residual"
    epsilon: float = 1e-6
    cutoff: int = 50_000

    def __post_init__(self):
        if self.kind not in ("dr-shadow-gap", "map-residual", "max-iterations"):
            raise ValueError(f"unknown stopping kind {self.kind!r}")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.cutoff < 1:
            raise ValueError("cutoff must be a positive integer")

    def residual(self, op: FixedPointOperator, x: np.ndarray) -> float:
        """The monitored quantity at ``x``, computed from fresh operator calls."""
        if self.kind == "dr-shadow-gap":
            pw = op.project_w(x)
            return norm(op.project_v(pw) - pw)
        if self.kind == "map-residual":
            return norm(op.project_v(x) - x)
        return np.inf


@dataclass
class IterationTrace:
    residuals: list[float]
    terminated: Literal["converged", "cutoff"]
    iteration_count: int
    wall_time: float
    final: np.ndarray
    iterates: Optional[list[np.ndarray]] = field(default=None, repr=False)

    @property
    def converged(self) -> bool:
        return self.terminated == "converged"


def iterate(op: FixedPointOperator, x0, stop: StoppingCriterion, store_iterates: bool = False) -> IterationTrace:
    """Run ``x_{n+1} = op(x_n)`` until the stopping rule fires.

    At least one step is always applied. The residual list holds one entry per
    applied step, evaluated at the new iterate.

    Raises
    ------
    DivergenceError
        If an iterate contains a non-finite value.
    """
    x = np.array(x0, copy=True)
    if not np.all(np.isfinite(x)):
        raise DivergenceError("initial point is not finite", x, 0)
    residuals: list[float] = []
    iterates = [x] if store_iterates else None
    eps = stop.epsilon
    terminated = "cutoff"
    t0 = time.perf_counter()
    n = 0
    with np.errstate(over="ignore", invalid="ignore"):
        while n < stop.cutoff:
            x_new = op.apply(x)
            n += 1
            if not np.all(np.isfinite(x_new)):
                raise DivergenceError(f"non-finite iterate at step {n}", x, n)
            x = x_new
            if iterates is not None:
                iterates.append(x)
            r = stop.residual(op, x)
            residuals.append(r)
            if r < eps:
                terminated = "converged"
                break
    wall = time.perf_counter() - t0
    return IterationTrace(residuals, terminated, n, wall, x, iterates)


def estimate_linear_rate(trace_or_residuals) -> float:
    """Empirical linear rate from the tail of a residual sequence.

    Fits a least-squares line to the log residuals over the last half of the
    sequence (at most 100 entries) and returns ``exp(slope)``, clipped to
    ``(0, 1]``. A non-decreasing tail yields 1.
    """
    res = getattr(trace_or_residuals, "residuals", trace_or_residuals)
    res = np.asarray(res, dtype=float)
    if res.size < 10:
        raise InsufficientDataError(f"need at least 10 residuals, got {res.size}")
    if np.any(res <= 0) or not np.all(np.isfinite(res)):
        raise InsufficientDataError("residuals must be positive and finite")
    tail = min(res.size // 2, 100)
    y = np.log(res[-tail:])
    n = np.arange(tail, dtype=float)
    slope = np.polyfit(n, y, 1)[0]
    # round-off in the fit must not turn a flat tail into a contraction
    if slope >= -1e-12:
        return 1.0
    return float(np.exp(slope))
