"""Numerical checks of when ``P_B P_A`` is the projector onto ``A ∩ B``.

For a closed affine subspace ``A`` and a proximinal set ``B`` the statements

    (a) P_A(B) ⊆ B
    (b) P_A(B) = A ∩ B
    (c) P_B(A) ⊆ A
    (d) P_B(A) = A ∩ B
    (e) P_B P_A = P_{A∩B}

satisfy (a) ⇒ (b) ⇒ (c) ⇒ (d) ⇒ (e), with equivalence when ``B`` is convex.
:func:`verify_intersection_projector` evaluates each statement on sampled data
against a brute-force nearest-point oracle for ``A ∩ B``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .sets import MEMBERSHIP_TOL, ProjectableSet

__all__ = [
    "BruteForceProjector",
    "IntersectionReport",
    "OracleUnavailableError",
    "brute_force_projector",
    "sample_intersection",
    "verify_intersection_projector",
]


class OracleUnavailableError(RuntimeError):
    """The sampled intersection is empty, so no oracle projector exists."""


class BruteForceProjector:
    """Nearest-point map onto a finite point cloud; ties go to the first sample."""

    def __init__(self, samples):
        samples = np.asarray(samples, dtype=float)
        if samples.size == 0:
            raise OracleUnavailableError("empty intersection sample")
        self.samples = samples
        self._sq = np.sum(samples**2, axis=1)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        d2 = np.sum((self.samples - x) ** 2, axis=1)
        return self.samples[int(np.argmin(d2))]

    def project_many(self, X, chunk: int = 256) -> np.ndarray:
        """Row-wise nearest samples for an ``(N, dim)`` array of queries."""
        X = np.asarray(X, dtype=float)
        out = np.empty_like(X)
        for lo in range(0, len(X), chunk):
            Q = X[lo: lo + chunk]
            # |s|^2 - 2 <s, x> ranks samples like |s - x|^2
            score = self._sq[None, :] - 2.0 * Q @ self.samples.T
            out[lo: lo + chunk] = self.samples[np.argmin(score, axis=1)]
        return out


def brute_force_projector(samples) -> BruteForceProjector:
    return BruteForceProjector(samples)


def sample_intersection(A: ProjectableSet, B: ProjectableSet, extent: float = 3.0, n: int = 10_001,
                        tol: float = MEMBERSHIP_TOL) -> np.ndarray:
    """Dense sample of ``A ∩ B`` for a one-dimensional affine ``A`` in the plane.

    Points ``p + t d`` with ``t`` on a uniform grid of ``n`` values over
    ``[-extent * sqrt(dim), extent * sqrt(dim)]`` are kept when they lie in ``B``.
    For two-dimensional fixtures the grid is refined so that the segment of
    ``A ∩ B`` itself carries ``n`` samples.
    """
    if A.basis.shape[0] != 1:
        raise ValueError("sampling is implemented for lines only")
    d = A.basis[0]
    span = extent * np.sqrt(A.dim)
    t = np.linspace(-span, span, 4001)
    inside = np.array([B.contains(A.basepoint + ti * d, tol) for ti in t])
    if not inside.any():
        raise OracleUnavailableError("A ∩ B appears empty on the sampled range")
    # refine the end points of the feasible parameter range by bisection
    lo_i, hi_i = np.nonzero(inside)[0][[0, -1]]
    lo = _bisect_edge(A, B, d, t[max(lo_i - 1, 0)], t[lo_i], tol) if lo_i > 0 else t[0]
    hi = _bisect_edge(A, B, d, t[min(hi_i + 1, t.size - 1)], t[hi_i], tol) if hi_i < t.size - 1 else t[-1]
    ts = np.linspace(lo, hi, n)
    pts = A.basepoint + ts[:, None] * d
    keep = np.array([B.contains(p, tol) for p in pts])
    return pts[keep]


def _bisect_edge(A, B, d, t_out, t_in, tol):
    for _ in range(200):
        mid = 0.5 * (t_out + t_in)
        if mid in (t_out, t_in):
            break
        if B.contains(A.basepoint + mid * d, tol):
            t_in = mid
        else:
            t_out = mid
    return t_in


@dataclass
class IntersectionReport:
    points: np.ndarray
    discrepancies: np.ndarray
    statements: dict = field(default_factory=dict)
    tol: float = 1e-6

    @property
    def max_discrepancy(self) -> float:
        return float(np.max(self.discrepancies)) if self.discrepancies.size else 0.0

    @property
    def implications_hold(self) -> bool:
        s = self.statements
        chain = ["a", "b", "c", "d", "e"]
        return all((not s[p]) or s[q] for p, q in zip(chain, chain[1:]))


def verify_intersection_projector(A: ProjectableSet, B: ProjectableSet, grid, tol: float = 1e-6,
                                  intersection_samples: np.ndarray | None = None,
                                  set_samples: np.ndarray | None = None) -> IntersectionReport:
    """Evaluate statements (a)-(e) and the grid discrepancy of ``P_B P_A``.

    Parameters
    ----------
    A : AffineSubspace
        Must be affine.
    B : ProjectableSet
        Any set with a projector.
    grid : array_like, shape (N, dim)
        Query points; also the source of samples of ``B`` and of ``A`` (their
        projections onto ``A``).
    tol : float
        Threshold applied to every sampled equality or membership.
    intersection_samples : array_like, optional
        Dense sample of ``A ∩ B`` for the oracle; computed when omitted.
    set_samples : array_like, optional
        Extra sample points of ``B`` for statements (a) and (b).
    """
    if not A.is_affine:
        raise ValueError("A must be affine")
    grid = np.asarray(grid, dtype=float)
    if intersection_samples is None:
        intersection_samples = sample_intersection(A, B)
    oracle = brute_force_projector(intersection_samples)

    pa = np.array([A.project(x) for x in grid])
    pbpa = np.array([B.project(y) for y in pa])
    ref = oracle.project_many(grid)
    disc = np.linalg.norm(pbpa - ref, axis=1)

    b_pts = [x for x in grid if B.contains(x)]
    if set_samples is not None:
        b_pts.extend(np.asarray(set_samples, dtype=float))
    b_pts = np.array(b_pts).reshape(-1, grid.shape[1])
    a_pts = pa

    in_b = lambda p: B.contains(p, tol)  # noqa: E731
    in_ab = lambda p: in_b(p) and A.contains(p, tol)  # noqa: E731
    pa_b = [A.project(p) for p in b_pts]
    pb_a = [B.project(p) for p in a_pts]
    fixed_ab = all(np.linalg.norm(A.project(c) - c) <= tol and np.linalg.norm(B.project(c) - c) <= tol
                   for c in intersection_samples[:: max(1, len(intersection_samples) // 500)])

    statements = {
        "a": all(in_b(p) for p in pa_b),
        "b": all(in_ab(p) for p in pa_b) and fixed_ab,
        "c": all(A.contains(p, tol) for p in pb_a),
        "d": all(in_ab(p) for p in pb_a) and fixed_ab,
        "e": bool(disc.max() < tol) if disc.size else True,
    }
    return IntersectionReport(points=grid, discrepancies=disc, statements=statements, tol=tol)


def square_grid(extent: float = 3.0, n: int = 101) -> np.ndarray:
    """``n x n`` grid over ``[-extent, extent]^2`` as an ``(n*n, 2)`` array."""
    g = np.linspace(-extent, extent, n)
    X, Y = np.meshgrid(g, g, indexing="ij")
    return np.column_stack([X.ravel(), Y.ravel()])
