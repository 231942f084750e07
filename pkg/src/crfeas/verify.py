"""Fixture suites checking intersection projectors and C4 invariance numerically."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .intersection import brute_force_projector, sample_intersection, square_grid, verify_intersection_projector
from .sets import Annulus, Diamond, EuclideanBall, SqrtBall, line
from .wavelets.constraints import c4r_residual, c4s_residual, project_C1, project_C4R, project_C4S
from .wavelets.ensemble import random_consistent_ensemble

__all__ = [
    "FixtureResult",
    "annulus_fixture",
    "ball_fixture",
    "c4_invariance_fixture",
    "diamond_fixture",
    "run_all",
    "sqrt_ball_fixture",
]

DIAGONAL = (1.0, 1.0)
X_AXIS = (1.0, 0.0)


@dataclass(frozen=True)
class FixtureResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail}"


def _grid_fixture(name, A, B, tol, n):
    rep = verify_intersection_projector(A, B, square_grid(3.0, n), tol=tol)
    ok = all(rep.statements.values()) and rep.implications_hold and rep.max_discrepancy < tol
    flags = "".join(k if v else "-" for k, v in rep.statements.items())
    return FixtureResult(name, ok, f"max discrepancy {rep.max_discrepancy:.2e} (tol {tol:g}), statements {flags}")


def diamond_fixture(n: int = 101, tol: float = 1e-6) -> FixtureResult:
    """Line ``y = x`` with the l1 unit ball: ``P_B P_A`` is the intersection projector."""
    return _grid_fixture("diamond / diagonal line", line(DIAGONAL), Diamond(1.0), tol, n)


def sqrt_ball_fixture(n: int = 101, tol: float = 1e-6) -> FixtureResult:
    """The x-axis with the nonconvex set ``sqrt|x| + sqrt|y| <= 1``."""
    return _grid_fixture("sqrt ball / x-axis", line(X_AXIS), SqrtBall(), tol, n)


def annulus_fixture() -> FixtureResult:
    """Diagonal line with the annulus ``1 <= |x| <= 2``.

    ``x0 = (1, -1)`` lies in the annulus but projects onto the origin, so
    ``P_A(B)`` is not contained in ``B``.
    """
    A = line(DIAGONAL)
    B = Annulus(1.0, 2.0, tie_direction=-np.asarray(DIAGONAL) / np.sqrt(2))
    x0 = np.array([1.0, -1.0])
    pa = A.project(x0)
    witness = B.contains(x0) and np.allclose(pa, 0.0, atol=1e-12) and not B.contains(pa)
    grid = square_grid(3.0, 41)
    # points projecting onto the centre have two nearest points in A ∩ B; any choice is valid
    grid = grid[np.linalg.norm(np.array([A.project(x) for x in grid]), axis=1) > 1e-9]
    rep = verify_intersection_projector(A, B, grid, tol=1e-3)
    ok = witness and not rep.statements["a"] and rep.implications_hold
    return FixtureResult(
        "annulus counterexample",
        ok,
        f"x0=(1,-1) in B: {B.contains(x0)}, P_A(x0)={np.round(pa, 12).tolist()} in B: {B.contains(pa)}; "
        f"statement (a) {rep.statements['a']}, implication chain holds: {rep.implications_hold}",
    )


def ball_fixture() -> FixtureResult:
    """Diagonal line with the ball of radius 2: the reversed composition ``P_A P_B`` misses."""
    A = line(DIAGONAL)
    B = EuclideanBall(np.zeros(2), 2.0)
    x0 = np.array([4.0, 0.0])
    papb = A.project(B.project(x0))
    oracle = brute_force_projector(sample_intersection(A, B))
    gap = float(np.linalg.norm(papb - oracle(x0)))
    return FixtureResult(
        "ball reversed composition",
        gap > 0.4,
        f"P_A P_B(x0)={np.round(papb, 9).tolist()}, nearest point of A∩B={np.round(oracle(x0), 6).tolist()}, gap {gap:.4f}",
    )


def c4_invariance_fixture(variant: str, samples: int = 500, M: int = 6, seed: int = 0,
                          tol: float = 1e-9) -> FixtureResult:
    """``P_C1`` maps the C4 subspace into itself on random projected ensembles."""
    proj, res = (project_C4R, c4r_residual) if variant == "real" else (project_C4S, c4s_residual)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        U = proj(random_consistent_ensemble(M, rng))
        worst = max(worst, res(project_C1(U)))
    name = "C4R" if variant == "real" else "C4S"
    return FixtureResult(f"C1 preserves {name}", worst < tol, f"{samples} samples, worst residual {worst:.2e}")


def run_all() -> list[FixtureResult]:
    return [
        diamond_fixture(),
        sqrt_ball_fixture(),
        annulus_fixture(),
        ball_fixture(),
        c4_invariance_fixture("real"),
        c4_invariance_fixture("symmetric"),
    ]
