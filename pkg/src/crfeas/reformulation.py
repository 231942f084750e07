"""Product-space and constraint-reduction reformulations of feasibility problems.

Given sets ``K_1, ..., K_r`` the Pierra reformulation works in ``H^r`` with
``C = K_1 x ... x K_r`` and the diagonal ``D``. The constraint reduction
reformulation merges one pair of sets and works in ``H^(r-1)``: the merged
block is mapped by ``P_{K_i} P_{K_j}`` instead of being projected twice in
separate blocks.

Product vectors are numpy arrays whose first axis indexes blocks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Optional, Sequence

import numpy as np

from .hilbert import FixedPointOperator
from .sets import MEMBERSHIP_TOL, ProjectableSet

__all__ = [
    "FeasibilityProblem",
    "ProductReformulation",
    "apply_PW",
    "check_equivalence",
    "diagonal",
    "make_cr_dr",
    "make_cr_map",
    "make_product_dr",
    "make_product_map",
]


@dataclass(frozen=True)
class FeasibilityProblem:
    """Find a point in the intersection of ``sets``.

    ``reduced_pair = (i, j)`` (0-based) marks the pair merged by the constraint
    reduction; the merged block applies ``P_{K_i}`` after ``P_{K_j}``. The
    default is the last two sets, ``(r-2, r-1)``.
    """

    sets: Sequence[ProjectableSet]
    reduced_pair: Optional[tuple[int, int]] = None

    def __post_init__(self):
        r = len(self.sets)
        if r < 2:
            raise ValueError("a feasibility problem needs at least two sets")
        object.__setattr__(self, "sets", tuple(self.sets))
        if self.reduced_pair is None:
            object.__setattr__(self, "reduced_pair", (r - 2, r - 1))
        i, j = self.reduced_pair
        if not (0 <= i < r and 0 <= j < r) or i == j:
            raise ValueError(f"invalid reduced pair {self.reduced_pair} for {r} sets")

    @property
    def r(self) -> int:
        return len(self.sets)

    def contains(self, x, tol: float = MEMBERSHIP_TOL) -> bool:
        return all(K.contains(x, tol) for K in self.sets)

    def pierra(self) -> "ProductReformulation":
        return ProductReformulation(self, "pierra")

    def constraint_reduced(self) -> "ProductReformulation":
        return ProductReformulation(self, "constraint-reduced")


def apply_PW(x: np.ndarray) -> np.ndarray:
    """Projector onto the diagonal: every block becomes the block mean."""
    x = np.asarray(x)
    out = np.empty_like(x)
    out[:] = np.add.reduce(x, axis=0) / x.shape[0]
    return out


def diagonal(v: np.ndarray, blocks: int) -> np.ndarray:
    """The product vector ``(v, v, ..., v)``."""
    v = np.asarray(v)
    return np.broadcast_to(v, (blocks,) + v.shape).copy()


class ProductReformulation:
    """One of the two lifted two-set problems built from a :class:`FeasibilityProblem`.

    For ``kind="pierra"`` the constraint map is the exact projector ``P_C`` and
    there are ``r`` blocks. For ``kind="constraint-reduced"`` it is ``Q_V`` and
    there are ``r - 1`` blocks: the unmerged sets in their original order
    followed by the merged pair.
    """

    def __init__(self, problem: FeasibilityProblem, kind: Literal["pierra", "constraint-reduced"]):
        if kind not in ("pierra", "constraint-reduced"):
            raise ValueError(f"unknown reformulation kind {kind!r}")
        self.problem = problem
        self.kind = kind
        if kind == "pierra":
            self._block_maps = [K.project for K in problem.sets]
        else:
            i, j = problem.reduced_pair
            rest = [K.project for n, K in enumerate(problem.sets) if n not in (i, j)]
            Ki, Kj = problem.sets[i].project, problem.sets[j].project
            self._block_maps = rest + [lambda x, Ki=Ki, Kj=Kj: Ki(Kj(x))]

    @property
    def block_count(self) -> int:
        return len(self._block_maps)

    def _check(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x)
        if x.shape[0] != self.block_count:
            raise ValueError(f"expected {self.block_count} blocks, got {x.shape[0]}")
        return x

    def apply_QV(self, x: np.ndarray) -> np.ndarray:
        """Blockwise constraint map (``Q_V``; equal to ``P_C`` for Pierra)."""
        x = self._check(x)
        out = np.empty_like(x)
        for n, f in enumerate(self._block_maps):
            out[n] = f(x[n])
        return out

    apply_PC = apply_QV

    def apply_PW(self, x: np.ndarray) -> np.ndarray:
        return apply_PW(self._check(x))

    def lift(self, v: np.ndarray) -> np.ndarray:
        return diagonal(v, self.block_count)

    def in_V(self, x: np.ndarray, tol: float = MEMBERSHIP_TOL) -> bool:
        """Membership of a product vector in ``V`` (or ``C``)."""
        x = self._check(x)
        if self.kind == "pierra":
            return all(K.contains(xj, tol) for K, xj in zip(self.problem.sets, x))
        i, j = self.problem.reduced_pair
        rest = [K for n, K in enumerate(self.problem.sets) if n not in (i, j)]
        merged = (self.problem.sets[i], self.problem.sets[j])
        ok = all(K.contains(xj, tol) for K, xj in zip(rest, x[:-1]))
        return ok and all(K.contains(x[-1], tol) for K in merged)

    def in_W(self, x: np.ndarray, tol: float = MEMBERSHIP_TOL) -> bool:
        x = self._check(x)
        return bool(np.max(np.abs(x - x[0])) <= tol) if x.size else True


def _shadow(x: np.ndarray) -> np.ndarray:
    return x.mean(axis=0)


def make_cr_map(ref: ProductReformulation) -> FixedPointOperator:
    """Constraint-reduced alternating projections ``S = P_W Q_V``."""
    if ref.kind != "constraint-reduced":
        raise ValueError("make_cr_map needs a constraint-reduced reformulation")
    return _map_operator(ref, "cr-map")


def make_product_map(ref: ProductReformulation) -> FixedPointOperator:
    """Product-space alternating projections ``P_D P_C``."""
    if ref.kind != "pierra":
        raise ValueError("make_product_map needs a Pierra reformulation")
    return _map_operator(ref, "p-map")


def make_cr_dr(ref: ProductReformulation) -> FixedPointOperator:
    """Constraint-reduced Douglas-Rachford ``T = I - P_W + Q_V (2 P_W - I)``."""
    if ref.kind != "constraint-reduced":
        raise ValueError("make_cr_dr needs a constraint-reduced reformulation")
    return _dr_operator(ref, "cr-dr")


def make_product_dr(ref: ProductReformulation) -> FixedPointOperator:
    """Product-space Douglas-Rachford with the diagonal reflected first."""
    if ref.kind != "pierra":
        raise ValueError("make_product_dr needs a Pierra reformulation")
    return _dr_operator(ref, "p-dr")


def _map_operator(ref: ProductReformulation, name: str) -> FixedPointOperator:
    qv = ref.apply_QV

    def step(x):
        return apply_PW(qv(x))

    return FixedPointOperator(apply=step, project_v=qv, project_w=apply_PW, shadow=_shadow, name=name)


def _dr_operator(ref: ProductReformulation, name: str) -> FixedPointOperator:
    qv = ref.apply_QV

    def step(x):
        pw = apply_PW(x)
        return x - pw + qv(2.0 * pw - x)

    return FixedPointOperator(apply=step, project_v=qv, project_w=apply_PW, shadow=_shadow, name=name)


def check_equivalence(ref: ProductReformulation, x, tol: float = MEMBERSHIP_TOL) -> bool:
    """Whether ``x`` solves the problem, cross-checked against the lifted form.

    Raises ``AssertionError`` if the direct test and the membership of the
    diagonal lift ``(x, ..., x)`` in ``V ∩ W`` disagree.
    """
    direct = ref.problem.contains(x, tol)
    X = ref.lift(np.asarray(x))
    lifted = ref.in_V(X, tol) and ref.in_W(X, tol)
    if direct != lifted:
        raise AssertionError("direct and lifted membership disagree")
    return direct
