"""Projectable sets in R^n.

Each set bundles a membership test, a projector and the derived reflector and
distance. Projectors onto nonconvex sets are set-valued in general; the
classes here return one deterministic selection.
"""

from __future__ import annotations

import numpy as np

MEMBERSHIP_TOL = 1e-9

__all__ = [
    "MEMBERSHIP_TOL",
    "AffineSubspace",
    "Annulus",
    "Box",
    "Diamond",
    "EuclideanBall",
    "Halfspace",
    "ProjectableSet",
    "SqrtBall",
    "WholeSpace",
    "line",
    "reflect",
]


class ProjectableSet:
    """Base class: subclasses implement :meth:`project` and :meth:`contains`."""

    is_convex = True
    is_affine = False
    dim: int | None = None

    def project(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def contains(self, x, tol: float = MEMBERSHIP_TOL) -> bool:
        raise NotImplementedError

    def reflect(self, x) -> np.ndarray:
        x = self._check(x)
        return 2.0 * self.project(x) - x

    def distance(self, x) -> float:
        x = self._check(x)
        return float(np.linalg.norm(x - self.project(x)))

    def __call__(self, x):
        return self.project(x)

    def _check(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.dim is not None and x.shape != (self.dim,):
            raise ValueError(f"expected a vector of dimension {self.dim}, got shape {x.shape}")
        return x


def reflect(S: ProjectableSet, x) -> np.ndarray:
    """Reflector ``2 P_S(x) - x``."""
    return S.reflect(x)


class WholeSpace(ProjectableSet):
    is_affine = True

    def __init__(self, dim: int | None = None):
        self.dim = dim

    def project(self, x):
        return np.asarray(x)

    def contains(self, x, tol=MEMBERSHIP_TOL):
        return bool(np.all(np.isfinite(x)))


class AffineSubspace(ProjectableSet):
    """``basepoint + span(directions)``.

    The directions are orthonormalised on construction, so any spanning set may
    be passed. An empty direction list gives the singleton ``{basepoint}``.
    """

    is_affine = True

    def __init__(self, basepoint, directions):
        self.basepoint = np.asarray(basepoint, dtype=float)
        self.dim = self.basepoint.size
        d = np.asarray(directions, dtype=float).reshape(-1, self.dim)
        if d.shape[0] == 0:
            self.basis = np.zeros((0, self.dim))
        else:
            u, s, _ = np.linalg.svd(d.T, full_matrices=False)
            rank = int(np.sum(s > 1e-12 * max(s[0], 1.0)))
            self.basis = u[:, :rank].T

    @classmethod
    def from_equations(cls, A, b):
        """The solution set of ``A x = b`` (assumed consistent)."""
        A = np.atleast_2d(np.asarray(A, dtype=float))
        b = np.atleast_1d(np.asarray(b, dtype=float))
        p = np.linalg.lstsq(A, b, rcond=None)[0]
        _, s, vt = np.linalg.svd(A)
        rank = int(np.sum(s > 1e-12 * max(s[0], 1.0))) if s.size else 0
        return cls(p, vt[rank:])

    def project(self, x):
        x = self._check(x)
        y = x - self.basepoint
        return self.basepoint + self.basis.T @ (self.basis @ y)

    def contains(self, x, tol=MEMBERSHIP_TOL):
        x = self._check(x)
        return bool(np.linalg.norm(x - self.project(x)) <= tol)


def line(direction, through=None) -> AffineSubspace:
    direction = np.asarray(direction, dtype=float)
    base = np.zeros_like(direction) if through is None else through
    return AffineSubspace(base, [direction])


class Halfspace(ProjectableSet):
    """``{x : <normal, x> <= offset}``."""

    def __init__(self, normal, offset: float):
        self.normal = np.asarray(normal, dtype=float)
        nn = np.linalg.norm(self.normal)
        if nn == 0:
            raise ValueError("normal must be nonzero")
        self.dim = self.normal.size
        self.offset = float(offset)
        self._nn2 = nn * nn

    def project(self, x):
        x = self._check(x)
        excess = self.normal @ x - self.offset
        if excess <= 0:
            return x
        return x - (excess / self._nn2) * self.normal

    def contains(self, x, tol=MEMBERSHIP_TOL):
        x = self._check(x)
        return bool(self.normal @ x - self.offset <= tol * np.sqrt(self._nn2))


class Box(ProjectableSet):
    def __init__(self, lower, upper):
        self.lower = np.asarray(lower, dtype=float)
        self.upper = np.asarray(upper, dtype=float)
        if np.any(self.lower > self.upper):
            raise ValueError("empty box")
        self.dim = self.lower.size

    def project(self, x):
        return np.clip(self._check(x), self.lower, self.upper)

    def contains(self, x, tol=MEMBERSHIP_TOL):
        x = self._check(x)
        return bool(np.all(x >= self.lower - tol) and np.all(x <= self.upper + tol))


class EuclideanBall(ProjectableSet):
    def __init__(self, center, radius: float):
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)
        if self.radius < 0:
            raise ValueError("radius must be nonnegative")
        self.dim = self.center.size

    def project(self, x):
        x = self._check(x)
        d = x - self.center
        r = np.linalg.norm(d)
        if r <= self.radius:
            return x
        return self.center + (self.radius / r) * d

    def contains(self, x, tol=MEMBERSHIP_TOL):
        return bool(np.linalg.norm(self._check(x) - self.center) <= self.radius + tol)


class Diamond(ProjectableSet):
    """The l1 ball ``{x : sum |x_i| <= radius}``."""

    def __init__(self, radius: float = 1.0, dim: int = 2):
        self.radius = float(radius)
        self.dim = dim

    def project(self, x):
        x = self._check(x)
        a = np.abs(x)
        if a.sum() <= self.radius:
            return x
        # sort-based threshold (Held-Wolfe-Crowder / Duchi et al.)
        u = np.sort(a)[::-1]
        css = np.cumsum(u) - self.radius
        k = np.arange(1, u.size + 1)
        rho = np.nonzero(u - css / k > 0)[0][-1]
        theta = css[rho] / (rho + 1)
        return np.sign(x) * np.maximum(a - theta, 0.0)

    def contains(self, x, tol=MEMBERSHIP_TOL):
        return bool(np.abs(self._check(x)).sum() <= self.radius + tol)


class Annulus(ProjectableSet):
    """``{x : r_inner <= |x| <= r_outer}`` (nonconvex).

    The projection is radial. At the origin every point of the inner sphere is
    nearest; ``tie_direction`` selects one. The default is the lexicographically
    smallest candidate, ``(-r_inner, 0, ..., 0)``.
    """

    is_convex = False

    def __init__(self, r_inner: float, r_outer: float, dim: int = 2, tie_direction=None):
        if not 0 <= r_inner <= r_outer:
            raise ValueError("need 0 <= r_inner <= r_outer")
        self.r_inner = float(r_inner)
        self.r_outer = float(r_outer)
        self.dim = dim
        if tie_direction is None:
            tie_direction = np.zeros(dim)
            tie_direction[0] = -1.0
        t = np.asarray(tie_direction, dtype=float)
        self.tie_direction = t / np.linalg.norm(t)

    def project(self, x):
        x = self._check(x)
        r = np.linalg.norm(x)
        if self.r_inner <= r <= self.r_outer:
            return x
        if r == 0:
            return self.r_inner * self.tie_direction
        target = self.r_inner if r < self.r_inner else self.r_outer
        return (target / r) * x

    def contains(self, x, tol=MEMBERSHIP_TOL):
        r = np.linalg.norm(self._check(x))
        return bool(self.r_inner - tol <= r <= self.r_outer + tol)


class SqrtBall(ProjectableSet):
    """``{(x, y) : sqrt|x| + sqrt|y| <= 1}`` in R^2 (nonconvex).

    The set is symmetric under sign flips of either coordinate, so a query is
    reflected into the first quadrant, where the boundary is the curve
    ``s -> (s^2, (1-s)^2)``, ``s in [0, 1]``. The nearest boundary parameter is
    located on a dense grid and refined by golden-section search.
    """

    is_convex = False
    dim = 2

    def __init__(self, samples: int = 2048, xtol: float = 1e-10):
        self.samples = samples
        self.xtol = xtol
        self._grid = np.linspace(0.0, 1.0, samples)

    @staticmethod
    def _gauge(x):
        return np.sqrt(np.abs(x[0])) + np.sqrt(np.abs(x[1]))

    def contains(self, x, tol=MEMBERSHIP_TOL):
        return bool(self._gauge(self._check(x)) <= 1.0 + tol)

    def project(self, x):
        x = self._check(x)
        if self._gauge(x) <= 1.0:
            return x
        a, b = np.abs(x)

        def f(s):
            return (s * s - a) ** 2 + ((1.0 - s) ** 2 - b) ** 2

        g = self._grid
        i = int(np.argmin(f(g)))
        lo = g[max(i - 1, 0)]
        hi = g[min(i + 1, g.size - 1)]
        s = _golden_min(f, lo, hi, self.xtol)
        # endpoints of the bracket are candidates too (cusps at s = 0, 1)
        cands = [s, lo, hi]
        s = min(cands, key=f)
        p = np.array([s * s, (1.0 - s) ** 2])
        sign = np.where(x < 0, -1.0, 1.0)
        return sign * p


def _golden_min(f, lo: float, hi: float, xtol: float) -> float:
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    c = hi - invphi * (hi - lo)
    d = lo + invphi * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > xtol:
        if fc < fd:
            hi, d, fd = d, c, fc
            c = hi - invphi * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + invphi * (hi - lo)
            fd = f(d)
    return 0.5 * (lo + hi)
