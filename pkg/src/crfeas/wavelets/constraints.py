"""Constraint sets of the wavelet feasibility problem and their projectors.

All sets live in the space of consistent ensembles with the Frobenius inner
product summed over all ``M`` samples.

C1
    ``U_0 = diag(1, z)`` with ``|z| = 1`` and every sample unitary.
C2
    The midpoint samples ``U((2j+1)/(2M))`` are unitary.
C3
    ``sum_k alpha_{lk} U_k`` is diagonal for ``l = 1..D`` (regularity), where
    ``alpha_{lk} = (1/M) sum_j j^l exp(-2 pi i k j / M)``.
C4R
    ``U_j = conj(U_{M-j})`` (real-valued filters).
C4S
    ``U_j = exp(2 pi i (M-1) j / M) U_{M-j}^dagger`` with ``dagger`` negating the
    off-diagonal entries (symmetric scaling function).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Literal

import numpy as np

from ..reformulation import FeasibilityProblem
from ..sets import MEMBERSHIP_TOL, ProjectableSet
from . import _kernels
from .ensemble import half_shift, half_shift_matrix, random_consistent_ensemble, unitarity_residual

__all__ = [
    "EnsembleSet",
    "WaveletProblem",
    "alpha",
    "c1_residual",
    "c2_residual",
    "c3_residual",
    "c4r_residual",
    "c4s_residual",
    "dagger",
    "intersect_C1_C4",
    "project_C1",
    "project_C2",
    "project_C3",
    "project_C4R",
    "project_C4S",
]

Variant = Literal["symmetric", "real"]


def dagger(U) -> np.ndarray:
    """Negate the off-diagonal entries of each 2x2 matrix."""
    W = np.array(U, dtype=complex, copy=True)
    W[..., 0, 1] *= -1
    W[..., 1, 0] *= -1
    return W


# -- C1 ---------------------------------------------------------------------

def _as_ensemble(U) -> np.ndarray:
    return np.ascontiguousarray(U, dtype=complex)


def project_C1(U) -> np.ndarray:
    """Nearest ensemble with unitary samples and ``U_0 = diag(1, z/|z|)``.

    Samples other than ``0`` and ``M/2`` are replaced by their unitary polar
    factors; ``z`` is the (2,2) entry of ``U_0`` (``z = 0`` maps to 1).
    """
    U = _as_ensemble(U)
    out = np.empty_like(U)
    _kernels.c1_into(U, out)
    return out


def c1_residual(U) -> float:
    U = np.asarray(U, dtype=complex)
    M = U.shape[0]
    u0 = U[0]
    r0 = max(abs(u0[0, 0] - 1), abs(u0[0, 1]), abs(u0[1, 0]), abs(abs(u0[1, 1]) - 1))
    return float(max(r0, unitarity_residual(U[: M // 2 + 1]).max()))


# -- C2 ---------------------------------------------------------------------

def project_C2(U) -> np.ndarray:
    """Nearest ensemble whose midpoint samples are unitary.

    The half-shift is a unitary change of coordinates on consistent ensembles,
    so projecting its image blockwise onto U(2) and mapping back is exact.
    """
    U = _as_ensemble(U)
    H = half_shift_matrix(U.shape[0])
    out = np.empty_like(U)
    _kernels.c2_into(U, H, _half_shift_inverse(U.shape[0]), np.empty_like(U), out)
    return out


@lru_cache(maxsize=None)
def _half_shift_inverse(M: int) -> np.ndarray:
    Hi = np.ascontiguousarray(half_shift_matrix(M).conj().T)
    return Hi


def c2_residual(U) -> float:
    V = half_shift(U)
    return float(unitarity_residual(V[: V.shape[0] // 2 + 1]).max())


# -- C3 ---------------------------------------------------------------------

def alpha(M: int, D: int) -> np.ndarray:
    """Weights ``alpha[l-1, k]`` for ``l = 1..D`` and ``k = 0..M-1``."""
    j = np.arange(M)
    ell = np.arange(1, D + 1)[:, None, None]
    E = np.exp(-2j * np.pi * np.outer(j, j) / M)  # E[k, j]
    return np.sum((j[None, None, :] ** ell) * E[None], axis=-1) / M


@lru_cache(maxsize=None)
def _c3_projection_matrix(M: int, D: int) -> np.ndarray:
    a = alpha(M, D)
    h = M // 2
    # free coordinates: the first h matrices, flattened as (k, p, q)
    G = np.zeros((2 * D, 4 * h), dtype=complex)
    idx = np.arange(4 * h).reshape(h, 2, 2)
    for l in range(D):
        for k in range(h):
            # entry (0,1): U_k[0,1] and (sigma U_k)[0,1] = U_k[1,1]
            G[2 * l, idx[k, 0, 1]] += a[l, k]
            G[2 * l, idx[k, 1, 1]] += a[l, k + h]
            # entry (1,0): U_k[1,0] and (sigma U_k)[1,0] = U_k[0,0]
            G[2 * l + 1, idx[k, 1, 0]] += a[l, k]
            G[2 * l + 1, idx[k, 0, 0]] += a[l, k + h]
    u, s, _ = np.linalg.svd(G.conj().T, full_matrices=False)
    rank = int(np.sum(s > 1e-12 * s[0]))
    Q = u[:, :rank]
    P = np.ascontiguousarray(np.eye(4 * h) - Q @ Q.conj().T)
    return P


def project_C3(U, D: int) -> np.ndarray:
    """Orthogonal projection onto the regularity subspace.

    Reads only the free half ``U_0 .. U_{M/2-1}``; the output is consistent.
    """
    U = _as_ensemble(U)
    out = np.empty_like(U)
    _kernels.c3_into(U, _c3_projection_matrix(U.shape[0], D), out)
    return out


def c3_residual(U, D: int) -> float:
    U = np.asarray(U, dtype=complex)
    S = np.einsum("lk,kab->lab", alpha(U.shape[0], D), U)
    return float(max(np.abs(S[:, 0, 1]).max(), np.abs(S[:, 1, 0]).max()))


# -- C4 ---------------------------------------------------------------------

def _mirror(M: int) -> np.ndarray:
    return (-np.arange(M)) % M


def _involution_R(U: np.ndarray) -> np.ndarray:
    return np.conj(U[_mirror(U.shape[0])])


@lru_cache(maxsize=None)
def _symmetry_phase(M: int) -> np.ndarray:
    return np.exp(2j * np.pi * (M - 1) * np.arange(M) / M)


def _involution_S(U: np.ndarray) -> np.ndarray:
    M = U.shape[0]
    return _symmetry_phase(M)[:, None, None] * dagger(U[_mirror(M)])


def project_C4R(U) -> np.ndarray:
    """Average with the conjugate-mirror image; projector onto ``U_j = conj(U_{M-j})``."""
    U = _as_ensemble(U)
    out = np.empty_like(U)
    _kernels.c4r_into(U, out)
    return out


def project_C4S(U) -> np.ndarray:
    """Average with the phase-dagger mirror image; projector onto the symmetry subspace."""
    U = _as_ensemble(U)
    out = np.empty_like(U)
    _kernels.c4s_into(U, _symmetry_phase(U.shape[0]), out)
    return out


def c4r_residual(U) -> float:
    U = np.asarray(U, dtype=complex)
    h = U.shape[0] // 2
    return float(np.abs(U - _involution_R(U))[1 : h + 1].max())


def c4s_residual(U) -> float:
    U = np.asarray(U, dtype=complex)
    h = U.shape[0] // 2
    return float(np.abs(U - _involution_S(U))[1 : h + 1].max())


def intersect_C1_C4(U, variant: Variant) -> np.ndarray:
    """``P_C1(P_C4(U))``, the merged-block map of the constraint reduction.

    C4 is a subspace left invariant by ``P_C1``, so the composition is a
    projector onto ``C1 ∩ C4``.
    """
    p4 = project_C4S if variant == "symmetric" else project_C4R
    return project_C1(p4(U))


# -- set objects and problems -------------------------------------------------

class EnsembleSet(ProjectableSet):
    """A wavelet constraint set packaged as a :class:`ProjectableSet`."""

    def __init__(self, name: str, project: Callable, residual: Callable, is_convex: bool, is_affine: bool):
        self.name = name
        self._project = project
        self._residual = residual
        self.is_convex = is_convex
        self.is_affine = is_affine

    def _check(self, x):
        x = np.asarray(x, dtype=complex)
        if x.ndim != 3 or x.shape[1:] != (2, 2):
            raise ValueError(f"expected an ensemble of shape (M, 2, 2), got {x.shape}")
        return x

    def project(self, x):
        return self._project(x)

    def residual(self, x) -> float:
        return self._residual(self._check(x))

    def contains(self, x, tol=MEMBERSHIP_TOL):
        return self.residual(x) <= tol

    def __repr__(self):
        return f"EnsembleSet({self.name})"


@dataclass(frozen=True)
class WaveletProblem:
    """Symmetric or real-valued orthogonal wavelet design with support ``[0, M-1]``."""

    M: int
    D: int
    variant: Variant = "symmetric"

    def __post_init__(self):
        if self.M < 4 or self.M % 2:
            raise ValueError(f"M must be an even integer >= 4, got {self.M}")
        if not 0 < self.D <= (self.M - 2) // 2:
            raise ValueError(f"D must satisfy 0 < D <= (M-2)/2 = {(self.M - 2) // 2}, got {self.D}")
        if self.variant not in ("symmetric", "real"):
            raise ValueError(f"variant must be 'symmetric' or 'real', got {self.variant!r}")

    @property
    def c1(self) -> EnsembleSet:
        return EnsembleSet("C1", project_C1, c1_residual, False, False)

    @property
    def c2(self) -> EnsembleSet:
        return EnsembleSet("C2", project_C2, c2_residual, False, False)

    @property
    def c3(self) -> EnsembleSet:
        D = self.D
        return EnsembleSet("C3", lambda U: project_C3(U, D), lambda U: c3_residual(U, D), True, True)

    @property
    def c4(self) -> EnsembleSet:
        if self.variant == "symmetric":
            return EnsembleSet("C4S", project_C4S, c4s_residual, True, True)
        return EnsembleSet("C4R", project_C4R, c4r_residual, True, True)

    def feasibility_problem(self) -> FeasibilityProblem:
        """Sets ordered ``(C2, C3, C1, C4)`` so the merged block is ``P_C1 P_C4``."""
        return FeasibilityProblem([self.c2, self.c3, self.c1, self.c4], reduced_pair=(2, 3))

    def random_start(self, seed) -> np.ndarray:
        """Random consistent ensemble used as a starting point."""
        return random_consistent_ensemble(self.M, seed)

    def residuals(self, U) -> dict[str, float]:
        return {
            "c1": self.c1.residual(U),
            "c2": self.c2.residual(U),
            "c3": self.c3.residual(U),
            "c4": self.c4.residual(U),
        }

    def parameters_label(self) -> str:
        return f"M={self.M}, D={self.D}"

    def describe(self) -> dict:
        return {"problem": self.variant, "M": self.M, "D": self.D}
