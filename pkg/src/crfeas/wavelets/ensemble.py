"""Ensembles of 2x2 complex matrices sampled from a wavelet filter matrix.

An ensemble is a complex array of shape ``(M, 2, 2)`` holding the samples
``U_j = U(j / M)`` of the matrix-valued trigonometric polynomial

    U(xi) = sum_{k=0}^{M-1} A_k exp(2 pi i k xi).

Ensembles are *consistent* when ``U_{j + M/2} = sigma U_j`` with ``sigma`` the
row swap. The consistent ensembles form a linear subspace; only its first
half is free.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from . import _kernels

__all__ = [
    "SIGMA",
    "TAU",
    "consistency_residual",
    "dft",
    "eval_trig_poly",
    "from_half",
    "from_vector",
    "half_shift",
    "half_shift_matrix",
    "inverse_dft",
    "inverse_half_shift",
    "is_consistent",
    "is_unitary",
    "polar",
    "random_consistent_ensemble",
    "to_vector",
    "unitarity_residual",
]

SIGMA = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
TAU = np.array([[-1.0, 0.0], [0.0, 1.0]], dtype=complex)


def _check_M(M: int) -> int:
    M = int(M)
    if M < 4 or M % 2:
        raise ValueError(f"M must be an even integer >= 4, got {M}")
    return M


def from_half(first_half) -> np.ndarray:
    """Complete ``U_0 .. U_{M/2-1}`` to a consistent ensemble."""
    h = np.asarray(first_half, dtype=complex)
    return np.concatenate([h, SIGMA @ h], axis=0)


def consistency_residual(U) -> float:
    U = np.asarray(U)
    h = U.shape[0] // 2
    return float(np.max(np.abs(U[h:] - SIGMA @ U[:h])))


def is_consistent(U, tol: float = 0.0) -> bool:
    return consistency_residual(U) <= tol


def random_consistent_ensemble(M: int, seed=None) -> np.ndarray:
    """Consistent ensemble whose free entries have real and imaginary parts uniform on (0, 1).

    ``seed`` may be an int, a ``SeedSequence`` or a ``Generator``.
    """
    M = _check_M(M)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    shape = (M // 2, 2, 2)
    re = rng.random(shape)
    im = rng.random(shape)
    return from_half(re + 1j * im)


def dft(U) -> np.ndarray:
    """Coefficient matrices ``A_k = (1/M) sum_j U_j exp(-2 pi i j k / M)``."""
    U = np.asarray(U, dtype=complex)
    return np.fft.fft(U, axis=0) / U.shape[0]


def inverse_dft(A) -> np.ndarray:
    """Samples ``U_j = sum_k A_k exp(2 pi i j k / M)``."""
    A = np.asarray(A, dtype=complex)
    return np.fft.ifft(A, axis=0) * A.shape[0]


def _chi(M: int) -> np.ndarray:
    return np.exp(1j * np.pi * np.arange(M) / M)[:, None, None]


def half_shift(U) -> np.ndarray:
    """Samples of ``U`` at the midpoints ``(2j + 1) / (2M)``.

    The map is unitary for the Frobenius inner product on ``(C^{2x2})^M`` and
    maps consistent ensembles to consistent ensembles.
    """
    U = np.asarray(U, dtype=complex)
    return np.fft.ifft(_chi(U.shape[0]) * np.fft.fft(U, axis=0), axis=0)


def inverse_half_shift(V) -> np.ndarray:
    V = np.asarray(V, dtype=complex)
    return np.fft.ifft(np.conj(_chi(V.shape[0])) * np.fft.fft(V, axis=0), axis=0)


def eval_trig_poly(A, xi) -> np.ndarray:
    """Evaluate ``U(xi)`` from coefficients for an array of ``xi``; shape ``(len(xi), 2, 2)``."""
    A = np.asarray(A, dtype=complex)
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    k = np.arange(A.shape[0])
    E = np.exp(2j * np.pi * np.outer(xi, k))
    return np.einsum("tk,kab->tab", E, A)


def polar(U) -> np.ndarray:
    """Unitary polar factor of each 2x2 matrix in ``U`` (any leading shape).

    For ``U = X S Y*`` this returns ``X Y*``. Uses the closed form

        X Y* = (U + e^{i arg det U} adj(U)^*) / (s_1 + s_2),

    where ``s_1 + s_2`` is the Frobenius norm of the numerator over sqrt(2).
    A singular ``U`` uses phase 1; the zero matrix maps to the identity.
    """
    U = np.asarray(U, dtype=complex)
    flat = np.ascontiguousarray(U.reshape(-1, 2, 2))
    out = np.empty_like(flat)
    _kernels.polar_into(flat, out)
    return out.reshape(U.shape)


@lru_cache(maxsize=None)
def half_shift_matrix(M: int) -> np.ndarray:
    """Matrix ``H`` with ``half_shift(U)[j] = sum_k H[j, k] U[k]``."""
    j = np.arange(M)
    F = np.exp(-2j * np.pi * np.outer(j, j) / M)
    H = (np.conj(F) * _chi(M)[:, 0, 0]) @ F / M
    return H


def unitarity_residual(U) -> np.ndarray:
    """``||U_j^* U_j - I||_F`` for each matrix."""
    U = np.asarray(U, dtype=complex)
    G = np.conj(np.swapaxes(U, -1, -2)) @ U
    return np.linalg.norm(G - np.eye(2), axis=(-2, -1))


def is_unitary(U, tol: float = 1e-9) -> bool:
    return bool(np.all(unitarity_residual(U) < tol))


def to_vector(U) -> np.ndarray:
    """Real coordinates of the free half: length ``8 * (M/2)``.

    ``||to_vector(U)|| * sqrt(2) == ||U||`` for consistent ``U``.
    """
    U = np.asarray(U, dtype=complex)
    h = U[: U.shape[0] // 2].reshape(-1)
    return np.concatenate([h.real, h.imag])


def from_vector(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    n = v.size // 2
    if v.size % 8:
        raise ValueError("vector length must be a multiple of 8")
    h = (v[:n] + 1j * v[n:]).reshape(-1, 2, 2)
    return from_half(h)
