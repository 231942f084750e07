"""Filter extraction, the db3 reference, file formats and the cascade algorithm.

Filters use the normalization ``sum_k h_k = 1`` so that ``m0(0) = 1``.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .ensemble import dft, eval_trig_poly, unitarity_residual

__all__ = [
    "DB3",
    "CascadeDivergenceError",
    "CascadeResult",
    "FilterPair",
    "canonicalize_to_reference",
    "cascade_samples",
    "extract_filters",
    "read_filters",
    "sampling_sufficiency_residual",
    "shift_orthogonality_residual",
    "write_cascade_csv",
    "write_filters",
]

# Daubechies 3 (six taps), tabulated with sum sqrt(2); rescaled to sum 1.
DB3 = np.array([
    0.3326705529500826,
    0.8068915093110925,
    0.4598775021184915,
    -0.1350110200102546,
    -0.0854412738820267,
    0.0352262918857095,
]) / np.sqrt(2.0)

DIVERGENCE_LIMIT = 1e6


class CascadeDivergenceError(ArithmeticError):
    """Cascade samples grew beyond the divergence limit."""


@dataclass(frozen=True)
class FilterPair:
    """Scaling filter ``h`` and wavelet filter ``g`` (complex, length ``M``)."""

    h: np.ndarray
    g: np.ndarray

    @property
    def M(self) -> int:
        return len(self.h)

    def __post_init__(self):
        h = np.asarray(self.h, dtype=complex)
        g = np.asarray(self.g, dtype=complex)
        if h.ndim != 1 or h.shape != g.shape:
            raise ValueError("h and g must be one-dimensional and of equal length")
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "g", g)


def extract_filters(U) -> FilterPair:
    """Read ``h_k = A_k[0, 0]`` and ``g_k = A_k[0, 1]`` from the ensemble's coefficients."""
    A = dft(U)
    return FilterPair(h=A[:, 0, 0].copy(), g=A[:, 0, 1].copy())


def shift_orthogonality_residual(h) -> float:
    """Max over ``n`` of ``|sum_k h_k conj(h_{k-2n}) - delta_{n0} / 2|``."""
    h = np.asarray(h, dtype=complex)
    M = len(h)
    worst = 0.0
    for n in range(-(M // 2), M // 2 + 1):
        s = 0.0j
        for k in range(M):
            if 0 <= k - 2 * n < M:
                s += h[k] * np.conj(h[k - 2 * n])
        worst = max(worst, abs(s - (0.5 if n == 0 else 0.0)))
    return float(worst)


def sampling_sufficiency_residual(U, n_points: int = 64, seed=0) -> float:
    """Worst unitarity defect of the interpolated ``U(xi)`` at random points.

    The points avoid the ``2M`` grid ``j / (2M)`` used by the constraints.
    """
    A = dft(U)
    M = A.shape[0]
    rng = np.random.default_rng(seed)
    xi = rng.random(n_points)
    grid = np.arange(2 * M) / (2 * M)
    near = np.min(np.abs(xi[:, None] - grid[None, :]), axis=1) < 1e-9
    xi[near] += 0.5 / (4 * M)
    return float(unitarity_residual(eval_trig_poly(A, xi)).max())


def canonicalize_to_reference(h, ref) -> np.ndarray:
    """Representative of ``h`` closest to ``ref`` in max norm.

    Candidates are ``h`` under optional conjugation, optional index reversal
    ``h_k -> h_{M-1-k}``, and the global phase that best aligns with ``ref``.
    """
    h = np.asarray(h, dtype=complex)
    ref = np.asarray(ref, dtype=complex)
    if h.shape != ref.shape:
        raise ValueError(f"filter length {h.shape} does not match reference {ref.shape}")
    best, best_d = h, np.inf
    for c in (h, np.conj(h), h[::-1], np.conj(h[::-1])):
        ip = np.vdot(c, ref)
        ph = ip / abs(ip) if abs(ip) > 0 else 1.0
        cand = ph * c
        d = np.max(np.abs(cand - ref))
        if d < best_d:
            best, best_d = cand, d
    return best


# -- cascade ------------------------------------------------------------------

@dataclass(frozen=True)
class CascadeResult:
    t: np.ndarray
    phi: np.ndarray
    psi: np.ndarray
    levels: int


def _integer_samples(h, max_iter: int = 2000, tol: float = 1e-15) -> np.ndarray:
    # Refinement at integer resolution from the unit impulse: phi(n) = sum_k 2 h_k phi(2n - k).
    M = len(h)
    T = np.zeros((M, M), dtype=complex)
    for n in range(M):
        for k in range(M):
            if 0 <= 2 * n - k < M:
                T[n, k] = 2 * h[2 * n - k]
    v = np.zeros(M, dtype=complex)
    v[0] = 1.0
    for _ in range(max_iter):
        w = T @ v
        if not np.all(np.isfinite(w)) or np.max(np.abs(w)) > DIVERGENCE_LIMIT:
            raise CascadeDivergenceError("cascade diverged at integer resolution")
        done = np.max(np.abs(w - v)) <= tol
        v = w
        if done:
            break
    return v


def cascade_samples(f: FilterPair, levels: int = 10) -> CascadeResult:
    """Samples of the scaling function and wavelet on the grid ``i / 2**levels`` over ``[0, M-1]``.

    The refinement ``v <- 2 sum_k h_k v(2 . - k)`` is first run at integer
    resolution from the unit impulse until the integer samples settle, then
    applied ``levels`` times, each time halving the grid spacing. The wavelet
    is ``psi(t) = 2 sum_k g_k phi(2t - k)`` on the final grid.

    Raises
    ------
    CascadeDivergenceError
        If any sample exceeds ``1e6`` in modulus.
    """
    if levels < 1:
        raise ValueError("levels must be >= 1")
    h, g = f.h, f.g
    M = len(h)
    v = _integer_samples(h)
    taps = 2 * h
    for level in range(1, levels + 1):
        n = (M - 1) * 2**level + 1
        w = np.zeros(n, dtype=complex)
        step = 2 ** (level - 1)
        for k in range(M):
            s = k * step
            w[s: s + len(v)] += taps[k] * v
        if np.max(np.abs(w)) > DIVERGENCE_LIMIT or not np.all(np.isfinite(w)):
            raise CascadeDivergenceError(f"cascade diverged at level {level}")
        v = w
    n = len(v)
    scale = 2**levels
    psi = np.zeros(n, dtype=complex)
    i = np.arange(n)
    for k in range(M):
        idx = 2 * i - k * scale
        ok = (idx >= 0) & (idx < n)
        psi[ok] += 2 * g[k] * v[idx[ok]]
    if np.max(np.abs(psi)) > DIVERGENCE_LIMIT:
        raise CascadeDivergenceError("wavelet samples diverged")
    return CascadeResult(t=i / scale, phi=v, psi=psi, levels=levels)


# -- files --------------------------------------------------------------------

def _pairs(z) -> list:
    return [[float(c.real), float(c.imag)] for c in np.asarray(z, dtype=complex)]


def write_filters(path, f: FilterPair, M: int, D: int, variant: str, residuals: dict) -> None:
    doc = {
        "M": int(M),
        "D": int(D),
        "variant": variant,
        "h": _pairs(f.h),
        "g": _pairs(f.g),
        "residuals": {k: float(v) for k, v in residuals.items()},
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def read_filters(path) -> tuple[FilterPair, dict]:
    """Load a filter JSON file; returns the pair and the full document."""
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    try:
        h = np.array([complex(re, im) for re, im in doc["h"]])
        g = np.array([complex(re, im) for re, im in doc["g"]])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed filter file {path}: {exc}") from exc
    return FilterPair(h=h, g=g), doc


def write_cascade_csv(path, res: CascadeResult, header: dict | None = None) -> None:
    buf = io.StringIO()
    if header is not None:
        buf.write("# " + json.dumps(header, sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "phi_re", "phi_im", "psi_re", "psi_im"])
    for t, p, q in zip(res.t, res.phi, res.psi):
        w.writerow([repr(float(v)) for v in (t, p.real, p.imag, q.real, q.imag)])
    Path(path).write_text(buf.getvalue(), encoding="utf-8")
