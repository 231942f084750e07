"""Compiled inner loops for the ensemble projectors.

All kernels take complex128 arrays of shape ``(M, 2, 2)`` and write into a
preallocated output of the same shape.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def polar_into(U, out):
    for j in range(U.shape[0]):
        a = U[j, 0, 0]
        b = U[j, 0, 1]
        c = U[j, 1, 0]
        d = U[j, 1, 1]
        det = a * d - b * c
        adet = abs(det)
        ph = det / adet if adet > 0 else 1.0 + 0.0j
        w00 = a + ph * np.conj(d)
        w01 = b - ph * np.conj(c)
        w10 = c - ph * np.conj(b)
        w11 = d + ph * np.conj(a)
        s2 = (w00.real * w00.real + w00.imag * w00.imag + w01.real * w01.real + w01.imag * w01.imag
              + w10.real * w10.real + w10.imag * w10.imag + w11.real * w11.real + w11.imag * w11.imag)
        s = np.sqrt(0.5 * s2)
        if s == 0.0:
            out[j, 0, 0] = 1.0
            out[j, 0, 1] = 0.0
            out[j, 1, 0] = 0.0
            out[j, 1, 1] = 1.0
        else:
            out[j, 0, 0] = w00 / s
            out[j, 0, 1] = w01 / s
            out[j, 1, 0] = w10 / s
            out[j, 1, 1] = w11 / s


@njit(cache=True)
def c1_into(U, out):
    M = U.shape[0]
    polar_into(U, out)
    z = U[0, 1, 1]
    az = abs(z)
    u = z / az if az > 0 else 1.0 + 0.0j
    h = M // 2
    out[0, 0, 0] = 1.0
    out[0, 0, 1] = 0.0
    out[0, 1, 0] = 0.0
    out[0, 1, 1] = u
    # sigma swaps the rows
    out[h, 0, 0] = 0.0
    out[h, 0, 1] = u
    out[h, 1, 0] = 1.0
    out[h, 1, 1] = 0.0


@njit(cache=True)
def _apply_left(H, U, out):
    # out[j] = sum_k H[j, k] U[k]
    M = U.shape[0]
    for j in range(M):
        for p in range(2):
            for q in range(2):
                acc = 0.0 + 0.0j
                for k in range(M):
                    acc += H[j, k] * U[k, p, q]
                out[j, p, q] = acc


@njit(cache=True)
def c2_into(U, H, Hinv, work, out):
    _apply_left(H, U, work)
    polar_into(work, out)
    _apply_left(Hinv, out, work)
    out[:] = work


@njit(cache=True)
def c3_into(U, P, out):
    M = U.shape[0]
    h = M // 2
    n = 4 * h
    for i in range(n):
        acc = 0.0 + 0.0j
        for m in range(n):
            acc += P[i, m] * U[m // 4, (m // 2) % 2, m % 2]
        out[i // 4, (i // 2) % 2, i % 2] = acc
    for k in range(h):
        out[k + h, 0, 0] = out[k, 1, 0]
        out[k + h, 0, 1] = out[k, 1, 1]
        out[k + h, 1, 0] = out[k, 0, 0]
        out[k + h, 1, 1] = out[k, 0, 1]


@njit(cache=True)
def c4r_into(U, out):
    M = U.shape[0]
    for j in range(M):
        m = (M - j) % M
        for p in range(2):
            for q in range(2):
                out[j, p, q] = 0.5 * (U[j, p, q] + np.conj(U[m, p, q]))


@njit(cache=True)
def c4s_into(U, phase, out):
    M = U.shape[0]
    for j in range(M):
        m = (M - j) % M
        ph = phase[j]
        out[j, 0, 0] = 0.5 * (U[j, 0, 0] + ph * U[m, 0, 0])
        out[j, 0, 1] = 0.5 * (U[j, 0, 1] - ph * U[m, 0, 1])
        out[j, 1, 0] = 0.5 * (U[j, 1, 0] - ph * U[m, 1, 0])
        out[j, 1, 1] = 0.5 * (U[j, 1, 1] + ph * U[m, 1, 1])
