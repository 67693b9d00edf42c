"""Dense complex linear-algebra kernel.

Every routine accepts a single matrix or a stack of matrices with arbitrary
leading batch axes, so parameter grids can be pushed through in one call.
"""

from __future__ import annotations

from itertools import combinations
from typing import Sequence

import numpy as np

JACOBI_MAX_SWEEPS = 100
JACOBI_OFF_TOL = 1e-13
PSD_CLAMP = -1e-10


class ConvergenceError(RuntimeError):
    """Raised when the Jacobi sweep cap is hit before the matrix is diagonal."""


def _as_square_stack(m) -> np.ndarray:
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise ValueError(f"expected square matrix (or stack of them), got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def eigh_hermitian(m, tol: float = 1e-10) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.

    Parameters
    ----------
    m : array_like, shape (..., n, n)
        Hermitian matrix or stack of Hermitian matrices.
    tol : float
        Largest tolerated entry of ``m - m^H`` before the input is rejected.

    Returns
    -------
    w : ndarray, shape (..., n)
        Eigenvalues in ascending order.
    v : ndarray, shape (..., n, n)
        Unitary matrix whose columns are the matching eigenvectors.
    """
    a = _as_square_stack(m)
    n = a.shape[-1]
    batch_shape = a.shape[:-2]
    if a.size and np.max(np.abs(a - np.conj(np.swapaxes(a, -1, -2)))) > tol:
        raise ValueError("matrix is not Hermitian within tolerance")

    # batch axis last: a[i, j, :] runs over the stack contiguously
    a = a.reshape((-1, n, n))
    a = np.ascontiguousarray(np.moveaxis(0.5 * (a + np.conj(np.swapaxes(a, -1, -2))), 0, -1))
    v = np.zeros_like(a)
    for i in range(n):
        v[i, i] = 1.0
    scale = np.sqrt(np.sum(np.abs(a) ** 2, axis=(0, 1)))
    threshold = JACOBI_OFF_TOL * scale
    offdiag = ~np.eye(n, dtype=bool)

    pairs = list(combinations(range(n), 2))
    converged = n < 2
    for _ in range(JACOBI_MAX_SWEEPS):
        if n < 2:
            break
        off = np.sqrt(np.sum(np.abs(a[offdiag]) ** 2, axis=0))
        if np.all(off <= threshold):
            converged = True
            break
        for p, q in pairs:
            apq = a[p, q].copy()
            r = np.abs(apq)
            # subnormal pivots make apq / r overflow; they are zero for our purposes
            live = r > 1e-290
            r_safe = np.where(live, r, 1.0)
            phase = np.where(live, apq / r_safe, 1.0)
            app = a[p, p].real.copy()
            aqq = a[q, q].real.copy()
            with np.errstate(over="ignore"):
                theta = (aqq - app) / (2.0 * r_safe)
            big = np.abs(theta) > 1e150
            theta_c = np.where(big, 1.0, theta)
            t = np.where(theta_c >= 0, 1.0, -1.0) / (np.abs(theta_c) + np.sqrt(theta_c**2 + 1.0))
            t = np.where(big, 0.5 / np.where(big, theta, 1.0), t)
            t = np.where(live, t, 0.0)
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            s_ph = s * np.conj(phase)
            c_ph = c * np.conj(phase)

            # A <- A J, V <- V J with J = [[c, s], [-s e^{-i phi}, c e^{-i phi}]]
            for x in (a, v):
                xp = x[:, p].copy()
                xq = x[:, q]
                x[:, p] = c * xp - s_ph * xq
                x[:, q] = s * xp + c_ph * xq
            # A <- J^H A
            rp = a[p].copy()
            rq = a[q]
            a[p] = c * rp - np.conj(s_ph) * rq
            a[q] = s * rp + np.conj(c_ph) * rq
            a[p, q] = 0.0
            a[q, p] = 0.0
            a[p, p] = app - t * r
            a[q, q] = aqq + t * r
    if not converged and n > 1:
        off = np.sqrt(np.sum(np.abs(a[offdiag]) ** 2, axis=0))
        if np.any(off > threshold):
            raise ConvergenceError(f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps")

    a = np.moveaxis(a, -1, 0)
    v = np.moveaxis(v, -1, 0)
    w = np.real(np.diagonal(a, axis1=-2, axis2=-1))
    order = np.argsort(w, axis=-1, kind="stable")
    w = np.take_along_axis(w, order, axis=-1)
    v = np.take_along_axis(v, order[:, None, :], axis=-1)
    return w.reshape(batch_shape + (n,)), v.reshape(batch_shape + (n, n))


def sqrt_psd(m, floor: float = 0.0) -> np.ndarray:
    """Principal square root of a positive semidefinite Hermitian matrix.

    Eigenvalues in ``[-1e-10, floor]`` are treated as exact zeros; anything
    more negative raises ``ValueError``.
    """
    w, v = eigh_hermitian(m)
    if np.any(w < PSD_CLAMP):
        raise ValueError(f"matrix is not PSD: smallest eigenvalue {w.min():.3e}")
    w = np.where(w <= floor, 0.0, w)
    root = np.sqrt(w)
    return (v * root[..., None, :]) @ np.conj(np.swapaxes(v, -1, -2))


def kron(a, b) -> np.ndarray:
    return np.kron(np.asarray(a, dtype=np.complex128), np.asarray(b, dtype=np.complex128))


def partial_trace_multi(rho, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Reduce ``rho`` on the tensor factors listed in ``keep`` (0-based, any order
    is normalized to ascending). Leading batch axes are preserved."""
    rho = np.asarray(rho, dtype=np.complex128)
    dims = tuple(int(d) for d in dims)
    total = int(np.prod(dims))
    if rho.shape[-2:] != (total, total):
        raise ValueError(f"rho shape {rho.shape[-2:]} does not match dims {dims}")
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= len(dims) for k in keep):
        raise ValueError(f"keep {keep} out of range for {len(dims)} subsystems")
    n = len(dims)
    batch = rho.shape[:-2]
    t = rho.reshape(batch + dims + dims)
    letters = "abcdefghijklmnopqrstuvwxyz"
    row = letters[:n]
    col = "".join(letters[n + i] if i in keep else letters[i] for i in range(n))
    out = "".join(letters[i] for i in keep) + "".join(letters[n + i] for i in keep)
    red = np.einsum(f"...{row}{col}->...{out}", t)
    d_keep = int(np.prod([dims[i] for i in keep])) if keep else 1
    return red.reshape(batch + (d_keep, d_keep))


def partial_trace(rho, dims: tuple[int, int], keep: int) -> np.ndarray:
    """Bipartite partial trace; ``keep`` is the subsystem id, 1 or 2."""
    if keep not in (1, 2):
        raise ValueError("keep must be 1 or 2")
    return partial_trace_multi(rho, dims, [keep - 1])


def haar_unitary(n: int, seed) -> np.ndarray:
    """Haar-distributed n x n unitary from the QR decomposition of a complex
    Ginibre matrix, with the phase ambiguity of R removed."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def dagger(m) -> np.ndarray:
    return np.conj(np.swapaxes(np.asarray(m), -1, -2))


def hermitian_part(m) -> np.ndarray:
    return 0.5 * (m + dagger(m))
