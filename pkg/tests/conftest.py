"""Independent oracles shared by the test modules. They use LAPACK through
numpy rather than the package's own kernels."""

import numpy as np
import pytest

SY = np.array([[0, -1j], [1j, 0]])
YY = np.kron(SY, SY)


def np_sqrtm_psd(rho):
    w, v = np.linalg.eigh(rho)
    w = np.where(w < 1e-14 * max(1.0, w.max()), 0.0, w)
    return (v * np.sqrt(w)) @ v.conj().T


def oracle_wootters(rho):
    """Singular values of sqrt(rho) (sy x sy) sqrt(rho)^* via numpy."""
    s = np_sqrtm_psd(np.asarray(rho))
    lam = np.linalg.svd(s @ YY @ s.conj(), compute_uv=False)
    return max(0.0, lam[0] - lam[1] - lam[2] - lam[3])


def oracle_iconcurrence(amps):
    """sqrt(2 (1 - Tr rho_r^2)) from the reduced state."""
    a = np.asarray(amps)
    a = a / np.linalg.norm(a)
    r = a @ a.conj().T
    return float(np.sqrt(max(0.0, 2 * (1 - np.trace(r @ r).real))))


def oracle_xstate(rho):
    r = np.asarray(rho)
    return 2 * max(0.0, abs(r[0, 3]) - np.sqrt(abs(r[1, 1] * r[2, 2])),
                   abs(r[1, 2]) - np.sqrt(abs(r[0, 0] * r[3, 3])))


def compressed_wootters(chi_amps, rho):
    """Exact concurrence of an N1 x 2 state whose first factor lives on the
    two-dimensional support of ``chi``: squeeze it onto a qubit, then Wootters."""
    u, _, _ = np.linalg.svd(np.asarray(chi_amps))
    big = np.kron(u[:, :2], np.eye(2))
    return oracle_wootters(big.conj().T @ rho @ big)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
