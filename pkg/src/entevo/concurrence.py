"""Concurrence matrices, I-concurrence, Wootters concurrence and a convex-roof
estimator for mixed states of arbitrary dimension.

Generators are indexed by pairs (k, l), 1 <= k < l <= N, in lexicographic
order; storage uses k - 1 and l - 1. Since k + l and (k - 1) + (l - 1) have
the same parity, the sign factors can be computed from either.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

from .numerics import dagger, eigh_hermitian, haar_unitary, kron, sqrt_psd
from .states import Decomposition, DensityMatrix, PureState, pure_from_amplitudes

_SIGMA_Y = np.array([[0, -1j], [1j, 0]])
_YY = np.kron(_SIGMA_Y, _SIGMA_Y)
RANK_CUTOFF = 1e-12
WOOTTERS_FLOOR = 1e-14


@dataclass(frozen=True)
class GeneratorSet:
    dim: int
    pairs: tuple[tuple[int, int], ...]  # 1-based (k, l)
    generators: np.ndarray  # (count, dim, dim), real antisymmetric

    def index_of(self, k: int, l: int) -> int:
        return self.pairs.index((k, l))


@dataclass(frozen=True, eq=False)
class ConcurrenceMatrix:
    mat: np.ndarray
    dims: tuple[int, int]

    def norm(self) -> float:
        return float(np.linalg.norm(self.mat))

    @property
    def row_pairs(self):
        return _pairs(self.dims[0])

    @property
    def col_pairs(self):
        return _pairs(self.dims[1])


@lru_cache(maxsize=None)
def _pairs(n: int) -> tuple[tuple[int, int], ...]:
    return tuple((k + 1, l + 1) for k, l in combinations(range(n), 2))


@lru_cache(maxsize=None)
def _pair_arrays(n: int):
    pairs = _pairs(n)
    k = np.array([p[0] - 1 for p in pairs], dtype=int)
    l = np.array([p[1] - 1 for p in pairs], dtype=int)
    sign = np.where((k + l) % 2 == 0, 1.0, -1.0)
    return k, l, sign


def so_generators(n: int) -> GeneratorSet:
    """L_(kl) = (-1)^(k+l+1) |k><l| + (-1)^(k+l) |l><k| for k < l."""
    if n < 2:
        raise ValueError("SO(N) generators need N >= 2")
    pairs = _pairs(n)
    gens = np.zeros((len(pairs), n, n))
    for a, (k, l) in enumerate(pairs):
        gens[a, k - 1, l - 1] = (-1) ** (k + l + 1)
        gens[a, l - 1, k - 1] = (-1) ** (k + l)
    gens.setflags(write=False)
    return GeneratorSet(n, pairs, gens)


def bilinear(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Symmetric bilinear form B(X, Y) on amplitude matrices (leading axes
    broadcast) with B(X, X) equal to the conjugate of X's concurrence matrix."""
    n1, n2 = x.shape[-2:]
    k, l, s1 = _pair_arrays(n1)
    kp, lp, s2 = _pair_arrays(n2)
    K, KP = k[:, None], kp[None, :]
    L, LP = l[:, None], lp[None, :]
    val = (x[..., K, KP] * y[..., L, LP] + y[..., K, KP] * x[..., L, LP]
           - x[..., K, LP] * y[..., L, KP] - y[..., K, LP] * x[..., L, KP])
    return val * np.outer(s1, s2)


def concurrence_matrix(chi: PureState) -> ConcurrenceMatrix:
    """C_(kl),(k'l') = 2 (-1)^(k+l+k'+l') (A_kk' A_ll' - A_kl' A_lk')^*."""
    a = chi.amps
    return ConcurrenceMatrix(np.conj(bilinear(a, a)), chi.dims)


def concurrence_matrix_via_generators(chi: PureState) -> ConcurrenceMatrix:
    """Same matrix from the overlaps <chi|(L_a (x) L_b)|chi*>."""
    n1, n2 = chi.dims
    g1 = so_generators(n1).generators
    g2 = so_generators(n2).generators
    v = chi.vector
    out = np.empty((len(g1), len(g2)), dtype=np.complex128)
    for a, la in enumerate(g1):
        for b, lb in enumerate(g2):
            out[a, b] = np.vdot(v, kron(la, lb) @ v.conj())
    return ConcurrenceMatrix(out, chi.dims)


def iconcurrence_pure(chi: PureState) -> float:
    return concurrence_matrix(chi).norm()


def _iconcurrence_unnormalized(amps: np.ndarray) -> np.ndarray:
    b = bilinear(amps, amps)
    return np.sqrt(np.sum(np.abs(b) ** 2, axis=(-1, -2)))


def _qubit_pair_stack(rho) -> tuple[np.ndarray, bool]:
    if isinstance(rho, DensityMatrix):
        if rho.dims != (2, 2):
            raise ValueError(f"Wootters concurrence needs a 2x2 system, got dims {rho.dims}")
        return rho.mat, True
    mats = np.asarray(rho, dtype=np.complex128)
    if mats.shape[-2:] != (4, 4):
        raise ValueError(f"Wootters concurrence needs 4x4 matrices, got {mats.shape}")
    return mats, mats.ndim == 2


def wootters_lambdas(rho) -> np.ndarray:
    """Square roots of the eigenvalues of rho (sy x sy) rho^* (sy x sy), descending.

    They are the singular values of T = sqrt(rho) (sy x sy) sqrt(rho)^*, read
    off as the positive half of the spectrum of the Hermitian dilation
    [[0, T], [T^dag, 0]] so that vanishing values stay at machine precision.
    """
    mats, _ = _qubit_pair_stack(rho)
    tr = np.real(np.trace(mats, axis1=-2, axis2=-1))
    floor = WOOTTERS_FLOOR * np.max(np.abs(tr)) if mats.size else 0.0
    s = sqrt_psd(mats, floor=floor)
    t = s @ _YY @ np.conj(s)
    dil = np.zeros(mats.shape[:-2] + (8, 8), dtype=np.complex128)
    dil[..., :4, 4:] = t
    dil[..., 4:, :4] = dagger(t)
    w, _ = eigh_hermitian(dil)
    return np.clip(w[..., :3:-1], 0.0, None)


def wootters_raw(rho):
    """lambda_1 - lambda_2 - lambda_3 - lambda_4 before clamping at zero."""
    lam = wootters_lambdas(rho)
    raw = lam[..., 0] - lam[..., 1] - lam[..., 2] - lam[..., 3]
    return float(raw) if np.ndim(raw) == 0 else raw


def wootters_concurrence(rho):
    """max(0, lambda_1 - lambda_2 - lambda_3 - lambda_4) for a two-qubit state
    or a stack of 4x4 density matrices."""
    raw = wootters_raw(rho)
    return max(0.0, raw) if isinstance(raw, float) else np.maximum(raw, 0.0)


# --- convex roof ----------------------------------------------------------

@dataclass(frozen=True)
class RoofBudget:
    """Search budget for :func:`convex_roof_estimate`.

    ``m=None`` picks max(rank, min(rank^2, 8)) decomposition terms. ``iters``
    caps the conjugate-gradient iterations per restart and ``sweeps`` the
    two-row (Givens) polishing sweeps that follow.
    """

    m: int | None = None
    restarts: int = 32
    iters: int = 200
    sweeps: int = 3
    seed: int = 0
    tol: float = 1e-12
    zoom_levels: int = 16


def _objective(b: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(np.abs(b) ** 2, axis=(-1, -2)))


_GRID = 16
_THETA0 = -np.pi / 2 + np.pi * np.arange(_GRID) / _GRID
_PHI0 = np.pi * np.arange(_GRID) / _GRID
_ZOOM = np.array([-1.0, -0.5, 0.0, 0.5, 1.0])


def _pair_cost(bii, bij, bjj, theta, phi):
    """Sum of the two row concurrences after mixing rows i, j with
    [[c, -s e^{i phi}], [s e^{-i phi}, c]]. theta/phi: (R, G)."""
    c = np.cos(theta)[..., None, None]
    s = np.sin(theta)[..., None, None]
    e = np.exp(1j * phi)[..., None, None]
    bii, bij, bjj = bii[:, None], bij[:, None], bjj[:, None]
    new_i = c * c * bii - 2 * c * s * e * bij + s * s * e * e * bjj
    new_j = s * s * np.conj(e * e) * bii + 2 * c * s * np.conj(e) * bij + c * c * bjj
    return _objective(new_i) + _objective(new_j)


def _best_pair_rotation(psi, i, j, zoom_levels):
    """Per restart, search (theta, phi) minimizing the i/j contribution."""
    xi, xj = psi[:, i], psi[:, j]
    bii, bij, bjj = bilinear(xi, xi), bilinear(xi, xj), bilinear(xj, xj)
    r = psi.shape[0]
    th, ph = np.meshgrid(_THETA0, _PHI0, indexing="ij")
    th = np.broadcast_to(th.ravel(), (r, th.size))
    ph = np.broadcast_to(ph.ravel(), (r, ph.size))
    cost = _pair_cost(bii, bij, bjj, th, ph)
    k = np.argmin(cost, axis=1)
    rows = np.arange(r)
    bt, bp, best = th[rows, k], ph[rows, k], cost[rows, k]
    step = np.pi / _GRID
    dt, dp = np.meshgrid(_ZOOM, _ZOOM, indexing="ij")
    dt, dp = dt.ravel(), dp.ravel()
    for _ in range(zoom_levels):
        th = bt[:, None] + step * dt[None, :]
        ph = bp[:, None] + step * dp[None, :]
        cost = _pair_cost(bii, bij, bjj, th, ph)
        k = np.argmin(cost, axis=1)
        bt, bp, best = th[rows, k], ph[rows, k], cost[rows, k]
        step *= 0.5
    base = _objective(bii) + _objective(bjj)
    return bt, bp, best, base


def _rotate_rows(psi, i, j, theta, phi, mask):
    c = np.cos(theta)[:, None, None]
    s = np.sin(theta)[:, None, None]
    e = np.exp(1j * phi)[:, None, None]
    xi, xj = psi[:, i].copy(), psi[:, j].copy()
    new_i = c * xi - s * e * xj
    new_j = s * np.conj(e) * xi + c * xj
    psi[mask, i] = new_i[mask]
    psi[mask, j] = new_j[mask]


def _stiefel_project(v, x):
    """Tangent projection X - V herm(V^H X) at isometries V (batched)."""
    vh_x = dagger(v) @ x
    return x - v @ (0.5 * (vh_x + dagger(vh_x)))


def _retract(y):
    q, r = np.linalg.qr(y)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    return q * np.where(np.abs(d) > 0, d / np.where(d == 0, 1, np.abs(d)), 1.0)[..., None, :]


def _roof_value(v, base):
    psi = np.einsum("Rmk,kab->Rmab", v, base)
    b = bilinear(psi, psi)
    per_row = _objective(b)
    return per_row.sum(axis=-1), psi, b, per_row


def _roof_gradient(v, base):
    total, psi, b, per_row = _roof_value(v, base)
    mix = bilinear(base[None, None, :], psi[:, :, None])
    live = per_row > 1e-300
    scale = np.where(live, 1.0 / np.where(live, per_row, 1.0), 0.0)
    egrad = 2.0 * np.einsum("Rmab,Rmkab->Rmk", b, np.conj(mix)) * scale[..., None]
    return total, _stiefel_project(v, egrad)


def _real_inner(a, b):
    return np.real(np.sum(np.conj(a) * b, axis=(-1, -2)))


def _conjugate_gradient(v, base, iters, tol):
    """Polak-Ribiere+ CG on the Stiefel manifold with Armijo backtracking,
    vectorized over restarts (each restart keeps its own step size)."""
    total, g = _roof_gradient(v, base)
    d = -g
    step = np.full(len(v), 0.1)
    for _ in range(iters):
        slope = _real_inner(g, d)
        reset = slope >= 0
        d[reset] = -g[reset]
        slope = _real_inner(g, d)
        trial_step = 2.0 * step
        accepted = np.zeros(len(v), dtype=bool)
        v_new, total_new = v.copy(), total.copy()
        for _ in range(40):
            trial = _retract(v + trial_step[:, None, None] * d)
            f = _roof_value(trial, base)[0]
            ok = ~accepted & (f <= total + 1e-4 * trial_step * slope)
            v_new[ok], total_new[ok] = trial[ok], f[ok]
            accepted |= ok
            if accepted.all():
                break
            trial_step = np.where(accepted, trial_step, 0.5 * trial_step)
        step = np.where(accepted, trial_step, 0.5 * step)
        decrease = total - total_new
        total_new, g_new = _roof_gradient(v_new, base)
        d_old = _stiefel_project(v_new, d)
        g_old = _stiefel_project(v_new, g)
        beta = np.maximum(0.0, _real_inner(g_new, g_new - g_old)
                          / np.maximum(_real_inner(g, g), 1e-300))
        d = -g_new + beta[:, None, None] * d_old
        v, total, g = v_new, total_new, g_new
        if np.all(decrease < tol):
            break
    return v


def _roof_terms(rank: int, budget: RoofBudget) -> int:
    if budget.m is not None:
        if budget.m < rank:
            raise ValueError(f"decomposition size m={budget.m} is below rank {rank}")
        return budget.m
    return max(rank, min(rank * rank, 8))


def convex_roof_estimate(rho: DensityMatrix, budget: RoofBudget | None = None
                         ) -> tuple[float, Decomposition]:
    """Upper estimate of min sum_i p_i C[psi_i] over decompositions of ``rho``.

    Decompositions are parametrized as psi~_i = sum_k W*_ik sqrt(lambda_k) e_k
    with W an m x r isometry, so every W yields an exact decomposition and the
    returned value can only overshoot the true roof. Each restart starts from
    a Haar isometry (seeded by ``(seed, restart)``), descends by conjugate
    gradient and is then polished by sweeps of two-row unitary mixings.

    Returns
    -------
    value : float
        Average I-concurrence of the best decomposition found.
    witness : Decomposition
        That decomposition; it reconstructs ``rho`` to 1e-9.
    """
    budget = budget or RoofBudget()
    n1, n2 = rho.dims
    w, v = eigh_hermitian(rho.mat)
    keep = w > RANK_CUTOFF
    lam, vecs = w[keep], v[:, keep]
    rank = int(keep.sum())
    if rank == 0:
        raise ValueError("density matrix has no support above the rank cutoff")
    m = _roof_terms(rank, budget)
    base = (vecs * np.sqrt(lam)).T.reshape(rank, n1, n2)

    restarts = budget.restarts if rank > 1 else 1
    ws = np.array([haar_unitary(m, np.random.default_rng([budget.seed, r]))[:, :rank]
                   for r in range(restarts)])
    iso = np.conj(ws)
    if rank > 1:
        iso = _conjugate_gradient(iso, base, budget.iters, budget.tol)
    psi = np.einsum("Rmk,kab->Rmab", iso, base)

    if rank > 1 and budget.sweeps:
        pairs = list(combinations(range(m), 2))
        active = np.ones(restarts, dtype=bool)
        total = _objective(bilinear(psi, psi)).sum(axis=1)
        for _ in range(budget.sweeps):
            before = total
            for i, j in pairs:
                th, ph, best, cur = _best_pair_rotation(psi, i, j, budget.zoom_levels)
                better = active & (best < cur)
                if np.any(better):
                    _rotate_rows(psi, i, j, th, ph, better)
            total = _objective(bilinear(psi, psi)).sum(axis=1)
            active &= (before - total) > budget.tol
            if not np.any(active):
                break

    total = _objective(bilinear(psi, psi)).sum(axis=1)
    best = int(np.argmin(total))
    dec = _rows_to_decomposition(psi[best], rho.dims)
    if not dec.reconstructs(rho):
        raise RuntimeError("convex-roof search lost the reconstruction of rho")
    return average_concurrence(dec), dec


def _rows_to_decomposition(rows: np.ndarray, dims) -> Decomposition:
    probs = np.sum(np.abs(rows) ** 2, axis=(-1, -2))
    live = probs > 1e-300
    states = [pure_from_amplitudes(dims, rows[i]) for i in np.flatnonzero(live)]
    weights = probs[live] / probs[live].sum()
    dropped = tuple(int(i) for i in np.flatnonzero(~live))
    return Decomposition(weights, tuple(states), dropped)


def average_concurrence(dec: Decomposition) -> float:
    return float(sum(p * iconcurrence_pure(s) for p, s in zip(dec.weights, dec.states)))
