"""Bipartite pure and mixed states, the maximally entangled state, and the
filtering-operator form of a pure state.

Index convention: documentation labels basis kets 1..N as in |k>, while
storage is 0-based, so documented index k lives at array position k - 1.
A pure state's amplitude matrix has ``amps[i, j]`` = coefficient of |i j>,
and its ket is ``amps.reshape(-1)`` (row-major, first subsystem slowest).
Subsystem ids are 1 (first factor) and 2 (second factor).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .numerics import dagger, eigh_hermitian, kron, partial_trace

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-10
RECONSTRUCTION_TOL = 1e-9


def _frozen(a, dtype=np.complex128) -> np.ndarray:
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized bipartite pure state stored as its N1 x N2 amplitude matrix."""

    amps: np.ndarray

    def __post_init__(self):
        a = _frozen(self.amps)
        if a.ndim != 2:
            raise ValueError(f"amplitude matrix must be 2-D, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("amplitudes must be finite")
        norm2 = float(np.sum(np.abs(a) ** 2))
        if abs(norm2 - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized (|A|^2 = {norm2:.15g})")
        object.__setattr__(self, "amps", a)

    @property
    def dims(self) -> tuple[int, int]:
        return self.amps.shape

    @property
    def vector(self) -> np.ndarray:
        return self.amps.reshape(-1)

    def density(self) -> "DensityMatrix":
        v = self.vector
        return DensityMatrix(np.outer(v, v.conj()), self.dims)

    def fidelity(self, other: "PureState") -> float:
        return float(abs(np.vdot(self.vector, other.vector)) ** 2)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, positive semidefinite, unit-trace operator on C^N1 (x) C^N2."""

    mat: np.ndarray
    dims: tuple[int, int]
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        m = _frozen(self.mat)
        dims = tuple(int(d) for d in self.dims)
        if len(dims) != 2 or min(dims) < 1:
            raise ValueError(f"dims must be a pair of positive ints, got {self.dims}")
        d = dims[0] * dims[1]
        if m.shape != (d, d):
            raise ValueError(f"matrix shape {m.shape} does not match dims {dims}")
        object.__setattr__(self, "mat", m)
        object.__setattr__(self, "dims", dims)
        if self.check:
            if not np.all(np.isfinite(m)):
                raise ValueError("density matrix has non-finite entries")
            if np.max(np.abs(m - dagger(m))) > HERMITIAN_TOL:
                raise ValueError("density matrix is not Hermitian")
            tr = np.trace(m).real
            if abs(tr - 1.0) > TRACE_TOL:
                raise ValueError(f"density matrix trace is {tr:.15g}, expected 1")
            w, _ = eigh_hermitian(m)
            if w[0] < -PSD_TOL:
                raise ValueError(f"density matrix has negative eigenvalue {w[0]:.3e}")

    def purity(self) -> float:
        return float(np.real(np.trace(self.mat @ self.mat)))


@dataclass(frozen=True, eq=False)
class FilterOperator:
    """Local operator M with |chi> = (M (x) I)|phi_{N2}>."""

    mat: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mat", _frozen(self.mat))


@dataclass(frozen=True, eq=False)
class Decomposition:
    """Convex combination of pure states, sum_i p_i |psi_i><psi_i|.

    ``dropped`` lists indices of branches that were removed because they
    carried no probability (e.g. annihilated by a filter).
    """

    weights: np.ndarray
    states: tuple[PureState, ...]
    dropped: tuple[int, ...] = ()

    def __post_init__(self):
        w = _frozen(self.weights, dtype=float)
        states = tuple(self.states)
        if w.ndim != 1 or len(w) != len(states) or not states:
            raise ValueError("need one weight per state and at least one state")
        if np.any(w < -1e-15):
            raise ValueError("weights must be nonnegative")
        if abs(w.sum() - 1.0) > 1e-10:
            raise ValueError(f"weights sum to {w.sum():.15g}, expected 1")
        if len({s.dims for s in states}) != 1:
            raise ValueError("all states in a decomposition must share dims")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "states", states)

    @property
    def dims(self) -> tuple[int, int]:
        return self.states[0].dims

    def matrix(self) -> np.ndarray:
        vecs = np.array([s.vector for s in self.states])
        return (vecs.T * self.weights) @ vecs.conj()

    def density(self) -> DensityMatrix:
        return DensityMatrix(self.matrix(), self.dims)

    def reconstructs(self, rho: DensityMatrix, tol: float = RECONSTRUCTION_TOL) -> bool:
        return rho.dims == self.dims and float(np.max(np.abs(self.matrix() - rho.mat))) <= tol


def pure_from_amplitudes(dims: tuple[int, int], raw, normalize: bool = True) -> PureState:
    raw = np.asarray(raw, dtype=np.complex128)
    dims = tuple(int(d) for d in dims)
    if raw.shape != dims:
        if raw.ndim == 1 and raw.size == dims[0] * dims[1]:
            raw = raw.reshape(dims)
        else:
            raise ValueError(f"amplitudes of shape {raw.shape} do not match dims {dims}")
    if normalize:
        norm = np.sqrt(np.sum(np.abs(raw) ** 2))
        if norm <= 1e-12:
            raise ValueError("cannot normalize a zero vector")
        raw = raw / norm
    return PureState(raw)


def max_entangled(n: int) -> PureState:
    """|phi> = sum_n |n n> / sqrt(N)."""
    if n < 2:
        raise ValueError("maximally entangled state needs N >= 2")
    return PureState(np.eye(n) / np.sqrt(n))


def filter_operator(chi: PureState) -> FilterOperator:
    return FilterOperator(np.sqrt(chi.dims[1]) * chi.amps)


def apply_filter(m: FilterOperator, state) -> np.ndarray:
    """Unnormalized amplitudes of (M (x) I)|state>, as an amplitude matrix."""
    amps = state.amps if isinstance(state, PureState) else np.asarray(state)
    return m.mat @ amps


def reduced_density(state, keep: int) -> np.ndarray:
    if isinstance(state, PureState):
        a = state.amps
        return a @ a.conj().T if keep == 1 else (a.T @ a.conj())
    if isinstance(state, DensityMatrix):
        return partial_trace(state.mat, state.dims, keep)
    raise TypeError(f"expected PureState or DensityMatrix, got {type(state).__name__}")


def schmidt_coefficients(chi: PureState) -> np.ndarray:
    return np.linalg.svd(chi.amps, compute_uv=False)


def product_state(a, b) -> PureState:
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    return pure_from_amplitudes((a.size, b.size), np.outer(a, b))


def top_eigenstate(rho: DensityMatrix) -> PureState:
    """Dominant eigenvector of ``rho`` as a pure state (phase is arbitrary)."""
    w, v = eigh_hermitian(rho.mat)
    vec = v[:, -1]
    return pure_from_amplitudes(rho.dims, vec.reshape(rho.dims))


def random_pure(dims: tuple[int, int], seed) -> PureState:
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    z = rng.standard_normal(dims) + 1j * rng.standard_normal(dims)
    return pure_from_amplitudes(dims, z)


def random_density(dims: tuple[int, int], seed, rank: int | None = None) -> DensityMatrix:
    """Random mixed state G G^dag / Tr from a complex Ginibre matrix of the given rank."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    d = dims[0] * dims[1]
    k = d if rank is None else rank
    g = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    m = g @ g.conj().T
    m = 0.5 * (m + m.conj().T)
    return DensityMatrix(m / np.trace(m).real, dims)


def density_from_product(rho_a, rho_b) -> DensityMatrix:
    rho_a = np.asarray(rho_a)
    rho_b = np.asarray(rho_b)
    return DensityMatrix(kron(rho_a, rho_b), (rho_a.shape[0], rho_b.shape[0]))


# --- JSON forms -----------------------------------------------------------

def _split(m) -> tuple[list, list]:
    m = np.asarray(m)
    return m.real.tolist(), m.imag.tolist()


def _join(re, im, what: str) -> np.ndarray:
    try:
        re = np.asarray(re, dtype=float)
        im = np.asarray(im, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"{what}: entries must be numeric ({exc})") from None
    if re.shape != im.shape:
        raise ValueError(f"{what}: real/imag shapes differ ({re.shape} vs {im.shape})")
    return re + 1j * im


def _require(d, keys, what):
    if not isinstance(d, dict):
        raise ValueError(f"{what}: expected a JSON object")
    missing = [k for k in keys if k not in d]
    if missing:
        raise ValueError(f"{what}: missing field(s) {', '.join(missing)}")


def state_to_dict(state: PureState) -> dict:
    re, im = _split(state.amps)
    return {"dims": list(state.dims), "amps_re": re, "amps_im": im}


def state_from_dict(d: dict, normalize: bool = False) -> PureState:
    _require(d, ("dims", "amps_re", "amps_im"), "state")
    amps = _join(d["amps_re"], d["amps_im"], "state")
    return pure_from_amplitudes(tuple(d["dims"]), amps, normalize=normalize)


def density_to_dict(rho: DensityMatrix) -> dict:
    re, im = _split(rho.mat)
    return {"dims": list(rho.dims), "mat_re": re, "mat_im": im}


def density_from_dict(d: dict) -> DensityMatrix:
    _require(d, ("dims", "mat_re", "mat_im"), "density")
    return DensityMatrix(_join(d["mat_re"], d["mat_im"], "density"), tuple(d["dims"]))


def decomposition_to_dict(dec: Decomposition) -> dict:
    return {"weights": dec.weights.tolist(), "states": [state_to_dict(s) for s in dec.states]}


def decomposition_from_dict(d: dict) -> Decomposition:
    _require(d, ("weights", "states"), "decomposition")
    return Decomposition(np.asarray(d["weights"], dtype=float),
                         tuple(state_from_dict(s) for s in d["states"]))


def load_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: invalid JSON ({exc})") from None
    except OSError as exc:
        raise ValueError(f"{path}: cannot read file ({exc.strerror})") from None


def load_state(path) -> PureState | DensityMatrix:
    """Read a pure state (``amps_*`` fields) or a density matrix (``mat_*``)."""
    d = load_json(path)
    if isinstance(d, dict) and "mat_re" in d:
        return density_from_dict(d)
    return state_from_dict(d, normalize=False)
