"""Kraus channels, the built-in noise models, and one/two-sided application.

All time dependence enters through the dimensionless product gamma*t.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import dagger, eigh_hermitian, haar_unitary, kron
from .states import DensityMatrix, _join, _require, load_json, max_entangled

COMPLETENESS_TOL = 1e-10
MIN_PROBABILITY = 1e-14


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """rho -> sum_i K_i rho K_i^dag. ``trace_preserving`` False marks a
    post-selected (filtering) map that is renormalized when applied."""

    ops: tuple[np.ndarray, ...]
    trace_preserving: bool = True

    @property
    def dim_in(self) -> int:
        return self.ops[0].shape[1]

    @property
    def dim_out(self) -> int:
        return self.ops[0].shape[0]

    @property
    def n_kraus(self) -> int:
        return len(self.ops)

    def completeness(self) -> np.ndarray:
        """sum_i K_i^dag K_i."""
        return sum(dagger(k) @ k for k in self.ops)

    def tp_residual(self) -> float:
        return float(np.max(np.abs(self.completeness() - np.eye(self.dim_in))))

    def act(self, rho) -> np.ndarray:
        """Unnormalized action on a single-system operator (or stack)."""
        rho = np.asarray(rho)
        return sum(k @ rho @ dagger(k) for k in self.ops)

    def then(self, other: "KrausChannel") -> "KrausChannel":
        """Composition ``other`` after ``self``: Kraus ops L_j K_i."""
        ops = [l @ k for l in other.ops for k in self.ops]
        return KrausChannel(tuple(ops), self.trace_preserving and other.trace_preserving)


def make_channel(ops, expect_tp: bool = True) -> KrausChannel:
    ops = [np.array(k, dtype=np.complex128) for k in ops]
    if not ops:
        raise ValueError("a channel needs at least one Kraus operator")
    shape = ops[0].shape
    if len(shape) != 2 or any(k.shape != shape for k in ops):
        raise ValueError("Kraus operators must be matrices of one common shape")
    for k in ops:
        k.setflags(write=False)
    ch = KrausChannel(tuple(ops), expect_tp)
    s = ch.completeness()
    eye = np.eye(shape[1])
    if expect_tp:
        if np.max(np.abs(s - eye)) > COMPLETENESS_TOL:
            raise ValueError(f"Kraus operators are not trace preserving "
                             f"(|sum K^dag K - I| = {np.max(np.abs(s - eye)):.3e})")
    else:
        w, _ = eigh_hermitian(eye - s)
        if w[0] < -COMPLETENESS_TOL:
            raise ValueError("sum K^dag K exceeds the identity; not a valid filter")
    return ch


def identity_channel(d: int = 2) -> KrausChannel:
    return make_channel([np.eye(d)])


def _nu_omega(gamma_t: float) -> tuple[float, float]:
    if gamma_t < 0:
        raise ValueError("gamma_t must be >= 0")
    nu = float(np.exp(-gamma_t))
    # -expm1(-2x) keeps omega accurate for small gamma_t
    return nu, float(np.sqrt(-np.expm1(-2.0 * gamma_t)))


def phase_noise(gamma_t: float) -> KrausChannel:
    nu, omega = _nu_omega(gamma_t)
    return make_channel([[[nu, 0], [0, 1]], [[omega, 0], [0, 0]]])


def generalized_amplitude_damping(gamma_t: float, p: float = 0.5) -> KrausChannel:
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    nu, omega = _nu_omega(gamma_t)
    a, b = np.sqrt(p), np.sqrt(1.0 - p)
    return make_channel([
        a * np.array([[1, 0], [0, nu]]),
        a * np.array([[0, omega], [0, 0]]),
        b * np.array([[nu, 0], [0, 1]]),
        b * np.array([[0, 0], [omega, 0]]),
    ])


def relaxation_filter(gamma1_t: float, gamma2_t: float) -> KrausChannel:
    """Single-Kraus qutrit filter diag(exp(-gamma2_t), exp(-gamma1_t), 1)."""
    if not gamma2_t >= gamma1_t >= 0:
        raise ValueError("relaxation requires gamma2_t >= gamma1_t >= 0")
    m = np.diag([np.exp(-gamma2_t), np.exp(-gamma1_t), 1.0])
    return make_channel([m], expect_tp=False)


def random_channel(d: int, n_kraus: int, seed) -> KrausChannel:
    """Trace-preserving channel from a Haar isometry C^d -> C^(d n_kraus)."""
    if n_kraus < 1:
        raise ValueError("n_kraus must be >= 1")
    iso = haar_unitary(d * n_kraus, seed)[:, :d]
    return make_channel([iso[i * d:(i + 1) * d] for i in range(n_kraus)])


def _unit_columns(rng, n_kraus: int, n_cols: int) -> np.ndarray:
    z = rng.standard_normal((n_kraus, n_cols)) + 1j * rng.standard_normal((n_kraus, n_cols))
    return z / np.linalg.norm(z, axis=0)


def random_diagonal_channel(n_kraus: int, seed) -> KrausChannel:
    """Qubit channel whose Kraus operators are all diagonal."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    z = _unit_columns(rng, n_kraus, 2)
    return make_channel([np.diag(row) for row in z])


def random_antidiagonal_channel(n_kraus: int, seed) -> KrausChannel:
    """Qubit channel whose Kraus operators are all strictly off-diagonal."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    z = _unit_columns(rng, n_kraus, 2)
    return make_channel([np.array([[0, x], [y, 0]]) for x, y in z])


def _apply_ops(mat: np.ndarray, lifted) -> np.ndarray:
    return sum(k @ mat @ dagger(k) for k in lifted)


def _finish(out, dims, tp, return_probability):
    prob = float(np.trace(out).real)
    if not tp:
        if prob < MIN_PROBABILITY:
            raise ValueError(f"post-selection probability {prob:.3e} is zero")
        out = out / prob
    rho = DensityMatrix(0.5 * (out + dagger(out)), dims, check=False)
    return (rho, prob) if return_probability else rho


def apply_one_sided(rho: DensityMatrix, ch: KrausChannel, side: int = 2,
                    return_probability: bool = False):
    """(I (x) $) rho for ``side=2`` or ($ (x) I) rho for ``side=1``.

    Non-trace-preserving channels are renormalized by the success probability,
    which is returned alongside when ``return_probability`` is set.
    """
    dims = rho.dims
    if ch.dim_in != dims[side - 1]:
        raise ValueError(f"channel acts on dimension {ch.dim_in}, subsystem {side} has {dims[side - 1]}")
    new_dims = (ch.dim_out, dims[1]) if side == 1 else (dims[0], ch.dim_out)
    lifted = [kron(k, np.eye(dims[1])) if side == 1 else kron(np.eye(dims[0]), k) for k in ch.ops]
    out = _apply_ops(rho.mat, lifted)
    return _finish(out, new_dims, ch.trace_preserving, return_probability)


def apply_two_sided(rho: DensityMatrix, ch1: KrausChannel, ch2: KrausChannel,
                    return_probability: bool = False):
    dims = rho.dims
    if (ch1.dim_in, ch2.dim_in) != dims:
        raise ValueError(f"channels act on ({ch1.dim_in}, {ch2.dim_in}), state has dims {dims}")
    lifted = [kron(k, l) for k in ch1.ops for l in ch2.ops]
    out = _apply_ops(rho.mat, lifted)
    tp = ch1.trace_preserving and ch2.trace_preserving
    return _finish(out, (ch1.dim_out, ch2.dim_out), tp, return_probability)


def channel_image(ch: KrausChannel, return_probability: bool = False):
    """rho_$ = (I (x) $)|phi><phi| on C^N (x) C^N with N = ch.dim_in."""
    if ch.dim_in < 2:
        raise ValueError("channel image needs input dimension >= 2")
    return apply_one_sided(max_entangled(ch.dim_in).density(), ch, 2, return_probability)


def apply_kraus_batch(mats: np.ndarray, ops, dims: tuple[int, ...], position: int) -> np.ndarray:
    """Apply a Kraus set on tensor factor ``position`` (0-based) of a stack of
    multipartite operators. No renormalization; used by grid scans."""
    mats = np.asarray(mats, dtype=np.complex128)
    left = int(np.prod(dims[:position]))
    right = int(np.prod(dims[position + 1:]))
    out = np.zeros_like(mats)
    for k in ops:
        big = kron(kron(np.eye(left), k), np.eye(right))
        out = out + big @ mats @ dagger(big)
    return out


# --- JSON form ------------------------------------------------------------

def channel_to_dict(ch: KrausChannel) -> dict:
    return {
        "dim_in": ch.dim_in,
        "dim_out": ch.dim_out,
        "trace_preserving": bool(ch.trace_preserving),
        "kraus": [{"re": k.real.tolist(), "im": k.imag.tolist()} for k in ch.ops],
    }


def channel_from_dict(d: dict) -> KrausChannel:
    _require(d, ("dim_in", "dim_out", "trace_preserving", "kraus"), "channel")
    if not isinstance(d["kraus"], list) or not d["kraus"]:
        raise ValueError("channel: 'kraus' must be a non-empty list")
    ops = []
    for i, entry in enumerate(d["kraus"]):
        _require(entry, ("re", "im"), f"channel kraus[{i}]")
        k = _join(entry["re"], entry["im"], f"channel kraus[{i}]")
        if k.shape != (d["dim_out"], d["dim_in"]):
            raise ValueError(f"channel kraus[{i}]: shape {k.shape} != (dim_out, dim_in) "
                             f"= ({d['dim_out']}, {d['dim_in']})")
        ops.append(k)
    if not isinstance(d["trace_preserving"], bool):
        raise ValueError("channel: 'trace_preserving' must be a boolean")
    return make_channel(ops, expect_tp=d["trace_preserving"])


def load_channel(path) -> KrausChannel:
    return channel_from_dict(load_json(path))


def random_weak_channel(d: int, n_kraus: int, seed) -> KrausChannel:
    """Haar unitary with probability 1 - q, otherwise a Haar channel with
    n_kraus - 1 Kraus operators; q is uniform in [0, 1]. Keeps a good share of
    random cases away from entanglement-breaking channels."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    u = haar_unitary(d, rng)
    if n_kraus == 1:
        return make_channel([u])
    q = rng.uniform()
    rest = random_channel(d, n_kraus - 1, rng)
    return make_channel([np.sqrt(1 - q) * u] + [np.sqrt(q) * k for k in rest.ops])
