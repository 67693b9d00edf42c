"""Entanglement evolution under one-sided channels.

A pure state |chi> = (M_chi (x) I)|phi> evolves to
rho' = (M_chi (x) I) rho_$ (M_chi^dag (x) I) with rho_$ the channel image, so
every law here is phrased through rho_$:

* pure image: C[rho'] = (N2/2) C[chi] C[rho_$] as a matrix product;
* N1 x 2 systems: C[rho'] = C[chi] C[rho_$] for any channel;
* otherwise: upper bounds, also for mixed initial states.

Predictions refer to normalized evolved states. Post-selection
probabilities are divided out once, where prediction meets direct value.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import channels as chn
from .concurrence import (
    ConcurrenceMatrix,
    RoofBudget,
    concurrence_matrix,
    convex_roof_estimate,
    iconcurrence_pure,
    wootters_concurrence,
)
from .states import (
    Decomposition,
    DensityMatrix,
    PureState,
    filter_operator,
    max_entangled,
    pure_from_amplitudes,
    random_density,
    random_pure,
    top_eigenstate,
)

log = logging.getLogger(__name__)

EXACT_TOL = 1e-10
ROOF_LOWER = -1e-9
ROOF_UPPER = 5e-3
PURITY_TOL = 1e-10

METHODS = ("pure-exact", "wootters-exact", "roof-estimate")


@dataclass
class EvolutionReport:
    """Prediction vs direct value for one case.

    ``kind`` is ``"equality"`` for laws that pin the value and
    ``"upper-bound"`` for inequalities, where only ``gap <= tolerance``
    is required.
    """

    predicted: float
    direct: float
    method: str
    gap: float
    tolerance: float
    passed: bool
    kind: str = "equality"
    seed: int | None = None
    dims: tuple[int, int] = ()
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "predicted": self.predicted,
            "direct": self.direct,
            "method": self.method,
            "gap": self.gap,
            "pass": self.passed,
            "seed": self.seed,
            "dims": list(self.dims),
        }
        if self.kind != "equality":
            out["kind"] = self.kind
        out.update(self.extras)
        return out


def make_report(predicted, direct, method, *, kind="equality", tol=None, seed=None,
                dims=(), extras=None) -> EvolutionReport:
    if method not in METHODS:
        raise ValueError(f"unknown direct method {method!r}")
    predicted, direct = float(predicted), float(direct)
    gap = direct - predicted
    if kind == "upper-bound":
        tol = EXACT_TOL if tol is None else tol
        passed = gap <= tol
    elif method == "roof-estimate":
        tol = ROOF_UPPER if tol is None else tol
        passed = ROOF_LOWER <= gap <= tol
    else:
        tol = EXACT_TOL if tol is None else tol
        passed = abs(gap) <= tol
    return EvolutionReport(predicted, direct, method, gap, tol, bool(passed), kind, seed,
                           tuple(dims), dict(extras or {}))


# --- laws -----------------------------------------------------------------

def _image_state(image) -> PureState:
    if isinstance(image, PureState):
        return image
    if image.purity() < 1.0 - PURITY_TOL:
        raise ValueError(f"channel image is not pure (purity {image.purity():.12f})")
    return top_eigenstate(image)


def predict_matrix_pure_channel(chi: PureState, image) -> ConcurrenceMatrix:
    """(N2/2) C[chi] C[rho_$] for a pure channel image.

    The result is the concurrence matrix of the unnormalized filtered state
    (M_chi (x) I)|psi_$>; divide by :func:`filtered_norm2` for the normalized
    evolved state. A density-matrix ``image`` fixes |psi_$> only up to a global
    phase, which rotates the predicted matrix by a phase as well.
    """
    psi = _image_state(image)
    n1, n2 = chi.dims
    if psi.dims != (n2, n2):
        raise ValueError(f"image dims {psi.dims} do not match chi dims {chi.dims}")
    c_chi = concurrence_matrix(chi).mat
    c_img = concurrence_matrix(psi).mat
    return ConcurrenceMatrix(0.5 * n2 * c_chi @ c_img, (n1, n2))


def filtered_amplitudes(chi: PureState, image) -> np.ndarray:
    """Amplitudes B = sqrt(N2) A a of (M_chi (x) I)|psi_$>."""
    return filter_operator(chi).mat @ _image_state(image).amps


def filtered_norm2(chi: PureState, image) -> float:
    return float(np.sum(np.abs(filtered_amplitudes(chi, image)) ** 2))


def predict_pure_concurrence(chi: PureState, image) -> float:
    """Concurrence of the normalized evolved state when rho_$ is pure."""
    c = predict_matrix_pure_channel(chi, image)
    return c.norm() / filtered_norm2(chi, image)


def predict_factorized(c_initial: float, image: DensityMatrix) -> float:
    if image.dims != (2, 2):
        raise ValueError(f"factorization needs a 2x2 channel image, got {image.dims}")
    return float(c_initial) * wootters_concurrence(image)


def bound_pure_initial(chi: PureState, image: DensityMatrix, image_c: float) -> float:
    """(N2/2) C[chi] C[rho_$]; ``image_c`` is C[rho_$] (exact or an estimate)."""
    n2 = image.dims[1]
    return 0.5 * n2 * iconcurrence_pure(chi) * float(image_c)


def bound_mixed_initial(c0: float, image_c: float, n2: int) -> float:
    return 0.5 * n2 * float(c0) * float(image_c)


def induced_decomposition(chi: PureState, dec: Decomposition) -> Decomposition:
    """Push a decomposition of rho_$ through the filter M_chi.

    Branch i becomes (M_chi (x) I)|psi_i> normalized, with weight
    p_i |(M_chi (x) I) psi_i|^2 over the total success probability. Branches
    the filter annihilates are dropped and listed in ``dropped``.
    """
    n1, n2 = chi.dims
    if dec.dims != (n2, n2):
        raise ValueError(f"decomposition dims {dec.dims} do not match chi dims {chi.dims}")
    m = filter_operator(chi).mat
    raw = [m @ s.amps for s in dec.states]
    probs = np.array([p * np.sum(np.abs(b) ** 2) for p, b in zip(dec.weights, raw)])
    total = probs.sum()
    if total <= 0:
        raise ValueError("the filter annihilates every branch")
    live = probs > 1e-300 * max(total, 1.0)
    dropped = tuple(int(i) for i in np.flatnonzero(~live))
    if dropped:
        log.info("induced decomposition dropped %d annihilated branch(es)", len(dropped))
    states = tuple(pure_from_amplitudes((n1, n2), raw[i]) for i in np.flatnonzero(live))
    return Decomposition(probs[live] / total, states, dropped)


def success_probability(chi: PureState, dec: Decomposition) -> float:
    m = filter_operator(chi).mat
    return float(sum(p * np.sum(np.abs(m @ s.amps) ** 2) for p, s in zip(dec.weights, dec.states)))


# --- direct evaluation ----------------------------------------------------

def direct_concurrence(rho: DensityMatrix, budget: RoofBudget | None = None
                       ) -> tuple[float, str]:
    """Best available direct value: pure-exact > wootters-exact > roof-estimate."""
    if rho.purity() >= 1.0 - PURITY_TOL:
        return iconcurrence_pure(top_eigenstate(rho)), "pure-exact"
    if rho.dims == (2, 2):
        return wootters_concurrence(rho), "wootters-exact"
    value, _ = convex_roof_estimate(rho, budget)
    return value, "roof-estimate"


def verify_factorization(chi: PureState, ch: chn.KrausChannel, budget: RoofBudget | None = None,
                         seed: int | None = None) -> EvolutionReport:
    """Compare the one-sided law against a direct evaluation of rho'.

    Scope: N2 = 2 (any channel) or a pure channel image (any N2).
    """
    n1, n2 = chi.dims
    image = chn.channel_image(ch)
    image_pure = image.purity() >= 1.0 - PURITY_TOL
    if image_pure:
        predicted = predict_pure_concurrence(chi, image)
    elif n2 == 2:
        predicted = predict_factorized(iconcurrence_pure(chi), image)
    else:
        raise ValueError(f"no exact law for dims {chi.dims} with a mixed channel image")
    evolved = chn.apply_one_sided(chi.density(), ch, 2)
    direct, method = direct_concurrence(evolved, budget)
    return make_report(predicted, direct, method, seed=seed, dims=(n1, ch.dim_out))


def verify_theorem(chi: PureState, ch: chn.KrausChannel, seed: int | None = None) -> EvolutionReport:
    """Matrix-level check for a single-Kraus channel (pure image).

    The predicted matrix, divided by the filtered norm, must equal the
    concurrence matrix of the normalized state (I (x) K)|chi>.
    """
    if ch.n_kraus != 1:
        raise ValueError("matrix law needs a single-Kraus channel")
    k = ch.ops[0]
    n1, n2 = chi.dims
    psi_img = pure_from_amplitudes((n2, n2), max_entangled(n2).amps @ k.T)
    direct_state = pure_from_amplitudes((n1, k.shape[0]), chi.amps @ k.T)
    predicted = predict_matrix_pure_channel(chi, psi_img).mat / filtered_norm2(chi, psi_img)
    direct = concurrence_matrix(direct_state).mat
    residual = float(np.linalg.norm(direct - predicted))
    report = make_report(np.linalg.norm(predicted), np.linalg.norm(direct), "pure-exact",
                         seed=seed, dims=(n1, n2), extras={"matrix_residual": residual})
    report.passed = report.passed and residual <= EXACT_TOL
    return report


# --- two-sided channels ---------------------------------------------------

def is_diagonal_kraus(ch: chn.KrausChannel, tol: float = 1e-12) -> bool:
    """Every K_i diagonal, i.e. Tr(sx K_i) = Tr(sy K_i) = 0."""
    return ch.dim_in == ch.dim_out == 2 and all(
        abs(k[0, 1]) <= tol and abs(k[1, 0]) <= tol for k in ch.ops)


def is_antidiagonal_kraus(ch: chn.KrausChannel, tol: float = 1e-12) -> bool:
    """Every K_i strictly off-diagonal, i.e. Tr K_i = Tr(sz K_i) = 0."""
    return ch.dim_in == ch.dim_out == 2 and all(
        abs(k[0, 0]) <= tol and abs(k[1, 1]) <= tol for k in ch.ops)


SCHMIDT_VARIANTS = ("00+11", "01+10")


def schmidt_pair_state(a: complex, b: complex, variant: str) -> PureState:
    if variant not in SCHMIDT_VARIANTS:
        raise ValueError(f"variant must be one of {SCHMIDT_VARIANTS}")
    amps = np.zeros((2, 2), dtype=complex)
    if variant == "00+11":
        amps[0, 0], amps[1, 1] = a, b
    else:
        amps[0, 1], amps[1, 0] = a, b
    return PureState(amps)


def predict_two_sided(c_chi: float, variant: str, ch1: chn.KrausChannel,
                      ch2: chn.KrausChannel) -> float:
    phi = max_entangled(2).density()
    if variant == "00+11":
        target = chn.apply_two_sided(phi, ch1, ch2)
    else:
        target = chn.channel_image(ch1.then(ch2))
    return c_chi * wootters_concurrence(target)


def verify_two_sided(a: complex, b: complex, variant: str, ch1: chn.KrausChannel,
                     ch2: chn.KrausChannel, seed: int | None = None) -> EvolutionReport:
    """Two-sided law for a|00>+b|11> (``ch1`` diagonal or anti-diagonal Kraus)
    or a|01>+b|10> (``ch1`` anti-diagonal Kraus, composed-channel prediction)."""
    chi = schmidt_pair_state(a, b, variant)
    diag, anti = is_diagonal_kraus(ch1), is_antidiagonal_kraus(ch1)
    if variant == "00+11" and not (diag or anti):
        raise ValueError("a|00>+b|11> needs ch1 with all-diagonal or all-off-diagonal Kraus ops")
    if variant == "01+10" and not anti:
        raise ValueError("a|01>+b|10> needs ch1 with all-off-diagonal Kraus ops")
    predicted = predict_two_sided(iconcurrence_pure(chi), variant, ch1, ch2)
    direct = wootters_concurrence(chn.apply_two_sided(chi.density(), ch1, ch2))
    return make_report(predicted, direct, "wootters-exact", seed=seed, dims=(2, 2),
                       extras={"variant": variant, "family": "diagonal" if diag else "off-diagonal"})


def check_mixed_bound(rho0: DensityMatrix, ch: chn.KrausChannel,
                      seed: int | None = None) -> EvolutionReport:
    """C[(I (x) $) rho0] <= C[rho0] C[rho_$] on two qubits."""
    bound = bound_mixed_initial(wootters_concurrence(rho0),
                                wootters_concurrence(chn.channel_image(ch)), 2)
    direct = wootters_concurrence(chn.apply_one_sided(rho0, ch, 2))
    return make_report(bound, direct, "wootters-exact", kind="upper-bound", seed=seed, dims=(2, 2))


# --- seeded sweeps --------------------------------------------------------

SUITES = ("theorem", "corollary", "corollary-roof", "bounds", "two-sided")


def case_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), int(index)])


def _random_tp_channel(rng, n_kraus):
    if rng.uniform() < 0.5:
        return chn.random_channel(2, n_kraus, rng)
    return chn.random_weak_channel(2, n_kraus, rng)


def _random_single_kraus(rng, d):
    if rng.uniform() < 0.5:
        return chn.random_channel(d, 1, rng)
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    z /= np.linalg.svd(z, compute_uv=False)[0]
    return chn.make_channel([z], expect_tp=False)


def _batched_wootters(mats) -> np.ndarray:
    return np.atleast_1d(wootters_concurrence(np.array(mats)))


def suite_theorem(cases: int, seed: int) -> list[EvolutionReport]:
    out = []
    for i in range(cases):
        rng = case_rng(seed, i)
        dims = tuple(int(x) for x in rng.integers(2, 5, size=2))
        chi = random_pure(dims, rng)
        ch = _random_single_kraus(rng, dims[1])
        out.append(verify_theorem(chi, ch, seed=i))
    return out


def suite_corollary(cases: int, seed: int) -> list[EvolutionReport]:
    """2x2 pure states under TP channels with 1-4 Kraus operators."""
    chis, evolved, images = [], [], []
    for i in range(cases):
        rng = case_rng(seed, i)
        chi = random_pure((2, 2), rng)
        ch = _random_tp_channel(rng, int(rng.integers(1, 5)))
        chis.append(iconcurrence_pure(chi))
        evolved.append(chn.apply_one_sided(chi.density(), ch, 2).mat)
        images.append(chn.channel_image(ch).mat)
    direct = _batched_wootters(evolved)
    image_c = _batched_wootters(images)
    return [make_report(c * ic, d, "wootters-exact", seed=i, dims=(2, 2))
            for i, (c, ic, d) in enumerate(zip(chis, image_c, direct))]


def suite_corollary_roof(cases: int, seed: int, budget: RoofBudget | None = None
                         ) -> list[EvolutionReport]:
    """N1 x 2 (N1 in {3, 4}) under mixed-image channels, direct by convex roof."""
    out = []
    for i in range(cases):
        rng = case_rng(seed, i)
        n1 = int(rng.integers(3, 5))
        chi = random_pure((n1, 2), rng)
        ch = _random_tp_channel(rng, int(rng.integers(2, 5)))
        b = budget or RoofBudget(seed=i)
        out.append(verify_factorization(chi, ch, budget=b, seed=i))
    return out


def suite_bounds(cases: int, seed: int) -> list[EvolutionReport]:
    rho0s, evolved, images = [], [], []
    for i in range(cases):
        rng = case_rng(seed, i)
        rho0 = random_density((2, 2), rng, rank=int(rng.integers(1, 5)))
        ch = _random_tp_channel(rng, int(rng.integers(1, 5)))
        rho0s.append(rho0.mat)
        evolved.append(chn.apply_one_sided(rho0, ch, 2).mat)
        images.append(chn.channel_image(ch).mat)
    c0 = _batched_wootters(rho0s)
    ic = _batched_wootters(images)
    direct = _batched_wootters(evolved)
    return [make_report(bound_mixed_initial(a, b, 2), d, "wootters-exact", kind="upper-bound",
                        seed=i, dims=(2, 2))
            for i, (a, b, d) in enumerate(zip(c0, ic, direct))]


def random_two_sided_case(rng, family: str):
    """Draw (a, b, variant, ch1, ch2) for one family of the two-sided law."""
    theta = rng.uniform(0, np.pi / 2)
    a, b = np.cos(theta), np.sin(theta)
    ch2 = _random_tp_channel(rng, int(rng.integers(1, 5)))
    k = int(rng.integers(1, 4))
    if family == "diagonal":
        ch1 = (chn.phase_noise(rng.uniform(0, 3)) if rng.uniform() < 0.3
               else chn.random_diagonal_channel(k, rng))
        return a, b, "00+11", ch1, ch2
    ch1 = chn.random_antidiagonal_channel(k, rng)
    variant = "01+10" if family == "off-diagonal" else "00+11"
    return a, b, variant, ch1, ch2


def suite_two_sided(cases: int, seed: int) -> list[EvolutionReport]:
    """``cases`` draws for each of: diagonal ch1 on a|00>+b|11>, off-diagonal
    ch1 on a|01>+b|10>, off-diagonal ch1 on a|00>+b|11>."""
    families = ("diagonal", "off-diagonal", "off-diagonal-00")
    chis, direct, target, meta = [], [], [], []
    phi = max_entangled(2).density()
    for f, family in enumerate(families):
        for i in range(cases):
            rng = case_rng(seed, f * cases + i)
            a, b, variant, ch1, ch2 = random_two_sided_case(rng, family)
            chi = schmidt_pair_state(a, b, variant)
            chis.append(iconcurrence_pure(chi))
            direct.append(chn.apply_two_sided(chi.density(), ch1, ch2).mat)
            if variant == "00+11":
                target.append(chn.apply_two_sided(phi, ch1, ch2).mat)
            else:
                target.append(chn.channel_image(ch1.then(ch2)).mat)
            meta.append((f * cases + i, variant, family))
    d = _batched_wootters(direct)
    t = _batched_wootters(target)
    return [make_report(c * tc, dc, "wootters-exact", seed=idx, dims=(2, 2),
                        extras={"variant": v, "family": fam})
            for c, tc, dc, (idx, v, fam) in zip(chis, t, d, meta)]


def run_suite(name: str, cases: int, seed: int) -> list[EvolutionReport]:
    if cases < 1:
        raise ValueError("cases must be >= 1")
    runners = {
        "theorem": suite_theorem,
        "corollary": suite_corollary,
        "corollary-roof": suite_corollary_roof,
        "bounds": suite_bounds,
        "two-sided": suite_two_sided,
    }
    if name not in runners:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    return runners[name](cases, seed)


def audit_probability(chi: PureState, ch: chn.KrausChannel) -> float:
    """|1 - Tr[(M (x) I) rho_$ (M^dag (x) I)]| for a TP channel; should vanish."""
    image = chn.channel_image(ch)
    m = filter_operator(chi).mat
    big = np.kron(m, np.eye(image.dims[1]))
    return abs(1.0 - float(np.trace(big @ image.mat @ big.conj().T).real))

