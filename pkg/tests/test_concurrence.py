import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entevo import concurrence as cc
from entevo import channels as chn
from entevo.numerics import haar_unitary
from entevo.states import (
    DensityMatrix,
    max_entangled,
    product_state,
    pure_from_amplitudes,
    random_density,
    random_pure,
)

from conftest import oracle_iconcurrence, oracle_wootters, oracle_xstate

DIMS = [(a, b) for a in (2, 3, 4) for b in (2, 3, 4)]


def test_generators_n2():
    g = cc.so_generators(2)
    # (-1)^(1+2+1) = +1 at (1, 2) and (-1)^(1+2) = -1 at (2, 1)
    np.testing.assert_array_equal(g.generators[0], [[0, 1], [-1, 0]])
    assert g.pairs == ((1, 2),)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_generator_structure(n):
    g = cc.so_generators(n)
    assert len(g.generators) == n * (n - 1) // 2
    assert list(g.pairs) == sorted(g.pairs)
    for (k, l), gen in zip(g.pairs, g.generators):
        np.testing.assert_array_equal(gen.T, -gen)
        assert np.count_nonzero(gen) == 2
        assert gen[k - 1, l - 1] == (-1) ** (k + l + 1)
        assert gen[l - 1, k - 1] == (-1) ** (k + l)
    gram = np.einsum("aij,bij->ab", g.generators, g.generators)
    np.testing.assert_array_equal(gram, 2 * np.eye(len(g.generators)))
    assert g.index_of(1, n) == n - 2
    with pytest.raises(ValueError):
        cc.so_generators(1)


def test_concurrence_matrix_examples():
    c = cc.concurrence_matrix(max_entangled(2))
    assert c.mat.shape == (1, 1) and abs(abs(c.mat[0, 0]) - 1) < 1e-15
    prod = product_state([1, 0, 0], [1, 0, 0])
    assert np.all(cc.concurrence_matrix(prod).mat == 0)
    assert np.all(cc.concurrence_matrix_via_generators(prod).mat == 0)


@pytest.mark.parametrize("dims", DIMS)
def test_generator_path_agrees(dims):
    rng = np.random.default_rng(hash(dims) % 2**32)
    for _ in range(25):
        chi = random_pure(dims, rng)
        a = cc.concurrence_matrix(chi).mat
        b = cc.concurrence_matrix_via_generators(chi).mat
        assert a.shape == (dims[0] * (dims[0] - 1) // 2, dims[1] * (dims[1] - 1) // 2)
        assert np.max(np.abs(a - b)) <= 1e-12


def test_closed_form_entry():
    chi = random_pure((3, 4), 2)
    a = chi.amps
    c = cc.concurrence_matrix(chi)
    for r, (k, l) in enumerate(c.row_pairs):
        for s, (kp, lp) in enumerate(c.col_pairs):
            sign = (-1) ** (k + l + kp + lp)
            expected = 2 * sign * np.conj(a[k - 1, kp - 1] * a[l - 1, lp - 1] - a[k - 1, lp - 1] * a[l - 1, kp - 1])
            assert abs(c.mat[r, s] - expected) <= 1e-15


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(DIMS))
def test_purity_identity_and_bounds(seed, dims):
    chi = random_pure(dims, seed)
    c = cc.iconcurrence_pure(chi)
    assert abs(c - oracle_iconcurrence(chi.amps)) <= 1e-10
    n = min(dims)
    assert c <= math.sqrt(2 * (n - 1) / n) + 1e-10
    # sum over 2x2 minors
    a = chi.amps
    minors = sum(abs(a[i, k] * a[j, l] - a[i, l] * a[j, k]) ** 2
                 for i in range(dims[0]) for j in range(i + 1, dims[0])
                 for k in range(dims[1]) for l in range(k + 1, dims[1]))
    assert abs(c - 2 * math.sqrt(minors)) <= 1e-10


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(DIMS))
def test_local_unitary_invariance(seed, dims):
    rng = np.random.default_rng(seed)
    chi = random_pure(dims, rng)
    u, v = haar_unitary(dims[0], rng), haar_unitary(dims[1], rng)
    moved = pure_from_amplitudes(dims, u @ chi.amps @ v.T)
    assert abs(cc.iconcurrence_pure(moved) - cc.iconcurrence_pure(chi)) <= 1e-10


@pytest.mark.parametrize("n", [2, 3, 4])
def test_max_entangled_value(n):
    assert abs(cc.iconcurrence_pure(max_entangled(n)) - math.sqrt(2 * (n - 1) / n)) <= 1e-10


def test_nmr_ground_state():
    a = np.zeros((3, 3))
    a[0, 2], a[1, 1], a[2, 0] = 1, -1, 1
    assert abs(cc.iconcurrence_pure(pure_from_amplitudes((3, 3), a)) - 2 / math.sqrt(3)) <= 1e-12


def test_wootters_examples():
    assert abs(cc.wootters_concurrence(max_entangled(2).density()) - 1) <= 1e-12
    assert cc.wootters_concurrence(DensityMatrix(np.eye(4) / 4, (2, 2))) == 0.0
    for nu in (0.0, 0.2, 0.77, 1.0):
        m = np.zeros((4, 4))
        m[0, 0] = m[3, 3] = 0.5
        m[0, 3] = m[3, 0] = nu / 2
        assert abs(cc.wootters_concurrence(DensityMatrix(m, (2, 2))) - nu) <= 1e-12
    with pytest.raises(ValueError):
        cc.wootters_concurrence(random_density((2, 3), 1))
    with pytest.raises(ValueError):
        cc.wootters_concurrence(np.diag([1.5, -0.5, 0, 0]))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 4))
def test_wootters_matches_numpy_route(seed, rank):
    rho = random_density((2, 2), seed, rank=rank)
    assert abs(cc.wootters_concurrence(rho) - oracle_wootters(rho.mat)) <= 1e-10


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_wootters_pure_and_xstate(seed):
    rng = np.random.default_rng(seed)
    chi = random_pure((2, 2), rng)
    assert abs(cc.wootters_concurrence(chi.density()) - oracle_iconcurrence(chi.amps)) <= 1e-10
    a, b, c, d = rng.dirichlet([1, 1, 1, 1])
    m = np.diag([a, b, c, d]).astype(complex)
    m[0, 3] = np.sqrt(a * d) * rng.uniform() * np.exp(1j * rng.uniform(0, 6))
    m[3, 0] = np.conj(m[0, 3])
    assert abs(cc.wootters_concurrence(DensityMatrix(m, (2, 2))) - oracle_xstate(m)) <= 1e-10


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0, 1))
def test_wootters_convexity(seed, lam):
    r1 = random_density((2, 2), [seed, 1], rank=2)
    r2 = random_density((2, 2), [seed, 2], rank=1)
    mix = DensityMatrix(lam * r1.mat + (1 - lam) * r2.mat, (2, 2))
    lhs = cc.wootters_concurrence(mix)
    assert lhs <= lam * cc.wootters_concurrence(r1) + (1 - lam) * cc.wootters_concurrence(r2) + 1e-10


def test_wootters_batched():
    mats = np.array([random_density((2, 2), s).mat for s in range(6)])
    batched = cc.wootters_concurrence(mats)
    single = [cc.wootters_concurrence(DensityMatrix(m, (2, 2))) for m in mats]
    np.testing.assert_allclose(batched, single, atol=1e-14)


def test_roof_pure_input():
    chi = random_pure((3, 2), 4)
    value, dec = cc.convex_roof_estimate(chi.density())
    assert abs(value - cc.iconcurrence_pure(chi)) <= 1e-12
    assert len(dec.states) == 1


@pytest.mark.parametrize("seed", range(4))
def test_roof_against_wootters(seed):
    rho = random_density((2, 2), seed, rank=2 + seed % 3)
    value, dec = cc.convex_roof_estimate(rho, cc.RoofBudget(seed=seed))
    gap = value - cc.wootters_concurrence(rho)
    assert -1e-9 <= gap <= 1e-3
    assert dec.reconstructs(rho, 1e-9)
    assert abs(cc.average_concurrence(dec) - value) <= 1e-15


def test_roof_separable_mixture():
    rng = np.random.default_rng(3)
    mat = np.zeros((6, 6), dtype=complex)
    for w in rng.dirichlet([1, 1, 1]):
        s = product_state(rng.standard_normal(3) + 1j * rng.standard_normal(3), rng.standard_normal(2))
        mat += w * s.density().mat
    value, _ = cc.convex_roof_estimate(DensityMatrix(mat, (3, 2)))
    assert value <= 1e-3


def test_roof_budget_checks():
    rho = random_density((2, 2), 0)
    with pytest.raises(ValueError):
        cc.convex_roof_estimate(rho, cc.RoofBudget(m=2))
    # determinism for a fixed seed
    a = cc.convex_roof_estimate(rho, cc.RoofBudget(seed=5, restarts=4))[0]
    b = cc.convex_roof_estimate(rho, cc.RoofBudget(seed=5, restarts=4))[0]
    assert a == b


def test_roof_upper_bounds_known_value_in_3x2():
    # a 3x2 state under phase noise on the qubit is exactly C[chi] e^{-gt}
    chi = random_pure((3, 2), 9)
    ch = chn.phase_noise(0.4)
    rho = chn.apply_one_sided(chi.density(), ch)
    value, _ = cc.convex_roof_estimate(rho, cc.RoofBudget(seed=1))
    exact = cc.iconcurrence_pure(chi) * math.exp(-0.4)
    assert -1e-9 <= value - exact <= 5e-3
