"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Every criterion runs at its stated size and tolerance. Where the package's own
numbers are compared, an independent numpy-route oracle re-checks a sample.
"""

import math
import time

import numpy as np
import pytest

from entevo import channels as chn
from entevo import evolution as ev
from entevo import scenarios as sc
from entevo.concurrence import (
    RoofBudget,
    concurrence_matrix,
    concurrence_matrix_via_generators,
    convex_roof_estimate,
    iconcurrence_pure,
    wootters_concurrence,
)
from entevo.states import max_entangled, pure_from_amplitudes, random_density, random_pure

from conftest import compressed_wootters, oracle_iconcurrence, oracle_wootters, oracle_xstate

SEED = 7


@pytest.fixture
def report(capsys):
    def emit(tag, ok, detail):
        with capsys.disabled():
            print(f"\n[{tag}] {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail
    return emit


def test_ac01_corollary_2x2(report):
    t0 = time.perf_counter()
    reps = ev.run_suite("corollary", 1000, SEED)
    elapsed = time.perf_counter() - t0
    worst = max(abs(r.gap) for r in reps)
    # oracle: numpy-route Wootters on every 10th case
    oracle_dev = 0.0
    for i in range(0, 1000, 10):
        rng = ev.case_rng(SEED, i)
        chi = random_pure((2, 2), rng)
        ch = ev._random_tp_channel(rng, int(rng.integers(1, 5)))
        direct = oracle_wootters(chn.apply_one_sided(chi.density(), ch).mat)
        pred = oracle_iconcurrence(chi.amps) * oracle_wootters(chn.channel_image(ch).mat)
        oracle_dev = max(oracle_dev, abs(direct - pred), abs(direct - reps[i].direct))
    nontrivial = sum(r.predicted > 1e-3 for r in reps)
    ok = len(reps) >= 1000 and worst <= 1e-10 and oracle_dev <= 1e-10 and elapsed < 30
    report("AC1", ok, f"{len(reps)} cases ({nontrivial} nonzero), max|gap|={worst:.2e}, "
                      f"oracle dev={oracle_dev:.2e}, {elapsed:.1f}s")


def test_ac02_theorem_matrix(report):
    reps = ev.run_suite("theorem", 200, SEED)
    dims = {r.dims for r in reps}
    worst = max(r.extras["matrix_residual"] for r in reps)
    # oracle: generator contraction of the directly evolved state
    oracle_dev = 0.0
    for i in range(0, 200, 5):
        rng = ev.case_rng(SEED, i)
        n1, n2 = (int(x) for x in rng.integers(2, 5, size=2))
        chi = random_pure((n1, n2), rng)
        k = ev._random_single_kraus(rng, n2).ops[0]
        img = pure_from_amplitudes((n2, n2), max_entangled(n2).amps @ k.T)
        pred = ev.predict_matrix_pure_channel(chi, img).mat / ev.filtered_norm2(chi, img)
        direct = concurrence_matrix_via_generators(pure_from_amplitudes((n1, n2), chi.amps @ k.T)).mat
        oracle_dev = max(oracle_dev, float(np.linalg.norm(pred - direct)))
    ok = len(reps) >= 200 and all(r.passed for r in reps) and worst <= 1e-10 and oracle_dev <= 1e-10
    report("AC2", ok, f"{len(reps)} cases over {len(dims)} dim pairs, max residual={worst:.2e}, "
                      f"generator-path dev={oracle_dev:.2e}")


def test_ac03_corollary_roof(report):
    reps = ev.run_suite("corollary-roof", 100, SEED)
    gaps = np.array([r.gap for r in reps])
    # oracle: the evolved state lives on a 2x2 subspace, so compressed Wootters is exact
    oracle_dev = 0.0
    for i, r in enumerate(reps):
        rng = ev.case_rng(SEED, i)
        n1 = int(rng.integers(3, 5))
        chi = random_pure((n1, 2), rng)
        ch = ev._random_tp_channel(rng, int(rng.integers(2, 5)))
        exact = compressed_wootters(chi.amps, chn.apply_one_sided(chi.density(), ch).mat)
        oracle_dev = max(oracle_dev, abs(exact - r.predicted))
    in_band = np.all((gaps >= -1e-9) & (gaps <= 5e-3))
    ok = len(reps) >= 100 and bool(in_band) and all(r.method == "roof-estimate" for r in reps) \
        and oracle_dev <= 1e-10
    report("AC3", ok, f"{len(reps)} cases, gap range [{gaps.min():.2e}, {gaps.max():.2e}], "
                      f"prediction vs compressed-Wootters dev={oracle_dev:.2e}")


def test_ac04_mixed_bound(report):
    reps = ev.run_suite("bounds", 1000, SEED)
    slack = min(-r.gap for r in reps)
    oracle_dev = 0.0
    for i in range(0, 1000, 10):
        rng = ev.case_rng(SEED, i)
        rho0 = random_density((2, 2), rng, rank=int(rng.integers(1, 5)))
        ch = ev._random_tp_channel(rng, int(rng.integers(1, 5)))
        d = oracle_wootters(chn.apply_one_sided(rho0, ch).mat)
        b = oracle_wootters(rho0.mat) * oracle_wootters(chn.channel_image(ch).mat)
        oracle_dev = max(oracle_dev, abs(d - reps[i].direct), abs(b - reps[i].predicted))
        assert d <= b + 1e-10
    ok = len(reps) >= 1000 and slack >= -1e-10 and oracle_dev <= 1e-10
    report("AC4", ok, f"{len(reps)} cases, min slack={slack:.2e}, oracle dev={oracle_dev:.2e}")


@pytest.mark.parametrize("params", [(3 ** -0.5,) * 3, (0.6, 0.48, 0.64), (0.3, 0.9, math.sqrt(1 - 0.9))])
def test_ac05_w_dephasing(report, params):
    grid = sc.w_dephasing_scan(sc.WStateParams(*params), sc.default_t_grid(2.0, 201))
    devs = [float(np.max(np.abs(grid.column(a) - grid.column(b)))) for a, b in
            [("c_bc", "c_bc_closed"), ("c_ac", "c_ac_closed"), ("c_abc_direct", "c_abc_closed"),
             ("c_abc_pred", "c_abc_closed")]]
    tau = float(np.max(np.abs(grid.column("tau_noisy_pairing"))))
    ok = grid.data.shape[0] == 201 and max(devs) <= 1e-10 and tau <= 1e-9
    report("AC5", ok, f"alpha={params[0]:.4f}: max closed-form dev={max(devs):.2e}, max|tau|={tau:.2e}")


def test_ac06_w_gad(report):
    t0 = time.perf_counter()
    grid = sc.w_gad_scan(sc.default_alpha_grid(201), sc.default_t_grid(2.0, 201), 0.5)
    elapsed = time.perf_counter() - t0
    dev = float(np.max(np.abs(grid.column("c_abc_direct") - grid.column("c_abc_closed"))))
    dev_pred = float(np.max(np.abs(grid.column("c_abc_pred") - grid.column("c_abc_closed"))))
    esd = sc.esd_time(0.5, 0.5)
    esd_w = sc.esd_time_wootters(0.5, 0.5)
    t_max, a_max, tau = sc.tau_max_search(0.5)
    loc_ok = abs(t_max - 0.0936) <= 0.01 and abs(a_max - 0.4996) <= 0.01
    ok = (grid.data.shape[0] == 201 * 201 and max(dev, dev_pred) <= 1e-8
          and abs(esd - sc.ESD_P_HALF) <= 1e-6 and abs(esd_w - sc.ESD_P_HALF) <= 1e-6
          and loc_ok and elapsed < 120)
    report("AC6", ok, f"surface {elapsed:.1f}s, closed-form dev={max(dev, dev_pred):.2e}, "
                      f"ESD={esd:.7f} (Wootters {esd_w:.7f}), tau max {tau:.4f} at "
                      f"(gamma_t={t_max:.4f}, |alpha|={a_max:.4f})")


def test_ac07_nmr(report):
    grid = sc.nmr_scenario(np.linspace(0.0, 10.0, 201), 1.0, 2.0)
    dev = float(np.max(np.abs(grid.column("c_direct") - grid.column("c_closed"))))
    c0 = grid.column("c_direct")[0]
    fid = sc.nmr_point(10.0, 20.0)["fidelity_20"]
    ok = dev <= 1e-10 and abs(c0 - 2 / math.sqrt(3)) <= 1e-10 and fid >= 1 - 1e-6
    report("AC7", ok, f"201 points, max dev={dev:.2e}, C(0)={c0:.12f}, fidelity(|20>)={fid:.9f}")


def test_ac08_xstate(report):
    reps = sc.xstate_sweep(500, SEED)
    worst = max(abs(r.gap) for r in reps)
    oracle_dev = 0.0
    for i, r in enumerate(reps):
        rng = np.random.default_rng([SEED, i])
        params = sc.random_xstate(rng)
        t = float(rng.uniform(0, 3.0))
        rho0 = params.density()
        evolved = chn.apply_one_sided(rho0, chn.phase_noise(t)).mat
        oracle_dev = max(oracle_dev, abs(oracle_xstate(evolved) - r.direct),
                         abs(oracle_xstate(rho0.mat) * math.exp(-t) - r.predicted))
    ok = len(reps) >= 500 and worst <= 1e-10 and oracle_dev <= 1e-10
    report("AC8", ok, f"{len(reps)} cases, max|gap|={worst:.2e}, X-form oracle dev={oracle_dev:.2e}")


def test_ac09_two_sided(report):
    reps = ev.run_suite("two-sided", 200, SEED)
    by_family = {}
    for r in reps:
        by_family.setdefault(r.extras["family"] + "/" + r.extras["variant"], []).append(r)
    worst = max(abs(r.gap) for r in reps)
    oracle_dev = 0.0
    for f, family in enumerate(("diagonal", "off-diagonal")):
        for i in range(0, 200, 10):
            rng = ev.case_rng(SEED, f * 200 + i)
            a, b, variant, ch1, ch2 = ev.random_two_sided_case(rng, family)
            chi = ev.schmidt_pair_state(a, b, variant)
            d = oracle_wootters(chn.apply_two_sided(chi.density(), ch1, ch2).mat)
            oracle_dev = max(oracle_dev, abs(d - reps[f * 200 + i].direct))
    counts = {k: len(v) for k, v in by_family.items()}
    ok = (counts.get("diagonal/00+11", 0) >= 200 and counts.get("off-diagonal/01+10", 0) >= 200
          and worst <= 1e-10 and oracle_dev <= 1e-10)
    report("AC9", ok, f"{counts}, max|gap|={worst:.2e}, oracle dev={oracle_dev:.2e}")


def test_ac10_cross_checks(report):
    rng = np.random.default_rng(SEED)
    path_dev = 0.0
    purity_dev = 0.0
    for _ in range(200):
        dims = tuple(int(x) for x in rng.integers(2, 5, size=2))
        chi = random_pure(dims, rng)
        a = concurrence_matrix(chi).mat
        path_dev = max(path_dev, float(np.max(np.abs(a - concurrence_matrix_via_generators(chi).mat))))
        r = chi.amps @ chi.amps.conj().T
        purity_dev = max(purity_dev, abs(iconcurrence_pure(chi) ** 2 - 2 * (1 - np.trace(r @ r).real)))
    gaps = []
    for s in range(12):
        rho = random_density((2, 2), [SEED, s], rank=2 + s % 3)
        value, _ = convex_roof_estimate(rho, RoofBudget(seed=s))
        gaps.append(value - wootters_concurrence(rho))
    me = [abs(iconcurrence_pure(max_entangled(n)) - math.sqrt(2 * (n - 1) / n)) for n in (2, 3, 4)]
    ok = (path_dev <= 1e-12 and purity_dev <= 1e-10 and min(gaps) >= -1e-9 and max(gaps) <= 1e-3
          and max(me) <= 1e-10)
    report("AC10", ok, f"path dev={path_dev:.2e}, purity identity dev={purity_dev:.2e}, "
                       f"estimator-Wootters in [{min(gaps):.2e}, {max(gaps):.2e}], "
                       f"max-entangled dev={max(me):.2e}")
