"""Acceptance gate: one test per criterion, each at its stated tolerance.

Every test records its criterion number and a one-line detail; the terminal
summary (see conftest) prints a PASS/FAIL line per criterion.
"""

import math
import random
import time

import numpy as np
import pytest
from conftest import random_instance
from scipy import stats

from cdfmr import analytic
from cdfmr.cli import FIGURES, main, run_sweep, trend_checks
from cdfmr.network import ClusterTopology, effective_gammas, explicit_budget, modulation_from_name, unbalanced_budget
from cdfmr.oracles import (
    capacity_by_quadrature,
    estimator_std_error,
    ser_by_quadrature,
    snr_gain_by_quadrature,
)
from cdfmr.scenario import db_to_linear, parse_scenario
from cdfmr.simulator import SimulationConfig, chunk_rng, draw_end_to_end, estimate

BPSK = modulation_from_name("BPSK")
R_TH = 0.3
DELTA = 4.0


@pytest.fixture
def report(record_property):
    def _report(num, ok, detail):
        record_property("criterion", num)
        record_property("detail", detail)
        print(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail

    return _report


def friis(sizes, gd_db):
    return ClusterTopology(tuple(sizes)), unbalanced_budget(len(sizes), DELTA, db_to_linear(gd_db))


def test_criterion_01_cross_form(report):
    rng = random.Random(1)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(1000):
        topo, budget = random_instance(rng, max_total=20, max_clusters=6, max_size=8)
        x = min(effective_gammas(topo, budget)) * 10 ** rng.uniform(-3, 1.5)
        worst = max(worst, abs(analytic.cdf_expanded(x, topo, budget) - analytic.cdf_product(x, topo, budget)))
    dt = time.perf_counter() - t0
    report(1, worst <= 1e-9 and dt < 10, f"max |expanded - product| = {worst:.2e} (tol 1e-9), {dt:.1f}s")


def test_criterion_02_oracles(report):
    rng = random.Random(2)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(50):
        topo, budget = random_instance(rng)
        mu = 10 ** rng.uniform(-1, 1)
        pairs = (
            (analytic.ergodic_capacity(topo, budget), capacity_by_quadrature(topo, budget)),
            (analytic.ser(topo, budget, BPSK), ser_by_quadrature(topo, budget, BPSK)),
            (analytic.prob_snr_gain(topo, budget, mu), snr_gain_by_quadrature(topo, budget, mu)),
        )
        worst = max(worst, *(abs(a - b) / abs(b) for a, b in pairs))
    dt = time.perf_counter() - t0
    report(2, worst <= 1e-5 and dt < 60, f"max relative gap to quadrature = {worst:.2e} (tol 1e-5), {dt:.1f}s")


def test_criterion_03_dual_hop(report):
    topo, budget = ClusterTopology.of(1), explicit_budget([10.0, 10.0], 1.0)
    p = analytic.outage_probability(topo, budget, analytic.OutageThreshold(0.5))
    # 0.181269247 is the 9-digit rounding; the 1e-12 tolerance applies to the closed form
    closed = -math.expm1(-0.2)
    ok = abs(p - closed) <= 1e-12 and round(p, 9) == 0.181269247
    report(3, ok, f"outage = {p:.15f}, 1 - e^-0.2 = {closed:.15f}, gap {abs(p - closed):.1e} (tol 1e-12)")


def test_criterion_04_moment_identity(report):
    rng = random.Random(4)
    t0 = time.perf_counter()
    worst, count = 0.0, 0
    for sizes in ((2, 2), (3, 3), (3, 2, 2), (3, 3, 3, 3, 3)):
        topo = ClusterTopology(sizes)
        for _ in range(100):
            budget = explicit_budget([10 ** rng.uniform(-1, 4) for _ in range(len(sizes) + 1)])
            for z in range(1, topo.min_size):
                worst = max(worst, abs(analytic.moment_identity_residual(topo, budget, z, relative=True)))
                count += 1
    dt = time.perf_counter() - t0
    report(4, worst <= 1e-9 and dt < 30, f"max relative residual = {worst:.2e} over {count} cases (tol 1e-9), {dt:.1f}s")


def test_criterion_05_monte_carlo(report):
    th = analytic.OutageThreshold(R_TH)
    t0 = time.perf_counter()
    worst, where = 0.0, ""
    for sizes in ((2, 1), (3, 2), (3, 3)):
        for gd in (0.0, 10.0, 20.0):
            topo, budget = friis(sizes, gd)
            cfg = SimulationConfig(sample_count=1_000_000, seed=2025, threshold=th, mod=BPSK, mu=1.0, workers=4)
            exact = {
                "outage": analytic.outage_probability(topo, budget, th),
                "capacity": analytic.ergodic_capacity(topo, budget),
                "ser": analytic.ser(topo, budget, BPSK),
                "snr_gain": analytic.prob_snr_gain(topo, budget, 1.0),
            }
            for name, est in estimate(topo, budget, cfg).items():
                se = estimator_std_error(name, topo, budget, est.n, threshold=th, mod=BPSK, mu=1.0)
                z = abs(est.value - exact[name]) / se if se > 0 else (0.0 if est.value == exact[name] else math.inf)
                if z >= worst:
                    worst, where = z, f"{topo} {gd:g} dB {name}"
    dt = time.perf_counter() - t0
    report(5, worst <= 4 and dt < 300, f"max |z| = {worst:.2f} at {where} (limit 4), {dt:.1f}s")


def test_criterion_06_diversity_order(report):
    th = analytic.OutageThreshold(R_TH)
    grid = np.arange(40.0, 60.0 + 1e-9, 2.0)
    parts, ok = [], True
    for sizes in ((2, 1), (3, 2), (3, 3)):
        logp = [math.log10(analytic.outage_probability(*friis(sizes, g), th)) for g in grid]
        slope = np.polyfit(grid / 10.0, logp, 1)[0]
        lm = min(sizes)
        ok &= abs(slope + lm) <= 0.1
        parts.append(f"{ClusterTopology(sizes)}: {slope:.4f} (want {-lm})")
    report(6, ok, "; ".join(parts))


def test_criterion_07_asymptotic_convergence(report):
    th = analytic.OutageThreshold(R_TH)
    grid = np.arange(30.0, 60.0 + 1e-9, 2.0)
    out_r, ser_r = [], []
    for g in grid:
        topo, budget = friis((3, 2), g)
        out_r.append(analytic.asymptotic_outage(topo, budget, th) / analytic.outage_probability(topo, budget, th))
        ser_r.append(analytic.asymptotic_ser(topo, budget, BPSK) / analytic.ser(topo, budget, BPSK))
    at50 = int(np.flatnonzero(grid == 50.0)[0])
    ok = True
    for r in (out_r, ser_r):
        dist = np.abs(np.asarray(r) - 1.0)
        ok &= 0.9 <= r[at50] <= 1.1 and bool(np.all(np.diff(dist) <= 0))
    report(7, ok, f"ratios at 50 dB: outage {out_r[at50]:.5f}, ser {ser_r[at50]:.5f}; "
                  f"30 dB -> 60 dB: outage {out_r[0]:.4f}->{out_r[-1]:.6f}, ser {ser_r[0]:.4f}->{ser_r[-1]:.6f}")


def test_criterion_08_figure_trends(report):
    t0 = time.perf_counter()
    checks = [c for f in FIGURES for c in trend_checks(f)]
    dt = time.perf_counter() - t0
    failed = [c.name for c in checks if not c.passed]
    report(8, not failed and dt < 30,
           f"{len(checks) - len(failed)}/{len(checks)} ordering checks hold, {dt:.1f}s" + (f"; failed: {failed}" if failed else ""))


SWEEP_SCENARIO = """\
clusters = 3,2
budget_model = unbalanced
delta = 4
gamma_d_sweep_db = 0, 20, 5
rate_threshold = 0.3
modulation = BPSK
samples = 300000
seed = 99
"""


def test_criterion_09_determinism(report, tmp_path):
    cfg = tmp_path / "det.cfg"
    cfg.write_text(SWEEP_SCENARIO)
    blobs = []
    for w in (1, 4):
        out = tmp_path / f"w{w}"
        assert main(["sweep", str(cfg), "--workers", str(w), "--out", str(out)]) == 0
        blobs.append((out / "det_sweep.csv").read_bytes())
    same_api = run_sweep(parse_scenario(SWEEP_SCENARIO), workers=1) == run_sweep(parse_scenario(SWEEP_SCENARIO), workers=4)
    ok = blobs[0] == blobs[1] and same_api
    report(9, ok, f"sweep output ({len(blobs[0])} bytes) identical for workers 1 and 4: {ok}")


def test_criterion_10_ks(report):
    parts, ok = [], True
    for sizes in ((2, 1), (3, 3)):
        topo, budget = friis(sizes, 10.0)
        x = draw_end_to_end(chunk_rng(10, 0), topo, budget, 100_000)
        p = stats.kstest(x, lambda v: analytic.cdf_product(np.asarray(v), topo, budget)).pvalue
        ok &= p > 1e-3
        parts.append(f"{topo}: p = {p:.3f}")
    report(10, ok, "; ".join(parts) + " (need > 0.001)")
