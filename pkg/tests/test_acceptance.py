"""Exit criteria for the artifact, one test per criterion.

Run with ``pytest tests/test_acceptance.py``; a PASS/FAIL line per criterion is
printed in the terminal summary.
"""

import time

import numpy as np
import pytest

from risce import cli
from risce.channel import (
    CorrelationSpec,
    RiceanLinkSpec,
    SteeringSpec,
    draw_bs_ris,
    draw_realization,
    draw_ricean,
    link_specs,
    steering_vector,
)
from risce.config import Scenario
from risce.harness import TrialPlan, run_trials, statistics, sweep_elements, trial_streams
from risce.objective import make_simulated
from risce.optimizers import run_algorithm

SEED = 2024
HARDENING_N = (16, 32, 64, 128, 256)


@pytest.fixture(scope="module")
def comparative():
    """Default scenario, N=304, budget 1500 for all, R=50 coupled trials."""
    plan = TrialPlan(Scenario(), ("ce", "sa", "mh", "none"), (304,), trials=50, seed=SEED)
    t0 = time.perf_counter()
    recs = run_trials(plan)
    return recs, time.perf_counter() - t0


@pytest.fixture(scope="module")
def hardening():
    sc = Scenario().replace(**{"ris.N": HARDENING_N[-1]})
    plan = TrialPlan(sc, ("ce", "sa", "mh"), HARDENING_N, trials=200, seed=SEED)
    t0 = time.perf_counter()
    sweep = sweep_elements(plan)
    rows = {(r["N"], r["algo"]): r for r in sweep.rows}
    return sweep, rows, time.perf_counter() - t0


def _mean_db(recs, algo):
    return statistics([r.snr_db for r in recs if r.algo == algo]).mean_db


def test_c01_oracle_equivalence(criterion):
    sc = Scenario().replace(**{"ris.N": 12, "harness.seed": SEED})
    t0 = time.perf_counter()
    optimum, results, frac = cli.oracle_check(sc, seeds=100, threshold=0.2)
    dt = time.perf_counter() - t0
    hits = round(frac * 100)
    ok = hits >= 90 and dt < 60
    criterion(1, "oracle equivalence N=12", ok, f"{hits}/100 seeds within 0.2 dB of {optimum:.3f} dB; {dt:.1f}s")
    assert ok


def test_c02_ce_beats_walks(criterion, comparative):
    recs, dt = comparative
    ce, sa, mh, none = (_mean_db(recs, a) for a in ("ce", "sa", "mh", "none"))
    ok = ce - sa >= 3.0 and ce - mh >= 3.0 and dt < 300
    criterion(2, "CE >= SA+3 dB and MH+3 dB (N=304, R=50)", ok,
              f"CE {ce:.2f}, SA {sa:.2f}, MH {mh:.2f}, none {none:.2f} dB; "
              f"CE-SA {ce - sa:+.2f}, CE-MH {ce - mh:+.2f}; {dt:.1f}s")
    assert ok


def test_c03_monotone_best_so_far(criterion, comparative):
    recs, _ = comparative
    bad = [(r.trial, r.algo) for r in recs if np.any(np.diff(r.best_curve) < 0)]
    ok = not bad
    criterion(3, "best-so-far traces nondecreasing", ok, f"{len(recs)} traces, {len(bad)} violations")
    assert ok


def test_c04_n_squared(criterion, hardening):
    _, rows, dt = hardening
    ratio = 10 ** ((rows[(256, "ce")]["mean_db"] - rows[(128, "ce")]["mean_db"]) / 10)
    ok = 3.0 <= ratio <= 5.0 and dt < 600
    criterion(4, "CE mean SNR(256)/SNR(128) in [3, 5]", ok, f"ratio {ratio:.3f}; sweep {dt:.1f}s")
    assert ok


def test_c05_hardening_slope(criterion, hardening):
    _, rows, _ = hardening
    ratios = np.array([rows[(n, "ce")]["ratio"] for n in HARDENING_N])
    slope = np.polyfit(np.log(HARDENING_N), np.log(ratios), 1)[0]
    at256 = {a: rows[(256, a)]["ratio"] for a in ("ce", "sa", "mh")}
    ok = -1.5 <= slope <= -0.6 and at256["ce"] <= at256["sa"] and at256["ce"] <= at256["mh"]
    criterion(5, "hardening slope in [-1.5, -0.6] and CE ratio lowest at N=256", ok,
              f"slope {slope:.3f}; ratio@256 CE {at256['ce']:.3e}, SA {at256['sa']:.3e}, MH {at256['mh']:.3e}")
    assert ok


def test_c06_quantile_gap(criterion, hardening):
    _, rows, _ = hardening
    gap = {n: rows[(n, "ce")]["q90_db"] - rows[(n, "ce")]["q10_db"] for n in (16, 256)}
    ok = gap[256] < gap[16]
    criterion(6, "CE q90-q10 gap shrinks N=16 -> 256", ok, f"{gap[16]:.3f} dB -> {gap[256]:.3f} dB")
    assert ok


def test_c07_budget_fairness(criterion, comparative, hardening):
    recs, _ = comparative
    sweep, _, _ = hardening
    allrecs = [r for r in recs + sweep.records if r.algo != "none"]
    bad = [(r.n, r.trial, r.algo, r.evaluations) for r in allrecs
           if (r.algo == "ce" and r.evaluations > 1501) or (r.algo != "ce" and r.evaluations != 1500)]
    ce_counts = sorted({r.evaluations for r in allrecs if r.algo == "ce"})
    ok = not bad
    criterion(7, "evaluation budgets (SA/MH == 1500, CE <= 1501)", ok,
              f"{len(allrecs)} runs audited; CE counts seen {ce_counts[:4]}{'...' if len(ce_counts) > 4 else ''}; "
              f"{len(bad)} violations")
    assert ok


def test_c08_runtime(criterion):
    sc = Scenario()
    times = {}
    for algo in ("ce", "sa", "mh"):
        ch, opt, _ = trial_streams(SEED, 0)
        obj = make_simulated(draw_realization(sc, ch))
        t0 = time.perf_counter()
        run_algorithm(algo, obj, sc.optimizer, opt)
        times[algo] = time.perf_counter() - t0
    spread = max(times.values()) / min(times.values())
    ok = max(times.values()) < 5.0 and spread <= 2.0
    criterion(8, "runtime N=304 budget 1500 (<5 s, within 2x)", ok,
              ", ".join(f"{a} {t * 1e3:.1f} ms" for a, t in times.items()) + f"; max/min {spread:.2f}")
    assert ok


def test_c09_determinism(criterion, tmp_path, capsys):
    argv = ["sweep-iters", "--algo", "ce,sa,mh,none", "--trials", "50", "--seed", str(SEED)]
    outs = []
    for i in range(2):
        path = tmp_path / f"run{i}.csv"
        assert cli.main(argv + ["--out", str(path)]) == 0
        outs.append(path.read_bytes())
    capsys.readouterr()
    ok = outs[0] == outs[1] and len(outs[0]) > 0
    criterion(9, "byte-identical CSV on repeat", ok, f"{len(outs[0])} bytes, identical={outs[0] == outs[1]}")
    assert ok


def test_c10_channel_moments(criterion):
    rng = np.random.default_rng(SEED)
    failures = []
    # Ricean total power and mean vector over 1e5 draws
    for kappa in (0.0, 1.0, 10.0):
        spec = RiceanLinkSpec(0.5, kappa, SteeringSpec(4, 4, 0.5, 71.95, 25.1), CorrelationSpec(4, 4, 0.5))
        a = steering_vector(spec.steering)
        h = draw_ricean(spec, rng, size=100_000)
        power = np.mean(np.sum(np.abs(h) ** 2, axis=1))
        theory = spec.beta * (kappa / (1 + kappa) * 16 + 16 / (1 + kappa))
        if abs(power / theory - 1) > 0.02:
            failures.append(f"power kappa={kappa}: {power:.4f} vs {theory:.4f}")
        # standard error of the sample-mean vector: sqrt(E||mean - mu||^2)
        se = np.sqrt(spec.beta / (1 + kappa) * 16 / 100_000)
        err = np.linalg.norm(h.mean(axis=0) - np.sqrt(spec.beta * kappa / (1 + kappa)) * a)
        if err >= 3 * se:
            failures.append(f"mean kappa={kappa}: |err| {err / se:.2f} SE")
    # unit modulus and rank-1 on the default geometry at every tested N
    sc = Scenario()
    for n in (1, 10, 38, 76, 152, 304):
        r = draw_realization(sc, rng, n)
        specs = link_specs(sc, n)
        a_r = steering_vector(specs["a_r"])
        if np.max(np.abs(np.abs(a_r) - 1)) > 1e-12:
            failures.append(f"unit modulus N={n}")
        H = draw_bs_ris(specs["beta_br"], steering_vector(specs["a_b"]), a_r)
        if not np.array_equal(H, r.H_br) or np.linalg.matrix_rank(H, tol=1e-9 * np.abs(H).max()) != 1:
            failures.append(f"rank-1 N={n}")
    ok = not failures
    criterion(10, "channel moment suite", ok, "all checks pass" if ok else "; ".join(failures))
    assert ok
