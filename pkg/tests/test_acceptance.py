"""Acceptance criteria 1-9, each at its stated tolerance.

Every test records its outcome in ``conftest.ACCEPTANCE``; the terminal
summary prints one PASS/FAIL line per criterion.
"""

import time

import numpy as np
import pytest

from conftest import ACCEPTANCE, random_grid
from gapfuse.cli import main
from gapfuse.compose import run_pipeline
from gapfuse.experiment import qualitative_checks, run_ensemble
from gapfuse.pyramid import (
    build_laplacian,
    build_steerable,
    filter_bank,
    reconstruct_laplacian,
    reconstruct_steerable,
)
from gapfuse.report import ks_rows
from gapfuse.synth import SceneParams, gen_truth
from gapfuse.verify import (
    DetectionScores,
    EmpiricalDistribution,
    contingency,
    ks_statistic,
)
from oracles import contingency_loop, ecdf_loop, ks_loop, scores_loop


def record(name, ok, detail=""):
    ACCEPTANCE[name] = (bool(ok), detail)
    return ok


def test_criterion_1_perfect_reconstruction():
    rng = np.random.default_rng(1)
    configs = [(4, 16)] + [(L, K) for L in (1, 2, 4) for K in (1, 2, 4)]
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(100):
        x = rng.exponential(3.0, (64, 64)) * (rng.random((64, 64)) < 0.4)
        rng_ = np.ptp(x)
        for L, K in configs:
            y = reconstruct_steerable(build_steerable(x, L, K))
            worst = max(worst, np.max(np.abs(y - x)) / rng_)
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-6 and elapsed < 60
    record("1. perfect reconstruction", ok, f"max rel err {worst:.2e}, {elapsed:.1f}s")
    assert worst < 1e-6
    assert elapsed < 60


def test_criterion_2_filter_tiling():
    worst = 0.0
    for K in (1, 4, 16):
        bank = filter_bank((64, 64), 4, K)
        worst = max(worst, np.max(np.abs(bank.highpass0**2 + bank.lowpass0**2 - 1)))
        for lvl in range(4):
            power = bank.radial_low[lvl] ** 2
            for k in range(K):
                power = power + np.abs(bank.band_filter(lvl, k)) ** 2
            worst = max(worst, np.max(np.abs(power - 1)))
    record("2. filter tiling", worst <= 1e-10, f"max deviation {worst:.2e}")
    assert worst <= 1e-10


def test_criterion_3_laplacian_round_trip():
    rng = np.random.default_rng(3)
    worst = 0.0
    for i in range(50):
        size = (16, 32, 64)[i % 3]
        x = rng.normal(0, 5, (size, size))
        depth = i % 3
        y = reconstruct_laplacian(build_laplacian(x, depth))
        worst = max(worst, np.max(np.abs(y - x)) / np.max(np.abs(x)))
    record("3. Laplacian round trip", worst <= 1e-10, f"max rel err {worst:.2e}")
    assert worst <= 1e-10


def test_criterion_4_oracle_equivalence():
    rng = np.random.default_rng(4)
    mismatches = []
    for i in range(100):
        shape = tuple(rng.integers(2, 9, 2))
        a = random_grid(rng, shape, p_valid=0.7)
        b = random_grid(rng, shape, p_valid=0.7)
        thr = float(rng.choice([0.0, 0.5, 2.0]))
        t = contingency(a, b, thr)
        counts = (t.hits, t.misses, t.false_alarms, t.correct_negatives)
        ref = contingency_loop(a.values.tolist(), a.valid.tolist(), b.values.tolist(), b.valid.tolist(), thr)
        if counts != ref:
            mismatches.append(("counts", i))
        got = DetectionScores.from_table(t)
        for g, r in zip((got.pod, got.far, got.ts), scores_loop(*ref[:3])):
            if (g is None) != (r is None) or (g is not None and abs(g - r) > 1e-12):
                mismatches.append(("scores", i))

        s = rng.normal(size=int(rng.integers(1, 30))).round(1)
        d = EmpiricalDistribution(s)
        probe = np.concatenate([s, rng.normal(size=10)])
        if np.max(np.abs(d.cdf(probe) - [ecdf_loop(s, x) for x in probe])) > 1e-12:
            mismatches.append(("cdf", i))

        u = rng.normal(size=int(rng.integers(1, 25))).round(1)
        v = rng.normal(0.3, 1.2, int(rng.integers(1, 25))).round(1)
        if abs(ks_statistic(u, v) - ks_loop(u, v)) > 1e-12:
            mismatches.append(("ks", i))
    record("4. oracle equivalence", not mismatches, f"{len(mismatches)} mismatches over 4x100 instances")
    assert not mismatches


def test_criterion_5_self_fusion_identity():
    worst, dry_bad = 0.0, 0
    for seed in range(20):
        x = gen_truth(SceneParams(seed=100 + seed))
        out = run_pipeline(x, x)
        v = x.values
        wet = v > 0
        worst = max(worst, np.max(np.abs(out.values - v)[wet]) / np.ptp(v))
        dry_bad += int(np.count_nonzero(out.values[~wet] != 0))
    ok = worst < 1e-6 and dry_bad == 0
    record("5. self-fusion identity", ok, f"wet rel err {worst:.2e}, nonzero dry pixels {dry_bad}")
    assert worst < 1e-6
    assert dry_bad == 0


@pytest.fixture(scope="session")
def ensemble():
    t0 = time.perf_counter()
    run = run_ensemble(200, seed=0)
    return run, time.perf_counter() - t0


def test_criterion_6_qualitative_ordering(ensemble):
    run, elapsed = ensemble
    med = run.evaluation.median_score
    checks = {c.name: c for c in qualitative_checks(run)}
    names = [
        "median FAR pyramid > fused",
        "median POD fused >= a",
        "median POD fused >= b",
        "median TS fused >= a",
        "median TS fused >= b",
    ]
    ok = all(checks[n].passed for n in names) and elapsed < 600
    detail = (
        f"FAR pyr {med('pyramid', 'far'):.3f} > fused {med('fused', 'far'):.3f}; "
        f"POD fused {med('fused', 'pod'):.3f} vs {med('a', 'pod'):.3f}/{med('b', 'pod'):.3f}; "
        f"TS fused {med('fused', 'ts'):.3f} vs {med('a', 'ts'):.3f}/{med('b', 'ts'):.3f}; "
        f"{len(run.accepted)} pairs, {elapsed:.0f}s"
    )
    record("6. qualitative ordering", ok, detail)
    for n in names:
        assert checks[n].passed, n
    assert elapsed < 600


def test_criterion_7_distribution_recovery(ensemble):
    run, _ = ensemble
    ks = {r.product: r for r in ks_rows(run.evaluation, 0.05, "pooled")}
    fused, pyr = ks["fused"], ks["pyramid"]
    ok = fused.statistic < pyr.statistic
    verdict = "rejected" if fused.reject else "not rejected"
    record(
        "7. distribution recovery",
        ok,
        f"D fused {fused.statistic:.4f} < pyramid {pyr.statistic:.4f}; "
        f"fused KS at 0.05 {verdict} (critical {fused.critical:.4f}, recorded only)",
    )
    assert ok


def test_criterion_8_missing_set_contract(ensemble):
    run, _ = ensemble
    n_ok = sum(run.missing_contract)
    ok = n_ok == len(run.missing_contract) == len(run.accepted)
    record("8. missing-set contract", ok, f"{n_ok}/{len(run.accepted)} pairs exact")
    assert ok


def test_criterion_9_determinism(tmp_path):
    def files(d):
        return {
            p.relative_to(d).as_posix(): p.read_bytes()
            for p in sorted(d.rglob("*"))
            if p.is_file() and p.name != "manifest.json"
        }

    for d in ("run1", "run2"):
        assert main(["reproduce", str(tmp_path / d), "--seed", "0"]) == 0
    f1, f2 = files(tmp_path / "run1"), files(tmp_path / "run2")
    differ = sorted(k for k in f1.keys() | f2.keys() if f1.get(k) != f2.get(k))
    record("9. determinism", not differ and len(f1) > 0, f"{len(f1)} report files compared, {len(differ)} differ")
    assert not differ
