"""Synthetic-ensemble comparison of the fused product with its baselines."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .compose import baseline_interpolation, baseline_pyramid, run_pipeline
from .fusion import FusionConfig
from .report import Evaluation, ks_rows
from .synth import EnsembleParams, ObservedPair, iter_ensemble

PRODUCTS = ("a", "b", "fused", "interp", "pyramid")
THREADS_ENV = "GAPFUSE_THREADS"


def worker_count() -> int:
    """Worker cap from ``GAPFUSE_THREADS``; defaults to min(4, cpu count)."""
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be an integer, got {env!r}") from None
    return max(1, min(4, os.cpu_count() or 1))


def products_for(pair: ObservedPair, cfg: FusionConfig) -> dict:
    return {
        "a": pair.a,
        "b": pair.b,
        "fused": run_pipeline(pair.a, pair.b, cfg),
        "interp": baseline_interpolation(pair.a, pair.b),
        "pyramid": baseline_pyramid(pair.a, pair.b, cfg),
    }


@dataclass
class EnsembleRun:
    n_requested: int
    seed: int
    evaluation: Evaluation
    accepted: List[int] = field(default_factory=list)
    rejected: List[int] = field(default_factory=list)
    missing_contract: List[bool] = field(default_factory=list)
    first_pair: Optional[tuple] = None


def run_ensemble(
    n_pairs: int = 200,
    seed: int = 0,
    params: EnsembleParams = EnsembleParams(),
    cfg: FusionConfig = FusionConfig(),
    threads: Optional[int] = None,
) -> EnsembleRun:
    """Generate pairs, run every method on each, score against truth.

    Results are collected in pair order, so the outcome does not depend on
    the number of workers.
    """
    ev = Evaluation(list(PRODUCTS))
    run = EnsembleRun(n_pairs, seed, ev)
    items = list(iter_ensemble(n_pairs, seed, params))
    for i, pair in items:
        (run.accepted if pair is not None else run.rejected).append(i)
    good = [(i, p) for i, p in items if p is not None]

    with ThreadPoolExecutor(max_workers=threads or worker_count()) as pool:
        outputs = list(pool.map(lambda ip: products_for(ip[1], cfg), good))

    for (i, pair), prods in zip(good, outputs):
        ev.add_image(f"pair_{i:04d}", pair.truth, prods, cfg.rain_threshold)
        both_missing = ~pair.a.valid & ~pair.b.valid
        run.missing_contract.append(bool(np.array_equal(~prods["fused"].valid, both_missing)))
        if run.first_pair is None:
            run.first_pair = (i, pair, prods)
    return run


@dataclass
class Check:
    name: str
    lhs: float
    relation: str
    rhs: float
    passed: bool
    asserted: bool = True


def qualitative_checks(run: EnsembleRun, alpha: float = 0.05) -> List[Check]:
    """The orderings the fused method is expected to show on an ensemble."""
    ev = run.evaluation
    med = ev.median_score
    checks = [
        Check("median FAR pyramid > fused", med("pyramid", "far"), ">", med("fused", "far"),
              med("pyramid", "far") > med("fused", "far")),
    ]
    for score in ("pod", "ts"):
        for src in ("a", "b"):
            lhs, rhs = med("fused", score), med(src, score)
            checks.append(Check(f"median {score.upper()} fused >= {src}", lhs, ">=", rhs, lhs >= rhs))

    ks = {r.product: r for r in ks_rows(ev, alpha, "pooled")}
    d_fused, d_pyr = ks["fused"].statistic, ks["pyramid"].statistic
    if d_fused is None or d_pyr is None:
        checks.append(Check("KS D fused < pyramid", np.nan, "<", np.nan, False))
    else:
        checks.append(Check("KS D fused < pyramid", d_fused, "<", d_pyr, d_fused < d_pyr))
        checks.append(
            Check(f"KS fused not rejected at alpha={alpha}", d_fused, "<=", ks["fused"].critical,
                  not ks["fused"].reject, asserted=False)
        )
    n_ok = sum(run.missing_contract)
    checks.append(
        Check("fused missing set == both-missing set", n_ok, "==", len(run.missing_contract),
              n_ok == len(run.missing_contract))
    )
    return checks
