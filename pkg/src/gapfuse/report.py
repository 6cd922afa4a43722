"""Ensemble evaluation and the delimited-text reports built from it."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

from .grid import RainGrid, common_valid_mask
from .gridio import atomic_write_text
from .verify import (
    ContingencyTable,
    DetectionScores,
    EmpiricalDistribution,
    UndefinedScore,
    contingency,
    histogram_pdf,
    intensity_samples,
    ks_two_sample,
    score_cdf,
)

log = logging.getLogger(__name__)

SCORE_NAMES = ("pod", "far", "ts")
TRUTH = "truth"


@dataclass
class ImageScore:
    image: str
    product: str
    table: ContingencyTable
    scores: DetectionScores


@dataclass
class Evaluation:
    """Per-image detection scores plus common-valid intensity samples."""

    products: List[str]
    records: List[ImageScore] = field(default_factory=list)
    # per image: {name: samples}, truth included, same pixel order
    samples: List[Dict[str, np.ndarray]] = field(default_factory=list)
    image_names: List[str] = field(default_factory=list)

    def add_image(self, name: str, truth: RainGrid, preds: Dict[str, RainGrid], threshold: float = 0.0):
        for prod in self.products:
            t = contingency(truth, preds[prod], threshold)
            self.records.append(ImageScore(name, prod, t, DetectionScores.from_table(t)))
        grids = [truth] + [preds[p] for p in self.products]
        mask = common_valid_mask(grids)
        vals = intensity_samples(grids, mask)
        self.samples.append(dict(zip([TRUTH, *self.products], vals)))
        self.image_names.append(name)

    def score_values(self, product: str, score: str) -> list:
        return [getattr(r.scores, score) for r in self.records if r.product == product]

    def median_score(self, product: str, score: str) -> float:
        vals = [v for v in self.score_values(product, score) if v is not None]
        return float(np.median(vals)) if vals else math.nan

    def pooled(self, name: str) -> np.ndarray:
        if not self.samples:
            return np.zeros(0)
        return np.concatenate([s[name] for s in self.samples])


def _f(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return "NA"
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def _tsv(header: Sequence[str], rows) -> str:
    out = ["\t".join(header)]
    out.extend("\t".join(_f(v) if not isinstance(v, str) else v for v in row) for row in rows)
    return "\n".join(out) + "\n"


@dataclass
class KsRow:
    scope: str
    product: str
    n: int
    m: int
    statistic: Optional[float]
    critical: Optional[float]
    alpha: float
    reject: Optional[bool]
    status: str


def ks_rows(ev: Evaluation, alpha: float = 0.05, mode: str = "pooled") -> List[KsRow]:
    """KS of each product against truth, pooled over images or per image."""
    if mode not in ("pooled", "per-image"):
        raise ValueError(f"unknown KS mode {mode!r}")
    scopes = [("pooled", {k: ev.pooled(k) for k in [TRUTH, *ev.products]})]
    if mode == "per-image":
        scopes = list(zip(ev.image_names, ev.samples))
    rows = []
    for scope, samp in scopes:
        truth = samp[TRUTH]
        for prod in ev.products:
            if truth.size == 0:
                log.warning("KS skipped for %s/%s: common-valid mask is empty", scope, prod)
                rows.append(KsRow(scope, prod, 0, 0, None, None, alpha, None, "skipped-empty-mask"))
                continue
            r = ks_two_sample(samp[prod], truth, alpha)
            rows.append(KsRow(scope, prod, r.n, r.m, r.statistic, r.critical, alpha, r.reject, "ok"))
    return rows


def write_reports(
    outdir: Path,
    ev: Evaluation,
    alpha: float = 0.05,
    bin_width: float = 0.5,
    ks_mode: str = "pooled",
    plots: bool = True,
) -> Dict[str, object]:
    """Write score, CDF, PDF and KS tables (and figures) into ``outdir``.

    Returns a summary dict with the KS rows and output file names.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    files = []

    def emit(name, text):
        atomic_write_text(outdir / name, text)
        files.append(name)

    emit(
        "scores.tsv",
        _tsv(
            ["image", "product", "hits", "misses", "false_alarms", "correct_negatives", "pod", "far", "ts"],
            (
                [r.image, r.product, r.table.hits, r.table.misses, r.table.false_alarms,
                 r.table.correct_negatives, r.scores.pod, r.scores.far, r.scores.ts]
                for r in ev.records
            ),
        ),
    )

    cdf_rows, summary_rows, cdfs = [], [], {}
    for prod in ev.products:
        for score in SCORE_NAMES:
            vals = ev.score_values(prod, score)
            try:
                dist = score_cdf(vals, f"{prod} {score}")
            except UndefinedScore:
                summary_rows.append([prod, score, 0, len(vals), None])
                continue
            cdfs[(prod, score)] = dist
            xs, ps = dist.steps()
            cdf_rows.extend([prod, score, x, p] for x, p in zip(xs, ps))
            summary_rows.append([prod, score, len(dist), dist.excluded, float(np.median(dist.samples))])
    emit("score_cdf.tsv", _tsv(["product", "score", "value", "cdf"], cdf_rows))
    emit("score_summary.tsv", _tsv(["product", "score", "n_defined", "n_undefined", "median"], summary_rows))

    names = [TRUTH, *ev.products]
    pooled = {k: ev.pooled(k) for k in names}
    top = max((float(v.max()) for v in pooled.values() if v.size), default=0.0)
    pdf_rows, icdf_rows = [], []
    for k in names:
        edges, dens = histogram_pdf(pooled[k], bin_width, upper=top)
        pdf_rows.extend([k, lo, hi, d] for lo, hi, d in zip(edges[:-1], edges[1:], dens))
        if pooled[k].size:
            cdf = EmpiricalDistribution(pooled[k]).cdf(edges)
            icdf_rows.extend([k, x, c] for x, c in zip(edges, cdf))
    emit("intensity_pdf.tsv", _tsv(["product", "bin_lo", "bin_hi", "density"], pdf_rows))
    emit("intensity_cdf.tsv", _tsv(["product", "value", "cdf"], icdf_rows))

    ks = ks_rows(ev, alpha, ks_mode)
    emit(
        "ks.tsv",
        _tsv(
            ["scope", "product", "n", "m", "statistic", "critical", "alpha", "reject", "status"],
            ([r.scope, r.product, r.n, r.m, r.statistic, r.critical, r.alpha, r.reject, r.status] for r in ks),
        ),
    )

    if plots:
        from . import plotting

        files.append(plotting.plot_score_cdfs(outdir / "score_cdf.png", cdfs, ev.products))
        if any(v.size for v in pooled.values()):
            files.append(plotting.plot_intensity(outdir / "intensity_pdf_cdf.png", pooled, bin_width, top))
    return {"files": files, "ks": ks}
