"""Detection scores, empirical distributions and the two-sample KS test."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence

import numpy as np

from .grid import GridError, RainGrid, check_same_dims

__all__ = [
    "UndefinedScore",
    "ContingencyTable",
    "DetectionScores",
    "EmpiricalDistribution",
    "KsResult",
    "contingency",
    "pod",
    "far",
    "ts",
    "scores",
    "intensity_samples",
    "ks_critical_value",
    "ks_two_sample",
    "score_cdf",
    "histogram_pdf",
]

log = logging.getLogger(__name__)


class UndefinedScore(ArithmeticError):
    """A skill score whose denominator is zero."""


@dataclass(frozen=True)
class ContingencyTable:
    hits: int = 0
    misses: int = 0
    false_alarms: int = 0
    correct_negatives: int = 0

    def __post_init__(self):
        if min(self.hits, self.misses, self.false_alarms, self.correct_negatives) < 0:
            raise ValueError("contingency counts must be non-negative")

    @property
    def total(self) -> int:
        return self.hits + self.misses + self.false_alarms + self.correct_negatives

    def __add__(self, other: "ContingencyTable") -> "ContingencyTable":
        return ContingencyTable(
            self.hits + other.hits,
            self.misses + other.misses,
            self.false_alarms + other.false_alarms,
            self.correct_negatives + other.correct_negatives,
        )


def contingency(truth: RainGrid, pred: RainGrid, threshold: float = 0.0) -> ContingencyTable:
    """Count rain detection agreement over pixels valid in both grids.

    A pixel is a rain event when its intensity exceeds ``threshold``.
    """
    check_same_dims(truth, pred)
    both = truth.valid & pred.valid
    t = truth.values[both] > threshold
    p = pred.values[both] > threshold
    return ContingencyTable(
        hits=int(np.count_nonzero(t & p)),
        misses=int(np.count_nonzero(t & ~p)),
        false_alarms=int(np.count_nonzero(~t & p)),
        correct_negatives=int(np.count_nonzero(~t & ~p)),
    )


def _ratio(num: int, den: int, name: str) -> float:
    if den == 0:
        raise UndefinedScore(f"{name} undefined: zero denominator")
    return num / den


def pod(t: ContingencyTable) -> float:
    return _ratio(t.hits, t.hits + t.misses, "POD")


def far(t: ContingencyTable) -> float:
    return _ratio(t.false_alarms, t.hits + t.false_alarms, "FAR")


def ts(t: ContingencyTable) -> float:
    return _ratio(t.hits, t.hits + t.misses + t.false_alarms, "TS")


@dataclass(frozen=True)
class DetectionScores:
    """POD, FAR and TS; ``None`` marks a score with a zero denominator."""

    pod: Optional[float]
    far: Optional[float]
    ts: Optional[float]

    @classmethod
    def from_table(cls, t: ContingencyTable) -> "DetectionScores":
        def safe(fn):
            try:
                return fn(t)
            except UndefinedScore:
                return None

        return cls(safe(pod), safe(far), safe(ts))

    def as_dict(self) -> dict:
        return {"pod": self.pod, "far": self.far, "ts": self.ts}


def scores(t: ContingencyTable) -> DetectionScores:
    return DetectionScores.from_table(t)


class EmpiricalDistribution:
    """Right-continuous step CDF of a finite sample."""

    def __init__(self, samples: Iterable[float], excluded: int = 0):
        if not isinstance(samples, np.ndarray):
            samples = list(samples)
        s = np.sort(np.asarray(samples, dtype=float).ravel())
        if s.size == 0:
            raise ValueError("empirical distribution needs at least one sample")
        if not np.all(np.isfinite(s)):
            raise ValueError("samples must be finite")
        s.setflags(write=False)
        self.samples = s
        # undefined inputs dropped before construction
        self.excluded = excluded

    def __len__(self) -> int:
        return self.samples.size

    def cdf(self, x):
        """Fraction of samples ``<= x``."""
        return np.searchsorted(self.samples, x, side="right") / self.samples.size

    def steps(self):
        """Distinct sample values and the CDF just after each."""
        xs = np.unique(self.samples)
        return xs, self.cdf(xs)

    def quantile(self, q: float) -> float:
        return float(np.quantile(self.samples, q))


def score_cdf(values: Sequence[Optional[float]], name: str = "score") -> EmpiricalDistribution:
    """CDF over per-image scores, dropping undefined (``None``/NaN) entries."""
    kept = [float(v) for v in values if v is not None and not math.isnan(v)]
    dropped = len(values) - len(kept)
    if not kept:
        raise UndefinedScore(f"every {name} in the ensemble is undefined")
    if dropped:
        log.info("%s: excluded %d undefined of %d", name, dropped, len(values))
    return EmpiricalDistribution(kept, excluded=dropped)


def intensity_samples(grids: Sequence[RainGrid], mask) -> List[np.ndarray]:
    """Values of each grid at ``mask`` pixels, in the same row-major order."""
    mask = np.asarray(mask, dtype=bool)
    check_same_dims(*grids, mask)
    out = []
    for g in grids:
        if np.any(mask & ~g.valid):
            raise GridError("mask selects pixels that are missing in a grid")
        out.append(np.array(g.values[mask]))
    return out


@dataclass(frozen=True)
class KsResult:
    statistic: float
    critical: float
    reject: bool
    alpha: float
    n: int
    m: int


def ks_critical_value(n: int, m: int, alpha: float = 0.05) -> float:
    """Large-sample two-sample KS threshold ``c(alpha) * sqrt((n+m)/(n*m))``.

    ``c(alpha) = sqrt(-ln(alpha/2) / 2)``, which is 1.358 at alpha = 0.05.
    """
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    c = math.sqrt(-math.log(alpha / 2) / 2)
    return c * math.sqrt((n + m) / (n * m))


def ks_statistic(a, b) -> float:
    a = np.sort(np.asarray(a, dtype=float).ravel())
    b = np.sort(np.asarray(b, dtype=float).ravel())
    if a.size == 0 or b.size == 0:
        raise ValueError("KS test needs two non-empty samples")
    pts = np.concatenate([a, b])
    fa = np.searchsorted(a, pts, side="right") / a.size
    fb = np.searchsorted(b, pts, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def ks_two_sample(a, b, alpha: float = 0.05) -> KsResult:
    """Two-sample Kolmogorov-Smirnov test with the asymptotic threshold."""
    d = ks_statistic(a, b)
    n, m = np.size(a), np.size(b)
    crit = ks_critical_value(n, m, alpha)
    return KsResult(d, crit, d > crit, alpha, int(n), int(m))


def histogram_pdf(samples, bin_width: float = 0.5, upper: Optional[float] = None):
    """Fixed-width density histogram starting at 0 mm/hr.

    Returns ``(edges, density)``; density integrates to one over the bins.
    """
    s = np.asarray(samples, dtype=float)
    if bin_width <= 0:
        raise ValueError("bin width must be positive")
    top = float(np.max(s)) if upper is None and s.size else (upper or 0.0)
    nbins = max(1, int(math.floor(top / bin_width)) + 1)
    edges = np.arange(nbins + 1) * bin_width
    counts, _ = np.histogram(s, bins=edges)
    density = counts / (s.size * bin_width) if s.size else np.zeros(nbins)
    return edges, density
