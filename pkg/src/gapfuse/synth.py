"""Synthetic rain scenes and gappy satellite-like observations of them.

This is a test fixture, not a rainfall model: truth fields are a handful of
Gaussian rain cells with log-normal peak intensities, cut by a soft
threshold to leave a dry background. Observations drop everything outside a
swath and perturb what is left with multiplicative log-normal noise, an
optional detection floor and optional spurious light rain.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace
from typing import Iterator, Literal, Optional

import numpy as np

from .grid import GridMeta, RainGrid, MIN_VALID_PIXELS, valid_pixel_count

__all__ = [
    "ParameterError",
    "PairRejected",
    "SceneParams",
    "SwathSpec",
    "EnsembleParams",
    "ObservedPair",
    "gen_truth",
    "observe",
    "swath_mask",
    "gen_pair",
    "iter_ensemble",
]

SwathKind = Literal["band", "disk", "random-blocks"]

# log-space spread of cell peak intensities and of cell widths
_AMP_LOG_SIGMA = 0.6
_WIDTH_LOG_SIGMA = 0.3
_BLOCK = 8


class ParameterError(ValueError):
    pass


class PairRejected(Exception):
    """A generated pair failed the minimum-valid-pixel selection rule."""

    def __init__(self, message, counts):
        super().__init__(message)
        self.counts = counts


@dataclass(frozen=True)
class SceneParams:
    seed: int = 0
    width: int = 64
    height: int = 64
    cell_count: float = 8.0
    cell_scale: float = 5.0
    intensity_scale: float = 4.0
    wet_fraction_target: float = 0.3

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ParameterError("scene dimensions must be positive")
        if self.cell_count < 0 or self.cell_scale <= 0 or self.intensity_scale <= 0:
            raise ParameterError("cell_count must be >= 0, cell_scale and intensity_scale > 0")
        if not 0 < self.wet_fraction_target < 1:
            raise ParameterError("wet_fraction_target must lie in (0, 1)")


@dataclass(frozen=True)
class SwathSpec:
    """Where and how a sensor sees the scene.

    ``position`` in [0, 1] places a band across its sweep range and a disk
    centre along the diagonal; ``None`` draws it from ``seed``. In-swath
    values below ``detection_floor`` read as 0, and each dry in-swath pixel
    reports exponential light rain of mean ``false_alarm_scale`` with
    probability ``false_alarm_rate``.
    """

    kind: SwathKind = "band"
    coverage_fraction: float = 0.5
    angle: float = 0.0
    noise_sigma: float = 0.0
    seed: int = 0
    position: Optional[float] = None
    detection_floor: float = 0.0
    false_alarm_rate: float = 0.0
    false_alarm_scale: float = 0.5

    def __post_init__(self):
        if self.kind not in ("band", "disk", "random-blocks"):
            raise ParameterError(f"unknown swath kind {self.kind!r}")
        if not 0 < self.coverage_fraction <= 1:
            raise ParameterError("coverage_fraction must lie in (0, 1]")
        if self.noise_sigma < 0 or self.detection_floor < 0 or self.false_alarm_scale <= 0:
            raise ParameterError("noise_sigma and detection_floor must be >= 0, false_alarm_scale > 0")
        if not 0 <= self.false_alarm_rate <= 1:
            raise ParameterError("false_alarm_rate must lie in [0, 1]")
        if self.position is not None and not 0 <= self.position <= 1:
            raise ParameterError("position must lie in [0, 1]")


def gen_truth(p: SceneParams, cell_size_deg: float = 0.25) -> RainGrid:
    meta = GridMeta(p.width, p.height, cell_size_deg)
    rng = np.random.default_rng(p.seed)
    n = 0 if p.cell_count == 0 else max(1, int(rng.poisson(p.cell_count)))
    if n == 0:
        return RainGrid(meta, np.zeros(meta.shape))

    yy, xx = np.mgrid[0 : p.height, 0 : p.width].astype(float)
    cy = rng.uniform(0, p.height, n)
    cx = rng.uniform(0, p.width, n)
    width = p.cell_scale * np.exp(rng.normal(0, _WIDTH_LOG_SIGMA, n))
    amp = p.intensity_scale * np.exp(rng.normal(0, _AMP_LOG_SIGMA, n))
    field_ = np.zeros(meta.shape)
    for i in range(n):
        d2 = (yy - cy[i]) ** 2 + (xx - cx[i]) ** 2
        field_ += amp[i] * np.exp(-0.5 * d2 / width[i] ** 2)

    cut = np.quantile(field_, 1.0 - p.wet_fraction_target)
    values = np.clip(field_ - cut, 0.0, None)
    wet = np.count_nonzero(values > 0) / values.size
    if abs(wet - p.wet_fraction_target) > 0.1:
        raise ParameterError(
            f"wet fraction {wet:.3f} cannot reach target {p.wet_fraction_target:.3f}"
        )
    return RainGrid(meta, values)


def swath_mask(shape, s: SwathSpec) -> np.ndarray:
    """Boolean footprint of a swath on a ``(height, width)`` grid."""
    h, w = shape
    rng = np.random.default_rng([s.seed, 1])
    pos = rng.uniform() if s.position is None else s.position
    if s.coverage_fraction >= 1:
        return np.ones(shape, dtype=bool)

    yy, xx = np.mgrid[0:h, 0:w].astype(float)
    if s.kind == "band":
        # band runs along `angle` (0 = horizontal); measure across it
        t = np.deg2rad(s.angle)
        across = -xx * np.sin(t) + yy * np.cos(t)
        lo_edge, span = across.min(), across.max() + 1.0 - across.min()
        target = int(np.ceil(s.coverage_fraction * h * w))

        def band(width):
            start = lo_edge + pos * (span - width)
            return (across >= start) & (across < start + width)

        # bands are nested as width grows, so bisect for the narrowest one
        # that reaches the target pixel count
        lo, hi = 0.0, span
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if np.count_nonzero(band(mid)) >= target:
                hi = mid
            else:
                lo = mid
        return band(hi)
    if s.kind == "disk":
        radius = np.sqrt(s.coverage_fraction * h * w / np.pi)
        cy = pos * (h - 1) if s.position is not None else rng.uniform(0, h)
        cx = pos * (w - 1) if s.position is not None else rng.uniform(0, w)
        return (yy - cy) ** 2 + (xx - cx) ** 2 <= radius**2
    # random-blocks
    by, bx = -(-h // _BLOCK), -(-w // _BLOCK)
    nblocks = by * bx
    keep = max(1, int(round(s.coverage_fraction * nblocks)))
    chosen = np.zeros(nblocks, dtype=bool)
    chosen[rng.permutation(nblocks)[:keep]] = True
    blocks = chosen.reshape(by, bx)
    return np.kron(blocks, np.ones((_BLOCK, _BLOCK), dtype=bool))[:h, :w]


def observe(truth: RainGrid, s: SwathSpec) -> RainGrid:
    mask = swath_mask(truth.shape, s) & truth.valid
    rng = np.random.default_rng([s.seed, 2])
    noise = np.exp(rng.normal(0.0, s.noise_sigma, truth.shape)) if s.noise_sigma > 0 else 1.0
    values = truth.filled(0.0) * noise
    if s.detection_floor > 0:
        values[values < s.detection_floor] = 0.0
    if s.false_alarm_rate > 0:
        spurious = (values == 0) & (rng.uniform(size=truth.shape) < s.false_alarm_rate)
        values[spurious] = rng.exponential(s.false_alarm_scale, truth.shape)[spurious]
    return RainGrid(truth.meta, values, mask)


@dataclass(frozen=True)
class ObservedPair:
    truth: RainGrid
    a: RainGrid
    b: RainGrid


def gen_pair(
    p: SceneParams, sa: SwathSpec, sb: SwathSpec, min_valid: int = MIN_VALID_PIXELS
) -> ObservedPair:
    """Truth plus two observations; raises PairRejected if either is too sparse."""
    truth = gen_truth(p)
    a, b = observe(truth, sa), observe(truth, sb)
    counts = (valid_pixel_count(a), valid_pixel_count(b))
    if min(counts) < min_valid:
        raise PairRejected(f"valid pixel counts {counts} below {min_valid}", counts)
    return ObservedPair(truth, a, b)


@dataclass(frozen=True)
class EnsembleParams:
    """Recipe for drawing many scene/swath combinations from one seed.

    Each pair gets its own scene seed, and two band swaths with random
    angle, position and coverage in ``coverage_range``.
    """

    scene: SceneParams = field(default_factory=SceneParams)
    coverage_range: tuple = (0.35, 0.75)
    noise_sigma: float = 0.5
    detection_floor: float = 1.0
    false_alarm_rate: float = 0.02
    false_alarm_scale: float = 0.5

    def as_dict(self) -> dict:
        return asdict(self)

    def draw(self, seed: int, index: int):
        rng = np.random.default_rng([seed, index])
        scene = replace(self.scene, seed=int(rng.integers(2**31)))
        swaths = []
        for _ in range(2):
            swaths.append(
                SwathSpec(
                    kind="band",
                    coverage_fraction=float(rng.uniform(*self.coverage_range)),
                    angle=float(rng.uniform(0, 180)),
                    noise_sigma=self.noise_sigma,
                    seed=int(rng.integers(2**31)),
                    position=float(rng.uniform()),
                    detection_floor=self.detection_floor,
                    false_alarm_rate=self.false_alarm_rate,
                    false_alarm_scale=self.false_alarm_scale,
                )
            )
        return scene, swaths[0], swaths[1]


def iter_ensemble(n_pairs: int, seed: int = 0, params: EnsembleParams = EnsembleParams()) -> Iterator:
    """Yield ``(index, pair_or_None)``; None marks a rejected pair."""
    for i in range(n_pairs):
        scene, sa, sb = params.draw(seed, i)
        try:
            yield i, gen_pair(scene, sa, sb)
        except PairRejected:
            yield i, None
