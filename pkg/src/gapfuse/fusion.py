"""Texture production: merge two rain images in the steerable-pyramid domain.

Each pair of corresponding subbands is itself split with a Laplacian
pyramid, the two Laplacian pyramids are merged level by level with
absolute-value-maximum selection (AVMS), and the merged subband is
rebuilt. The fused subbands are then inverted back to an image.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .grid import GridError, RainGrid, check_same_dims
from .pyramid import (
    DepthError,
    LaplacianPyramid,
    build_laplacian,
    build_steerable,
    max_levels,
    reconstruct_laplacian,
    reconstruct_steerable,
)

__all__ = ["FusionConfig", "avms_merge", "fuse_subimage_pair", "produce_texture"]

FillPolicy = Literal["zero", "cross"]


@dataclass(frozen=True)
class FusionConfig:
    """Parameters of the texture branch.

    ``missing_fill`` decides what enters the transform at missing pixels:
    ``"cross"`` borrows the other image's value where that one is valid
    (0 where both are missing), ``"zero"`` uses 0 mm/hr. Zero fill turns
    each gap boundary into a strong edge that AVMS then prefers over the
    other image's real coefficients.
    """

    levels: int = 4
    orientations: int = 16
    inner_depth: int = 2
    missing_fill: FillPolicy = "cross"
    rain_threshold: float = 0.0

    def __post_init__(self):
        if self.levels < 0:
            raise DepthError(f"levels must be non-negative, got {self.levels}")
        if self.orientations < 1:
            raise ValueError(f"orientations must be >= 1, got {self.orientations}")
        if self.inner_depth < 0:
            raise DepthError(f"inner depth must be non-negative, got {self.inner_depth}")
        if self.missing_fill not in ("zero", "cross"):
            raise ValueError(f"unknown fill policy {self.missing_fill!r}")
        if not self.rain_threshold >= 0:
            raise ValueError("rain threshold must be >= 0")

    def validate_for(self, width: int, height: int) -> None:
        deepest = max_levels(width, height)
        if self.levels > deepest:
            raise DepthError(
                f"{self.levels} levels requested, at most {deepest} possible for {width}x{height}"
            )


def avms_merge(a, b) -> np.ndarray:
    """Pick, elementwise, the coefficient with the larger magnitude.

    Ties go to ``a``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise GridError(f"coefficient shapes differ: {a.shape} vs {b.shape}")
    return np.where(np.abs(a) >= np.abs(b), a, b)


def fuse_subimage_pair(a, b, inner_depth: int = 2) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise GridError(f"subimage shapes differ: {a.shape} vs {b.shape}")
    pa = build_laplacian(a, inner_depth)
    pb = build_laplacian(b, inner_depth)
    merged = LaplacianPyramid(
        [avms_merge(da, db) for da, db in zip(pa.details, pb.details)],
        avms_merge(pa.base, pb.base),
    )
    return reconstruct_laplacian(merged)


def _prefill(a: RainGrid, b: RainGrid, policy: FillPolicy):
    xa, xb = a.filled(0.0), b.filled(0.0)
    if policy == "cross":
        xa = np.where(a.valid, xa, xb)
        xb = np.where(b.valid, xb, a.filled(0.0))
    return xa, xb


def produce_texture(a: RainGrid, b: RainGrid, cfg: FusionConfig = FusionConfig()) -> np.ndarray:
    """Fuse two rain grids into a gap-free intensity field.

    The result may hold small negative values where the reconstruction
    undershoots; :func:`gapfuse.compose.produce_fused` clamps them.
    """
    check_same_dims(a, b)
    h, w = a.shape
    cfg.validate_for(w, h)
    xa, xb = _prefill(a, b, cfg.missing_fill)
    pa = build_steerable(xa, cfg.levels, cfg.orientations)
    pb = build_steerable(xb, cfg.levels, cfg.orientations)
    fused = []
    for ba, bb in zip(pa.bands(), pb.bands()):
        depth = min(cfg.inner_depth, max_levels(ba.shape[1], ba.shape[0]))
        fused.append(fuse_subimage_pair(ba, bb, depth))
    return reconstruct_steerable(pa.replace_bands(fused))
