"""Final fused product and the two reference methods it is compared with."""

from __future__ import annotations

import numpy as np

from .fusion import FusionConfig, produce_texture
from .grid import GridError, RainGrid, ShapeGrid
from .shape import interpolate_pair, produce_shape

__all__ = [
    "produce_fused",
    "run_pipeline",
    "baseline_interpolation",
    "baseline_pyramid",
    "METHODS",
    "run_method",
]


def produce_fused(texture, shape: ShapeGrid) -> RainGrid:
    """Apply the shape to the texture.

    Shape 1 takes the texture value clamped at zero, shape 0 gives 0 mm/hr,
    shape -1 stays missing.
    """
    texture = np.asarray(texture, dtype=float)
    if texture.shape != shape.meta.shape:
        raise GridError(f"texture shape {texture.shape} != shape grid {shape.meta.shape}")
    wet = shape.codes == ShapeGrid.WET
    values = np.where(wet, np.clip(texture, 0.0, None), 0.0)
    return RainGrid(shape.meta, values, shape.codes != ShapeGrid.MISSING)


def run_pipeline(a: RainGrid, b: RainGrid, cfg: FusionConfig = FusionConfig()) -> RainGrid:
    h, w = a.shape
    cfg.validate_for(w, h)
    shape = produce_shape(a, b, cfg.rain_threshold)
    if not np.any(shape.codes != ShapeGrid.MISSING):
        # nothing observed; skip the transform entirely
        return RainGrid.missing(a.meta)
    return produce_fused(produce_texture(a, b, cfg), shape)


def baseline_interpolation(a: RainGrid, b: RainGrid) -> RainGrid:
    return interpolate_pair(a, b)


def baseline_pyramid(a: RainGrid, b: RainGrid, cfg: FusionConfig = FusionConfig()) -> RainGrid:
    """Texture alone, clamped at zero, with every pixel reported valid."""
    texture = produce_texture(a, b, cfg)
    return RainGrid(a.meta, np.clip(texture, 0.0, None))


METHODS = ("fused", "interp", "pyramid")


def run_method(method: str, a: RainGrid, b: RainGrid, cfg: FusionConfig = FusionConfig()) -> RainGrid:
    if method == "fused":
        return run_pipeline(a, b, cfg)
    if method == "interp":
        return baseline_interpolation(a, b)
    if method == "pyramid":
        return baseline_pyramid(a, b, cfg)
    raise ValueError(f"unknown method {method!r}; choose from {METHODS}")
