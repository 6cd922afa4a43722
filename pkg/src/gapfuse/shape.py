"""Shape production: where rain may occur, from a plain two-image average."""

from __future__ import annotations

import numpy as np

from .grid import RainGrid, ShapeGrid, check_same_dims

__all__ = ["interpolate_pair", "produce_shape"]


def interpolate_pair(a: RainGrid, b: RainGrid) -> RainGrid:
    """Per-pixel merge of two grids.

    Both valid: the mean. One valid: that value. Neither: missing.
    """
    check_same_dims(a, b)
    va, vb = a.filled(0.0), b.filled(0.0)
    both = a.valid & b.valid
    values = np.where(both, 0.5 * (va + vb), np.where(a.valid, va, vb))
    return RainGrid(a.meta, values, a.valid | b.valid)


def produce_shape(a: RainGrid, b: RainGrid, rain_threshold: float = 0.0) -> ShapeGrid:
    if not rain_threshold >= 0:
        raise ValueError("rain threshold must be >= 0")
    merged = interpolate_pair(a, b)
    codes = np.where(merged.values > rain_threshold, 1, 0)
    codes[~merged.valid] = -1
    return ShapeGrid(a.meta, codes)
