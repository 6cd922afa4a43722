"""Raster types with explicit missing-pixel masks.

Missing pixels are tracked by a boolean ``valid`` mask next to the value
array; no sentinel intensity is ever stored in memory. Values at missing
pixels are held at 0.0 so they stay finite, but nothing reads them as
rain.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

__all__ = [
    "GridError",
    "GridMeta",
    "RainGrid",
    "ShapeGrid",
    "MIN_VALID_PIXELS",
    "valid_pixel_count",
    "common_valid_mask",
    "passes_selection",
]

# Minimum number of non-missing pixels an image needs to enter an analysis.
MIN_VALID_PIXELS = 40


class GridError(ValueError):
    """Invalid raster contents or mismatched raster dimensions."""


@dataclass(frozen=True)
class GridMeta:
    width: int
    height: int
    cell_size_deg: float = 0.25
    origin_lat: Optional[float] = None
    origin_lon: Optional[float] = None

    def __post_init__(self):
        if int(self.width) < 1 or int(self.height) < 1:
            raise GridError(f"grid must be at least 1x1, got {self.width}x{self.height}")
        if not (self.cell_size_deg > 0 and np.isfinite(self.cell_size_deg)):
            raise GridError(f"cell size must be positive, got {self.cell_size_deg}")

    @property
    def shape(self) -> tuple[int, int]:
        """Array shape ``(height, width)``."""
        return (self.height, self.width)

    def same_dims(self, other: "GridMeta") -> bool:
        return self.shape == other.shape


@dataclass(frozen=True, eq=False)
class RainGrid:
    """Rain intensities in mm/hr plus a validity mask.

    Parameters
    ----------
    meta : GridMeta
    values : array_like, shape (height, width)
        Intensities. Entries under ``valid == False`` are ignored and zeroed.
    valid : array_like of bool, optional
        ``True`` where the pixel was observed. Defaults to all valid.
    """

    meta: GridMeta
    values: np.ndarray
    valid: np.ndarray = field(default=None)

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != self.meta.shape:
            raise GridError(f"values have shape {values.shape}, meta expects {self.meta.shape}")
        if self.valid is None:
            valid = np.ones(values.shape, dtype=bool)
        else:
            valid = np.array(self.valid, dtype=bool)
            if valid.shape != values.shape:
                raise GridError(f"mask shape {valid.shape} != values shape {values.shape}")
        v = values[valid]
        if not np.all(np.isfinite(v)):
            raise GridError("valid pixels must hold finite intensities")
        if np.any(v < 0):
            raise GridError("valid pixels must hold non-negative intensities")
        values[~valid] = 0.0
        values.setflags(write=False)
        valid.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "valid", valid)

    @classmethod
    def from_array(cls, values, valid=None, cell_size_deg: float = 0.25) -> "RainGrid":
        values = np.asarray(values, dtype=float)
        if values.ndim != 2:
            raise GridError("rain grid must be two-dimensional")
        h, w = values.shape
        return cls(GridMeta(w, h, cell_size_deg), values, valid)

    @classmethod
    def missing(cls, meta: GridMeta) -> "RainGrid":
        return cls(meta, np.zeros(meta.shape), np.zeros(meta.shape, dtype=bool))

    @property
    def shape(self) -> tuple[int, int]:
        return self.meta.shape

    def filled(self, fill: float = 0.0) -> np.ndarray:
        """Copy of the values with missing pixels set to ``fill``."""
        out = np.array(self.values)
        out[~self.valid] = fill
        return out

    def masked(self) -> np.ndarray:
        """Copy of the values with NaN at missing pixels (for plotting)."""
        return self.filled(np.nan)

    def equals(self, other: "RainGrid") -> bool:
        return (
            self.meta.same_dims(other.meta)
            and np.array_equal(self.valid, other.valid)
            and np.array_equal(self.values[self.valid], other.values[other.valid])
        )


@dataclass(frozen=True, eq=False)
class ShapeGrid:
    """Ternary rain-support raster: -1 missing, 0 no rain, 1 rain possible."""

    meta: GridMeta
    codes: np.ndarray

    MISSING = -1
    DRY = 0
    WET = 1

    def __post_init__(self):
        codes = np.array(self.codes, dtype=np.int8)
        if codes.shape != self.meta.shape:
            raise GridError(f"codes have shape {codes.shape}, meta expects {self.meta.shape}")
        if not np.all(np.isin(codes, (-1, 0, 1))):
            raise GridError("shape codes must lie in {-1, 0, 1}")
        codes.setflags(write=False)
        object.__setattr__(self, "codes", codes)


def check_same_dims(*grids) -> None:
    """Raise GridError unless every grid (or mask/array) has the same shape."""
    shapes = {tuple(g.shape) for g in grids}
    if len(shapes) > 1:
        raise GridError(f"dimension mismatch: {sorted(shapes)}")


def valid_pixel_count(g: RainGrid) -> int:
    return int(np.count_nonzero(g.valid))


def passes_selection(g: RainGrid, min_valid: int = MIN_VALID_PIXELS) -> bool:
    """Whether an image has enough observed pixels to be analysed."""
    return valid_pixel_count(g) >= min_valid


def common_valid_mask(grids: Sequence[RainGrid]) -> np.ndarray:
    """Boolean mask that is true where every grid is valid."""
    grids = list(grids)
    if not grids:
        raise GridError("need at least one grid")
    check_same_dims(*grids)
    mask = np.ones(grids[0].shape, dtype=bool)
    for g in grids:
        mask &= g.valid
    return mask
