"""Merge two gappy rain rasters with steerable-pyramid texture fusion
constrained by an interpolated rain-support shape."""

__version__ = "0.1.0"

from .grid import GridMeta, RainGrid, ShapeGrid, common_valid_mask, valid_pixel_count
from .pyramid import build_steerable, reconstruct_steerable, build_laplacian, reconstruct_laplacian, max_levels
from .fusion import FusionConfig, avms_merge, fuse_subimage_pair, produce_texture
from .shape import interpolate_pair, produce_shape
from .compose import produce_fused, run_pipeline, baseline_interpolation, baseline_pyramid
from .gridio import read_grid, write_grid

__all__ = [
    "GridMeta",
    "RainGrid",
    "ShapeGrid",
    "common_valid_mask",
    "valid_pixel_count",
    "build_steerable",
    "reconstruct_steerable",
    "build_laplacian",
    "reconstruct_laplacian",
    "max_levels",
    "FusionConfig",
    "avms_merge",
    "fuse_subimage_pair",
    "produce_texture",
    "interpolate_pair",
    "produce_shape",
    "produce_fused",
    "run_pipeline",
    "baseline_interpolation",
    "baseline_pyramid",
    "read_grid",
    "write_grid",
]
