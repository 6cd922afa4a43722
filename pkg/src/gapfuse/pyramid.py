"""Steerable and Laplacian pyramids.

The steerable pyramid is built in the Fourier domain with circular
boundaries. Radial masks use a raised cosine in log2 frequency, angular
masks are ``cos(theta - pi*k/K)**(K-1)`` scaled so the K squared masks sum
to one. Subsampling crops the central frequency quadrant, which is lossless
because the preceding lowpass mask vanishes outside it.

The Laplacian pyramid is the classic spatial construction with the 5-tap
binomial kernel and mirrored edges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Sequence

import numpy as np
from scipy.ndimage import convolve1d

__all__ = [
    "PyramidError",
    "DepthError",
    "MIN_SUBBAND_SIZE",
    "max_levels",
    "FilterBank",
    "filter_bank",
    "SteerablePyramid",
    "build_steerable",
    "reconstruct_steerable",
    "LaplacianPyramid",
    "build_laplacian",
    "reconstruct_laplacian",
]

MIN_SUBBAND_SIZE = 4

# Imaginary residue tolerated when projecting an inverse FFT onto the reals.
IMAG_TOL = 1e-9


class PyramidError(ValueError):
    pass


class DepthError(PyramidError):
    pass


def max_levels(width: int, height: int) -> int:
    """Deepest decomposition whose coarsest subband is still usable.

    Returns the largest ``L`` such that ``min(width, height) / 2**L`` stays at
    or above :data:`MIN_SUBBAND_SIZE` and both dimensions divide by ``2**L``.
    """
    if width < 1 or height < 1:
        raise PyramidError("dimensions must be positive")
    levels = 0
    w, h = width, height
    while w % 2 == 0 and h % 2 == 0 and min(w, h) // 2 >= MIN_SUBBAND_SIZE:
        w //= 2
        h //= 2
        levels += 1
    return levels


# ---------------------------------------------------------------------------
# frequency-domain masks


def _polar_grid(shape):
    h, w = shape
    wy = 2 * np.pi * np.fft.fftfreq(h)
    wx = 2 * np.pi * np.fft.fftfreq(w)
    wy, wx = np.meshgrid(wy, wx, indexing="ij")
    return np.hypot(wx, wy), np.arctan2(wy, wx)


def _radial_low(r, top):
    """1 below top/2, 0 above top, raised cosine in log2(r) between."""
    out = np.zeros_like(r)
    out[r <= top / 2] = 1.0
    mid = (r > top / 2) & (r < top)
    out[mid] = np.cos(0.5 * np.pi * np.log2(2 * r[mid] / top))
    return out


def _radial_high(low):
    return np.sqrt(np.clip(1.0 - low**2, 0.0, None))


def _angular(theta, k, nbands):
    order = nbands - 1
    norm = math.sqrt(
        4.0**order * math.factorial(order) ** 2 / (nbands * math.factorial(2 * order))
    )
    return norm * np.cos(theta - np.pi * k / nbands) ** order


@dataclass(frozen=True)
class FilterBank:
    """Analysis masks for one image shape, depth and orientation count.

    ``highpass0``/``lowpass0`` split the full-resolution spectrum. Entry
    ``l`` of ``radial_high``, ``radial_low`` and ``angular`` holds the masks
    applied at level ``l``, on the grid of that level.
    """

    shape: tuple
    levels: int
    orientations: int
    highpass0: np.ndarray
    lowpass0: np.ndarray
    radial_high: tuple
    radial_low: tuple
    angular: tuple

    def level_shape(self, level: int) -> tuple:
        h, w = self.shape
        return (h >> level, w >> level)

    def band_filter(self, level: int, k: int) -> np.ndarray:
        """Complex bandpass response whose inverse transform is real."""
        phase = (-1j) ** (self.orientations - 1)
        return phase * self.radial_high[level] * self.angular[level][k]

    def tiling_error(self) -> float:
        """Max deviation from unit power across all stages and frequencies."""
        err = np.max(np.abs(self.highpass0**2 + self.lowpass0**2 - 1.0))
        for lvl in range(self.levels):
            total = self.radial_low[lvl] ** 2 + sum(
                np.abs(self.band_filter(lvl, k)) ** 2 for k in range(self.orientations)
            )
            err = max(err, np.max(np.abs(total - 1.0)))
        return float(err)


@lru_cache(maxsize=32)
def filter_bank(shape: tuple, levels: int, orientations: int) -> FilterBank:
    shape = tuple(int(s) for s in shape)
    if orientations < 1:
        raise PyramidError(f"need at least one orientation, got {orientations}")
    deepest = max_levels(shape[1], shape[0])
    if levels < 0 or levels > deepest:
        raise DepthError(f"{levels} levels requested, at most {deepest} possible for {shape}")

    r, _ = _polar_grid(shape)
    lo0 = _radial_low(r, np.pi)
    hi0 = _radial_high(lo0)
    highs, lows, angs = [], [], []
    for lvl in range(levels):
        r, theta = _polar_grid((shape[0] >> lvl, shape[1] >> lvl))
        lo = _radial_low(r, np.pi / 2)
        lows.append(lo)
        highs.append(_radial_high(lo))
        angs.append(tuple(_angular(theta, k, orientations) for k in range(orientations)))
    masks = [hi0, lo0, *highs, *lows] + [a for level in angs for a in level]
    for m in masks:
        m.setflags(write=False)
    return FilterBank(shape, levels, orientations, hi0, lo0, tuple(highs), tuple(lows), tuple(angs))


def _crop(spec):
    h, w = spec.shape
    s = np.fft.fftshift(spec)
    s = s[h // 4 : h // 4 + h // 2, w // 4 : w // 4 + w // 2]
    return np.fft.ifftshift(s)


def _pad(spec):
    h, w = spec.shape
    out = np.zeros((2 * h, 2 * w), dtype=complex)
    out[h // 2 : h // 2 + h, w // 2 : w // 2 + w] = np.fft.fftshift(spec)
    return np.fft.ifftshift(out)


def _real(z):
    scale = max(1.0, float(np.max(np.abs(z.real), initial=0.0)))
    resid = float(np.max(np.abs(z.imag), initial=0.0))
    if resid > IMAG_TOL * scale:
        raise PyramidError(f"imaginary residue {resid:.3g} after inverse transform")
    return np.ascontiguousarray(z.real)


def _fft(x):
    return np.fft.fft2(x, norm="ortho")


def _ifft(X):
    return _real(np.fft.ifft2(X, norm="ortho"))


# ---------------------------------------------------------------------------
# steerable pyramid


@dataclass
class SteerablePyramid:
    """Coefficients of a steerable pyramid.

    Attributes
    ----------
    highpass : ndarray
        Full-resolution residual above the first lowpass cutoff.
    levels : list of list of ndarray
        ``levels[l][k]`` is orientation ``k`` at scale ``l``; shape is the
        input shape divided by ``2**l``.
    lowpass : ndarray
        Final low residual, input shape divided by ``2**L``.
    tight_frame : bool
        If True the transform is orthonormal (coefficient energy equals image
        energy). If False each subsampling keeps amplitudes instead, so a
        constant image gives a lowpass band holding the same constant.
    """

    highpass: np.ndarray
    levels: List[List[np.ndarray]]
    lowpass: np.ndarray
    orientations: int
    tight_frame: bool = True

    @property
    def shape(self) -> tuple:
        return self.highpass.shape

    @property
    def num_levels(self) -> int:
        return len(self.levels)

    def bands(self) -> list:
        """All subbands in a flat list: highpass, oriented bands, lowpass."""
        return [self.highpass, *(b for lvl in self.levels for b in lvl), self.lowpass]

    def replace_bands(self, bands: Sequence[np.ndarray]) -> "SteerablePyramid":
        bands = list(bands)
        if len(bands) != 2 + self.num_levels * self.orientations:
            raise PyramidError("wrong number of subbands")
        K = self.orientations
        levels = [bands[1 + l * K : 1 + (l + 1) * K] for l in range(self.num_levels)]
        return SteerablePyramid(bands[0], levels, bands[-1], K, self.tight_frame)

    def energy(self) -> float:
        return float(sum(np.sum(b**2) for b in self.bands()))


def build_steerable(
    x, levels: int = 4, orientations: int = 16, tight_frame: bool = True
) -> SteerablePyramid:
    """Decompose a real image into a steerable pyramid.

    Parameters
    ----------
    x : array_like, shape (h, w)
        Gap-free real image.
    levels : int
        Number of oriented scales, at most ``max_levels(w, h)``.
    orientations : int
        Number of oriented bands per scale.
    tight_frame : bool
        See :class:`SteerablePyramid`.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 2:
        raise PyramidError("input must be a 2-D image")
    if not np.all(np.isfinite(x)):
        raise PyramidError("input image contains non-finite values")
    fb = filter_bank(x.shape, levels, orientations)

    X = _fft(x)
    highpass = _ifft(X * fb.highpass0)
    lo = X * fb.lowpass0
    bands = []
    for lvl in range(levels):
        bands.append([_ifft(lo * fb.band_filter(lvl, k)) for k in range(orientations)])
        lo = _crop(lo * fb.radial_low[lvl])
        if not tight_frame:
            lo *= 0.5
    return SteerablePyramid(highpass, bands, _ifft(lo), orientations, tight_frame)


def reconstruct_steerable(p: SteerablePyramid) -> np.ndarray:
    """Invert :func:`build_steerable`."""
    shape = np.shape(p.highpass)
    L, K = p.num_levels, p.orientations
    for lvl, bands in enumerate(p.levels):
        want = (shape[0] >> lvl, shape[1] >> lvl)
        if len(bands) != K or any(np.shape(b) != want for b in bands):
            raise PyramidError(f"level {lvl} bands do not match expected shape {want}")
    if np.shape(p.lowpass) != (shape[0] >> L, shape[1] >> L):
        raise PyramidError(f"lowpass shape {np.shape(p.lowpass)} inconsistent with {L} levels")
    fb = filter_bank(shape, L, K)

    lo = _fft(p.lowpass)
    for lvl in reversed(range(L)):
        lo = _pad(lo)
        if not p.tight_frame:
            lo *= 2.0
        lo = lo * fb.radial_low[lvl]
        for k, band in enumerate(p.levels[lvl]):
            lo += _fft(band) * np.conj(fb.band_filter(lvl, k))
    X = _fft(p.highpass) * fb.highpass0 + lo * fb.lowpass0
    return _ifft(X)


# ---------------------------------------------------------------------------
# Laplacian pyramid

_KERNEL = np.array([1.0, 4.0, 6.0, 4.0, 1.0]) / 16.0


def _blur(x, kernel):
    # whole-sample mirror (d c b | a b c d) keeps constants exact through expand
    x = convolve1d(x, kernel, axis=0, mode="mirror")
    return convolve1d(x, kernel, axis=1, mode="mirror")


def _reduce(x):
    return _blur(x, _KERNEL)[::2, ::2]


def _expand(x, shape):
    up = np.zeros(shape)
    up[::2, ::2] = x
    return _blur(up, 2 * _KERNEL)


@dataclass
class LaplacianPyramid:
    details: List[np.ndarray]
    base: np.ndarray

    @property
    def depth(self) -> int:
        return len(self.details)

    def levels(self) -> list:
        return [*self.details, self.base]


def build_laplacian(x, depth: int) -> LaplacianPyramid:
    x = np.asarray(x, dtype=float)
    h, w = x.shape
    deepest = max_levels(w, h)
    if depth < 0 or depth > deepest:
        raise DepthError(f"Laplacian depth {depth} exceeds {deepest} for {x.shape}")
    details = []
    g = x
    for _ in range(depth):
        nxt = _reduce(g)
        details.append(g - _expand(nxt, g.shape))
        g = nxt
    return LaplacianPyramid(details, g)


def reconstruct_laplacian(p: LaplacianPyramid) -> np.ndarray:
    g = np.asarray(p.base, dtype=float)
    for d in reversed(p.details):
        if (d.shape[0] + 1) // 2 != g.shape[0] or (d.shape[1] + 1) // 2 != g.shape[1]:
            raise PyramidError("Laplacian levels do not chain by factors of two")
        g = d + _expand(g, d.shape)
    return g
