"""Skin segmentation on face crops.

Marker pixels come from explicit skin boundaries in two color spaces: hue
below 25 degrees with saturation above 40 percent, unioned with chroma inside
77 < Cb < 127 and 133 < Cr < 173. One erosion and one dilation with a 3x3
square discard single-pixel noise, then a watershed-style region growing pass
extends the cleaned markers against background seeds taken from the
complement of a wider (7x7) dilation. Everything is a pure function of the
input crop, so runs are idempotent and safe to parallelize across images.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .colorspace import rgb_to_hsv_degrees, rgb_to_ycbcr

HSV_MAX_HUE = 25.0        # degrees
HSV_MIN_SATURATION = 40.0  # percent
YCBCR_CB_RANGE = (77.0, 127.0)
YCBCR_CR_RANGE = (133.0, 173.0)


@dataclass(frozen=True)
class SkinMask:
    """Binary skin mask over a face crop."""

    mask: np.ndarray

    @property
    def pixel_count(self) -> int:
        return int(self.mask.sum())


def skin_markers(rgb: np.ndarray) -> np.ndarray:
    """Union of the HSV and YCbCr skin threshold rules."""
    h, s, _v = rgb_to_hsv_degrees(rgb)
    hsv_rule = (h < HSV_MAX_HUE) & (s > HSV_MIN_SATURATION)
    _y, cb, cr = rgb_to_ycbcr(rgb)
    ycbcr_rule = ((cb > YCBCR_CB_RANGE[0]) & (cb < YCBCR_CB_RANGE[1])
                  & (cr > YCBCR_CR_RANGE[0]) & (cr < YCBCR_CR_RANGE[1]))
    return hsv_rule | ycbcr_rule


def _gradient_magnitude(rgb: np.ndarray) -> np.ndarray:
    gray = (0.299 * rgb[..., 0] + 0.587 * rgb[..., 1] + 0.114 * rgb[..., 2])
    gx = ndimage.sobel(gray, axis=0)
    gy = ndimage.sobel(gray, axis=1)
    mag = np.hypot(gx, gy)
    peak = mag.max()
    if peak <= 0:
        return np.zeros(mag.shape, dtype=np.uint8)
    return np.clip(mag * (255.0 / peak), 0, 255).astype(np.uint8)


def segment_skin(rgb: np.ndarray, *, cleanup_size: int = 3,
                 background_size: int = 7) -> SkinMask:
    """Segment skin pixels in an RGB face crop.

    ``cleanup_size`` is the square kernel for the erosion/dilation noise pass
    and ``background_size`` the dilation radius whose complement seeds the
    background; both are exposed because the region-growing step has no
    canonical parameters.
    """
    arr = np.asarray(rgb)
    if arr.ndim != 3 or arr.shape[-1] != 3 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise ValueError(f"expected a non-empty HxWx3 crop, got shape {arr.shape}")

    markers = skin_markers(arr)
    kernel = np.ones((cleanup_size, cleanup_size), dtype=bool)
    cleaned = ndimage.binary_dilation(ndimage.binary_erosion(markers, kernel), kernel)
    if not cleaned.any():
        return SkinMask(np.zeros(markers.shape, dtype=bool))

    background = ~ndimage.binary_dilation(
        cleaned, np.ones((background_size, background_size), dtype=bool))
    seeds = np.zeros(markers.shape, dtype=np.int16)
    seeds[background] = 1
    seeds[cleaned] = 2
    grown = ndimage.watershed_ift(_gradient_magnitude(arr), seeds)
    return SkinMask(grown == 2)
