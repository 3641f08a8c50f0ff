"""Color space conversions used by the native extractors.

All functions are vectorized over arrays of shape (..., 3) holding 8-bit sRGB
values. CIE-Lab uses the standard sRGB transfer curve and the D65 white point
(2 degree observer); HSV is reported in degrees / percent to match the skin
threshold constants; YCbCr follows the full-range 8-bit (JPEG) convention the
chroma thresholds were defined on.
"""

from __future__ import annotations

import numpy as np

# D65 reference white (X, Y, Z), 2 degree observer, Y normalized to 100.
D65_WHITE = (95.047, 100.0, 108.883)

_SRGB_TO_XYZ = np.array([
    [0.4124564, 0.3575761, 0.1804375],
    [0.2126729, 0.7151522, 0.0721750],
    [0.0193339, 0.1191920, 0.9503041],
])

_LAB_EPS = 216.0 / 24389.0    # (6/29)^3
_LAB_KAPPA = 24389.0 / 27.0


def srgb_to_linear(channel: np.ndarray) -> np.ndarray:
    """Inverse sRGB transfer curve on values in [0, 1]."""
    c = np.asarray(channel, dtype=np.float64)
    return np.where(c <= 0.04045, c / 12.92, ((c + 0.055) / 1.055) ** 2.4)


def to_cielab(rgb: np.ndarray) -> np.ndarray:
    """Per-pixel CIE-Lab from 8-bit sRGB; L in [0, 100].

    Returns an array of the same leading shape with the last axis holding
    (L, a, b).
    """
    arr = np.asarray(rgb)
    if arr.shape[-1] != 3:
        raise ValueError(f"expected (..., 3) RGB array, got shape {arr.shape}")
    linear = srgb_to_linear(arr.astype(np.float64) / 255.0)
    xyz = linear @ _SRGB_TO_XYZ.T
    t = xyz * 100.0 / np.asarray(D65_WHITE)
    f = np.where(t > _LAB_EPS, np.cbrt(t), (_LAB_KAPPA * t + 16.0) / 116.0)
    lum = 116.0 * f[..., 1] - 16.0
    a = 500.0 * (f[..., 0] - f[..., 1])
    b = 200.0 * (f[..., 1] - f[..., 2])
    return np.stack([lum, a, b], axis=-1)


def rgb_to_hsv_degrees(rgb: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(H, S, V) with hue in degrees [0, 360) and S, V in percent [0, 100]."""
    arr = np.asarray(rgb).astype(np.float64) / 255.0
    r, g, b = arr[..., 0], arr[..., 1], arr[..., 2]
    v = arr.max(axis=-1)
    c = v - arr.min(axis=-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        h = np.where(
            c == 0, 0.0,
            np.where(v == r, ((g - b) / c) % 6.0,
                     np.where(v == g, (b - r) / c + 2.0, (r - g) / c + 4.0)))
        s = np.where(v == 0, 0.0, c / np.where(v == 0, 1.0, v))
    return (h * 60.0) % 360.0, s * 100.0, v * 100.0


def rgb_to_ycbcr(rgb: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Full-range 8-bit (Y, Cb, Cr); chroma centered at 128."""
    arr = np.asarray(rgb).astype(np.float64)
    r, g, b = arr[..., 0], arr[..., 1], arr[..., 2]
    y = 0.299 * r + 0.587 * g + 0.114 * b
    cb = 128.0 - 0.168736 * r - 0.331264 * g + 0.5 * b
    cr = 128.0 + 0.5 * r - 0.418688 * g - 0.081312 * b
    return y, cb, cr
