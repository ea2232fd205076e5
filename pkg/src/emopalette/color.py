"""sRGB pixels, CIELAB coordinates and the CIE76 color difference.

Conversions assume gamma-encoded sRGB input, D65 reference white and the
2 degree standard observer. Both a scalar path (one ``PixelColor``) and a
vectorized path (``(..., 3)`` uint8 arrays) are provided; they share the
same constants and agree to floating point rounding.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

# IEC 61966-2-1 sRGB -> XYZ (D65)
_RGB_TO_XYZ = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ],
    dtype=np.float64,
)
# White point taken as the image of RGB (1, 1, 1) so white lands on a* = b* = 0 exactly.
_WHITE = _RGB_TO_XYZ.sum(axis=1)

_EPSILON = 216.0 / 24389.0
_KAPPA = 24389.0 / 27.0


class PixelColor(NamedTuple):
    """An 8-bit sRGB triple."""

    r: int
    g: int
    b: int

    @classmethod
    def checked(cls, r: int, g: int, b: int) -> PixelColor:
        for name, v in (("r", r), ("g", g), ("b", b)):
            if isinstance(v, bool) or int(v) != v or not 0 <= v <= 255:
                raise ValueError(f"channel {name}={v!r} outside 0..255")
        return cls(int(r), int(g), int(b))

    def hex(self) -> str:
        return f"#{self.r:02x}{self.g:02x}{self.b:02x}"


class LabColor(NamedTuple):
    """CIELAB coordinates (L*, a*, b*)."""

    l: float  # noqa: E741
    a: float
    b: float


def _linearize(v: np.ndarray) -> np.ndarray:
    return np.where(v > 0.04045, ((v + 0.055) / 1.055) ** 2.4, v / 12.92)


def _f(t: np.ndarray) -> np.ndarray:
    return np.where(t > _EPSILON, np.cbrt(t), (_KAPPA * t + 16.0) / 116.0)


def srgb_array_to_lab(rgb: np.ndarray) -> np.ndarray:
    """Convert an ``(..., 3)`` array of 8-bit sRGB values to CIELAB.

    Returns a float64 array of the same leading shape with columns L*, a*, b*.
    """
    rgb = np.asarray(rgb)
    if rgb.shape[-1] != 3:
        raise ValueError(f"expected trailing dimension 3, got shape {rgb.shape}")
    linear = _linearize(rgb.astype(np.float64) / 255.0)
    xyz = linear @ _RGB_TO_XYZ.T
    fx, fy, fz = np.moveaxis(_f(xyz / _WHITE), -1, 0)
    lab = np.stack([116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)], axis=-1)
    # cube-root rounding can leave L* a hair outside [0, 100]
    lab[..., 0] = np.clip(lab[..., 0], 0.0, 100.0)
    return lab


def srgb_to_lab(c: PixelColor) -> LabColor:
    l, a, b = srgb_array_to_lab(np.array(c, dtype=np.uint8))
    return LabColor(float(l), float(a), float(b))


def delta_e(p: LabColor, q: LabColor) -> float:
    """CIE76 color difference: Euclidean distance in L*a*b*."""
    return math.dist(p, q)
